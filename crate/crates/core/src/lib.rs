pub mod bayes;
pub mod identify;
pub mod info;
pub mod process;
pub mod scdist;
