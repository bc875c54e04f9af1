use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(idinfo_tool::cli::main_with(std::env::args_os()))
}
