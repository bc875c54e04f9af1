//! Command-line front end. Exit codes: 0 success, 1 failed verification or
//! I/O failure, 2 invalid config, 3 refused computation.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::{destination, load_config, schema_text, CliError, Format, Run};

#[derive(Parser)]
#[command(
    name = "idinfo",
    version,
    about = "Run identification and sample-complexity experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config
    Run(RunArgs),
    /// Run an analytic/oracle pair and report pass or fail
    Verify(RunArgs),
    /// Print the config schema
    Schema,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for Monte Carlo trials (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for output files when no output path is given
    #[arg(long, env = "IDINFO_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
}

fn execute(args: &RunArgs, verify: bool) -> Result<Run, CliError> {
    if let Some(n) = args.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Failed(format!("reading {}: {e}", args.config.display())))?;
    let mut cfg = load_config(&text)?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    let run = if verify {
        crate::verify(&cfg)?
    } else {
        crate::run(&cfg)?
    };
    let format = args.format.or(cfg.format).unwrap_or_default();
    let text = run.render(format)?;
    match destination(
        args.out.as_deref(),
        &cfg,
        args.output_dir.as_deref(),
        format,
    ) {
        Some(path) => write_file(&path, &text)?,
        None => print!("{text}"),
    }
    Ok(run)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Failed(format!("creating {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Failed(format!("writing {}: {e}", path.display())))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (args, verify) = match &cli.command {
        Command::Schema => {
            print!("{}", schema_text());
            return 0;
        }
        Command::Run(a) => (a, false),
        Command::Verify(a) => (a, true),
    };
    match execute(args, verify) {
        Ok(run) if run.passed == Some(false) => {
            eprintln!("verification failed");
            1
        }
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as u8
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn call(args: &[&str]) -> u8 {
        main_with(std::iter::once("idinfo").chain(args.iter().copied()))
    }

    fn run_to(dir: &Path, cmd: &str, config: &Path, out: &str, extra: &[&str]) -> (u8, String) {
        let out = dir.join(out);
        let mut args = vec![
            cmd,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let code = call(&args);
        (code, std::fs::read_to_string(&out).unwrap_or_default())
    }

    const TYPICAL_BOUNDS: &str = r#"{"kind":"typical_bounds","seed":1,"params":{"spec":{"bernoulli":0.5},"p":0.7,"q":0.6,"t_max":10}}"#;

    #[test]
    fn exit_codes_follow_the_contract() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        let ok = write(d, "ok.json", TYPICAL_BOUNDS);
        assert_eq!(run_to(d, "run", &ok, "ok.csv", &["--format", "csv"]).0, 0);

        let q_above_p = write(
            d,
            "q.json",
            r#"{"kind":"typical_bounds","seed":1,"params":{"spec":{"bernoulli":0.5},"p":0.6,"q":0.7,"t_max":10}}"#,
        );
        assert_eq!(run_to(d, "run", &q_above_p, "q.json", &[]).0, 2);

        let no_trials = write(
            d,
            "t.json",
            r#"{"kind":"bayes","seed":1,"params":{"ideal":{"bernoulli":0.5},"hypotheses":[{"bernoulli":0.5}],"p":0.9,"trials":0,"budget":10}}"#,
        );
        assert_eq!(run_to(d, "run", &no_trials, "t.out", &[]).0, 2);

        let unknown = write(d, "u.json", r#"{"kind":"plot","seed":1,"params":{}}"#);
        assert_eq!(run_to(d, "run", &unknown, "u.out", &[]).0, 2);
        let unknown_pair = write(
            d,
            "up.json",
            r#"{"pair":"stopping-guess","seed":1,"params":{}}"#,
        );
        assert_eq!(run_to(d, "verify", &unknown_pair, "up.out", &[]).0, 2);
        // a config of the wrong sort for the command
        assert_eq!(run_to(d, "verify", &ok, "w.out", &[]).0, 2);

        // 2^40 sequences cannot be enumerated exactly
        let huge = write(
            d,
            "h.json",
            r#"{"pair":"moments-mc","seed":1,"params":{"hypotheses":[{"probs":[0.25,0.25,0.25,0.25]},{"probs":[0.1,0.2,0.3,0.4]}],"ideal":0,"t_max":20,"samples":10}}"#,
        );
        assert_eq!(run_to(d, "verify", &huge, "h.out", &[]).0, 3);

        let missing = d.join("absent.json");
        assert_eq!(run_to(d, "run", &missing, "m.out", &[]).0, 1);
        assert_eq!(call(&["run"]), 2);
    }

    #[test]
    fn impossible_tolerance_fails_verification() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        let loose = write(
            d,
            "l.json",
            r#"{"pair":"coin-bits","seed":3,"params":{"specs":[[0.25,0.75]],"samples":20000,"tolerance":0.05}}"#,
        );
        let (code, text) = run_to(d, "verify", &loose, "l.json", &[]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["result"]["pass"], true);
        let tight = write(
            d,
            "t.json",
            r#"{"pair":"coin-bits","seed":3,"params":{"specs":[[0.25,0.75]],"samples":20000,"tolerance":0}}"#,
        );
        assert_eq!(run_to(d, "verify", &tight, "t.json", &[]).0, 1);
    }

    #[test]
    fn seed_flag_overrides_and_output_dir_is_used() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        let cfg = write(
            d,
            "s.json",
            r#"{"kind":"sample","seed":1,"params":{"spec":{"bernoulli":0.3},"n":1000}}"#,
        );
        let (_, a) = run_to(d, "run", &cfg, "a.json", &["--seed", "5"]);
        let a: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(a["seed"], 5);
        assert_eq!(a["config"]["seed"], 5);

        let outdir = d.join("results");
        let code = call(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--output-dir",
            outdir.to_str().unwrap(),
            "--format",
            "csv",
        ]);
        assert_eq!(code, 0);
        let csv = std::fs::read_to_string(outdir.join("sample-1.csv")).unwrap();
        assert!(csv.starts_with("symbol,count,frequency,probability\n"));
    }

    #[test]
    fn config_format_and_out_are_honoured() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        let target = d.join("nested").join("pairwise.csv");
        let text = format!(
            r#"{{"kind":"scdist","seed":0,"format":"csv","out":{},"params":{{"law":"pairwise","L":4,"K":2}}}}"#,
            serde_json::to_string(target.to_str().unwrap()).unwrap()
        );
        let cfg = write(d, "p.json", &text);
        assert_eq!(call(&["run", "--config", cfg.to_str().unwrap()]), 0);
        assert_eq!(
            std::fs::read_to_string(&target).unwrap(),
            "i,pmf,cdf\n1,0.5,0.5\n2,0.33333333333333331,0.83333333333333337\n3,0.16666666666666666,1\n"
        );
    }
}
