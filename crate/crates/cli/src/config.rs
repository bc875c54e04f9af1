use std::path::PathBuf;
use std::sync::OnceLock;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

const SCHEMA: &str = include_str!("../schema/experiment.schema.json");

/// The published config schema.
pub fn schema_text() -> &'static str {
    SCHEMA
}

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let schema: Value = serde_json::from_str(SCHEMA).expect("bundled schema is JSON");
        jsonschema::validator_for(&schema).expect("bundled schema compiles")
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Identify,
    Scdist,
    Sample,
    Spread,
    Bayes,
    Novelty,
    TypicalBounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pair {
    StoppingLawEnumeration,
    GeometricMc,
    CoinBits,
    ExpectedScMc,
    MomentsMc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Experiment(Kind),
    Verify(Pair),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    #[serde(default)]
    kind: Option<Kind>,
    #[serde(default)]
    pair: Option<Pair>,
    seed: u64,
    #[serde(default)]
    format: Option<Format>,
    #[serde(default)]
    out: Option<PathBuf>,
    params: Value,
}

/// A schema-valid config. Parameters stay untyped until the target parses
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub target: Target,
    pub seed: u64,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub params: Value,
    /// The document as given, echoed into results.
    pub raw: Value,
}

impl Config {
    /// `kind` or `pair` as written in the config.
    pub fn name(&self) -> String {
        let v = match self.target {
            Target::Experiment(k) => serde_json::to_value(k),
            Target::Verify(p) => serde_json::to_value(p),
        };
        v.ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default()
    }

    /// Replaces the seed, keeping the echo in step.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let Value::Object(map) = &mut self.raw {
            map.insert("seed".into(), seed.into());
        }
        self
    }
}

fn dotted(pointer: &str) -> String {
    pointer.trim_start_matches('/').replace('/', ".")
}

/// Parses and schema-checks a config document.
pub fn load_config(text: &str) -> Result<Config, CliError> {
    let raw: Value = serde_json::from_str(text)
        .map_err(|e| CliError::invalid("", format!("not valid JSON: {e}")))?;
    if let Some(err) = validator().iter_errors(&raw).next() {
        return Err(CliError::invalid(
            dotted(&err.instance_path.to_string()),
            err,
        ));
    }
    let env: Envelope = parse_at(&raw, "")?;
    let target = match (env.kind, env.pair) {
        (Some(k), None) => Target::Experiment(k),
        (None, Some(p)) => Target::Verify(p),
        _ => {
            return Err(CliError::invalid(
                "",
                "exactly one of `kind` and `pair` is required",
            ))
        }
    };
    Ok(Config {
        target,
        seed: env.seed,
        format: env.format,
        out: env.out,
        params: env.params,
        raw,
    })
}

/// Deserializes `value`, reporting failures with their field path under
/// `prefix`.
pub fn parse_at<T: DeserializeOwned>(value: &Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner == ".") {
            (_, true) => prefix.to_string(),
            (true, false) => inner,
            (false, false) => format!("{prefix}.{inner}"),
        };
        CliError::invalid(path, e.into_inner())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(text: &str) -> String {
        match load_config(text) {
            Err(CliError::Invalid { path, .. }) => path,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_reports_field_paths() {
        let ok = r#"{"kind":"typical_bounds","seed":1,"params":{"spec":{"bernoulli":0.5},"p":0.7,"q":0.6,"t_max":10}}"#;
        assert_eq!(
            load_config(ok).unwrap().target,
            Target::Experiment(Kind::TypicalBounds)
        );
        let bad = r#"{"kind":"typical_bounds","seed":1,"params":{"spec":{"bernoulli":0.5},"p":1.7,"q":0.6,"t_max":10}}"#;
        assert_eq!(path_of(bad), "params.p");
        assert_eq!(path_of(r#"{"kind":"nope","seed":1,"params":{}}"#), "kind");
        assert_eq!(path_of("{"), "");
    }

    #[test]
    fn kind_and_pair_are_exclusive() {
        let both = r#"{"kind":"typical_bounds","pair":"coin-bits","seed":1,"params":{}}"#;
        assert!(load_config(both).is_err());
        let pair = load_config(r#"{"pair":"coin-bits","seed":1,"params":{}}"#).unwrap();
        assert_eq!(pair.target, Target::Verify(Pair::CoinBits));
        assert_eq!(pair.name(), "coin-bits");
    }

    #[test]
    fn seed_override_updates_echo() {
        let c = load_config(r#"{"pair":"coin-bits","seed":1,"params":{}}"#)
            .unwrap()
            .with_seed(9);
        assert_eq!(c.raw["seed"], 9);
    }

    #[test]
    fn typed_paths_are_prefixed() {
        #[derive(Debug, Deserialize)]
        #[allow(dead_code)]
        struct P {
            n: usize,
        }
        let v: Value = serde_json::json!({"n": -1});
        match parse_at::<P>(&v, "params") {
            Err(CliError::Invalid { path, .. }) => assert_eq!(path, "params.n"),
            other => panic!("{other:?}"),
        }
    }
}
