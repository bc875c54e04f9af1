use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::info::{context_index, context_symbols};

use super::{IidSpec, InitialContext, MarkovSpec, ProcessSpec};

/// A validation failure located by a dotted field path.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{path}: {message}")]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

impl SpecError {
    pub fn new(path: impl Into<String>, message: impl ToString) -> Self {
        Self {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Prepends `prefix` to the path.
    pub fn within(mut self, prefix: &str) -> Self {
        self.path = if self.path.is_empty() {
            prefix.to_string()
        } else {
            format!("{prefix}.{}", self.path)
        };
        self
    }
}

/// JSON form of a process.
///
/// Exactly one of three shapes is accepted:
/// - `{"bernoulli": p}`
/// - `{"probs": [..]}`
/// - `{"alphabet": k, "L": l, "delta": {context: [..]}, "init": ..}` where
///   contexts are digit strings (`"01"`) or comma-separated symbols (`"0,1"`),
///   oldest symbol first, and `init` is `"stationary"` (the default),
///   `{"context": ".."}` or `{"distribution": {context: p}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bernoulli: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitJson {
    Named(String),
    Context { context: String },
    Distribution { distribution: BTreeMap<String, f64> },
}

fn parse_context(text: &str, alphabet: usize, memory: usize) -> Result<Vec<usize>, String> {
    let symbols: Result<Vec<usize>, String> = if text.contains(',') {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad symbol {s:?}: {e}"))
            })
            .collect()
    } else {
        text.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| format!("bad symbol {c:?}"))
            })
            .collect()
    };
    let symbols = symbols?;
    if symbols.len() != memory {
        return Err(format!(
            "context {text:?} has {} symbols, expected {memory}",
            symbols.len()
        ));
    }
    if let Some(s) = symbols.iter().find(|&&s| s >= alphabet) {
        return Err(format!(
            "symbol {s} is outside the alphabet of size {alphabet}"
        ));
    }
    Ok(symbols)
}

fn format_context(symbols: &[usize], alphabet: usize) -> String {
    if alphabet <= 10 {
        symbols.iter().map(|s| s.to_string()).collect()
    } else {
        symbols
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl ProcessJson {
    pub fn bernoulli(p: f64) -> Self {
        Self {
            bernoulli: Some(p),
            ..Self::default()
        }
    }

    pub fn to_spec(&self) -> Result<ProcessSpec, SpecError> {
        let shapes = [
            self.bernoulli.is_some(),
            self.probs.is_some(),
            self.delta.is_some(),
        ];
        match shapes.iter().filter(|&&b| b).count() {
            1 => {}
            0 => {
                return Err(SpecError::new(
                    "",
                    "expected one of `bernoulli`, `probs` or `delta`",
                ))
            }
            _ => {
                return Err(SpecError::new(
                    "",
                    "`bernoulli`, `probs` and `delta` are mutually exclusive",
                ))
            }
        }
        if let Some(p) = self.bernoulli {
            return IidSpec::bernoulli(p)
                .map(ProcessSpec::Iid)
                .map_err(|e| SpecError::new("bernoulli", e));
        }
        if let Some(probs) = &self.probs {
            if self.alphabet.is_some_and(|k| k != probs.len()) {
                return Err(SpecError::new(
                    "alphabet",
                    "does not match the length of `probs`",
                ));
            }
            return IidSpec::new(probs)
                .map(ProcessSpec::Iid)
                .map_err(|e| SpecError::new("probs", e));
        }
        let delta = self.delta.as_ref().expect("checked above");
        let alphabet = self
            .alphabet
            .ok_or_else(|| SpecError::new("alphabet", "required with `delta`"))?;
        if alphabet == 0 {
            return Err(SpecError::new("alphabet", "must be positive"));
        }
        let memory = self
            .memory
            .ok_or_else(|| SpecError::new("L", "required with `delta`"))?;
        let contexts =
            super::markov::context_count(alphabet, memory).map_err(|e| SpecError::new("L", e))?;
        let mut rows: Vec<Option<IidSpec>> = vec![None; contexts];
        for (key, probs) in delta {
            let path = format!("delta.{key}");
            let ctx = parse_context(key, alphabet, memory).map_err(|e| SpecError::new(&path, e))?;
            let idx = context_index(&ctx, alphabet);
            if rows[idx].is_some() {
                return Err(SpecError::new(&path, "context listed twice"));
            }
            if probs.len() != alphabet {
                return Err(SpecError::new(
                    &path,
                    format!("has {} probabilities, expected {alphabet}", probs.len()),
                ));
            }
            rows[idx] = Some(IidSpec::new(probs).map_err(|e| SpecError::new(&path, e))?);
        }
        let rows: Vec<IidSpec> = rows
            .into_iter()
            .enumerate()
            .map(|(c, r)| {
                r.ok_or_else(|| {
                    SpecError::new(
                        "delta",
                        format!(
                            "missing context {:?}",
                            format_context(&context_symbols(c, alphabet, memory), alphabet)
                        ),
                    )
                })
            })
            .collect::<Result<_, _>>()?;
        let spec = match &self.init {
            None => MarkovSpec::with_stationary_init(alphabet, memory, rows),
            Some(InitJson::Named(name)) if name == "stationary" => {
                MarkovSpec::with_stationary_init(alphabet, memory, rows)
            }
            Some(InitJson::Named(other)) => {
                return Err(SpecError::new(
                    "init",
                    format!("unknown initialisation {other:?}; expected \"stationary\""),
                ))
            }
            Some(InitJson::Context { context }) => {
                let ctx = parse_context(context, alphabet, memory)
                    .map_err(|e| SpecError::new("init.context", e))?;
                MarkovSpec::new(alphabet, memory, rows, InitialContext::Fixed(ctx))
            }
            Some(InitJson::Distribution { distribution }) => {
                let mut probs = vec![0.0; contexts];
                for (key, p) in distribution {
                    let ctx = parse_context(key, alphabet, memory)
                        .map_err(|e| SpecError::new(format!("init.distribution.{key}"), e))?;
                    probs[context_index(&ctx, alphabet)] = *p;
                }
                let init =
                    IidSpec::new(&probs).map_err(|e| SpecError::new("init.distribution", e))?;
                MarkovSpec::new(alphabet, memory, rows, InitialContext::Distribution(init))
            }
        };
        spec.map(ProcessSpec::Markov)
            .map_err(|e| SpecError::new("", e))
    }
}

impl ProcessSpec {
    /// JSON form accepted by [`ProcessJson`].
    pub fn to_json(&self) -> Value {
        match self {
            ProcessSpec::Iid(s) => json!({ "probs": s.probs() }),
            ProcessSpec::Markov(m) => {
                let k = m.alphabet_size();
                let l = m.memory();
                let delta: BTreeMap<String, &[f64]> = m
                    .delta()
                    .iter()
                    .enumerate()
                    .map(|(c, row)| (format_context(&context_symbols(c, k, l), k), row.probs()))
                    .collect();
                let init = match m.init() {
                    InitialContext::Fixed(ctx) => json!({ "context": format_context(ctx, k) }),
                    InitialContext::Distribution(d) => {
                        let dist: BTreeMap<String, f64> = d
                            .probs()
                            .iter()
                            .enumerate()
                            .map(|(c, &p)| (format_context(&context_symbols(c, k, l), k), p))
                            .collect();
                        json!({ "distribution": dist })
                    }
                };
                json!({ "alphabet": k, "L": l, "delta": delta, "init": init })
            }
        }
    }
}
