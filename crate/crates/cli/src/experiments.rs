//! Typed parameters and runners for each experiment kind. Parameters are
//! checked in `prepare`, so a config that reaches `run` is fully valid.

use idinfo_core::bayes::{
    expected_sc_evaluator, mc_sample_complexity, set_falsification_bounds, trace_trial,
    typical_bounds_table, BayesError, HypothesisSet, McSampleComplexity, SearchOptions,
    StoppingConfig,
};
use idinfo_core::identify::{
    build_context_tree, identify_depth_first, identify_sorted, identify_tree, substring_identify,
    BitString, IdOutcome, Query, Resolution, SortedHypothesisSet,
};
use idinfo_core::info::ProbVector;
use idinfo_core::process::{
    sample_discrete, spread_decode, spread_encode, BitSource, IidSpec, ProcessJson, ProcessSpec,
    SpreadCode,
};
use idinfo_core::scdist::{
    dist_moments, dist_moments_exact, geometric_pmf, mc_geometric_oracle, pairwise_verification,
    pmf_table, GeometricScDist, PairwiseScDist, ScDist,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{parse_at, Kind};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// What a run produces: a JSON payload and its CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub result: Value,
    pub table: Table,
}

pub(crate) fn to_spec(json: &ProcessJson, path: &str) -> Result<ProcessSpec, CliError> {
    json.to_spec().map_err(|e| e.within(path).into())
}

fn iid_component(json: &ProcessJson, path: &str) -> Result<IidSpec, CliError> {
    match to_spec(json, path)? {
        ProcessSpec::Iid(law) => Ok(law),
        ProcessSpec::Markov(_) => Err(CliError::invalid(
            path,
            "spread components must be memoryless",
        )),
    }
}

pub(crate) fn build_set(
    hypotheses: &[ProcessJson],
    labels: Option<Vec<String>>,
    prior: Option<&[f64]>,
) -> Result<(HypothesisSet, ProbVector), CliError> {
    let members = hypotheses
        .iter()
        .enumerate()
        .map(|(i, h)| to_spec(h, &format!("params.hypotheses.{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    let set = match labels {
        Some(l) => HypothesisSet::with_labels(members, l).map_err(|e| match e {
            BayesError::LabelCount(..) => CliError::invalid("params.labels", e),
            other => other.into(),
        })?,
        None => HypothesisSet::new(members)?,
    };
    let prior = match prior {
        Some(p) => {
            if p.len() != set.len() {
                return Err(CliError::invalid(
                    "params.prior",
                    format!("{} entries for {} hypotheses", p.len(), set.len()),
                ));
            }
            ProbVector::new(p.to_vec()).map_err(|e| CliError::invalid("params.prior", e))?
        }
        None => set.uniform_prior(),
    };
    Ok((set, prior))
}

fn check_alphabet(ideal: &ProcessSpec, set: &HypothesisSet) -> Result<(), CliError> {
    if ideal.alphabet_size() != set.alphabet_size() {
        return Err(CliError::invalid(
            "params.ideal",
            format!(
                "alphabet {} differs from the hypotheses' {}",
                ideal.alphabet_size(),
                set.alphabet_size()
            ),
        ));
    }
    Ok(())
}

fn positive(n: usize, path: &str) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::invalid(path, "must be at least 1"));
    }
    Ok(())
}

// identify

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Procedure {
    Sorted,
    DepthFirst,
    Tree,
    #[default]
    All,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentifyParams {
    pub set: Vec<BitString>,
    pub query: BitString,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub procedure: Procedure,
    #[serde(default)]
    pub window: Option<Window>,
}

struct Identify {
    list: Vec<BitString>,
    set: SortedHypothesisSet,
    query: BitString,
    r: Resolution,
    procedure: Procedure,
    window: Option<Window>,
}

impl Identify {
    fn prepare(p: IdentifyParams) -> Result<Self, CliError> {
        let r = Resolution::new(p.r).map_err(|e| CliError::invalid("params.r", e))?;
        if p.query.is_empty() {
            return Err(CliError::invalid("params.query", "empty query"));
        }
        if let Some(i) = p.set.iter().position(BitString::is_empty) {
            return Err(CliError::invalid(format!("params.set.{i}"), "empty member"));
        }
        for (i, m) in p.set.iter().enumerate() {
            if p.set[..i].contains(m) {
                return Err(CliError::invalid(
                    format!("params.set.{i}"),
                    "duplicate member",
                ));
            }
        }
        if let Some(w) = p.window {
            if w.start == 0 || w.len == 0 || w.start - 1 + w.len > p.query.len() {
                return Err(CliError::invalid(
                    "params.window",
                    "window does not fit the query",
                ));
            }
        }
        let set = SortedHypothesisSet::from_unsorted(p.set.clone())?;
        Ok(Self {
            list: p.set,
            set,
            query: p.query,
            r,
            procedure: p.procedure,
            window: p.window,
        })
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let mut table = Table::new(["procedure", "status", "h", "i", "partial_subset"]);
        let mut outcomes = Vec::new();
        let mut push = |name: &str, members: &[BitString], o: &IdOutcome| {
            let strings: Vec<String> = o
                .partial_subset
                .iter()
                .map(|&j| members[j - 1].to_string())
                .collect();
            table.push(vec![
                name.into(),
                json!(o.status).as_str().unwrap_or_default().into(),
                o.h.into(),
                o.i.into(),
                strings.join(" ").into(),
            ]);
            outcomes.push(json!({
                "procedure": name,
                "status": o.status,
                "h": o.h,
                "i": o.i,
                "partial_subset": o.partial_subset,
                "partial_members": strings,
            }));
        };
        let query = Query::Finite(self.query.clone());
        if let Some(w) = self.window {
            let s = substring_identify(&self.set, &self.query, w.start, w.len, self.r)?;
            push("substring", s.slices.members(), &s.outcome);
            let result = json!({
                "outcomes": outcomes,
                "slices": s.slices.members(),
                "sources": s.sources,
                "novel": s.outcome.status == idinfo_core::identify::IdStatus::Falsified,
            });
            return Ok(Outcome { result, table });
        }
        let mut statuses = Vec::new();
        if matches!(self.procedure, Procedure::Sorted | Procedure::All) {
            let o = identify_sorted(&self.set, &query, self.r)?;
            push("sorted", self.set.members(), &o);
            statuses.push(o.status);
        }
        if matches!(self.procedure, Procedure::Tree | Procedure::All) {
            let o = identify_tree(&build_context_tree(&self.set), &query, self.r)?;
            push("tree", self.set.members(), &o);
            statuses.push(o.status);
        }
        if matches!(self.procedure, Procedure::DepthFirst | Procedure::All) {
            let o = identify_depth_first(&self.list, &query, self.r)?;
            push("depth_first", &self.list, &o);
            statuses.push(o.status);
        }
        let agree = statuses.windows(2).all(|w| w[0] == w[1]);
        Ok(Outcome {
            result: json!({ "outcomes": outcomes, "agree": agree }),
            table,
        })
    }
}

// scdist

fn default_rows() -> usize {
    1_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScdistParams {
    Pairwise {
        #[serde(rename = "L")]
        length: usize,
        #[serde(rename = "K")]
        differing: usize,
    },
    Geometric {
        p: f64,
        #[serde(default = "default_rows")]
        rows: usize,
        #[serde(default)]
        trials: Option<u64>,
    },
}

struct Scdist {
    dist: ScDist,
    rows: usize,
    trials: Option<u64>,
}

impl Scdist {
    fn prepare(p: ScdistParams) -> Result<Self, CliError> {
        Ok(match p {
            ScdistParams::Pairwise { length, differing } => {
                if length == 0 {
                    return Err(CliError::invalid("params.L", "must be at least 1"));
                }
                if differing > length {
                    return Err(CliError::invalid(
                        "params.K",
                        format!("K = {differing} exceeds L = {length}"),
                    ));
                }
                let dist = if differing == 0 {
                    pairwise_verification(length)?
                } else {
                    ScDist::Pairwise(PairwiseScDist::new(length, differing)?)
                };
                Self {
                    dist,
                    rows: usize::MAX,
                    trials: None,
                }
            }
            ScdistParams::Geometric { p, rows, trials } => {
                positive(rows, "params.rows")?;
                let g = GeometricScDist::new(p).map_err(|e| CliError::invalid("params.p", e))?;
                Self {
                    dist: ScDist::Geometric(g),
                    rows,
                    trials,
                }
            }
        })
    }

    fn run(&self, seed: u64) -> Result<Outcome, CliError> {
        let rows = pmf_table(&self.dist, self.rows)?;
        let moments = (1..=4)
            .map(|m| dist_moments(&self.dist, m))
            .collect::<Result<Vec<_>, _>>()?;
        let exact_moments = (1..=4)
            .map(|m| dist_moments_exact(&self.dist, m).map(|o| o.map(|r| r.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let exact_pmf: Option<Vec<String>> = match &self.dist {
            ScDist::Pairwise(d) => {
                Some(rows.iter().map(|r| d.pmf_exact(r.i).to_string()).collect())
            }
            ScDist::PointMass(_) => Some(vec!["1".into()]),
            _ => None,
        };
        let empirical = match (&self.dist, self.trials) {
            (ScDist::Geometric(g), Some(trials)) => Some(mc_geometric_oracle(g.p, trials, seed)?),
            _ => None,
        };
        let mut header = vec!["i", "pmf", "cdf"];
        if empirical.is_some() {
            header.push("empirical");
        }
        let mut table = Table::new(header);
        for r in &rows {
            let mut row = vec![r.i.into(), r.pmf.into(), r.cdf.into()];
            if let Some(e) = &empirical {
                row.push(e.pmf(r.i).into());
            }
            table.push(row);
        }
        let mut result = json!({
            "rows": rows,
            "moments": moments,
            "exact_moments": exact_moments,
            "exact_pmf": exact_pmf,
        });
        if let (Some(e), ScDist::Geometric(g)) = (&empirical, &self.dist) {
            let p = g.p;
            result["empirical"] = json!({
                "trials": e.trials(),
                "total_variation": e.total_variation(|i| geometric_pmf(p, i).unwrap_or(0.0)),
                "counts": e.counts(),
            });
        }
        Ok(Outcome { result, table })
    }
}

// sample

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleParams {
    pub spec: ProcessJson,
    pub n: usize,
}

struct Sample {
    spec: ProcessSpec,
    n: usize,
}

/// Symbol counts and fair bits consumed for `n` draws.
pub(crate) fn draw_counts(spec: &ProcessSpec, n: usize, src: &mut BitSource) -> (Vec<u64>, u64) {
    let mut counts = vec![0u64; spec.alphabet_size()];
    match spec {
        ProcessSpec::Iid(law) => {
            let mut bits = 0u64;
            for _ in 0..n {
                let s = sample_discrete(law, src);
                counts[s.symbol] += 1;
                bits += u64::from(s.bits);
            }
            (counts, bits)
        }
        ProcessSpec::Markov(_) => {
            let before = src.consumed();
            for x in spec.sample(n, src) {
                counts[x] += 1;
            }
            (counts, src.consumed() - before)
        }
    }
}

/// Long-run symbol frequencies.
fn marginal(spec: &ProcessSpec) -> Result<Vec<f64>, CliError> {
    match spec {
        ProcessSpec::Iid(law) => Ok(law.probs().to_vec()),
        ProcessSpec::Markov(_) => {
            let k = spec.alphabet_size();
            let contexts = spec.stationary_at(spec.memory().max(1))?;
            let mut out = vec![0.0; k];
            // the newest symbol is the least significant digit of the context index
            for (c, w) in contexts.iter().enumerate() {
                out[c % k] += w;
            }
            Ok(out)
        }
    }
}

pub(crate) fn total_variation(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    0.5 * counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64 / n as f64 - p).abs())
        .sum::<f64>()
}

impl Sample {
    fn prepare(p: SampleParams) -> Result<Self, CliError> {
        positive(p.n, "params.n")?;
        Ok(Self {
            spec: to_spec(&p.spec, "params.spec")?,
            n: p.n,
        })
    }

    fn run(&self, seed: u64) -> Result<Outcome, CliError> {
        let probs = marginal(&self.spec)?;
        let entropy_rate = self.spec.entropy_rate()?;
        let (counts, bits) = draw_counts(&self.spec, self.n, &mut BitSource::new(seed));
        let mean_bits = bits as f64 / self.n as f64;
        let mut table = Table::new(["symbol", "count", "frequency", "probability"]);
        for (s, (&c, &p)) in counts.iter().zip(&probs).enumerate() {
            table.push(vec![
                s.into(),
                c.into(),
                (c as f64 / self.n as f64).into(),
                p.into(),
            ]);
        }
        let bound = matches!(self.spec, ProcessSpec::Iid(_))
            .then(|| entropy_rate <= mean_bits && mean_bits < entropy_rate + 2.0);
        Ok(Outcome {
            result: json!({
                "n": self.n,
                "counts": counts,
                "probabilities": probs,
                "total_variation": total_variation(&counts, &probs),
                "entropy_rate": entropy_rate,
                "bits_consumed": bits,
                "mean_bits": mean_bits,
                "mean_bits_within_entropy_plus_two": bound,
            }),
            table,
        })
    }
}

// spread

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadParams {
    pub message: BitString,
    pub zero: ProcessJson,
    pub one: ProcessJson,
    pub t: usize,
    pub trials: usize,
}

struct Spread {
    code: SpreadCode,
    message: Vec<bool>,
    t: usize,
    trials: usize,
}

/// Decoded message, whether it is right, and its posterior error probability.
pub(crate) fn spread_trial(
    code: &SpreadCode,
    message: &[bool],
    t: usize,
    src: &mut BitSource,
) -> Result<(Vec<Option<bool>>, bool, f64), CliError> {
    let [zero, one] = code.components();
    let obs = spread_encode(code, message, t, src)?;
    let dec = spread_decode(&obs, message.len(), zero, one)?;
    let correct = dec.message().as_deref() == Some(message);
    let err = dec.error_probability();
    Ok((dec.bits, correct, err))
}

impl Spread {
    fn prepare(p: SpreadParams) -> Result<Self, CliError> {
        positive(p.t, "params.t")?;
        positive(p.trials, "params.trials")?;
        if p.message.is_empty() {
            return Err(CliError::invalid("params.message", "empty message"));
        }
        let zero = iid_component(&p.zero, "params.zero")?;
        let one = iid_component(&p.one, "params.one")?;
        let code = SpreadCode::new(p.message.len(), zero, one)
            .map_err(|e| CliError::invalid("params.one", e))?;
        Ok(Self {
            code,
            message: p.message.bits().to_vec(),
            t: p.t,
            trials: p.trials,
        })
    }

    fn run(&self, seed: u64) -> Result<Outcome, CliError> {
        let runs = (0..self.trials)
            .into_par_iter()
            .map(|k| {
                spread_trial(
                    &self.code,
                    &self.message,
                    self.t,
                    &mut BitSource::with_stream(seed, k as u64),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut table = Table::new(["trial", "decoded", "correct", "error_probability"]);
        let mut errors = 0usize;
        let mut posterior_error = 0.0;
        for (k, (bits, correct, err)) in runs.iter().enumerate() {
            let decoded: String = bits
                .iter()
                .map(|b| match b {
                    Some(true) => '1',
                    Some(false) => '0',
                    None => '?',
                })
                .collect();
            errors += usize::from(!correct);
            posterior_error += err;
            table.push(vec![
                k.into(),
                decoded.into(),
                (*correct).into(),
                (*err).into(),
            ]);
        }
        Ok(Outcome {
            result: json!({
                "t": self.t,
                "trials": self.trials,
                "errors": errors,
                "error_rate": errors as f64 / self.trials as f64,
                "mean_error_probability": posterior_error / self.trials as f64,
            }),
            table,
        })
    }
}

// bayes and novelty

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BayesParams {
    pub ideal: ProcessJson,
    pub hypotheses: Vec<ProcessJson>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub prior: Option<Vec<f64>>,
    pub p: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub eps_d: f64,
    #[serde(default)]
    pub r: f64,
    pub trials: usize,
    pub budget: usize,
    #[serde(default)]
    pub trace: bool,
    #[serde(default)]
    pub trace_trial: usize,
}

struct Bayes {
    ideal: ProcessSpec,
    set: HypothesisSet,
    prior: ProbVector,
    cfg: StoppingConfig,
    trials: usize,
    budget: usize,
    trace: Option<usize>,
}

fn stopping_config(p: f64, q: f64, eps_d: f64, r: f64) -> Result<StoppingConfig, CliError> {
    Ok(StoppingConfig::new(p, q, eps_d, r)?)
}

fn summary(mc: &McSampleComplexity) -> Value {
    let ci = match (mc.mean, mc.ci95_half_width) {
        (Some(m), Some(h)) => {
            json!({ "level": 0.95, "lower": m - h, "upper": m + h, "half_width": h })
        }
        _ => Value::Null,
    };
    json!({
        "decision_histogram": mc.histogram,
        "stopping_moments": {
            "mean": mc.mean,
            "variance": mc.variance,
            "median": mc.median,
            "raw": mc.raw_moments,
        },
        "ci": ci,
    })
}

fn histogram_table(times: impl Iterator<Item = usize>) -> Table {
    let mut counts = std::collections::BTreeMap::<usize, u64>::new();
    for t in times {
        *counts.entry(t).or_default() += 1;
    }
    let mut table = Table::new(["t", "count"]);
    for (t, c) in counts {
        table.push(vec![t.into(), c.into()]);
    }
    table
}

impl Bayes {
    fn prepare(p: BayesParams) -> Result<Self, CliError> {
        positive(p.trials, "params.trials")?;
        positive(p.budget, "params.budget")?;
        let ideal = to_spec(&p.ideal, "params.ideal")?;
        let (set, prior) = build_set(&p.hypotheses, p.labels, p.prior.as_deref())?;
        check_alphabet(&ideal, &set)?;
        let cfg = stopping_config(p.p, p.q, p.eps_d, p.r)?;
        if p.trace && p.trace_trial >= p.trials {
            return Err(CliError::invalid(
                "params.trace_trial",
                "must name one of the trials",
            ));
        }
        Ok(Self {
            ideal,
            set,
            prior,
            cfg,
            trials: p.trials,
            budget: p.budget,
            trace: p.trace.then_some(p.trace_trial),
        })
    }

    fn run(&self, seed: u64) -> Result<Outcome, CliError> {
        let mc = mc_sample_complexity(
            &self.ideal,
            &self.set,
            &self.prior,
            &self.cfg,
            self.trials,
            self.budget,
            seed,
        )?;
        let mut result = summary(&mc);
        let matching = self.set.matching(&self.ideal);
        result["ideal_members"] = json!(matching);
        result["analytic_expected_t"] = match matching.first() {
            Some(&m) => {
                let opts = SearchOptions {
                    seed,
                    ..SearchOptions::default()
                };
                json!(expected_sc_evaluator(
                    &self.set,
                    m,
                    &self.prior,
                    self.cfg.p,
                    &opts
                )?)
            }
            None => Value::Null,
        };
        result["falsification_bounds"] = if self.cfg.q > 0.0 {
            match set_falsification_bounds(&self.ideal, &self.set, self.cfg.q) {
                Ok((lower, upper)) => json!({ "lower": lower, "upper": upper }),
                Err(BayesError::Config { .. }) => Value::Null,
                Err(e) => return Err(e.into()),
            }
        } else {
            Value::Null
        };
        let table = match self.trace {
            Some(k) => {
                let (_, rows) = trace_trial(
                    &self.ideal,
                    &self.set,
                    &self.prior,
                    &self.cfg,
                    self.budget,
                    seed,
                    k,
                )?;
                let mut header = vec!["t".to_string(), "status".to_string()];
                header.extend(self.set.labels().iter().map(|l| format!("posterior_{l}")));
                let mut table = Table::new(header);
                for r in &rows {
                    let mut row: Vec<Cell> = vec![r.t.into(), r.status.into()];
                    row.extend(r.posterior.iter().map(|&p| Cell::from(p)));
                    table.push(row);
                }
                result["trace"] = json!({ "trial": k, "rows": rows });
                table
            }
            None => histogram_table(mc.outcomes.iter().filter(|o| !o.censored).map(|o| o.t)),
        };
        Ok(Outcome { result, table })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoveltyParams {
    pub ideal: ProcessJson,
    pub hypotheses: Vec<ProcessJson>,
    #[serde(default)]
    pub prior: Option<Vec<f64>>,
    pub p: f64,
    pub q: f64,
    pub trials: usize,
    pub budget: usize,
}

struct Novelty {
    ideal: ProcessSpec,
    set: HypothesisSet,
    prior: ProbVector,
    cfg: StoppingConfig,
    trials: usize,
    budget: usize,
}

impl Novelty {
    fn prepare(p: NoveltyParams) -> Result<Self, CliError> {
        positive(p.trials, "params.trials")?;
        positive(p.budget, "params.budget")?;
        let ideal = to_spec(&p.ideal, "params.ideal")?;
        let (set, prior) = build_set(&p.hypotheses, None, p.prior.as_deref())?;
        check_alphabet(&ideal, &set)?;
        if p.q == 0.0 {
            return Err(CliError::invalid(
                "params.q",
                "q must be positive for falsification to halt",
            ));
        }
        Ok(Self {
            ideal,
            set,
            prior,
            cfg: stopping_config(p.p, p.q, 0.0, 0.0)?,
            trials: p.trials,
            budget: p.budget,
        })
    }

    fn run(&self, seed: u64) -> Result<Outcome, CliError> {
        let mc = mc_sample_complexity(
            &self.ideal,
            &self.set,
            &self.prior,
            &self.cfg,
            self.trials,
            self.budget,
            seed,
        )?;
        let mut times: Vec<usize> = mc
            .outcomes
            .iter()
            .filter(|o| !o.censored && o.kind == idinfo_core::bayes::DecisionKind::Falsified)
            .map(|o| o.t)
            .collect();
        times.sort_unstable();
        let median = (!times.is_empty()).then(|| {
            let mid = times.len() / 2;
            if times.len() % 2 == 1 {
                times[mid] as f64
            } else {
                0.5 * (times[mid - 1] + times[mid]) as f64
            }
        });
        let bounds = match set_falsification_bounds(&self.ideal, &self.set, self.cfg.q) {
            Ok(b) => Some(b),
            Err(BayesError::Config { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let in_bounds = match (median, bounds) {
            (Some(m), Some((lo, hi))) => Some(m >= lo && hi.is_none_or(|h| m <= h)),
            _ => None,
        };
        let falsified = mc.histogram.falsified;
        let result = json!({
            "trials": self.trials,
            "falsified": falsified,
            "falsified_fraction": falsified as f64 / self.trials as f64,
            "verified": mc.histogram.verified + mc.histogram.partially_identified,
            "censored": mc.histogram.censored,
            "median_falsification_t": median,
            "falsification_bounds": bounds.map(|(lower, upper)| json!({ "lower": lower, "upper": upper })),
            "median_in_bounds": in_bounds,
            "ideal_is_member": !self.set.matching(&self.ideal).is_empty(),
        });
        Ok(Outcome {
            result,
            table: histogram_table(times.into_iter()),
        })
    }
}

// typical_bounds

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypicalBoundsParams {
    pub spec: ProcessJson,
    pub p: f64,
    pub q: f64,
    pub t_max: usize,
}

struct TypicalBounds {
    spec: ProcessSpec,
    p: f64,
    q: f64,
    t_max: usize,
}

impl TypicalBounds {
    fn prepare(p: TypicalBoundsParams) -> Result<Self, CliError> {
        positive(p.t_max, "params.t_max")?;
        if p.q > p.p {
            return Err(CliError::invalid(
                "params.q",
                format!("q = {} exceeds p = {}", p.q, p.p),
            ));
        }
        Ok(Self {
            spec: to_spec(&p.spec, "params.spec")?,
            p: p.p,
            q: p.q,
            t_max: p.t_max,
        })
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let rows = typical_bounds_table(&self.spec, self.p, self.q, self.t_max)?;
        let h = self.spec.entropy_rate()?;
        let mut table = Table::new([
            "t",
            "verify_lower",
            "verify_upper",
            "falsify_lower",
            "falsify_upper",
            "log2_verify_lower",
            "log2_verify_upper",
            "log2_falsify_lower",
            "log2_falsify_upper",
        ]);
        for r in &rows {
            let mut row: Vec<Cell> = vec![r.t.into()];
            let values = [
                r.verify_lower,
                r.verify_upper,
                r.falsify_lower,
                r.falsify_upper,
            ];
            row.extend(values.iter().map(|&v| Cell::from(v)));
            row.extend(values.iter().map(|&v| Cell::from(v.log2())));
            table.push(row);
        }
        Ok(Outcome {
            result: json!({
                "entropy_rate": h,
                "step_ratio": (-h).exp2(),
                "rows": rows,
            }),
            table,
        })
    }
}

enum Prepared {
    Identify(Identify),
    Scdist(Scdist),
    Sample(Sample),
    Spread(Spread),
    Bayes(Bayes),
    Novelty(Novelty),
    TypicalBounds(TypicalBounds),
}

/// A validated experiment, ready to run.
pub struct Experiment(Prepared);

impl Experiment {
    pub fn prepare(kind: Kind, params: &Value) -> Result<Self, CliError> {
        let at = "params";
        Ok(Experiment(match kind {
            Kind::Identify => Prepared::Identify(Identify::prepare(parse_at(params, at)?)?),
            Kind::Scdist => Prepared::Scdist(Scdist::prepare(parse_at(params, at)?)?),
            Kind::Sample => Prepared::Sample(Sample::prepare(parse_at(params, at)?)?),
            Kind::Spread => Prepared::Spread(Spread::prepare(parse_at(params, at)?)?),
            Kind::Bayes => Prepared::Bayes(Bayes::prepare(parse_at(params, at)?)?),
            Kind::Novelty => Prepared::Novelty(Novelty::prepare(parse_at(params, at)?)?),
            Kind::TypicalBounds => {
                Prepared::TypicalBounds(TypicalBounds::prepare(parse_at(params, at)?)?)
            }
        }))
    }

    pub fn run(&self, seed: u64) -> Result<Outcome, CliError> {
        match &self.0 {
            Prepared::Identify(e) => e.run(),
            Prepared::Scdist(e) => e.run(seed),
            Prepared::Sample(e) => e.run(seed),
            Prepared::Spread(e) => e.run(seed),
            Prepared::Bayes(e) => e.run(seed),
            Prepared::Novelty(e) => e.run(seed),
            Prepared::TypicalBounds(e) => e.run(),
        }
    }
}
