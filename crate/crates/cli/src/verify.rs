//! Analytic-versus-oracle checks. Each pair runs both sides and reports one
//! check per compared quantity.

use idinfo_core::bayes::{
    expected_sc_evaluator, mc_sample_complexity, mc_surprisal_moments, surprisal_moments,
    ExpectedSampleComplexity, SearchOptions, StoppingConfig,
};
use idinfo_core::identify::BitString;
use idinfo_core::process::{BitSource, IidSpec, ProcessJson, ProcessSpec};
use idinfo_core::scdist::{
    enumerate_orderings_oracle, geometric_pmf, mc_geometric_oracle, pairwise_cdf_exact,
    pairwise_pmf_exact,
};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{parse_at, Pair};
use crate::error::CliError;
use crate::experiments::{build_set, draw_counts, total_variation, Outcome};
use crate::table::Table;

/// One compared quantity. `pass` is decided by the pair's own rule, stated in
/// `rule`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub rule: &'static str,
    pub pass: bool,
}

impl Check {
    /// `observed < upper`.
    fn below(name: String, observed: f64, upper: f64) -> Self {
        Self {
            name,
            observed,
            lower: None,
            upper: Some(upper),
            rule: "observed < upper",
            pass: observed < upper,
        }
    }

    /// `lower <= observed < upper`.
    fn half_open(name: String, observed: f64, lower: f64, upper: f64) -> Self {
        Self {
            name,
            observed,
            lower: Some(lower),
            upper: Some(upper),
            rule: "lower <= observed < upper",
            pass: lower <= observed && observed < upper,
        }
    }

    /// `lower <= observed <= upper`.
    fn closed(name: String, observed: f64, lower: f64, upper: f64) -> Self {
        Self {
            name,
            observed,
            lower: Some(lower),
            upper: Some(upper),
            rule: "lower <= observed <= upper",
            pass: lower <= observed && observed <= upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub pass: bool,
    pub checks: Vec<Check>,
    /// Pair-specific detail behind the checks.
    pub detail: Value,
}

impl Report {
    fn new(checks: Vec<Check>, detail: Value) -> Self {
        Self {
            pass: checks.iter().all(|c| c.pass),
            checks,
            detail,
        }
    }

    pub fn outcome(&self) -> Outcome {
        let mut table = Table::new(["check", "observed", "lower", "upper", "pass"]);
        for c in &self.checks {
            let bound = |b: Option<f64>| b.map_or_else(|| "".into(), Into::into);
            table.push(vec![
                c.name.clone().into(),
                c.observed.into(),
                bound(c.lower),
                bound(c.upper),
                c.pass.into(),
            ]);
        }
        Outcome {
            result: serde_json::to_value(self).expect("report serializes"),
            table,
        }
    }
}

// stopping-law-enumeration

fn default_max_length() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoppingLawParams {
    #[serde(default = "default_max_length")]
    pub max_length: usize,
}

/// Closed-form stopping law against all `L!` comparison orders, as exact
/// rationals, for every `1 <= L <= max_length` and `0 <= K <= L`.
pub fn stopping_law_enumeration(p: &StoppingLawParams) -> Result<Report, CliError> {
    if p.max_length == 0 || p.max_length > 8 {
        return Err(CliError::invalid("params.max_length", "must lie in 1..=8"));
    }
    let mut checks = Vec::new();
    for length in 1..=p.max_length {
        for differing in 0..=length {
            let a = BitString::new(vec![false; length]);
            let b = BitString::new((0..length).map(|j| j < differing).collect());
            let oracle = enumerate_orderings_oracle(&a, &b)?;
            let mut mismatches = 0usize;
            let mut oracle_cdf = BigRational::zero();
            for i in 1..=length + 1 {
                oracle_cdf += oracle.pmf_exact(i);
                let (pmf, cdf) = if differing == 0 {
                    // identical strings: every order runs to the end
                    let at_end = |x: bool| {
                        if x {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    };
                    (at_end(i == length), at_end(i >= length))
                } else {
                    (
                        pairwise_pmf_exact(length, differing, i)?,
                        pairwise_cdf_exact(length, differing, i)?,
                    )
                };
                mismatches +=
                    usize::from(pmf != oracle.pmf_exact(i)) + usize::from(cdf != oracle_cdf);
            }
            checks.push(Check::closed(
                format!("L={length},K={differing}"),
                mismatches as f64,
                0.0,
                0.0,
            ));
        }
    }
    Ok(Report::new(checks, json!({ "max_length": p.max_length })))
}

// geometric-mc

fn default_geometric_p() -> Vec<f64> {
    vec![0.1, 0.5, 0.9]
}

fn default_trials() -> usize {
    100_000
}

fn default_tolerance() -> f64 {
    0.01
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricParams {
    #[serde(default = "default_geometric_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

/// Simulated unbounded comparisons against `(1-p)^(i-1) p`, one seed stream
/// per `p`.
pub fn geometric_mc(p: &GeometricParams, seed: u64) -> Result<Report, CliError> {
    let mut checks = Vec::new();
    let mut means = Vec::new();
    for (k, &prob) in p.p.iter().enumerate() {
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(CliError::invalid(
                format!("params.p.{k}"),
                "must lie in (0, 1]",
            ));
        }
        let emp = mc_geometric_oracle(prob, p.trials as u64, seed.wrapping_add(k as u64))?;
        let tv = emp.total_variation(|i| geometric_pmf(prob, i).unwrap_or(0.0));
        means.push(
            emp.counts()
                .iter()
                .map(|(&i, &c)| i as f64 * c as f64)
                .sum::<f64>()
                / p.trials as f64,
        );
        checks.push(Check::below(
            format!("p={prob}: total variation"),
            tv,
            p.tolerance,
        ));
    }
    Ok(Report::new(
        checks,
        json!({ "trials": p.trials, "empirical_means": means }),
    ))
}

// coin-bits

fn default_coin_specs() -> Vec<Vec<f64>> {
    vec![
        vec![0.5, 0.5],
        vec![0.25, 0.75],
        vec![0.7, 0.3],
        vec![0.25; 4],
    ]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinBitsParams {
    #[serde(default = "default_coin_specs")]
    pub specs: Vec<Vec<f64>>,
    #[serde(default = "default_trials")]
    pub samples: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

/// Fair-bit cost of inverse-CDF sampling against `[H, H + 2)` and symbol
/// frequencies against the law.
pub fn coin_bits(p: &CoinBitsParams, seed: u64) -> Result<Report, CliError> {
    let mut checks = Vec::new();
    let mut detail = Vec::new();
    for (k, probs) in p.specs.iter().enumerate() {
        let law =
            IidSpec::new(probs).map_err(|e| CliError::invalid(format!("params.specs.{k}"), e))?;
        let h = law.entropy();
        let spec = ProcessSpec::Iid(law);
        let (counts, bits) = draw_counts(
            &spec,
            p.samples,
            &mut BitSource::new(seed.wrapping_add(k as u64)),
        );
        let mean = bits as f64 / p.samples as f64;
        let ProcessSpec::Iid(law) = &spec else {
            unreachable!()
        };
        let tv = total_variation(&counts, law.probs());
        checks.push(Check::half_open(
            format!("{probs:?}: mean bits"),
            mean,
            h,
            h + 2.0,
        ));
        checks.push(Check::below(
            format!("{probs:?}: total variation"),
            tv,
            p.tolerance,
        ));
        detail.push(json!({
            "probs": probs,
            "dyadic_precision": law.precision(),
            "rounding_error": law.rounding_error(),
            "entropy": h,
            "counts": counts,
        }));
    }
    Ok(Report::new(
        checks,
        json!({ "samples": p.samples, "specs": detail }),
    ))
}

// expected-sc-mc

fn default_sc_trials() -> usize {
    10_000
}

fn default_budget() -> usize {
    1_000_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedScParams {
    pub hypotheses: Vec<ProcessJson>,
    pub ideal: usize,
    #[serde(default)]
    pub prior: Option<Vec<f64>>,
    pub p: f64,
    #[serde(default = "default_sc_trials")]
    pub trials: usize,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

/// The smallest horizon at which the expected posterior surprisal of the
/// ideal member reaches `-log2 p`, against the 95% interval of the mean
/// stopping time of the stopping rule run on data from that member.
pub fn expected_sc_mc(p: &ExpectedScParams, seed: u64) -> Result<Report, CliError> {
    let (set, prior) = build_set(&p.hypotheses, None, p.prior.as_deref())?;
    if p.ideal >= set.len() {
        return Err(CliError::invalid(
            "params.ideal",
            format!("no hypothesis {}", p.ideal),
        ));
    }
    let cfg = StoppingConfig::new(p.p, 0.0, 0.0, 0.0)?;
    let opts = SearchOptions {
        seed,
        ..SearchOptions::default()
    };
    let analytic = expected_sc_evaluator(&set, p.ideal, &prior, p.p, &opts)?;
    let ideal = &set.members()[p.ideal];
    let mc = mc_sample_complexity(ideal, &set, &prior, &cfg, p.trials, p.budget, seed)?;
    let observed = match analytic {
        ExpectedSampleComplexity::Reached { integer_t, .. } => integer_t as f64,
        ExpectedSampleComplexity::Unreachable { .. } => f64::INFINITY,
    };
    let check = match (mc.mean, mc.ci95_half_width) {
        (Some(m), Some(h)) => {
            Check::closed("analytic t within MC 95% CI".into(), observed, m - h, m + h)
        }
        _ => Check {
            name: "analytic t within MC 95% CI".into(),
            observed,
            lower: None,
            upper: None,
            rule: "no uncensored trials",
            pass: false,
        },
    };
    let detail = json!({
        "analytic": analytic,
        "mc_mean": mc.mean,
        "mc_median": mc.median,
        "mc_ci95_half_width": mc.ci95_half_width,
        "histogram": mc.histogram,
    });
    Ok(Report::new(vec![check], detail))
}

// moments-mc

fn default_t_max() -> usize {
    12
}

fn default_max_m() -> u32 {
    3
}

fn default_moment_tolerance() -> f64 {
    0.02
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsParams {
    pub hypotheses: Vec<ProcessJson>,
    pub ideal: usize,
    #[serde(default)]
    pub prior: Option<Vec<f64>>,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_max_m")]
    pub max_m: u32,
    #[serde(default = "default_trials")]
    pub samples: usize,
    #[serde(default = "default_moment_tolerance")]
    pub tolerance: f64,
}

/// Exact raw moments of the ideal member's posterior surprisal against
/// sampled moments, by relative error.
pub fn moments_mc(p: &MomentsParams, seed: u64) -> Result<Report, CliError> {
    let (set, prior) = build_set(&p.hypotheses, None, p.prior.as_deref())?;
    if p.ideal >= set.len() {
        return Err(CliError::invalid(
            "params.ideal",
            format!("no hypothesis {}", p.ideal),
        ));
    }
    if p.max_m == 0 {
        return Err(CliError::invalid("params.max_m", "must be at least 1"));
    }
    let sampled = mc_surprisal_moments(&set, p.ideal, &prior, p.t_max, p.max_m, p.samples, seed)?;
    let mut checks = Vec::new();
    let mut exact_rows = Vec::new();
    for t in 1..=p.t_max {
        let exact = surprisal_moments(&set, p.ideal, &prior, t, p.max_m)?;
        for (m, (&e, s)) in exact.iter().zip(&sampled[t - 1]).enumerate() {
            let rel = if e.is_finite() && s.mean.is_finite() {
                (s.mean - e).abs() / e.abs()
            } else {
                f64::INFINITY
            };
            checks.push(Check::below(
                format!("t={t},m={}: relative error", m + 1),
                rel,
                p.tolerance,
            ));
        }
        exact_rows.push(exact);
    }
    Ok(Report::new(
        checks,
        json!({ "exact": exact_rows, "sampled": sampled }),
    ))
}

/// Runs `pair` with `params`.
pub fn run_pair(pair: Pair, params: &Value, seed: u64) -> Result<Report, CliError> {
    let at = "params";
    match pair {
        Pair::StoppingLawEnumeration => stopping_law_enumeration(&parse_at(params, at)?),
        Pair::GeometricMc => geometric_mc(&parse_at(params, at)?, seed),
        Pair::CoinBits => coin_bits(&parse_at(params, at)?, seed),
        Pair::ExpectedScMc => expected_sc_mc(&parse_at(params, at)?, seed),
        Pair::MomentsMc => moments_mc(&parse_at(params, at)?, seed),
    }
}
