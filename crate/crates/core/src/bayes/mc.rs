//! Monte Carlo runs of the stopping rule and of the posterior surprisal.
//! Trial `k` draws from its own stream of the seed, so results do not depend
//! on thread count or scheduling.

use rayon::prelude::*;
use serde::Serialize;

use super::stop::{Decision, DecisionKind, StoppingConfig, StoppingRule};
use super::{BayesError, HypothesisSet, PosteriorState};
use crate::info::ProbVector;
use crate::process::{BitSource, ProcessSpec};
use crate::scdist::EmpiricalScDist;

/// `-log2 P(Θ_t = φ)` for each horizon in `horizons` (ascending) and each of
/// `samples` sequences drawn from member `ideal`. Indexed `[horizon][sample]`.
pub(crate) fn mc_surprisal_samples(
    set: &HypothesisSet,
    ideal: usize,
    prior: &ProbVector,
    horizons: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, BayesError> {
    if samples == 0 {
        return Err(BayesError::NoTrials);
    }
    if ideal >= set.len() {
        return Err(BayesError::NotMember(ideal));
    }
    let initial = PosteriorState::new(set, prior)?;
    let spec = &set.members()[ideal];
    let rows: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut src = BitSource::with_stream(seed, s as u64);
            let mut sampler = spec.sampler();
            let mut state = initial.clone();
            let mut out = Vec::with_capacity(horizons.len());
            for &h in horizons {
                while state.t() < h {
                    let x = sampler.next_symbol(&mut src);
                    state
                        .advance(x)
                        .expect("sampled symbols are in the alphabet");
                }
                let lp = state
                    .log_posterior()
                    .expect("the generating member keeps positive likelihood");
                out.push((-lp[ideal]).max(0.0));
            }
            out
        })
        .collect();
    Ok((0..horizons.len())
        .map(|h| rows.iter().map(|r| r[h]).collect())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_error: f64,
}

fn estimate(values: impl Iterator<Item = f64> + Clone) -> MomentEstimate {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    MomentEstimate {
        mean,
        std_error: (var / n).sqrt(),
    }
}

/// Sample raw moments of `-log2 P(Θ_t = φ)` for `t = 1..=t_max` and
/// `m = 1..=max_m`, all horizons sharing the same sequences. Indexed
/// `[t - 1][m - 1]`.
pub fn mc_surprisal_moments(
    set: &HypothesisSet,
    ideal: usize,
    prior: &ProbVector,
    t_max: usize,
    max_m: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<MomentEstimate>>, BayesError> {
    set.check_prior(prior)?;
    let horizons: Vec<usize> = (1..=t_max).collect();
    let draws = mc_surprisal_samples(set, ideal, prior, &horizons, samples, seed)?;
    Ok(draws
        .iter()
        .map(|row| {
            (1..=max_m as i32)
                .map(|m| estimate(row.iter().map(|s| s.powi(m))))
                .collect()
        })
        .collect())
}

/// One trial's end state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub t: usize,
    pub kind: DecisionKind,
    /// Ended by the observation cap or the step budget.
    pub censored: bool,
    /// Whether the decision names the generating process correctly; `None`
    /// for censored trials.
    pub correct: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DecisionHistogram {
    pub verified: u64,
    pub partially_identified: u64,
    pub falsified: u64,
    pub censored: u64,
    pub correct: u64,
    pub incorrect: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSampleComplexity {
    pub trials: usize,
    pub histogram: DecisionHistogram,
    /// Decision times of uncensored trials.
    pub stopping: EmpiricalScDist,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    /// 95% normal-approximation half-width of the mean.
    pub ci95_half_width: Option<f64>,
    pub median: Option<f64>,
    /// `E[T^m]` for `m = 1..=4` over uncensored trials.
    pub raw_moments: Vec<f64>,
    pub outcomes: Vec<TrialOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: usize,
    pub posterior: Vec<f64>,
    pub status: &'static str,
}

struct Trial<'a> {
    ideal: &'a ProcessSpec,
    truth: Vec<usize>,
    initial: PosteriorState<'a>,
    rule: StoppingRule,
    budget: usize,
}

impl<'a> Trial<'a> {
    fn new(
        ideal: &'a ProcessSpec,
        set: &'a HypothesisSet,
        prior: &ProbVector,
        cfg: StoppingConfig,
        budget: usize,
    ) -> Result<Self, BayesError> {
        if ideal.alphabet_size() != set.alphabet_size() {
            return Err(BayesError::AlphabetMismatch {
                index: 0,
                expected: set.alphabet_size(),
                found: ideal.alphabet_size(),
            });
        }
        Ok(Self {
            ideal,
            truth: set.matching(ideal),
            initial: PosteriorState::new(set, prior)?,
            rule: StoppingRule::new(set, cfg)?,
            budget,
        })
    }

    fn run(&self, src: &mut BitSource, mut trace: Option<&mut Vec<TraceRow>>) -> TrialOutcome {
        let mut sampler = self.ideal.sampler();
        let mut state = self.initial.clone();
        loop {
            let d: Decision = self.rule.check(&state);
            if let Some(rows) = trace.as_deref_mut() {
                rows.push(TraceRow {
                    t: d.t,
                    posterior: d.posterior.clone(),
                    status: d.kind.label(),
                });
            }
            let out_of_budget = state.t() >= self.budget;
            if d.kind.is_final() || d.capped || out_of_budget {
                let censored = !d.kind.is_final();
                let correct = match &d.kind {
                    DecisionKind::Verified { member } => Some(self.truth.contains(member)),
                    DecisionKind::PartiallyIdentified { members } => {
                        Some(members.iter().any(|m| self.truth.contains(m)))
                    }
                    DecisionKind::Falsified => Some(self.truth.is_empty()),
                    DecisionKind::Undetermined => None,
                };
                return TrialOutcome {
                    t: d.t,
                    kind: d.kind,
                    censored,
                    correct,
                };
            }
            let x = sampler.next_symbol(src);
            state
                .advance(x)
                .expect("sampled symbols are in the alphabet");
        }
    }
}

/// Streams symbols from `ideal` through the posterior and the stopping rule
/// for `trials` independent trials of at most `budget` observations each.
pub fn mc_sample_complexity(
    ideal: &ProcessSpec,
    set: &HypothesisSet,
    prior: &ProbVector,
    cfg: &StoppingConfig,
    trials: usize,
    budget: usize,
    seed: u64,
) -> Result<McSampleComplexity, BayesError> {
    if trials == 0 {
        return Err(BayesError::NoTrials);
    }
    let runner = Trial::new(ideal, set, prior, *cfg, budget)?;
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|k| runner.run(&mut BitSource::with_stream(seed, k as u64), None))
        .collect();

    let mut histogram = DecisionHistogram::default();
    let mut stopping = EmpiricalScDist::new();
    let mut times = Vec::new();
    for o in &outcomes {
        if o.censored {
            histogram.censored += 1;
            continue;
        }
        match o.kind {
            DecisionKind::Verified { .. } => histogram.verified += 1,
            DecisionKind::PartiallyIdentified { .. } => histogram.partially_identified += 1,
            DecisionKind::Falsified => histogram.falsified += 1,
            DecisionKind::Undetermined => unreachable!("undetermined trials are censored"),
        }
        match o.correct {
            Some(true) => histogram.correct += 1,
            Some(false) => histogram.incorrect += 1,
            None => {}
        }
        stopping.record(o.t);
        times.push(o.t as f64);
    }

    let n = times.len() as f64;
    let (mean, variance, ci95_half_width, median, raw_moments) = if times.is_empty() {
        (None, None, None, None, Vec::new())
    } else {
        let mean = times.iter().sum::<f64>() / n;
        let variance = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let raw: Vec<f64> = (1..=4)
            .map(|m| times.iter().map(|t| t.powi(m)).sum::<f64>() / n)
            .collect();
        times.sort_by(f64::total_cmp);
        let mid = times.len() / 2;
        let median = if times.len() % 2 == 1 {
            times[mid]
        } else {
            0.5 * (times[mid - 1] + times[mid])
        };
        (
            Some(mean),
            Some(variance),
            Some(1.96 * (variance / n).sqrt()),
            Some(median),
            raw,
        )
    };

    Ok(McSampleComplexity {
        trials,
        histogram,
        stopping,
        mean,
        variance,
        ci95_half_width,
        median,
        raw_moments,
        outcomes,
    })
}

/// The posterior after every observation of trial `trial`, reproducing the
/// corresponding run of [`mc_sample_complexity`].
#[allow(clippy::too_many_arguments)]
pub fn trace_trial(
    ideal: &ProcessSpec,
    set: &HypothesisSet,
    prior: &ProbVector,
    cfg: &StoppingConfig,
    budget: usize,
    seed: u64,
    trial: usize,
) -> Result<(TrialOutcome, Vec<TraceRow>), BayesError> {
    let runner = Trial::new(ideal, set, prior, *cfg, budget)?;
    let mut rows = Vec::new();
    let outcome = runner.run(
        &mut BitSource::with_stream(seed, trial as u64),
        Some(&mut rows),
    );
    Ok((outcome, rows))
}
