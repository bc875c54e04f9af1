use serde::{Deserialize, Serialize};

use super::typical::{typical_membership_from_log2, warm_up, Typicality};
use super::{equivalence_groups, BayesError, HypothesisSet, PosteriorState};
use crate::identify::Resolution;

/// Thresholds of the stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingConfig {
    /// Posterior mass a group needs to be accepted.
    pub p: f64,
    /// Typicality level below which every member is rejected. `0` disables
    /// falsification.
    pub q: f64,
    /// Symmetric divergence rate (bits per symbol) under which members are
    /// grouped.
    pub eps_d: f64,
    /// Observation resolution; `0` means no cap.
    pub r: f64,
}

impl StoppingConfig {
    pub fn new(p: f64, q: f64, eps_d: f64, r: f64) -> Result<Self, BayesError> {
        let cfg = Self { p, q, eps_d, r };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BayesError> {
        let bad = |field, message: String| Err(BayesError::Config { field, message });
        if !(0.0..=1.0).contains(&self.p) {
            return bad("p", format!("{} is outside [0, 1]", self.p));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return bad("q", format!("{} is outside [0, 1]", self.q));
        }
        if self.q > self.p {
            return bad("q", format!("q = {} exceeds p = {}", self.q, self.p));
        }
        if !(self.eps_d >= 0.0) {
            return bad("eps_d", format!("{} must be non-negative", self.eps_d));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return bad("r", format!("{} is outside [0, 1]", self.r));
        }
        Ok(())
    }

    /// Maximum number of observations, if any.
    pub fn cap(&self) -> Option<usize> {
        Resolution::new(self.r).ok().and_then(Resolution::cap)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DecisionKind {
    /// 0-based member index.
    Verified {
        member: usize,
    },
    PartiallyIdentified {
        members: Vec<usize>,
    },
    Falsified,
    Undetermined,
}

impl DecisionKind {
    pub fn is_final(&self) -> bool {
        !matches!(self, DecisionKind::Undetermined)
    }

    pub fn label(&self) -> &'static str {
        match self {
            DecisionKind::Verified { .. } => "verified",
            DecisionKind::PartiallyIdentified { .. } => "partially_identified",
            DecisionKind::Falsified => "falsified",
            DecisionKind::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub kind: DecisionKind,
    pub t: usize,
    /// Empty when every member has been ruled out with certainty.
    pub posterior: Vec<f64>,
    /// The observation cap was reached without a decision.
    pub capped: bool,
}

/// A stopping rule bound to one hypothesis set: groups, entropy rates and
/// warm-up lengths are computed once.
#[derive(Debug, Clone)]
pub struct StoppingRule {
    cfg: StoppingConfig,
    groups: Vec<Vec<usize>>,
    rates: Vec<f64>,
    verify_warm_up: Vec<usize>,
    falsify_warm_up: Vec<usize>,
    cap: Option<usize>,
}

impl StoppingRule {
    pub fn new(set: &HypothesisSet, cfg: StoppingConfig) -> Result<Self, BayesError> {
        cfg.validate()?;
        let groups = equivalence_groups(set, cfg.eps_d)?;
        let rates = set
            .members()
            .iter()
            .map(|m| m.entropy_rate())
            .collect::<Result<Vec<_>, _>>()?;
        let falsify_warm_up = rates
            .iter()
            .map(|&h| {
                if cfg.q > 0.0 {
                    warm_up(h, cfg.q)
                } else {
                    usize::MAX
                }
            })
            .collect();
        let verify_warm_up = rates
            .iter()
            .map(|&h| if cfg.p > 0.0 { warm_up(h, cfg.p) } else { 0 })
            .collect();
        Ok(Self {
            cfg,
            groups,
            rates,
            verify_warm_up,
            falsify_warm_up,
            cap: cfg.cap(),
        })
    }

    pub fn config(&self) -> &StoppingConfig {
        &self.cfg
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    /// Checks, in order: certain exclusion of every member, a group reaching
    /// posterior `p` while typical at level `p` for one of its members,
    /// atypicality of every member at level `q`, the observation cap. Both
    /// typicality tests wait for their warm-up length.
    pub fn check(&self, state: &PosteriorState<'_>) -> Decision {
        let t = state.t();
        let Some(posterior) = state.posterior() else {
            return Decision {
                kind: DecisionKind::Falsified,
                t,
                posterior: Vec::new(),
                capped: false,
            };
        };
        let lik = state.log_likelihoods();
        let typical = |m: usize, level: f64, warm: usize| {
            typical_membership_from_log2(lik[m], t, self.rates[m], level, warm)
        };

        let log_miss = (1.0 - self.cfg.p).log2();
        for group in &self.groups {
            if state.log_complement_mass(group) > log_miss {
                continue;
            }
            let accepted = group
                .iter()
                .any(|&m| typical(m, self.cfg.p, self.verify_warm_up[m]) == Typicality::Typical);
            if !accepted {
                continue;
            }
            let kind = match group.as_slice() {
                [m] => DecisionKind::Verified { member: *m },
                _ => DecisionKind::PartiallyIdentified {
                    members: group.clone(),
                },
            };
            return Decision {
                kind,
                t,
                posterior,
                capped: false,
            };
        }

        if self.cfg.q > 0.0 {
            let all_atypical = (0..lik.len()).all(|m| {
                matches!(
                    typical(m, self.cfg.q, self.falsify_warm_up[m]),
                    Typicality::AtypicalImprobable | Typicality::AtypicalProbable
                )
            });
            if all_atypical {
                return Decision {
                    kind: DecisionKind::Falsified,
                    t,
                    posterior,
                    capped: false,
                };
            }
        }

        let capped = self.cap.is_some_and(|c| t >= c);
        Decision {
            kind: DecisionKind::Undetermined,
            t,
            posterior,
            capped,
        }
    }
}

/// One-off stopping check. Builds the rule each call; use [`StoppingRule`]
/// inside loops.
pub fn check_stop(
    state: &PosteriorState<'_>,
    cfg: &StoppingConfig,
) -> Result<Decision, BayesError> {
    Ok(StoppingRule::new(state.set(), *cfg)?.check(state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::ProcessSpec;

    fn bern(p: f64) -> ProcessSpec {
        ProcessSpec::bernoulli(p).unwrap()
    }

    #[test]
    fn threshold_examples() {
        let set = HypothesisSet::new(vec![bern(0.5), bern(1.0)]).unwrap();
        let s = PosteriorState::new(&set, &set.uniform_prior())
            .unwrap()
            .update(1)
            .unwrap();
        let d = check_stop(&s, &StoppingConfig::new(0.6, 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(d.kind, DecisionKind::Verified { member: 1 });
        assert_eq!(d.t, 1);
        let d = check_stop(&s, &StoppingConfig::new(0.9, 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(d.kind, DecisionKind::Undetermined);
        assert!(!d.capped);
    }

    #[test]
    fn config_validation() {
        assert!(StoppingConfig::new(0.5, 0.6, 0.0, 0.0).is_err());
        assert!(StoppingConfig::new(1.5, 0.0, 0.0, 0.0).is_err());
        assert!(StoppingConfig::new(0.9, 0.5, -1.0, 0.0).is_err());
        assert!(StoppingConfig::new(0.9, 0.5, 0.0, 2.0).is_err());
        assert_eq!(
            StoppingConfig::new(0.9, 0.5, 0.0, 0.25).unwrap().cap(),
            Some(2)
        );
    }

    #[test]
    fn duplicates_are_partially_identified() {
        let set = HypothesisSet::new(vec![bern(0.5), bern(0.5), bern(0.9)]).unwrap();
        let mut s = PosteriorState::new(&set, &set.uniform_prior()).unwrap();
        let rule =
            StoppingRule::new(&set, StoppingConfig::new(0.9, 0.0, 0.0, 0.0).unwrap()).unwrap();
        let mut d = rule.check(&s);
        for _ in 0..10 {
            s = s.update(0).unwrap();
            d = rule.check(&s);
            if d.kind.is_final() {
                break;
            }
        }
        assert_eq!(
            d.kind,
            DecisionKind::PartiallyIdentified {
                members: vec![0, 1]
            }
        );
    }

    #[test]
    fn cap_forces_undetermined() {
        let set = HypothesisSet::new(vec![bern(0.5), bern(0.6)]).unwrap();
        let rule =
            StoppingRule::new(&set, StoppingConfig::new(0.99, 0.0, 0.0, 0.25).unwrap()).unwrap();
        let s = PosteriorState::new(&set, &set.uniform_prior())
            .unwrap()
            .update(0)
            .unwrap()
            .update(1)
            .unwrap();
        let d = rule.check(&s);
        assert_eq!(d.kind, DecisionKind::Undetermined);
        assert!(d.capped);
    }

    #[test]
    fn impossible_data_falsifies_everything() {
        let set = HypothesisSet::new(vec![bern(1.0), bern(1.0)]).unwrap();
        let s = PosteriorState::new(&set, &set.uniform_prior())
            .unwrap()
            .update(0)
            .unwrap();
        let d = check_stop(&s, &StoppingConfig::new(0.9, 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(d.kind, DecisionKind::Falsified);
        assert!(d.posterior.is_empty());
    }

    #[test]
    fn atypical_run_falsifies() {
        // 40 ones is far outside the typical set of both members at level 0.5
        let set = HypothesisSet::new(vec![bern(0.1), bern(0.2)]).unwrap();
        let mut s = PosteriorState::new(&set, &set.uniform_prior()).unwrap();
        for _ in 0..40 {
            s = s.update(1).unwrap();
        }
        let d = check_stop(&s, &StoppingConfig::new(0.99, 0.5, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(d.kind, DecisionKind::Falsified);
    }

    #[test]
    fn decision_json() {
        let d = DecisionKind::Verified { member: 1 };
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"status":"verified","member":1}"#
        );
    }
}
