use idinfo_core::bayes::{
    expected_sc_evaluator, expected_sc_predictive, falsification_bounds, mc_sample_complexity,
    typical_membership, ExpectedSampleComplexity, HypothesisSet, PosteriorState, SearchOptions,
    StoppingConfig, StoppingRule, Typicality,
};
use idinfo_core::process::{BitSource, ProcessSpec};

fn bern(p: f64) -> ProcessSpec {
    ProcessSpec::bernoulli(p).unwrap()
}

#[test]
fn posterior_concentrates_on_the_generating_member() {
    // pairwise divergence rates are all above 0.1 bits
    let set = HypothesisSet::new(vec![bern(0.2), bern(0.5), bern(0.7)]).unwrap();
    let prior = set.uniform_prior();
    let trials = 1_000;
    let mut converged = 0;
    for k in 0..trials {
        let ideal = k % 3;
        let mut src = BitSource::with_stream(41, k as u64);
        let mut state = PosteriorState::new(&set, &prior).unwrap();
        for x in set.members()[ideal].sample(10_000, &mut src) {
            state = state.update(x).unwrap();
        }
        if state.posterior().unwrap()[ideal] >= 0.99 {
            converged += 1;
        }
    }
    assert!(converged as f64 >= 0.99 * trials as f64, "{converged}");
}

#[test]
fn verified_decisions_are_right_often_enough() {
    let set = HypothesisSet::new(vec![bern(0.4), bern(0.6)]).unwrap();
    let prior = set.uniform_prior();
    let cfg = StoppingConfig::new(0.9, 0.0, 0.0, 0.0).unwrap();
    let (mut decided, mut correct) = (0u64, 0u64);
    for (i, member) in set.members().iter().enumerate() {
        let r = mc_sample_complexity(member, &set, &prior, &cfg, 2_000, 100_000, 100 + i as u64)
            .unwrap();
        decided += r.histogram.verified + r.histogram.partially_identified;
        correct += r.histogram.correct;
    }
    let n = decided as f64;
    let sigma = (0.9 * 0.1 / n).sqrt();
    assert!(
        correct as f64 / n >= 0.9 - 3.0 * sigma,
        "{correct}/{decided}"
    );
}

#[test]
fn certainty_is_never_reached_on_noisy_data() {
    let set = HypothesisSet::new(vec![bern(0.5), bern(0.7)]).unwrap();
    let cfg = StoppingConfig::new(1.0, 0.0, 0.0, 0.0).unwrap();
    let r =
        mc_sample_complexity(&bern(0.5), &set, &set.uniform_prior(), &cfg, 4, 100_000, 9).unwrap();
    assert_eq!(r.histogram.censored, 4);
    assert!(r.outcomes.iter().all(|o| o.t == 100_000));
}

#[test]
fn well_specified_runs_all_stop() {
    let set = HypothesisSet::new(vec![bern(0.5), bern(0.9)]).unwrap();
    let cfg = StoppingConfig::new(0.95, 0.0, 0.0, 0.0).unwrap();
    let r = mc_sample_complexity(
        &bern(0.5),
        &set,
        &set.uniform_prior(),
        &cfg,
        10_000,
        1_000_000,
        5,
    )
    .unwrap();
    assert_eq!(r.histogram.censored, 0);
}

#[test]
fn misspecified_runs_falsify_more_with_more_budget() {
    let set = HypothesisSet::new(vec![bern(0.8), bern(0.9)]).unwrap();
    let cfg = StoppingConfig::new(0.95, 0.6, 0.0, 0.0).unwrap();
    let fractions: Vec<f64> = [2, 8, 64]
        .iter()
        .map(|&budget| {
            let r = mc_sample_complexity(
                &bern(0.5),
                &set,
                &set.uniform_prior(),
                &cfg,
                2_000,
                budget,
                13,
            )
            .unwrap();
            r.histogram.falsified as f64 / 2_000.0
        })
        .collect();
    assert!(fractions[0] > 0.0);
    assert!(
        fractions[0] <= fractions[1] && fractions[1] <= fractions[2],
        "{fractions:?}"
    );
}

#[test]
fn near_deterministic_member_is_rejected_on_fair_coin_data() {
    let set = HypothesisSet::new(vec![bern(0.99)]).unwrap();
    let cfg = StoppingConfig::new(0.99, 0.6, 0.0, 0.0).unwrap();
    let r = mc_sample_complexity(
        &bern(0.5),
        &set,
        &set.uniform_prior(),
        &cfg,
        1_000,
        10_000,
        21,
    )
    .unwrap();
    assert!(
        r.histogram.falsified as f64 >= 0.95 * 1_000.0,
        "{:?}",
        r.histogram
    );
}

#[test]
fn long_runs_from_the_source_are_typical() {
    let spec = bern(0.7);
    let mut typical = 0;
    for k in 0..1_000u64 {
        let xs = spec.sample(1_000, &mut BitSource::with_stream(77, k));
        if typical_membership(&spec, &xs, 0.6).unwrap() == Typicality::Typical {
            typical += 1;
        }
    }
    assert!(typical >= 950, "{typical}");
}

#[test]
fn falsification_median_lies_in_bracket() {
    let ideal = bern(0.5);
    let hyp = bern(0.9);
    let bounds = falsification_bounds(&ideal, &hyp, 0.5).unwrap();
    let set = HypothesisSet::new(vec![hyp]).unwrap();
    let cfg = StoppingConfig::new(0.5, 0.5, 0.0, 0.0).unwrap();
    let r =
        mc_sample_complexity(&ideal, &set, &set.uniform_prior(), &cfg, 1_000, 10_000, 8).unwrap();
    let median = r.median.unwrap();
    assert!(median >= bounds.lower, "{median} vs {bounds:?}");
    assert!(bounds.upper.is_none_or(|u| median <= u));
}

#[test]
fn stopping_rule_is_reusable_across_states() {
    let set = HypothesisSet::new(vec![bern(0.5), bern(1.0)]).unwrap();
    let rule = StoppingRule::new(&set, StoppingConfig::new(0.6, 0.0, 0.0, 0.0).unwrap()).unwrap();
    let s0 = PosteriorState::new(&set, &set.uniform_prior()).unwrap();
    assert!(!rule.check(&s0).kind.is_final());
    assert!(rule.check(&s0.update(1).unwrap()).kind.is_final());
}

#[test]
fn predictive_value_matches_sampled_surprisal() {
    // H(Θ | X^t) at the predictive horizon, cross-checked by sampling the
    // member from the prior and the data from the member
    let set = HypothesisSet::new(vec![bern(0.3), bern(0.7)]).unwrap();
    let prior = set.uniform_prior();
    let r = expected_sc_predictive(&set, &prior, 0.95, &SearchOptions::default()).unwrap();
    let ExpectedSampleComplexity::Reached { integer_t, .. } = r else {
        panic!("{r:?}")
    };
    let exact =
        idinfo_core::bayes::predictive_conditional_entropy(&set, &prior, integer_t).unwrap();
    let n = 40_000;
    let mut sum = 0.0;
    for k in 0..n {
        let mut src = BitSource::with_stream(5, k as u64);
        let member = usize::from(src.next_bit());
        let mut state = PosteriorState::new(&set, &prior).unwrap();
        for x in set.members()[member].sample(integer_t, &mut src) {
            state = state.update(x).unwrap();
        }
        sum += -state.log_posterior().unwrap()[member];
    }
    let estimate = sum / n as f64;
    assert!((estimate - exact).abs() < 0.01, "{estimate} vs {exact}");
    let e = expected_sc_evaluator(&set, 0, &prior, 0.95, &SearchOptions::default()).unwrap();
    assert!(matches!(e, ExpectedSampleComplexity::Reached { integer_t: t, .. } if t == integer_t));
}
