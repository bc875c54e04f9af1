//! Exact expectations over all length-`t` sequences. IID families collapse
//! sequences into type classes (symbol counts), everything else is walked
//! sequence by sequence.

use crate::info::MAX_ENUMERATION;
use crate::process::ProcessSpec;

use super::BayesError;

/// Upper bound on type classes visited for IID families.
pub(crate) const MAX_CLASSES: usize = 1 << 22;

/// Calls `visit(log2_multiplicity, log2_probs)` once per class of sequences
/// sharing the same probability under every spec. `log2_probs[j]` is the
/// log2 probability of one sequence in the class under `specs[j]`.
pub(crate) fn for_each_class(
    specs: &[&ProcessSpec],
    t: usize,
    mut visit: impl FnMut(f64, &[f64]),
) -> Result<(), BayesError> {
    let k = specs[0].alphabet_size();
    if let Some(laws) = iid_laws(specs) {
        let classes = class_count(k, t);
        if classes > MAX_CLASSES as f64 {
            return Err(BayesError::HorizonTooLarge {
                sequences: classes,
                limit: MAX_CLASSES,
            });
        }
        let logs: Vec<Vec<f64>> = laws
            .iter()
            .map(|l| l.iter().map(|p| p.log2()).collect())
            .collect();
        let ln_fact = ln_factorials(t);
        let mut counts = vec![0usize; k];
        let mut out = vec![0.0; specs.len()];
        compositions(&mut counts, 0, t, &mut |counts| {
            let mut ln_mult = ln_fact[t];
            for &c in counts.iter() {
                ln_mult -= ln_fact[c];
            }
            for (slot, lg) in out.iter_mut().zip(&logs) {
                *slot = counts
                    .iter()
                    .zip(lg)
                    .map(|(&c, &l)| if c == 0 { 0.0 } else { c as f64 * l })
                    .sum();
            }
            visit(ln_mult / std::f64::consts::LN_2, &out);
        });
        return Ok(());
    }
    let sequences = (k as f64).powi(t as i32);
    if sequences > MAX_ENUMERATION as f64 {
        return Err(BayesError::HorizonTooLarge {
            sequences,
            limit: MAX_ENUMERATION,
        });
    }
    let mut prefix = Vec::with_capacity(t);
    let mut acc = vec![0.0; specs.len()];
    walk(specs, k, t, &mut prefix, &mut acc, &mut visit);
    Ok(())
}

fn iid_laws<'a>(specs: &[&'a ProcessSpec]) -> Option<Vec<&'a [f64]>> {
    specs
        .iter()
        .map(|s| match s {
            ProcessSpec::Iid(law) => Some(law.probs()),
            ProcessSpec::Markov(m) if m.memory() == 0 => Some(m.delta()[0].probs()),
            ProcessSpec::Markov(_) => None,
        })
        .collect()
}

/// `C(t + k - 1, k - 1)`.
fn class_count(k: usize, t: usize) -> f64 {
    let mut c = 1.0f64;
    for j in 1..k {
        c = c * (t + j) as f64 / j as f64;
    }
    c
}

fn ln_factorials(t: usize) -> Vec<f64> {
    let mut out = vec![0.0; t + 1];
    for n in 1..=t {
        out[n] = out[n - 1] + (n as f64).ln();
    }
    out
}

fn compositions(counts: &mut [usize], pos: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        f(counts);
        return;
    }
    for c in 0..=left {
        counts[pos] = c;
        compositions(counts, pos + 1, left - c, f);
    }
}

fn walk(
    specs: &[&ProcessSpec],
    k: usize,
    t: usize,
    prefix: &mut Vec<usize>,
    acc: &mut Vec<f64>,
    visit: &mut impl FnMut(f64, &[f64]),
) {
    if prefix.len() == t {
        visit(0.0, acc);
        return;
    }
    let saved = acc.clone();
    let conds: Vec<_> = specs
        .iter()
        .map(|s| s.conditional(prefix).into_owned())
        .collect();
    for x in 0..k {
        for (j, c) in conds.iter().enumerate() {
            acc[j] = if c[x] == 0.0 {
                f64::NEG_INFINITY
            } else {
                saved[j] + c[x].log2()
            };
        }
        prefix.push(x);
        walk(specs, k, t, prefix, acc, visit);
        prefix.pop();
    }
    acc.copy_from_slice(&saved);
}
