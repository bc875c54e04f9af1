use std::collections::BTreeSet;

use idinfo_core::identify::{
    build_context_tree, identify_depth_first, identify_sorted, identify_tree, BitString, IdOutcome,
    IdStatus, Query, Resolution, SortedHypothesisSet,
};
use proptest::prelude::*;

fn bits(max_len: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 1..=max_len).prop_map(BitString::new)
}

/// A set plus a query that is often related to a member.
fn instance() -> impl Strategy<Value = (SortedHypothesisSet, BitString, f64)> {
    (
        prop::collection::vec(bits(32), 0..=64),
        bits(32),
        0usize..5,
        any::<prop::sample::Index>(),
        0usize..40,
    )
        .prop_map(|(members, fresh, mode, pick, cap)| {
            let set = SortedHypothesisSet::from_unsorted(members).unwrap();
            let query = if set.is_empty() || mode == 0 {
                fresh
            } else {
                let m = pick.get(set.members()).bits().to_vec();
                match mode {
                    1 => BitString::new(m),
                    // proper prefix
                    2 if m.len() > 1 => BitString::new(m[..m.len() / 2].to_vec()),
                    // extension
                    3 => BitString::new(
                        m.iter()
                            .copied()
                            .chain(fresh.bits().iter().copied())
                            .collect(),
                    ),
                    // flip the last symbol
                    _ => {
                        let mut m = m;
                        let last = m.len() - 1;
                        m[last] = !m[last];
                        BitString::new(m)
                    }
                }
            };
            let r = if cap >= 36 {
                0.0
            } else {
                (-(cap as f64)).exp2()
            };
            (set, query, r)
        })
}

fn strings(set: &[BitString], idx: &[usize]) -> BTreeSet<String> {
    idx.iter().map(|&j| set[j - 1].to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn three_procedures_agree((set, query, r) in instance(), shuffle_seed in any::<u64>()) {
        let r = Resolution::new(r).unwrap();
        let q = Query::Finite(query.clone());
        let sorted = identify_sorted(&set, &q, r).unwrap();
        let tree = identify_tree(&build_context_tree(&set), &q, r).unwrap();
        prop_assert_eq!(&sorted, &tree);

        let dfs = identify_depth_first(set.members(), &q, r).unwrap();
        prop_assert_eq!(sorted.status, dfs.status);
        prop_assert_eq!(&sorted.partial_subset, &dfs.partial_subset);
        prop_assert_eq!(sorted.i, dfs.i);

        let mut shuffled = set.members().to_vec();
        let mut s = shuffle_seed;
        for k in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(k, (s >> 33) as usize % (k + 1));
        }
        let dfs = identify_depth_first(&shuffled, &q, r).unwrap();
        prop_assert_eq!(sorted.status, dfs.status);
        prop_assert_eq!(
            strings(set.members(), &sorted.partial_subset),
            strings(&shuffled, &dfs.partial_subset)
        );
    }

    #[test]
    fn verified_consumes_whole_member((set, query, _) in instance()) {
        let o = identify_sorted(&set, &Query::Finite(query.clone()), Resolution::UNCAPPED).unwrap();
        let member = set.members().binary_search(&query).ok();
        match o.status {
            IdStatus::Verified => {
                let j = member.expect("verified implies membership");
                prop_assert_eq!(o.i, set.members()[j].len());
                prop_assert_eq!(o.partial_subset, vec![j + 1]);
                prop_assert_eq!(o.h, j + 1);
            }
            IdStatus::Falsified => prop_assert!(member.is_none()),
            IdStatus::Undetermined => prop_assert!(false, "uncapped runs decide"),
        }
    }

    #[test]
    fn raising_the_cap_only_resolves((set, query, _) in instance(), a in 0usize..34, b in 0usize..34) {
        let (lo, hi) = (a.min(b), a.max(b));
        let q = Query::Finite(query);
        let coarse = identify_sorted(&set, &q, Resolution::new((-(lo as f64)).exp2()).unwrap()).unwrap();
        let fine = identify_sorted(&set, &q, Resolution::new((-(hi as f64)).exp2()).unwrap()).unwrap();
        if coarse.status != IdStatus::Undetermined {
            prop_assert_eq!(coarse.status, fine.status);
        }
    }

    #[test]
    fn repeated_runs_are_identical((set, query, r) in instance()) {
        let r = Resolution::new(r).unwrap();
        let q = Query::Finite(query);
        let a: IdOutcome = identify_sorted(&set, &q, r).unwrap();
        prop_assert_eq!(a, identify_sorted(&set, &q, r).unwrap());
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn every_member_order_halts_with_the_same_answer() {
    let members: Vec<BitString> = ["0", "01", "011", "10", "1101", "111"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let set = SortedHypothesisSet::from_unsorted(members.clone()).unwrap();
    let queries = ["0", "01", "010", "0111", "1", "11", "1101", "000000"];
    for size in 0..=members.len() {
        let subset = SortedHypothesisSet::from_unsorted(members[..size].to_vec()).unwrap();
        for q in queries {
            let q = Query::Finite(q.parse().unwrap());
            for r in [0.0, 0.5, 0.125, 1.0] {
                let r = Resolution::new(r).unwrap();
                let reference = identify_sorted(&subset, &q, r).unwrap();
                for perm in permutations(size) {
                    let list: Vec<BitString> =
                        perm.iter().map(|&k| subset.members()[k].clone()).collect();
                    let o = identify_depth_first(&list, &q, r).unwrap();
                    assert_eq!(o.status, reference.status);
                    assert_eq!(
                        strings(&list, &o.partial_subset),
                        strings(subset.members(), &reference.partial_subset)
                    );
                }
            }
        }
    }
    assert_eq!(set.len(), 6);
}
