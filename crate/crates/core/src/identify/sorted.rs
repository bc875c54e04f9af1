use std::cmp::Ordering;

use super::{IdError, IdOutcome, IdStatus, Query, Resolution, SortedHypothesisSet};

/// Orders the first `i` symbols of `psi` (all of it when shorter) against
/// `theta[..i]`.
fn prefix_cmp(psi: &[bool], theta: &[bool], i: usize) -> Ordering {
    psi[..i.min(psi.len())].cmp(&theta[..i])
}

/// Ordered scan of a sorted set.
///
/// At symbol `i` the scan skips members whose `i`-prefix sorts below the
/// query's; it falsifies the query once it runs past the end of the set or
/// lands on a member that sorts above. Members passed over never need to be
/// revisited because the set is sorted.
///
/// A verified outcome reports the matched member as `h`; otherwise `h` is
/// the scan position at the start of the last symbol examined.
pub fn identify_sorted(
    set: &SortedHypothesisSet,
    query: &Query,
    r: Resolution,
) -> Result<IdOutcome, IdError> {
    let view = query.view(r)?;
    let members = set.members();
    if members.is_empty() {
        return Ok(IdOutcome::empty_set());
    }
    let theta = view.bits;
    let n = theta.len();
    let mut j = 0;
    let mut h = 0;
    for i in 1..=n {
        h = j + 1;
        let mut order = prefix_cmp(members[j].bits(), theta, i);
        while order == Ordering::Less {
            j += 1;
            if j >= members.len() {
                break;
            }
            order = prefix_cmp(members[j].bits(), theta, i);
        }
        // also catches a scan position that already sorts above the query
        if order != Ordering::Equal {
            return Ok(IdOutcome {
                status: IdStatus::Falsified,
                h,
                i,
                partial_subset: Vec::new(),
            });
        }
    }
    if !view.truncated && members[j].bits() == theta {
        return Ok(IdOutcome {
            status: IdStatus::Verified,
            h: j + 1,
            i: n,
            partial_subset: vec![j + 1],
        });
    }
    // members sharing every observed symbol are contiguous from j
    let partial_subset: Vec<usize> = (j..members.len())
        .take_while(|&m| members[m].len() >= n && members[m].bits()[..n] == *theta)
        .filter(|&m| view.truncated || members[m].len() > n)
        .map(|m| m + 1)
        .collect();
    let status = if view.truncated && !partial_subset.is_empty() {
        IdStatus::Undetermined
    } else {
        IdStatus::Falsified
    };
    Ok(IdOutcome {
        status,
        h,
        i: n,
        partial_subset,
    })
}
