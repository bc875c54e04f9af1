use std::collections::HashSet;

use super::{BitString, IdError, IdOutcome, IdStatus, Query, Resolution};

/// Depth-first scan of an unordered, duplicate-free list.
///
/// Each member is compared symbol by symbol until it differs from the query.
/// `i` tracks the furthest symbol position compared across the scan and `h`
/// the first member that pushed it beyond the first symbol (0 if none did).
/// A member equal to the query returns immediately as verified. When the
/// query is truncated by the resolution, or is a proper prefix of members,
/// the scan continues to collect every member consistent with the observed
/// symbols.
pub fn identify_depth_first(
    list: &[BitString],
    query: &Query,
    r: Resolution,
) -> Result<IdOutcome, IdError> {
    let mut seen = HashSet::with_capacity(list.len());
    for (idx, m) in list.iter().enumerate() {
        if m.is_empty() {
            return Err(IdError::EmptyString);
        }
        if !seen.insert(m) {
            return Err(IdError::Duplicate(idx + 1));
        }
    }
    let view = query.view(r)?;
    if list.is_empty() {
        return Ok(IdOutcome::empty_set());
    }
    let theta = view.bits;
    let n = theta.len();
    let mut i = n.min(1);
    let mut h = 0;
    let mut partial_subset = Vec::new();
    'members: for (idx, psi) in list.iter().enumerate() {
        let j = idx + 1;
        for k in 1..=n {
            if k > i {
                i = k;
                h = j;
            }
            if psi.bits().get(k - 1) != Some(&theta[k - 1]) {
                continue 'members;
            }
        }
        if !view.truncated && psi.len() == n {
            return Ok(IdOutcome {
                status: IdStatus::Verified,
                h: j,
                i,
                partial_subset: vec![j],
            });
        }
        partial_subset.push(j);
    }
    let status = if view.truncated && !partial_subset.is_empty() {
        IdStatus::Undetermined
    } else {
        IdStatus::Falsified
    };
    Ok(IdOutcome {
        status,
        h,
        i,
        partial_subset,
    })
}
