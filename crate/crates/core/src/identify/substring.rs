use super::{
    identify_sorted, BitString, IdError, IdOutcome, Query, Resolution, SortedHypothesisSet,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstringOutcome {
    pub outcome: IdOutcome,
    /// The sliced set the query slice was identified against.
    pub slices: SortedHypothesisSet,
    /// For each slice, the 1-based indices of the members it came from.
    pub sources: Vec<Vec<usize>>,
}

/// Slices `[start, start + len)` (1-based start) out of every member long
/// enough to contain it and out of the query, then identifies the query's
/// slice against the sliced set. A falsified slice is novel relative to the
/// set.
pub fn substring_identify(
    set: &SortedHypothesisSet,
    query: &BitString,
    start: usize,
    len: usize,
    r: Resolution,
) -> Result<SubstringOutcome, IdError> {
    if start == 0 || len == 0 || start - 1 + len > query.len() {
        return Err(IdError::Window {
            start,
            len,
            query_len: query.len(),
        });
    }
    let offset = start - 1;
    let mut pairs: Vec<(BitString, usize)> = set
        .members()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.len() >= offset + len)
        .map(|(idx, m)| (m.slice(offset, len), idx + 1))
        .collect();
    pairs.sort();
    let mut members: Vec<BitString> = Vec::new();
    let mut sources: Vec<Vec<usize>> = Vec::new();
    for (slice, src) in pairs {
        if members.last() == Some(&slice) {
            sources.last_mut().expect("paired").push(src);
        } else {
            members.push(slice);
            sources.push(vec![src]);
        }
    }
    let slices = SortedHypothesisSet::from_sorted(members)?;
    let outcome = identify_sorted(&slices, &Query::Finite(query.slice(offset, len)), r)?;
    Ok(SubstringOutcome {
        outcome,
        slices,
        sources,
    })
}
