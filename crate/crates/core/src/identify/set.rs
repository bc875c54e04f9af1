use super::{BitString, IdError};

/// A duplicate-free set of non-empty bit strings in lexicographic order, a
/// string preceding its own extensions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SortedHypothesisSet {
    members: Vec<BitString>,
}

impl SortedHypothesisSet {
    /// Sorts and deduplicates.
    pub fn from_unsorted(mut members: Vec<BitString>) -> Result<Self, IdError> {
        if members.iter().any(BitString::is_empty) {
            return Err(IdError::EmptyString);
        }
        members.sort();
        members.dedup();
        Ok(Self { members })
    }

    /// Accepts members already in strictly increasing order, checked in one
    /// pass. The error carries the 1-based index of the first offending pair.
    pub fn from_sorted(members: Vec<BitString>) -> Result<Self, IdError> {
        if members.iter().any(BitString::is_empty) {
            return Err(IdError::EmptyString);
        }
        if let Some(i) = members.windows(2).position(|w| w[0] >= w[1]) {
            return Err(IdError::Unsorted { index: i + 1 });
        }
        Ok(Self { members })
    }

    /// Parses newline-separated `0`/`1` strings. Blank lines are skipped, as
    /// are lines starting with `#` except a leading `#sorted` header, which
    /// asserts the members are already ordered and skips the sort.
    pub fn parse(text: &str) -> Result<Self, IdError> {
        let mut presorted = false;
        let mut seen_member = false;
        let mut members = Vec::new();
        let mut lines = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if !seen_member && comment.trim().eq_ignore_ascii_case("sorted") {
                    presorted = true;
                }
                continue;
            }
            seen_member = true;
            let bits = line.parse::<BitString>().map_err(|e| IdError::Parse {
                line: n + 1,
                message: e.to_string(),
            })?;
            members.push(bits);
            lines.push(n + 1);
        }
        if presorted {
            Self::from_sorted(members).map_err(|e| match e {
                IdError::Unsorted { index } => IdError::Parse {
                    line: lines[index],
                    message: format!(
                        "member {} is not strictly after member {index} despite the sorted header",
                        index + 1
                    ),
                },
                other => other,
            })
        } else {
            Self::from_unsorted(members)
        }
    }

    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("#sorted\n");
        for m in &self.members {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    Inserted {
        index: usize,
    },
    /// The query was already a member; the set is unchanged.
    AlreadyKnown {
        index: usize,
    },
}

/// Adds a falsified query to the known set at its sorted position. Indices are
/// 1-based.
pub fn grow_known_set(
    set: &SortedHypothesisSet,
    query: &BitString,
) -> Result<(SortedHypothesisSet, Growth), IdError> {
    if query.is_empty() {
        return Err(IdError::EmptyString);
    }
    match set.members.binary_search(query) {
        Ok(i) => Ok((set.clone(), Growth::AlreadyKnown { index: i + 1 })),
        Err(i) => {
            let mut members = set.members.clone();
            members.insert(i, query.clone());
            Ok((
                SortedHypothesisSet { members },
                Growth::Inserted { index: i + 1 },
            ))
        }
    }
}
