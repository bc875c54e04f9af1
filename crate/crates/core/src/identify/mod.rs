//! Identification of a query bit string against a finite set of bit strings.
//!
//! Three procedures share one outcome type: an ordered scan of a sorted set,
//! a depth-first scan of an unordered list, and a walk down a context tree
//! (trie). All compare symbols left to right, treat string lengths as known
//! (a proper prefix of a member is not that member), and stop after at most
//! `⌈−log2 r⌉` symbols for resolution `r`.
//!
//! Indices reported in [`IdOutcome`] are 1-based positions in the set as
//! given; `h = 0` means no member was singled out.

mod depth_first;
mod set;
mod sorted;
mod substring;
mod tree;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use depth_first::identify_depth_first;
pub use set::{grow_known_set, Growth, SortedHypothesisSet};
pub use sorted::identify_sorted;
pub use substring::{substring_identify, SubstringOutcome};
pub use tree::{build_context_tree, identify_tree, ContextTree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdError {
    #[error("invalid bit {found:?} at position {position}")]
    InvalidSymbol { position: usize, found: char },
    #[error("empty strings cannot be identified")]
    EmptyString,
    #[error("members {index} and {next} are out of order or duplicated", next = index + 1)]
    Unsorted { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("resolution {0} is outside [0, 1]")]
    Resolution(String),
    #[error("a stream string needs a positive resolution to bound its length")]
    UnboundedStream,
    #[error("list member {0} is duplicated")]
    Duplicate(usize),
    #[error("window [{start}, {start}+{len}) does not fit a query of length {query_len}")]
    Window {
        start: usize,
        len: usize,
        query_len: usize,
    },
}

/// A finite string over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn slice(&self, start: usize, len: usize) -> BitString {
        BitString::new(self.bits[start..start + len].to_vec())
    }
}

impl FromStr for BitString {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(position, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(IdError::InvalidSymbol { position, found }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString::new)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Observation resolution `r ∈ [0, 1]`: at most `⌈−log2 r⌉` symbols are
/// compared, and `r = 0` removes the cap.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Resolution(f64);

impl Resolution {
    pub const UNCAPPED: Resolution = Resolution(0.0);

    pub fn new(r: f64) -> Result<Self, IdError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(IdError::Resolution(r.to_string()));
        }
        Ok(Self(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn cap(self) -> Option<usize> {
        if self.0 == 0.0 {
            None
        } else {
            Some((-self.0.log2()).ceil().max(0.0) as usize)
        }
    }
}

/// An unbounded string defined by a deterministic symbol generator. Only the
/// first `⌈−log2 r⌉` symbols are ever produced.
#[derive(Clone)]
pub struct StreamString {
    prefix: Vec<bool>,
}

impl StreamString {
    pub fn new(
        generator: Arc<dyn Fn(usize) -> bool + Send + Sync>,
        r: Resolution,
    ) -> Result<Self, IdError> {
        let cap = r.cap().ok_or(IdError::UnboundedStream)?;
        Ok(Self {
            prefix: (0..cap).map(|i| generator(i)).collect(),
        })
    }

    /// The pattern repeated forever.
    pub fn periodic(pattern: BitString, r: Resolution) -> Result<Self, IdError> {
        if pattern.is_empty() {
            return Err(IdError::EmptyString);
        }
        let bits = pattern.bits.clone();
        Self::new(Arc::new(move |i| bits[i % bits.len()]), r)
    }

    /// Symbol `i`, if it lies within the cap.
    pub fn get(&self, i: usize) -> Option<bool> {
        self.prefix.get(i).copied()
    }

    pub fn materialized(&self) -> usize {
        self.prefix.len()
    }
}

impl fmt::Debug for StreamString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StreamString")
            .field("prefix", &BitString::new(self.prefix.clone()).to_string())
            .finish()
    }
}

/// What is being identified.
#[derive(Debug, Clone)]
pub enum Query {
    Finite(BitString),
    Stream(StreamString),
}

impl From<BitString> for Query {
    fn from(b: BitString) -> Self {
        Query::Finite(b)
    }
}

impl From<StreamString> for Query {
    fn from(s: StreamString) -> Self {
        Query::Stream(s)
    }
}

/// The symbols a procedure may look at, and whether that view is truncated.
pub(crate) struct View<'a> {
    pub bits: &'a [bool],
    pub truncated: bool,
}

impl Query {
    pub(crate) fn view(&self, r: Resolution) -> Result<View<'_>, IdError> {
        match self {
            Query::Finite(b) => {
                if b.is_empty() {
                    return Err(IdError::EmptyString);
                }
                let n = r.cap().map_or(b.len(), |c| c.min(b.len()));
                Ok(View {
                    bits: &b.bits[..n],
                    truncated: n < b.len(),
                })
            }
            Query::Stream(s) => {
                let n = r.cap().ok_or(IdError::UnboundedStream)?.min(s.prefix.len());
                Ok(View {
                    bits: &s.prefix[..n],
                    truncated: true,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdStatus {
    Verified,
    Falsified,
    Undetermined,
}

/// Result of identifying a query against a set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdOutcome {
    pub status: IdStatus,
    /// 1-based index of the best-matching member; 0 when none.
    pub h: usize,
    /// Query symbols observed.
    pub i: usize,
    /// 1-based indices of members consistent with every observed symbol but
    /// not equal to the query (or the matched member when verified).
    pub partial_subset: Vec<usize>,
}

impl IdOutcome {
    pub(crate) fn empty_set() -> Self {
        Self {
            status: IdStatus::Falsified,
            h: 0,
            i: 0,
            partial_subset: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_caps() {
        assert_eq!(Resolution::new(0.0).unwrap().cap(), None);
        assert_eq!(Resolution::new(1.0).unwrap().cap(), Some(0));
        assert_eq!(Resolution::new(0.5).unwrap().cap(), Some(1));
        assert_eq!(Resolution::new(0.25).unwrap().cap(), Some(2));
        assert_eq!(Resolution::new(0.3).unwrap().cap(), Some(2));
        assert!(Resolution::new(1.5).is_err());
        assert!(Resolution::new(-0.1).is_err());
    }

    #[test]
    fn bit_strings_parse_and_order() {
        let a: BitString = "0".parse().unwrap();
        let b: BitString = "01".parse().unwrap();
        let c: BitString = "1".parse().unwrap();
        assert!(a < b && b < c);
        assert_eq!(b.to_string(), "01");
        assert_eq!(
            "0x1".parse::<BitString>(),
            Err(IdError::InvalidSymbol {
                position: 1,
                found: 'x'
            })
        );
    }

    #[test]
    fn stream_respects_cap() {
        let s = StreamString::periodic("01".parse().unwrap(), Resolution::new(1.0 / 32.0).unwrap())
            .unwrap();
        assert_eq!(s.materialized(), 5);
        assert_eq!(s.get(3), Some(true));
        assert_eq!(s.get(5), None);
        assert_eq!(s.get(3), s.get(3));
        assert!(StreamString::periodic("01".parse().unwrap(), Resolution::UNCAPPED).is_err());
    }

    #[test]
    fn outcome_json_shape() {
        let o = IdOutcome {
            status: IdStatus::Verified,
            h: 2,
            i: 2,
            partial_subset: vec![2],
        };
        assert_eq!(
            serde_json::to_string(&o).unwrap(),
            r#"{"status":"verified","h":2,"i":2,"partial_subset":[2]}"#
        );
    }
}
