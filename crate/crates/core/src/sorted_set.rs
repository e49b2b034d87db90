use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A non-empty, strictly increasing tuple of elements of `[1, N]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SortedSet(Vec<u64>);

impl SortedSet {
    /// Validates ordering and that every element lies in `[1, universe]`.
    pub fn new(elems: Vec<u64>, universe: u64) -> Result<Self> {
        Self::check(&elems, universe)?;
        Ok(Self(elems))
    }

    /// Sorts and deduplicates arbitrary input before validating.
    pub fn from_unsorted(mut elems: Vec<u64>, universe: u64) -> Result<Self> {
        elems.sort_unstable();
        elems.dedup();
        Self::new(elems, universe)
    }

    /// `{1, ..., n}`.
    pub fn interval(n: u64) -> Self {
        Self((1..=n).collect())
    }

    pub(crate) fn check(elems: &[u64], universe: u64) -> Result<()> {
        if elems.is_empty() {
            return Err(Error::invalid("sorted set must be non-empty"));
        }
        if elems[0] == 0 || *elems.last().unwrap() > universe {
            return Err(Error::invalid(format!(
                "elements must lie in [1, {universe}]"
            )));
        }
        if elems.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("elements must be strictly increasing"));
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> u64 {
        self.0[0]
    }

    pub fn max(&self) -> u64 {
        *self.0.last().unwrap()
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

impl AsRef<[u64]> for SortedSet {
    fn as_ref(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for SortedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}
