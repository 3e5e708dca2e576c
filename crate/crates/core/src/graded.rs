use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Dimensions indexed by cohomological degree. Zero entries are never stored,
/// so two values compare equal exactly when they agree in every degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedDims(BTreeMap<i64, usize>);

impl GradedDims {
    pub fn new() -> Self {
        GradedDims(BTreeMap::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, usize)>>(pairs: I) -> Self {
        let mut g = GradedDims::new();
        for (d, n) in pairs {
            g.add(d, n);
        }
        g
    }

    /// `dims[i]` becomes the dimension in degree `start + i`.
    pub fn from_slice(start: i64, dims: &[usize]) -> Self {
        Self::from_pairs(dims.iter().enumerate().map(|(i, &n)| (start + i as i64, n)))
    }

    pub fn get(&self, degree: i64) -> usize {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn add(&mut self, degree: i64, n: usize) {
        if n > 0 {
            *self.0.entry(degree).or_insert(0) += n;
        }
    }

    pub fn set(&mut self, degree: i64, n: usize) {
        if n == 0 {
            self.0.remove(&degree);
        } else {
            self.0.insert(degree, n);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    /// Alternating sum of dimensions.
    pub fn euler(&self) -> i64 {
        self.0
            .iter()
            .map(|(&d, &n)| if d.rem_euclid(2) == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Moves every entry from degree `d` to degree `d + by`.
    pub fn shifted(&self, by: i64) -> Self {
        GradedDims(self.0.iter().map(|(&d, &n)| (d + by, n)).collect())
    }

    pub fn sum(&self, other: &GradedDims) -> Self {
        let mut out = self.clone();
        for (&d, &n) in &other.0 {
            out.add(d, n);
        }
        out
    }

    /// Entries with degree in `lo..=hi`.
    pub fn restricted(&self, lo: i64, hi: i64) -> Self {
        GradedDims(self.0.range(lo..=hi).map(|(&d, &n)| (d, n)).collect())
    }

    pub fn to_vec(&self, lo: i64, hi: i64) -> Vec<usize> {
        (lo..=hi).map(|d| self.get(d)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.0.iter().map(|(&d, &n)| (d, n))
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.0.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.0.keys().next_back().copied()
    }
}

impl fmt::Display for GradedDims {
    /// Written as a sum `C^n[-d]`, with `0` for the zero space.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(d, n)| {
                let base = if n == 1 { "C".to_string() } else { format!("C^{n}") };
                if d == 0 {
                    base
                } else {
                    format!("{base}[{}]", -d)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
