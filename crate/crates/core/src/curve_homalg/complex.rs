//! Bounded complexes of split line bundles on the curve.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use super::ring::{compose, is_zero_matrix, CurveRingElement, RingMatrix};
use super::CurveError;
use crate::exact_linalg::Rational;

/// A complex of direct sums of line bundles `O(a, b)` restricted to the curve,
/// in cohomological indexing (a resolution sits in degrees `≤ 0`).
///
/// `diffs[k]` is the differential from degree `k` to degree `k + 1`; a
/// missing entry means the zero map. When the complex is the truncation of
/// an infinite resolution, `truncation` records the lowest degree kept.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineBundleComplex {
    terms: BTreeMap<i64, Vec<(i64, i64)>>,
    diffs: BTreeMap<i64, RingMatrix>,
    truncation: Option<i64>,
}

impl LineBundleComplex {
    /// Validates shapes, bidegrees and `d² = 0`.
    pub fn new(
        terms: BTreeMap<i64, Vec<(i64, i64)>>,
        diffs: BTreeMap<i64, RingMatrix>,
        truncation: Option<i64>,
    ) -> Result<Self, CurveError> {
        let terms: BTreeMap<_, _> = terms.into_iter().filter(|(_, v)| !v.is_empty()).collect();
        let empty = Vec::new();
        let mut kept = BTreeMap::new();
        for (k, m) in diffs {
            let src = terms.get(&k).unwrap_or(&empty);
            let tgt = terms.get(&(k + 1)).unwrap_or(&empty);
            if m.len() != tgt.len() || m.iter().any(|r| r.len() != src.len()) {
                return Err(CurveError::MalformedComplex(format!(
                    "differential out of degree {k} has the wrong shape"
                )));
            }
            for (bi, row) in m.iter().enumerate() {
                for (ai, x) in row.iter().enumerate() {
                    let want = (tgt[bi].0 - src[ai].0, tgt[bi].1 - src[ai].1);
                    if !x.is_zero() && x.bideg() != want {
                        return Err(CurveError::MalformedComplex(format!(
                            "entry ({bi},{ai}) out of degree {k} has bidegree {:?}, expected {want:?}",
                            x.bideg()
                        )));
                    }
                }
            }
            if !is_zero_matrix(&m) {
                kept.insert(k, m);
            }
        }
        let c = LineBundleComplex {
            terms,
            diffs: kept,
            truncation,
        };
        for (&k, m) in &c.diffs {
            if let Some(next) = c.diffs.get(&(k + 1)) {
                if !is_zero_matrix(&compose(next, m)) {
                    return Err(CurveError::MalformedComplex(format!(
                        "d∘d is nonzero out of degree {k}"
                    )));
                }
            }
        }
        Ok(c)
    }

    pub fn terms(&self) -> &BTreeMap<i64, Vec<(i64, i64)>> {
        &self.terms
    }

    /// Summands in degree `k` (empty if none).
    pub fn term(&self, k: i64) -> &[(i64, i64)] {
        self.terms.get(&k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn has_term(&self, k: i64) -> bool {
        self.terms.contains_key(&k)
    }

    /// Differential out of degree `k`; `None` is the zero map.
    pub fn diff(&self, k: i64) -> Option<&RingMatrix> {
        self.diffs.get(&k)
    }

    /// Differential out of degree `k` as an explicit (possibly zero) matrix.
    pub fn diff_matrix(&self, k: i64) -> RingMatrix {
        match self.diffs.get(&k) {
            Some(m) => m.clone(),
            None => zero_matrix(self.term(k), self.term(k + 1)),
        }
    }

    pub fn truncation(&self) -> Option<i64> {
        self.truncation
    }

    pub fn is_truncated(&self) -> bool {
        self.truncation.is_some()
    }

    pub fn lowest(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(0)
    }

    pub fn highest(&self) -> i64 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `X[by]`: degree `k` moves to `k - by` and differentials pick up `(-1)^by`.
    pub fn shifted(&self, by: i64) -> LineBundleComplex {
        let sign = if by.rem_euclid(2) == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        LineBundleComplex {
            terms: self.terms.iter().map(|(&k, v)| (k - by, v.clone())).collect(),
            diffs: self
                .diffs
                .iter()
                .map(|(&k, m)| {
                    (
                        k - by,
                        m.iter()
                            .map(|r| r.iter().map(|x| x.scale(&sign)).collect())
                            .collect(),
                    )
                })
                .collect(),
            truncation: self.truncation.map(|t| t - by),
        }
    }

    /// True if the two complexes have the same terms and differentials in
    /// every degree where both have terms, and the same top degree. Two
    /// truncations of one infinite resolution agree.
    pub fn agrees_with(&self, other: &LineBundleComplex) -> bool {
        if self.highest() != other.highest() {
            return false;
        }
        let lo = self.lowest().max(other.lowest());
        let hi = self.highest();
        (lo..=hi).all(|k| self.term(k) == other.term(k))
            && (lo..hi).all(|k| self.diff(k) == other.diff(k))
    }
}

pub(crate) fn zero_matrix(src: &[(i64, i64)], tgt: &[(i64, i64)]) -> RingMatrix {
    tgt.iter()
        .map(|b| {
            src.iter()
                .map(|a| CurveRingElement::zero((b.0 - a.0, b.1 - a.1)))
                .collect()
        })
        .collect()
}

impl fmt::Display for LineBundleComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&k, v) in self.terms.iter().rev() {
            if !first {
                let m = self
                    .diff(k)
                    .map(|m| {
                        let rows: Vec<String> = m
                            .iter()
                            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                            .collect();
                        rows.join(";")
                    })
                    .unwrap_or_else(|| "0".to_string());
                write!(f, " <-[{m}]- ")?;
            }
            first = false;
            let parts: Vec<String> = v.iter().map(|(a, b)| format!("O({a},{b})")).collect();
            write!(f, "{}", parts.join("+"))?;
        }
        if self.truncation.is_some() {
            write!(f, " <- ...")?;
        }
        Ok(())
    }
}

fn single_term_complex(
    terms: Vec<(i64, i64)>,
    maps: Vec<CurveRingElement>,
    truncated: bool,
) -> LineBundleComplex {
    let n = terms.len() as i64;
    let t: BTreeMap<i64, Vec<(i64, i64)>> = terms
        .into_iter()
        .enumerate()
        .map(|(j, b)| (-(j as i64), vec![b]))
        .collect();
    let d: BTreeMap<i64, RingMatrix> = maps
        .into_iter()
        .enumerate()
        .map(|(j, x)| (-(j as i64) - 1, vec![vec![x]]))
        .collect();
    LineBundleComplex::new(t, d, if truncated { Some(1 - n) } else { None })
        .expect("periodic resolutions are complexes")
}

/// Bidegree of the `j`-th term of the resolution of `P(-1)`.
fn p_term(j: usize) -> (i64, i64) {
    let m = (j / 2) as i64;
    if j % 2 == 0 {
        (-2 * m, -1 - m)
    } else {
        (-2 * m - 1, -1 - m)
    }
}

/// Periodic locally free resolution of `P(a)`, the structure sheaf of the
/// reduced line `{s = 0}` twisted by `O(a)`, truncated to degrees `[-n_max, 0]`.
///
/// For `a = -1` the terms are `O(0,-1) ← O(-1,-1) ← O(-2,-2) ← O(-3,-2) ← ⋯`
/// with maps alternating `·s`, `·su`. Other twists tensor every term by `O(0, a+1)`.
pub fn build_resolution_p(a: i64, n_max: usize) -> LineBundleComplex {
    let terms = (0..=n_max)
        .map(|j| {
            let (x, y) = p_term(j);
            (x, y + a + 1)
        })
        .collect();
    let maps = (1..=n_max)
        .map(|j| {
            if j % 2 == 1 {
                CurveRingElement::stuv(1, 0, 0, 0)
            } else {
                CurveRingElement::stuv(1, 0, 1, 0)
            }
        })
        .collect();
    single_term_complex(terms, maps, true)
}

/// `O(a, b)` as a one-term complex in degree 0. `L(a)` is `O(a, 0)`,
/// the canonical bundle of the curve is `O(0, -1)`.
pub fn build_line_bundle(a: i64, b: i64) -> LineBundleComplex {
    single_term_complex(vec![(a, b)], Vec::new(), false)
}

/// Periodic resolution of `O/(s²)`, the fattened line `{s² = 0}`, with maps
/// alternating `·s²`, `·u`, truncated to degrees `[-n_max, 0]`.
pub fn build_resolution_q(n_max: usize) -> LineBundleComplex {
    let terms = (0..=n_max)
        .map(|j| {
            let m = (j / 2) as i64;
            if j % 2 == 0 {
                (-2 * m, -m)
            } else {
                (-2 * m - 2, -m)
            }
        })
        .collect();
    let maps = (1..=n_max)
        .map(|j| {
            if j % 2 == 1 {
                CurveRingElement::stuv(2, 0, 0, 0)
            } else {
                CurveRingElement::stuv(0, 0, 1, 0)
            }
        })
        .collect();
    single_term_complex(terms, maps, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_minus_one_matches_display() {
        let c = build_resolution_p(-1, 3);
        assert_eq!(c.term(0), &[(0, -1)]);
        assert_eq!(c.term(-1), &[(-1, -1)]);
        assert_eq!(c.term(-2), &[(-2, -2)]);
        assert_eq!(c.term(-3), &[(-3, -2)]);
        let maps: Vec<String> = (1..=3).map(|j| c.diff(-j)).map(|m| m.unwrap()[0][0].to_string()).collect();
        assert_eq!(maps, vec!["s", "s u", "s"]);
        assert_eq!(c.truncation(), Some(-3));
    }

    #[test]
    fn p_zero_is_a_twist() {
        let c = build_resolution_p(0, 1);
        assert_eq!(c.term(0), &[(0, 0)]);
        assert_eq!(c.term(-1), &[(-1, 0)]);
        assert_eq!(c.diff(-1).unwrap()[0][0].to_string(), "s");
    }

    #[test]
    fn q_terms() {
        let c = build_resolution_q(4);
        let t: Vec<(i64, i64)> = (0..=4).map(|j| c.term(-j)[0]).collect();
        assert_eq!(t, vec![(0, 0), (-2, 0), (-2, -1), (-4, -1), (-4, -2)]);
        assert_eq!(c.diff(-2).unwrap()[0][0].to_string(), "u");
    }

    #[test]
    fn rejects_non_complexes() {
        let s = CurveRingElement::stuv(1, 0, 0, 0);
        let t = CurveRingElement::stuv(0, 1, 0, 0);
        let terms = [(-2, vec![(-2, 0)]), (-1, vec![(-1, 0)]), (0, vec![(0, 0)])].into_iter().collect();
        let diffs = [(-2, vec![vec![t.clone()]]), (-1, vec![vec![s.clone()]])].into_iter().collect();
        assert!(matches!(
            LineBundleComplex::new(terms, diffs, None),
            Err(CurveError::MalformedComplex(_))
        ));
        let terms = [(-1, vec![(-1, 0)]), (0, vec![(0, 0)])].into_iter().collect();
        let diffs = [(-1, vec![vec![CurveRingElement::stuv(0, 0, 1, 0)]])].into_iter().collect();
        assert!(LineBundleComplex::new(terms, diffs, None).is_err());
    }

    #[test]
    fn truncations_agree() {
        let a = build_resolution_p(-1, 4);
        let b = build_resolution_p(-1, 9);
        assert!(a.agrees_with(&b));
        assert!(!a.agrees_with(&build_resolution_p(0, 4)));
        assert!(!a.agrees_with(&build_resolution_q(4)));
    }

    #[test]
    fn shift_moves_degrees() {
        let c = build_resolution_p(-1, 2).shifted(1);
        assert_eq!(c.highest(), -1);
        assert_eq!(c.truncation(), Some(-3));
        assert_eq!(c.diff(-3).unwrap()[0][0].to_string(), "-s u");
    }
}
