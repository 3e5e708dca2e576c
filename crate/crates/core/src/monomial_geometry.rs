//! Line-bundle cohomology on `P¹`, `P¹ × P¹` and ruled surfaces.
//!
//! A ruled surface here is `Σ = P(O ⊕ O(a))` over `P¹`, with the convention
//! that `P(E)` is `Proj Sym E`, so `π_* O(1) = E`. Line bundles on it are
//! `O(m, n) = O(1)^m ⊗ π^*O(n)`; cohomology is computed by pushing down to
//! `P¹`, where `Sym^d E` splits as `⊕_k O(k·a)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::GradedDims;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("line bundles live on different ruled surfaces (a = {0} vs a = {1})")]
    RulingMismatch(i64, i64),
    #[error("divisor data must have ambient dimension at least 2, got {0}")]
    AmbientTooSmall(usize),
    #[error("both graded pieces are non-zero next to degree {0}; the dimension split is not forced")]
    AmbiguousSplitting(i64),
}

/// `O(degree)` on `P¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct P1Bundle {
    pub degree: i64,
}

/// `O(deg_st, deg_uv)` on `P¹_{s:t} × P¹_{u:v}` (or its restriction to a subscheme).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadricBundle {
    pub deg_st: i64,
    pub deg_uv: i64,
}

/// `O(fiber_deg, base_deg) = O(1)^fiber_deg ⊗ π^*O(base_deg)` on `P(O ⊕ O(ruling))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuledBundle {
    pub fiber_deg: i64,
    pub base_deg: i64,
    pub ruling: i64,
}

impl RuledBundle {
    pub fn new(fiber_deg: i64, base_deg: i64, ruling: i64) -> Self {
        RuledBundle {
            fiber_deg,
            base_deg,
            ruling,
        }
    }

    pub fn tensor(&self, other: &RuledBundle) -> Result<RuledBundle, GeometryError> {
        if self.ruling != other.ruling {
            return Err(GeometryError::RulingMismatch(self.ruling, other.ruling));
        }
        Ok(RuledBundle::new(
            self.fiber_deg + other.fiber_deg,
            self.base_deg + other.base_deg,
            self.ruling,
        ))
    }

    pub fn dual(&self) -> RuledBundle {
        RuledBundle::new(-self.fiber_deg, -self.base_deg, self.ruling)
    }
}

impl fmt::Display for RuledBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O({},{})", self.fiber_deg, self.base_deg)
    }
}

/// Data of a ruled surface `E` sitting as a divisor in a smooth variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorData {
    /// The normal bundle of `E`.
    pub normal_bundle: RuledBundle,
    /// The ambient canonical bundle restricted to `E`.
    pub canonical_restriction: RuledBundle,
    /// Dimension of the ambient variety.
    pub ambient_dim: usize,
}

impl DivisorData {
    pub fn new(
        normal_bundle: RuledBundle,
        canonical_restriction: RuledBundle,
        ambient_dim: usize,
    ) -> Result<Self, GeometryError> {
        if ambient_dim < 2 {
            return Err(GeometryError::AmbientTooSmall(ambient_dim));
        }
        if normal_bundle.ruling != canonical_restriction.ruling {
            return Err(GeometryError::RulingMismatch(
                normal_bundle.ruling,
                canonical_restriction.ruling,
            ));
        }
        Ok(DivisorData {
            normal_bundle,
            canonical_restriction,
            ambient_dim,
        })
    }

    /// The exceptional divisor `E ≅ P(O ⊕ O(1))` of the threefold resolution:
    /// normal bundle `O(-2,1)`, canonical restriction `O(0,-2)`, ambient dimension 3.
    pub fn threefold_exceptional() -> Self {
        DivisorData {
            normal_bundle: RuledBundle::new(-2, 1, 1),
            canonical_restriction: RuledBundle::new(0, -2, 1),
            ambient_dim: 3,
        }
    }

    pub fn ruling(&self) -> i64 {
        self.normal_bundle.ruling
    }
}

/// `H^•(P¹, O(a))`.
pub fn cohomology_p1(a: i64) -> GradedDims {
    let mut g = GradedDims::new();
    g.add(0, (a + 1).max(0) as usize);
    g.add(1, (-a - 1).max(0) as usize);
    g
}

/// `H^•(P¹ × P¹, O(a, b))` by Künneth.
pub fn cohomology_p1xp1(a: i64, b: i64) -> GradedDims {
    let x = cohomology_p1(a);
    let y = cohomology_p1(b);
    let mut g = GradedDims::new();
    for (i, m) in x.iter() {
        for (j, n) in y.iter() {
            g.add(i + j, m * n);
        }
    }
    g
}

/// One summand of a pushforward: the split bundle `⊕ O(degrees)` placed as `[shift]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushforwardPiece {
    pub shift: i64,
    pub degrees: Vec<i64>,
}

/// `Rπ_* O(d)` for `π : P(O ⊕ O(a)) → P¹`, as split bundles on `P¹`.
///
/// For `d ≥ 0` this is `Sym^d(O ⊕ O(a))`; for `d = -1` it vanishes; for
/// `d ≤ -2` it is `(O(a) ⊗ Sym^{-2-d}(O ⊕ O(a)))^∨[-1]`.
pub fn pushforward_ruled(d: i64, a: i64) -> Vec<PushforwardPiece> {
    if d >= 0 {
        vec![PushforwardPiece {
            shift: 0,
            degrees: (0..=d).map(|k| k * a).collect(),
        }]
    } else if d == -1 {
        Vec::new()
    } else {
        vec![PushforwardPiece {
            shift: -1,
            degrees: (0..=(-2 - d)).map(|k| -(a + k * a)).collect(),
        }]
    }
}

/// `H^•(Σ, O(m, n))` via `H^•(P¹, Rπ_* O(m) ⊗ O(n))`.
pub fn cohomology_ruled(lb: &RuledBundle) -> GradedDims {
    let mut g = GradedDims::new();
    for piece in pushforward_ruled(lb.fiber_deg, lb.ruling) {
        for deg in piece.degrees {
            g = g.sum(&cohomology_p1(deg + lb.base_deg).shifted(-piece.shift));
        }
    }
    g
}

/// `ω_Σ = O(-2, -2 + a)`.
pub fn canonical_ruled(a: i64) -> RuledBundle {
    RuledBundle::new(-2, -2 + a, a)
}

/// Dimensions of `Ext^•(j_* f, j_* g)` for a divisor `j : E → X`.
///
/// The counit triangle `f ⊗ N^∨[1] → j^* j_* f → f` splits the answer into
/// `H^•(f^∨ ⊗ g)` and `H^{•-1}(f^∨ ⊗ g ⊗ N)`. The sum of the two is the true
/// dimension whenever the connecting maps vanish; with `strict` set, a case
/// where a connecting map could be non-zero (second piece in degree `i`,
/// first piece in degree `i + 1`) is an error instead.
pub fn divisor_ext(
    f: &RuledBundle,
    g: &RuledBundle,
    div: &DivisorData,
    strict: bool,
) -> Result<GradedDims, GeometryError> {
    for lb in [g, &div.normal_bundle, &div.canonical_restriction] {
        if lb.ruling != f.ruling {
            return Err(GeometryError::RulingMismatch(f.ruling, lb.ruling));
        }
    }
    let hom = f.dual().tensor(g)?;
    let first = cohomology_ruled(&hom);
    let second = cohomology_ruled(&hom.tensor(&div.normal_bundle)?).shifted(1);
    if strict {
        for (i, _) in second.iter() {
            if first.get(i + 1) > 0 {
                return Err(GeometryError::AmbiguousSplitting(i));
            }
        }
    }
    Ok(first.sum(&second))
}

/// Checks `divisor_ext(f, g)[i] = divisor_ext(g, f ⊗ ω|_E)[n - i]` in every degree.
pub fn serre_check_ruled(
    f: &RuledBundle,
    g: &RuledBundle,
    div: &DivisorData,
) -> Result<bool, GeometryError> {
    let lhs = divisor_ext(f, g, div, false)?;
    let twisted = f.tensor(&div.canonical_restriction)?;
    let rhs = divisor_ext(g, &twisted, div, false)?;
    let n = div.ambient_dim as i64;
    let mirrored = GradedDims::from_pairs(rhs.iter().map(|(d, k)| (n - d, k)));
    Ok(lhs == mirrored)
}
