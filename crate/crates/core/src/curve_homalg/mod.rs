//! Homological algebra on the non-reduced curve `{s²u = 0} ⊂ P¹_{s:t} × P¹_{u:v}`.
//!
//! The curve is a reduced line `{u = 0}` glued to a doubled line `{s² = 0}`.
//! Objects are bounded complexes of line bundles `O(a, b)` (truncations of
//! periodic resolutions), Ext is computed from a Čech model, and explicit
//! classes are handled through the global Hom complex.
//!
//! `P(a)` is the structure sheaf of the reduced component `{s = 0}`
//! twisted by `O(0, a)`, `L(a)` is `O(a, 0)` and `Q` is `O/(s²)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::exact_linalg::{rank, LinalgError, SparseMatrix};
use crate::GradedDims;

mod cech;
mod chain;
mod complex;
pub mod ring;

pub use cech::ext_dims;
pub use chain::{
    compose_ladders, cone, lift_to_chain_map, yoneda_compose, ChainMap, ExtBasis, ExtBasisElement,
    ExtClass,
};
pub use complex::{build_line_bundle, build_resolution_p, build_resolution_q, LineBundleComplex};
pub use ring::{sections_curve, CurveRingElement, RingMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("malformed complex: {0}")]
    MalformedComplex(String),
    #[error("resolution too shallow: {0}")]
    TooShallow(String),
    #[error(
        "truncation unstable in degree {degree}: {at_cutoff} at the requested cutoff, {at_larger_cutoff} with cutoff + 2"
    )]
    UnstableTruncation {
        degree: i64,
        at_cutoff: usize,
        at_larger_cutoff: usize,
    },
    #[error("differential is not monomial: {0}")]
    NonMonomial(String),
    #[error("lifting failed at source degree {0}")]
    LiftFailed(i64),
    #[error("incompatible ladders: {0}")]
    IncompatibleLadders(String),
    #[error("malformed chain map: {0}")]
    MalformedChainMap(String),
    #[error("ladder is not a cocycle of the Hom complex")]
    NotACocycle,
    #[error("global Hom complex gives dimension {global} in degree {degree}, Čech model gives {cech}")]
    GlobalSectionsMismatch { degree: i64, global: usize, cech: usize },
    #[error("cannot parse object '{0}' (expected P(a), L(a), O(a,b) or Q)")]
    BadSpec(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Default cutoff for Ext up to `max_degree`.
pub fn default_cutoff(max_degree: usize) -> usize {
    max_degree + 8
}

/// A named object on the curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectSpec {
    /// `P(a)`, the reduced line twisted by `O(a)`.
    P(i64),
    /// `L(a) = O(a, 0)`.
    L(i64),
    /// `O(a, b)`.
    O(i64, i64),
    /// `O/(s²)`.
    Q,
}

impl ObjectSpec {
    /// The object as a complex; resolutions are cut at `depth`.
    pub fn build(&self, depth: usize) -> LineBundleComplex {
        match *self {
            ObjectSpec::P(a) => build_resolution_p(a, depth),
            ObjectSpec::L(a) => build_line_bundle(a, 0),
            ObjectSpec::O(a, b) => build_line_bundle(a, b),
            ObjectSpec::Q => build_resolution_q(depth),
        }
    }

    pub fn is_resolution(&self) -> bool {
        matches!(self, ObjectSpec::P(_) | ObjectSpec::Q)
    }
}

impl fmt::Display for ObjectSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectSpec::P(a) => write!(f, "P({a})"),
            ObjectSpec::L(a) => write!(f, "L({a})"),
            ObjectSpec::O(a, b) => write!(f, "O({a},{b})"),
            ObjectSpec::Q => write!(f, "Q"),
        }
    }
}

impl FromStr for ObjectSpec {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CurveError::BadSpec(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "Q" {
            return Ok(ObjectSpec::Q);
        }
        if t == "P" {
            return Ok(ObjectSpec::P(-1));
        }
        let (head, rest) = t.split_at(1);
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let nums: Vec<i64> = inner
            .split(',')
            .map(|x| x.parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        match (head, nums.as_slice()) {
            ("P", [a]) => Ok(ObjectSpec::P(*a)),
            ("L", [a]) => Ok(ObjectSpec::L(*a)),
            ("O", [a, b]) => Ok(ObjectSpec::O(*a, *b)),
            _ => Err(bad()),
        }
    }
}

/// Source and target complexes deep enough for Ext up to `max_degree`.
pub fn complexes_for(
    source: &ObjectSpec,
    target: &ObjectSpec,
    max_degree: usize,
) -> (LineBundleComplex, LineBundleComplex) {
    let depth = max_degree + 2;
    (source.build(depth), target.build(depth + 4))
}

/// `Ext^n(source, target)` for `0 ≤ n ≤ max_degree`.
pub fn ext_table(
    source: &ObjectSpec,
    target: &ObjectSpec,
    max_degree: usize,
    cutoff: usize,
) -> Result<GradedDims, CurveError> {
    let (c, d) = complexes_for(source, target, max_degree);
    ext_dims(&c, &d, max_degree, cutoff)
}

/// Explicit generators of the self-Ext algebra of `P(-1)` up to a degree.
pub struct CpAlgebra {
    pub bases: Vec<ExtBasis>,
    pub epsilon: ChainMap,
    pub theta: ChainMap,
}

impl CpAlgebra {
    /// Bases of `Ext^n(P(-1), P(-1))` for `n ≤ n_max`, with `ε` lifted from
    /// the degree-1 class and `θ` from the degree-2 class labelled `v`.
    pub fn new(n_max: usize, cutoff: usize) -> Result<Self, CurveError> {
        let depth = n_max.max(2) + 2;
        let c = build_resolution_p(-1, depth);
        let d = build_resolution_p(-1, depth + 4);
        let bases = (0..=n_max.max(2) as i64)
            .map(|n| ExtBasis::new(&c, &d, n, cutoff))
            .collect::<Result<Vec<_>, _>>()?;
        let epsilon = bases[1].lift(&bases[1].class(0))?;
        let v = label_index(&bases[2], "v")
            .ok_or_else(|| CurveError::IncompatibleLadders("no class labelled v in degree 2".into()))?;
        let theta = bases[2].lift(&bases[2].class(v))?;
        Ok(CpAlgebra {
            bases,
            epsilon,
            theta,
        })
    }

    /// `ε^a θ^b` as a ladder.
    pub fn monomial(&self, eps: &ChainMap, theta: &ChainMap, a: usize, b: usize) -> Result<ChainMap, CurveError> {
        let mut f = ChainMap::identity(self.bases[0].representative(0).source());
        for _ in 0..b {
            f = compose_ladders(theta, &f)?;
        }
        for _ in 0..a {
            f = compose_ladders(eps, &f)?;
        }
        Ok(f)
    }

    pub fn class_of(&self, f: &ChainMap) -> Result<ExtClass, CurveError> {
        let n = f.shift() as usize;
        let basis = self.bases.get(n).ok_or_else(|| {
            CurveError::IncompatibleLadders(format!("degree {n} is above the computed range"))
        })?;
        basis.coordinates(f)
    }
}

pub(crate) fn label_index(basis: &ExtBasis, uv_label: &str) -> Option<usize> {
    basis.elements().iter().position(|e| e.uv_label == uv_label)
}

/// Checks that `Ext^•(P(-1), P(-1))` is a polynomial ring on `ε` (degree 1)
/// and `θ` (degree 2) through degree `n_max`.
pub fn verify_cp_infinity(n_max: usize, cutoff: usize) -> Result<bool, CurveError> {
    let alg = CpAlgebra::new(n_max, cutoff)?;
    verify_cp_infinity_with(&alg, &alg.epsilon, &alg.theta, n_max)
}

/// As `verify_cp_infinity` with caller-supplied ladders for `ε` and `θ`.
/// A ladder that is not a cocycle makes the check fail rather than error.
pub fn verify_cp_infinity_with(
    alg: &CpAlgebra,
    eps: &ChainMap,
    theta: &ChainMap,
    n_max: usize,
) -> Result<bool, CurveError> {
    if !eps.commutes() || !theta.commutes() {
        return Ok(false);
    }
    let class = |f: &ChainMap| match alg.class_of(f) {
        Ok(x) => Ok(Some(x)),
        Err(CurveError::NotACocycle) => Ok(None),
        Err(e) => Err(e),
    };
    for n in 0..=n_max {
        let mut rows = Vec::new();
        for b in 0..=n / 2 {
            let a = n - 2 * b;
            let Some(x) = class(&alg.monomial(eps, theta, a, b)?)? else { return Ok(false) };
            rows.push(x.coordinates);
        }
        let dim = alg.bases[n].dim();
        let m = SparseMatrix::from_dense(dim, &rows)?;
        if rank(&m) != dim {
            return Ok(false);
        }
    }
    if n_max >= 3 {
        let et = class(&compose_ladders(eps, theta)?)?;
        let te = class(&compose_ladders(theta, eps)?)?;
        if et.is_none() || et != te {
            return Ok(false);
        }
    }
    let ee = class(&compose_ladders(eps, eps)?)?;
    let u = label_index(&alg.bases[2], "u").map(|i| alg.bases[2].class(i));
    Ok(ee.is_some() && ee == u)
}

/// Checks the decomposition with absorber `P = P(-1) ⊗ ω^{-1} = P(0)`:
/// `Ext^•(P, L(a)) = 0` and `Ext^•(L(a), P(-1)) = 0` for `a ∈ {0,1,2}` up
/// to degree 6.
pub fn sod_check_curve(cutoff: usize) -> Result<bool, CurveError> {
    sod_check_curve_with(&ObjectSpec::P(0), &ObjectSpec::P(-1), 6, cutoff)
}

/// The same vanishing checks with arbitrary objects in place of `P(0)` and `P(-1)`.
pub fn sod_check_curve_with(
    absorber: &ObjectSpec,
    absorber_twisted: &ObjectSpec,
    max_degree: usize,
    cutoff: usize,
) -> Result<bool, CurveError> {
    for a in 0..=2 {
        let l = ObjectSpec::L(a);
        if !ext_table(absorber, &l, max_degree, cutoff)?.is_zero() {
            return Ok(false);
        }
        if !ext_table(&l, absorber_twisted, max_degree, cutoff)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        assert_eq!("P(-1)".parse::<ObjectSpec>().unwrap(), ObjectSpec::P(-1));
        assert_eq!("O(1, -2)".parse::<ObjectSpec>().unwrap(), ObjectSpec::O(1, -2));
        assert_eq!("L(2)".parse::<ObjectSpec>().unwrap(), ObjectSpec::L(2));
        assert_eq!("Q".parse::<ObjectSpec>().unwrap(), ObjectSpec::Q);
        assert!("R(1)".parse::<ObjectSpec>().is_err());
        assert!("P(1,2)".parse::<ObjectSpec>().is_err());
        assert_eq!(ObjectSpec::O(1, -2).to_string(), "O(1,-2)");
    }

    #[test]
    fn small_ext_tables() {
        let p = ObjectSpec::P(-1);
        assert_eq!(ext_table(&p, &p, 5, 13).unwrap().to_vec(0, 5), vec![1, 1, 2, 2, 3, 3]);
        for a in 1..=2 {
            assert!(ext_table(&ObjectSpec::L(a), &p, 4, 12).unwrap().is_zero());
        }
        let o = ObjectSpec::O(0, 0);
        assert_eq!(ext_table(&o, &o, 3, 11).unwrap(), GradedDims::from_pairs([(0, 1)]));
    }

    #[test]
    fn cp_infinity_small() {
        assert!(verify_cp_infinity(4, 12).unwrap());
    }

    #[test]
    fn sod_and_negative_control() {
        assert!(sod_check_curve_with(&ObjectSpec::P(0), &ObjectSpec::P(-1), 3, 11).unwrap());
        assert!(!sod_check_curve_with(&ObjectSpec::O(0, 0), &ObjectSpec::O(0, 0), 3, 11).unwrap());
    }
}
