//! Global Hom complexes, explicit Ext bases, chain-map lifts, Yoneda
//! products and mapping cones.
//!
//! For complexes `c`, `d` the global Hom complex has
//! `G^k = ⊕_p Γ(Hom(c^p, d^{p+k}))` with `Df = d_d∘f - (-1)^k f∘d_c`. Its
//! cohomology agrees with the Čech computation whenever the Hom bundles have
//! no higher cohomology, which `ext_basis` checks by comparing dimensions.
//! Ladders use plain commuting squares `d_d∘f_p = f_{p+1}∘d_c`; a `G`
//! cocycle is turned into a ladder by the sign `(-1)^{n(p+n)}`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::cech::ext_dims_range;
use super::complex::{zero_matrix, LineBundleComplex};
use super::ring::{compose, monomial_string, sections_curve, CurveRingElement, Exps, RingMatrix};
use super::CurveError;
use crate::exact_linalg::{kernel_basis, solve, LinalgError, Rational, Rref, SparseMatrix, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct BlockKey {
    p: i64,
    a: usize,
    b: usize,
}

/// Monomial coordinates of `G^k`.
struct HomBasis {
    k: i64,
    blocks: Vec<(BlockKey, (i64, i64), Vec<Exps>)>,
    offsets: HashMap<BlockKey, usize>,
    dim: usize,
}

impl HomBasis {
    fn new(c: &LineBundleComplex, d: &LineBundleComplex, k: i64) -> Self {
        let mut blocks = Vec::new();
        let mut offsets = HashMap::new();
        let mut dim = 0;
        for (&p, src) in c.terms().iter().rev() {
            let tgt = d.term(p + k);
            for (a, sa) in src.iter().enumerate() {
                for (b, tb) in tgt.iter().enumerate() {
                    let key = BlockKey { p, a, b };
                    let bideg = (tb.0 - sa.0, tb.1 - sa.1);
                    let monos = sections_curve(bideg.0, bideg.1);
                    offsets.insert(key, dim);
                    dim += monos.len();
                    blocks.push((key, bideg, monos));
                }
            }
        }
        HomBasis {
            k,
            blocks,
            offsets,
            dim,
        }
    }

    fn index(&self, key: BlockKey, e: &Exps) -> Option<usize> {
        let off = *self.offsets.get(&key)?;
        let (_, _, monos) = self.blocks.iter().find(|(k, _, _)| *k == key)?;
        monos.iter().position(|m| m == e).map(|i| off + i)
    }

    fn describe(&self, idx: usize) -> (BlockKey, Exps) {
        for (key, _, monos) in &self.blocks {
            let off = self.offsets[key];
            if idx < off + monos.len() {
                return (*key, monos[idx - off]);
            }
        }
        unreachable!("index inside the basis")
    }
}

fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Matrix of `D: G^k → G^{k+1}`.
fn hom_differential(
    c: &LineBundleComplex,
    d: &LineBundleComplex,
    src: &HomBasis,
    tgt: &HomBasis,
) -> SparseMatrix {
    let k = src.k;
    let mut trip = Vec::new();
    for (key, _, monos) in &src.blocks {
        let off = src.offsets[key];
        let q = key.p + k;
        for (i, m) in monos.iter().enumerate() {
            let col = off + i;
            let f = CurveRingElement::monomial(*m);
            if let Some(dd) = d.diff(q) {
                for (b2, row) in dd.iter().enumerate() {
                    let prod = &row[key.b] * &f;
                    for (e, coef) in prod.terms() {
                        let tk = BlockKey { p: key.p, a: key.a, b: b2 };
                        if let Some(r) = tgt.index(tk, e) {
                            trip.push((r, col, coef.clone()));
                        }
                    }
                }
            }
            if let Some(dc) = c.diff(key.p - 1) {
                let s = -sign(k.rem_euclid(2) == 1);
                for (a2, x) in dc[key.a].iter().enumerate() {
                    let prod = &f * x;
                    for (e, coef) in prod.terms() {
                        let tk = BlockKey { p: key.p - 1, a: a2, b: key.b };
                        if let Some(r) = tgt.index(tk, e) {
                            trip.push((r, col, &s * coef));
                        }
                    }
                }
            }
        }
    }
    SparseMatrix::from_triplets(tgt.dim, src.dim, trip).expect("indices come from the bases")
}

/// A map of complexes `source → target[shift]` given by commuting ladder
/// squares `d_target ∘ f_p = f_{p+1} ∘ d_source`.
///
/// Component `p` maps `source^p` to `target^{p+shift}` and is indexed
/// `[target summand][source summand]`. Squares are only required where both
/// target terms exist, so truncations of resolutions are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: LineBundleComplex,
    target: LineBundleComplex,
    shift: i64,
    components: BTreeMap<i64, RingMatrix>,
}

impl ChainMap {
    pub fn new(
        source: LineBundleComplex,
        target: LineBundleComplex,
        shift: i64,
        components: BTreeMap<i64, RingMatrix>,
    ) -> Result<Self, CurveError> {
        for (&p, m) in &components {
            let want = zero_matrix(source.term(p), target.term(p + shift));
            let shape_ok = m.len() == want.len()
                && m.iter().zip(&want).all(|(r, w)| r.len() == w.len());
            if !shape_ok {
                return Err(CurveError::MalformedChainMap(format!("component {p} has the wrong shape")));
            }
            for (row, wrow) in m.iter().zip(&want) {
                for (x, w) in row.iter().zip(wrow) {
                    if !x.is_zero() && x.bideg() != w.bideg() {
                        return Err(CurveError::MalformedChainMap(format!(
                            "component {p} has an entry of bidegree {:?}, expected {:?}",
                            x.bideg(),
                            w.bideg()
                        )));
                    }
                }
            }
        }
        let f = ChainMap {
            source,
            target,
            shift,
            components,
        };
        if let Some(p) = f.first_failing_square() {
            return Err(CurveError::MalformedChainMap(format!("square at degree {p} does not commute")));
        }
        Ok(f)
    }

    /// The identity ladder of a complex.
    pub fn identity(c: &LineBundleComplex) -> Self {
        let components = c
            .terms()
            .iter()
            .map(|(&p, v)| {
                let m = (0..v.len())
                    .map(|i| {
                        (0..v.len())
                            .map(|j| {
                                if i == j {
                                    CurveRingElement::one()
                                } else {
                                    CurveRingElement::zero((0, 0))
                                }
                            })
                            .collect()
                    })
                    .collect();
                (p, m)
            })
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            shift: 0,
            components,
        }
    }

    pub fn source(&self) -> &LineBundleComplex {
        &self.source
    }

    pub fn target(&self) -> &LineBundleComplex {
        &self.target
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn components(&self) -> &BTreeMap<i64, RingMatrix> {
        &self.components
    }

    /// Component out of degree `p`, zero if absent.
    pub fn component(&self, p: i64) -> RingMatrix {
        self.components
            .get(&p)
            .cloned()
            .unwrap_or_else(|| zero_matrix(self.source.term(p), self.target.term(p + self.shift)))
    }

    /// Same ladder with one component replaced; no validation.
    pub fn with_component_unchecked(&self, p: i64, m: RingMatrix) -> Self {
        let mut out = self.clone();
        out.components.insert(p, m);
        out
    }

    fn first_failing_square(&self) -> Option<i64> {
        let n = self.shift;
        for &p in self.source.terms().keys() {
            let q = p + n;
            if !self.target.has_term(q) || !self.target.has_term(q + 1) {
                continue;
            }
            let lhs = compose(&self.target.diff_matrix(q), &self.component(p));
            let rhs = compose(&self.component(p + 1), &self.source.diff_matrix(p));
            let equal = lhs
                .iter()
                .zip(&rhs)
                .all(|(r1, r2)| r1.iter().zip(r2).all(|(x, y)| (x - y).is_zero()));
            if !equal {
                return Some(p);
            }
        }
        None
    }

    pub fn commutes(&self) -> bool {
        self.first_failing_square().is_none()
    }

    fn to_hom_vector(&self, basis: &HomBasis) -> SparseVec {
        let n = self.shift;
        let mut v = SparseVec::new();
        for (key, _, monos) in &basis.blocks {
            let Some(m) = self.components.get(&key.p) else { continue };
            let x = &m[key.b][key.a];
            let s = sign((n * (key.p + n)).rem_euclid(2) == 1);
            let off = basis.offsets[key];
            for (i, e) in monos.iter().enumerate() {
                let coef = x.coefficient(e);
                if !coef.is_zero() {
                    v.insert(off + i, &s * &coef);
                }
            }
        }
        v
    }
}

/// A class in `Ext^degree(source, target)` in the coordinates of an `ExtBasis`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass {
    pub source: LineBundleComplex,
    pub target: LineBundleComplex,
    pub degree: i64,
    pub coordinates: Vec<Rational>,
}

impl ExtClass {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(|x| x.is_zero())
    }
}

/// A canonical basis of `Ext^n(c, d)` by cocycles of the global Hom complex.
///
/// Representatives are the reduced echelon form of cocycles modulo
/// coboundaries, so each one is labelled by its leading monomial.
pub struct ExtBasis {
    source: LineBundleComplex,
    target: LineBundleComplex,
    degree: i64,
    basis: HomBasis,
    differential: SparseMatrix,
    boundaries: Rref,
    reps: Rref,
}

/// A basis element with its labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtBasisElement {
    /// Leading monomial of the representative, e.g. `t^2 v`.
    pub label: String,
    /// The `u, v` part of the leading monomial, e.g. `v` or `1`.
    pub uv_label: String,
    /// Source degree of the component carrying the leading monomial.
    pub component: i64,
}

impl ExtBasis {
    pub fn new(
        c: &LineBundleComplex,
        d: &LineBundleComplex,
        n: i64,
        cutoff: usize,
    ) -> Result<Self, CurveError> {
        let dim = ext_dims_range(c, d, n, n, cutoff)?.get(n);
        let prev = HomBasis::new(c, d, n - 1);
        let basis = HomBasis::new(c, d, n);
        let next_basis = HomBasis::new(c, d, n + 1);
        let d_in = hom_differential(c, d, &prev, &basis);
        let differential = hom_differential(c, d, &basis, &next_basis);
        let boundaries = Rref::new(basis.dim, d_in.transpose().data_rows());
        let cocycles = kernel_basis(&differential);
        let reduced: Vec<SparseVec> = cocycles
            .vectors
            .iter()
            .map(|v| boundaries.reduce(&dense_to_sparse(v)))
            .collect();
        let reps = Rref::new(basis.dim, reduced);
        if reps.rank() != dim {
            return Err(CurveError::GlobalSectionsMismatch {
                degree: n,
                global: reps.rank(),
                cech: dim,
            });
        }
        Ok(ExtBasis {
            source: c.clone(),
            target: d.clone(),
            degree: n,
            basis,
            differential,
            boundaries,
            reps,
        })
    }

    pub fn dim(&self) -> usize {
        self.reps.rank()
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn elements(&self) -> Vec<ExtBasisElement> {
        self.reps
            .pivot_cols()
            .into_iter()
            .map(|pc| {
                let (key, e) = self.basis.describe(pc);
                ExtBasisElement {
                    label: monomial_string(&e),
                    uv_label: monomial_string(&[0, 0, e[2], e[3]]),
                    component: key.p,
                }
            })
            .collect()
    }

    /// The `i`-th basis class.
    pub fn class(&self, i: usize) -> ExtClass {
        let mut coordinates = vec![Rational::zero(); self.dim()];
        coordinates[i] = Rational::one();
        self.make_class(coordinates)
    }

    fn make_class(&self, coordinates: Vec<Rational>) -> ExtClass {
        ExtClass {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            coordinates,
        }
    }

    /// The `i`-th representative as a ladder on the stored complexes.
    pub fn representative(&self, i: usize) -> ChainMap {
        let (_, row) = &self.reps.rows()[i];
        self.ladder_from_vector(row)
    }

    fn ladder_from_vector(&self, v: &SparseVec) -> ChainMap {
        let n = self.degree;
        let mut components: BTreeMap<i64, RingMatrix> = BTreeMap::new();
        for (key, bideg, monos) in &self.basis.blocks {
            let off = self.basis.offsets[key];
            let s = sign((n * (key.p + n)).rem_euclid(2) == 1);
            let x = CurveRingElement::from_terms(
                *bideg,
                monos
                    .iter()
                    .enumerate()
                    .filter_map(|(i, e)| v.get(&(off + i)).map(|c| (*e, &s * c))),
            )
            .expect("basis monomials have the block bidegree");
            let m = components
                .entry(key.p)
                .or_insert_with(|| zero_matrix(self.source.term(key.p), self.target.term(key.p + n)));
            m[key.b][key.a] = x;
        }
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            shift: n,
            components,
        }
    }

    /// Coordinates of the class of a ladder `source → target[degree]`.
    pub fn coordinates(&self, f: &ChainMap) -> Result<ExtClass, CurveError> {
        if f.shift != self.degree
            || !f.source.agrees_with(&self.source)
            || !f.target.agrees_with(&self.target)
        {
            return Err(CurveError::IncompatibleLadders(
                "ladder does not match the complexes of this basis".to_string(),
            ));
        }
        let z = f.to_hom_vector(&self.basis);
        let dz = self
            .differential
            .mul_vec(&sparse_to_dense(&z, self.basis.dim))
            .map_err(CurveError::Linalg)?;
        if dz.iter().any(|x| !x.is_zero()) {
            return Err(CurveError::NotACocycle);
        }
        let z1 = self.boundaries.reduce(&z);
        let coords: Vec<Rational> = self
            .reps
            .rows()
            .iter()
            .map(|(pc, _)| z1.get(pc).cloned().unwrap_or_else(Rational::zero))
            .collect();
        let mut residual = z1;
        for ((_, row), a) in self.reps.rows().iter().zip(&coords) {
            for (&col, x) in row {
                let slot = residual.entry(col).or_insert_with(Rational::zero);
                *slot -= a * x;
                if slot.is_zero() {
                    residual.remove(&col);
                }
            }
        }
        if !residual.is_empty() {
            return Err(CurveError::NotACocycle);
        }
        Ok(self.make_class(coords))
    }

    /// Lifts a class to a ladder from its leading component, solving one
    /// square at a time downwards with the smallest-support solution.
    pub fn lift(&self, x: &ExtClass) -> Result<ChainMap, CurveError> {
        if x.coordinates.len() != self.dim() || x.degree != self.degree {
            return Err(CurveError::IncompatibleLadders(
                "class does not belong to this basis".to_string(),
            ));
        }
        let mut v = SparseVec::new();
        for ((_, row), a) in self.reps.rows().iter().zip(&x.coordinates) {
            for (&col, y) in row {
                let slot = v.entry(col).or_insert_with(Rational::zero);
                *slot += a * y;
                if slot.is_zero() {
                    v.remove(&col);
                }
            }
        }
        let rep = self.ladder_from_vector(&v);
        lift_from_top(&rep)
    }
}

trait DataRows {
    fn data_rows(&self) -> Vec<SparseVec>;
}

impl DataRows for SparseMatrix {
    fn data_rows(&self) -> Vec<SparseVec> {
        (0..self.rows()).map(|r| self.row(r).clone()).collect()
    }
}

fn dense_to_sparse(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

fn sparse_to_dense(v: &SparseVec, n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (&i, x) in v {
        out[i] = x.clone();
    }
    out
}

/// Keeps the highest nonzero component of `rep` and re-solves every lower
/// square.
fn lift_from_top(rep: &ChainMap) -> Result<ChainMap, CurveError> {
    let n = rep.shift;
    let src = &rep.source;
    let tgt = &rep.target;
    let Some((&top, top_m)) = rep
        .components
        .iter()
        .rev()
        .find(|(_, m)| m.iter().any(|r| r.iter().any(|x| !x.is_zero())))
    else {
        return Ok(ChainMap {
            source: src.clone(),
            target: tgt.clone(),
            shift: n,
            components: BTreeMap::new(),
        });
    };
    let mut components = BTreeMap::new();
    components.insert(top, top_m.clone());
    let mut p = top - 1;
    while src.has_term(p) && tgt.has_term(p + n) {
        let above = &components[&(p + 1)];
        let rhs = compose(above, &src.diff_matrix(p));
        let g = solve_square(&tgt.diff_matrix(p + n), &rhs, src.term(p), tgt.term(p + n))
            .map_err(|_| CurveError::LiftFailed(p))?;
        components.insert(p, g);
        p -= 1;
    }
    let f = ChainMap {
        source: src.clone(),
        target: tgt.clone(),
        shift: n,
        components,
    };
    match f.first_failing_square() {
        None => Ok(f),
        Some(p) => Err(CurveError::LiftFailed(p)),
    }
}

/// Solves `dd ∘ g = rhs` for `g: src_terms → tgt_terms`.
fn solve_square(
    dd: &RingMatrix,
    rhs: &RingMatrix,
    src_terms: &[(i64, i64)],
    tgt_terms: &[(i64, i64)],
) -> Result<RingMatrix, LinalgError> {
    // unknowns: blocks (a, b) in order, monomials of each block
    let mut unknowns: Vec<(usize, usize, Exps)> = Vec::new();
    for (a, sa) in src_terms.iter().enumerate() {
        for (b, tb) in tgt_terms.iter().enumerate() {
            for e in sections_curve(tb.0 - sa.0, tb.1 - sa.1) {
                unknowns.push((a, b, e));
            }
        }
    }
    // equations: (a, b2, monomial) entries of the product
    let mut eq_index: HashMap<(usize, usize, Exps), usize> = HashMap::new();
    let mut trip = Vec::new();
    for (col, (a, b, e)) in unknowns.iter().enumerate() {
        let x = CurveRingElement::monomial(*e);
        for (b2, row) in dd.iter().enumerate() {
            for (m, coef) in (&row[*b] * &x).terms() {
                let n = eq_index.len();
                let r = *eq_index.entry((*a, b2, *m)).or_insert(n);
                trip.push((r, col, coef.clone()));
            }
        }
    }
    for (b2, row) in rhs.iter().enumerate() {
        for (a, y) in row.iter().enumerate() {
            for (m, _) in y.terms() {
                let n = eq_index.len();
                eq_index.entry((a, b2, *m)).or_insert(n);
            }
        }
    }
    let mut b = vec![Rational::zero(); eq_index.len()];
    for (b2, row) in rhs.iter().enumerate() {
        for (a, y) in row.iter().enumerate() {
            for (m, coef) in y.terms() {
                b[eq_index[&(a, b2, *m)]] = coef.clone();
            }
        }
    }
    let mat = SparseMatrix::from_triplets(eq_index.len(), unknowns.len(), trip)?;
    let x = solve(&mat, &b)?;
    let mut g = zero_matrix(src_terms, tgt_terms);
    for ((a, bb, e), c) in unknowns.iter().zip(x) {
        if !c.is_zero() {
            let t = CurveRingElement::term(*e, c);
            g[*bb][*a] = &g[*bb][*a] + &t;
        }
    }
    Ok(g)
}

/// Lifts a class to a commuting ladder on the stored complexes.
pub fn lift_to_chain_map(basis: &ExtBasis, x: &ExtClass) -> Result<ChainMap, CurveError> {
    basis.lift(x)
}

/// `f ∘ g` for `g: A → B[m]` and `f: B → C[n]`; `g`'s target and `f`'s source
/// may be different truncations of the same complex.
pub fn compose_ladders(f: &ChainMap, g: &ChainMap) -> Result<ChainMap, CurveError> {
    if !g.target.agrees_with(&f.source) {
        return Err(CurveError::IncompatibleLadders(
            "target of the first map is not the source of the second".to_string(),
        ));
    }
    let m = g.shift;
    let mut components = BTreeMap::new();
    for (&p, gp) in &g.components {
        let Some(fp) = f.components.get(&(p + m)) else { continue };
        components.insert(p, compose(fp, gp));
    }
    Ok(ChainMap {
        source: g.source.clone(),
        target: f.target.clone(),
        shift: m + f.shift,
        components,
    })
}

/// The class of `f ∘ g` (apply `g` first) in the given basis.
pub fn yoneda_compose(f: &ChainMap, g: &ChainMap, basis: &ExtBasis) -> Result<ExtClass, CurveError> {
    basis.coordinates(&compose_ladders(f, g)?)
}

/// Mapping cone of `f: c → d[n]`, with `cone^k = d^{k+n} ⊕ c^{k+1}` and
/// differential `[[d_d, f], [0, -d_c]]`.
pub fn cone(f: &ChainMap) -> Result<LineBundleComplex, CurveError> {
    if !f.commutes() {
        return Err(CurveError::MalformedChainMap("ladder squares do not commute".to_string()));
    }
    let (c, d, n) = (&f.source, &f.target, f.shift);
    let mut lows = Vec::new();
    if d.is_truncated() {
        lows.push(d.lowest() - n);
    }
    if c.is_truncated() {
        lows.push(c.lowest() - 1);
    }
    let k_min = lows.iter().copied().max();
    let lo = (d.lowest() - n).min(c.lowest() - 1).max(k_min.unwrap_or(i64::MIN));
    let hi = (d.highest() - n).max(c.highest() - 1);
    let mut terms = BTreeMap::new();
    for k in lo..=hi {
        let mut v: Vec<(i64, i64)> = d.term(k + n).to_vec();
        v.extend_from_slice(c.term(k + 1));
        terms.insert(k, v);
    }
    let minus_one = -Rational::one();
    let mut diffs = BTreeMap::new();
    for k in lo..hi {
        let d_top = d.diff_matrix(k + n);
        let f_k = f.component(k + 1);
        let d_bot = c.diff_matrix(k + 1);
        let (nd0, nc0) = (d.term(k + n).len(), c.term(k + 1).len());
        let (nd1, nc1) = (d.term(k + n + 1).len(), c.term(k + 2).len());
        let src: Vec<(i64, i64)> = terms[&k].clone();
        let tgt: Vec<(i64, i64)> = terms[&(k + 1)].clone();
        let mut m = zero_matrix(&src, &tgt);
        for b in 0..nd1 {
            for a in 0..nd0 {
                m[b][a] = d_top[b][a].clone();
            }
            for a in 0..nc0 {
                m[b][nd0 + a] = f_k[b][a].clone();
            }
        }
        for b in 0..nc1 {
            for a in 0..nc0 {
                m[nd1 + b][nd0 + a] = d_bot[b][a].scale(&minus_one);
            }
        }
        diffs.insert(k, m);
    }
    LineBundleComplex::new(terms, diffs, k_min)
}
