//! Ext through the total complex of Čech cochains of the sheaf Hom complex.
//!
//! The cover is the four standard charts `{s≠0 or t≠0} × {u≠0 or v≠0}` of
//! `P¹ × P¹`, restricted to the curve. Localized section spaces are infinite,
//! but every complex here has monomial differentials, so the whole Čech–Hom
//! complex is graded by a weight in `Z⁴` (exponents of `s, t, u, v` shifted
//! by a per-summand offset) and splits into finite pieces, one per weight.
//! Keeping the pieces with all weight coordinates in `[-cutoff, cutoff]`
//! gives a direct summand, so the truncated cohomology only ever undercounts;
//! stability under `cutoff + 2` is required before a number is reported.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::One;

use super::complex::LineBundleComplex;
use super::ring::Exps;
use super::CurveError;
use crate::exact_linalg::{cohomology_dim_at, LinalgError, Rational, SparseMatrix};
use crate::GradedDims;

type Weight = [i64; 4];

// Charts in order (s,u), (s,v), (t,u), (t,v); a bit per inverted variable.
const CHART_MASKS: [u8; 4] = [0b0101, 0b1001, 0b0110, 0b1010];

struct Simplex {
    charts: Vec<usize>,
    mask: u8,
}

fn simplices() -> Vec<Vec<Simplex>> {
    let mut by_dim: Vec<Vec<Simplex>> = (0..4).map(|_| Vec::new()).collect();
    for bits in 1u8..16 {
        let charts: Vec<usize> = (0..4).filter(|i| bits & (1 << i) != 0).collect();
        let mask = charts.iter().fold(0, |m, &c| m | CHART_MASKS[c]);
        by_dim[charts.len() - 1].push(Simplex { charts, mask });
    }
    for v in by_dim.iter_mut() {
        v.sort_by(|a, b| a.charts.cmp(&b.charts));
    }
    by_dim
}

/// Is `s^e0 t^e1 u^e2 v^e3` a non-zero basis monomial of the localized ring?
fn valid(e: &Weight, mask: u8) -> bool {
    for (var, &x) in e.iter().enumerate() {
        if mask & (1 << var) == 0 && x < 0 {
            return false;
        }
    }
    let s_inv = mask & 1 != 0;
    let u_inv = mask & 4 != 0;
    match (s_inv, u_inv) {
        (true, true) => false,
        (true, false) => e[2] == 0,
        (false, true) => e[0] <= 1,
        (false, false) => e[0] <= 1 || e[2] == 0,
    }
}

fn exps_i64(e: &Exps) -> Weight {
    [e[0] as i64, e[1] as i64, e[2] as i64, e[3] as i64]
}

/// Assigns to every summand a weight so that each monomial entry `x` of a
/// differential satisfies `w(target) = w(source) + exps(x)`.
pub(crate) fn summand_weights(
    c: &LineBundleComplex,
) -> Result<HashMap<(i64, usize), Weight>, CurveError> {
    let mut edges: HashMap<(i64, usize), Vec<((i64, usize), Weight, bool)>> = HashMap::new();
    for (&k, _) in c.terms() {
        if let Some(m) = c.diff(k) {
            for (b, row) in m.iter().enumerate() {
                for (a, x) in row.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let (e, _) = x.as_monomial().ok_or_else(|| {
                        CurveError::NonMonomial(format!("entry ({b},{a}) out of degree {k} is {x}"))
                    })?;
                    let w = exps_i64(&e);
                    edges.entry((k, a)).or_default().push(((k + 1, b), w, true));
                    edges.entry((k + 1, b)).or_default().push(((k, a), w, false));
                }
            }
        }
    }
    let mut weights: HashMap<(i64, usize), Weight> = HashMap::new();
    for (&k, v) in c.terms() {
        for a in 0..v.len() {
            if weights.contains_key(&(k, a)) {
                continue;
            }
            weights.insert((k, a), [0; 4]);
            let mut queue = VecDeque::from([(k, a)]);
            while let Some(node) = queue.pop_front() {
                let w0 = weights[&node];
                for (next, e, forward) in edges.get(&node).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let mut w = w0;
                    for i in 0..4 {
                        w[i] += if *forward { e[i] } else { -e[i] };
                    }
                    match weights.get(next) {
                        Some(old) if *old != w => {
                            return Err(CurveError::NonMonomial(format!(
                                "differentials around degree {} admit no consistent monomial grading",
                                next.0
                            )))
                        }
                        Some(_) => {}
                        None => {
                            weights.insert(*next, w);
                            queue.push_back(*next);
                        }
                    }
                }
            }
        }
    }
    Ok(weights)
}

struct HomSummand {
    p: i64,
    a: usize,
    q: i64,
    b: usize,
    bideg: (i64, i64),
    offset: Weight,
}

struct Model<'a> {
    c: &'a LineBundleComplex,
    d: &'a LineBundleComplex,
    wc: HashMap<(i64, usize), Weight>,
    wd: HashMap<(i64, usize), Weight>,
    simplices: Vec<Vec<Simplex>>,
    cutoff: i64,
}

type Key = (usize, usize, usize, i64, i64); // (simplex dim, simplex idx, hom summand, e0, e2)

struct DegreeBasis {
    summands: Vec<HomSummand>,
    by_summand: HashMap<(i64, usize, i64, usize), usize>,
    index: HashMap<Key, usize>,
    elements: Vec<(usize, usize, usize, Weight)>,
}

impl<'a> Model<'a> {
    fn hom_summands(&self, k: i64) -> Vec<HomSummand> {
        let mut out = Vec::new();
        for (&p, src) in self.c.terms() {
            let q = p + k;
            let tgt = self.d.term(q);
            for (a, sa) in src.iter().enumerate() {
                for (b, tb) in tgt.iter().enumerate() {
                    let wd = self.wd[&(q, b)];
                    let wc = self.wc[&(p, a)];
                    out.push(HomSummand {
                        p,
                        a,
                        q,
                        b,
                        bideg: (tb.0 - sa.0, tb.1 - sa.1),
                        offset: [wd[0] - wc[0], wd[1] - wc[1], wd[2] - wc[2], wd[3] - wc[3]],
                    });
                }
            }
        }
        out
    }

    fn basis(&self, n: i64) -> DegreeBasis {
        let mut basis = DegreeBasis {
            summands: Vec::new(),
            by_summand: HashMap::new(),
            index: HashMap::new(),
            elements: Vec::new(),
        };
        let cut = self.cutoff;
        for i in 0..4usize {
            let k = n - i as i64;
            for h in self.hom_summands(k) {
                let hi = basis.summands.len();
                basis.by_summand.insert((h.p, h.a, h.q, h.b), hi);
                for (si, sx) in self.simplices[i].iter().enumerate() {
                    if sx.mask & 0b0101 == 0b0101 {
                        continue;
                    }
                    let (alpha, beta) = h.bideg;
                    for e0 in (h.offset[0] - cut)..=(h.offset[0] + cut) {
                        let e1 = alpha - e0;
                        if (e1 - h.offset[1]).abs() > cut {
                            continue;
                        }
                        for e2 in (h.offset[2] - cut)..=(h.offset[2] + cut) {
                            let e3 = beta - e2;
                            if (e3 - h.offset[3]).abs() > cut {
                                continue;
                            }
                            let e = [e0, e1, e2, e3];
                            if valid(&e, sx.mask) {
                                let idx = basis.elements.len();
                                basis.index.insert((i, si, hi, e0, e2), idx);
                                basis.elements.push((i, si, hi, e));
                            }
                        }
                    }
                }
                basis.summands.push(h);
            }
        }
        basis
    }

    /// Total differential `δ + (-1)^i d_Hom` from degree `n` (basis `src`) to `n+1` (basis `tgt`).
    fn differential(&self, n: i64, src: &DegreeBasis, tgt: &DegreeBasis) -> SparseMatrix {
        let mut trip: Vec<(usize, usize, Rational)> = Vec::new();
        let one = Rational::one();
        for (col, (i, si, hi, e)) in src.elements.iter().enumerate() {
            let (i, si, hi) = (*i, *si, *hi);
            let sx = &self.simplices[i][si];
            let h = &src.summands[hi];
            let k = n - i as i64;
            // Čech part
            if i < 3 {
                for j in 0..4 {
                    if sx.charts.contains(&j) {
                        continue;
                    }
                    let mut charts = sx.charts.clone();
                    charts.push(j);
                    charts.sort();
                    let pos = charts.iter().position(|&x| x == j).unwrap();
                    let mask = sx.mask | CHART_MASKS[j];
                    if !valid(e, mask) {
                        continue;
                    }
                    let ti = self.simplices[i + 1]
                        .iter()
                        .position(|s| s.charts == charts)
                        .unwrap();
                    let th = tgt.by_summand[&(h.p, h.a, h.q, h.b)];
                    if let Some(&row) = tgt.index.get(&(i + 1, ti, th, e[0], e[2])) {
                        let sign = if pos % 2 == 0 { one.clone() } else { -one.clone() };
                        trip.push((row, col, sign));
                    }
                }
            }
            let hom_sign = if i % 2 == 0 { one.clone() } else { -one.clone() };
            // post-composition with the target differential
            if let Some(m) = self.d.diff(h.q) {
                for (b2, row) in m.iter().enumerate() {
                    let x = &row[h.b];
                    if let Some((xe, coef)) = x.as_monomial() {
                        let e2 = add(e, &xe);
                        if !valid(&e2, sx.mask) {
                            continue;
                        }
                        if let Some(&th) = tgt.by_summand.get(&(h.p, h.a, h.q + 1, b2)) {
                            if let Some(&r) = tgt.index.get(&(i, si, th, e2[0], e2[2])) {
                                trip.push((r, col, &hom_sign * coef));
                            }
                        }
                    }
                }
            }
            // pre-composition with the source differential, sign -(-1)^k
            if let Some(m) = self.c.diff(h.p - 1) {
                let pre_sign = if k.rem_euclid(2) == 0 { -one.clone() } else { one.clone() };
                for (a2, x) in m[h.a].iter().enumerate() {
                    if let Some((xe, coef)) = x.as_monomial() {
                        let e2 = add(e, &xe);
                        if !valid(&e2, sx.mask) {
                            continue;
                        }
                        if let Some(&th) = tgt.by_summand.get(&(h.p - 1, a2, h.q, h.b)) {
                            if let Some(&r) = tgt.index.get(&(i, si, th, e2[0], e2[2])) {
                                trip.push((r, col, &hom_sign * &pre_sign * coef));
                            }
                        }
                    }
                }
            }
        }
        SparseMatrix::from_triplets(tgt.elements.len(), src.elements.len(), trip)
            .expect("indices come from the bases")
    }
}

fn add(e: &Weight, x: &Exps) -> Weight {
    [
        e[0] + x[0] as i64,
        e[1] + x[1] as i64,
        e[2] + x[2] as i64,
        e[3] + x[3] as i64,
    ]
}

/// Requirements on truncation depth, see `ext_dims`.
pub(crate) fn check_depth(
    c: &LineBundleComplex,
    d: &LineBundleComplex,
    max_degree: i64,
) -> Result<(), CurveError> {
    if c.is_truncated() {
        let amplitude = (-d.highest()).max(0);
        let needed = max_degree + 2 + amplitude;
        if -c.lowest() < needed {
            return Err(CurveError::TooShallow(format!(
                "source resolution reaches degree {}, need {}",
                c.lowest(),
                -needed
            )));
        }
    }
    if d.is_truncated() && d.lowest() > c.lowest() - 4 {
        return Err(CurveError::TooShallow(format!(
            "target resolution reaches degree {}, need {}",
            d.lowest(),
            c.lowest() - 4
        )));
    }
    Ok(())
}

/// Dimensions of the truncated model in degrees `lo..=hi`, single cutoff.
pub(crate) fn ext_dims_at_cutoff(
    c: &LineBundleComplex,
    d: &LineBundleComplex,
    lo: i64,
    hi: i64,
    cutoff: usize,
) -> Result<GradedDims, CurveError> {
    let model = Model {
        c,
        d,
        wc: summand_weights(c)?,
        wd: summand_weights(d)?,
        simplices: simplices(),
        cutoff: cutoff as i64,
    };
    let bases: BTreeMap<i64, DegreeBasis> = ((lo - 1)..=(hi + 1)).map(|n| (n, model.basis(n))).collect();
    let diffs: BTreeMap<i64, SparseMatrix> = ((lo - 1)..=hi)
        .map(|n| (n, model.differential(n, &bases[&n], &bases[&(n + 1)])))
        .collect();
    let mut out = GradedDims::new();
    for n in lo..=hi {
        let h = cohomology_dim_at(&diffs[&(n - 1)], &diffs[&n]).map_err(|e| match e {
            LinalgError::CompositionNonzero => {
                CurveError::MalformedComplex(format!("total differential squares to nonzero at degree {n}"))
            }
            other => CurveError::Linalg(other),
        })?;
        out.add(n, h);
    }
    Ok(out)
}

pub(crate) const MIN_CUTOFF: usize = 2;

/// `Ext^n(c, d)` for `lo ≤ n ≤ hi`, checked for stability at `cutoff + 2`.
pub(crate) fn ext_dims_range(
    c: &LineBundleComplex,
    d: &LineBundleComplex,
    lo: i64,
    hi: i64,
    cutoff: usize,
) -> Result<GradedDims, CurveError> {
    check_depth(c, d, hi)?;
    // at cutoff 1 and 3 every piece can be empty, so the comparison below
    // would pass on a model that sees nothing
    if cutoff < MIN_CUTOFF {
        return Err(CurveError::TooShallow(format!("cutoff {cutoff} is below the minimum {MIN_CUTOFF}")));
    }
    let a = ext_dims_at_cutoff(c, d, lo, hi, cutoff)?;
    let b = ext_dims_at_cutoff(c, d, lo, hi, cutoff + 2)?;
    if a != b {
        let degree = (lo..=hi).find(|&n| a.get(n) != b.get(n)).unwrap_or(lo);
        return Err(CurveError::UnstableTruncation {
            degree,
            at_cutoff: a.get(degree),
            at_larger_cutoff: b.get(degree),
        });
    }
    Ok(a)
}

/// Dimensions of `Ext^n(c, d)` on the curve for `0 ≤ n ≤ max_degree`.
///
/// If `c` is a truncated resolution it must reach degree
/// `-(max_degree + 2 + amplitude(d))`, where the amplitude is how far `d`
/// sits below degree 0; if `d` is truncated it must reach four degrees
/// below `c`. The answer is computed at `cutoff` and at `cutoff + 2` and
/// must agree.
pub fn ext_dims(
    c: &LineBundleComplex,
    d: &LineBundleComplex,
    max_degree: usize,
    cutoff: usize,
) -> Result<GradedDims, CurveError> {
    ext_dims_range(c, d, 0, max_degree as i64, cutoff)
}
