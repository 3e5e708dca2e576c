//! Exact linear algebra over the rationals.
//!
//! Everything here is immutable: matrices are built once (from triplets or
//! dense rows) and every operation returns a fresh value. Elimination is
//! fraction-free over the integers, with rows kept primitive (content
//! divided out) and the pivot with the smallest leading coefficient kept
//! when two rows compete for the same column.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Sparse vector: column index to non-zero value.
pub type SparseVec = BTreeMap<usize, Rational>;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no solution: right-hand side is not in the image")]
    NoSolution,
    #[error("composite of consecutive differentials is nonzero")]
    CompositionNonzero,
}

/// Sparse rational matrix stored by rows. No stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![SparseVec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for (i, row) in m.data.iter_mut().enumerate() {
            row.insert(i, Rational::one());
        }
        m
    }

    /// Builds a matrix from `(row, col, value)` triplets. Repeated positions are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut m = Self::zero(rows, cols);
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinalgError::OutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            add_entry(&mut m.data[r], c, v);
        }
        Ok(m)
    }

    /// Builds a matrix from sparse rows; columns beyond `cols` are rejected.
    pub fn from_sparse_rows(cols: usize, rows: Vec<SparseVec>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.retain(|_, v| !v.is_zero());
            if let Some((&c, _)) = row.iter().next_back() {
                if c >= cols {
                    return Err(LinalgError::OutOfBounds {
                        row: r,
                        col: c,
                        rows: nrows,
                        cols,
                    });
                }
            }
            data.push(row);
        }
        Ok(SparseMatrix {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn from_dense(cols: usize, rows: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        let mut out = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            out.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect(),
            );
        }
        Self::from_sparse_rows(cols, out)
    }

    pub fn from_int_rows(cols: usize, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        Self::from_dense(cols, &dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r].get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, v)| (r, c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = SparseVec::new();
                for (&k, a) in row {
                    for (&c, b) in &rhs.data[k] {
                        add_entry(&mut acc, c, a * b);
                    }
                }
                acc
            })
            .collect();
        Ok(SparseMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Rational::zero(), |acc, (&c, a)| acc + a * &v[c])
            })
            .collect())
    }
}

fn add_entry(row: &mut SparseVec, c: usize, v: Rational) {
    if v.is_zero() {
        return;
    }
    match row.get_mut(&c) {
        Some(x) => {
            *x += v;
            if x.is_zero() {
                row.remove(&c);
            }
        }
        None => {
            row.insert(c, v);
        }
    }
}

/// A list of linearly independent vectors in `Q^ambient_dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    pub vectors: Vec<Vec<Rational>>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

// Integer rows for fraction-free elimination: sorted by column, no zeros, primitive.
type IRow = Vec<(usize, BigInt)>;

fn primitive(mut row: IRow) -> IRow {
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
    row
}

fn to_int_row(row: &SparseVec) -> IRow {
    let mut l = BigInt::one();
    for v in row.values() {
        l = l.lcm(v.denom());
    }
    let out = row
        .iter()
        .map(|(&c, v)| (c, v.numer() * (&l / v.denom())))
        .collect();
    primitive(out)
}

// row * lead(pivot) - pivot * lead(row); both rows share their leading column.
fn eliminate(pivot: &IRow, row: &IRow) -> IRow {
    let a = &pivot[0].1;
    let b = &row[0].1;
    let g = a.gcd(b);
    let fa = a / &g;
    let fb = b / &g;
    let mut out = Vec::with_capacity(pivot.len() + row.len());
    let (mut i, mut j) = (1, 1);
    while i < pivot.len() || j < row.len() {
        let ci = pivot.get(i).map(|x| x.0).unwrap_or(usize::MAX);
        let cj = row.get(j).map(|x| x.0).unwrap_or(usize::MAX);
        if cj < ci {
            out.push((cj, &row[j].1 * &fa));
            j += 1;
        } else if ci < cj {
            out.push((ci, -(&pivot[i].1 * &fb)));
            i += 1;
        } else {
            let v = &row[j].1 * &fa - &pivot[i].1 * &fb;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    primitive(out)
}

/// Incremental row echelon form keyed by pivot column.
#[derive(Default)]
struct Echelon {
    pivots: BTreeMap<usize, IRow>,
}

impl Echelon {
    fn insert(&mut self, mut row: IRow) {
        loop {
            if row.is_empty() {
                return;
            }
            let c = row[0].0;
            match self.pivots.get_mut(&c) {
                None => {
                    self.pivots.insert(c, row);
                    return;
                }
                Some(p) => {
                    if row[0].1.magnitude() < p[0].1.magnitude() {
                        std::mem::swap(p, &mut row);
                    }
                    row = eliminate(p, &row);
                }
            }
        }
    }
}

/// Reduced row echelon form over the rationals. Every row has leading entry 1
/// and vanishes at every other pivot column.
#[derive(Clone, Debug)]
pub struct Rref {
    cols: usize,
    rows: Vec<(usize, SparseVec)>,
}

impl Rref {
    pub fn new<I>(cols: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = SparseVec>,
    {
        let mut ech = Echelon::default();
        for r in rows {
            let ir = to_int_row(&r);
            ech.insert(ir);
        }
        let mut out: Vec<(usize, SparseVec)> = ech
            .pivots
            .into_iter()
            .map(|(c, row)| {
                let lead = Rational::from_integer(row[0].1.clone());
                let v: SparseVec = row
                    .into_iter()
                    .map(|(cc, x)| (cc, Rational::from_integer(x) / &lead))
                    .collect();
                (c, v)
            })
            .collect();
        // back substitution, last pivot first
        for i in (0..out.len()).rev() {
            let (pc, prow) = out[i].clone();
            for (_, row) in out.iter_mut().take(i) {
                if let Some(f) = row.get(&pc).cloned() {
                    for (&c, v) in &prow {
                        add_entry(row, c, -(&f * v));
                    }
                }
            }
        }
        Rref { cols, rows: out }
    }

    pub fn from_matrix(m: &SparseMatrix) -> Self {
        Self::new(m.cols, m.data.iter().cloned())
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.rows.iter().map(|(c, _)| *c).collect()
    }

    pub fn rows(&self) -> &[(usize, SparseVec)] {
        &self.rows
    }

    /// Subtracts multiples of the rows so the result vanishes on every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        for (pc, row) in &self.rows {
            if let Some(f) = out.get(pc).cloned() {
                for (&c, x) in row {
                    add_entry(&mut out, c, -(&f * x));
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Rank over the rationals.
pub fn rank(m: &SparseMatrix) -> usize {
    let mut ech = Echelon::default();
    for row in &m.data {
        if !row.is_empty() {
            ech.insert(to_int_row(row));
        }
    }
    ech.pivots.len()
}

/// A basis of the right kernel `{x : m x = 0}`.
pub fn kernel_basis(m: &SparseMatrix) -> SubspaceBasis {
    let r = Rref::from_matrix(m);
    let pivots: BTreeMap<usize, &SparseVec> = r.rows.iter().map(|(c, row)| (*c, row)).collect();
    let mut vectors = Vec::new();
    for f in 0..m.cols {
        if pivots.contains_key(&f) {
            continue;
        }
        let mut v = vec![Rational::zero(); m.cols];
        v[f] = Rational::one();
        for (&pc, row) in &pivots {
            if let Some(x) = row.get(&f) {
                v[pc] = -x.clone();
            }
        }
        vectors.push(v);
    }
    SubspaceBasis {
        ambient_dim: m.cols,
        vectors,
    }
}

/// Some `x` with `m x = b`. Free variables are set to zero, so the answer
/// is supported on the leftmost independent columns.
pub fn solve(m: &SparseMatrix, b: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            m.rows
        )));
    }
    let aug = m.data.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        add_entry(&mut r, m.cols, bi.clone());
        r
    });
    let r = Rref::new(m.cols + 1, aug);
    let mut x = vec![Rational::zero(); m.cols];
    for (pc, row) in &r.rows {
        if *pc == m.cols {
            return Err(LinalgError::NoSolution);
        }
        if let Some(v) = row.get(&m.cols) {
            x[*pc] = v.clone();
        }
    }
    Ok(x)
}

/// `dim ker(d_out) - rank(d_in)` for `A --d_in--> M --d_out--> B`.
///
/// Matrices act on column vectors, so `d_in` is `dim M x dim A` and
/// `d_out` is `dim B x dim M`.
pub fn cohomology_dim_at(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<usize, LinalgError> {
    if d_out.cols != d_in.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "d_in lands in dimension {}, d_out starts from dimension {}",
            d_in.rows, d_out.cols
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(LinalgError::CompositionNonzero);
    }
    let middle = d_in.rows;
    Ok(middle - rank(d_out) - rank(d_in))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(cols: usize, rows: &[Vec<i64>]) -> SparseMatrix {
        SparseMatrix::from_int_rows(cols, rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrix::identity(3)), 3);
        assert_eq!(rank(&SparseMatrix::zero(2, 2)), 0);
        assert_eq!(rank(&m(2, &[vec![1, 2], vec![2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&SparseMatrix::identity(4)).is_empty());
        assert_eq!(kernel_basis(&SparseMatrix::zero(2, 3)).dim(), 3);
        let k = kernel_basis(&m(2, &[vec![1, 1]]));
        assert_eq!(k.dim(), 1);
        let v = &k.vectors[0];
        assert_eq!(&v[0], &-v[1].clone());
        assert!(!v[0].is_zero());
    }

    #[test]
    fn solve_examples() {
        let b = vec![q(3), q(-1)];
        assert_eq!(solve(&SparseMatrix::identity(2), &b).unwrap(), b);
        assert_eq!(
            solve(&SparseMatrix::zero(2, 2), &[q(1), q(0)]),
            Err(LinalgError::NoSolution)
        );
        let x = solve(&m(1, &[vec![2]]), &[q(1)]).unwrap();
        assert_eq!(x, vec![Rational::new(BigInt::from(1), BigInt::from(2))]);
    }

    #[test]
    fn cohomology_examples() {
        let z5 = SparseMatrix::zero(5, 0);
        let out = SparseMatrix::zero(0, 5);
        assert_eq!(cohomology_dim_at(&z5, &out).unwrap(), 5);
        let id = SparseMatrix::identity(3);
        assert_eq!(cohomology_dim_at(&id, &SparseMatrix::zero(2, 3)).unwrap(), 0);
        // d_in has rank 1, d_out kills a plane
        let d_in = m(1, &[vec![1], vec![0], vec![0]]);
        let d_out = m(3, &[vec![0, 0, 1]]);
        assert_eq!(cohomology_dim_at(&d_in, &d_out).unwrap(), 1);
        let bad = m(3, &[vec![1, 0, 0]]);
        assert_eq!(
            cohomology_dim_at(&d_in, &bad),
            Err(LinalgError::CompositionNonzero)
        );
    }

    #[test]
    fn triplets_sum_and_bounds() {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 0, q(1)), (0, 0, q(-1)), (1, 1, q(2))])
            .unwrap();
        assert_eq!(a.nnz(), 1);
        assert!(SparseMatrix::from_triplets(1, 1, vec![(1, 0, q(1))]).is_err());
    }

    #[test]
    fn rref_reduce_and_contains() {
        let r = Rref::new(
            3,
            vec![
                [(0, q(2)), (1, q(4))].into_iter().collect(),
                [(1, q(1)), (2, q(1))].into_iter().collect(),
            ],
        );
        assert_eq!(r.rank(), 2);
        assert_eq!(r.pivot_cols(), vec![0, 1]);
        let v: SparseVec = [(0, q(1)), (2, q(-2))].into_iter().collect();
        assert!(r.contains(&v));
        let w: SparseVec = [(2, q(1))].into_iter().collect();
        assert!(!r.contains(&w));
    }

    #[test]
    fn product_and_transpose() {
        let a = m(2, &[vec![1, 2], vec![0, 1]]);
        let b = m(2, &[vec![1, -2], vec![0, 1]]);
        assert_eq!(a.mul(&b).unwrap(), SparseMatrix::identity(2));
        assert_eq!(a.transpose().get(1, 0), q(2));
        assert_eq!(a.mul_vec(&[q(1), q(1)]).unwrap(), vec![q(3), q(1)]);
    }
}
