//! Exceptional collections on the level of Euler forms.
//!
//! An `EulerLattice` is an ordered list of classes in a free lattice with a
//! (non-symmetric) bilinear form. Mutations act on the classes by
//! `[L_E F] = [F] - χ(E,F)[E]` and `[R_F E] = [E] - χ(E,F)[F]`; the Gram
//! matrix is always recomputed from the classes. The Ext tables of the
//! threefold collection ship with the crate in `data/` together with a
//! checksum.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::GradedDims;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MutationError {
    #[error("position {index} out of range for a collection of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("Gram matrix is not unitriangular after {0}")]
    TriangularityLost(String),
    #[error("missing row '{0}'")]
    MissingRow(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("checksum mismatch for {which}: expected {expected}, found {found}")]
    ChecksumMismatch {
        which: String,
        expected: String,
        found: String,
    },
    #[error("bad data: {0}")]
    Data(String),
    #[error("bad script line {line}: '{text}'")]
    Script { line: usize, text: String },
}

/// `Σ (-1)^n dim_n`.
pub fn euler_from_dims(d: &GradedDims) -> i64 {
    d.euler()
}

/// A class over the basis of a lattice, optionally named.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeVector {
    pub coords: Vec<i64>,
    pub label: Option<String>,
}

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector { coords, label: None }
    }

    pub fn named(coords: Vec<i64>, label: &str) -> Self {
        LatticeVector {
            coords,
            label: Some(label.to_string()),
        }
    }

    fn axpy(&self, c: i64, other: &LatticeVector) -> Vec<i64> {
        self.coords.iter().zip(&other.coords).map(|(x, y)| x - c * y).collect()
    }
}

/// An ordered collection of classes with the Euler form of the ambient lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerLattice {
    labels: Vec<String>,
    classes: Vec<Vec<i64>>,
    form: Vec<Vec<i64>>,
}

impl EulerLattice {
    /// A collection that is its own basis, with `gram[i][j] = χ(E_i, E_j)`.
    pub fn from_gram(labels: Vec<String>, gram: Vec<Vec<i64>>) -> Result<Self, MutationError> {
        let n = labels.len();
        if gram.len() != n || gram.iter().any(|r| r.len() != n) {
            return Err(MutationError::DimensionMismatch(format!(
                "{n} labels but Gram matrix is not {n}x{n}"
            )));
        }
        let classes = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Ok(EulerLattice {
            labels,
            classes,
            form: gram,
        })
    }

    /// Classes over a basis with Euler form `form`.
    pub fn with_classes(
        labels: Vec<String>,
        classes: Vec<Vec<i64>>,
        form: Vec<Vec<i64>>,
    ) -> Result<Self, MutationError> {
        let r = form.len();
        if form.iter().any(|row| row.len() != r)
            || classes.len() != labels.len()
            || classes.iter().any(|c| c.len() != r)
        {
            return Err(MutationError::DimensionMismatch("classes do not match the form".into()));
        }
        Ok(EulerLattice { labels, classes, form })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn classes(&self) -> &[Vec<i64>] {
        &self.classes
    }

    pub fn form(&self) -> &[Vec<i64>] {
        &self.form
    }

    pub fn class(&self, i: usize) -> LatticeVector {
        LatticeVector::named(self.classes[i].clone(), &self.labels[i])
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `χ(x, y)` for classes over the basis.
    pub fn chi(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                s += xi * self.form[i][j] * yj;
            }
        }
        s
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        self.classes
            .iter()
            .map(|x| self.classes.iter().map(|y| self.chi(x, y)).collect())
            .collect()
    }

    pub fn gram_entry(&self, i: usize, j: usize) -> i64 {
        self.chi(&self.classes[i], &self.classes[j])
    }

    pub fn is_unitriangular(&self) -> bool {
        let g = self.gram();
        (0..g.len()).all(|i| g[i][i] == 1 && (0..i).all(|j| g[i][j] == 0))
    }

    /// Same classes in a new order, given by labels.
    pub fn reordered(&self, order: &[&str]) -> Result<Self, MutationError> {
        if order.len() != self.size() {
            return Err(MutationError::DimensionMismatch("order must list every object once".into()));
        }
        let mut labels = Vec::new();
        let mut classes = Vec::new();
        for l in order {
            let i = self.index_of(l).ok_or_else(|| MutationError::MissingRow(l.to_string()))?;
            labels.push(self.labels[i].clone());
            classes.push(self.classes[i].clone());
        }
        let out = EulerLattice {
            labels,
            classes,
            form: self.form.clone(),
        };
        if !out.is_unitriangular() {
            return Err(MutationError::TriangularityLost(format!("reordering to {order:?}")));
        }
        Ok(out)
    }

    fn check_pair(&self, i: usize) -> Result<(), MutationError> {
        if i + 1 >= self.size() {
            return Err(MutationError::IndexOutOfRange {
                index: i,
                size: self.size(),
            });
        }
        Ok(())
    }

    /// Gram determinant, exact.
    pub fn gram_determinant(&self) -> i128 {
        determinant(&self.gram())
    }
}

impl fmt::Display for EulerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.gram();
        let w = self.labels.iter().map(|l| l.len()).max().unwrap_or(1).max(3);
        write!(f, "{:w$}", "")?;
        for l in &self.labels {
            write!(f, " {l:>w$}")?;
        }
        writeln!(f)?;
        for (l, row) in self.labels.iter().zip(&g) {
            write!(f, "{l:w$}")?;
            for x in row {
                write!(f, " {x:>w$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn primed(label: &str) -> String {
    format!("{label}'")
}

/// Swaps positions `i, i+1`; the object at `i+1` is mutated to the left of
/// the one at `i` and lands at position `i`.
pub fn left_mutate(lat: &EulerLattice, i: usize) -> Result<EulerLattice, MutationError> {
    lat.check_pair(i)?;
    let e = lat.class(i);
    let f = lat.class(i + 1);
    let c = lat.chi(&e.coords, &f.coords);
    let mut out = lat.clone();
    out.classes[i] = f.axpy(c, &e);
    out.labels[i] = primed(&lat.labels[i + 1]);
    out.classes[i + 1] = e.coords;
    out.labels[i + 1] = lat.labels[i].clone();
    if !out.is_unitriangular() {
        return Err(MutationError::TriangularityLost(format!("left mutation at {i}")));
    }
    Ok(out)
}

/// Swaps positions `i, i+1`; the object at `i` is mutated to the right of
/// the one at `i+1` and lands at position `i+1`.
pub fn right_mutate(lat: &EulerLattice, i: usize) -> Result<EulerLattice, MutationError> {
    lat.check_pair(i)?;
    let e = lat.class(i);
    let f = lat.class(i + 1);
    let c = lat.chi(&e.coords, &f.coords);
    let mut out = lat.clone();
    out.classes[i + 1] = e.axpy(c, &f);
    out.labels[i + 1] = primed(&lat.labels[i]);
    out.classes[i] = f.coords;
    out.labels[i] = lat.labels[i + 1].clone();
    if !out.is_unitriangular() {
        return Err(MutationError::TriangularityLost(format!("right mutation at {i}")));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    L,
    R,
}

/// A sequence of mutations, executed in order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationScript {
    pub steps: Vec<(Direction, usize)>,
}

impl MutationScript {
    /// One `L <i>` or `R <i>` per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, MutationError> {
        let mut steps = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || MutationError::Script {
                line: n + 1,
                text: raw.to_string(),
            };
            let mut parts = line.split_whitespace();
            let dir = match parts.next() {
                Some("L") | Some("l") => Direction::L,
                Some("R") | Some("r") => Direction::R,
                _ => return Err(bad()),
            };
            let i: usize = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            steps.push((dir, i));
        }
        Ok(MutationScript { steps })
    }

    pub fn run(&self, lat: &EulerLattice) -> Result<EulerLattice, MutationError> {
        let mut cur = lat.clone();
        for &(d, i) in &self.steps {
            cur = match d {
                Direction::L => left_mutate(&cur, i)?,
                Direction::R => right_mutate(&cur, i)?,
            };
        }
        Ok(cur)
    }
}

/// True iff `L_i L_{i+1} L_i` and `L_{i+1} L_i L_{i+1}` give the same classes.
pub fn verify_braid(lat: &EulerLattice, i: usize) -> bool {
    let run = |seq: [usize; 3]| -> Option<Vec<Vec<i64>>> {
        let mut cur = lat.clone();
        for j in seq {
            cur = left_mutate(&cur, j).ok()?;
        }
        Some(cur.classes)
    };
    if i + 2 >= lat.size() {
        return false;
    }
    match (run([i, i + 1, i]), run([i + 1, i, i + 1])) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

/// A random upper unitriangular integer Gram matrix with off-diagonal
/// entries in `[-bound, bound]`.
pub fn random_unitriangular_gram<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Less => rng.gen_range(-bound..=bound),
                    std::cmp::Ordering::Greater => 0,
                })
                .collect()
        })
        .collect()
}

/// `[T_K(E)] = [E] - χ(K, E)[K]`.
pub fn spherical_twist_class(lat: &EulerLattice, k: &LatticeVector, e: &LatticeVector) -> LatticeVector {
    let c = lat.chi(&k.coords, &e.coords);
    LatticeVector {
        coords: e.axpy(c, k),
        label: e.label.as_ref().map(|l| format!("T({l})")),
    }
}

fn determinant(m: &[Vec<i64>]) -> i128 {
    // Bareiss elimination
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

/// One transcribed table of Ext dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTable {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: Vec<Vec<GradedDims>>,
}

impl ExtTable {
    pub fn get(&self, row: &str, col: &str) -> Option<&GradedDims> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.cols.iter().position(|x| x == col)?;
        self.cells.get(r)?.get(c)
    }

    fn validate(&self, name: &str) -> Result<(), MutationError> {
        if self.cells.len() != self.rows.len() || self.cells.iter().any(|r| r.len() != self.cols.len()) {
            return Err(MutationError::Data(format!("table '{name}' has ragged cells")));
        }
        Ok(())
    }
}

/// Expected Ext dimensions between objects after the replayed mutations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTarget {
    pub source: String,
    pub target: String,
    pub dims: GradedDims,
}

/// The shipped Ext tables of the threefold collection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTables {
    pub version: u32,
    /// `Ext(A, B)` between members of the collection, rows `A`.
    pub exceptional: ExtTable,
    /// `Ext(A, N)` from members to objects contracted by the resolution.
    pub into_null: ExtTable,
    /// `Ext(N, B)` from contracted objects to members.
    pub from_null: ExtTable,
    pub resolution_targets: Vec<PairTarget>,
}

pub const EMBEDDED_TABLES: &str = include_str!("../data/ext_tables.json");
pub const EMBEDDED_CHECKSUMS: &str = include_str!("../data/ext_tables.sha256");

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl ExtTables {
    /// Tables compiled into the binary, checksum-verified.
    pub fn embedded() -> Result<Self, MutationError> {
        Self::from_sources(EMBEDDED_TABLES, EMBEDDED_CHECKSUMS)
    }

    /// Reads `ext_tables.json` and `ext_tables.sha256` from a directory.
    pub fn load_dir(dir: &Path) -> Result<Self, MutationError> {
        let read = |name: &str| {
            fs::read_to_string(dir.join(name))
                .map_err(|e| MutationError::Data(format!("{}: {e}", dir.join(name).display())))
        };
        Self::from_sources(&read("ext_tables.json")?, &read("ext_tables.sha256")?)
    }

    /// Parses the tables and checks both the file digest and the digest of
    /// the Euler characteristics derived from it.
    pub fn from_sources(json: &str, checksums: &str) -> Result<Self, MutationError> {
        let mut lines = checksums.lines().map(|l| l.split_whitespace().next().unwrap_or(""));
        let want_file = lines.next().unwrap_or("").to_string();
        let want_chi = lines.next().unwrap_or("").to_string();
        let found = sha256_hex(json.as_bytes());
        if found != want_file {
            return Err(MutationError::ChecksumMismatch {
                which: "ext_tables.json".into(),
                expected: want_file,
                found,
            });
        }
        let t: ExtTables = serde_json::from_str(json).map_err(|e| MutationError::Data(e.to_string()))?;
        t.exceptional.validate("exceptional")?;
        t.into_null.validate("into_null")?;
        t.from_null.validate("from_null")?;
        let found = sha256_hex(t.euler_digest_input().as_bytes());
        if found != want_chi {
            return Err(MutationError::ChecksumMismatch {
                which: "Euler characteristics".into(),
                expected: want_chi,
                found,
            });
        }
        Ok(t)
    }

    /// One line `table:row:col:χ` per cell, then `target:source:target:χ`.
    pub fn euler_digest_input(&self) -> String {
        let mut s = String::new();
        for (name, t) in [
            ("exceptional", &self.exceptional),
            ("into_null", &self.into_null),
            ("from_null", &self.from_null),
        ] {
            for (r, row) in t.rows.iter().zip(&t.cells) {
                for (c, cell) in t.cols.iter().zip(row) {
                    s.push_str(&format!("{name}:{r}:{c}:{}\n", euler_from_dims(cell)));
                }
            }
        }
        for p in &self.resolution_targets {
            s.push_str(&format!("target:{}:{}:{}\n", p.source, p.target, euler_from_dims(&p.dims)));
        }
        s
    }

    /// `χ(A, B)` for any pair covered by one of the tables.
    pub fn chi(&self, a: &str, b: &str) -> Option<i64> {
        [&self.exceptional, &self.into_null, &self.from_null]
            .iter()
            .find_map(|t| t.get(a, b))
            .map(euler_from_dims)
    }

    /// The collection as a lattice over its own members.
    pub fn collection(&self) -> Result<EulerLattice, MutationError> {
        let t = &self.exceptional;
        if t.rows != t.cols {
            return Err(MutationError::Data("collection table must be square with equal labels".into()));
        }
        let gram = t
            .cells
            .iter()
            .map(|r| r.iter().map(euler_from_dims).collect())
            .collect();
        let lat = EulerLattice::from_gram(t.rows.clone(), gram)?;
        if !lat.is_unitriangular() {
            return Err(MutationError::TriangularityLost("loading the collection".into()));
        }
        Ok(lat)
    }

    /// Rows `labels`, columns the collection members: `Ext(member, label)`
    /// when `covariant`, else `Ext(label, member)`.
    pub fn pairing_rows(&self, labels: &[&str], covariant: bool) -> PairingRows {
        let members = &self.exceptional.rows;
        let mut rows = BTreeMap::new();
        for l in labels {
            let mut row = BTreeMap::new();
            for m in members {
                let (a, b) = if covariant { (m.as_str(), *l) } else { (*l, m.as_str()) };
                let cell = [&self.exceptional, &self.into_null, &self.from_null]
                    .iter()
                    .find_map(|t| t.get(a, b));
                if let Some(d) = cell {
                    row.insert(m.clone(), d.clone());
                }
            }
            if row.len() == members.len() {
                rows.insert(l.to_string(), row);
            }
        }
        PairingRows { rows }
    }
}

/// The collection `⟨E0, E1, F0, F1, A0, A1⟩` with Gram matrix computed
/// from the shipped Ext table.
pub fn paper_collection() -> Result<EulerLattice, MutationError> {
    ExtTables::embedded()?.collection()
}

/// Ext dimensions of several objects against a common list of test objects.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingRows {
    pub rows: BTreeMap<String, BTreeMap<String, GradedDims>>,
}

/// For a short exact sequence `0 → sub → middle → quotient → 0`, true iff
/// `χ(middle) = χ(sub) + χ(quotient)` against every test object present in
/// all three rows (and the three rows have the same test objects).
pub fn triangle_additivity_check(
    rows: &PairingRows,
    sub: &str,
    middle: &str,
    quotient: &str,
) -> Result<bool, MutationError> {
    let get = |l: &str| rows.rows.get(l).ok_or_else(|| MutationError::MissingRow(l.to_string()));
    let (s, m, q) = (get(sub)?, get(middle)?, get(quotient)?);
    if s.keys().ne(m.keys()) || q.keys().ne(m.keys()) || m.is_empty() {
        return Ok(false);
    }
    Ok(m.iter().all(|(k, dm)| {
        euler_from_dims(dm) == euler_from_dims(&s[k]) + euler_from_dims(&q[k])
    }))
}

/// One target pairing of the replayed collection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayCheck {
    pub source: String,
    pub target: String,
    pub expected: i64,
    pub computed: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub lattice: EulerLattice,
    /// Sign chosen for each object named in the targets (classes are only
    /// determined up to shift).
    pub signs: BTreeMap<String, i64>,
    pub checks: Vec<ReplayCheck>,
    pub unitriangular: bool,
}

impl ReplayReport {
    pub fn pass(&self) -> bool {
        self.unitriangular && self.checks.iter().all(|c| c.pass)
    }
}

/// Mutates `⟨A0, A1⟩` left across `F1` then `E1`, and `⟨E0, F0⟩` right
/// across the two mutated objects, starting from `⟨E0, F0, E1, F1, A0, A1⟩`.
pub fn replay_script() -> MutationScript {
    use Direction::{L, R};
    MutationScript {
        steps: vec![(L, 3), (L, 4), (L, 2), (L, 3), (R, 1), (R, 0), (R, 2), (R, 1)],
    }
}

/// Runs the mutation replay against the shipped tables.
pub fn replay_thm_resolution() -> Result<ReplayReport, MutationError> {
    replay_with_tables(&ExtTables::embedded()?)
}

pub fn replay_with_tables(tables: &ExtTables) -> Result<ReplayReport, MutationError> {
    let start = tables
        .collection()?
        .reordered(&["E0", "F0", "E1", "F1", "A0", "A1"])?;
    let lat = replay_script().run(&start)?;
    let targets: Vec<(usize, usize, i64, &PairTarget)> = tables
        .resolution_targets
        .iter()
        .map(|p| {
            let i = lat.index_of(&p.source).ok_or_else(|| MutationError::MissingRow(p.source.clone()))?;
            let j = lat.index_of(&p.target).ok_or_else(|| MutationError::MissingRow(p.target.clone()))?;
            Ok((i, j, euler_from_dims(&p.dims), p))
        })
        .collect::<Result<_, MutationError>>()?;
    let mut involved: Vec<usize> = targets.iter().flat_map(|t| [t.0, t.1]).collect();
    involved.sort();
    involved.dedup();
    let g = lat.gram();
    // smallest number of flips first, so untouched objects keep their sign
    let mut masks: Vec<u32> = (0..1u32 << involved.len()).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let sign_of = |mask: u32, idx: usize| -> i64 {
        let k = involved.iter().position(|&x| x == idx).unwrap();
        if mask & (1 << k) != 0 {
            -1
        } else {
            1
        }
    };
    let best = masks
        .iter()
        .copied()
        .find(|&m| targets.iter().all(|&(i, j, e, _)| sign_of(m, i) * sign_of(m, j) * g[i][j] == e))
        .unwrap_or(0);
    let checks = targets
        .iter()
        .map(|&(i, j, e, p)| {
            let computed = sign_of(best, i) * sign_of(best, j) * g[i][j];
            ReplayCheck {
                source: p.source.clone(),
                target: p.target.clone(),
                expected: e,
                computed,
                pass: computed == e,
            }
        })
        .collect();
    let signs = involved
        .iter()
        .map(|&i| (lat.labels[i].clone(), sign_of(best, i)))
        .collect();
    Ok(ReplayReport {
        unitriangular: lat.is_unitriangular(),
        lattice: lat,
        signs,
        checks,
    })
}
