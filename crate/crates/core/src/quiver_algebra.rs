//! Graded quivers with relations, small graded algebras and their bar
//! complexes.
//!
//! Paths are written left to right: `ab` means `a` followed by `b`. An arrow
//! of degree `k` from `v` to `w` is a morphism `v → w[k]`, so the graded Hom
//! space from `v` to `w` is spanned by paths from `v` to `w` modulo the
//! two-sided ideal of the relations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_linalg::{rank, Rational, Rref, SparseMatrix, SparseVec};
use crate::GradedDims;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("unknown arrow '{0}'")]
    UnknownArrow(String),
    #[error("relation is not homogeneous: {0}")]
    InhomogeneousRelation(String),
    #[error("algebra is not augmented: {0}")]
    NotAugmented(String),
    #[error("multiplication is not associative on {0}")]
    NotAssociative(String),
    #[error("unsupported grading: {0}")]
    UnsupportedGrading(String),
    #[error("bar complex truncation unstable in total degree {0}")]
    UnstableTruncation(i64),
    #[error("need dimensions through degree {needed}, have {known}")]
    InsufficientData { needed: i64, known: i64 },
    #[error("unknown relation set '{0}' (expected both, t-only or eps-only)")]
    UnknownRelationSet(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedQuiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl GradedQuiver {
    pub fn new(vertices: &[&str]) -> Self {
        GradedQuiver {
            vertices: vertices.iter().map(|v| v.to_string()).collect(),
            arrows: Vec::new(),
        }
    }

    pub fn add_arrow(&mut self, name: &str, source: &str, target: &str, degree: i64) -> Result<(), QuiverError> {
        let source = self.vertex(source)?;
        let target = self.vertex(target)?;
        self.arrows.push(Arrow {
            name: name.to_string(),
            source,
            target,
            degree,
        });
        Ok(())
    }

    pub fn vertex(&self, name: &str) -> Result<usize, QuiverError> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| QuiverError::UnknownVertex(name.to_string()))
    }

    pub fn arrow(&self, name: &str) -> Result<usize, QuiverError> {
        self.arrows
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| QuiverError::UnknownArrow(name.to_string()))
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }
}

/// A path as a start vertex and a word in the arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub start: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    fn end(&self, q: &GradedQuiver) -> usize {
        self.arrows.last().map(|&a| q.arrows[a].target).unwrap_or(self.start)
    }

    fn degree(&self, q: &GradedQuiver) -> i64 {
        self.arrows.iter().map(|&a| q.arrows[a].degree).sum()
    }

    pub fn display(&self, q: &GradedQuiver) -> String {
        if self.arrows.is_empty() {
            format!("e({})", q.vertices[self.start])
        } else {
            self.arrows
                .iter()
                .map(|&a| q.arrows[a].name.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

/// A homogeneous linear combination of parallel paths that is set to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Rational, Path)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathAlgebraWithRelations {
    quiver: GradedQuiver,
    relations: Vec<Relation>,
    /// Longest path considered; only matters for quivers with cycles.
    max_length: usize,
}

impl PathAlgebraWithRelations {
    pub fn new(quiver: GradedQuiver) -> Self {
        PathAlgebraWithRelations {
            quiver,
            relations: Vec::new(),
            max_length: 12,
        }
    }

    pub fn with_max_length(mut self, n: usize) -> Self {
        self.max_length = n;
        self
    }

    pub fn quiver(&self) -> &GradedQuiver {
        &self.quiver
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Parses a space-separated word of arrow names.
    pub fn path(&self, word: &str) -> Result<Path, QuiverError> {
        let arrows: Vec<usize> = word
            .split_whitespace()
            .map(|a| self.quiver.arrow(a))
            .collect::<Result<_, _>>()?;
        let first = arrows
            .first()
            .ok_or_else(|| QuiverError::UnknownArrow(word.to_string()))?;
        for w in arrows.windows(2) {
            if self.quiver.arrows[w[0]].target != self.quiver.arrows[w[1]].source {
                return Err(QuiverError::InhomogeneousRelation(format!("'{word}' is not a path")));
            }
        }
        Ok(Path {
            start: self.quiver.arrows[*first].source,
            arrows,
        })
    }

    pub fn add_relation(&mut self, terms: Vec<(Rational, Path)>) -> Result<(), QuiverError> {
        let q = &self.quiver;
        if let Some((_, p0)) = terms.first() {
            let key = (p0.start, p0.end(q), p0.degree(q));
            for (_, p) in &terms {
                if (p.start, p.end(q), p.degree(q)) != key {
                    return Err(QuiverError::InhomogeneousRelation(p.display(q)));
                }
            }
        }
        self.relations.push(Relation { terms });
        Ok(())
    }

    /// Adds `lhs = rhs` for two words.
    pub fn add_equal(&mut self, lhs: &str, rhs: &str) -> Result<(), QuiverError> {
        let a = self.path(lhs)?;
        let b = self.path(rhs)?;
        self.add_relation(vec![(Rational::one(), a), (-Rational::one(), b)])
    }

    /// All paths from `v` to `w` of the given degree.
    fn paths(&self, v: usize, w: usize, degree: i64) -> Vec<Path> {
        self.paths_from(v)
            .into_iter()
            .filter(|p| p.end(&self.quiver) == w && p.degree(&self.quiver) == degree)
            .collect()
    }

    fn paths_from(&self, v: usize) -> Vec<Path> {
        let mut out = vec![Path {
            start: v,
            arrows: Vec::new(),
        }];
        let mut frontier = out.clone();
        for _ in 0..self.max_length {
            let mut next = Vec::new();
            for p in &frontier {
                let end = p.end(&self.quiver);
                for (i, a) in self.quiver.arrows.iter().enumerate() {
                    if a.source == end {
                        let mut arrows = p.arrows.clone();
                        arrows.push(i);
                        next.push(Path { start: v, arrows });
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Paths of a cell and the span of the relation ideal inside it.
    fn cell(&self, v: usize, w: usize, degree: i64) -> (Vec<Path>, Rref) {
        let paths = self.paths(v, w, degree);
        let index: HashMap<&Path, usize> = paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let q = &self.quiver;
        let mut gens: Vec<SparseVec> = Vec::new();
        for rel in &self.relations {
            let Some((_, p0)) = rel.terms.first() else { continue };
            let (x, y, dr) = (p0.start, p0.end(q), p0.degree(q));
            let prefixes: Vec<Path> = self
                .paths_from(v)
                .into_iter()
                .filter(|p| p.end(q) == x)
                .collect();
            let suffixes: Vec<Path> = self
                .paths_from(y)
                .into_iter()
                .filter(|p| p.end(q) == w)
                .collect();
            for pre in &prefixes {
                for suf in &suffixes {
                    if pre.degree(q) + dr + suf.degree(q) != degree {
                        continue;
                    }
                    let mut vec = SparseVec::new();
                    for (c, r) in &rel.terms {
                        let mut arrows = pre.arrows.clone();
                        arrows.extend_from_slice(&r.arrows);
                        arrows.extend_from_slice(&suf.arrows);
                        let p = Path { start: v, arrows };
                        if let Some(&i) = index.get(&p) {
                            let slot = vec.entry(i).or_insert_with(Rational::zero);
                            *slot += c;
                            if slot.is_zero() {
                                vec.remove(&i);
                            }
                        }
                    }
                    if !vec.is_empty() {
                        gens.push(vec);
                    }
                }
            }
        }
        let ideal = Rref::new(paths.len(), gens);
        (paths, ideal)
    }

    /// Normal form of a path modulo the relations, as a combination of paths.
    pub fn reduce(&self, p: &Path) -> Vec<(Rational, Path)> {
        let q = &self.quiver;
        let (paths, ideal) = self.cell(p.start, p.end(q), p.degree(q));
        let i = paths.iter().position(|x| x == p).expect("path lies in its own cell");
        let mut v = SparseVec::new();
        v.insert(i, Rational::one());
        ideal
            .reduce(&v)
            .into_iter()
            .map(|(j, c)| (c, paths[j].clone()))
            .collect()
    }
}

/// Graded dimensions of Hom from vertex `v` to vertex `w` in degrees `0..=max_degree`.
pub fn graded_hom_dims(
    alg: &PathAlgebraWithRelations,
    v: &str,
    w: &str,
    max_degree: usize,
) -> Result<GradedDims, QuiverError> {
    let (vi, wi) = (alg.quiver.vertex(v)?, alg.quiver.vertex(w)?);
    let mut out = GradedDims::new();
    for d in 0..=max_degree as i64 {
        let (paths, ideal) = alg.cell(vi, wi, d);
        out.add(d, paths.len() - ideal.rank());
    }
    Ok(out)
}

/// The graded Kronecker quiver: vertices `v1, v2`, arrows `a: v1 → v2` of
/// degree 0 and `b: v1 → v2` of degree `q`.
pub fn make_kronecker(q: i64) -> PathAlgebraWithRelations {
    let mut g = GradedQuiver::new(&["v1", "v2"]);
    g.add_arrow("a", "v1", "v2", 0).expect("vertices exist");
    g.add_arrow("b", "v1", "v2", q).expect("vertices exist");
    PathAlgebraWithRelations::new(g)
}

/// Which commutation relations the degree-2 arrows satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationSet {
    Both,
    TOnly,
    EpsOnly,
}

impl RelationSet {
    pub const ALL: [RelationSet; 3] = [RelationSet::Both, RelationSet::TOnly, RelationSet::EpsOnly];
}

impl std::str::FromStr for RelationSet {
    type Err = QuiverError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "both" => Ok(RelationSet::Both),
            "t-only" => Ok(RelationSet::TOnly),
            "eps-only" => Ok(RelationSet::EpsOnly),
            _ => Err(QuiverError::UnknownRelationSet(s.to_string())),
        }
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationSet::Both => "both",
            RelationSet::TOnly => "t-only",
            RelationSet::EpsOnly => "eps-only",
        })
    }
}

/// Vertex names of the four-object quiver, in order.
pub const DTILDE_VERTICES: [&str; 4] = ["E0''", "F0''", "E1", "F1"];

/// The four-object quiver of the categorical resolution with arrows
/// `t_i` (degree 0), `eps_i`, `delta_i` (degree 1), `s_i` (degree 0) and
/// `theta_i` (degree 2), and the composition relations. The `delta_i` and
/// `s_i` are tied to composites by relations.
pub fn make_dtilde(relations: RelationSet) -> PathAlgebraWithRelations {
    let [e0, f0, e1, f1] = DTILDE_VERTICES;
    let mut g = GradedQuiver::new(&DTILDE_VERTICES);
    let arrows = [
        ("t0", e0, f0, 0),
        ("eps0", e0, f0, 1),
        ("t1", f0, e1, 0),
        ("eps1", f0, e1, 1),
        ("t2", e1, f1, 0),
        ("eps2", e1, f1, 1),
        ("s0", e0, e1, 0),
        ("delta0", e0, e1, 1),
        ("theta0", e0, e1, 2),
        ("s1", f0, f1, 0),
        ("delta1", f0, f1, 1),
        ("theta1", f0, f1, 2),
    ];
    for (n, s, t, d) in arrows {
        g.add_arrow(n, s, t, d).expect("vertices exist");
    }
    let mut alg = PathAlgebraWithRelations::new(g);
    let mut eq = |a: &str, b: &str| alg.add_equal(a, b).expect("relations are homogeneous paths");
    eq("t0 t1", "s0");
    eq("t1 t2", "s1");
    eq("t0 eps1", "delta0");
    eq("eps0 t1", "delta0");
    eq("t1 eps2", "delta1");
    eq("eps1 t2", "delta1");
    if relations != RelationSet::EpsOnly {
        eq("t0 theta1", "theta0 t2");
    }
    if relations != RelationSet::TOnly {
        eq("eps0 theta1", "theta0 eps2");
    }
    alg
}

/// One composite of two named morphisms and its normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionEntry {
    pub first: String,
    pub second: String,
    pub degree: i64,
    pub nonzero: bool,
    pub normal_form: String,
}

/// Every composite `ab` of two named morphisms (arrows, plus `rho0 = eps0 eps1`
/// and `rho1 = eps1 eps2`), reduced modulo the relations.
pub fn nonzero_composition_report(alg: &PathAlgebraWithRelations) -> Vec<CompositionEntry> {
    let q = &alg.quiver;
    let mut named: Vec<(String, Path)> = q
        .arrows
        .iter()
        .enumerate()
        .map(|(i, a)| {
            (
                a.name.clone(),
                Path {
                    start: a.source,
                    arrows: vec![i],
                },
            )
        })
        .collect();
    for (name, word) in [("rho0", "eps0 eps1"), ("rho1", "eps1 eps2")] {
        if let Ok(p) = alg.path(word) {
            named.push((name.to_string(), p));
        }
    }
    let mut out = Vec::new();
    for (n1, p1) in &named {
        for (n2, p2) in &named {
            if p1.end(q) != p2.start {
                continue;
            }
            let mut arrows = p1.arrows.clone();
            arrows.extend_from_slice(&p2.arrows);
            let p = Path {
                start: p1.start,
                arrows,
            };
            let nf = alg.reduce(&p);
            let normal_form = if nf.is_empty() {
                "0".to_string()
            } else {
                nf.iter()
                    .map(|(c, x)| {
                        if c.is_one() {
                            x.display(q)
                        } else {
                            format!("({c}) {}", x.display(q))
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" + ")
            };
            out.push(CompositionEntry {
                first: n1.clone(),
                second: n2.clone(),
                degree: p.degree(q),
                nonzero: !nf.is_empty(),
                normal_form,
            });
        }
    }
    out
}

/// Vertex pairs whose Hom space should be the truncation `Ext^{≤k}` of the
/// self-Ext algebra of the absorbing object.
pub fn truncation_pairs(k: usize) -> Vec<(&'static str, &'static str)> {
    let [e0, f0, e1, f1] = DTILDE_VERTICES;
    match k {
        1 => vec![(e0, f0), (e1, f1), (f0, e1)],
        2 => vec![(e0, e1), (f0, f1)],
        3 => vec![(e0, f1)],
        _ => Vec::new(),
    }
}

/// True iff every pair for `k` has Hom dimensions equal to `ext_p` in degrees `≤ k`.
pub fn truncation_identity_check(
    alg: &PathAlgebraWithRelations,
    ext_p: &GradedDims,
    k: usize,
) -> Result<bool, QuiverError> {
    let pairs = truncation_pairs(k);
    if pairs.is_empty() {
        return Ok(false);
    }
    let want = ext_p.restricted(0, k as i64);
    for (v, w) in pairs {
        if graded_hom_dims(alg, v, w, k + 3)? != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A finite-dimensional graded algebra with unit `basis[0]`.
///
/// Products of augmentation-ideal elements are listed in `table`; products
/// with the unit are implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGradedAlgebra {
    basis: Vec<(String, i64)>,
    table: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
}

impl FiniteGradedAlgebra {
    pub fn new(
        basis: Vec<(String, i64)>,
        table: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
    ) -> Result<Self, QuiverError> {
        if basis.first().map(|b| b.1) != Some(0) {
            return Err(QuiverError::NotAugmented("the first basis element must be a degree-0 unit".into()));
        }
        for (&(i, j), terms) in &table {
            if i == 0 || j == 0 {
                return Err(QuiverError::NotAugmented("products with the unit are implicit".into()));
            }
            for (k, c) in terms {
                if *k == 0 && !c.is_zero() {
                    return Err(QuiverError::NotAugmented(format!(
                        "{} * {} has a unit component",
                        basis[i].0, basis[j].0
                    )));
                }
                if basis[*k].1 != basis[i].1 + basis[j].1 {
                    return Err(QuiverError::UnsupportedGrading(format!(
                        "{} * {} is not homogeneous",
                        basis[i].0, basis[j].0
                    )));
                }
            }
        }
        let alg = FiniteGradedAlgebra { basis, table };
        alg.check_associative()?;
        Ok(alg)
    }

    /// `k[x_1, …, x_m]/(x_1², …, x_m²)` (commuting generators) with the given degrees.
    pub fn truncated_polynomial(gens: &[(&str, i64)]) -> Self {
        let m = gens.len();
        let name = |mask: usize| -> String {
            if mask == 0 {
                return "1".into();
            }
            (0..m).filter(|i| mask & (1 << i) != 0).map(|i| gens[i].0).collect::<Vec<_>>().join("")
        };
        let deg = |mask: usize| -> i64 { (0..m).filter(|i| mask & (1 << i) != 0).map(|i| gens[i].1).sum() };
        let basis = (0..1usize << m).map(|mask| (name(mask), deg(mask))).collect();
        let mut table = BTreeMap::new();
        for a in 1..1usize << m {
            for b in 1..1usize << m {
                if a & b == 0 {
                    table.insert((a, b), vec![(a | b, Rational::one())]);
                }
            }
        }
        FiniteGradedAlgebra { basis, table }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[(String, i64)] {
        &self.basis
    }

    fn mul_basis(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        if i == 0 {
            return vec![(j, Rational::one())];
        }
        if j == 0 {
            return vec![(i, Rational::one())];
        }
        self.table.get(&(i, j)).cloned().unwrap_or_default()
    }

    fn mul_vec(&self, x: &[(usize, Rational)], j: usize) -> BTreeMap<usize, Rational> {
        let mut out = BTreeMap::new();
        for (i, c) in x {
            for (k, d) in self.mul_basis(*i, j) {
                *out.entry(k).or_insert_with(Rational::zero) += c * &d;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    fn check_associative(&self) -> Result<(), QuiverError> {
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul_basis(a, b);
                for c in 0..n {
                    let left = self.mul_vec(&ab, c);
                    let mut right = BTreeMap::new();
                    for (k, d) in self.mul_basis(b, c) {
                        for (m, e) in self.mul_basis(a, k) {
                            *right.entry(m).or_insert_with(Rational::zero) += &d * &e;
                        }
                    }
                    right.retain(|_, v: &mut Rational| !v.is_zero());
                    if left != right {
                        return Err(QuiverError::NotAssociative(format!(
                            "({}, {}, {})",
                            self.basis[a].0, self.basis[b].0, self.basis[c].0
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Ext of the trivial module over a finite graded algebra, from the
/// reduced bar complex.
///
/// The bar element `[a_1|…|a_n]` has homological degree `n` and internal
/// degree `Σ deg a_i`; its total (cohomological Ext) degree is
/// `n - Σ deg a_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarExt {
    /// `(homological degree, internal degree) → dim`.
    pub bigraded: BTreeMap<(i64, i64), usize>,
    /// By total degree, complete for totals `≤ max_total`.
    pub total: GradedDims,
    pub max_total: i64,
}

/// Bar-complex Ext in all total degrees `≤ n_max`. Requires every element
/// of the augmentation ideal to have degree `≤ 0`, so that the total degree
/// grows with the length of a bar element and each total degree is finite.
pub fn bar_ext(alg: &FiniteGradedAlgebra, n_max: usize) -> Result<BarExt, QuiverError> {
    let ideal: Vec<usize> = (1..alg.dim()).collect();
    if let Some(&i) = ideal.iter().find(|&&i| alg.basis[i].1 > 0) {
        return Err(QuiverError::UnsupportedGrading(format!(
            "{} has positive degree",
            alg.basis[i].0
        )));
    }
    let t_max = n_max as i64 + 1;
    // cells keyed by (length, internal degree)
    let mut cells: BTreeMap<(i64, i64), Vec<Vec<usize>>> = BTreeMap::new();
    cells.entry((0, 0)).or_default().push(Vec::new());
    let mut frontier: Vec<(Vec<usize>, i64)> = vec![(Vec::new(), 0)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (word, internal) in &frontier {
            for &a in &ideal {
                let d = internal + alg.basis[a].1;
                let n = word.len() as i64 + 1;
                if n - d > t_max {
                    continue;
                }
                let mut w = word.clone();
                w.push(a);
                cells.entry((n, d)).or_default().push(w.clone());
                next.push((w, d));
            }
        }
        frontier = next;
    }
    let index: HashMap<(i64, i64), HashMap<Vec<usize>, usize>> = cells
        .iter()
        .map(|(k, v)| (*k, v.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect()))
        .collect();
    // d: cell (n, d) → cell (n-1, d)
    let differential = |key: (i64, i64)| -> SparseMatrix {
        let src = &cells[&key];
        let tkey = (key.0 - 1, key.1);
        let empty = HashMap::new();
        let tidx = index.get(&tkey).unwrap_or(&empty);
        let mut trip = Vec::new();
        for (col, w) in src.iter().enumerate() {
            for i in 0..w.len().saturating_sub(1) {
                let sign = if (i + 1) % 2 == 0 { Rational::one() } else { -Rational::one() };
                for (k, c) in alg.mul_basis(w[i], w[i + 1]) {
                    let mut nw = w[..i].to_vec();
                    nw.push(k);
                    nw.extend_from_slice(&w[i + 2..]);
                    if let Some(&row) = tidx.get(&nw) {
                        trip.push((row, col, &sign * &c));
                    }
                }
            }
        }
        SparseMatrix::from_triplets(tidx.len(), src.len(), trip).expect("indices come from the cells")
    };
    let ranks: HashMap<(i64, i64), usize> = cells.keys().map(|&k| (k, rank(&differential(k)))).collect();
    let mut bigraded = BTreeMap::new();
    let mut total = GradedDims::new();
    for (&(n, d), words) in &cells {
        if n - d > n_max as i64 {
            continue;
        }
        let out_rank = ranks.get(&(n, d)).copied().unwrap_or(0);
        let in_rank = ranks.get(&(n + 1, d)).copied().unwrap_or(0);
        let h = words.len() - out_rank - in_rank;
        if h > 0 {
            bigraded.insert((n, d), h);
            total.add(n - d, h);
        }
    }
    Ok(BarExt {
        bigraded,
        total,
        max_total: n_max as i64,
    })
}

/// `bar_ext` recomputed at `n_max + 2`; errors if any total degree `≤ n_max` moves.
pub fn bar_ext_stable(alg: &FiniteGradedAlgebra, n_max: usize) -> Result<BarExt, QuiverError> {
    let a = bar_ext(alg, n_max)?;
    let b = bar_ext(alg, n_max + 2)?;
    for t in 0..=n_max as i64 {
        if a.total.get(t) != b.total.get(t) {
            return Err(QuiverError::UnstableTruncation(t));
        }
    }
    Ok(a)
}

/// Rank assumed for the connecting map `θ: P → P[2]` on Ext groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectingMap {
    /// Multiplication by `θ` has maximal rank (injective on a polynomial ring).
    MaximalRank,
    /// The zero map (split triangle).
    Zero,
}

/// Dimensions of `Ext^j(i^*i_*P, P)` for `0 ≤ j ≤ n_max` from the long exact
/// sequence of `i^*i_*P → P → P[2]`:
/// `coker(θ: Ext^{j-2} → Ext^j) ⊕ ker(θ: Ext^{j-1} → Ext^{j+1})`.
///
/// `ext_p` must be known in degrees `0..=known_through`, at least `n_max + 1`.
pub fn pushforward_selfext_dims(
    ext_p: &GradedDims,
    known_through: i64,
    n_max: usize,
    mode: ConnectingMap,
) -> Result<GradedDims, QuiverError> {
    let n = n_max as i64;
    if mode == ConnectingMap::MaximalRank && known_through < n + 1 {
        return Err(QuiverError::InsufficientData {
            needed: n + 1,
            known: known_through,
        });
    }
    if mode == ConnectingMap::Zero && known_through < n {
        return Err(QuiverError::InsufficientData {
            needed: n,
            known: known_through,
        });
    }
    let e = |j: i64| if j < 0 { 0 } else { ext_p.get(j) };
    let theta_rank = |from: i64| match mode {
        ConnectingMap::MaximalRank => e(from).min(e(from + 2)),
        ConnectingMap::Zero => 0,
    };
    let mut out = GradedDims::new();
    for j in 0..=n {
        let coker = e(j) - theta_rank(j - 2);
        let ker = e(j - 1) - theta_rank(j - 1);
        out.add(j, coker + ker);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker() {
        for q in 0..=5 {
            let k = make_kronecker(q);
            let want = if q == 0 {
                GradedDims::from_pairs([(0, 2)])
            } else {
                GradedDims::from_pairs([(0, 1), (q, 1)])
            };
            assert_eq!(graded_hom_dims(&k, "v1", "v2", 6).unwrap(), want);
            assert_eq!(graded_hom_dims(&k, "v1", "v1", 6).unwrap(), GradedDims::from_pairs([(0, 1)]));
            assert!(graded_hom_dims(&k, "v2", "v1", 6).unwrap().is_zero());
        }
    }

    #[test]
    fn dtilde_dims() {
        let alg = make_dtilde(RelationSet::Both);
        let dims = |v, w| graded_hom_dims(&alg, v, w, 6).unwrap();
        assert_eq!(dims("E0''", "F1"), GradedDims::from_slice(0, &[1, 1, 2, 2]));
        assert_eq!(dims("E0''", "E1"), GradedDims::from_slice(0, &[1, 1, 2]));
        assert_eq!(dims("E0''", "F0''"), GradedDims::from_slice(0, &[1, 1]));
        assert_eq!(dims("E1", "F1"), GradedDims::from_slice(0, &[1, 1]));
        assert_eq!(dims("F1", "F1"), GradedDims::from_slice(0, &[1]));
        assert!(dims("F1", "E0''").is_zero());
        let t_only = make_dtilde(RelationSet::TOnly);
        assert_eq!(graded_hom_dims(&t_only, "E0''", "F1", 6).unwrap().get(3), 3);
        let eps_only = make_dtilde(RelationSet::EpsOnly);
        assert_eq!(graded_hom_dims(&eps_only, "E0''", "F1", 6).unwrap().get(2), 3);
    }

    #[test]
    fn compositions() {
        let alg = make_dtilde(RelationSet::Both);
        let report = nonzero_composition_report(&alg);
        assert!(report.iter().all(|e| e.nonzero));
        let find = |a: &str, b: &str| report.iter().find(|e| e.first == a && e.second == b).unwrap().clone();
        assert_eq!(find("t0", "t1").degree, 0);
        assert_eq!(find("eps1", "eps2").degree, 2);
        assert_eq!(find("eps0", "rho1").normal_form, find("rho0", "eps2").normal_form);
        assert_eq!(find("s0", "t2").normal_form, find("t0", "s1").normal_form);
        assert_eq!(find("t0", "theta1").normal_form, find("theta0", "t2").normal_form);
    }

    #[test]
    fn bar_complex_base_cases() {
        let w = FiniteGradedAlgebra::truncated_polynomial(&[("w", 0)]);
        let e = bar_ext_stable(&w, 8).unwrap();
        assert_eq!(e.total, GradedDims::from_slice(0, &[1; 9]));
        let r = FiniteGradedAlgebra::truncated_polynomial(&[("r", -1)]);
        let e = bar_ext_stable(&r, 8).unwrap();
        assert_eq!(e.total, GradedDims::from_slice(0, &[1, 0, 1, 0, 1, 0, 1, 0, 1]));
        let wr = FiniteGradedAlgebra::truncated_polynomial(&[("w", 0), ("r", -1)]);
        let e = bar_ext_stable(&wr, 6).unwrap();
        assert_eq!(e.total, GradedDims::from_slice(0, &[1, 1, 2, 2, 3, 3, 4]));
    }

    #[test]
    fn non_augmented_is_rejected() {
        let basis = vec![("1".to_string(), 0), ("x".to_string(), 0)];
        let mut table = BTreeMap::new();
        table.insert((1, 1), vec![(0, Rational::one())]);
        assert!(matches!(FiniteGradedAlgebra::new(basis, table), Err(QuiverError::NotAugmented(_))));
    }

    #[test]
    fn pushforward() {
        let ext = GradedDims::from_pairs((0..=12).map(|n| (n, n as usize / 2 + 1)));
        let got = pushforward_selfext_dims(&ext, 12, 10, ConnectingMap::MaximalRank).unwrap();
        assert_eq!(got, GradedDims::from_slice(0, &[1; 11]));
        let split = pushforward_selfext_dims(&ext, 12, 4, ConnectingMap::Zero).unwrap();
        assert_eq!(split.to_vec(0, 4), vec![1, 2, 3, 4, 5]);
        // no degree-2 classes, so theta vanishes and the triangle splits
        let exc = GradedDims::from_pairs([(0, 1)]);
        let got = pushforward_selfext_dims(&exc, 6, 5, ConnectingMap::MaximalRank).unwrap();
        assert_eq!(got, pushforward_selfext_dims(&exc, 6, 5, ConnectingMap::Zero).unwrap());
        assert_eq!(got, GradedDims::from_pairs([(0, 1), (1, 1)]));
        assert!(matches!(
            pushforward_selfext_dims(&ext, 10, 10, ConnectingMap::MaximalRank),
            Err(QuiverError::InsufficientData { .. })
        ));
    }
}
