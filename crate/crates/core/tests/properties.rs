mod common;

use cpinf::curve_homalg::{
    compose_ladders, default_cutoff, ext_table, lift_to_chain_map, CpAlgebra, ObjectSpec,
};
use cpinf::exact_linalg::{cohomology_dim_at, kernel_basis, q, rank, solve, Rational, SparseMatrix};
use cpinf::monomial_geometry::{
    cohomology_p1, cohomology_ruled, pushforward_ruled, serre_check_ruled, DivisorData, RuledBundle,
};
use cpinf::mutation_engine::{left_mutate, right_mutate, verify_braid, EulerLattice};
use cpinf::quiver_algebra::{bar_ext, bar_ext_stable, graded_hom_dims, make_kronecker, FiniteGradedAlgebra};
use cpinf::GradedDims;
use num_traits::Zero;
use proptest::prelude::*;

fn int_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        (Just(c), prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
    })
}

fn to_sparse(cols: usize, rows: &[Vec<i64>]) -> SparseMatrix {
    SparseMatrix::from_int_rows(cols, rows).unwrap()
}

/// Upper unitriangular Gram matrices of size 2..=6.
fn unitriangular() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (2usize..=6).prop_flat_map(|n| {
        prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { 1 } else if i < j { v[i * n + j] } else { 0 })
                        .collect()
                })
                .collect()
        })
    })
}

fn lattice(g: Vec<Vec<i64>>) -> EulerLattice {
    let labels = (0..g.len()).map(|i| format!("X{i}")).collect();
    EulerLattice::from_gram(labels, g).unwrap()
}

/// Invertible `n × n` integer matrix as a product of random elementary operations.
fn invertible(n: usize, ops: &[(usize, usize, i64)]) -> SparseMatrix {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i != j {
            for k in 0..n {
                m[i][k] += c * m[j][k];
            }
        }
    }
    to_sparse(n, &m)
}

/// Inverse of a unimodular integer matrix from the same operations in reverse.
fn invertible_inverse(n: usize, ops: &[(usize, usize, i64)]) -> SparseMatrix {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i != j {
            for row in m.iter_mut() {
                row[j] -= c * row[i];
            }
        }
    }
    to_sparse(n, &m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity((cols, rows) in int_matrix(6, 6)) {
        let m = to_sparse(cols, &rows);
        let k = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + k.vectors.len(), cols);
        for v in &k.vectors {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn solve_is_exact((cols, rows) in int_matrix(6, 6), x0 in prop::collection::vec(-5i64..=5, 6)) {
        let m = to_sparse(cols, &rows);
        let x0: Vec<Rational> = x0[..cols].iter().map(|&v| q(v)).collect();
        let b = m.mul_vec(&x0).unwrap();
        let x = solve(&m, &b).unwrap();
        prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
    }

    #[test]
    fn cohomology_is_basis_independent(
        (mid, rows) in int_matrix(5, 5),
        ops_a in prop::collection::vec((0usize..5, 0usize..5, -2i64..=2), 0..6),
        ops_m in prop::collection::vec((0usize..5, 0usize..5, -2i64..=2), 0..6),
    ) {
        // d_in: A -> M, d_out: M -> B with d_out d_in = 0 built from a kernel
        let d_out = to_sparse(mid, &rows);
        let k = kernel_basis(&d_out);
        let a = k.vectors.len().max(1);
        let cols: Vec<Vec<Rational>> = if k.vectors.is_empty() { vec![vec![Rational::zero(); mid]] } else { k.vectors.clone() };
        let d_in_t = SparseMatrix::from_dense(mid, &cols).unwrap();
        let d_in = d_in_t.transpose();
        let base = cohomology_dim_at(&d_in, &d_out).unwrap();
        // change bases of A and M
        let pa = invertible(a, &ops_a);
        let pm = invertible(mid, &ops_m);
        let pm_inv = invertible_inverse(mid, &ops_m);
        prop_assert_eq!(pm.mul(&pm_inv).unwrap(), SparseMatrix::identity(mid));
        let d_in2 = pm.mul(&d_in).unwrap().mul(&pa).unwrap();
        let d_out2 = d_out.mul(&pm_inv).unwrap();
        prop_assert_eq!(cohomology_dim_at(&d_in2, &d_out2).unwrap(), base);
    }

    #[test]
    fn mutations_preserve_unitriangularity(g in unitriangular(), i in 0usize..5) {
        let lat = lattice(g);
        let i = i % (lat.size() - 1);
        let l = left_mutate(&lat, i).unwrap();
        let r = right_mutate(&lat, i).unwrap();
        prop_assert!(l.is_unitriangular());
        prop_assert!(r.is_unitriangular());
        prop_assert_eq!(l.gram_determinant(), 1);
        prop_assert_eq!(r.gram_determinant(), lat.gram_determinant());
    }

    #[test]
    fn left_and_right_are_inverse(g in unitriangular(), i in 0usize..5) {
        let lat = lattice(g);
        let i = i % (lat.size() - 1);
        let lr = right_mutate(&left_mutate(&lat, i).unwrap(), i).unwrap();
        let rl = left_mutate(&right_mutate(&lat, i).unwrap(), i).unwrap();
        prop_assert_eq!(lr.classes(), lat.classes());
        prop_assert_eq!(rl.classes(), lat.classes());
    }

    #[test]
    fn braid_relation(g in unitriangular(), i in 0usize..4) {
        let lat = lattice(g);
        prop_assume!(lat.size() >= 3);
        prop_assert!(verify_braid(&lat, i % (lat.size() - 2)));
    }

    #[test]
    fn serre_on_the_divisor(m1 in -4i64..=4, n1 in -4i64..=4, m2 in -4i64..=4, n2 in -4i64..=4) {
        let div = DivisorData::threefold_exceptional();
        prop_assert!(serre_check_ruled(&RuledBundle::new(m1, n1, 1), &RuledBundle::new(m2, n2, 1), &div).unwrap());
    }

    #[test]
    fn ruled_euler_characteristic(a in 0i64..=3, m in -6i64..=6, n in -6i64..=6) {
        // direct count through the split pushforward
        let mut chi = 0i64;
        for piece in pushforward_ruled(m, a) {
            for d in piece.degrees {
                chi += (if piece.shift % 2 == 0 { 1 } else { -1 }) * (d + n + 1);
            }
        }
        prop_assert_eq!(cohomology_ruled(&RuledBundle::new(m, n, a)).euler(), chi);
    }

    #[test]
    fn kronecker_dims(q in 0i64..=8) {
        let want = if q == 0 { GradedDims::from_pairs([(0, 2)]) } else { GradedDims::from_pairs([(0, 1), (q, 1)]) };
        prop_assert_eq!(graded_hom_dims(&make_kronecker(q), "v1", "v2", 10).unwrap(), want);
    }
}

#[test]
fn ruled_oracle_matches() {
    for a in 0..=3 {
        for m in -6..=6 {
            for n in -6..=6 {
                let h = common::ruled_cech(a, m, n);
                let want = GradedDims::from_pairs([(0, h[0]), (1, h[1]), (2, h[2])]);
                assert_eq!(cohomology_ruled(&RuledBundle::new(m, n, a)), want, "a={a} m={m} n={n}");
            }
        }
    }
}

#[test]
fn ruled_pushforward_totals() {
    for a in 0..=3 {
        for d in 0..=5 {
            let lhs = cohomology_ruled(&RuledBundle::new(d, 0, a));
            let rhs = (0..=d).fold(GradedDims::new(), |acc, k| acc.sum(&cohomology_p1(k * a)));
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn curve_serre_duality_for_line_bundles() {
    let cutoff = default_cutoff(3);
    for (a, b) in [(0, 0), (1, -1), (-2, 3), (3, 1), (-1, -3)] {
        for (c, d) in [(0, 0), (2, 1), (-1, 2), (1, -3)] {
            let lhs = ext_table(&ObjectSpec::O(a, b), &ObjectSpec::O(c, d), 3, cutoff).unwrap();
            let rhs = ext_table(&ObjectSpec::O(c, d), &ObjectSpec::O(a, b - 1), 3, cutoff).unwrap();
            for i in 0..=1 {
                assert_eq!(lhs.get(i), rhs.get(1 - i), "O({a},{b}) vs O({c},{d}) in degree {i}");
            }
            assert!(lhs.restricted(2, 3).is_zero());
        }
    }
}

#[test]
fn truncation_is_stable_for_golden_pairs() {
    let p = ObjectSpec::P(-1);
    for (s, t) in [(p, p), (ObjectSpec::P(0), ObjectSpec::L(1)), (ObjectSpec::L(2), p)] {
        let c = default_cutoff(6);
        assert_eq!(ext_table(&s, &t, 6, c).unwrap(), ext_table(&s, &t, 6, c + 2).unwrap());
    }
}

#[test]
fn yoneda_products_associate_and_commute() {
    let alg = CpAlgebra::new(6, default_cutoff(6)).unwrap();
    let (e, t) = (&alg.epsilon, &alg.theta);
    let class = |f| alg.class_of(&f).unwrap();
    assert_eq!(class(compose_ladders(e, t).unwrap()), class(compose_ladders(t, e).unwrap()));
    let gens = [e, t];
    for x in gens {
        for y in gens {
            for z in gens {
                if x.shift() + y.shift() + z.shift() > 6 {
                    continue;
                }
                let left = compose_ladders(&compose_ladders(x, y).unwrap(), z).unwrap();
                let right = compose_ladders(x, &compose_ladders(y, z).unwrap()).unwrap();
                assert_eq!(class(left), class(right));
            }
        }
    }
}

#[test]
fn every_basis_class_lifts_to_a_ladder() {
    let alg = CpAlgebra::new(8, default_cutoff(8)).unwrap();
    for basis in &alg.bases {
        for i in 0..basis.dim() {
            let x = basis.class(i);
            let f = lift_to_chain_map(basis, &x).unwrap();
            assert!(f.commutes());
            assert_eq!(basis.coordinates(&f).unwrap(), x);
        }
    }
}

#[test]
fn bar_ext_is_truncation_independent() {
    let alg = FiniteGradedAlgebra::truncated_polynomial(&[("w", 0), ("r", -1)]);
    let small = bar_ext(&alg, 6).unwrap();
    let large = bar_ext(&alg, 8).unwrap();
    assert_eq!(small.total, large.total.restricted(0, 6));
    let w = FiniteGradedAlgebra::truncated_polynomial(&[("w", 0)]);
    for n in 0..=10 {
        assert_eq!(bar_ext_stable(&w, n).unwrap().total, GradedDims::from_pairs((0..=n as i64).map(|k| (k, 1))));
    }
}
