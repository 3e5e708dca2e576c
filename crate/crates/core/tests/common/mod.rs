//! Independent Čech computation of line bundle cohomology on the ruled
//! surface `P(O ⊕ O(a))` over `P¹`, used as an oracle.
//!
//! Cox ring `k[x0, x1, y0, y1]` with `deg x_i = (0, 1)`, `deg y0 = (1, 0)`,
//! `deg y1 = (1, -a)` (fiber degree first). The four charts are
//! `{x_i y_j ≠ 0}`. The Čech complex splits over Laurent monomials of the
//! given degree; each monomial contributes the complex of chart subsets
//! whose union inverts all of its negative exponents.

#![allow(dead_code)]

use cpinf::exact_linalg::{q, rank, SparseMatrix};

/// Exponents are searched in `[-BOX, BOX]`; every class of the bundles the
/// tests ask about sits well inside.
const BOX: i64 = 30;

/// Bitmask of inverted variables (x0, x1, y0, y1) on each chart.
const CHARTS: [u8; 4] = [0b0101, 0b1001, 0b0110, 0b1010];

pub fn ruled_cech(a: i64, m: i64, n: i64) -> [usize; 3] {
    // the piece of the complex for a monomial depends only on which
    // exponents are negative
    let by_sign: Vec<[usize; 3]> = (0u8..16).map(sign_pattern_cohomology).collect();
    let mut h = [0usize; 3];
    for l in -BOX..=BOX {
        let k = m - l;
        for j in -BOX..=BOX {
            let i = n + a * l - j;
            if [i, k].iter().any(|e| e.abs() > BOX) {
                continue;
            }
            let exps = [i, j, k, l];
            let neg: u8 = (0..4).filter(|&v| exps[v] < 0).fold(0, |acc, v| acc | (1 << v));
            for p in 0..3 {
                h[p] += by_sign[neg as usize][p];
            }
        }
    }
    h
}

fn sign_pattern_cohomology(neg: u8) -> [usize; 3] {
    let inverted = |s: u8| -> u8 {
        (0..4).filter(|i| s & (1 << i) != 0).fold(0, |acc, i| acc | CHARTS[i])
    };
    let cells: Vec<Vec<u8>> = (1..=4)
        .map(|k| {
            (1u8..16)
                .filter(|s| s.count_ones() == k && inverted(*s) & neg == neg)
                .collect()
        })
        .collect();
    let ranks: Vec<usize> = (0..3).map(|p| rank(&cech_differential(&cells[p], &cells[p + 1]))).collect();
    let mut h = [0usize; 3];
    for p in 0..3 {
        let before = if p == 0 { 0 } else { ranks[p - 1] };
        h[p] = cells[p].len() - ranks[p] - before;
    }
    h
}

fn cech_differential(src: &[u8], tgt: &[u8]) -> SparseMatrix {
    let mut trip = Vec::new();
    for (c, &s) in src.iter().enumerate() {
        for (r, &t) in tgt.iter().enumerate() {
            if t & s != s {
                continue;
            }
            let extra = t & !s;
            let pos = (0..4).filter(|&b| t & (1 << b) != 0 && (1 << b) < extra).count();
            trip.push((r, c, q(if pos % 2 == 0 { 1 } else { -1 })));
        }
    }
    SparseMatrix::from_triplets(tgt.len(), src.len(), trip).unwrap()
}
