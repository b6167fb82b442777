#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use sepdisc::{ghz_state, Dims, HermitianOperator};

pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

pub fn random_hermitian(dims: &Dims, rng: &mut impl Rng) -> HermitianOperator {
    let n = dims.total();
    let g = ginibre(n, n, rng);
    HermitianOperator::from_matrix(dims.clone(), (&g + g.adjoint()).scale(0.5)).unwrap()
}

pub fn random_psd(dims: &Dims, rank: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = ginibre(dims.total(), rank, rng);
    HermitianOperator::from_matrix(dims.clone(), &g * g.adjoint()).unwrap()
}

/// Density operator of the given rank.
pub fn random_state(dims: &Dims, rank: usize, rng: &mut impl Rng) -> HermitianOperator {
    let p = random_psd(dims, rank, rng);
    let tr = p.trace();
    p.scale(1.0 / tr)
}

/// `𝟙 − d|Φ_j⟩⟨Φ_j|`.
pub fn ghz_witness(m: usize, d: usize, j: i64) -> HermitianOperator {
    HermitianOperator::identity(Dims::uniform(m, d).unwrap())
        .add_scaled(-(d as f64), &ghz_state(m, d, j).unwrap().projector())
        .unwrap()
}

pub fn swap() -> HermitianOperator {
    let dims = Dims::uniform(2, 2).unwrap();
    let mut diag = DMatrix::<Complex64>::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            diag[(2 * a + b, 2 * b + a)] = Complex64::new(1.0, 0.0);
        }
    }
    HermitianOperator::from_matrix(dims, diag).unwrap()
}

/// Pairs `(m, d)` with `d^m ≤ 81`.
pub fn small_pairs() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in 2..=6 {
        for d in 2..=9 {
            if (d as u64).pow(m as u32) <= 81 {
                out.push((m, d));
            }
        }
    }
    out
}
