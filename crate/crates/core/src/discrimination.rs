//! Minimum-error discrimination.
//!
//! A measurement `{M_i}` is globally optimal iff
//! `Σ_j η_jρ_jM_j − η_iρ_i ⪰ 0` for every `i`. [`check_optimality`] reports the
//! minimum eigenvalue of the Hermitian part of each of these operators, and
//! the fixed-point solver stops as soon as all of them are above `-tol`.

use serde::{Deserialize, Serialize};

use crate::ensembles::{Ensemble, Measurement};
use crate::linalg::{self, CMatrix};
use crate::operator::HermitianOperator;
use crate::{Error, Result};

/// Zero eigenvalues of `η₁ρ₁ − η₂ρ₂` within this band go to outcome 1.
pub const HELSTROM_TIE_TOL: f64 = 1e-12;
/// Relative cutoff below which eigenvalues of `T` count as kernel.
pub const PINV_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationResult {
    pub p_value: f64,
    pub measurement: Measurement,
    /// Minimum eigenvalue of `Σ_j η_jρ_jM_j − η_iρ_i` for each `i`.
    pub residual_min_eigs: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl DiscriminationResult {
    pub fn worst_residual(&self) -> f64 {
        self.residual_min_eigs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_lengths(ensemble: &Ensemble, measurement: &Measurement) -> Result<()> {
    if ensemble.len() != measurement.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states but {} measurement elements",
            ensemble.len(),
            measurement.len()
        )));
    }
    if ensemble.dims() != measurement.dims() {
        return Err(Error::DimensionMismatch(format!(
            "ensemble dims {} vs measurement dims {}",
            ensemble.dims(),
            measurement.dims()
        )));
    }
    Ok(())
}

/// `Σ_i η_i Tr(ρ_i M_i)`, clamped to `[0, 1]`.
pub fn success_probability(ensemble: &Ensemble, measurement: &Measurement) -> Result<f64> {
    check_lengths(ensemble, measurement)?;
    let mut p = 0.0;
    for ((eta, rho), m) in ensemble.priors().iter().zip(ensemble.states()).zip(measurement.elements()) {
        p += eta * rho.trace_inner(m)?;
    }
    debug_assert!((-1e-9..=1.0 + 1e-9).contains(&p), "success probability {p} outside [0, 1]");
    Ok(p.clamp(0.0, 1.0))
}

fn weighted_matrices(ensemble: &Ensemble) -> Vec<CMatrix> {
    (0..ensemble.len()).map(|i| ensemble.weighted(i).into_matrix()).collect()
}

fn residuals(weighted: &[CMatrix], elements: &[CMatrix]) -> Result<Vec<f64>> {
    let n = weighted[0].nrows();
    let mut y = CMatrix::zeros(n, n);
    for (r, m) in weighted.iter().zip(elements) {
        y += r * m;
    }
    let y = linalg::hermitian_part(&y);
    weighted
        .iter()
        .map(|r| Ok(linalg::eigh(&(&y - r))?.0[0]))
        .collect()
}

/// Minimum eigenvalue of (the Hermitian part of) `Σ_j η_jρ_jM_j − η_iρ_i`
/// for each `i`; all non-negative iff `M` attains the optimum.
pub fn check_optimality(ensemble: &Ensemble, measurement: &Measurement) -> Result<Vec<f64>> {
    check_lengths(ensemble, measurement)?;
    let elements: Vec<CMatrix> = measurement.elements().iter().map(|m| m.matrix().clone()).collect();
    residuals(&weighted_matrices(ensemble), &elements)
}

/// Projective measurement onto the non-negative and negative eigenspaces of
/// `η₁ρ₁ − η₂ρ₂`.
pub fn helstrom_two_state(ensemble: &Ensemble) -> Result<DiscriminationResult> {
    if ensemble.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "closed form needs exactly two states, got {}",
            ensemble.len()
        )));
    }
    let gamma = ensemble.weighted(0).sub(&ensemble.weighted(1))?;
    let spec = gamma.eig()?;
    let dims = ensemble.dims().clone();
    let first = linalg::spectral_sum(&spec.values, &spec.vectors, |l| {
        if l >= -HELSTROM_TIE_TOL { 1.0 } else { 0.0 }
    });
    let second = linalg::spectral_sum(&spec.values, &spec.vectors, |l| {
        if l >= -HELSTROM_TIE_TOL { 0.0 } else { 1.0 }
    });
    let measurement = Measurement::new(vec![
        HermitianOperator::from_hermitian_unchecked(dims.clone(), first),
        HermitianOperator::from_hermitian_unchecked(dims, second),
    ])?;
    let positive: f64 = spec.values.iter().filter(|&&l| l > 0.0).sum();
    let p_value = (ensemble.priors()[1] + positive).clamp(0.0, 1.0);
    let residual_min_eigs = check_optimality(ensemble, &measurement)?;
    let converged = residual_min_eigs.iter().all(|&r| r >= -1e-10);
    Ok(DiscriminationResult { p_value, measurement, residual_min_eigs, iterations: 0, converged })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iters: 5000, tol: 1e-8 }
    }
}

/// One step `M_i ← T^{-1/2} A_iM_iA_i T^{-1/2} + P_ker/n` with
/// `T = Σ_j A_jM_jA_j`. The plain step uses `A_i = η_iρ_i`; a diluted step uses
/// `A_i = 𝟙 + εη_iρ_i`, which has the same fixed points and moves less.
fn fixed_point_step(weighted: &[CMatrix], elements: &[CMatrix], dilution: Option<f64>) -> Result<Vec<CMatrix>> {
    let n = weighted.len();
    let dim = weighted[0].nrows();
    let sandwiches: Vec<CMatrix> = weighted
        .iter()
        .zip(elements)
        .map(|(r, m)| {
            let a = match dilution {
                Some(eps) => CMatrix::identity(dim, dim) + r.scale(eps),
                None => r.clone(),
            };
            linalg::hermitian_part(&(&a * m * &a))
        })
        .collect();
    let mut t = CMatrix::zeros(dim, dim);
    for s in &sandwiches {
        t += s;
    }
    let (vals, vecs) = linalg::eigh(&t)?;
    let cutoff = PINV_CUTOFF * vals.last().copied().unwrap_or(0.0).max(0.0);
    let inv_sqrt = linalg::spectral_sum(&vals, &vecs, |l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 });
    let kernel = linalg::spectral_sum(&vals, &vecs, |l| if l > cutoff { 0.0 } else { 1.0 / n as f64 });
    let raw: Vec<CMatrix> = sandwiches
        .iter()
        .map(|s| linalg::hermitian_part(&(&inv_sqrt * s * &inv_sqrt)) + &kernel)
        .collect();
    repair(raw)
}

/// Roundoff through `T^{-1/2}` grows with its condition number. Clip negative
/// eigenvalues, then restore `Σ M_i = 𝟙` by the congruence `S^{-1/2}·S^{-1/2}`.
fn repair(elements: Vec<CMatrix>) -> Result<Vec<CMatrix>> {
    let dim = elements[0].nrows();
    let mut clipped = Vec::with_capacity(elements.len());
    let mut sum = CMatrix::zeros(dim, dim);
    for m in elements {
        let (vals, vecs) = linalg::eigh(&m)?;
        let c = if vals[0] < 0.0 { linalg::spectral_sum(&vals, &vecs, |l| l.max(0.0)) } else { m };
        sum += &c;
        clipped.push(c);
    }
    let (vals, vecs) = linalg::eigh(&sum)?;
    if vals[0] <= 0.0 {
        return Err(Error::ConvergenceFailure);
    }
    let inv_sqrt = linalg::spectral_sum(&vals, &vecs, |l| 1.0 / l.sqrt());
    Ok(clipped
        .iter()
        .map(|m| linalg::hermitian_part(&(&inv_sqrt * m * &inv_sqrt)))
        .collect())
}

/// Dilution factors tried, relative to `1/max_i ‖η_iρ_i‖`, when a plain step
/// fails to increase the success probability.
const DILUTIONS: [f64; 4] = [1.0, 0.25, 1.0 / 16.0, 1.0 / 256.0];
/// Allowed decrease of the success probability per accepted step.
const MONOTONE_SLACK: f64 = 1e-12;

fn probability(weighted: &[CMatrix], elements: &[CMatrix]) -> f64 {
    weighted
        .iter()
        .zip(elements)
        .map(|(r, m)| linalg::trace_product(r, m).re)
        .sum()
}

/// A plain step, or failing that the first diluted step, that does not lower
/// the success probability. `None` when every candidate does: the iteration has
/// stalled at roundoff level.
fn next_iterate(weighted: &[CMatrix], elements: &[CMatrix], p: f64, scale: f64) -> Result<Option<Vec<CMatrix>>> {
    let plain = std::iter::once(None);
    let diluted = DILUTIONS.iter().map(|f| Some(f / scale));
    for dilution in plain.chain(diluted) {
        let next = fixed_point_step(weighted, elements, dilution)?;
        if probability(weighted, &next) >= p - MONOTONE_SLACK {
            return Ok(Some(next));
        }
    }
    Ok(None)
}

/// Fixed-point solver for the optimal guessing probability.
///
/// Returns the best iterate together with the success probability of every
/// iterate visited. Stops early, unconverged, once no step improves `p`.
pub fn solve_pg_with_history(
    ensemble: &Ensemble,
    opts: &SolverOptions,
) -> Result<(DiscriminationResult, Vec<f64>)> {
    if opts.max_iters == 0 || !(opts.tol >= 0.0) {
        return Err(Error::InvalidParameter("max_iters must be >= 1 and tol >= 0".into()));
    }
    let n = ensemble.len();
    let dim = ensemble.dims().total();
    let weighted = weighted_matrices(ensemble);
    let mut elements = vec![CMatrix::identity(dim, dim).unscale(n as f64); n];
    let scale = weighted.iter().map(|r| linalg::eigh(r).map(|(v, _)| v[dim - 1])).sum::<Result<f64>>()?;
    let mut history = Vec::new();
    let mut best: Option<(f64, Vec<CMatrix>, Vec<f64>)> = None;
    let mut converged = false;
    let mut iterations = 0;
    loop {
        let p = probability(&weighted, &elements);
        let res = residuals(&weighted, &elements)?;
        history.push(p);
        let done = res.iter().all(|&r| r >= -opts.tol);
        if best.as_ref().is_none_or(|(bp, _, _)| p >= *bp) || done {
            best = Some((p, elements.clone(), res));
        }
        if done {
            converged = true;
            break;
        }
        if iterations == opts.max_iters {
            break;
        }
        match next_iterate(&weighted, &elements, p, scale)? {
            Some(next) => elements = next,
            None => break,
        }
        iterations += 1;
    }
    let (_, elements, residual_min_eigs) = best.expect("at least one iterate");
    let dims = ensemble.dims().clone();
    let measurement = Measurement::new(
        elements
            .into_iter()
            .map(|m| HermitianOperator::from_hermitian_unchecked(dims.clone(), m))
            .collect(),
    )?;
    let p_value = success_probability(ensemble, &measurement)?;
    Ok((DiscriminationResult { p_value, measurement, residual_min_eigs, iterations, converged }, history))
}

pub fn solve_pg_iterative(ensemble: &Ensemble, opts: &SolverOptions) -> Result<DiscriminationResult> {
    Ok(solve_pg_with_history(ensemble, opts)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{example1, example2};
    use crate::operator::{Dims, StateVector};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn qubit(v: [f64; 2]) -> StateVector {
        let amps = DVector::from_vec(vec![Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0)]);
        StateVector::normalized(Dims::new(vec![2]).unwrap(), amps).unwrap()
    }

    #[test]
    fn reference_measurements() {
        let (e, m) = example1(2, 2).unwrap();
        assert_abs_diff_eq!(success_probability(&e, &m).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        let (e, m) = example2(2, 2).unwrap();
        assert_abs_diff_eq!(success_probability(&e, &m).unwrap(), 1.0, epsilon = 1e-12);
        let t = Measurement::trivial(e.dims(), e.len(), 0).unwrap();
        assert_abs_diff_eq!(success_probability(&e, &t).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn length_mismatch_rejected() {
        let (e, _) = example2(2, 2).unwrap();
        let t = Measurement::trivial(e.dims(), 2, 0).unwrap();
        assert!(matches!(success_probability(&e, &t), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn helstrom_examples() {
        let zero = qubit([1.0, 0.0]).projector();
        let plus = qubit([1.0, 1.0]).projector();
        let e = Ensemble::new(vec![(0.5, zero.clone()), (0.5, plus)]).unwrap();
        let r = helstrom_two_state(&e).unwrap();
        // (1 + sin(π/4)) / 2 for states π/4 apart
        assert_abs_diff_eq!(r.p_value, (1.0 + 0.5f64.sqrt()) / 2.0, epsilon = 1e-12);
        assert!(r.residual_min_eigs.iter().all(|&x| x >= -1e-10));

        let same = Ensemble::new(vec![(0.3, zero.clone()), (0.7, zero.clone())]).unwrap();
        assert_abs_diff_eq!(helstrom_two_state(&same).unwrap().p_value, 0.7, epsilon = 1e-12);

        let orth = Ensemble::new(vec![(0.2, zero), (0.8, qubit([0.0, 1.0]).projector())]).unwrap();
        assert_abs_diff_eq!(helstrom_two_state(&orth).unwrap().p_value, 1.0, epsilon = 1e-12);

        let (three, _) = example2(2, 2).unwrap();
        assert!(helstrom_two_state(&three).is_err());
    }

    #[test]
    fn optimality_residuals_for_reference_measurements() {
        let (e, m) = example2(2, 2).unwrap();
        assert!(check_optimality(&e, &m).unwrap().iter().all(|&r| r >= -1e-10));
        let (e, m) = example1(2, 2).unwrap();
        let r = check_optimality(&e, &m).unwrap();
        assert_abs_diff_eq!(r[3], -1.0 / 6.0, epsilon = 1e-12);

        let zero = qubit([1.0, 0.0]).projector();
        let one = qubit([0.0, 1.0]).projector();
        let orth = Ensemble::new(vec![(0.6, zero), (0.4, one)]).unwrap();
        let trivial = Measurement::trivial(orth.dims(), 2, 0).unwrap();
        assert!(check_optimality(&orth, &trivial).unwrap().iter().any(|&r| r < 0.0));
    }

    #[test]
    fn solver_on_perfectly_distinguishable_family() {
        let (e, _) = example2(2, 2).unwrap();
        let r = solve_pg_iterative(&e, &SolverOptions::default()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.p_value, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn solver_on_identical_states() {
        let rho = qubit([1.0, 2.0]).projector();
        let e = Ensemble::new(vec![(0.2, rho.clone()), (0.5, rho.clone()), (0.3, rho)]).unwrap();
        let r = solve_pg_iterative(&e, &SolverOptions::default()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.p_value, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn solver_matches_helstrom_on_qubits() {
        let zero = qubit([1.0, 0.0]).projector();
        let tilted = qubit([0.8, 0.6]).projector();
        let e = Ensemble::new(vec![(0.35, zero), (0.65, tilted)]).unwrap();
        let closed = helstrom_two_state(&e).unwrap();
        let iter = solve_pg_iterative(&e, &SolverOptions::default()).unwrap();
        assert!(iter.converged);
        assert_abs_diff_eq!(iter.p_value, closed.p_value, epsilon = 1e-6);
    }
}
