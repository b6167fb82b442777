//! Separable-measurement bounds.
//!
//! For an ensemble `{η_i, ρ_i}` the dual operators are the Hermitian `H` with
//! every `H − η_iρ_i` block positive. The smallest trace over that set equals
//! the best success probability over separable measurements, and a separable
//! measurement `{M_i}` together with a dual `H` are simultaneously optimal iff
//! `Tr[M_i(H − η_iρ_i)] = 0` for all `i`. Whether separable measurements reach
//! the global optimum is then read off from whether some `H − η_iρ_i` is an
//! entanglement witness.
//!
//! Every report carries a `certified` flag: `true` when every block-positivity
//! verdict it relied on is exact (or a certified violation), `false` when a
//! conclusion rests on heuristic non-refutation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cones::{certify_block_positivity, BlockPositivityVerdict, SearchOptions};
use crate::discrimination::{solve_pg_iterative, success_probability, SolverOptions};
use crate::ensembles::{Ensemble, Measurement};
use crate::operator::{HermitianOperator, PSD_TOL};
use crate::{Error, Result};

/// Verification runs more restarts than a plain search since conclusions
/// depend on non-refutation.
pub const DEFAULT_VERIFY_RESTARTS: usize = 64;
/// Slackness and trace-equality tolerance.
pub const CERTIFICATE_TOL: f64 = 1e-9;
/// Minimum margin for the `p_G > p_SEP` cross-check.
pub const GAP_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub search: SearchOptions,
    pub tol: f64,
    /// Solver used for the global-optimum cross-check; `None` skips it.
    pub solver: Option<SolverOptions>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            search: SearchOptions::default().with_restarts(DEFAULT_VERIFY_RESTARTS),
            tol: CERTIFICATE_TOL,
            solver: Some(SolverOptions::default()),
        }
    }
}

/// Membership of `H` in the dual set and its witness-carrying subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsepReport {
    pub in_h_sep: bool,
    /// Block-positivity verdict for each `H − η_iρ_i`.
    pub per_state: Vec<BlockPositivityVerdict>,
    /// Minimum eigenvalue of each `H − η_iρ_i`.
    pub min_eigenvalues: Vec<f64>,
    pub in_h_ew: bool,
    /// Indices `j` with `H − η_jρ_j` an entanglement witness.
    pub ew_indices: Vec<usize>,
    pub trace_h: f64,
    pub certified: bool,
}

impl HsepReport {
    /// All `H − η_iρ_i` positive semidefinite.
    pub fn all_psd(&self, tol: f64) -> bool {
        self.min_eigenvalues.iter().all(|&l| l >= -tol)
    }
}

fn differences(ensemble: &Ensemble, h: &HermitianOperator) -> Result<Vec<HermitianOperator>> {
    if h.dims() != ensemble.dims() {
        return Err(Error::DimensionMismatch(format!("H {} vs ensemble {}", h.dims(), ensemble.dims())));
    }
    (0..ensemble.len()).map(|i| h.sub(&ensemble.weighted(i))).collect()
}

pub fn analyze_h(ensemble: &Ensemble, h: &HermitianOperator, opts: &SearchOptions) -> Result<HsepReport> {
    let diffs = differences(ensemble, h)?;
    let mut per_state = Vec::with_capacity(diffs.len());
    let mut min_eigenvalues = Vec::with_capacity(diffs.len());
    let mut ew_indices = Vec::new();
    for (i, d) in diffs.iter().enumerate() {
        let verdict = certify_block_positivity(d, opts)?;
        let min = d.min_eigenvalue()?;
        if !verdict.is_violated() && min < -opts.tol {
            ew_indices.push(i);
        }
        per_state.push(verdict);
        min_eigenvalues.push(min);
    }
    let in_h_sep = per_state.iter().all(|v| !v.is_violated());
    let certified = per_state.iter().all(BlockPositivityVerdict::is_certified);
    Ok(HsepReport {
        in_h_sep,
        in_h_ew: in_h_sep && !ew_indices.is_empty(),
        per_state,
        min_eigenvalues,
        ew_indices,
        trace_h: h.trace(),
        certified,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremId {
    /// Primal-dual equality at a certified pair.
    #[serde(rename = "1")]
    StrongDuality,
    /// Complementary slackness.
    #[serde(rename = "2")]
    Slackness,
    /// A separable measurement leaving a witness: strict gap.
    #[serde(rename = "3")]
    WitnessGap,
    /// A dual operator with all differences PSD: equality.
    #[serde(rename = "4")]
    Equality,
    /// Guessing a single state is separable-optimal.
    #[serde(rename = "c1")]
    TrivialGuess,
    /// Under the trivial-guess condition, a gap iff some difference is a witness.
    #[serde(rename = "c2")]
    TrivialGuessGap,
}

/// `⟨v|D_j|v⟩` for the minimum eigenvector `v` of a witness `D_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub index: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Ensemble indices the per-index lists below refer to.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub indices: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub slackness: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub verdicts: Vec<BlockPositivityVerdict>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub min_eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub ew_indices: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub defects: Vec<Defect>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub success_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_g_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub holds: bool,
    /// The conclusion does not rest on heuristic non-refutation.
    pub certified: bool,
    pub p_sep_value: Option<f64>,
    /// `p_SEP < p_G` is established.
    pub gap_certified: bool,
    pub details: Evidence,
}

/// Process-level outcome of a verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    NotHolds,
    Inconclusive,
}

impl TheoremReport {
    pub fn outcome(&self) -> Outcome {
        match (self.holds, self.certified) {
            (_, false) => Outcome::Inconclusive,
            (true, true) => Outcome::Holds,
            (false, true) => Outcome::NotHolds,
        }
    }
}

fn require_certificates(m: &Measurement) -> Result<()> {
    if m.is_separable() {
        Ok(())
    } else {
        Err(Error::CertificateMissing)
    }
}

fn defects(report: &HsepReport) -> Vec<Defect> {
    report
        .ew_indices
        .iter()
        .map(|&j| Defect { index: j, value: report.min_eigenvalues[j] })
        .collect()
}

/// Complementary slackness between a certified separable measurement and a
/// dual operator; when it holds both are optimal and `p_SEP = Tr H`.
pub fn verify_qsep_certificate(
    ensemble: &Ensemble,
    measurement: &Measurement,
    h: &HermitianOperator,
    opts: &VerifyOptions,
) -> Result<TheoremReport> {
    require_certificates(measurement)?;
    if measurement.len() != ensemble.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states but {} measurement elements",
            ensemble.len(),
            measurement.len()
        )));
    }
    let analysis = analyze_h(ensemble, h, &opts.search)?;
    let diffs = differences(ensemble, h)?;
    let slackness = measurement
        .elements()
        .iter()
        .zip(&diffs)
        .map(|(m, d)| m.trace_inner(d))
        .collect::<Result<Vec<_>>>()?;
    let p = success_probability(ensemble, measurement)?;
    let slack_ok = slackness.iter().all(|s| s.abs() <= opts.tol);
    let trace_ok = (p - analysis.trace_h).abs() <= opts.tol;
    let holds = analysis.in_h_sep && slack_ok && trace_ok;

    let mut notes = Vec::new();
    if !analysis.in_h_sep {
        notes.push("H is not a dual operator: some H - eta_i rho_i is not block positive".into());
    }
    if analysis.in_h_sep && slack_ok && !trace_ok {
        notes.push("slackness holds but p differs from Tr H beyond tolerance".into());
    }
    Ok(TheoremReport {
        theorem: TheoremId::Slackness,
        holds,
        certified: analysis.certified || !analysis.in_h_sep,
        p_sep_value: holds.then_some(p),
        gap_certified: false,
        details: Evidence {
            indices: (0..ensemble.len()).collect(),
            slackness,
            min_eigenvalues: analysis.min_eigenvalues,
            ew_indices: analysis.ew_indices,
            verdicts: analysis.per_state,
            trace_h: Some(analysis.trace_h),
            success_probability: Some(p),
            notes,
            ..Default::default()
        },
    })
}

/// Block positivity of `η_pρ_p − η_iρ_i` for all `i ≠ p`, which makes the
/// trivial guess `p` separable-optimal with `p_SEP = η_p`.
pub fn check_corollary1(ensemble: &Ensemble, pivot: usize, opts: &SearchOptions) -> Result<TheoremReport> {
    if pivot >= ensemble.len() {
        return Err(Error::IndexOutOfRange { index: pivot, len: ensemble.len() });
    }
    let base = ensemble.weighted(pivot);
    let mut indices = Vec::new();
    let mut verdicts = Vec::new();
    let mut min_eigenvalues = Vec::new();
    for i in (0..ensemble.len()).filter(|&i| i != pivot) {
        let d = base.sub(&ensemble.weighted(i))?;
        indices.push(i);
        verdicts.push(certify_block_positivity(&d, opts)?);
        min_eigenvalues.push(d.min_eigenvalue()?);
    }
    let violated = verdicts.iter().any(BlockPositivityVerdict::is_violated);
    let holds = !violated;
    let certified = violated || verdicts.iter().all(BlockPositivityVerdict::is_certified);
    let mut notes = Vec::new();
    if holds {
        notes.push(format!(
            "eta_{pivot} rho_{pivot} is the unique trace-minimising dual operator (stated, not verified)"
        ));
    }
    Ok(TheoremReport {
        theorem: TheoremId::TrivialGuess,
        holds,
        certified,
        p_sep_value: holds.then(|| ensemble.priors()[pivot]),
        gap_certified: false,
        details: Evidence { indices, verdicts, min_eigenvalues, trace_h: Some(base.trace()), notes, ..Default::default() },
    })
}

/// With `H = Σ_i η_iρ_iM_i` for a certified separable measurement: if some
/// `H − η_jρ_j` is a witness, the measurement is separable-optimal and
/// strictly worse than the global optimum.
pub fn verify_theorem3(
    ensemble: &Ensemble,
    measurement: &Measurement,
    opts: &VerifyOptions,
) -> Result<TheoremReport> {
    require_certificates(measurement)?;
    if measurement.len() != ensemble.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states but {} measurement elements",
            ensemble.len(),
            measurement.len()
        )));
    }
    let dims = ensemble.dims().clone();
    let n = dims.total();
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for (i, m) in measurement.elements().iter().enumerate() {
        y += ensemble.weighted(i).matrix() * m.matrix();
    }
    let p = success_probability(ensemble, measurement)?;
    let h = match HermitianOperator::from_matrix(dims, y) {
        Ok(h) => h,
        Err(Error::NotHermitian { deviation }) => {
            return Ok(TheoremReport {
                theorem: TheoremId::WitnessGap,
                holds: false,
                certified: true,
                p_sep_value: None,
                gap_certified: false,
                details: Evidence {
                    success_probability: Some(p),
                    notes: vec![format!("sum of eta_i rho_i M_i is not Hermitian (deviation {deviation:.3e})")],
                    ..Default::default()
                },
            })
        }
        Err(e) => return Err(e),
    };
    let analysis = analyze_h(ensemble, &h, &opts.search)?;
    let holds = analysis.in_h_ew;
    let mut notes = Vec::new();
    let p_g_estimate = match (&opts.solver, holds) {
        (Some(solver), true) => {
            let pg = solve_pg_iterative(ensemble, solver)?.p_value;
            if pg <= p + GAP_MARGIN {
                notes.push(format!("cross-check: solver estimate {pg} does not exceed p_SEP {p} by {GAP_MARGIN}"));
            }
            Some(pg)
        }
        _ => None,
    };
    let any_violated = analysis.per_state.iter().any(BlockPositivityVerdict::is_violated);
    Ok(TheoremReport {
        theorem: TheoremId::WitnessGap,
        holds,
        certified: analysis.certified || any_violated,
        p_sep_value: holds.then_some(p),
        gap_certified: holds,
        details: Evidence {
            indices: (0..ensemble.len()).collect(),
            defects: defects(&analysis),
            min_eigenvalues: analysis.min_eigenvalues,
            ew_indices: analysis.ew_indices,
            verdicts: analysis.per_state,
            trace_h: Some(analysis.trace_h),
            success_probability: Some(p),
            p_g_estimate,
            notes,
            ..Default::default()
        },
    })
}

/// Given `Tr H = q_SEP`, separable measurements are globally optimal iff
/// every `H − η_iρ_i` is positive semidefinite.
pub fn verify_theorem4(
    ensemble: &Ensemble,
    h: &HermitianOperator,
    q_candidate: f64,
    opts: &VerifyOptions,
) -> Result<TheoremReport> {
    let trace = h.trace();
    if (trace - q_candidate).abs() > CERTIFICATE_TOL {
        return Err(Error::TraceMismatch { trace, candidate: q_candidate });
    }
    let min_eigenvalues = differences(ensemble, h)?
        .iter()
        .map(HermitianOperator::min_eigenvalue)
        .collect::<Result<Vec<_>>>()?;
    let holds = min_eigenvalues.iter().all(|&l| l >= -opts.tol.max(PSD_TOL));
    let mut notes = Vec::new();
    if holds {
        notes.push("p_SEP = p_G = q_candidate, given that q_candidate is the dual optimum".into());
    }
    Ok(TheoremReport {
        theorem: TheoremId::Equality,
        holds,
        certified: true,
        p_sep_value: holds.then_some(q_candidate),
        gap_certified: false,
        details: Evidence {
            indices: (0..ensemble.len()).collect(),
            min_eigenvalues,
            trace_h: Some(trace),
            notes,
            ..Default::default()
        },
    })
}

/// Under the trivial-guess condition, `p_SEP < p_G` iff some
/// `η_pρ_p − η_iρ_i` is an entanglement witness.
pub fn check_corollary2(ensemble: &Ensemble, pivot: usize, opts: &SearchOptions) -> Result<TheoremReport> {
    let base = check_corollary1(ensemble, pivot, opts)?;
    if !base.holds {
        return Err(Error::PreconditionViolation(format!(
            "trivial-guess condition fails for pivot {pivot}: some eta_p rho_p - eta_i rho_i is not block positive"
        )));
    }
    let mut details = base.details;
    details.defects = details
        .indices
        .iter()
        .zip(&details.verdicts)
        .zip(&details.min_eigenvalues)
        .filter(|((_, v), &l)| !v.is_violated() && l < -opts.tol)
        .map(|((&index, _), &value)| Defect { index, value })
        .collect();
    details.ew_indices = details.defects.iter().map(|d| d.index).collect();
    let holds = !details.defects.is_empty();
    Ok(TheoremReport {
        theorem: TheoremId::TrivialGuessGap,
        holds,
        certified: base.certified,
        p_sep_value: base.p_sep_value,
        gap_certified: holds,
        details,
    })
}

/// Outcome of [`probe_corollary1_uniqueness`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessProbe {
    pub samples: usize,
    /// Perturbations shown to leave the dual set.
    pub refuted: usize,
    /// Sample indices whose perturbation was not refuted; any entry is a
    /// candidate counterexample to uniqueness.
    pub unrefuted: Vec<usize>,
}

/// Diagnostic: perturbs `η_pρ_p` by random traceless Hermitian operators of
/// Frobenius norm `scale` and checks that each perturbation leaves the dual
/// set.
pub fn probe_corollary1_uniqueness(
    ensemble: &Ensemble,
    pivot: usize,
    samples: usize,
    scale: f64,
    opts: &SearchOptions,
) -> Result<UniquenessProbe> {
    if pivot >= ensemble.len() {
        return Err(Error::IndexOutOfRange { index: pivot, len: ensemble.len() });
    }
    let dims = ensemble.dims().clone();
    let n = dims.total();
    let base = ensemble.weighted(pivot);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut refuted = 0;
    let mut unrefuted = Vec::new();
    for s in 0..samples {
        let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
            Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let mut x = (&g + g.adjoint()).scale(0.5);
        let shift = x.trace() / n as f64;
        for i in 0..n {
            x[(i, i)] -= shift;
        }
        let norm = x.norm();
        if norm == 0.0 {
            continue;
        }
        let x = HermitianOperator::from_matrix(dims.clone(), x.scale(scale / norm))?;
        let report = analyze_h(ensemble, &base.add(&x)?, opts)?;
        if report.in_h_sep {
            unrefuted.push(s);
        } else {
            refuted += 1;
        }
    }
    Ok(UniquenessProbe { samples, refuted, unrefuted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{example1, example2, example2_dual, example3};
    use crate::operator::{Dims, StateVector};
    use approx::assert_abs_diff_eq;

    fn quick() -> VerifyOptions {
        VerifyOptions { solver: None, ..Default::default() }
    }

    #[test]
    fn analyze_example2_duals() {
        let (e, _) = example2(2, 2).unwrap();
        let opts = quick().search;
        let h = e.average();
        let r = analyze_h(&e, &h, &opts).unwrap();
        assert!(r.in_h_sep && !r.in_h_ew && r.certified);
        assert_abs_diff_eq!(r.trace_h, 1.0, epsilon = 1e-12);

        let ht = example2_dual(&e, 0.5).unwrap();
        let r = analyze_h(&e, &ht, &opts).unwrap();
        assert!(r.in_h_ew && r.certified);
        assert_eq!(r.ew_indices, vec![0]);
        let phi = crate::operator::ghz_state(2, 2, 0).unwrap();
        let d0 = ht.sub(&e.weighted(0)).unwrap();
        assert_abs_diff_eq!(d0.expectation(phi.amplitudes()).unwrap(), -0.125, epsilon = 1e-12);
    }

    #[test]
    fn zero_dual_is_violated() {
        let (e, _) = example2(2, 2).unwrap();
        let r = analyze_h(&e, &HermitianOperator::zero(e.dims().clone()), &quick().search).unwrap();
        assert!(!r.in_h_sep);
        for v in &r.per_state {
            assert!(v.is_violated());
            assert!(v.witness.is_some());
        }
    }

    #[test]
    fn qsep_certificates() {
        let (e, m) = example1(2, 2).unwrap();
        let r = verify_theorem3(&e, &m, &quick()).unwrap();
        let h = {
            let mut acc = HermitianOperator::zero(e.dims().clone());
            for i in 0..e.len() {
                let prod = e.weighted(i).matrix() * m.elements()[i].matrix();
                acc = acc.add(&HermitianOperator::from_matrix(e.dims().clone(), prod).unwrap()).unwrap();
            }
            acc
        };
        assert!(r.holds);
        let q = verify_qsep_certificate(&e, &m, &h, &quick()).unwrap();
        assert!(q.holds && q.certified);
        assert_abs_diff_eq!(q.p_sep_value.unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        assert!(q.details.slackness.iter().all(|s| s.abs() < 1e-10));

        let (e, m) = example2(2, 2).unwrap();
        let q = verify_qsep_certificate(&e, &m, &e.average(), &quick()).unwrap();
        assert!(q.holds);
        assert_abs_diff_eq!(q.p_sep_value.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn certificate_required() {
        let (e, m) = example2(2, 2).unwrap();
        let plain = Measurement::new(m.elements().to_vec()).unwrap();
        assert_eq!(verify_theorem3(&e, &plain, &quick()).unwrap_err(), Error::CertificateMissing);
        assert_eq!(
            verify_qsep_certificate(&e, &plain, &e.average(), &quick()).unwrap_err(),
            Error::CertificateMissing
        );
    }

    #[test]
    fn theorem3_examples() {
        let (e, m) = example1(2, 2).unwrap();
        let r = verify_theorem3(&e, &m, &quick()).unwrap();
        assert!(r.holds && r.gap_certified && r.certified);
        assert_eq!(r.outcome(), Outcome::Holds);
        assert_eq!(r.details.ew_indices, vec![3]);
        assert_abs_diff_eq!(r.details.defects[0].value, -1.0 / 6.0, epsilon = 1e-12);

        let (e, m) = example2(2, 2).unwrap();
        let r = verify_theorem3(&e, &m, &quick()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.outcome(), Outcome::NotHolds);
    }

    #[test]
    fn theorem4_examples() {
        let (e, _) = example2(2, 2).unwrap();
        let r = verify_theorem4(&e, &e.average(), 1.0, &quick()).unwrap();
        assert!(r.holds);
        assert_eq!(r.p_sep_value, Some(1.0));
        let h0 = example2_dual(&e, 0.0).unwrap();
        assert!(!verify_theorem4(&e, &h0, 1.0, &quick()).unwrap().holds);
        assert!(matches!(
            verify_theorem4(&e, &e.average().scale(2.0), 1.0, &quick()),
            Err(Error::TraceMismatch { .. })
        ));
    }

    #[test]
    fn corollary_examples() {
        let opts = quick().search;
        let e = example3(2, 2).unwrap();
        let c1 = check_corollary1(&e, 0, &opts).unwrap();
        assert!(c1.holds && c1.certified);
        assert_eq!(c1.p_sep_value, Some(0.5));
        let c2 = check_corollary2(&e, 0, &opts).unwrap();
        assert!(c2.holds && c2.gap_certified);
        for d in &c2.details.defects {
            assert_abs_diff_eq!(d.value, -1.0 / 8.0, epsilon = 1e-12);
        }

        let (e1, _) = example1(2, 2).unwrap();
        let c1 = check_corollary1(&e1, 0, &opts).unwrap();
        assert!(!c1.holds && c1.certified);
        assert!(matches!(check_corollary2(&e1, 0, &opts), Err(Error::PreconditionViolation(_))));
        assert!(check_corollary1(&e1, 9, &opts).is_err());
    }

    #[test]
    fn corollaries_on_identical_states() {
        let opts = quick().search;
        let rho = StateVector::basis(Dims::uniform(2, 2).unwrap(), &[0, 1]).unwrap().projector();
        let e = Ensemble::new(vec![(0.9, rho.clone()), (0.1, rho)]).unwrap();
        let c1 = check_corollary1(&e, 0, &opts).unwrap();
        assert!(c1.holds);
        assert_abs_diff_eq!(c1.p_sep_value.unwrap(), 0.9, epsilon = 1e-15);
        let c2 = check_corollary2(&e, 0, &opts).unwrap();
        assert!(!c2.holds && !c2.gap_certified);
    }

    #[test]
    fn uniqueness_probe_refutes_perturbations() {
        let e = example3(2, 2).unwrap();
        let probe = probe_corollary1_uniqueness(&e, 0, 5, 1e-2, &SearchOptions::default()).unwrap();
        assert_eq!(probe.refuted, 5);
        assert!(probe.unrefuted.is_empty());
    }
}
