//! Ensembles, measurements and the reference families.
//!
//! The three reference families are parameterised by the number of parties
//! `m` and the local dimension `d`:
//!
//! - [`example1`]: `d + 2` states whose product-basis measurement is optimal
//!   among separable measurements but leaves a GHZ-shaped witness behind;
//! - [`example2`]: `d^m − d + 1` states that a separable measurement
//!   discriminates perfectly;
//! - [`example3`]: `d + 1` states where guessing the maximally mixed state is
//!   already separable-optimal.
//!
//! [`construct_two_state`] and [`construct_n_state`] turn entanglement
//! witnesses into ensembles on which separable measurements are strictly
//! suboptimal.

use serde::{Deserialize, Serialize};

use crate::cones::{detect_ew, ProductOperatorSum, SearchOptions};
use crate::operator::{ghz_state, Dims, HermitianOperator, PSD_TOL};
use crate::{Error, Result};

/// Tolerance on prior normalisation and state traces.
pub const PROBABILITY_TOL: f64 = 1e-10;
/// Entrywise completeness tolerance and certificate-expansion tolerance.
pub const MEASUREMENT_TOL: f64 = 1e-9;

/// `{η_i, ρ_i}`: states `ρ_i` prepared with probability `η_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::wire::EnsembleRepr", into = "crate::wire::EnsembleRepr")]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<HermitianOperator>,
}

impl Ensemble {
    pub fn new(states: Vec<(f64, HermitianOperator)>) -> Result<Self> {
        let Some((_, first)) = states.first() else {
            return Err(Error::InvalidEnsemble("ensemble is empty".into()));
        };
        let dims = first.dims().clone();
        let mut sum = 0.0;
        for (i, (eta, rho)) in states.iter().enumerate() {
            if !(*eta > 0.0) {
                return Err(Error::InvalidEnsemble(format!("prior {i} is not positive: {eta}")));
            }
            sum += eta;
            if rho.dims() != &dims {
                return Err(Error::InvalidEnsemble(format!("state {i} has dims {}, expected {dims}", rho.dims())));
            }
            let tr = rho.trace();
            if (tr - 1.0).abs() > PROBABILITY_TOL {
                return Err(Error::InvalidEnsemble(format!("state {i} has trace {tr}")));
            }
            let min = rho.min_eigenvalue()?;
            if min < -PSD_TOL {
                return Err(Error::InvalidEnsemble(format!("state {i} is not positive semidefinite (min eigenvalue {min:.3e})")));
            }
        }
        if (sum - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidEnsemble(format!("priors sum to {sum}")));
        }
        let (priors, states) = states.into_iter().unzip();
        Ok(Self { priors, states })
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    pub fn dims(&self) -> &Dims {
        self.states[0].dims()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    /// `η_i ρ_i`.
    pub fn weighted(&self, i: usize) -> HermitianOperator {
        self.states[i].scale(self.priors[i])
    }

    /// `Σ_i η_i ρ_i`.
    pub fn average(&self) -> HermitianOperator {
        let mut acc = HermitianOperator::zero(self.dims().clone());
        for (eta, rho) in self.priors.iter().zip(&self.states) {
            acc = acc.add_scaled(*eta, rho).expect("shared dims");
        }
        acc
    }
}

/// A POVM `{M_i}`, optionally with a product-operator certificate per element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::wire::MeasurementRepr", into = "crate::wire::MeasurementRepr")]
pub struct Measurement {
    elements: Vec<HermitianOperator>,
    certificates: Option<Vec<ProductOperatorSum>>,
}

impl Measurement {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidMeasurement("measurement has no elements".into()));
        };
        let dims = first.dims().clone();
        let mut sum = HermitianOperator::zero(dims.clone());
        for (i, m) in elements.iter().enumerate() {
            if m.dims() != &dims {
                return Err(Error::InvalidMeasurement(format!("element {i} has dims {}, expected {dims}", m.dims())));
            }
            let min = m.min_eigenvalue()?;
            if min < -PSD_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "element {i} is not positive semidefinite (min eigenvalue {min:.3e})"
                )));
            }
            sum = sum.add(m)?;
        }
        let dev = sum.max_abs_diff(&HermitianOperator::identity(dims))?;
        if dev > MEASUREMENT_TOL {
            return Err(Error::InvalidMeasurement(format!("elements sum to identity only within {dev:.3e}")));
        }
        Ok(Self { elements, certificates: None })
    }

    /// A measurement whose elements are certified separable.
    pub fn with_certificates(
        elements: Vec<HermitianOperator>,
        certificates: Vec<ProductOperatorSum>,
    ) -> Result<Self> {
        let mut m = Self::new(elements)?;
        if certificates.len() != m.elements.len() {
            return Err(Error::InvalidMeasurement(format!(
                "{} certificates for {} elements",
                certificates.len(),
                m.elements.len()
            )));
        }
        for (i, (cert, el)) in certificates.iter().zip(&m.elements).enumerate() {
            if cert.dims() != el.dims() {
                return Err(Error::InvalidMeasurement(format!("certificate {i} has dims {}", cert.dims())));
            }
            let err = cert.expand().sub(el)?.frobenius_norm();
            if err > MEASUREMENT_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "certificate {i} expands to an operator {err:.3e} away from its element"
                )));
            }
        }
        m.certificates = Some(certificates);
        Ok(m)
    }

    /// `M_guess = 𝟙`, every other element zero.
    pub fn trivial(dims: &Dims, n: usize, guess: usize) -> Result<Self> {
        if guess >= n {
            return Err(Error::IndexOutOfRange { index: guess, len: n });
        }
        let identity_cert = ProductOperatorSum::new(
            dims.clone(),
            vec![dims
                .as_slice()
                .iter()
                .map(|&d| nalgebra::DMatrix::identity(d, d))
                .collect()],
        )?;
        let elements = (0..n)
            .map(|i| {
                if i == guess {
                    HermitianOperator::identity(dims.clone())
                } else {
                    HermitianOperator::zero(dims.clone())
                }
            })
            .collect();
        let certs = (0..n)
            .map(|i| if i == guess { identity_cert.clone() } else { ProductOperatorSum::empty(dims.clone()) })
            .collect();
        Self::with_certificates(elements, certs)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dims(&self) -> &Dims {
        self.elements[0].dims()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn certificates(&self) -> Option<&[ProductOperatorSum]> {
        self.certificates.as_deref()
    }

    pub fn is_separable(&self) -> bool {
        self.certificates.is_some()
    }
}

fn check_family_params(m: usize, d: usize) -> Result<Dims> {
    if m < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!("need m >= 2 and d >= 2, got m={m}, d={d}")));
    }
    Dims::uniform(m, d)
}

/// Computational labels split into the `d` constant strings `jj…j` and the rest.
fn split_labels(dims: &Dims) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    (0..dims.total())
        .map(|i| dims.digits(i))
        .partition(|digits| digits.iter().all(|&x| x == digits[0]))
}

fn diagonal_projector(dims: &Dims, labels: &[Vec<usize>]) -> HermitianOperator {
    let mut diag = vec![0.0; dims.total()];
    for digits in labels {
        diag[dims.index(digits)] = 1.0;
    }
    HermitianOperator::from_real_diagonal(dims.clone(), &diag).expect("length matches")
}

fn label_slices(labels: &[Vec<usize>]) -> impl Iterator<Item = &[usize]> {
    labels.iter().map(Vec::as_slice)
}

/// `d + 2` states: `|j⟩⟨j|^{⊗m}`, the normalised complement of their span, and
/// `|Φ⟩⟨Φ|`; paired with the product-basis measurement that never guesses `Φ`.
pub fn example1(m: usize, d: usize) -> Result<(Ensemble, Measurement)> {
    let dims = check_family_params(m, d)?;
    let total = dims.total() as f64;
    let df = d as f64;
    let denom = total + df;
    let (diagonal, rest) = split_labels(&dims);

    let mut states = Vec::with_capacity(d + 2);
    let mut elements = Vec::with_capacity(d + 2);
    let mut certs = Vec::with_capacity(d + 2);
    for digits in &diagonal {
        let p = diagonal_projector(&dims, std::slice::from_ref(digits));
        states.push((1.0 / denom, p.clone()));
        elements.push(p);
        certs.push(ProductOperatorSum::basis_projector(&dims, digits)?);
    }
    let complement = diagonal_projector(&dims, &rest);
    states.push(((total - df) / denom, complement.scale(1.0 / (total - df))));
    elements.push(complement);
    certs.push(ProductOperatorSum::basis_projectors(&dims, label_slices(&rest))?);

    states.push((df / denom, ghz_state(m, d, 0)?.projector()));
    elements.push(HermitianOperator::zero(dims.clone()));
    certs.push(ProductOperatorSum::empty(dims.clone()));

    Ok((Ensemble::new(states)?, Measurement::with_certificates(elements, certs)?))
}

/// `|Φ⟩⟨Φ|` with weight `d/d^m` plus the `d^m − d` product basis states with
/// not-all-equal labels (lexicographic order), each with weight `1/d^m`.
pub fn example2(m: usize, d: usize) -> Result<(Ensemble, Measurement)> {
    let dims = check_family_params(m, d)?;
    let total = dims.total() as f64;
    let (diagonal, rest) = split_labels(&dims);

    let mut states = vec![(d as f64 / total, ghz_state(m, d, 0)?.projector())];
    let mut elements = vec![diagonal_projector(&dims, &diagonal)];
    let mut certs = vec![ProductOperatorSum::basis_projectors(&dims, label_slices(&diagonal))?];
    for digits in &rest {
        let p = diagonal_projector(&dims, std::slice::from_ref(digits));
        states.push((1.0 / total, p.clone()));
        elements.push(p);
        certs.push(ProductOperatorSum::basis_projector(&dims, digits)?);
    }
    Ok((Ensemble::new(states)?, Measurement::with_certificates(elements, certs)?))
}

/// The dual family `H_t = t Σ_i η_i ρ_i + (1 − t)/d^m 𝟙` for [`example2`].
///
/// `t = 1` is the average state; every `t ∈ [0, 1]` has unit trace.
pub fn example2_dual(ensemble: &Ensemble, t: f64) -> Result<HermitianOperator> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t must lie in [0, 1], got {t}")));
    }
    let dims = ensemble.dims().clone();
    let total = dims.total() as f64;
    ensemble.average().scale(t).add_scaled((1.0 - t) / total, &HermitianOperator::identity(dims))
}

/// The maximally mixed state with weight 1/2 and `d` noisy phased GHZ states.
pub fn example3(m: usize, d: usize) -> Result<Ensemble> {
    let dims = check_family_params(m, d)?;
    let total = dims.total() as f64;
    let df = d as f64;
    let pure = (df * df - df) / (total - df);
    let noise = (total - df * df) / (total * (total - df));
    let identity = HermitianOperator::identity(dims.clone());

    let mut states = vec![(0.5, identity.scale(1.0 / total))];
    for i in 2..=d + 1 {
        let phi = ghz_state(m, d, i as i64)?.projector();
        states.push((1.0 / (2.0 * df), phi.scale(pure).add_scaled(noise, &identity)?));
    }
    Ensemble::new(states)
}

/// Options shared by the witness-driven constructors.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstructOptions {
    pub search: SearchOptions,
    /// Skip the entanglement-witness check on the inputs. Block positivity of a
    /// general operator is only checked heuristically; callers that already
    /// hold a proof may bypass it.
    pub skip_witness_check: bool,
}

fn require_psd(op: &HermitianOperator, what: &str) -> Result<()> {
    let min = op.min_eigenvalue()?;
    if min < -PSD_TOL {
        return Err(Error::PreconditionViolation(format!(
            "{what} is not positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    Ok(())
}

fn require_witness(w: &HermitianOperator, what: &str, opts: &ConstructOptions) -> Result<()> {
    if opts.skip_witness_check {
        return Ok(());
    }
    let v = detect_ew(w, &opts.search)?;
    if v.is_ew {
        return Ok(());
    }
    let reason = if v.block_positivity.is_violated() {
        format!("not block positive (product expectation {:.3e})", v.block_positivity.min_value)
    } else {
        format!("positive semidefinite (min eigenvalue {:.3e})", v.min_eigenvalue)
    };
    Err(Error::PreconditionViolation(format!("{what} is not an entanglement witness: {reason}")))
}

/// Two states whose weighted difference is `W / Tr(2P + W)`.
pub fn construct_two_state(
    w: &HermitianOperator,
    p: &HermitianOperator,
    opts: &ConstructOptions,
) -> Result<Ensemble> {
    if w.dims() != p.dims() {
        return Err(Error::DimensionMismatch(format!("W {} vs P {}", w.dims(), p.dims())));
    }
    require_psd(p, "P")?;
    let p_plus_w = p.add(w)?;
    require_psd(&p_plus_w, "P + W")?;
    require_witness(w, "W", opts)?;
    let tr_p = p.trace();
    let tr_pw = p_plus_w.trace();
    if !(tr_p > 0.0 && tr_pw > 0.0) {
        return Err(Error::PreconditionViolation(format!(
            "Tr P = {tr_p} and Tr(P + W) = {tr_pw} must both be positive"
        )));
    }
    let total = tr_p + tr_pw;
    Ensemble::new(vec![
        (tr_pw / total, p_plus_w.scale(1.0 / tr_pw)),
        (tr_p / total, p.scale(1.0 / tr_p)),
    ])
}

/// Largest `λ` with `𝟙 − λW` positive semidefinite, `1/λ_max(W)`.
pub fn auto_lambda(w: &HermitianOperator) -> Result<f64> {
    let top = w.eig()?.max();
    if !(top > 0.0) {
        return Err(Error::PreconditionViolation(format!(
            "W has no positive eigenvalue (λ_max = {top:.3e})"
        )));
    }
    Ok(1.0 / top)
}

/// `ρ_1 = 𝟙/Tr 𝟙` and `ρ_i ∝ 𝟙 − λ_i W_i`, so that `η_1ρ_1 − η_iρ_i ∝ W_i`.
pub fn construct_n_state(
    witnesses: &[HermitianOperator],
    lambdas: &[f64],
    opts: &ConstructOptions,
) -> Result<Ensemble> {
    let Some(first) = witnesses.first() else {
        return Err(Error::PreconditionViolation("at least one witness is required".into()));
    };
    if lambdas.len() != witnesses.len() {
        return Err(Error::PreconditionViolation(format!(
            "{} lambdas for {} witnesses",
            lambdas.len(),
            witnesses.len()
        )));
    }
    let dims = first.dims().clone();
    let identity = HermitianOperator::identity(dims.clone());
    let mut shifted = Vec::with_capacity(witnesses.len());
    for (i, (w, &lambda)) in witnesses.iter().zip(lambdas).enumerate() {
        if w.dims() != &dims {
            return Err(Error::DimensionMismatch(format!("witness {i} has dims {}, expected {dims}", w.dims())));
        }
        if !(lambda > 0.0) {
            return Err(Error::PreconditionViolation(format!("lambda {i} must be positive, got {lambda}")));
        }
        let s = identity.add_scaled(-lambda, w)?;
        require_psd(&s, &format!("1 - lambda_{i} W_{i}"))?;
        require_witness(w, &format!("W_{i}"), opts)?;
        if !(s.trace() > 0.0) {
            return Err(Error::PreconditionViolation(format!("Tr(1 - lambda_{i} W_{i}) is not positive")));
        }
        shifted.push(s);
    }
    let n = witnesses.len() + 1;
    let dim = dims.total() as f64;
    let total = n as f64 * dim - witnesses.iter().zip(lambdas).map(|(w, l)| l * w.trace()).sum::<f64>();
    let mut states = vec![(dim / total, identity.scale(1.0 / dim))];
    for s in shifted {
        let tr = s.trace();
        states.push((tr / total, s.scale(1.0 / tr)));
    }
    Ensemble::new(states)
}

/// Least-squares factor `c` with `D ≈ cW`, and the Frobenius residual `‖D − cW‖`.
pub fn proportionality(d: &HermitianOperator, w: &HermitianOperator) -> Result<(f64, f64)> {
    let ww = w.trace_inner(w)?;
    if ww == 0.0 {
        return Ok((0.0, d.frobenius_norm()));
    }
    let c = d.trace_inner(w)? / ww;
    Ok((c, d.add_scaled(-c, w)?.frobenius_norm()))
}
