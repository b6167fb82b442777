//! Separable operators, block positivity and entanglement witnesses.
//!
//! A Hermitian operator is block positive when `⟨e|E|e⟩ ≥ 0` for every product
//! vector `|e⟩`. Deciding this is hard in general, so verdicts distinguish a
//! certified violation (a product vector with negative expectation), an exact
//! certificate of block positivity, and plain non-refutation by search.
//!
//! Exact certificates come from two facts:
//!
//! - for `a𝟙 − b|ψ⟩⟨ψ|` the product minimum is `a − b·max_e |⟨e|ψ⟩|²`, and the
//!   overlap is bounded above by `min_k λ_max(ρ_k)` over the single-party
//!   marginals of `ψ`; when search attains that bound the decision is exact;
//! - `W ≥ λ₁𝟙 − (λ₁ − λ₀)|v₀⟩⟨v₀|` for the two smallest eigenvalues of `W`, so
//!   an exactly block-positive lower bound certifies `W` as well.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMatrix, CVector};
use crate::operator::{
    Dims, HermitianOperator, ProductVector, StateVector, HERMITIAN_TOL, PSD_TOL,
};
use crate::{Error, Result};

/// Sweeps stop once a full pass improves the objective by less than this.
pub const SWEEP_TOL: f64 = 1e-12;
/// Maximum eigenvalue spread tolerated when recognising `a𝟙 − b|ψ⟩⟨ψ|`.
pub const RANK_ONE_FORM_TOL: f64 = 1e-10;

/// `Σ_l ⊗_k E_{l,k}` with every local factor positive semidefinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "crate::wire::ProductOperatorSumRepr",
    into = "crate::wire::ProductOperatorSumRepr"
)]
pub struct ProductOperatorSum {
    dims: Dims,
    terms: Vec<Vec<CMatrix>>,
}

impl ProductOperatorSum {
    pub fn new(dims: Dims, terms: Vec<Vec<DMatrix<Complex64>>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(terms.len());
        for (l, term) in terms.into_iter().enumerate() {
            if term.len() != dims.parties() {
                return Err(Error::InvalidCertificate(format!(
                    "term {l} has {} factors for {} parties",
                    term.len(),
                    dims.parties()
                )));
            }
            let mut factors = Vec::with_capacity(term.len());
            for (k, f) in term.into_iter().enumerate() {
                let d = dims.local(k);
                if f.shape() != (d, d) {
                    return Err(Error::InvalidCertificate(format!(
                        "term {l}, party {k}: factor is {}x{}, expected {d}x{d}",
                        f.nrows(),
                        f.ncols()
                    )));
                }
                let dev = linalg::max_hermitian_deviation(&f);
                if dev > HERMITIAN_TOL {
                    return Err(Error::InvalidCertificate(format!(
                        "term {l}, party {k}: factor not Hermitian (deviation {dev:.3e})"
                    )));
                }
                let f = linalg::hermitian_part(&f);
                let (vals, _) = linalg::eigh(&f)?;
                if vals.first().is_some_and(|&v| v < -PSD_TOL) {
                    return Err(Error::InvalidCertificate(format!(
                        "term {l}, party {k}: factor not positive semidefinite (min eigenvalue {:.3e})",
                        vals[0]
                    )));
                }
                factors.push(f);
            }
            clean.push(factors);
        }
        Ok(Self { dims, terms: clean })
    }

    /// The empty sum, i.e. a certificate for `0`.
    pub fn empty(dims: Dims) -> Self {
        Self { dims, terms: Vec::new() }
    }

    /// Single-term certificate `⊗_k |i_k⟩⟨i_k|`.
    pub fn basis_projector(dims: &Dims, digits: &[usize]) -> Result<Self> {
        Self::basis_projectors(dims, std::iter::once(digits))
    }

    /// `Σ ⊗_k |i_k⟩⟨i_k|` over the given computational labels.
    pub fn basis_projectors<'a, I>(dims: &Dims, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [usize]>,
    {
        let mut terms = Vec::new();
        for digits in labels {
            let e = ProductVector::basis(dims, digits)?;
            terms.push(e.locals().iter().map(|v| v * v.adjoint()).collect());
        }
        Ok(Self { dims: dims.clone(), terms })
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn terms(&self) -> &[Vec<DMatrix<Complex64>>] {
        &self.terms
    }

    pub fn expand(&self) -> HermitianOperator {
        let n = self.dims.total();
        let mut acc = CMatrix::zeros(n, n);
        for term in &self.terms {
            acc += linalg::kron_all(term);
        }
        HermitianOperator::from_hermitian_unchecked(self.dims.clone(), acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Violated,
    NoViolationFound,
    ExactBlockPositive,
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Alternating minimisation over product vectors.
    ProductSearch,
    /// Exact rule for `a𝟙 − b|ψ⟩⟨ψ|`.
    RankOneShift,
    /// The operator is positive semidefinite.
    Psd,
    /// A rank-one-shift lower bound built from the two smallest eigenvalues.
    SpectralBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPositivityVerdict {
    pub status: Status,
    pub method: Method,
    /// Smallest `⟨e|E|e⟩` found over product vectors.
    pub min_value: f64,
    pub witness: Option<ProductVector>,
    pub restarts_used: usize,
}

impl BlockPositivityVerdict {
    pub fn is_violated(&self) -> bool {
        self.status == Status::Violated
    }

    /// A violation or an exact certificate, as opposed to non-refutation.
    pub fn is_certified(&self) -> bool {
        self.status != Status::NoViolationFound
    }
}

/// Parameters of the randomised product-vector searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 32, max_iters: 200, tol: PSD_TOL, seed: 0 }
    }
}

impl SearchOptions {
    pub fn with_restarts(self, restarts: usize) -> Self {
        Self { restarts, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameter("restarts and max_iters must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be non-negative, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Per-restart generator; the stream depends only on `(seed, restart)`.
fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Complex-normal local vectors, normalised.
pub fn random_product_vector(dims: &Dims, rng: &mut impl rand::Rng) -> ProductVector {
    let locals = dims
        .as_slice()
        .iter()
        .map(|&d| {
            let mut v = CVector::from_fn(d, |_, _| {
                Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
            });
            if linalg::normalize(&mut v) == 0.0 {
                v[0] = Complex64::new(1.0, 0.0);
            }
            v
        })
        .collect();
    ProductVector::from_normalized(locals)
}

/// Joint vector `e_0 ⊗ … ⊗ |b⟩ ⊗ … ⊗ e_{m-1}` with the basis vector at `party`.
fn slot_vector(locals: &[CVector], party: usize, b: usize) -> CVector {
    let mut basis = CVector::zeros(locals[party].len());
    basis[b] = Complex64::new(1.0, 0.0);
    linalg::kron_vectors(
        locals
            .iter()
            .enumerate()
            .map(|(k, v)| if k == party { &basis } else { v }),
    )
}

/// `A[a, b] = ⟨e_{-k}, a| E |e_{-k}, b⟩`.
fn contract_operator(e: &CMatrix, locals: &[CVector], party: usize) -> CMatrix {
    let d = locals[party].len();
    let slots: Vec<CVector> = (0..d).map(|b| slot_vector(locals, party, b)).collect();
    let images: Vec<CVector> = slots.iter().map(|v| e * v).collect();
    let a = CMatrix::from_fn(d, d, |r, c| slots[r].dotc(&images[c]));
    linalg::hermitian_part(&a)
}

/// `c[a] = ⟨e_{-k}, a|ψ⟩`.
fn contract_vector(psi: &CVector, locals: &[CVector], party: usize) -> CVector {
    let d = locals[party].len();
    CVector::from_fn(d, |a, _| slot_vector(locals, party, a).dotc(psi))
}

/// Alternating minimisation of `⟨e|E|e⟩` from `start`.
///
/// Returns the final product vector and the objective after every sweep,
/// starting with the value at `start`.
pub fn minimize_from(
    e: &HermitianOperator,
    start: ProductVector,
    max_iters: usize,
) -> Result<(ProductVector, Vec<f64>)> {
    if start.dims() != *e.dims() {
        return Err(Error::DimensionMismatch(format!("start vector {} vs operator {}", start.dims(), e.dims())));
    }
    let mut locals = start.locals().to_vec();
    let mut value = e.expectation(&linalg::kron_vectors(&locals))?;
    let mut trace = vec![value];
    for _ in 0..max_iters {
        let prev = value;
        for k in 0..locals.len() {
            let a = contract_operator(e.matrix(), &locals, k);
            let (vals, vecs) = linalg::eigh(&a)?;
            locals[k] = vecs.column(0).into_owned();
            value = vals[0];
        }
        trace.push(value);
        if prev - value < SWEEP_TOL {
            break;
        }
    }
    Ok((ProductVector::from_normalized(locals), trace))
}

/// Alternating maximisation of `|⟨e|ψ⟩|²` from `start`, with per-sweep values.
pub fn maximize_overlap_from(
    psi: &StateVector,
    start: ProductVector,
    max_iters: usize,
) -> Result<(ProductVector, Vec<f64>)> {
    if start.dims() != *psi.dims() {
        return Err(Error::DimensionMismatch(format!("start vector {} vs state {}", start.dims(), psi.dims())));
    }
    let amps = psi.amplitudes();
    let mut locals = start.locals().to_vec();
    let mut value = linalg::kron_vectors(&locals).dotc(amps).norm_sqr();
    let mut trace = vec![value];
    for _ in 0..max_iters {
        let prev = value;
        for k in 0..locals.len() {
            let mut c = contract_vector(amps, &locals, k);
            let norm = linalg::normalize(&mut c);
            if norm > 0.0 {
                locals[k] = c;
            }
            value = norm * norm;
        }
        trace.push(value);
        if value - prev < SWEEP_TOL {
            break;
        }
    }
    Ok((ProductVector::from_normalized(locals), trace))
}

/// Heuristic search for a product vector with negative expectation.
pub fn min_product_expectation(
    e: &HermitianOperator,
    opts: &SearchOptions,
) -> Result<BlockPositivityVerdict> {
    opts.validate()?;
    let dims = e.dims().clone();
    let mut best: Option<(f64, ProductVector)> = None;
    for r in 0..opts.restarts {
        let start = random_product_vector(&dims, &mut restart_rng(opts.seed, r));
        let (vec, _) = minimize_from(e, start, opts.max_iters)?;
        let value = e.expectation(&vec.to_amplitudes())?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, vec));
        }
    }
    let (min_value, witness) = best.expect("at least one restart");
    let violated = min_value < -opts.tol;
    Ok(BlockPositivityVerdict {
        status: if violated { Status::Violated } else { Status::NoViolationFound },
        method: Method::ProductSearch,
        min_value,
        witness: violated.then_some(witness),
        restarts_used: opts.restarts,
    })
}

/// Best product approximation of a pure state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductOverlap {
    /// `max_e |⟨e|ψ⟩|²` as found by search.
    pub value: f64,
    pub vector: ProductVector,
    /// `min_k λ_max(ρ_k)`, an upper bound on the true maximum.
    pub upper_bound: f64,
}

impl ProductOverlap {
    /// True when the search value meets the marginal bound.
    pub fn is_tight(&self, tol: f64) -> bool {
        self.upper_bound - self.value <= tol
    }
}

pub fn max_product_overlap(psi: &StateVector, opts: &SearchOptions) -> Result<ProductOverlap> {
    opts.validate()?;
    let mut best: Option<(f64, ProductVector)> = None;
    for r in 0..opts.restarts {
        let start = random_product_vector(psi.dims(), &mut restart_rng(opts.seed, r));
        let (vec, _) = maximize_overlap_from(psi, start, opts.max_iters)?;
        let value = vec.to_amplitudes().dotc(psi.amplitudes()).norm_sqr();
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, vec));
        }
    }
    let (value, vector) = best.expect("at least one restart");
    Ok(ProductOverlap { value: value.clamp(0.0, 1.0), vector, upper_bound: marginal_bound(psi)? })
}

/// `min_k λ_max(Tr_{¬k} |ψ⟩⟨ψ|)`.
pub fn marginal_bound(psi: &StateVector) -> Result<f64> {
    let dims = psi.dims();
    let amps = psi.amplitudes();
    let mut bound = 1.0f64;
    for k in 0..dims.parties() {
        let d = dims.local(k);
        // ψ reshaped as (party k) × (everyone else)
        let mut reshaped = CMatrix::zeros(d, dims.total() / d);
        for (i, &z) in amps.iter().enumerate() {
            let digits = dims.digits(i);
            let col = digits
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(0, |acc, (j, &x)| acc * dims.local(j) + x);
            reshaped[(digits[k], col)] = z;
        }
        let rho = &reshaped * reshaped.adjoint();
        let (vals, _) = linalg::eigh(&rho)?;
        bound = bound.min(*vals.last().unwrap_or(&0.0));
    }
    Ok(bound)
}

/// Decides block positivity of `a𝟙 − b|ψ⟩⟨ψ|`.
///
/// Violations are certified by the maximising product vector. Block
/// positivity is exact when `a ≥ b·min_k λ_max(ρ_k)`; if the search and the
/// marginal bound disagree the verdict is `NO_VIOLATION_FOUND`.
pub fn is_block_positive_rank1_shift(
    a: f64,
    b: f64,
    psi: &StateVector,
    opts: &SearchOptions,
) -> Result<BlockPositivityVerdict> {
    opts.validate()?;
    if !(b >= 0.0) {
        return Err(Error::InvalidParameter(format!("b must be non-negative, got {b}")));
    }
    let verdict = |status, min_value, witness, restarts_used| BlockPositivityVerdict {
        status,
        method: Method::RankOneShift,
        min_value,
        witness,
        restarts_used,
    };
    if b == 0.0 {
        return Ok(if a >= -opts.tol {
            verdict(Status::ExactBlockPositive, a, None, 0)
        } else {
            let zero = vec![0; psi.dims().parties()];
            verdict(Status::Violated, a, Some(ProductVector::basis(psi.dims(), &zero)?), 0)
        });
    }
    let overlap = max_product_overlap(psi, opts)?;
    let min_value = a - b * overlap.value;
    Ok(if min_value < -opts.tol {
        verdict(Status::Violated, min_value, Some(overlap.vector), opts.restarts)
    } else if a - b * overlap.upper_bound >= -opts.tol {
        verdict(Status::ExactBlockPositive, min_value, None, opts.restarts)
    } else {
        verdict(Status::NoViolationFound, min_value, None, opts.restarts)
    })
}

/// Best available block-positivity decision for an arbitrary operator.
///
/// Operators of the form `a𝟙 − b|ψ⟩⟨ψ|` (up to [`RANK_ONE_FORM_TOL`]) use the
/// exact rule. Otherwise a product search looks for a violation; failing that,
/// positive semidefiniteness or the spectral lower bound may certify the
/// result exactly.
pub fn certify_block_positivity(
    w: &HermitianOperator,
    opts: &SearchOptions,
) -> Result<BlockPositivityVerdict> {
    opts.validate()?;
    let spec = w.eig()?;
    let n = spec.values.len();
    let lowest = spec.values[0];
    let state_of = |k: usize| StateVector::normalized(w.dims().clone(), spec.vector(k));

    if n == 1 || spec.values[n - 1] - spec.values[1] <= RANK_ONE_FORM_TOL {
        let a = spec.values[n - 1];
        let b = (a - lowest).max(0.0);
        let mut v = is_block_positive_rank1_shift(a, b, &state_of(0)?, opts)?;
        if let Some(witness) = &v.witness {
            v.min_value = w.expectation(&witness.to_amplitudes())?;
        }
        return Ok(v);
    }

    let search = min_product_expectation(w, opts)?;
    if search.is_violated() {
        return Ok(search);
    }
    if lowest >= -opts.tol {
        return Ok(BlockPositivityVerdict { status: Status::ExactBlockPositive, method: Method::Psd, ..search });
    }
    let second = spec.values[1];
    let bound = is_block_positive_rank1_shift(second, second - lowest, &state_of(0)?, opts)?;
    if bound.status == Status::ExactBlockPositive {
        return Ok(BlockPositivityVerdict {
            status: Status::ExactBlockPositive,
            method: Method::SpectralBound,
            ..search
        });
    }
    Ok(search)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EwVerdict {
    pub is_ew: bool,
    pub block_positivity: BlockPositivityVerdict,
    pub min_eigenvalue: f64,
    /// Minimum eigenvector, present when `is_ew`; `⟨v|W|v⟩ < 0`.
    pub violating_state: Option<StateVector>,
}

impl EwVerdict {
    /// The witness property rests on exact block positivity.
    pub fn is_certified(&self) -> bool {
        self.is_ew && self.block_positivity.status == Status::ExactBlockPositive
    }
}

/// Block positive but not positive semidefinite.
pub fn detect_ew(w: &HermitianOperator, opts: &SearchOptions) -> Result<EwVerdict> {
    let block_positivity = certify_block_positivity(w, opts)?;
    let spec = w.eig()?;
    let min_eigenvalue = spec.min();
    let is_ew = !block_positivity.is_violated() && min_eigenvalue < -opts.tol;
    let violating_state = if is_ew {
        Some(StateVector::normalized(w.dims().clone(), spec.vector(0))?)
    } else {
        None
    };
    Ok(EwVerdict { is_ew, block_positivity, min_eigenvalue, violating_state })
}

/// Trace positivity of block-positive operators: `Tr E ≥ 0`, with equality
/// only for `E = 0`.
pub fn trace_nonneg_check(e: &HermitianOperator, verdict: &BlockPositivityVerdict) -> bool {
    if verdict.is_violated() {
        return false;
    }
    let tr = e.trace();
    if tr < -1e-9 {
        return false;
    }
    !(tr.abs() <= 1e-9 && e.frobenius_norm() > 1e-8)
}
