//! Dense Hermitian operators on a multipartite Hilbert space.
//!
//! Parties are ordered left to right and party `k` is the `k`-th Kronecker
//! factor. Basis index `i` of the joint space decomposes in mixed radix with
//! party 0 as the most significant digit.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMatrix, CVector};
use crate::{Error, Result};

/// Entries of a Hermitian input may deviate from their conjugate partner by at
/// most this much before the input is rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default slack for positive-semidefiniteness tests.
pub const PSD_TOL: f64 = 1e-9;
/// Unit-norm tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;
/// Largest joint dimension accepted anywhere in the crate.
pub const MAX_TOTAL_DIM: usize = 4096;

/// Local dimensions `(d_1, …, d_m)` of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("at least one party is required".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidParameter(format!("local dimensions must be positive: {dims:?}")));
        }
        let mut total = 1usize;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_TOTAL_DIM)
                .ok_or(Error::SizeOverflow { max: MAX_TOTAL_DIM })?;
        }
        Ok(Self(dims))
    }

    /// `m` parties of dimension `d` each.
    pub fn uniform(m: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; m])
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    pub fn local(&self, party: usize) -> usize {
        self.0[party]
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn concat(&self, other: &Dims) -> Result<Dims> {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Dims::new(v)
    }

    /// Mixed-radix digits of a joint basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for (slot, &d) in out.iter_mut().zip(&self.0).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Joint basis index of a digit string; inverse of [`Dims::digits`].
    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.0).fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

impl TryFrom<Vec<usize>> for Dims {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Dims::new(v)
    }
}

impl From<Dims> for Vec<usize> {
    fn from(d: Dims) -> Self {
        d.0
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Eigen-decomposition of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, in the order of `values`.
    pub vectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.vectors.column(k).into_owned()
    }
}

/// A Hermitian matrix tagged with the tensor structure it acts on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::wire::OperatorRepr", into = "crate::wire::OperatorRepr")]
pub struct HermitianOperator {
    dims: Dims,
    mat: CMatrix,
}

impl HermitianOperator {
    /// Validates shape and Hermiticity; accepted inputs are replaced by
    /// `(A + A†)/2`.
    pub fn from_matrix(dims: Dims, mat: DMatrix<Complex64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
        }
        if mat.nrows() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {0}x{0} but dims {dims} require {1}",
                mat.nrows(),
                dims.total()
            )));
        }
        let deviation = linalg::max_hermitian_deviation(&mat);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { dims, mat: linalg::hermitian_part(&mat) })
    }

    /// For matrices that are Hermitian by construction up to rounding.
    pub(crate) fn from_hermitian_unchecked(dims: Dims, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.nrows(), dims.total());
        Self { dims, mat: linalg::hermitian_part(&mat) }
    }

    pub fn from_real_diagonal(dims: Dims, diag: &[f64]) -> Result<Self> {
        if diag.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} diagonal entries for dims {dims}",
                diag.len()
            )));
        }
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Ok(Self { dims, mat: CMatrix::from_diagonal(&d) })
    }

    pub fn identity(dims: Dims) -> Self {
        let n = dims.total();
        Self { dims, mat: CMatrix::identity(n, n) }
    }

    pub fn zero(dims: Dims) -> Self {
        let n = dims.total();
        Self { dims, mat: CMatrix::zeros(n, n) }
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &StateVector) -> Self {
        let a = &v.amps;
        Self { dims: v.dims.clone(), mat: a * a.adjoint() }
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        linalg::real_trace(&self.mat)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dims: self.dims.clone(), mat: self.mat.scale(s) }
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dims, other.dims)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self { dims: self.dims.clone(), mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self { dims: self.dims.clone(), mat: &self.mat - &other.mat })
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self { dims: self.dims.clone(), mat: &self.mat + other.mat.scale(s) })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dims(other)?;
        Ok((&self.mat - &other.mat).iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    pub fn eig(&self) -> Result<Spectrum> {
        let (values, vectors) = linalg::eigh(&self.mat)?;
        Ok(Spectrum { values, vectors })
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.min())
    }

    /// True iff the minimum eigenvalue is at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }

    /// `Tr(AB)`.
    pub fn trace_inner(&self, other: &Self) -> Result<f64> {
        self.check_dims(other)?;
        let t = linalg::trace_product(&self.mat, &other.mat);
        debug_assert!(
            t.im.abs() <= 1e-10 * (1.0f64).max(self.frobenius_norm() * other.frobenius_norm()),
            "Tr(AB) of Hermitian operators has imaginary part {}",
            t.im
        );
        Ok(t.re)
    }

    /// `⟨v|A|v⟩` for an arbitrary (not necessarily normalised) vector.
    pub fn expectation(&self, v: &DVector<Complex64>) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against operator of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(v.dotc(&(&self.mat * v)).re)
    }

    /// Transpose on the tensor factor `party`.
    pub fn partial_transpose(&self, party: usize) -> Result<Self> {
        let m = self.dims.parties();
        if party >= m {
            return Err(Error::IndexOutOfRange { index: party, len: m });
        }
        let n = self.dim();
        let digits: Vec<Vec<usize>> = (0..n).map(|i| self.dims.digits(i)).collect();
        let mut out = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut rd = digits[r].clone();
                let mut cd = digits[c].clone();
                std::mem::swap(&mut rd[party], &mut cd[party]);
                out[(self.dims.index(&rd), self.dims.index(&cd))] = self.mat[(r, c)];
            }
        }
        Ok(Self { dims: self.dims.clone(), mat: out })
    }
}

/// Kronecker product of operators in party order.
pub fn tensor(factors: &[HermitianOperator]) -> Result<HermitianOperator> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("tensor needs at least one factor".into()))?;
    let mut dims = first.dims.clone();
    for f in rest {
        dims = dims.concat(&f.dims)?;
    }
    let mat = linalg::kron_all(factors.iter().map(|f| &f.mat));
    Ok(HermitianOperator { dims, mat })
}

/// Kronecker product of raw local matrices, one per party.
pub fn tensor_matrices(factors: &[DMatrix<Complex64>]) -> Result<HermitianOperator> {
    let ops = factors
        .iter()
        .map(|f| {
            if !f.is_square() {
                return Err(Error::NotSquare { rows: f.nrows(), cols: f.ncols() });
            }
            HermitianOperator::from_matrix(Dims::new(vec![f.nrows()])?, f.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    tensor(&ops)
}

pub fn eig_hermitian(a: &HermitianOperator) -> Result<Spectrum> {
    a.eig()
}

/// Unit vector in a tensor-product space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::wire::VectorRepr", into = "crate::wire::VectorRepr")]
pub struct StateVector {
    dims: Dims,
    amps: CVector,
}

impl StateVector {
    pub fn new(dims: Dims, amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dims}",
                amps.len()
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amps })
    }

    /// Normalises `amps`; fails only on the zero vector or a length mismatch.
    pub fn normalized(dims: Dims, mut amps: DVector<Complex64>) -> Result<Self> {
        if linalg::normalize(&mut amps) == 0.0 {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Self::new(dims, amps)
    }

    /// Computational basis vector `|i_1 … i_m⟩`.
    pub fn basis(dims: Dims, digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.parties() || digits.iter().zip(dims.as_slice()).any(|(&i, &d)| i >= d) {
            return Err(Error::InvalidParameter(format!("basis label {digits:?} invalid for dims {dims}")));
        }
        let mut amps = CVector::zeros(dims.total());
        amps[dims.index(digits)] = Complex64::new(1.0, 0.0);
        Ok(Self { dims, amps })
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::projector(self)
    }
}

/// Phased GHZ vector `(1/√d) Σ_k exp(2πi jk/d) |k⟩^{⊗m}`; `j = 0` gives `|Φ⟩`.
pub fn ghz_state(m: usize, d: usize, j: i64) -> Result<StateVector> {
    if m < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!("GHZ state needs m >= 2 and d >= 2, got m={m}, d={d}")));
    }
    let dims = Dims::uniform(m, d)?;
    let j = j.rem_euclid(d as i64) as f64;
    let norm = 1.0 / (d as f64).sqrt();
    let mut amps = CVector::zeros(dims.total());
    for k in 0..d {
        let phase = TAU * j * k as f64 / d as f64;
        amps[dims.index(&vec![k; m])] = Complex64::from_polar(norm, phase);
    }
    StateVector::new(dims, amps)
}

/// A product of local unit vectors `|e_1⟩ ⊗ … ⊗ |e_m⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::wire::ProductVectorRepr", into = "crate::wire::ProductVectorRepr")]
pub struct ProductVector {
    locals: Vec<CVector>,
}

impl ProductVector {
    pub fn new(locals: Vec<DVector<Complex64>>) -> Result<Self> {
        if locals.is_empty() {
            return Err(Error::InvalidParameter("product vector needs at least one party".into()));
        }
        for v in &locals {
            let norm = v.norm();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::NotNormalized { norm });
            }
        }
        Dims::new(locals.iter().map(|v| v.len()).collect())?;
        Ok(Self { locals })
    }

    pub fn basis(dims: &Dims, digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.parties() {
            return Err(Error::DimensionMismatch(format!("{} labels for dims {dims}", digits.len())));
        }
        let locals = digits
            .iter()
            .zip(dims.as_slice())
            .map(|(&i, &d)| {
                if i >= d {
                    return Err(Error::InvalidParameter(format!("label {i} out of range for dimension {d}")));
                }
                let mut v = CVector::zeros(d);
                v[i] = Complex64::new(1.0, 0.0);
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { locals })
    }

    pub(crate) fn from_normalized(locals: Vec<CVector>) -> Self {
        Self { locals }
    }

    pub fn locals(&self) -> &[DVector<Complex64>] {
        &self.locals
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.locals.iter().map(|v| v.len()).collect()).expect("validated at construction")
    }

    pub fn to_amplitudes(&self) -> DVector<Complex64> {
        linalg::kron_vectors(&self.locals)
    }

    pub fn to_state(&self) -> StateVector {
        StateVector { dims: self.dims(), amps: self.to_amplitudes() }
    }
}
