//! JSON wire formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are flattened row-major:
//!
//! ```text
//! operator: {"dims": [d1, …, dm], "entries": [[re, im], …]}      // total² entries
//! vector:   {"dims": [d1, …, dm], "amplitudes": [[re, im], …]}   // total entries
//! product operator sum:
//!           {"dims": [...], "terms": [[<d1² entries>, …, <dm² entries>], …]}
//! ensemble: {"states": [{"eta": x, "rho": <operator>}, …]}
//! measurement:
//!           {"elements": [<operator>, …], "certificates": [<product operator sum>, …] | null}
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cones::ProductOperatorSum;
use crate::ensembles::{Ensemble, Measurement};
use crate::operator::{Dims, HermitianOperator, ProductVector, StateVector};
use crate::{Error, Result};

pub type ComplexPair = [f64; 2];

pub(crate) fn pairs_from_matrix(m: &DMatrix<Complex64>) -> Vec<ComplexPair> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub(crate) fn matrix_from_pairs(n: usize, entries: &[ComplexPair]) -> Result<DMatrix<Complex64>> {
    if entries.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "expected {} entries for a {n}x{n} matrix, got {}",
            n * n,
            entries.len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let [re, im] = entries[r * n + c];
        Complex64::new(re, im)
    }))
}

pub(crate) fn pairs_from_vector(v: &DVector<Complex64>) -> Vec<ComplexPair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub(crate) fn vector_from_pairs(entries: &[ComplexPair]) -> DVector<Complex64> {
    DVector::from_iterator(entries.len(), entries.iter().map(|&[re, im]| Complex64::new(re, im)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorRepr {
    pub dims: Vec<usize>,
    pub entries: Vec<ComplexPair>,
}

impl From<HermitianOperator> for OperatorRepr {
    fn from(op: HermitianOperator) -> Self {
        Self { dims: op.dims().as_slice().to_vec(), entries: pairs_from_matrix(op.matrix()) }
    }
}

impl TryFrom<OperatorRepr> for HermitianOperator {
    type Error = Error;
    fn try_from(r: OperatorRepr) -> Result<Self> {
        let dims = Dims::new(r.dims)?;
        let mat = matrix_from_pairs(dims.total(), &r.entries)?;
        HermitianOperator::from_matrix(dims, mat)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorRepr {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<ComplexPair>,
}

impl From<StateVector> for VectorRepr {
    fn from(v: StateVector) -> Self {
        Self { dims: v.dims().as_slice().to_vec(), amplitudes: pairs_from_vector(v.amplitudes()) }
    }
}

impl TryFrom<VectorRepr> for StateVector {
    type Error = Error;
    fn try_from(r: VectorRepr) -> Result<Self> {
        StateVector::new(Dims::new(r.dims)?, vector_from_pairs(&r.amplitudes))
    }
}

/// One amplitude list per party.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductVectorRepr {
    pub locals: Vec<Vec<ComplexPair>>,
}

impl From<ProductVector> for ProductVectorRepr {
    fn from(p: ProductVector) -> Self {
        Self { locals: p.locals().iter().map(pairs_from_vector).collect() }
    }
}

impl TryFrom<ProductVectorRepr> for ProductVector {
    type Error = Error;
    fn try_from(r: ProductVectorRepr) -> Result<Self> {
        ProductVector::new(r.locals.iter().map(|v| vector_from_pairs(v)).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductOperatorSumRepr {
    pub dims: Vec<usize>,
    pub terms: Vec<Vec<Vec<ComplexPair>>>,
}

impl From<ProductOperatorSum> for ProductOperatorSumRepr {
    fn from(s: ProductOperatorSum) -> Self {
        Self {
            dims: s.dims().as_slice().to_vec(),
            terms: s
                .terms()
                .iter()
                .map(|term| term.iter().map(pairs_from_matrix).collect())
                .collect(),
        }
    }
}

impl TryFrom<ProductOperatorSumRepr> for ProductOperatorSum {
    type Error = Error;
    fn try_from(r: ProductOperatorSumRepr) -> Result<Self> {
        let dims = Dims::new(r.dims)?;
        let mut terms = Vec::with_capacity(r.terms.len());
        for term in &r.terms {
            if term.len() != dims.parties() {
                return Err(Error::InvalidCertificate(format!(
                    "term has {} factors for {} parties",
                    term.len(),
                    dims.parties()
                )));
            }
            let factors = term
                .iter()
                .zip(dims.as_slice())
                .map(|(entries, &d)| matrix_from_pairs(d, entries))
                .collect::<Result<Vec<_>>>()?;
            terms.push(factors);
        }
        ProductOperatorSum::new(dims, terms)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedStateRepr {
    pub eta: f64,
    pub rho: HermitianOperator,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleRepr {
    pub states: Vec<WeightedStateRepr>,
}

impl From<Ensemble> for EnsembleRepr {
    fn from(e: Ensemble) -> Self {
        Self {
            states: e
                .priors()
                .iter()
                .zip(e.states())
                .map(|(&eta, rho)| WeightedStateRepr { eta, rho: rho.clone() })
                .collect(),
        }
    }
}

impl TryFrom<EnsembleRepr> for Ensemble {
    type Error = Error;
    fn try_from(r: EnsembleRepr) -> Result<Self> {
        Ensemble::new(r.states.into_iter().map(|s| (s.eta, s.rho)).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurementRepr {
    pub elements: Vec<HermitianOperator>,
    #[serde(default)]
    pub certificates: Option<Vec<ProductOperatorSum>>,
}

impl From<Measurement> for MeasurementRepr {
    fn from(m: Measurement) -> Self {
        Self { elements: m.elements().to_vec(), certificates: m.certificates().map(<[_]>::to_vec) }
    }
}

impl TryFrom<MeasurementRepr> for Measurement {
    type Error = Error;
    fn try_from(r: MeasurementRepr) -> Result<Self> {
        match r.certificates {
            Some(certs) => Measurement::with_certificates(r.elements, certs),
            None => Measurement::new(r.elements),
        }
    }
}
