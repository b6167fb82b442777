//! Browser bindings for a few interactive sepdisc computations.
//!
//! Every export returns a JSON string so the page needs no glue beyond
//! `JSON.parse`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sepdisc::bounds::{check_corollary2, verify_theorem3, verify_theorem4, VerifyOptions};
use sepdisc::cones::{certify_block_positivity, SearchOptions, Status};
use sepdisc::discrimination::{helstrom_two_state, solve_pg_iterative, success_probability, SolverOptions};
use sepdisc::ensembles::{example1, example2, example3, Ensemble};
use sepdisc::{ghz_state, Dims, HermitianOperator, Result, StateVector};

const MAX_DIM: usize = 81;

#[derive(Debug, Serialize)]
pub struct ExampleSummary {
    pub states: usize,
    pub dim: usize,
    pub p_sep: f64,
    pub p_g: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gap_certified: bool,
}

#[derive(Debug, Serialize)]
pub struct ScanPoint {
    pub b: f64,
    pub min_value: f64,
    pub block_positive: bool,
    pub certified: bool,
}

#[derive(Debug, Serialize)]
pub struct TwoStateComparison {
    pub closed_form: f64,
    pub helstrom: f64,
    pub iterative: f64,
    pub iterations: usize,
}

fn check_size(m: usize, d: usize) -> Result<()> {
    let dim = (d as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if m < 2 || d < 2 || dim > MAX_DIM as u64 {
        return Err(sepdisc::Error::InvalidParameter(format!("need m, d >= 2 and d^m <= {MAX_DIM}, got m = {m}, d = {d}")));
    }
    Ok(())
}

/// Separable optimum of a reference family next to the global estimate.
pub fn summarize_example(example: u8, m: usize, d: usize, seed: u64) -> Result<ExampleSummary> {
    check_size(m, d)?;
    let search = SearchOptions::default().with_seed(seed);
    let verify = VerifyOptions { search, solver: None, ..VerifyOptions::default() };
    let (ensemble, p_sep, gap_certified) = match example {
        1 => {
            let (e, meas) = example1(m, d)?;
            let r = verify_theorem3(&e, &meas, &verify)?;
            let p = success_probability(&e, &meas)?;
            (e, p, r.holds && r.certified)
        }
        2 => {
            let (e, meas) = example2(m, d)?;
            let h = e.average();
            let r = verify_theorem4(&e, &h, h.trace(), &verify)?;
            let p = success_probability(&e, &meas)?;
            (e, p, !r.holds)
        }
        3 => {
            let e = example3(m, d)?;
            let r = check_corollary2(&e, 0, &search)?;
            let p = r.p_sep_value.unwrap_or(f64::NAN);
            (e, p, r.gap_certified && r.certified)
        }
        _ => return Err(sepdisc::Error::InvalidParameter(format!("unknown example {example}"))),
    };
    let solved = solve_pg_iterative(&ensemble, &SolverOptions::default())?;
    Ok(ExampleSummary {
        states: ensemble.len(),
        dim: ensemble.dims().total(),
        p_sep,
        p_g: solved.p_value,
        iterations: solved.iterations,
        converged: solved.converged,
        gap_certified,
    })
}

/// Block positivity of `𝟙 − b|GHZ⟩⟨GHZ|` on a grid `b ∈ [0, b_max]`.
pub fn scan_witness(m: usize, d: usize, b_max: f64, steps: usize, seed: u64) -> Result<Vec<ScanPoint>> {
    check_size(m, d)?;
    if !(b_max > 0.0) || steps == 0 {
        return Err(sepdisc::Error::InvalidParameter("need b_max > 0 and steps >= 1".into()));
    }
    let dims = Dims::uniform(m, d)?;
    let projector = ghz_state(m, d, 0)?.projector();
    let identity = HermitianOperator::identity(dims);
    let opts = SearchOptions::default().with_seed(seed);
    (0..=steps)
        .map(|k| {
            let b = b_max * k as f64 / steps as f64;
            let v = certify_block_positivity(&identity.add_scaled(-b, &projector)?, &opts)?;
            Ok(ScanPoint {
                b,
                min_value: v.min_value,
                block_positive: v.status != Status::Violated,
                certified: v.is_certified(),
            })
        })
        .collect()
}

/// `|0⟩` against `cos θ|0⟩ + sin θ|1⟩` with priors `η, 1 − η`.
pub fn compare_two_state(theta: f64, eta: f64) -> Result<TwoStateComparison> {
    if !(eta > 0.0 && eta < 1.0) || !theta.is_finite() {
        return Err(sepdisc::Error::InvalidParameter(format!("need 0 < eta < 1 and finite theta, got eta = {eta}")));
    }
    let dims = Dims::new(vec![2])?;
    let ket = |a: f64, b: f64| StateVector::normalized(dims.clone(), [a, b].iter().map(|&x| x.into()).collect::<Vec<_>>().into());
    let e = Ensemble::new(vec![(eta, ket(1.0, 0.0)?.projector()), (1.0 - eta, ket(theta.cos(), theta.sin())?.projector())])?;
    let closed_form = 0.5 * (1.0 + (1.0 - 4.0 * eta * (1.0 - eta) * theta.cos().powi(2)).max(0.0).sqrt());
    let solved = solve_pg_iterative(&e, &SolverOptions::default())?;
    Ok(TwoStateComparison {
        closed_form,
        helstrom: helstrom_two_state(&e)?.p_value,
        iterative: solved.p_value,
        iterations: solved.iterations,
    })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = exampleSummary)]
pub fn example_summary(example: u8, m: usize, d: usize, seed: u32) -> std::result::Result<String, JsError> {
    to_js(summarize_example(example, m, d, seed.into()))
}

#[wasm_bindgen(js_name = witnessScan)]
pub fn witness_scan(m: usize, d: usize, b_max: f64, steps: usize, seed: u32) -> std::result::Result<String, JsError> {
    to_js(scan_witness(m, d, b_max, steps, seed.into()))
}

#[wasm_bindgen(js_name = twoStateComparison)]
pub fn two_state_comparison(theta: f64, eta: f64) -> std::result::Result<String, JsError> {
    to_js(compare_two_state(theta, eta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_has_a_gap() {
        let s = summarize_example(1, 2, 2, 0).unwrap();
        assert_eq!(s.states, 4);
        assert!((s.p_sep - 2.0 / 3.0).abs() < 1e-9);
        assert!(s.gap_certified && s.p_g > s.p_sep + 1e-3);
    }

    #[test]
    fn example2_has_no_gap() {
        let s = summarize_example(2, 2, 2, 0).unwrap();
        assert!((s.p_sep - 1.0).abs() < 1e-10 && !s.gap_certified);
    }

    #[test]
    fn scan_switches_at_d() {
        let pts = scan_witness(2, 3, 6.0, 12, 0).unwrap();
        for p in &pts {
            if (p.b - 3.0).abs() > 1e-9 {
                assert_eq!(p.block_positive, p.b < 3.0, "b = {}", p.b);
            }
        }
    }

    #[test]
    fn iterative_matches_helstrom() {
        for (theta, eta) in [(0.3, 0.5), (1.0, 0.2), (0.05, 0.7)] {
            let c = compare_two_state(theta, eta).unwrap();
            assert!((c.closed_form - c.helstrom).abs() < 1e-10);
            assert!((c.iterative - c.helstrom).abs() < 1e-7, "{c:?}");
        }
    }

    #[test]
    fn rejects_oversized_inputs() {
        assert!(summarize_example(1, 5, 3, 0).is_err());
        assert!(summarize_example(4, 2, 2, 0).is_err());
        assert!(compare_two_state(0.1, 1.0).is_err());
    }
}
