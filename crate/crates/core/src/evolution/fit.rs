//! Least-squares polynomial fits of sampled complex amplitudes.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Fits whose scaled Vandermonde condition number exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Serialize)]
pub struct PolyFit {
    /// Coefficient of `t^p` at index `p`.
    pub coeffs: Vec<Complex64>,
    /// 2-norm condition number of the Vandermonde matrix in `t / max|t|`.
    pub condition: f64,
}

impl PolyFit {
    pub fn eval(&self, t: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    }
}

/// Degree-`degree` fit of `values(t)`. The Vandermonde matrix is built in
/// the scaled variable `t / max|t|` and solved by SVD.
pub fn polyfit(ts: &[f64], values: &[Complex64], degree: usize) -> Result<PolyFit> {
    if ts.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: ts.len(), got: values.len() });
    }
    if ts.len() < degree + 1 {
        return Err(Error::InvalidParameter(format!("a degree-{degree} fit needs at least {} samples, got {}", degree + 1, ts.len())));
    }
    let scale = ts.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::IllConditionedFit { condition: f64::INFINITY });
    }
    let v = DMatrix::from_fn(ts.len(), degree + 1, |i, p| (ts[i] / scale).powi(p as i32));
    let svd = v.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditionedFit { condition });
    }
    let solve = |rhs: DVector<f64>| -> Result<DVector<f64>> { svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidParameter(e.to_string())) };
    let re = solve(DVector::from_iterator(values.len(), values.iter().map(|z| z.re)))?;
    let im = solve(DVector::from_iterator(values.len(), values.iter().map(|z| z.im)))?;
    let coeffs = (0..=degree).map(|p| Complex64::new(re[p], im[p]) / scale.powi(p as i32)).collect();
    Ok(PolyFit { coeffs, condition })
}

/// `t = 0.01·j` for `j = 1..=count`.
pub fn default_samples(count: usize) -> Vec<f64> {
    (1..=count).map(|j| 0.01 * j as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_polynomial() {
        let c = [Complex64::new(0.0, 0.0), Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 3.0)];
        let ts = default_samples(6);
        let vals: Vec<Complex64> = ts.iter().map(|&t| c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, x| a * t + x)).collect();
        let fit = polyfit(&ts, &vals, 5).unwrap();
        for (p, x) in c.iter().enumerate() {
            assert!((fit.coeffs[p] - x).norm() < 1e-8 * 10f64.powi(p as i32));
        }
        assert!((fit.eval(0.035) - vals[0] * 0.0 - c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, x| a * 0.035 + x)).norm() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_samples() {
        let v = vec![Complex64::new(1.0, 0.0); 6];
        assert!(matches!(polyfit(&[0.01; 6], &v, 5), Err(Error::IllConditionedFit { .. })));
        assert!(matches!(polyfit(&[0.0; 6], &v, 5), Err(Error::IllConditionedFit { .. })));
        let clustered: Vec<f64> = (0..6).map(|j| 1.0 + 1e-4 * j as f64).collect();
        assert!(matches!(polyfit(&clustered, &v, 5), Err(Error::IllConditionedFit { .. })));
        assert!(polyfit(&[0.01, 0.02], &v[..2], 5).is_err());
    }
}
