//! Braid matrices `R̂(θ) = I⊗I + ω(θ)P₀` and their verification.

use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::projector::{build_p0, max_abs, DenseOperator};
use crate::qnum::{omega, omega_real, rapidity_params, AlgebraSpec, Sign};

/// Rapidity at which a braid matrix was built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Rapidity {
    Real(f64),
    /// `iθ` for the stored real `θ`.
    Imaginary(f64),
}

#[derive(Debug, Clone)]
pub struct BraidMatrix {
    pub spec: AlgebraSpec,
    pub rapidity: Rapidity,
    pub omega: Complex64,
    pub matrix: DenseOperator<Complex64>,
}

impl BraidMatrix {
    /// Real part of the matrix. Exact for real rapidity.
    pub fn real_matrix(&self) -> DMatrix<f64> {
        self.matrix.matrix().map(|z| z.re)
    }
}

/// `I⊗I + ω P₀` for a real coefficient.
pub fn braid_from_projector(p0: &DMatrix<f64>, w: f64) -> DMatrix<f64> {
    let mut m = p0 * w;
    for d in 0..m.nrows() {
        m[(d, d)] += 1.0;
    }
    m
}

pub fn build_braid(spec: &AlgebraSpec, theta: f64, sign: Sign) -> Result<BraidMatrix> {
    let eta = rapidity_params(spec, sign)?.eta;
    let w = omega_real(theta, eta)?;
    let p0 = build_p0(spec).into_matrix();
    let m = braid_from_projector(&p0, w).map(|x| Complex64::new(x, 0.0));
    Ok(BraidMatrix {
        spec: spec.clone(),
        rapidity: Rapidity::Real(theta),
        omega: Complex64::new(w, 0.0),
        matrix: DenseOperator::from_matrix(spec.n(), m)?,
    })
}

/// `U = I⊗I + ω(iθ)P₀`, unitary for real `θ` and `η`.
pub fn build_unitary_braid(spec: &AlgebraSpec, theta: f64, sign: Sign) -> Result<BraidMatrix> {
    let eta = rapidity_params(spec, sign)?.eta;
    let w = omega(Complex64::new(0.0, theta), eta)?;
    let p0 = build_p0(spec).into_matrix();
    let mut m = p0.map(|x| w * x);
    for d in 0..m.nrows() {
        m[(d, d)] += Complex64::new(1.0, 0.0);
    }
    Ok(BraidMatrix {
        spec: spec.clone(),
        rapidity: Rapidity::Imaginary(theta),
        omega: w,
        matrix: DenseOperator::from_matrix(spec.n(), m)?,
    })
}

/// `‖U†U − I‖_max`.
pub fn unitarity_residual(u: &DMatrix<Complex64>) -> f64 {
    let mut g = u.adjoint() * u;
    for d in 0..g.nrows() {
        g[(d, d)] -= Complex64::new(1.0, 0.0);
    }
    max_abs(&g)
}

/// `‖R̂(θ)R̂(−θ) − I‖_max`.
pub fn inversion_residual(spec: &AlgebraSpec, theta: f64, sign: Sign) -> Result<f64> {
    let a = build_braid(spec, theta, sign)?.real_matrix();
    let b = build_braid(spec, -theta, sign)?.real_matrix();
    let mut prod = a * b;
    for d in 0..prod.nrows() {
        prod[(d, d)] -= 1.0;
    }
    Ok(max_abs(&prod))
}

/// Difference of the two sides of the braid equation, in two norms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BraidResidual {
    pub max_abs: f64,
    pub frobenius: f64,
}

/// `R̂₁₂(θ)R̂₂₃(θ+θ′)R̂₁₂(θ′)` against `R̂₂₃(θ′)R̂₁₂(θ+θ′)R̂₂₃(θ)` on the
/// three-site space.
pub fn verify_braid_equation(spec: &AlgebraSpec, theta: f64, theta_prime: f64, sign: Sign) -> Result<BraidResidual> {
    let eta = rapidity_params(spec, sign)?.eta;
    let p0 = build_p0(spec).into_matrix();
    braid_residual_with(&p0, spec.n(), eta, theta, theta_prime)
}

/// Braid residual for an arbitrary two-site operator in place of `P₀`.
pub fn braid_residual_with(p: &DMatrix<f64>, n: usize, eta: f64, theta: f64, theta_prime: f64) -> Result<BraidResidual> {
    if p.nrows() != n * n || p.ncols() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: p.nrows() });
    }
    let id = DMatrix::<f64>::identity(n, n);
    let r12 = |t: f64| -> Result<DMatrix<f64>> { Ok(braid_from_projector(p, omega_real(t, eta)?).kronecker(&id)) };
    let r23 = |t: f64| -> Result<DMatrix<f64>> { Ok(id.kronecker(&braid_from_projector(p, omega_real(t, eta)?))) };
    let sum = theta + theta_prime;
    let lhs = r12(theta)? * r23(sum)? * r12(theta_prime)?;
    let rhs = r23(theta_prime)? * r12(sum)? * r23(theta)?;
    let diff = lhs - rhs;
    Ok(BraidResidual { max_abs: max_abs(&diff), frobenius: diff.norm() })
}
