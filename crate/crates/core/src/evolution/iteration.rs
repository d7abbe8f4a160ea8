//! Closed-form powers of `H′` on three- and four-site chains.
//!
//! Three sites: `H′|Ψ⟩|i⟩ = k|Ψ⟩|i⟩ + |i⟩|Ψ⟩` and its mirror give
//! `(H′)^p|Ψ⟩|i⟩ = A_p|Ψ⟩|i⟩ + B_p|i⟩|Ψ⟩` with
//! `A_p = ((k+1)^p + (k−1)^p)/2`, `B_p = ((k+1)^p − (k−1)^p)/2`.
//!
//! Four sites, `M = H′ − k`: with `u = |i⟩|Ψ⟩|j⟩` and
//! `v = |ij⟩|Ψ⟩ + |Ψ⟩|ij⟩`, `Mu = εv` and, for `j ≠ ī`, `Mv = 2εu`, where
//! `ε = aᵢa_ī` is `+1` for the orthogonal and `−1` for the symplectic family.
//! For `j = ī` the block also couples to `w = |Ψ⟩|Ψ⟩`:
//! `Mv_m = 2εu_m + 2a_m w` and `Mw = kw + ε Σ_m a_m u_m`.

use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::Serialize;

use super::{four_site_vectors, small_expm};
use crate::qnum::{loop_constant, AlgebraSpec};
use crate::scalar::{powi, Field};

/// `(A_p, B_p)`; satisfies `A_{p+1} = kA_p + B_p`, `B_{p+1} = A_p + kB_p`.
pub fn h3_power_closed_form<T: Field>(p: u32, k: &T) -> (T, T) {
    let one = T::one();
    let two = one.clone() + one.clone();
    let up = powi(&(k.clone() + one.clone()), p as i32);
    let down = powi(&(k.clone() - one), p as i32);
    ((up.clone() + down.clone()) / two.clone(), (up - down) / two)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Action of `(H′−k)^{2n}` or `(H′−k)^{2n+1}` on `|i⟩|Ψ⟩|j⟩`.
#[derive(Debug, Clone, Serialize)]
pub struct H4Power {
    pub power: usize,
    /// For `j ≠ ī`: `M^power u = generic_u · u + generic_v · v`.
    pub generic_u: f64,
    pub generic_v: f64,
    /// For `j = ī`: column `i` holds the coefficients of `M^power u_i` over
    /// `(u_1…u_N, v_1…v_N, w)`.
    pub conjugate: DMatrix<f64>,
}

/// `M^{2n}u = 2ⁿu` and `M^{2n+1}u = ε2ⁿv` off the conjugate diagonal, plus
/// the power of the conjugate block.
pub fn h4_power_action(n: u32, parity: Parity, spec: &AlgebraSpec) -> H4Power {
    let eps = spec.family().sign() as f64;
    let base = 2f64.powi(n as i32);
    let (power, generic_u, generic_v) = match parity {
        Parity::Even => (2 * n as usize, base, 0.0),
        Parity::Odd => (2 * n as usize + 1, 0.0, eps * base),
    };
    let block = ConjugateBlock::new(spec);
    H4Power { power, generic_u, generic_v, conjugate: block.power(power) }
}

/// `M = H′−k` on the span of `u_m = |m⟩|Ψ⟩|m̄⟩`,
/// `v_m = |m m̄⟩|Ψ⟩ + |Ψ⟩|m m̄⟩` and `w = |Ψ⟩|Ψ⟩` of a four-site chain.
///
/// The spanning set is linearly dependent (`Σ a_m v_m = 2w`); coefficient
/// vectors over it still propagate correctly.
#[derive(Debug, Clone)]
pub struct ConjugateBlock {
    spec: AlgebraSpec,
    /// `M s_a = Σ_b C[b, a] s_b`.
    matrix: DMatrix<f64>,
}

impl ConjugateBlock {
    pub fn new(spec: &AlgebraSpec) -> Self {
        let n = spec.n();
        let a = crate::projector::psi_weights(spec.family(), n, &spec.q().sqrt());
        let eps = spec.family().sign() as f64;
        let k = loop_constant(spec);
        let w = 2 * n;
        let mut c = DMatrix::zeros(2 * n + 1, 2 * n + 1);
        for m in 0..n {
            c[(n + m, m)] = eps;
            c[(m, n + m)] = 2.0 * eps;
            c[(w, n + m)] = 2.0 * a[m];
            c[(m, w)] = eps * a[m];
        }
        c[(w, w)] = k;
        Self { spec: spec.clone(), matrix: c }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn power(&self, p: usize) -> DMatrix<f64> {
        let dim = self.matrix.nrows();
        (0..p).fold(DMatrix::identity(dim, dim), |acc, _| &self.matrix * acc)
    }

    /// Coefficients of `e^{−iτM} u_i` over the spanning set (1-based `i`).
    pub fn propagate(&self, i: usize, tau: f64) -> Vec<Complex64> {
        let c = self.matrix.map(|x| Complex64::new(x, 0.0));
        let e = small_expm(&c, Complex64::new(0.0, -tau));
        e.column(i - 1).iter().copied().collect()
    }

    /// Four-site amplitude vectors `(u_1…u_N, v_1…v_N, w)`.
    pub fn spanning_vectors(&self) -> Vec<Vec<f64>> {
        let n = self.spec.n();
        let fs = four_site_vectors(&self.spec);
        let mut out: Vec<Vec<f64>> = (1..=n).map(|m| fs.u(m, n - m + 1)).collect();
        out.extend((1..=n).map(|m| fs.v(m, n - m + 1)));
        out.push(fs.w());
        out
    }
}
