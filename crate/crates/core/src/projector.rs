//! The rank-one projector `P₀`, its rescaling `P₀′ = k·P₀` and its
//! eigenstate `|Ψ⟩ = Σᵢ aᵢ |i ī⟩`.
//!
//! Two-site basis states are ordered row-major: `|i j⟩` sits at
//! `(i−1)·N + (j−1)` with 1-based site labels.
//!
//! The matrix is assembled term by term from
//! `P₀′ = Σ_{i,j} q^{ρ_ī − ρ_j} (ε_i ε_j) (ij)⊗(īj̄)`, where `(ij)` is the
//! `N×N` matrix unit. Independently, `|Ψ⟩` has weights
//! `aᵢ = εᵢ q^{−ρᵢ}` and `P₀′ = |Ψ⟩⟨Ψ|` with `⟨Ψ|Ψ⟩ = k`; the two routes are
//! checked against each other in the tests.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::qnum::{self, loop_constant, AlgebraSpec, Family};
use crate::scalar::{powi, Field};

/// A dense `N²×N²` two-site operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator<T: nalgebra::Scalar> {
    n: usize,
    matrix: DMatrix<T>,
}

impl<T: nalgebra::Scalar> DenseOperator<T> {
    pub fn from_matrix(n: usize, matrix: DMatrix<T>) -> Result<Self> {
        let dim = n * n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        Ok(Self { n, matrix })
    }

    /// Single-site dimension `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Two-site dimension `N²`.
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    /// Entry `⟨i j| O |k l⟩` addressed by 1-based site labels.
    pub fn entry(&self, row: (usize, usize), col: (usize, usize)) -> T {
        self.matrix[(pair_index(self.n, row.0, row.1), pair_index(self.n, col.0, col.1))].clone()
    }
}

impl DenseOperator<f64> {
    /// `row,col,value` lines (0-based indices) for every nonzero entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,value\n");
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let v = self.matrix[(r, c)];
                if v != 0.0 {
                    out.push_str(&format!("{r},{c},{}\n", sig17(v)));
                }
            }
        }
        out
    }

    /// `{"n": N, "dim": N², "rows": [[...], ...]}` with 17-digit floats.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = (0..self.dim())
            .map(|r| {
                let cells: Vec<String> = (0..self.dim()).map(|c| sig17(self.matrix[(r, c)])).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("{{\"n\":{},\"dim\":{},\"rows\":[{}]}}", self.n, self.dim(), rows.join(","))
    }
}

/// Row-major index of `|i j⟩` for 1-based labels.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    (i - 1) * n + (j - 1)
}

/// Weights `aᵢ = εᵢ s^{−2ρᵢ}` of `|Ψ⟩` with `s = √q`, as a function of `s` so
/// rational `s` keeps them exact.
pub fn psi_weights<T: Field>(family: Family, n: usize, s: &T) -> Vec<T> {
    qnum::rho_for(family, n)
        .iter()
        .enumerate()
        .map(|(idx, rho)| {
            let w = powi(s, -rho.doubled());
            if qnum::epsilon_for(family, n, idx + 1) < 0 {
                -w
            } else {
                w
            }
        })
        .collect()
}

/// `P₀′` assembled term by term from the matrix units `(ij)⊗(īj̄)`.
pub fn p0_prime_matrix<T: Field>(family: Family, n: usize, s: &T) -> DMatrix<T> {
    let rho = qnum::rho_for(family, n);
    let dim = n * n;
    let mut m = DMatrix::from_element(dim, dim, T::zero());
    for i in 1..=n {
        for j in 1..=n {
            let ib = n - i + 1;
            let jb = n - j + 1;
            // q^{ρ_ī − ρ_j} = s^{2(ρ_ī − ρ_j)}
            let mut c = powi(s, rho[ib - 1].doubled() - rho[j - 1].doubled());
            if qnum::epsilon_for(family, n, i) * qnum::epsilon_for(family, n, j) < 0 {
                c = -c;
            }
            // (ij)⊗(īj̄) maps |j j̄⟩ to |i ī⟩
            m[(pair_index(n, i, ib), pair_index(n, j, jb))] = c;
        }
    }
    m
}

/// Float `P₀′` for a spec.
pub fn build_p0_prime(spec: &AlgebraSpec) -> DenseOperator<f64> {
    let s = spec.q().sqrt();
    DenseOperator { n: spec.n(), matrix: p0_prime_matrix(spec.family(), spec.n(), &s) }
}

/// `P₀ = P₀′ / k`.
pub fn build_p0(spec: &AlgebraSpec) -> DenseOperator<f64> {
    let k = loop_constant(spec);
    let mut op = build_p0_prime(spec);
    op.matrix /= k;
    op
}

/// Exact `P₀′` at `q = s²` for rational `s`.
pub fn build_p0_prime_exact(family: Family, n: usize, s: &BigRational) -> DenseOperator<BigRational> {
    DenseOperator { n, matrix: p0_prime_matrix(family, n, s) }
}

/// Exact loop constant `Σᵢ aᵢ²` at `q = s²`.
pub fn loop_constant_exact(family: Family, n: usize, s: &BigRational) -> BigRational {
    psi_weights(family, n, s).iter().fold(BigRational::from_integer(0.into()), |acc, a| acc + a * a)
}

/// Exact `P₀` at `q = s²`.
pub fn build_p0_exact(family: Family, n: usize, s: &BigRational) -> DenseOperator<BigRational> {
    let k = loop_constant_exact(family, n, s);
    let m = p0_prime_matrix(family, n, s).map(|x| x / k.clone());
    DenseOperator { n, matrix: m }
}

/// Coefficients of `|Ψ⟩` over `|1 1̄⟩, |2 2̄⟩, …, |N N̄⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiState {
    pub n: usize,
    pub coeffs: Vec<f64>,
    pub normalized: bool,
}

impl PsiState {
    /// Full `N²` amplitude vector.
    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.n;
        let mut v = DVector::zeros(n * n);
        for (idx, a) in self.coeffs.iter().enumerate() {
            let i = idx + 1;
            v[pair_index(n, i, n - i + 1)] = *a;
        }
        v
    }

    /// Schmidt weights `|aᵢ|²`.
    pub fn weights(&self) -> Vec<f64> {
        self.coeffs.iter().map(|a| a * a).collect()
    }
}

/// `|Ψ⟩`, optionally normalized by `1/√k`.
pub fn psi_state(spec: &AlgebraSpec, normalized: bool) -> PsiState {
    let s = spec.q().sqrt();
    let mut coeffs = psi_weights(spec.family(), spec.n(), &s);
    if normalized {
        let norm = coeffs.iter().map(|a| a * a).sum::<f64>().sqrt();
        coeffs.iter_mut().for_each(|a| *a /= norm);
    }
    PsiState { n: spec.n(), coeffs, normalized }
}

/// `P₀′ (x ⊗ y) = (Σᵢ aᵢ xᵢ y_ī) |Ψ⟩`; returns the scalar and the
/// unnormalized `|Ψ⟩` it multiplies.
pub fn apply_p0_prime_product(spec: &AlgebraSpec, x: &[Complex64], y: &[Complex64]) -> Result<(Complex64, PsiState)> {
    let n = spec.n();
    for v in [x, y] {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
    }
    let psi = psi_state(spec, false);
    let scalar = psi
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| x[i] * y[n - 1 - i] * *a)
        .sum();
    Ok((scalar, psi))
}

/// `‖(P₀⊗I)(I⊗P₀)(P₀⊗I) − k^{−2}(P₀⊗I)‖_max` and its mirror image.
pub fn tl_core_residuals(spec: &AlgebraSpec) -> (f64, f64) {
    let n = spec.n();
    let p0 = build_p0(spec).into_matrix();
    let id = DMatrix::<f64>::identity(n, n);
    let a = p0.kronecker(&id);
    let b = id.kronecker(&p0);
    let k2 = loop_constant(spec).powi(2);
    let left = &a * &b * &a - &a / k2;
    let right = &b * &a * &b - &b / k2;
    (max_abs(&left), max_abs(&right))
}

/// Max-absolute-entry norm.
pub fn max_abs<T>(m: &DMatrix<T>) -> f64
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    m.iter().map(|x| x.clone().abs()).fold(0.0, f64::max)
}

/// Residuals of the projector identities `P₀² = P₀`, `tr P₀ = 1`,
/// `P₀|Ψ⟩ = |Ψ⟩`, rank one and `P₀′|ij⟩ = 0` for `j ≠ ī`.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectorChecks {
    pub idempotence: f64,
    pub trace: f64,
    pub eigen: f64,
    pub rank: usize,
    pub annihilation: f64,
}

pub fn projector_checks(spec: &AlgebraSpec) -> ProjectorChecks {
    let n = spec.n();
    let p0 = build_p0(spec).into_matrix();
    let idempotence = max_abs(&(&p0 * &p0 - &p0));
    let trace = (p0.trace() - 1.0).abs();
    let psi = psi_state(spec, true).to_vector();
    let eigen = (&p0 * &psi - &psi).norm();
    let rank = p0.clone().svd(false, false).rank(1e-10);
    let p0p = build_p0_prime(spec).into_matrix();
    let mut annihilation: f64 = 0.0;
    for i in 1..=n {
        for j in 1..=n {
            if j != n - i + 1 {
                let col = p0p.column(pair_index(n, i, j));
                annihilation = annihilation.max(col.amax());
            }
        }
    }
    ProjectorChecks { idempotence, trace, eigen, rank, annihilation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn specs() -> Vec<AlgebraSpec> {
        let mut v = Vec::new();
        for q in [0.3, 1.0, 2.5] {
            for n in 3..=8 {
                v.push(AlgebraSpec::orthogonal(n, q).unwrap());
            }
            for n in [2, 4, 6, 8] {
                v.push(AlgebraSpec::symplectic(n, q).unwrap());
            }
        }
        v
    }

    #[test]
    fn so3_entries() {
        let q: f64 = 1.7;
        let op = build_p0_prime(&AlgebraSpec::orthogonal(3, q).unwrap());
        assert!((op.entry((1, 3), (1, 3)) - 1.0 / q).abs() < 1e-15);
        assert!((op.entry((2, 2), (3, 1)) - q.sqrt()).abs() < 1e-15);
        assert!((op.entry((1, 3), (2, 2)) - 1.0 / q.sqrt()).abs() < 1e-15);
        assert_eq!(op.entry((1, 2), (1, 2)), 0.0);
        assert_eq!(op.dim(), 9);
    }

    #[test]
    fn sp4_negative_block() {
        let op = build_p0_prime(&AlgebraSpec::symplectic(4, 2.0).unwrap());
        // −(1̄1)⊗(11̄): maps |1 4⟩ to |4 1⟩ with coefficient −1
        assert_eq!(op.entry((4, 1), (1, 4)), -1.0);
        assert!((op.entry((1, 4), (1, 4)) - 2.0_f64.powi(-4)).abs() < 1e-16);
    }

    #[test]
    fn matrix_unit_route_equals_outer_product() {
        for spec in specs() {
            let p = build_p0_prime(&spec).into_matrix();
            let psi = psi_state(&spec, false).to_vector();
            let outer = &psi * psi.transpose();
            assert!(max_abs(&(&p - &outer)) < 1e-12 * p.amax().max(1.0), "{spec}");
            let k = loop_constant(&spec);
            assert!((psi.norm_squared() - k).abs() < 1e-12 * k, "{spec}");
        }
    }

    #[test]
    fn projector_identities() {
        for spec in specs() {
            let c = projector_checks(&spec);
            assert!(c.idempotence < 1e-12, "{spec}: {c:?}");
            assert!(c.trace < 1e-12, "{spec}: {c:?}");
            assert!(c.eigen < 1e-12, "{spec}: {c:?}");
            assert_eq!(c.rank, 1, "{spec}");
            assert_eq!(c.annihilation, 0.0, "{spec}");
        }
    }

    #[test]
    fn examples_from_build_p0() {
        let so3 = AlgebraSpec::orthogonal(3, 1.0).unwrap();
        let p = build_p0(&so3).into_matrix();
        assert!((p.trace() - 1.0).abs() < 1e-15);
        let so4 = AlgebraSpec::orthogonal(4, 2.0).unwrap();
        let sv = build_p0(&so4).into_matrix().svd(false, false).singular_values;
        let nonzero = sv.iter().filter(|s| **s > 1e-10).count();
        assert_eq!(nonzero, 1);
        let sp4 = AlgebraSpec::symplectic(4, 1.0).unwrap();
        let psi = psi_state(&sp4, false).to_vector();
        assert!((build_p0(&sp4).into_matrix() * &psi - &psi).norm() < 1e-14);
    }

    #[test]
    fn psi_examples() {
        let q: f64 = 2.3;
        let so3 = psi_state(&AlgebraSpec::orthogonal(3, q).unwrap(), false);
        let expect = [q.powf(-0.5), 1.0, q.sqrt()];
        for (a, b) in so3.coeffs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let sp4 = psi_state(&AlgebraSpec::symplectic(4, q).unwrap(), false);
        let expect = [q.powi(-2), 1.0 / q, -q, -q * q];
        for (a, b) in sp4.coeffs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let so4 = psi_state(&AlgebraSpec::orthogonal(4, 1.0).unwrap(), true);
        assert_eq!(so4.coeffs, vec![0.5; 4]);
        for spec in specs() {
            let p = psi_state(&spec, true);
            assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_action() {
        let q: f64 = 1.9;
        let so3 = AlgebraSpec::orthogonal(3, q).unwrap();
        let x: Vec<Complex64> = [0.3, -1.1, 0.7].iter().map(|&v| Complex64::new(v, 0.2)).collect();
        let y: Vec<Complex64> = [1.4, 0.5, -0.6].iter().map(|&v| Complex64::new(-0.1, v)).collect();
        let (s, _) = apply_p0_prime_product(&so3, &x, &y).unwrap();
        let expect = x[0] * y[2] * q.powf(-0.5) + x[1] * y[1] + x[2] * y[0] * q.sqrt();
        assert!((s - expect).norm() < 1e-14);

        let e = |i: usize, n: usize| -> Vec<Complex64> {
            (0..n).map(|j| Complex64::new(if j == i { 1.0 } else { 0.0 }, 0.0)).collect()
        };
        let (s, _) = apply_p0_prime_product(&so3, &e(0, 3), &e(1, 3)).unwrap();
        assert_eq!(s, Complex64::new(0.0, 0.0));

        let sp4 = AlgebraSpec::symplectic(4, q).unwrap();
        let (s, _) = apply_p0_prime_product(&sp4, &e(0, 4), &e(3, 4)).unwrap();
        assert!((s.re - q.powi(-2)).abs() < 1e-15);

        assert!(apply_p0_prime_product(&so3, &e(0, 4), &e(0, 3)).is_err());
    }

    #[test]
    fn product_action_matches_full_matrix() {
        for spec in specs() {
            let n = spec.n();
            let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(0.3 * i as f64 - 0.4, 0.1 * i as f64)).collect();
            let y: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 - 0.2 * i as f64, -0.3)).collect();
            let (s, psi) = apply_p0_prime_product(&spec, &x, &y).unwrap();
            let p = build_p0_prime(&spec).into_matrix().map(|v| Complex64::new(v, 0.0));
            let xy = DVector::from_iterator(n * n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| x[i] * y[j]));
            let full = p * xy;
            let predicted = psi.to_vector().map(|v| Complex64::new(v, 0.0) * s);
            let scale = predicted.camax().max(1.0);
            assert!((full - predicted).camax() < 1e-12 * scale, "{spec}");
        }
    }

    #[test]
    fn so3_kernel_combinations() {
        for q in [0.5_f64, 1.0, 3.0] {
            let spec = AlgebraSpec::orthogonal(3, q).unwrap();
            let p = build_p0(&spec).into_matrix();
            let s = q.sqrt();
            let mut v1 = DVector::zeros(9);
            v1[pair_index(3, 1, 3)] = s;
            v1[pair_index(3, 2, 2)] = -1.0;
            let mut v2 = DVector::zeros(9);
            v2[pair_index(3, 2, 2)] = 1.0;
            v2[pair_index(3, 3, 1)] = -1.0 / s;
            assert!((&p * v1).amax() < 1e-15);
            assert!((&p * v2).amax() < 1e-15);
        }
    }

    #[test]
    fn tl_core() {
        for spec in specs() {
            let (l, r) = tl_core_residuals(&spec);
            assert!(l < 1e-12 && r < 1e-12, "{spec}: {l} {r}");
        }
    }

    #[test]
    fn exact_so3_at_q4() {
        let s = ratio(2, 1);
        let p = build_p0_prime_exact(Family::Orthogonal, 3, &s);
        assert_eq!(p.entry((1, 3), (1, 3)), ratio(1, 4));
        assert_eq!(p.entry((2, 2), (3, 1)), ratio(2, 1));
        assert_eq!(loop_constant_exact(Family::Orthogonal, 3, &s), ratio(21, 4));
        let p0 = build_p0_exact(Family::Orthogonal, 3, &s).into_matrix();
        assert_eq!(&p0 * &p0, p0);
    }

    #[test]
    fn export_formats() {
        let op = build_p0_prime(&AlgebraSpec::orthogonal(3, 1.0).unwrap());
        let csv = op.to_csv();
        assert!(csv.starts_with("row,col,value\n"));
        assert_eq!(csv.lines().count(), 1 + 9);
        let v: serde_json::Value = serde_json::from_str(&op.to_json()).unwrap();
        assert_eq!(v["dim"], 9);
        assert_eq!(v["rows"][2][6].as_f64().unwrap(), 1.0);
    }
}
