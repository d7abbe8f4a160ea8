//! Time evolution `e^{−iHt}` with `H = λH′`.
//!
//! [`evolve_series`] sums `Σ_{p≤order} (−iλt)^p/p! (H′)^p |ψ⟩` by repeated
//! matrix-free application; [`ExactPropagator`] diagonalises the dense `H`
//! once and serves as the reference. The submodules hold the closed-form
//! iteration laws on three- and four-site chains, the six-site pattern
//! tables, polynomial fitting and the transmission decode.

pub mod fit;
pub mod iteration;
pub mod sixchain;
pub mod transmission;
pub mod wavefront;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num::complex::Complex64;

use crate::chain::{build_hamiltonian, ChainOperator, ChainSpec, StateVector, DENSE_CAP};
use crate::error::{Error, Result};
use crate::projector::psi_weights;
use crate::qnum::{loop_constant, rapidity_params, AlgebraSpec, Sign};

pub use fit::{polyfit, PolyFit, MAX_CONDITION};
pub use iteration::{h3_power_closed_form, h4_power_action, ConjugateBlock, H4Power, Parity};
pub use sixchain::{sixchain_series, SeriesTable, SixChainSeries};
pub use transmission::{decode_three_param, simulate_three_param, transmit_roundtrip, ThreeParamObservation, TransmissionResult};
pub use wavefront::{wavefront_multiplicities, wavefront_reach};

/// Default truncation order of the series propagator.
pub const DEFAULT_ORDER: usize = 5;

/// Truncated-series propagator with preallocated scratch buffers.
#[derive(Debug, Clone)]
pub struct SeriesPropagator {
    h_prime: ChainOperator,
    lambda: f64,
    term: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SeriesPropagator {
    pub fn new(chain: &ChainSpec) -> Result<Self> {
        let h = build_hamiltonian(chain)?;
        let lambda = h.params().expect("hamiltonian carries rapidity data").lambda;
        let dim = chain.dim();
        Ok(Self { h_prime: h.primed(), lambda, term: vec![Complex64::new(0.0, 0.0); dim], scratch: vec![Complex64::new(0.0, 0.0); dim] })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn evolve(&mut self, state: &StateVector, t: f64, order: usize) -> Result<StateVector> {
        let dim = self.h_prime.dim();
        if state.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: state.dim() });
        }
        let mut out = state.amplitudes().to_vec();
        self.term.copy_from_slice(state.amplitudes());
        let z = Complex64::new(0.0, -self.lambda * t);
        for p in 1..=order {
            self.h_prime.apply_into(&self.term, &mut self.scratch);
            let f = z / p as f64;
            for (slot, s) in self.term.iter_mut().zip(&self.scratch) {
                *slot = s * f;
            }
            for (o, tm) in out.iter_mut().zip(&self.term) {
                *o += tm;
            }
        }
        StateVector::from_amplitudes(self.h_prime.chain(), out)
    }
}

pub fn evolve_series(chain: &ChainSpec, state: &StateVector, t: f64, order: usize) -> Result<StateVector> {
    SeriesPropagator::new(chain)?.evolve(state, t, order)
}

/// `V e^{−iΛt} V†` from the eigendecomposition of the dense real-symmetric
/// `H`.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    chain: ChainSpec,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl ExactPropagator {
    pub fn new(chain: &ChainSpec) -> Result<Self> {
        if chain.dim() > DENSE_CAP {
            return Err(Error::DimensionCapExceeded { dim: chain.dim(), cap: DENSE_CAP });
        }
        let h = build_hamiltonian(chain)?.to_dense()?;
        let eig = SymmetricEigen::new(h);
        Ok(Self { chain: chain.clone(), eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        if state.dim() != self.chain.dim() {
            return Err(Error::DimensionMismatch { expected: self.chain.dim(), got: state.dim() });
        }
        let v = &self.eigenvectors;
        let psi = DVector::from_column_slice(state.amplitudes());
        let re = v.transpose() * psi.map(|z| z.re);
        let im = v.transpose() * psi.map(|z| z.im);
        let mut c = DVector::from_fn(re.len(), |i, _| Complex64::new(re[i], im[i]));
        for (ci, e) in c.iter_mut().zip(self.eigenvalues.iter()) {
            *ci *= Complex64::from_polar(1.0, -e * t);
        }
        let out_re = v * c.map(|z| z.re);
        let out_im = v * c.map(|z| z.im);
        let amps = out_re.iter().zip(out_im.iter()).map(|(r, i)| Complex64::new(*r, *i)).collect();
        StateVector::from_amplitudes(&self.chain, amps)
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn energy(&self, state: &StateVector) -> f64 {
        let v = &self.eigenvectors;
        let psi = DVector::from_column_slice(state.amplitudes());
        let re = v.transpose() * psi.map(|z| z.re);
        let im = v.transpose() * psi.map(|z| z.im);
        self.eigenvalues.iter().zip(re.iter().zip(im.iter())).map(|(e, (r, i))| e * (r * r + i * i)).sum()
    }
}

pub fn evolve_exact(chain: &ChainSpec, state: &StateVector, t: f64) -> Result<StateVector> {
    ExactPropagator::new(chain)?.evolve(state, t)
}

/// `e^{−iHt}|i⟩|Ψ⟩|j⟩` on an open four-site chain, written as
/// `e^{−iλkt} e^{−iλt(H′−k)}` and evaluated on the small invariant block
/// containing the state. Labels are 1-based.
pub fn evolve_four_site_block(spec: &AlgebraSpec, sign: Sign, i: usize, j: usize, t: f64) -> Result<StateVector> {
    let chain = ChainSpec::new(spec.clone(), 4, crate::chain::Boundary::Open, sign)?;
    let n = spec.n();
    for l in [i, j] {
        if l == 0 || l > n {
            return Err(Error::IndexOutOfRange { index: l, n });
        }
    }
    let lambda = rapidity_params(spec, sign)?.lambda;
    let k = loop_constant(spec);
    let tau = lambda * t;
    let phase = Complex64::from_polar(1.0, -tau * k);
    let block = four_site_vectors(spec);
    let amps = if j != n - i + 1 {
        // M u = ε v, M v = 2ε u
        let eps = spec.family().sign() as f64;
        let r2 = 2f64.sqrt();
        let cu = Complex64::new((r2 * tau).cos(), 0.0);
        let cv = Complex64::new(0.0, -eps * (r2 * tau).sin() / r2);
        let u = block.generic_u(i, j);
        let v = block.generic_v(i, j);
        u.iter().zip(&v).map(|(a, b)| phase * (cu * a + cv * b)).collect()
    } else {
        let cb = ConjugateBlock::new(spec);
        let coeffs = cb.propagate(i, tau);
        let basis = cb.spanning_vectors();
        let mut out = vec![Complex64::new(0.0, 0.0); chain.dim()];
        for (c, vec) in coeffs.iter().zip(&basis) {
            for (o, x) in out.iter_mut().zip(vec) {
                *o += phase * c * x;
            }
        }
        out
    };
    StateVector::from_amplitudes(&chain, amps)
}

/// Real amplitude vectors of four-site patterns built from `|Ψ⟩`.
pub(crate) struct FourSite {
    n: usize,
    a: Vec<f64>,
}

pub(crate) fn four_site_vectors(spec: &AlgebraSpec) -> FourSite {
    FourSite { n: spec.n(), a: psi_weights(spec.family(), spec.n(), &spec.q().sqrt()) }
}

impl FourSite {
    fn index(&self, l: [usize; 4]) -> usize {
        l.iter().fold(0, |acc, x| acc * self.n + (x - 1))
    }

    fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.n.pow(4)]
    }

    fn bar(&self, i: usize) -> usize {
        self.n - i + 1
    }

    /// `|i⟩|Ψ⟩|j⟩`.
    pub(crate) fn u(&self, i: usize, j: usize) -> Vec<f64> {
        let mut v = self.zeros();
        for m in 1..=self.n {
            v[self.index([i, m, self.bar(m), j])] += self.a[m - 1];
        }
        v
    }

    /// `|i j⟩|Ψ⟩ + |Ψ⟩|i j⟩`.
    pub(crate) fn v(&self, i: usize, j: usize) -> Vec<f64> {
        let mut v = self.zeros();
        for m in 1..=self.n {
            v[self.index([i, j, m, self.bar(m)])] += self.a[m - 1];
            v[self.index([m, self.bar(m), i, j])] += self.a[m - 1];
        }
        v
    }

    /// `|Ψ⟩|Ψ⟩`.
    pub(crate) fn w(&self) -> Vec<f64> {
        let mut v = self.zeros();
        for m in 1..=self.n {
            for p in 1..=self.n {
                v[self.index([m, self.bar(m), p, self.bar(p)])] += self.a[m - 1] * self.a[p - 1];
            }
        }
        v
    }

    fn generic_u(&self, i: usize, j: usize) -> Vec<Complex64> {
        self.u(i, j).into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    }

    fn generic_v(&self, i: usize, j: usize) -> Vec<Complex64> {
        self.v(i, j).into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    }
}

/// `exp(z·C)` for a small complex matrix by scaling and squaring a Taylor
/// series.
pub(crate) fn small_expm(c: &DMatrix<Complex64>, z: Complex64) -> DMatrix<Complex64> {
    let a = c.map(|x| x * z);
    let norm: f64 = a.iter().map(|x| x.norm()).sum();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a.map(|x| x * scale);
    let dim = a.nrows();
    let mut result = DMatrix::<Complex64>::identity(dim, dim);
    let mut term = DMatrix::<Complex64>::identity(dim, dim);
    for p in 1..=30 {
        term = &term * &a / Complex64::new(p as f64, 0.0);
        result += &term;
        if term.iter().map(|x| x.norm()).sum::<f64>() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}
