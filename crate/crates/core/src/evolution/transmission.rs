//! Encode an initial two-site state at the left end of the `SÔ(3)` six-site
//! chain, observe the right end over a few small times, and decode.
//!
//! The encoded state is `(c₁|1̄1⟩ + c₂|11̄⟩)|1111⟩`. The observed amplitude
//! `d₁(t)` on `|1111⟩|1̄1⟩` equals `c₁x₁(t) + c₂x₂(t)`, where `x₂` starts at
//! `t³` and `x₁` at `t⁴`. A polynomial fit of `d₁` over the sample times
//! yields its `t³` and `t⁴` coefficients, from which `c₂` and then `c₁`
//! follow.

use num::complex::Complex64;
use serde::Serialize;

use super::fit::{polyfit, MAX_CONDITION};
use super::sixchain::{sixchain_series, FAR_END, LENGTH};
use super::{SeriesPropagator, DEFAULT_ORDER};
use crate::chain::{Boundary, ChainSpec, StateVector};
use crate::error::{Error, Result};
use crate::qnum::{rapidity_params, AlgebraSpec, Sign};

#[derive(Debug, Clone, Serialize)]
pub struct TransmissionResult {
    pub q: f64,
    pub sign: Sign,
    pub lambda: f64,
    pub order: usize,
    pub c1: Complex64,
    pub c2: Complex64,
    pub t_samples: Vec<f64>,
    /// Observed `d₁(t)`, `d₂(t)` at each sample time.
    pub d1_samples: Vec<Complex64>,
    pub d2_samples: Vec<Complex64>,
    /// Fitted coefficients of `t^p`.
    pub d1: Vec<Complex64>,
    pub d2: Vec<Complex64>,
    pub condition: f64,
    pub recovered_c1: Complex64,
    pub recovered_c2: Complex64,
}

impl TransmissionResult {
    /// `max(|c₁ − ĉ₁|, |c₂ − ĉ₂|)`.
    pub fn error(&self) -> f64 {
        (self.c1 - self.recovered_c1).norm().max((self.c2 - self.recovered_c2).norm())
    }
}

fn six_chain(q: f64, sign: Sign) -> Result<ChainSpec> {
    ChainSpec::new(AlgebraSpec::orthogonal(3, q)?, LENGTH, Boundary::Open, sign)
}

fn check_order(order: usize) -> Result<()> {
    if order < 4 {
        return Err(Error::InvalidParameter(format!("decoding reads the t^4 coefficient; order must be at least 4, got {order}")));
    }
    Ok(())
}

/// Evolves `state` to each sample time with the order-`order` series and
/// returns the amplitudes on the far-end states.
fn observe(chain: &ChainSpec, state: &StateVector, ts: &[f64], order: usize) -> Result<Vec<[Complex64; 3]>> {
    let mut prop = SeriesPropagator::new(chain)?;
    ts.iter()
        .map(|&t| {
            let out = prop.evolve(state, t, order)?;
            let mut far = [Complex64::new(0.0, 0.0); 3];
            for (slot, labels) in far.iter_mut().zip(FAR_END.iter()) {
                *slot = out.amplitude(labels)?;
            }
            Ok(far)
        })
        .collect()
}

/// `(ĉ₁, ĉ₂)` from the fitted `t³`, `t⁴` coefficients of `d₁`.
fn decode_pair(q: f64, lambda: f64, order: usize, d1: &[Complex64]) -> (Complex64, Complex64) {
    let model = sixchain_series(q, lambda, order).far_end;
    let x1 = model.get("x1").expect("x1 series");
    let x2 = model.get("x2").expect("x2 series");
    let c2 = d1[3] / x2[3];
    let c1 = (d1[4] - c2 * x2[4]) / x1[4];
    (c1, c2)
}

/// Round trip with the default series order.
pub fn transmit_roundtrip(q: f64, sign: Sign, c1: Complex64, c2: Complex64, t_samples: &[f64]) -> Result<TransmissionResult> {
    transmit_roundtrip_with_order(q, sign, c1, c2, t_samples, DEFAULT_ORDER)
}

/// Round trip with an explicit series order; the fit degree equals the
/// order, so at least `order + 1` distinct samples are needed.
pub fn transmit_roundtrip_with_order(q: f64, sign: Sign, c1: Complex64, c2: Complex64, t_samples: &[f64], order: usize) -> Result<TransmissionResult> {
    check_order(order)?;
    let chain = six_chain(q, sign)?;
    let lambda = rapidity_params(chain.spec(), sign)?.lambda;
    let state = StateVector::from_terms(&chain, &[(c1, vec![3, 1, 1, 1, 1, 1]), (c2, vec![1, 3, 1, 1, 1, 1])])?;
    let obs = observe(&chain, &state, t_samples, order)?;
    let d1_samples: Vec<Complex64> = obs.iter().map(|o| o[0]).collect();
    let d2_samples: Vec<Complex64> = obs.iter().map(|o| o[1]).collect();
    let f1 = polyfit(t_samples, &d1_samples, order)?;
    let f2 = polyfit(t_samples, &d2_samples, order)?;
    let (rc1, rc2) = decode_pair(q, lambda, order, &f1.coeffs);
    Ok(TransmissionResult {
        q,
        sign,
        lambda,
        order,
        c1,
        c2,
        t_samples: t_samples.to_vec(),
        d1_samples,
        d2_samples,
        d1: f1.coeffs,
        d2: f2.coeffs,
        condition: f1.condition,
        recovered_c1: rc1,
        recovered_c2: rc2,
    })
}

/// Far-end samples of `(a|1̄1⟩ + b|22⟩ + c|11̄⟩)|1111⟩` at `q = 1 + δ`.
#[derive(Debug, Clone, Serialize)]
pub struct ThreeParamObservation {
    pub delta: f64,
    pub sign: Sign,
    pub order: usize,
    pub t_samples: Vec<f64>,
    pub d1_samples: Vec<Complex64>,
}

pub fn simulate_three_param(
    (a, b, c): (Complex64, Complex64, Complex64),
    deltas: &[f64],
    sign: Sign,
    t_samples: &[f64],
    order: usize,
) -> Result<Vec<ThreeParamObservation>> {
    check_order(order)?;
    deltas
        .iter()
        .map(|&delta| {
            check_delta(delta)?;
            let chain = six_chain(1.0 + delta, sign)?;
            let state = StateVector::from_terms(&chain, &[(a, vec![3, 1, 1, 1, 1, 1]), (b, vec![2, 2, 1, 1, 1, 1]), (c, vec![1, 3, 1, 1, 1, 1])])?;
            let obs = observe(&chain, &state, t_samples, order)?;
            Ok(ThreeParamObservation { delta, sign, order, t_samples: t_samples.to_vec(), d1_samples: obs.iter().map(|o| o[0]).collect() })
        })
        .collect()
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.abs() <= 0.1) {
        return Err(Error::InvalidParameter(format!("|delta| must not exceed 0.1, got {delta}")));
    }
    Ok(())
}

/// Recovers `(a, b, c)`.
///
/// `H′|22⟩|1111⟩ = q^{−1/2} H′|1̄1⟩|1111⟩`, so each observation only fixes
/// `c` and the combination `a + q^{−1/2}b`. Two or more distinct `δ` separate
/// `a` from `b`; with a single `δ` the system is singular and
/// `IllConditionedFit` is returned.
pub fn decode_three_param(observations: &[ThreeParamObservation]) -> Result<(Complex64, Complex64, Complex64)> {
    let mut rows = Vec::new();
    let mut c_sum = Complex64::new(0.0, 0.0);
    for ob in observations {
        check_delta(ob.delta)?;
        let q = 1.0 + ob.delta;
        let lambda = rapidity_params(&AlgebraSpec::orthogonal(3, q)?, ob.sign)?.lambda;
        let fit = polyfit(&ob.t_samples, &ob.d1_samples, ob.order)?;
        let (eff, c) = decode_pair(q, lambda, ob.order, &fit.coeffs);
        rows.push((1.0 / q.sqrt(), eff));
        c_sum += c;
    }
    // least squares for eff_j = a + w_j b
    let m = rows.len() as f64;
    let (sw, sww) = rows.iter().fold((0.0, 0.0), |(s, ss), (w, _)| (s + w, ss + w * w));
    // normal matrix [[m, sw], [sw, sww]]
    let tr = m + sww;
    let det = m * sww - sw * sw;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let (lmax, lmin) = (tr / 2.0 + disc, tr / 2.0 - disc);
    let condition = if lmin > 0.0 && rows.len() >= 2 { (lmax / lmin).sqrt() } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) || det <= 0.0 {
        return Err(Error::IllConditionedFit { condition });
    }
    let (se, swe) = rows.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(s, sw_), (w, e)| (s + e, sw_ + e * *w));
    let a = (se * sww - swe * sw) / det;
    let b = (swe * m - se * sw) / det;
    Ok((a, b, c_sum / m))
}
