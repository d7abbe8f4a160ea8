//! Scalar q-arithmetic: brackets, loop constant, rapidity parameters and the
//! braid coefficient `ω(θ)`, together with the index data (ρ-tuples, ε-signs,
//! conjugate index `ī`) that every two-site object is built from.

use std::fmt;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `|sinh(η + θ)|` below this is treated as a pole of `ω`.
pub const POLE_TOLERANCE: f64 = 1e-300;

/// Orthogonal (SÔ) or symplectic (Sp̂) family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Orthogonal,
    Symplectic,
}

impl Family {
    /// `+1` for SÔ(N), `−1` for Sp̂(N).
    pub fn sign(self) -> i32 {
        match self {
            Family::Orthogonal => 1,
            Family::Symplectic => -1,
        }
    }

    /// Short tag used in CSV output and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            Family::Orthogonal => "so",
            Family::Symplectic => "sp",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "so" | "orthogonal" => Ok(Family::Orthogonal),
            "sp" | "symplectic" => Ok(Family::Symplectic),
            other => Err(Error::Parse(format!("unknown family '{other}' (expected so|sp)"))),
        }
    }
}

/// Branch of `sinh η = ±√(k²−4)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("unknown sign '{other}' (expected plus|minus)"))),
        }
    }
}

/// The `(family, N, q)` point every projector, braid matrix and chain is
/// derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraSpec {
    family: Family,
    n: usize,
    q: f64,
}

impl AlgebraSpec {
    /// Orthogonal requires `n ≥ 3`; symplectic requires even `n ≥ 2`; `q`
    /// must be finite and positive.
    pub fn new(family: Family, n: usize, q: f64) -> Result<Self> {
        match family {
            Family::Orthogonal if n < 3 => {
                return Err(Error::InvalidSpec(format!("SO-hat(N) needs N >= 3, got {n}")))
            }
            Family::Symplectic if n < 2 || n % 2 != 0 => {
                return Err(Error::InvalidSpec(format!("Sp-hat(N) needs even N >= 2, got {n}")))
            }
            _ => {}
        }
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidSpec(format!("q must be real and positive, got {q}")));
        }
        Ok(Self { family, n, q })
    }

    pub fn orthogonal(n: usize, q: f64) -> Result<Self> {
        Self::new(Family::Orthogonal, n, q)
    }

    pub fn symplectic(n: usize, q: f64) -> Result<Self> {
        Self::new(Family::Symplectic, n, q)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Same family and dimension at a different deformation.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.family, self.n, q)
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::Orthogonal => "SO",
            Family::Symplectic => "Sp",
        };
        write!(f, "{name}-hat({}) at q={}", self.n, self.q)
    }
}

/// A ρ-tuple entry. Stored doubled so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub fn from_doubled(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub fn from_int(v: i32) -> Self {
        HalfInt(2 * v)
    }

    pub fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Loop constant together with the chosen branch of `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RapidityParams {
    pub k: f64,
    pub eta: f64,
    /// Chain coupling `λ = −1/sinh η = ∓2/√(k²−4)`.
    pub lambda: f64,
    pub sign: Sign,
}

/// `[m] = (q^m − q^{−m})/(q − q^{−1})`, with the `q = 1` limit `m`.
pub fn q_bracket(m: i32, q: f64) -> f64 {
    if q == 1.0 {
        return m as f64;
    }
    // sinh form stays accurate as q → 1
    let u = q.ln();
    (m as f64 * u).sinh() / u.sinh()
}

/// `k = [N−1]+1` (orthogonal) or `k = [N+1]−1` (symplectic).
pub fn loop_constant(spec: &AlgebraSpec) -> f64 {
    let eps = spec.family.sign();
    q_bracket(spec.n as i32 - eps, spec.q) + eps as f64
}

/// Solves `e^η + e^{−η} = k` on the requested branch.
pub fn rapidity_params(spec: &AlgebraSpec, sign: Sign) -> Result<RapidityParams> {
    rapidity_from_k(loop_constant(spec), sign)
}

pub fn rapidity_from_k(k: f64, sign: Sign) -> Result<RapidityParams> {
    if !(k > 2.0) {
        return Err(Error::DegenerateLoopConstant { k });
    }
    let eta = sign.value() * (k / 2.0).acosh();
    let lambda = -sign.value() * 2.0 / (k * k - 4.0).sqrt();
    Ok(RapidityParams { k, eta, lambda, sign })
}

/// `ω(θ) = sinh(η−θ)/sinh(η+θ) − 1` for complex rapidity.
pub fn omega(theta: Complex64, eta: f64) -> Result<Complex64> {
    let eta = Complex64::new(eta, 0.0);
    let den = (eta + theta).sinh();
    if den.norm() < POLE_TOLERANCE {
        return Err(Error::PoleAtRapidity { re: theta.re, im: theta.im });
    }
    Ok((eta - theta).sinh() / den - 1.0)
}

/// Real-rapidity `ω(θ)`.
pub fn omega_real(theta: f64, eta: f64) -> Result<f64> {
    let den = (eta + theta).sinh();
    if den.abs() < POLE_TOLERANCE {
        return Err(Error::PoleAtRapidity { re: theta, im: 0.0 });
    }
    Ok((eta - theta).sinh() / den - 1.0)
}

/// `|ω + ω′ + ωω′ − ω″ + k^{−2}ωω′ω″|` with `k = 2cosh η`, where
/// `ω″ = ω(θ+θ′)`. Vanishes exactly when the braid equation is satisfied.
pub fn verify_omega_identity(theta: f64, theta_prime: f64, eta: f64) -> Result<f64> {
    let w = omega_real(theta, eta)?;
    let wp = omega_real(theta_prime, eta)?;
    let wpp = omega_real(theta + theta_prime, eta)?;
    let k = 2.0 * eta.cosh();
    Ok((w + wp + w * wp - wpp + w * wp * wpp / (k * k)).abs())
}

/// ρ-tuple of SO(2n+1), SO(2n) or Sp(2n).
pub fn rho_tuple(spec: &AlgebraSpec) -> Vec<HalfInt> {
    rho_for(spec.family, spec.n)
}

pub(crate) fn rho_for(family: Family, n: usize) -> Vec<HalfInt> {
    let half = (n / 2) as i32;
    match family {
        Family::Orthogonal if n % 2 == 1 => {
            // n−½, …, ½, 0, −½, …, −n+½
            let mut v: Vec<_> = (0..half).map(|j| HalfInt(2 * (half - j) - 1)).collect();
            v.push(HalfInt(0));
            v.extend((0..half).map(|j| HalfInt(-(2 * j + 1))));
            v
        }
        Family::Orthogonal => {
            // n−1, …, 1, 0, 0, −1, …, −n+1
            let mut v: Vec<_> = (0..half).map(|j| HalfInt::from_int(half - 1 - j)).collect();
            v.extend((0..half).map(|j| HalfInt::from_int(-j)));
            v
        }
        Family::Symplectic => {
            let mut v: Vec<_> = (0..half).map(|j| HalfInt::from_int(half - j)).collect();
            v.extend((0..half).map(|j| HalfInt::from_int(-(j + 1))));
            v
        }
    }
}

/// `ε_i` for a 1-based index: always `+1` for the orthogonal family, `−1`
/// for `i > N/2` in the symplectic family.
pub fn epsilon_sign(spec: &AlgebraSpec, i: usize) -> Result<i32> {
    check_index(i, spec.n)?;
    Ok(epsilon_for(spec.family, spec.n, i))
}

pub(crate) fn epsilon_for(family: Family, n: usize, i: usize) -> i32 {
    match family {
        Family::Symplectic if i > n / 2 => -1,
        _ => 1,
    }
}

/// Conjugate index `ī = N − i + 1`.
pub fn bar(i: usize, n: usize) -> Result<usize> {
    check_index(i, n)?;
    Ok(n - i + 1)
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        Err(Error::IndexOutOfRange { index: i, n })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half(v: &[i32]) -> Vec<HalfInt> {
        v.iter().map(|&d| HalfInt::from_doubled(d)).collect()
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(q_bracket(2, 1.0), 2.0);
        // (8 − 1/8)/(2 − 1/2)
        assert!((q_bracket(3, 2.0) - 5.25).abs() < 1e-14);
        for q in [0.3, 1.0, 2.0, 7.5] {
            assert!((q_bracket(1, q) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn bracket_near_one_is_continuous() {
        let b = q_bracket(5, 1.0 + 1e-12);
        assert!((b - 5.0).abs() < 1e-9);
    }

    #[test]
    fn loop_constant_examples() {
        let so3 = AlgebraSpec::orthogonal(3, 1.0).unwrap();
        assert_eq!(loop_constant(&so3), 3.0);
        for q in [0.4, 1.7, 3.0] {
            let s = AlgebraSpec::orthogonal(3, q).unwrap();
            assert!((loop_constant(&s) - (1.0 / q + 1.0 + q)).abs() < 1e-13);
        }
        let sp2 = AlgebraSpec::symplectic(2, 1.0).unwrap();
        assert_eq!(loop_constant(&sp2), 2.0);
        let q: f64 = 1.3;
        let sp4 = AlgebraSpec::symplectic(4, q).unwrap();
        let expect = q.powi(-4) + q.powi(-2) + q.powi(2) + q.powi(4);
        assert!((loop_constant(&sp4) - expect).abs() < 1e-12);
        let so4 = AlgebraSpec::orthogonal(4, q).unwrap();
        assert!((loop_constant(&so4) - (q.powi(-2) + 2.0 + q.powi(2))).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(AlgebraSpec::orthogonal(2, 1.0).is_err());
        assert!(AlgebraSpec::symplectic(3, 1.0).is_err());
        assert!(AlgebraSpec::symplectic(0, 1.0).is_err());
        assert!(AlgebraSpec::orthogonal(3, 0.0).is_err());
        assert!(AlgebraSpec::orthogonal(3, -1.0).is_err());
        assert!(AlgebraSpec::orthogonal(3, f64::NAN).is_err());
        assert!(AlgebraSpec::symplectic(2, 1.0).is_ok());
    }

    #[test]
    fn rapidity_examples() {
        let so3 = AlgebraSpec::orthogonal(3, 1.0).unwrap();
        let p = rapidity_params(&so3, Sign::Plus).unwrap();
        assert_eq!(p.k, 3.0);
        assert!(p.eta.sinh() > 0.0);
        assert!((p.eta - 1.5_f64.acosh()).abs() < 1e-15);
        assert!((p.lambda + 2.0 / 5.0_f64.sqrt()).abs() < 1e-15);

        let sp2 = AlgebraSpec::symplectic(2, 1.0).unwrap();
        assert!(matches!(
            rapidity_params(&sp2, Sign::Plus),
            Err(Error::DegenerateLoopConstant { .. })
        ));

        let so4 = AlgebraSpec::orthogonal(4, 1.0).unwrap();
        let m = rapidity_params(&so4, Sign::Minus).unwrap();
        assert_eq!(m.k, 4.0);
        assert!((m.eta.sinh() + 3.0_f64.sqrt()).abs() < 1e-14);
        assert!((m.lambda - 2.0 / 12.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rapidity_invariants() {
        for q in [0.5, 1.0, 2.2] {
            let s = AlgebraSpec::orthogonal(5, q).unwrap();
            let p = rapidity_params(&s, Sign::Plus).unwrap();
            let m = rapidity_params(&s, Sign::Minus).unwrap();
            assert_eq!(p.k, m.k);
            assert!((p.lambda + m.lambda).abs() < 1e-15);
            assert!((p.eta.cosh() - p.k / 2.0).abs() < 1e-13 * p.k);
            assert!((p.eta.sinh() - (p.k * p.k - 4.0).sqrt() / 2.0).abs() < 1e-12 * p.k);
            assert!((p.lambda + 1.0 / p.eta.sinh()).abs() < 1e-14);
        }
    }

    #[test]
    fn omega_examples() {
        let eta = 1.5_f64.acosh();
        assert!(omega_real(0.0, eta).unwrap().abs() < 1e-16);
        assert!((omega_real(eta, eta).unwrap() + 1.0).abs() < 1e-16);
        assert!(matches!(omega_real(-eta, eta), Err(Error::PoleAtRapidity { .. })));
        assert!(matches!(
            omega(Complex64::new(-eta, 0.0), eta),
            Err(Error::PoleAtRapidity { .. })
        ));
        let z = omega(Complex64::new(0.3, 0.0), eta).unwrap();
        assert!((z.re - omega_real(0.3, eta).unwrap()).abs() < 1e-15);
        assert!(z.im.abs() < 1e-15);
    }

    #[test]
    fn omega_identity_examples() {
        let eta = |s: AlgebraSpec| rapidity_params(&s, Sign::Plus).unwrap().eta;
        let e3 = eta(AlgebraSpec::orthogonal(3, 1.0).unwrap());
        assert_eq!(verify_omega_identity(0.0, 0.0, e3).unwrap(), 0.0);
        let e = eta(AlgebraSpec::orthogonal(3, 1.5).unwrap());
        assert!(verify_omega_identity(0.7, -0.2, e).unwrap() < 1e-12);
        let e = eta(AlgebraSpec::symplectic(4, 2.0).unwrap());
        assert!(verify_omega_identity(0.4, 0.9, e).unwrap() < 1e-12);
        let e = eta(AlgebraSpec::orthogonal(3, 1.0).unwrap());
        assert!(verify_omega_identity(0.3, 0.51, e).unwrap() < 1e-12);
    }

    #[test]
    fn rho_examples() {
        let r = |f, n| rho_tuple(&AlgebraSpec::new(f, n, 1.0).unwrap());
        assert_eq!(r(Family::Orthogonal, 3), half(&[1, 0, -1]));
        assert_eq!(r(Family::Orthogonal, 4), half(&[2, 0, 0, -2]));
        assert_eq!(r(Family::Symplectic, 4), half(&[4, 2, -2, -4]));
        assert_eq!(r(Family::Orthogonal, 5), half(&[3, 1, 0, -1, -3]));
        assert_eq!(r(Family::Orthogonal, 6), half(&[4, 2, 0, 0, -2, -4]));
        assert_eq!(r(Family::Symplectic, 2), half(&[2, -2]));
        assert_eq!(r(Family::Symplectic, 6), half(&[6, 4, 2, -2, -4, -6]));
    }

    #[test]
    fn rho_is_odd_under_bar() {
        for (f, n) in [(Family::Orthogonal, 7), (Family::Orthogonal, 8), (Family::Symplectic, 8)] {
            let rho = rho_for(f, n);
            for i in 0..n {
                assert_eq!(rho[i].doubled(), -rho[n - 1 - i].doubled());
            }
        }
    }

    #[test]
    fn epsilon_and_bar() {
        let sp4 = AlgebraSpec::symplectic(4, 1.0).unwrap();
        assert_eq!(epsilon_sign(&sp4, 2).unwrap(), 1);
        assert_eq!(epsilon_sign(&sp4, 3).unwrap(), -1);
        let so5 = AlgebraSpec::orthogonal(5, 1.0).unwrap();
        assert_eq!(epsilon_sign(&so5, 4).unwrap(), 1);
        assert!(matches!(epsilon_sign(&so5, 6), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(epsilon_sign(&so5, 0), Err(Error::IndexOutOfRange { .. })));

        assert_eq!(bar(1, 3).unwrap(), 3);
        assert_eq!(bar(2, 3).unwrap(), 2);
        assert_eq!(bar(4, 4).unwrap(), 1);
        assert!(bar(5, 4).is_err());
        for n in 1..=12 {
            for i in 1..=n {
                assert_eq!(bar(bar(i, n).unwrap(), n).unwrap(), i);
            }
        }
    }

    #[test]
    fn parse_family_and_sign() {
        assert_eq!("so".parse::<Family>().unwrap(), Family::Orthogonal);
        assert_eq!("SP".parse::<Family>().unwrap(), Family::Symplectic);
        assert!("su".parse::<Family>().is_err());
        assert_eq!("minus".parse::<Sign>().unwrap(), Sign::Minus);
        assert!("up".parse::<Sign>().is_err());
    }

    proptest! {
        #[test]
        fn bracket_symmetric_under_inversion(m in -12i32..12, lq in -3.0f64..3.0) {
            let q = lq.exp();
            let a = q_bracket(m, q);
            let b = q_bracket(m, 1.0 / q);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn loop_constant_symmetric_under_inversion(n in 3usize..10, lq in -2.0f64..2.0, symp in any::<bool>()) {
            let q = lq.exp();
            let family = if symp { Family::Symplectic } else { Family::Orthogonal };
            let n = if symp { 2 * (n / 2) } else { n };
            let a = loop_constant(&AlgebraSpec::new(family, n, q).unwrap());
            let b = loop_constant(&AlgebraSpec::new(family, n, 1.0 / q).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn omega_identity_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let specs = [
            (Family::Orthogonal, 3),
            (Family::Orthogonal, 4),
            (Family::Orthogonal, 5),
            (Family::Symplectic, 4),
            (Family::Symplectic, 6),
        ];
        for (f, n) in specs {
            for q in [0.5, 1.0, 1.7] {
                let eta = rapidity_params(&AlgebraSpec::new(f, n, q).unwrap(), Sign::Plus)
                    .unwrap()
                    .eta;
                // keep η+θ, η+θ′ and η+θ+θ′ away from the poles
                let lo = -0.3 * eta.abs();
                for _ in 0..100 {
                    let t: f64 = rng.gen_range(lo..1.5);
                    let tp: f64 = rng.gen_range(lo..1.5);
                    let r = verify_omega_identity(t, tp, eta).unwrap();
                    assert!(r < 1e-12, "{f:?} {n} q={q} θ={t} θ'={tp}: {r}");
                }
            }
        }
    }
}
