//! Entanglement entropy of the normalized `|Ψ⟩`.
//!
//! `|Ψ⟩` is already in Schmidt form over `|i⟩|ī⟩`, so the entropy is
//! `S = −Σᵢ |aᵢ|² ln |aᵢ|²` (natural log) with no density matrix needed.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::projector::{pair_index, psi_state};
use crate::qnum::{self, AlgebraSpec, Family};

/// Shannon entropy of a probability vector with `0·ln 0 = 0`.
pub fn shannon(weights: &[f64]) -> f64 {
    -weights.iter().filter(|w| **w > 0.0).map(|w| w * w.ln()).sum::<f64>()
}

pub fn entropy_direct(spec: &AlgebraSpec) -> f64 {
    shannon(&psi_state(spec, true).weights())
}

/// Closed forms for `SÔ(3)`, `SÔ(4)` and `Sp̂(4)`.
pub fn entropy_closed_form(spec: &AlgebraSpec) -> Result<f64> {
    let q = spec.q();
    let qi = 1.0 / q;
    let lq = q.ln();
    match (spec.family(), spec.n()) {
        (Family::Orthogonal, 3) => {
            let z = qi + 1.0 + q;
            Ok(z.ln() - (q - qi) / z * lq)
        }
        (Family::Orthogonal, 4) => Ok(2.0 * (qi + q).ln() - 2.0 * (q - qi) / (q + qi) * lq),
        (Family::Symplectic, 4) => {
            let (q2, q4) = (q * q, q.powi(4));
            let z = 1.0 / q4 + 1.0 / q2 + q2 + q4;
            Ok(z.ln() - (4.0 * q4 + 2.0 * q2 - 2.0 / q2 - 4.0 / q4) / z * lq)
        }
        _ => Err(Error::UnsupportedSpec(spec.to_string())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyCurve {
    pub family: Family,
    pub n: usize,
    /// `(q, S)` pairs in increasing `q`.
    pub samples: Vec<(f64, f64)>,
}

impl EntropyCurve {
    /// CSV with columns `q,S,family,N`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,S,family,N\n");
        self.append_csv_rows(&mut out);
        out
    }

    fn append_csv_rows(&self, out: &mut String) {
        for (q, s) in &self.samples {
            out.push_str(&format!("{},{},{},{}\n", sig17(*q), sig17(*s), self.family.tag(), self.n));
        }
    }

    /// Sample with the largest entropy.
    pub fn peak(&self) -> (f64, f64) {
        self.samples.iter().copied().fold((f64::NAN, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best })
    }
}

/// Several curves in one CSV table.
pub fn curves_to_csv(curves: &[EntropyCurve]) -> String {
    let mut out = String::from("q,S,family,N\n");
    for c in curves {
        c.append_csv_rows(&mut out);
    }
    out
}

pub fn entropy_curve(family: Family, n: usize, q_min: f64, q_max: f64, points: usize, log_spacing: bool) -> Result<EntropyCurve> {
    if !(q_min > 0.0 && q_max > q_min && q_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < q_min < q_max, got [{q_min}, {q_max}]")));
    }
    if points < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 points, got {points}")));
    }
    let spec = AlgebraSpec::new(family, n, 1.0)?;
    let samples = (0..points)
        .map(|j| {
            let f = j as f64 / (points - 1) as f64;
            let q = if log_spacing {
                10f64.powf(q_min.log10() + f * (q_max.log10() - q_min.log10()))
            } else {
                q_min + f * (q_max - q_min)
            };
            Ok((q, entropy_direct(&spec.with_q(q)?)))
        })
        .collect::<Result<_>>()?;
    Ok(EntropyCurve { family, n, samples })
}

/// Default grid: 201 log-spaced points over `[0.01, 100]`.
pub fn default_entropy_curve(family: Family, n: usize) -> Result<EntropyCurve> {
    entropy_curve(family, n, 0.01, 100.0, 201, true)
}

/// One side of a small-`ε` expansion comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionPoint {
    pub q: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Expansion `S(1∓ε) ≈ ln N ± c·ε·ln(1∓ε)` evaluated at both signs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionCheck {
    pub epsilon: f64,
    pub coefficient: f64,
    pub below: ExpansionPoint,
    pub above: ExpansionPoint,
}

impl ExpansionCheck {
    pub fn gap(&self) -> f64 {
        self.below.gap.max(self.above.gap)
    }
}

/// Published first-order coefficients: `2/3` for `SÔ(3)`, `4` for `SÔ(4)`,
/// `10` for `Sp̂(4)`.
pub fn published_expansion_coefficient(spec: &AlgebraSpec) -> Result<f64> {
    match (spec.family(), spec.n()) {
        (Family::Orthogonal, 3) => Ok(2.0 / 3.0),
        (Family::Orthogonal, 4) => Ok(4.0),
        (Family::Symplectic, 4) => Ok(10.0),
        _ => Err(Error::UnsupportedSpec(spec.to_string())),
    }
}

/// Coefficient that makes the expansion hold to `O(ε³)`: `2⟨ρ²⟩`, the
/// curvature of `S` in `ln q` at `q = 1`. Gives `1/3`, `1` and `5` for the
/// three published cases.
pub fn second_order_coefficient(spec: &AlgebraSpec) -> f64 {
    let rho = qnum::rho_tuple(spec);
    2.0 * rho.iter().map(|r| r.value().powi(2)).sum::<f64>() / rho.len() as f64
}

/// Compares `entropy_direct` at `q = 1∓ε` with the published expansion.
pub fn entropy_expansion_check(spec: &AlgebraSpec, epsilon: f64) -> Result<ExpansionCheck> {
    let c = published_expansion_coefficient(spec)?;
    expansion_check_with(spec, epsilon, c)
}

pub fn expansion_check_with(spec: &AlgebraSpec, epsilon: f64, coefficient: f64) -> Result<ExpansionCheck> {
    if !(epsilon > 0.0 && epsilon <= 0.05) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 0.05], got {epsilon}")));
    }
    let ln_n = (spec.n() as f64).ln();
    let point = |sign: f64| -> Result<ExpansionPoint> {
        // sign = +1 for q = 1 − ε
        let q = 1.0 - sign * epsilon;
        let lhs = entropy_direct(&spec.with_q(q)?);
        let rhs = ln_n + sign * coefficient * epsilon * q.ln();
        Ok(ExpansionPoint { q, lhs, rhs, gap: (lhs - rhs).abs() })
    };
    Ok(ExpansionCheck { epsilon, coefficient, below: point(1.0)?, above: point(-1.0)? })
}

/// Number of Schmidt coefficients of a bipartite `N×N` coefficient matrix
/// above `1e−12` relative to the largest.
pub fn schmidt_rank(coeffs: &DMatrix<f64>) -> usize {
    let sv = coeffs.clone().svd(false, false).singular_values;
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > 1e-12 * top).count()
}

/// `N×N` coefficient matrix `C_{ij}` of `|Ψ⟩ = Σ C_{ij}|i⟩|j⟩`.
pub fn psi_coefficient_matrix(spec: &AlgebraSpec) -> DMatrix<f64> {
    let n = spec.n();
    let v = psi_state(spec, true).to_vector();
    DMatrix::from_fn(n, n, |i, j| v[pair_index(n, i + 1, j + 1)])
}

/// `true` iff `|Ψ⟩` is entangled (Schmidt rank above one).
pub fn product_state_witness(spec: &AlgebraSpec) -> bool {
    schmidt_rank(&psi_coefficient_matrix(spec)) > 1
}

/// Self-contained SVG of `S` against `log₁₀ q`.
pub fn curves_to_svg(curves: &[EntropyCurve]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let all = curves.iter().flat_map(|c| c.samples.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0_f64);
    for (q, s) in all {
        x0 = x0.min(q.log10());
        x1 = x1.max(q.log10());
        y1 = y1.max(*s);
    }
    if !x0.is_finite() || x1 <= x0 {
        x0 = -1.0;
        x1 = 1.0;
    }
    let y1 = if y1 > 0.0 { y1 * 1.05 } else { 1.0 };
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - y / y1 * (H - 2.0 * M);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <line x1=\"{M}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{cx}\" y=\"{xl}\" text-anchor=\"middle\" font-size=\"14\">log10 q</text>\n\
         <text x=\"15\" y=\"{cy}\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 15 {cy})\">S</text>\n",
        b = H - M,
        r = W - M,
        cx = W / 2.0,
        xl = H - 12.0,
        cy = H / 2.0,
    );
    for (idx, c) in curves.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let pts: Vec<String> = c.samples.iter().map(|(q, s)| format!("{:.2},{:.2}", px(q.log10()), py(*s))).collect();
        svg.push_str(&format!("<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n", pts.join(" ")));
        let name = match c.family {
            Family::Orthogonal => format!("SO({})", c.n),
            Family::Symplectic => format!("Sp({})", c.n),
        };
        svg.push_str(&format!(
            "<text x=\"{:.0}\" y=\"{:.0}\" font-size=\"12\" fill=\"{color}\">{name}</text>\n",
            W - M - 60.0,
            M + 16.0 * idx as f64
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so(n: usize, q: f64) -> AlgebraSpec {
        AlgebraSpec::orthogonal(n, q).unwrap()
    }

    fn sp(n: usize, q: f64) -> AlgebraSpec {
        AlgebraSpec::symplectic(n, q).unwrap()
    }

    #[test]
    fn direct_examples() {
        assert!((entropy_direct(&so(3, 1.0)) - 3f64.ln()).abs() < 1e-15);
        assert!((entropy_direct(&so(4, 1.0)) - 4f64.ln()).abs() < 1e-15);
        let oracle = 3.5f64.ln() - 1.5 / 3.5 * 2f64.ln();
        assert!((entropy_direct(&so(3, 2.0)) - oracle).abs() < 1e-14);
        assert!((oracle - 0.95570).abs() < 1e-5);
    }

    #[test]
    fn closed_forms() {
        for j in 0..50 {
            let q = 0.1 * 100f64.powf(j as f64 / 49.0);
            for spec in [so(3, q), so(4, q), sp(4, q)] {
                let d = entropy_direct(&spec);
                assert!((entropy_closed_form(&spec).unwrap() - d).abs() < 1e-12, "{spec}");
            }
        }
        assert!((entropy_closed_form(&sp(4, 1.0)).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!(matches!(entropy_closed_form(&so(5, 1.0)), Err(Error::UnsupportedSpec(_))));
    }

    #[test]
    fn curve_properties() {
        let c = entropy_curve(Family::Orthogonal, 3, 0.1, 10.0, 101, true).unwrap();
        for (a, b) in c.samples.iter().zip(c.samples.iter().rev()) {
            assert!((a.0 * b.0 - 1.0).abs() < 1e-12);
            assert!((a.1 - b.1).abs() < 1e-10);
        }
        for n in 3..=6 {
            let c = entropy_curve(Family::Orthogonal, n, 0.1, 10.0, 101, true).unwrap();
            let (q, s) = c.peak();
            assert!((q - 1.0).abs() < 1e-12 && (s - (n as f64).ln()).abs() < 1e-12);
        }
        assert!(entropy_direct(&so(3, 100.0)) < 0.1);
        assert!(entropy_curve(Family::Orthogonal, 3, 2.0, 1.0, 10, true).is_err());
        assert!(entropy_curve(Family::Orthogonal, 3, 1.0, 2.0, 1, true).is_err());
        let lin = entropy_curve(Family::Symplectic, 4, 1.0, 3.0, 5, false).unwrap();
        assert_eq!(lin.samples[2].0, 2.0);
    }

    #[test]
    fn steeper_symplectic_decay() {
        let a = default_entropy_curve(Family::Orthogonal, 4).unwrap();
        let b = default_entropy_curve(Family::Symplectic, 4).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            if x.0 > 1.0 + 1e-9 {
                assert!(y.1 < x.1, "q = {}", x.0);
            }
        }
    }

    #[test]
    fn second_order_coefficients() {
        assert!((second_order_coefficient(&so(3, 1.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((second_order_coefficient(&so(4, 1.0)) - 1.0).abs() < 1e-15);
        assert!((second_order_coefficient(&sp(4, 1.0)) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn corrected_expansion_gap_is_cubic() {
        for spec in [so(3, 1.0), so(4, 1.0), sp(4, 1.0), so(7, 1.0), sp(6, 1.0)] {
            let c = second_order_coefficient(&spec);
            let cal = expansion_check_with(&spec, 0.05, c).unwrap().gap() / 0.05f64.powi(3);
            for eps in [0.04, 0.02, 0.01, 0.005] {
                let chk = expansion_check_with(&spec, eps, c).unwrap();
                assert!(chk.gap() < cal * eps.powi(3), "{spec} {eps}: {chk:?}");
                assert!(chk.below.lhs < (spec.n() as f64).ln());
            }
        }
    }

    #[test]
    fn published_expansion_misses_quadratic_term() {
        let ratios = [(so(3, 1.0), 1.0 / 3.0), (so(4, 1.0), 3.0), (sp(4, 1.0), 5.0)];
        for (spec, expect) in ratios {
            let chk = entropy_expansion_check(&spec, 0.001).unwrap();
            assert!((chk.gap() / 1e-6 - expect).abs() < 0.01 * expect, "{spec}: {chk:?}");
        }
        assert!(entropy_expansion_check(&so(3, 1.0), 0.1).is_err());
    }

    #[test]
    fn entanglement_witness() {
        assert!(product_state_witness(&so(3, 1.0)));
        assert!(product_state_witness(&so(4, 2.0)));
        assert_eq!(schmidt_rank(&psi_coefficient_matrix(&so(3, 1.0))), 3);
        let mut basis = DMatrix::zeros(3, 3);
        basis[(0, 2)] = 1.0;
        assert_eq!(schmidt_rank(&basis), 1);
    }

    #[test]
    fn outputs() {
        let c = entropy_curve(Family::Orthogonal, 3, 0.5, 2.0, 3, true).unwrap();
        let csv = c.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "q,S,family,N");
        assert!(csv.lines().nth(2).unwrap().ends_with(",so,3"));
        let svg = curves_to_svg(&[c]);
        assert!(svg.starts_with("<svg") && svg.contains("polyline") && svg.trim_end().ends_with("</svg>"));
    }
}
