//! Powers of `H′` on the open `SÔ(3)` six-site chain started from
//! `|x⟩₁ = |1̄11111⟩` or `|x⟩₂ = |11̄1111⟩`.
//!
//! For `p ≥ 1`, `(H′)^p|x⟩` lies in the span of `Ψₗ`, the state with `|Ψ⟩` on
//! sites `(l, l+1)` and `1` everywhere else. Each trajectory is therefore
//! recorded over the seven pattern states `x1, x2, psi12, …, psi56`, and
//! everything outside that span is kept as a remainder so closure can be
//! checked rather than assumed.
//!
//! Pattern coefficients are read off distinguished basis states: `Ψₗ` is
//! the only pattern with `|22⟩` on `(l, l+1)`, after which `x1` and `x2`
//! follow from `|1̄1 1111⟩` and `|11̄ 1111⟩`.

use num::complex::Complex64;
use serde::Serialize;

use crate::chain::{apply_h_prime_generic, encode_index, Boundary};
use crate::format::sig17;
use crate::projector::psi_weights;
use crate::qnum::Family;
use crate::scalar::{powi, Field};

pub const LENGTH: usize = 6;
const N: usize = 3;

/// Pattern labels in storage order.
pub const PATTERNS: [&str; 7] = ["x1", "x2", "psi12", "psi23", "psi34", "psi45", "psi56"];

/// Far-end amplitudes on `|1111⟩|1̄1⟩`, `|1111⟩|11̄⟩`, `|1111⟩|22⟩`.
pub const FAR_END: [[usize; LENGTH]; 3] = [[1, 1, 1, 1, 3, 1], [1, 1, 1, 1, 1, 3], [1, 1, 1, 1, 2, 2]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Start {
    X1,
    X2,
}

impl Start {
    pub fn labels(self) -> [usize; LENGTH] {
        match self {
            Start::X1 => [3, 1, 1, 1, 1, 1],
            Start::X2 => [1, 3, 1, 1, 1, 1],
        }
    }
}

fn idx(labels: &[usize]) -> usize {
    encode_index(N, LENGTH, labels).expect("labels within the six-site SO(3) chain")
}

/// `Ψₗ` with 1-based `l ∈ 1..=5`, as a full amplitude vector.
pub fn psi_pattern<T: Field>(a: &[T], l: usize) -> Vec<T> {
    let mut v = vec![T::zero(); N.pow(LENGTH as u32)];
    for m in 1..=N {
        let mut labels = [1; LENGTH];
        labels[l - 1] = m;
        labels[l] = N - m + 1;
        v[idx(&labels)] = a[m - 1].clone();
    }
    v
}

/// `(H′)^p|x⟩` for `p = 0..=order`, decomposed over [`PATTERNS`].
#[derive(Debug, Clone)]
pub struct PatternPowers<T> {
    pub start: Start,
    /// `coeffs[p][c]` is the coefficient of pattern `c` in `(H′)^p|x⟩`.
    pub coeffs: Vec<[T; 7]>,
    /// Raw amplitudes of `(H′)^p|x⟩` on the [`FAR_END`] states.
    pub far_end: Vec<[T; 3]>,
    /// `(H′)^p|x⟩` minus its pattern expansion.
    pub remainders: Vec<Vec<T>>,
}

/// Iterates `H′` matrix-free at `q = s²` and decomposes every power.
pub fn pattern_powers<T: Field>(s: &T, start: Start, order: usize) -> PatternPowers<T> {
    let a = psi_weights(Family::Orthogonal, N, s);
    let si = T::one() / s.clone();
    let mut cur = vec![T::zero(); N.pow(LENGTH as u32)];
    cur[idx(&start.labels())] = T::one();
    let psis: Vec<Vec<T>> = (1..LENGTH).map(|l| psi_pattern(&a, l)).collect();
    let x1 = idx(&Start::X1.labels());
    let x2 = idx(&Start::X2.labels());

    let mut out = PatternPowers { start, coeffs: Vec::new(), far_end: Vec::new(), remainders: Vec::new() };
    for p in 0..=order {
        if p > 0 {
            cur = apply_h_prime_generic(N, LENGTH, Boundary::Open, &a, &cur);
        }
        let c_psi: Vec<T> = (1..LENGTH)
            .map(|l| {
                let mut labels = [1; LENGTH];
                labels[l - 1] = 2;
                labels[l] = 2;
                cur[idx(&labels)].clone()
            })
            .collect();
        // Ψ₁ has weight s on |1̄1⟩ at sites (1,2) and s^{-1} on |11̄⟩;
        // Ψ₂ has weight s on |1̄1⟩ at sites (2,3).
        let c_x1 = cur[x1].clone() - s.clone() * c_psi[0].clone();
        let c_x2 = cur[x2].clone() - si.clone() * c_psi[0].clone() - s.clone() * c_psi[1].clone();

        let mut rem = cur.clone();
        rem[x1] = rem[x1].clone() - c_x1.clone();
        rem[x2] = rem[x2].clone() - c_x2.clone();
        for (c, v) in c_psi.iter().zip(&psis) {
            for (r, x) in rem.iter_mut().zip(v) {
                if !x.is_zero() {
                    *r = r.clone() - c.clone() * x.clone();
                }
            }
        }
        let row = [c_x1, c_x2, c_psi[0].clone(), c_psi[1].clone(), c_psi[2].clone(), c_psi[3].clone(), c_psi[4].clone()];
        out.coeffs.push(row);
        out.far_end.push(FAR_END.map(|l| cur[idx(&l)].clone()));
        out.remainders.push(rem);
    }
    out
}

/// Pattern coefficients in the normalisation of the published table:
/// `(H′)^p|x⟩₁ = s·Σₗ Pₗ Ψₗ` and
/// `(H′)^p|x⟩₂ = s^{−2}(H′)^p|x⟩₁ + s·Σₗ Rₗ Ψₗ`, for `p = 1..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTable<T> {
    pub from_x1: Vec<[T; 5]>,
    pub from_x2: Vec<[T; 5]>,
}

pub fn reduced_table<T: Field>(s: &T, order: usize) -> ReducedTable<T> {
    let p1 = pattern_powers(s, Start::X1, order);
    let p2 = pattern_powers(s, Start::X2, order);
    let si = T::one() / s.clone();
    let si2 = powi(s, -2);
    let mut t = ReducedTable { from_x1: Vec::new(), from_x2: Vec::new() };
    for p in 1..=order {
        let a: [T; 5] = std::array::from_fn(|l| p1.coeffs[p][l + 2].clone() * si.clone());
        let b: [T; 5] = std::array::from_fn(|l| (p2.coeffs[p][l + 2].clone() - si2.clone() * p1.coeffs[p][l + 2].clone()) * si.clone());
        t.from_x1.push(a);
        t.from_x2.push(b);
    }
    t
}

/// Polynomial-in-`t` coefficients keyed by label.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesTable {
    pub order: usize,
    pub entries: Vec<(String, Vec<Complex64>)>,
}

impl SeriesTable {
    pub fn get(&self, label: &str) -> Option<&[Complex64]> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, c)| c.as_slice())
    }

    /// Coefficient of `t^p` for a label, zero beyond the stored order.
    pub fn coefficient(&self, label: &str, p: usize) -> Option<Complex64> {
        self.get(label).map(|c| c.get(p).copied().unwrap_or(Complex64::new(0.0, 0.0)))
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|(label, cs)| {
                let terms: Vec<String> = cs.iter().map(|c| format!("[{},{}]", sig17(c.re), sig17(c.im))).collect();
                format!("\"{label}\":[{}]", terms.join(","))
            })
            .collect();
        format!("{{\"order\":{},\"coefficients\":{{{}}}}}", self.order, rows.join(","))
    }
}

/// Series of `e^{−iλtH′}|x⟩₁,₂` on the six-site chain.
#[derive(Debug, Clone, Serialize)]
pub struct SixChainSeries {
    pub q: f64,
    pub lambda: f64,
    pub order: usize,
    /// Pattern coefficients for the evolution of `|x⟩₁`.
    pub from_x1: SeriesTable,
    pub from_x2: SeriesTable,
    /// `x1, y1, z1, x2, y2, z2`: far-end amplitude series.
    pub far_end: SeriesTable,
}

/// `(−iλ)^p / p!`.
fn time_factor(lambda: f64, p: usize) -> Complex64 {
    let mut f = Complex64::new(1.0, 0.0);
    for j in 1..=p {
        f *= Complex64::new(0.0, -lambda) / j as f64;
    }
    f
}

pub fn sixchain_series(q: f64, lambda: f64, order: usize) -> SixChainSeries {
    let s = q.sqrt();
    let mut far = Vec::new();
    let mut tables = Vec::new();
    for start in [Start::X1, Start::X2] {
        let pw = pattern_powers(&s, start, order);
        let entries = PATTERNS
            .iter()
            .enumerate()
            .map(|(c, label)| (label.to_string(), (0..=order).map(|p| time_factor(lambda, p) * pw.coeffs[p][c]).collect()))
            .collect();
        tables.push(SeriesTable { order, entries });
        let tag = match start {
            Start::X1 => "1",
            Start::X2 => "2",
        };
        for (c, name) in ["x", "y", "z"].iter().enumerate() {
            far.push((format!("{name}{tag}"), (0..=order).map(|p| time_factor(lambda, p) * pw.far_end[p][c]).collect()));
        }
    }
    let from_x2 = tables.pop().expect("two tables");
    let from_x1 = tables.pop().expect("two tables");
    SixChainSeries { q, lambda, order, from_x1, from_x2, far_end: SeriesTable { order, entries: far } }
}

/// Largest remainder outside the pattern span over all powers `≤ order`.
pub fn closure_residual(q: f64, order: usize) -> f64 {
    let s = q.sqrt();
    [Start::X1, Start::X2]
        .iter()
        .flat_map(|&st| pattern_powers(&s, st, order).remainders)
        .flat_map(|r| r.into_iter())
        .fold(0.0, |m, x| m.max(x.abs()))
}
