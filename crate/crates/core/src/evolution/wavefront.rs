//! Spreading of `|Ψ⟩` states out of a domain wall `…111 1̄1̄1̄…`.
//!
//! At order `t¹` only the wall pair `(p, p+1)` is active. Each further order
//! moves every `Ψ` one pair left and one pair right, so behind the front a
//! position receives a forward- and a backward-moving contribution while the
//! front itself is reached once. Summed over orders `n ≤ r` this gives the
//! multiplicities `2(r − |d|) − 1` at distance `d` from the wall, e.g.
//! `(1, 3, 5, 3, 1)` at `r = 3`.

use serde::Serialize;

use crate::chain::{apply_h_prime_generic, ChainSpec};
use crate::error::{Error, Result};
use crate::projector::psi_weights;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Wavefront {
    /// Wall pair `p`; `counts[j]` belongs to pair `p − order + 1 + j`.
    pub wall: usize,
    pub first_position: i64,
    pub counts: Vec<usize>,
}

/// Schematic contribution counts per `Ψ` position up to `order`.
pub fn wavefront_multiplicities(p_site: usize, order: usize) -> Result<Wavefront> {
    if order == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    let width = 2 * order - 1;
    let mut counts = vec![0usize; width];
    let centre = order - 1;
    for n in 1..=order {
        let front = n - 1;
        for (j, slot) in counts.iter_mut().enumerate() {
            let d = j.abs_diff(centre);
            if d < front {
                *slot += 2;
            } else if d == front {
                *slot += 1;
            }
        }
    }
    Ok(Wavefront { wall: p_site, first_position: p_site as i64 - centre as i64, counts })
}

/// Measured reach on an actual chain: for each pair `l = 1..r−1`, the number
/// of orders `1 ≤ n ≤ order` at which `(H′)^n` of the domain wall at `p`
/// has a nonzero amplitude with `|22⟩` on `(l, l+1)`. Amplitudes below
/// `1e−14` relative to the largest one count as zero.
pub fn wavefront_reach(chain: &ChainSpec, p_site: usize, order: usize) -> Result<Vec<usize>> {
    let n = chain.n();
    let r = chain.length();
    if p_site == 0 || p_site >= r {
        return Err(Error::SiteOutOfRange { site: p_site, length: r });
    }
    if n % 2 == 0 {
        return Err(Error::UnsupportedSpec(format!("{} has no middle label for the |22⟩ marker", chain.spec())));
    }
    let mid = n / 2 + 1;
    let a = psi_weights(chain.spec().family(), n, &chain.spec().q().sqrt());
    let labels: Vec<usize> = (0..r).map(|s| if s < p_site { 1 } else { n }).collect();
    let mut cur = vec![0.0; chain.dim()];
    cur[chain.encode_index(&labels)?] = 1.0;
    let mut counts = vec![0usize; r - 1];
    for _ in 1..=order {
        cur = apply_h_prime_generic(n, r, chain.boundary(), &a, &cur);
        let top = cur.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let mut hit = vec![false; r - 1];
        for (idx, v) in cur.iter().enumerate() {
            if v.abs() <= 1e-14 * top {
                continue;
            }
            let lab = chain.decode_index(idx)?;
            for l in 0..r - 1 {
                if lab[l] == mid && lab[l + 1] == mid {
                    hit[l] = true;
                }
            }
        }
        for (c, h) in counts.iter_mut().zip(hit) {
            *c += h as usize;
        }
    }
    Ok(counts)
}
