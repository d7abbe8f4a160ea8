//! Temperley-Lieb projectors, braid matrices and spin chains for the
//! q-deformed SÔ(N) / Sp̂(N) families.
//!
//! The crate is organised bottom-up:
//!
//! - [`qnum`]: q-brackets, the loop constant `k`, rapidity parameters and the
//!   coefficient `ω(θ)`, ρ-tuples and ε-signs.
//! - [`projector`]: the rank-one projector `P₀`, its rescaling `P₀′ = k·P₀`
//!   and the entangled two-site eigenstate `|Ψ⟩`.
//! - [`braid`]: `R̂(θ) = I⊗I + ω(θ)P₀`, braid-equation residuals and the
//!   unitary braid at imaginary rapidity.
//! - [`chain`]: matrix-free Temperley-Lieb generators and chain Hamiltonians
//!   acting on the `N^r` product space.
//! - [`evolution`]: truncated-series and exact propagators, closed-form
//!   iteration laws, the six-site golden table and the transmission decode.
//! - [`entropy`]: entanglement entropy of the normalized `|Ψ⟩`.
//!
//! Everything that must be checked bit-exactly (golden tables) is written
//! against the [`scalar::Field`] trait so it can run on [`num::BigRational`]
//! as well as on floats.

#![forbid(unsafe_code)]

pub mod braid;
pub mod chain;
pub mod entropy;
pub mod error;
pub mod evolution;
pub mod format;
pub mod projector;
pub mod qnum;
pub mod scalar;

pub use error::{Error, Result};
pub use num::complex::Complex64;
pub use qnum::{AlgebraSpec, Family, RapidityParams, Sign};
