//! Cyclic solid-on-solid (CSOS) models descending from the chiral Potts model.
//!
//! Modules, bottom-up:
//! - [`qarith`]: root-of-unity scalars, q-integers, Pochhammer symbols, Φ, ₂Φ₁
//! - [`curveweights`]: chiral Potts curve points, W/W̄, star squares and block factors
//! - [`csosweights`]: face weights U^{(2,2)}, U^{(2,j)}, U^{(ℓ,j)} and face Yang–Baxter
//! - [`transfer`]: edge basis, monodromy, coefficient extraction, fused and chiral Potts transfer matrices
//! - [`algebra`]: quadratic exchange relations, U_q generators, divided powers, Serre identities
//! - [`spectrum`]: clustering, TQ extraction, Bethe vectors, T-system, Drinfeld polynomials

pub mod algebra;
pub mod check;
pub mod csosweights;
pub mod curveweights;
pub mod error;
pub mod linalg;
pub mod qarith;
pub mod spectrum;
pub mod transfer;

pub use error::{CsosError, Result};
pub use num_complex::Complex64 as C64;
