//! Bilinear pseudodifferential operators on a periodic lattice.
//!
//! The crate discretizes operators of the form
//! `T(f,g)(x) = ∫∫ σ(x,ξ,η) f̂(ξ) ĝ(η) e^{ix·(ξ+η)} dξ dη` on the torus `[0,L)ⁿ`
//! (`n = 1, 2`), applies them through a direct oracle or FFT fast paths,
//! computes their kernels, and measures the quantitative statements that
//! the bilinear Hörmander classes are known to satisfy.
//!
//! Module map:
//! - [`grid`]: lattice, spectral transform, norms, `.bfld` files.
//! - [`symbol`]: symbols, seminorms, dilation, mollification, catalogue.
//! - [`operator`]: application routes, kernels, Bessel potentials, constants.
//! - [`decompose`]: partitions of unity, frequency splits, bumps, commutator.
//! - [`scatter`]: closed-form evolution of a bilinearly forced system.
//! - [`probes`]: pass/fail experiments built on the above.
//! - [`cli`]: configuration and batch runner behind the `bilsym` binary.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decompose;
pub mod error;
pub mod grid;
pub mod operator;
pub mod probes;
pub mod scatter;
pub mod symbol;
pub mod tolerances;

pub use error::{Error, Result};
pub use num_complex::Complex64;
