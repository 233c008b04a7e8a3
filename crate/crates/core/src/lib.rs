//! Numerics for the quasi-periodic Schrödinger operator
//! `(Hu)_n = −u_{n+1} − u_{n−1} + V(θ + nω) u_n` with potential
//! `V(θ) = e^{K f(θ+ω)} + e^{−K f(θ)}`: Fourier series on a strip,
//! continued-fraction arithmetic, the transfer-matrix cocycle, finite-volume
//! spectra, an explicit reducibility chain at `E = 0`, and Gordon-type probes
//! at Liouville frequencies.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arithmetic;
pub mod cocycle;
pub mod error;
pub mod fourier;
pub mod gordon;
pub mod model;
pub mod reducibility;
pub mod sl2;
pub mod spectrum;

/// Crate version, embedded in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use arithmetic::{Convergent, Frequency};
pub use error::{Error, Result};
pub use fourier::FourierSeries;
pub use model::ModelParams;
pub use sl2::{Mat2, SL2Matrix, ScaledProduct};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/fourier.md")]
    mod fourier {}
    #[doc = include_str!("../../../book/src/frequencies.md")]
    mod frequencies {}
    #[doc = include_str!("../../../book/src/cocycle.md")]
    mod cocycle {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/reducibility.md")]
    mod reducibility {}
    #[doc = include_str!("../../../book/src/gordon.md")]
    mod gordon {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
