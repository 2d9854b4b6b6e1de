//! Numerical core for μ-deformed Segal-Bargmann analysis on the real line.
//!
//! The crate is `no_std` and needs only `alloc`. It covers:
//!
//! - [`special`]: the μ-deformed factorial and exponential, Euler Γ and the
//!   Macdonald function `K_ν`;
//! - [`polygauss`]: exact algebra of `p(q)·e^{-b q²}` under the Dunkl operator,
//!   parity, position/momentum, ladder operators and μ-translation;
//! - [`quadrature`]: double-exponential rules for `∫ |q|^{2μ} g(q) dq` and for
//!   radial planar integrals;
//! - [`heat`]: the μ-deformed heat kernel, its semigroup and μ-convolution;
//! - [`spaces`]: planar densities, the `B²_{μ,t}` and `C²_{μ,t}` inner products,
//!   the ground-state measure and the change of measure;
//! - [`transforms`]: the four integral transforms (versions A–D) and the checks
//!   tying them together.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod dd;
pub mod error;
pub mod heat;
pub mod polygauss;
pub mod quadrature;
pub mod report;
pub mod spaces;
pub mod special;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use polygauss::PolyGauss;
pub use quadrature::Estimate;
pub use report::VerificationReport;
pub use special::MuParam;
