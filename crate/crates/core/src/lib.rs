//! Products of parabolic cylinder functions with unrelated arguments.
//!
//! The central identity evaluated here is
//!
//! ```text
//! D_{−ν}(x)·D_{−ν}(−y) = e^{−(x²+y²)/4}/(2Γ(ν)) ∫_0^∞ t^{ν/2−1}(t+1)^{−(ν+1)/2}
//!                         · exp(−(x²+y²)t/2 + xy√(t(t+1))) dt,   x > y > 0, ν > 0,
//! ```
//!
//! together with the Laplace-transform forms, the bilinear Hermite (Mehler)
//! series, the oscillator Green function and the hyperbolic integrals that
//! follow from it. Every quantity has at least two independent evaluation
//! routes, and [`verify`] compares them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod glasser;
pub mod green;
pub mod hyperbolic;
pub mod mehler;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use quadrature::{IntegrandSpec, QuadratureResult};
pub use specfun::SeriesResult;
