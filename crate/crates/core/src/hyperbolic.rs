//! Hyperbolic integrals that follow from the `e^{−b√(t(t+1))}` Laplace form at
//! `ν = 1` (via `t = sinh²θ`) and at `ν = 1/2`.
//!
//! Left sides are θ-quadratures only; right sides use erfc or `K_{1/4}` only.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::quadrature::{integrate_finite, QuadratureResult};
use crate::specfun::{bessel_k_quarter, erfcx};
use crate::verify::{IdentityId, VerificationRecord};

/// Exponent at which `e^{−x}` underflows in double precision.
const UNDERFLOW_EXPONENT: f64 = 745.0;
/// Smallest shift accepted by the `K_{1/4}` identity.
pub const MIN_PHI_K: f64 = 0.05;
/// Acceptance floors for the relative discrepancy.
pub const ERFC_TOL_FLOOR: f64 = 1e-8;
pub const K_TOL_FLOOR: f64 = 1e-7;

/// `α` (erfc identities), `a` (`K_{1/4}` identity) and the shift `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicQuery {
    pub alpha: f64,
    pub a: f64,
    pub phi: f64,
}

impl HyperbolicQuery {
    pub fn new(alpha: f64, a: f64, phi: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("a", a), ("phi", phi)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(
                    "HyperbolicQuery",
                    format!("{name} must be positive, got {v}"),
                ));
            }
        }
        Ok(Self { alpha, a, phi })
    }

    /// Query for the erfc identities; `a` is unused there.
    pub fn erfc(alpha: f64, phi: f64) -> Result<Self> {
        Self::new(alpha, 1.0, phi)
    }

    /// Query for the `K_{1/4}` identity; `α` is unused there.
    pub fn bessel(a: f64, phi: f64) -> Result<Self> {
        Self::new(1.0, a, phi)
    }
}

/// Smallest θ with `g(θ) ≥ target` for increasing `g`, by bisection.
fn solve_increasing(g: impl Fn(f64) -> f64, target: f64) -> f64 {
    let mut hi = 1.0;
    while g(hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}

fn erfc_cutoff(alpha: f64, phi: f64) -> f64 {
    let a2 = alpha * alpha;
    solve_increasing(|th| a2 * th.sinh() * (th + phi).sinh(), UNDERFLOW_EXPONENT)
}

/// `∫_0^∞ sech θ · e^{−α² sinh θ sinh(θ+φ)} dθ`.
pub fn lhs_13a(alpha: f64, phi: f64, tol: f64) -> Result<QuadratureResult> {
    let q = HyperbolicQuery::erfc(alpha, phi)?;
    let a2 = q.alpha * q.alpha;
    integrate_finite(
        |th| (-a2 * th.sinh() * (th + phi).sinh()).exp() / th.cosh(),
        0.0,
        erfc_cutoff(q.alpha, q.phi),
        tol,
    )
}

/// `(π/2) e^{α² cosh φ} erfc(α sinh(φ/2)) erfc(α cosh(φ/2))`, evaluated as
/// `(π/2)·erfcx(α sinh(φ/2))·erfcx(α cosh(φ/2))` since `cosh φ = cosh²(φ/2) + sinh²(φ/2)`.
pub fn rhs_13a(alpha: f64, phi: f64) -> Result<f64> {
    let q = HyperbolicQuery::erfc(alpha, phi)?;
    let (c, s) = ((0.5 * q.phi).cosh(), (0.5 * q.phi).sinh());
    Ok(0.5 * PI * erfcx(q.alpha * s) * erfcx(q.alpha * c))
}

/// `∫_0^∞ sinh θ · e^{−α² sinh θ sinh(θ+φ)} dθ`.
pub fn lhs_13b(alpha: f64, phi: f64, tol: f64) -> Result<QuadratureResult> {
    let q = HyperbolicQuery::erfc(alpha, phi)?;
    let a2 = q.alpha * q.alpha;
    integrate_finite(
        |th| th.sinh() * (-a2 * th.sinh() * (th + phi).sinh()).exp(),
        0.0,
        erfc_cutoff(q.alpha, q.phi),
        tol,
    )
}

/// `(√π/(2α))·[e^{α²c²}·c·erfc(αc) − e^{α²s²}·s·erfc(αs)]` with
/// `c = cosh(φ/2)`, `s = sinh(φ/2)`.
pub fn rhs_13b(alpha: f64, phi: f64) -> Result<f64> {
    let q = HyperbolicQuery::erfc(alpha, phi)?;
    let (c, s) = ((0.5 * q.phi).cosh(), (0.5 * q.phi).sinh());
    Ok(PI.sqrt() / (2.0 * q.alpha) * (c * erfcx(q.alpha * c) - s * erfcx(q.alpha * s)))
}

/// `∫_0^∞ (sinh θ)^{−1/2} e^{−a cosh(θ+φ)} dθ`.
///
/// The factor `e^{−a cosh φ}` is pulled out and `cosh(θ+φ) − cosh φ` is
/// written as `2 sinh(φ + θ/2) sinh(θ/2)`. The singular piece `[0, 1]` and
/// the smooth piece `[1, θ*]` are integrated separately.
pub fn lhs_14(a: f64, phi: f64, tol: f64) -> Result<QuadratureResult> {
    let q = HyperbolicQuery::bessel(a, phi)?;
    let rise = move |th: f64| 2.0 * q.a * (q.phi + 0.5 * th).sinh() * (0.5 * th).sinh();
    let f = move |th: f64| (-rise(th)).exp() / th.sinh().sqrt();
    let cutoff = solve_increasing(rise, UNDERFLOW_EXPONENT);
    let split = cutoff.min(2.0) * 0.5;
    let near = integrate_finite(f, 0.0, split, tol)?;
    let far = integrate_finite(f, split, cutoff, tol)?;
    let scale = (-q.a * q.phi.cosh()).exp();
    Ok(QuadratureResult {
        value: scale * (near.value + far.value),
        error_estimate: scale * (near.error_estimate + far.error_estimate),
        evaluations: near.evaluations + far.evaluations,
    })
}

/// `√(a sinh φ/π) · K_{1/4}(a cosh²(φ/2)) · K_{1/4}(a sinh²(φ/2))`.
pub fn rhs_14(a: f64, phi: f64) -> Result<f64> {
    let q = HyperbolicQuery::bessel(a, phi)?;
    if q.phi < MIN_PHI_K {
        return Err(domain(
            "rhs_14",
            format!("φ = {} below the small-shift guard {MIN_PHI_K}", q.phi),
        ));
    }
    let (c, s) = ((0.5 * q.phi).cosh(), (0.5 * q.phi).sinh());
    Ok((q.a * q.phi.sinh() / PI).sqrt()
        * bessel_k_quarter(q.a * c * c)?
        * bessel_k_quarter(q.a * s * s)?)
}

fn record(
    id: IdentityId,
    params: Vec<(&'static str, f64)>,
    lhs: QuadratureResult,
    rhs: f64,
    tol: f64,
) -> VerificationRecord {
    VerificationRecord::compare(id, params, lhs.value, rhs, tol, lhs.evaluations)
}

pub fn erfc_identity_13a(q: &HyperbolicQuery, tol: f64) -> Result<VerificationRecord> {
    let lhs = lhs_13a(q.alpha, q.phi, tol)?;
    let rhs = rhs_13a(q.alpha, q.phi)?;
    let params = vec![("alpha", q.alpha), ("phi", q.phi)];
    Ok(record(
        IdentityId::Eq13a,
        params,
        lhs,
        rhs,
        tol.max(ERFC_TOL_FLOOR),
    ))
}

pub fn erfc_identity_13b(q: &HyperbolicQuery, tol: f64) -> Result<VerificationRecord> {
    let lhs = lhs_13b(q.alpha, q.phi, tol)?;
    let rhs = rhs_13b(q.alpha, q.phi)?;
    let params = vec![("alpha", q.alpha), ("phi", q.phi)];
    Ok(record(
        IdentityId::Eq13b,
        params,
        lhs,
        rhs,
        tol.max(ERFC_TOL_FLOOR),
    ))
}

pub fn k_identity_14(q: &HyperbolicQuery, tol: f64) -> Result<VerificationRecord> {
    let rhs = rhs_14(q.a, q.phi)?;
    let lhs = lhs_14(q.a, q.phi, tol)?;
    let params = vec![("a", q.a), ("phi", q.phi)];
    Ok(record(
        IdentityId::Eq14,
        params,
        lhs,
        rhs,
        tol.max(K_TOL_FLOOR),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(HyperbolicQuery::new(0.0, 1.0, 1.0).is_err());
        assert!(HyperbolicQuery::new(1.0, -1.0, 1.0).is_err());
        assert!(HyperbolicQuery::new(1.0, 1.0, 0.0).is_err());
        assert!(rhs_14(1.0, 0.01).is_err());
    }

    #[test]
    fn cutoff_reaches_underflow() {
        let th = erfc_cutoff(1.0, 1.0);
        let v = th.sinh() * (th + 1.0).sinh();
        assert!((v - UNDERFLOW_EXPONENT).abs() < 1e-6 * UNDERFLOW_EXPONENT);
    }
}
