//! Scalar special functions: Gamma, erfc, Hermite polynomials, `K_{1/4}` and
//! the parabolic cylinder function `D_ν` for the orders this crate needs.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_finite, integrate_semi_infinite, IntegrandSpec};

/// Internal tolerance for quadrature-backed special functions.
const SPECFUN_TOL: f64 = 1e-13;

/// Supported range of the parabolic cylinder order.
pub const MAX_ABS_ORDER: f64 = 20.0;

/// Truncated-sum result carrying the number of terms and a bound on the
/// neglected remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite(n: u32, x: f64) -> Result<f64> {
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::Overflow { func: "hermite" });
        }
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(Error::Overflow { func: "hermite" })
    }
}

/// Iterator over `h_n(x) = H_n(x)/√(2^n n!)`, n = 0, 1, 2, …
///
/// Uses `h_{n+1} = √(2/(n+1))·x·h_n − √(n/(n+1))·h_{n−1}`, which stays in
/// floating range where `H_n` itself overflows. `|h_n(x)| ≤ K·e^{x²/2}` with
/// `K` = [`CRAMER_BOUND`].
#[derive(Debug, Clone)]
pub struct ScaledHermite {
    x: f64,
    n: u32,
    prev: f64,
    cur: f64,
}

/// Constant in Cramér's inequality `|H_n(x)| ≤ K·√(2^n n!)·e^{x²/2}`.
pub const CRAMER_BOUND: f64 = 1.086435;

impl ScaledHermite {
    pub fn new(x: f64) -> Self {
        Self {
            x,
            n: 0,
            prev: 0.0,
            cur: 1.0,
        }
    }
}

impl Iterator for ScaledHermite {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let n = self.n as f64;
        let next =
            (2.0 / (n + 1.0)).sqrt() * self.x * self.cur - (n / (n + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        Some(out)
    }
}

/// `Γ(ν)` for `ν > 0`.
pub fn gamma(nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(domain(
            "gamma",
            format!("argument must be positive, got {nu}"),
        ));
    }
    Ok(libm::tgamma(nu))
}

/// `ln Γ(ν)` for `ν > 0`.
pub fn ln_gamma(nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(domain(
            "ln_gamma",
            format!("argument must be positive, got {nu}"),
        ));
    }
    Ok(libm::lgamma(nu))
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function `e^{x²}·erfc(x)`.
///
/// `x²` is split into a rounded part and its exact fma residual so the
/// exponential does not amplify the rounding of `x²` for large `x`.
pub fn erfcx(x: f64) -> f64 {
    let hi = x * x;
    let lo = x.mul_add(x, -hi);
    hi.exp() * lo.exp() * erfc(x)
}

/// `K_ν(z) = ∫_0^∞ e^{−z cosh t} cosh(νt) dt`, integrated after factoring out
/// `e^{−z}` and truncating where `z(cosh t − 1) − |ν|t` exceeds the tolerance budget.
fn bessel_k_integral(order: f64, z: f64) -> Result<f64> {
    let budget = (1.0 / SPECFUN_TOL).ln() + 40.0;
    let nu = order.abs();
    let mut t_max = 1.0f64;
    for _ in 0..100 {
        let next = (1.0 + (budget + nu * t_max) / z).acosh();
        if (next - t_max).abs() < 1e-12 {
            t_max = next;
            break;
        }
        t_max = next;
    }
    let r = integrate_finite(
        |t| {
            // cosh t − 1 = 2 sinh²(t/2)
            let s = (0.5 * t).sinh();
            (-2.0 * z * s * s).exp() * (nu * t).cosh()
        },
        0.0,
        t_max,
        SPECFUN_TOL,
    )?;
    Ok(r.value * (-z).exp())
}

/// Modified Bessel function `K_{1/4}(z)` for `z > 0`.
pub fn bessel_k_quarter(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain(
            "bessel_k_quarter",
            format!("argument must be positive, got {z}"),
        ));
    }
    bessel_k_integral(0.25, z)
}

/// Parabolic cylinder function `D_order(z)`.
///
/// Nonnegative integer orders use `D_n(z) = 2^{−n/2} e^{−z²/4} H_n(z/√2)`;
/// negative orders `−ν` use
/// `D_{−ν}(z) = e^{−z²/4}/Γ(ν) ∫_0^∞ t^{ν−1} e^{−zt − t²/2} dt`.
/// Positive non-integer orders are not supported.
pub fn pcf_d(order: f64, z: f64) -> Result<f64> {
    if !order.is_finite() || order.abs() > MAX_ABS_ORDER {
        return Err(domain(
            "pcf_d",
            format!("order {order} outside [-{MAX_ABS_ORDER}, {MAX_ABS_ORDER}]"),
        ));
    }
    if !z.is_finite() {
        return Err(domain("pcf_d", format!("argument must be finite, got {z}")));
    }
    if order >= 0.0 {
        if order.fract() != 0.0 {
            return Err(domain(
                "pcf_d",
                format!("positive non-integer order {order} is not supported"),
            ));
        }
        let n = order as u32;
        let h = hermite(n, z * FRAC_1_SQRT_2)?;
        return Ok(2f64.powf(-0.5 * order) * (-0.25 * z * z).exp() * h);
    }
    let nu = -order;
    let spec = IntegrandSpec::new(nu - 1.0, z.max(0.0) + 1.0)?;
    let r = integrate_semi_infinite(
        |t| ((nu - 1.0) * t.ln() - z * t - 0.5 * t * t).exp(),
        spec,
        SPECFUN_TOL,
    )?;
    Ok((-0.25 * z * z).exp() / gamma(nu)? * r.value)
}

/// `D_{−1}(z) = √(π/2)·e^{z²/4}·erfc(z/√2)`.
pub fn pcf_d_minus_one(z: f64) -> f64 {
    // e^{z²/4} erfc(z/√2) = erfcx(z/√2) e^{−z²/4}
    let w = z * FRAC_1_SQRT_2;
    (0.5 * PI).sqrt() * erfcx(w) * (-0.25 * z * z).exp()
}

/// `D_{−1/2}(z) = √(z/(2π))·K_{1/4}(z²/4)` for `z > 0`.
pub fn pcf_d_minus_half(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(domain(
            "pcf_d_minus_half",
            format!("argument must be positive, got {z}"),
        ));
    }
    Ok((z / (2.0 * PI)).sqrt() * bessel_k_quarter(0.25 * z * z)?)
}
