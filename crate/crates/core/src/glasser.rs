//! The product `D_{−ν}(x)·D_{−ν}(−y)` through its Laplace-type integral
//! representation, and the two Laplace-transform forms
//!
//! ```text
//! ∫_0^∞ t^{ν/2−1}(1+t)^{−(ν+1)/2} e^{−at} e^{±b√(t(t+1))} dt
//!     = 2e^{a/2}Γ(ν)·D_{−ν}(√(a+√(a²−b²)))·D_{−ν}(∓√(a−√(a²−b²)))
//! ```
//!
//! `a = (x²+y²)/2`, `b = xy` maps one parameterization onto the other.

use crate::error::{domain, Result};
use crate::quadrature::{integrate_semi_infinite, IntegrandSpec, QuadratureResult};
use crate::specfun::{gamma, pcf_d};

/// Default quadrature tolerance for the representation.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Addresses the product `D_{−ν}(x)·D_{−ν}(−y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductQuery {
    pub nu: f64,
    pub x: f64,
    pub y: f64,
}

impl ProductQuery {
    pub fn new(nu: f64, x: f64, y: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(domain(
                "ProductQuery",
                format!("order ν must be positive, got {nu}"),
            ));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(domain("ProductQuery", "arguments must be finite"));
        }
        Ok(Self { nu, x, y })
    }

    fn require_ordered(&self, func: &'static str) -> Result<()> {
        if self.y > 0.0 && self.x > self.y {
            Ok(())
        } else {
            Err(domain(
                func,
                format!(
                    "representation needs x > y > 0, got x={}, y={}",
                    self.x, self.y
                ),
            ))
        }
    }
}

/// The `(ν, a, b)` parameters of the Laplace-transform forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceParams {
    pub nu: f64,
    pub a: f64,
    pub b: f64,
}

impl LaplaceParams {
    pub fn new(nu: f64, a: f64, b: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(domain(
                "LaplaceParams",
                format!("order ν must be positive, got {nu}"),
            ));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(domain("LaplaceParams", "a and b must be finite"));
        }
        Ok(Self { nu, a, b })
    }

    /// `√(a²−b²)`, factored to keep precision when `a ≈ |b|`.
    fn root(&self) -> Result<f64> {
        let d = (self.a - self.b.abs()) * (self.a + self.b.abs());
        if self.a < self.b.abs() || d < 0.0 {
            return Err(domain(
                "LaplaceParams",
                format!(
                    "a={} < |b|={} gives complex arguments",
                    self.a,
                    self.b.abs()
                ),
            ));
        }
        Ok(d.sqrt())
    }

    /// `(X, Y) = (√(a+√(a²−b²))/√2, √(a−√(a²−b²))/√2)`, so that `X²+Y² = a`
    /// and `2XY = |b|`.
    pub fn mehler_arguments(&self) -> Result<(f64, f64)> {
        let q = xy_from_params(self)?;
        Ok((
            q.x * std::f64::consts::FRAC_1_SQRT_2,
            q.y * std::f64::consts::FRAC_1_SQRT_2,
        ))
    }
}

/// Which of the two exponentials `e^{±b√(t(t+1))}` the transform carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceSign {
    /// `e^{+b√(t(t+1))}`, paired with `D_{−ν}(x)D_{−ν}(−y)`.
    Plus,
    /// `e^{−b√(t(t+1))}`, paired with `D_{−ν}(x)D_{−ν}(y)`.
    Minus,
}

impl LaplaceSign {
    pub fn factor(self) -> f64 {
        match self {
            LaplaceSign::Plus => 1.0,
            LaplaceSign::Minus => -1.0,
        }
    }
}

/// `(a, b) = ((x²+y²)/2, xy)` for `x > y > 0`.
pub fn params_from_xy(q: &ProductQuery) -> Result<LaplaceParams> {
    q.require_ordered("params_from_xy")?;
    LaplaceParams::new(q.nu, 0.5 * (q.x * q.x + q.y * q.y), q.x * q.y)
}

/// Inverse of [`params_from_xy`]: `x = √(a+√(a²−b²))`, `y = √(a−√(a²−b²))`.
///
/// Accepts `b = 0`, where `x = √(2a)` and `y = 0`.
pub fn xy_from_params(p: &LaplaceParams) -> Result<ProductQuery> {
    if p.b < 0.0 {
        return Err(domain(
            "xy_from_params",
            format!("b must be nonnegative, got {}", p.b),
        ));
    }
    let root = p.root()?;
    let big = p.a + root;
    // a − √(a²−b²) = b²/(a + √(a²−b²)) avoids cancellation for small b.
    let small = if big > 0.0 { p.b * p.b / big } else { 0.0 };
    ProductQuery::new(p.nu, big.sqrt(), small.sqrt())
}

/// `D_{−ν}(x)·D_{−ν}(−y)` from two independent evaluations of `D`.
pub fn product_reference(q: &ProductQuery) -> Result<f64> {
    Ok(pcf_d(-q.nu, q.x)? * pcf_d(-q.nu, -q.y)?)
}

/// `t^{ν/2−1}(1+t)^{−(ν+1)/2}·exp(−at + β√(t(t+1)))` with the exponent
/// rewritten as `−(a−β)t + β(√(t(t+1)) − t)` so the large-`t` cancellation
/// is done analytically.
fn laplace_integrand(nu: f64, a: f64, beta: f64, t: f64) -> f64 {
    let excess = t / ((t * (t + 1.0)).sqrt() + t);
    let log =
        (0.5 * nu - 1.0) * t.ln() - 0.5 * (nu + 1.0) * t.ln_1p() - (a - beta) * t + beta * excess;
    log.exp()
}

fn laplace_spec(nu: f64, decay: f64) -> Result<IntegrandSpec> {
    if decay > 0.0 {
        IntegrandSpec::new(0.5 * nu - 1.0, decay)
    } else {
        // Equal exponents: the tail is t^{ν/2−1}·t^{−(ν+1)/2} = t^{−3/2}.
        IntegrandSpec::algebraic(0.5 * nu - 1.0, -1.5)
    }
}

fn integrate_laplace(nu: f64, a: f64, beta: f64, tol: f64) -> Result<QuadratureResult> {
    let spec = laplace_spec(nu, a - beta)?;
    integrate_semi_infinite(|t| laplace_integrand(nu, a, beta, t), spec, tol)
}

/// The Laplace-transform integral with `e^{±b√(t(t+1))}` by quadrature.
///
/// `Plus` needs `a > b > 0`, `Minus` needs `a + b > 0`.
pub fn laplace_integral(
    p: &LaplaceParams,
    sign: LaplaceSign,
    tol: f64,
) -> Result<QuadratureResult> {
    match sign {
        LaplaceSign::Plus if !(p.a > p.b && p.b > 0.0) => {
            return Err(domain(
                "laplace_integral",
                format!(
                    "e^(+b√(t(t+1))) form needs a > b > 0, got a={}, b={}",
                    p.a, p.b
                ),
            ))
        }
        LaplaceSign::Minus if !(p.a + p.b > 0.0) => {
            return Err(domain(
                "laplace_integral",
                format!(
                    "e^(−b√(t(t+1))) form needs a + b > 0, got a={}, b={}",
                    p.a, p.b
                ),
            ))
        }
        _ => {}
    }
    integrate_laplace(p.nu, p.a, sign.factor() * p.b, tol)
}

/// Closed form of [`laplace_integral`]: `2e^{a/2}Γ(ν)·D_{−ν}(x)·D_{−ν}(∓y)`
/// with `(x, y)` from [`xy_from_params`] applied to `|b|`.
///
/// The sign of the second argument follows the sign of the exponent
/// `±b√(t(t+1))`: a growing exponential pairs with `−y`.
pub fn laplace_closed(p: &LaplaceParams, sign: LaplaceSign) -> Result<f64> {
    let beta = sign.factor() * p.b;
    let q = xy_from_params(&LaplaceParams::new(p.nu, p.a, beta.abs())?)?;
    let second = if beta > 0.0 { -q.y } else { q.y };
    Ok(2.0 * (0.5 * p.a).exp() * gamma(p.nu)? * pcf_d(-p.nu, q.x)? * pcf_d(-p.nu, second)?)
}

fn scale_result(r: QuadratureResult, factor: f64) -> QuadratureResult {
    QuadratureResult {
        value: factor * r.value,
        error_estimate: factor.abs() * r.error_estimate,
        evaluations: r.evaluations,
    }
}

/// `D_{−ν}(x)·D_{−ν}(−y)` through the integral representation, `x > y > 0`.
pub fn product_via_integral(q: &ProductQuery, tol: f64) -> Result<QuadratureResult> {
    q.require_ordered("product_via_integral")?;
    product_integral_unchecked(q, tol)
}

/// Like [`product_via_integral`] but also admits `x = y > 0`, where the
/// integrand tail is algebraic (`~t^{−3/2}`) instead of exponential.
pub fn product_via_integral_exploratory(q: &ProductQuery, tol: f64) -> Result<QuadratureResult> {
    if !(q.y > 0.0 && q.x >= q.y) {
        return Err(domain(
            "product_via_integral_exploratory",
            format!("needs x ≥ y > 0, got x={}, y={}", q.x, q.y),
        ));
    }
    product_integral_unchecked(q, tol)
}

fn product_integral_unchecked(q: &ProductQuery, tol: f64) -> Result<QuadratureResult> {
    let a = 0.5 * (q.x * q.x + q.y * q.y);
    let b = q.x * q.y;
    let r = integrate_laplace(q.nu, a, b, tol)?;
    let prefactor = (-0.5 * a).exp() / (2.0 * gamma(q.nu)?);
    Ok(scale_result(r, prefactor))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn params_from_xy_example() {
        let p = params_from_xy(&ProductQuery::new(1.0, 2.0, 1.0).unwrap()).unwrap();
        assert_eq!((p.a, p.b), (2.5, 2.0));
    }

    #[test]
    fn xy_from_params_examples() {
        let q = xy_from_params(&LaplaceParams::new(1.0, 2.5, 2.0).unwrap()).unwrap();
        assert!((q.x - 2.0).abs() < 1e-15 && (q.y - 1.0).abs() < 1e-15);
        let q = xy_from_params(&LaplaceParams::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!((q.x, q.y), (1.0, 1.0));
        let q = xy_from_params(&LaplaceParams::new(1.0, 3.0, 0.0).unwrap()).unwrap();
        assert_eq!((q.x, q.y), (6f64.sqrt(), 0.0));
    }

    #[test]
    fn half_angle_parameterization() {
        let (alpha, phi) = (0.7f64, 1.3f64);
        let p = LaplaceParams::new(1.0, alpha * alpha * phi.cosh(), alpha * alpha * phi.sinh())
            .unwrap();
        let q = xy_from_params(&p).unwrap();
        let s2 = std::f64::consts::SQRT_2;
        assert!(rel(q.x, alpha * s2 * (0.5 * phi).cosh()) < 1e-14);
        assert!(rel(q.y, alpha * s2 * (0.5 * phi).sinh()) < 1e-14);
    }

    #[test]
    fn gap_closes_quadratically() {
        let x = 2.0;
        for &eps in &[1e-1, 1e-2, 1e-3] {
            let p = params_from_xy(&ProductQuery::new(1.0, x, x - eps).unwrap()).unwrap();
            assert!(rel(p.a - p.b, 0.5 * eps * eps) < 1e-9);
        }
    }

    #[test]
    fn domain_checks() {
        assert!(ProductQuery::new(0.0, 2.0, 1.0).is_err());
        let q = ProductQuery::new(1.0, 1.0, 2.0).unwrap();
        assert!(params_from_xy(&q).is_err());
        assert!(product_via_integral(&q, 1e-10).is_err());
        let q = ProductQuery::new(1.0, 2.0, 0.0).unwrap();
        assert!(product_via_integral(&q, 1e-10).is_err());
        assert!(xy_from_params(&LaplaceParams::new(1.0, 1.0, 2.0).unwrap()).is_err());
        let p = LaplaceParams::new(1.0, 1.0, 2.0).unwrap();
        assert!(laplace_integral(&p, LaplaceSign::Plus, 1e-10).is_err());
        let p = LaplaceParams::new(1.0, 1.0, -2.0).unwrap();
        assert!(laplace_integral(&p, LaplaceSign::Minus, 1e-10).is_err());
    }

    #[test]
    fn product_at_origin_is_a_square() {
        let q = ProductQuery::new(1.7, 0.0, 0.0).unwrap();
        let d0 = pcf_d(-1.7, 0.0).unwrap();
        assert!(rel(product_reference(&q).unwrap(), d0 * d0) < 1e-15);
        assert!(d0 > 0.0);
    }
}
