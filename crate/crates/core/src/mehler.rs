//! Mehler's bilinear generating function and the Hermite series built on it.
//!
//! ```text
//! exp[(2XYu − (X²+Y²)u²)/(1−u²)] = √(1−u²) Σ_n h_n(X) h_n(Y) uⁿ,   h_n = H_n/√(2ⁿn!)
//! ```
//!
//! Integrating against powers of `u` gives series of the form
//! `S(c) = Σ_n h_n(X)h_n(Y)/(n + c)`. Their terms only decay like `n^{−3/2}`
//! and the partial sums oscillate with an `O(1/N)` error, so [`bilinear_sum`]
//! evaluates them as Abel limits: with `A(u) = Σ h_n(X)h_n(Y)uⁿ/(n+c)`,
//!
//! ```text
//! S(c) − u^c A(u) = ∫_u^1 v^{c−1} M(v) dv,   M(v) = Σ h_n(X)h_n(Y)vⁿ,
//! ```
//!
//! and `M(v)` vanishes like `exp(−(X−Y)²/(2(1−v)))` as `v → 1` for `X ≠ Y`.
//! Halving `1 − u` therefore squares the error, and the difference of two
//! successive estimates bounds the remainder.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{domain, Error, Result};
use crate::specfun::{gamma, ScaledHermite, SeriesResult, CRAMER_BOUND};

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 200_000;
/// Term cap for the geometric kernel series.
pub const KERNEL_MAX_TERMS: usize = 5000;
/// Largest `|u|` accepted by the kernel series.
pub const KERNEL_MAX_U: f64 = 0.95;

/// A point `(X, Y, u)` of the Mehler kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MehlerPoint {
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

impl MehlerPoint {
    pub fn new(x: f64, y: f64, u: f64) -> Result<Self> {
        if !(u.abs() < 1.0) {
            return Err(domain("MehlerPoint", format!("need |u| < 1, got {u}")));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(domain("MehlerPoint", "X and Y must be finite"));
        }
        Ok(Self { x, y, u })
    }
}

/// Parameters of the sum rule `Σ D_n(x)D_n(y)/(n!(n+ν)) = Γ(ν)D_{−ν}(x)D_{−ν}(−y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRuleQuery {
    pub nu: f64,
    pub x: f64,
    pub y: f64,
}

impl SumRuleQuery {
    /// `y` may be negative; only `x > y` is required.
    pub fn new(nu: f64, x: f64, y: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(domain(
                "SumRuleQuery",
                format!("order ν must be positive, got {nu}"),
            ));
        }
        if !(x > y) || !x.is_finite() || !y.is_finite() {
            return Err(domain(
                "SumRuleQuery",
                format!("need x > y, got x={x}, y={y}"),
            ));
        }
        Ok(Self { nu, x, y })
    }
}

/// `exp[(2XYu − (X²+Y²)u²)/(1−u²)]`.
pub fn mehler_kernel_closed(p: &MehlerPoint) -> Result<f64> {
    if !(p.u.abs() < 1.0) {
        return Err(domain(
            "mehler_kernel_closed",
            format!("need |u| < 1, got {}", p.u),
        ));
    }
    let u = p.u;
    let num = 2.0 * p.x * p.y * u - (p.x * p.x + p.y * p.y) * u * u;
    Ok((num / ((1.0 - u) * (1.0 + u))).exp())
}

/// `√(1−u²) Σ h_n(X)h_n(Y)uⁿ`, truncated once the Cramér bound on the
/// remainder, `K²e^{(X²+Y²)/2}|u|^{n+1}/(1−|u|)`, drops below `tol`.
pub fn mehler_kernel_series(p: &MehlerPoint, tol: f64) -> Result<SeriesResult> {
    if !(p.u.abs() <= KERNEL_MAX_U) {
        return Err(domain(
            "mehler_kernel_series",
            format!("need |u| ≤ {KERNEL_MAX_U}, got {}", p.u),
        ));
    }
    check_tol("mehler_kernel_series", tol)?;
    let u = p.u;
    let norm = ((1.0 - u) * (1.0 + u)).sqrt();
    let envelope = CRAMER_BOUND * CRAMER_BOUND * (0.5 * (p.x * p.x + p.y * p.y)).exp() * norm;
    let mut sum = 0.0;
    let mut power = 1.0;
    let terms = ScaledHermite::new(p.x).zip(ScaledHermite::new(p.y));
    for (n, (hx, hy)) in terms.take(KERNEL_MAX_TERMS).enumerate() {
        sum += hx * hy * power;
        power *= u;
        let tail = envelope * power.abs() / (1.0 - u.abs());
        if tail < tol {
            return Ok(SeriesResult {
                value: norm * sum,
                terms_used: n + 1,
                tail_bound: tail,
            });
        }
    }
    Err(Error::NonConvergence {
        func: "mehler_kernel_series",
        best: norm * sum,
        error_estimate: envelope * power.abs() / (1.0 - u.abs()),
    })
}

fn check_tol(func: &'static str, tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(domain(
            func,
            format!("tolerance must lie in (0, 1), got {tol}"),
        ))
    }
}

/// Products `h_n(X)h_n(Y)`, extended on demand.
struct BilinearTerms {
    hx: ScaledHermite,
    hy: ScaledHermite,
    values: Vec<f64>,
}

impl BilinearTerms {
    fn new(x: f64, y: f64) -> Self {
        Self {
            hx: ScaledHermite::new(x),
            hy: ScaledHermite::new(y),
            values: Vec::new(),
        }
    }

    fn get(&mut self, n: usize) -> f64 {
        while self.values.len() <= n {
            let (a, b) = (self.hx.next().unwrap_or(0.0), self.hy.next().unwrap_or(0.0));
            self.values.push(a * b);
        }
        self.values[n]
    }
}

/// Direct partial sum `Σ_{n<n_terms} h_n(X)h_n(Y)/(n + c)`.
pub fn bilinear_partial_sum(x: f64, y: f64, shift: f64, n_terms: usize) -> f64 {
    ScaledHermite::new(x)
        .zip(ScaledHermite::new(y))
        .take(n_terms)
        .enumerate()
        .map(|(n, (hx, hy))| hx * hy / (n as f64 + shift))
        .sum()
}

/// `Σ_n h_n(X)h_n(Y)/(n + c)` for `X ≠ Y`, evaluated as an Abel limit (see
/// the module docs). `c` must keep `n + c` away from zero.
///
/// `terms_used` is the length of the last partial sum; `tail_bound` is the
/// last Abel step difference plus the Cramér truncation bound.
pub fn bilinear_sum(x: f64, y: f64, shift: f64, tol: f64) -> Result<SeriesResult> {
    check_tol("bilinear_sum", tol)?;
    if x == y {
        return Err(domain(
            "bilinear_sum",
            "X = Y: the Abel limit does not converge on the diagonal",
        ));
    }
    if !shift.is_finite() || (shift <= 0.0 && (shift - shift.round()).abs() < 1e-12) {
        return Err(domain(
            "bilinear_sum",
            format!("shift {shift} hits a zero denominator"),
        ));
    }
    let envelope = CRAMER_BOUND * CRAMER_BOUND * (0.5 * (x * x + y * y)).exp();
    let mut terms = BilinearTerms::new(x, y);
    let mut previous: Option<f64> = None;
    let mut gap = 0.125f64;
    let mut step_error = f64::INFINITY;
    loop {
        let u = 1.0 - gap;
        let mut sum = 0.0;
        let mut power = 1.0;
        let mut n = 0usize;
        let truncation = loop {
            if n >= MAX_TERMS {
                return Err(Error::NonConvergence {
                    func: "bilinear_sum",
                    best: previous.unwrap_or(sum),
                    error_estimate: step_error,
                });
            }
            let denom = n as f64 + shift;
            sum += terms.get(n) * power / denom;
            power *= u;
            n += 1;
            // Remainder ≤ envelope·Σ_{m≥n} u^m/|m+c| ≤ envelope·uⁿ/(|n+c|·(1−u)).
            let tail = envelope * power / ((n as f64 + shift).abs() * gap);
            if n > 8
                && n as f64 + shift > 1.0
                && tail <= 1e-3 * tol * sum.abs().max(f64::MIN_POSITIVE)
            {
                break tail;
            }
        };
        let estimate = u.powf(shift) * sum;
        if let Some(prev) = previous {
            step_error = (estimate - prev).abs();
            if gap <= 1.0 / 32.0 && step_error <= tol * estimate.abs() {
                return Ok(SeriesResult {
                    value: estimate,
                    terms_used: n,
                    tail_bound: step_error + truncation,
                });
            }
        }
        previous = Some(estimate);
        gap *= 0.5;
    }
}

/// `I = 2 Σ H_n(X)H_n(Y)/(2ⁿn!(2ν+n))`, the Hermite expansion of
/// `∫_0^∞ t^{ν−1}(1+t)^{−ν−1/2} e^{−at+b√(t(t+1))} dt` with `a = X²+Y²`, `b = 2XY`.
pub fn series_for_i(nu: f64, x: f64, y: f64, tol: f64) -> Result<SeriesResult> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(domain(
            "series_for_i",
            format!("order ν must be positive, got {nu}"),
        ));
    }
    let s = bilinear_sum(x, y, 2.0 * nu, tol)?;
    Ok(SeriesResult {
        value: 2.0 * s.value,
        terms_used: s.terms_used,
        tail_bound: 2.0 * s.tail_bound,
    })
}

/// Left side of the sum rule, `Σ D_n(x)D_n(y)/(n!(n+ν))`.
///
/// `D_n(x)/√(n!) = e^{−x²/4}·h_n(x/√2)`, so the sum is
/// `e^{−(x²+y²)/4}·Σ h_n(x/√2)h_n(y/√2)/(n+ν)`.
pub fn sum_rule_lhs(q: &SumRuleQuery, tol: f64) -> Result<SeriesResult> {
    let scale = (-0.25 * (q.x * q.x + q.y * q.y)).exp();
    let s = bilinear_sum(q.x * FRAC_1_SQRT_2, q.y * FRAC_1_SQRT_2, q.nu, tol)?;
    Ok(SeriesResult {
        value: scale * s.value,
        terms_used: s.terms_used,
        tail_bound: scale * s.tail_bound,
    })
}

/// Direct partial sum of the sum rule over `n < n_terms`.
pub fn sum_rule_partial(q: &SumRuleQuery, n_terms: usize) -> f64 {
    let scale = (-0.25 * (q.x * q.x + q.y * q.y)).exp();
    scale * bilinear_partial_sum(q.x * FRAC_1_SQRT_2, q.y * FRAC_1_SQRT_2, q.nu, n_terms)
}

/// Right side of the sum rule, `Γ(ν)·D_{−ν}(x)·D_{−ν}(−y)`.
pub fn sum_rule_rhs(q: &SumRuleQuery) -> Result<f64> {
    use crate::specfun::pcf_d;
    Ok(gamma(q.nu)? * pcf_d(-q.nu, q.x)? * pcf_d(-q.nu, -q.y)?)
}

/// Least-squares exponent `p` of an `n^{−p}` envelope fitted to
/// `|h_n(X)h_n(Y)/(n+c)|` over `[n_lo, n_hi)`.
///
/// The terms oscillate, so the fit uses the maximum over geometric blocks of
/// ratio 1.25.
pub fn term_decay_exponent(x: f64, y: f64, shift: f64, n_lo: usize, n_hi: usize) -> Result<f64> {
    if n_lo < 1 || n_hi <= n_lo * 2 {
        return Err(domain(
            "term_decay_exponent",
            "need 1 ≤ n_lo and n_hi > 2·n_lo",
        ));
    }
    let terms: Vec<f64> = ScaledHermite::new(x)
        .zip(ScaledHermite::new(y))
        .take(n_hi)
        .enumerate()
        .map(|(n, (hx, hy))| (hx * hy / (n as f64 + shift)).abs())
        .collect();
    let mut points = Vec::new();
    let mut start = n_lo;
    while start < n_hi {
        let end = ((start as f64 * 1.25).ceil() as usize)
            .max(start + 1)
            .min(n_hi);
        let peak = terms[start..end].iter().cloned().fold(0.0, f64::max);
        if peak > 0.0 {
            let center = ((start as f64) * ((end - 1) as f64).max(start as f64)).sqrt();
            points.push((center.ln(), peak.ln()));
        }
        start = end;
    }
    let m = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), p| {
        (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2))
    });
    Ok(-sxy / sxx)
}
