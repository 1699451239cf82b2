//! Green function of the oscillator operator `L = d²/dx² + λ − x²` on the
//! real line with decay at ±∞, by three independent routes: the eigenfunction
//! expansion, the closed form in parabolic cylinder functions, and a
//! shooting solution of the homogeneous equation joined by its Wronskian.
//!
//! The eigenfunction expansion with denominators `λ_n − λ` satisfies
//! `L G = −δ(x − x′)`; the shooting oracle uses the same source sign.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::mehler::bilinear_sum;
use crate::specfun::{gamma, pcf_d, ScaledHermite, SeriesResult, MAX_ABS_ORDER};

/// Closest approach to an eigenvalue allowed for the spectral sum.
pub const SPECTRAL_POLE_GUARD: f64 = 1e-6;
/// Closest approach to an eigenvalue allowed for the shooting oracle.
pub const ODE_POLE_GUARD: f64 = 0.1;
/// Shooting starts at `±SHOOTING_BOUNDARY`.
pub const SHOOTING_BOUNDARY: f64 = 8.0;
/// Strength of the delta source matched by all three routes.
pub const SOURCE_SIGN: f64 = -1.0;

const RK4_STEP: f64 = 5e-4;

/// Spectral parameter `λ` and the two points `x`, `x′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenQuery {
    pub lambda: f64,
    pub x: f64,
    pub xprime: f64,
}

impl GreenQuery {
    pub fn new(lambda: f64, x: f64, xprime: f64) -> Result<Self> {
        if !lambda.is_finite() || !x.is_finite() || !xprime.is_finite() {
            return Err(domain("GreenQuery", "λ, x and x′ must be finite"));
        }
        Ok(Self { lambda, x, xprime })
    }

    /// Nearest oscillator eigenvalue `2n+1` and the distance to it.
    fn nearest_eigenvalue(&self) -> (f64, f64) {
        let n = ((self.lambda - 1.0) / 2.0).round().max(0.0);
        let ev = 2.0 * n + 1.0;
        (ev, (self.lambda - ev).abs())
    }

    fn check_pole(&self, guard: f64) -> Result<()> {
        let (eigenvalue, dist) = self.nearest_eigenvalue();
        if dist < guard {
            Err(Error::Pole {
                lambda: self.lambda,
                eigenvalue,
                guard,
            })
        } else {
            Ok(())
        }
    }
}

/// Oscillator eigenvalue `λ_n = 2n + 1`.
pub fn eigenvalue(n: u32) -> f64 {
    2.0 * n as f64 + 1.0
}

/// Normalized eigenfunction `y_n(x) = (2ⁿn!√π)^{−1/2} e^{−x²/2} H_n(x)`.
pub fn eigenfunction(n: u32, x: f64) -> Result<f64> {
    if n > 200 || !(x.abs() <= 10.0) {
        return Err(domain(
            "eigenfunction",
            format!("supported for n ≤ 200, |x| ≤ 10; got n={n}, x={x}"),
        ));
    }
    let h = ScaledHermite::new(x).nth(n as usize).unwrap_or(0.0);
    Ok(PI.powf(-0.25) * (-0.5 * x * x).exp() * h)
}

/// `(1/√π) e^{−(x²+x′²)/2} Σ H_n(x)H_n(x′)/(2ⁿn!(λ_n − λ))`.
pub fn green_spectral(q: &GreenQuery, tol: f64) -> Result<SeriesResult> {
    q.check_pole(SPECTRAL_POLE_GUARD)?;
    // 1/(2n+1−λ) = ½·1/(n + (1−λ)/2)
    let s = bilinear_sum(q.x, q.xprime, 0.5 * (1.0 - q.lambda), tol)?;
    let scale = 0.5 / PI.sqrt() * (-0.5 * (q.x * q.x + q.xprime * q.xprime)).exp();
    Ok(SeriesResult {
        value: scale * s.value,
        terms_used: s.terms_used,
        tail_bound: scale * s.tail_bound,
    })
}

/// `Γ((1−λ)/2)/(2√π) · D_{(λ−1)/2}(x√2) · D_{(λ−1)/2}(−x′√2)` for `x > x′`.
pub fn green_closed(q: &GreenQuery) -> Result<f64> {
    if !(q.x > q.xprime) {
        return Err(domain(
            "green_closed",
            format!("needs x > x′, got x={}, x′={}", q.x, q.xprime),
        ));
    }
    let c = 0.5 * (1.0 - q.lambda);
    if !(c > 0.0) || c > MAX_ABS_ORDER {
        return Err(domain(
            "green_closed",
            format!("needs 0 < (1−λ)/2 ≤ {MAX_ABS_ORDER}, got {c}"),
        ));
    }
    let s2 = std::f64::consts::SQRT_2;
    Ok(gamma(c)? / (2.0 * PI.sqrt()) * pcf_d(-c, q.x * s2)? * pcf_d(-c, -q.xprime * s2)?)
}

/// State `(y, y′)` of the homogeneous equation `y″ = (x² − λ)y`.
type State = (f64, f64);

fn rk4_step(lambda: f64, x: f64, (y, v): State, h: f64) -> State {
    let acc = |x: f64, y: f64| (x * x - lambda) * y;
    let (k1y, k1v) = (v, acc(x, y));
    let (k2y, k2v) = (v + 0.5 * h * k1v, acc(x + 0.5 * h, y + 0.5 * h * k1y));
    let (k3y, k3v) = (v + 0.5 * h * k2v, acc(x + 0.5 * h, y + 0.5 * h * k2y));
    let (k4y, k4v) = (v + h * k3v, acc(x + h, y + h * k3y));
    (
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Integrates from `from` to `to` with equal RK4 steps close to `RK4_STEP`.
fn shoot(lambda: f64, from: f64, to: f64, start: State) -> State {
    let steps = ((to - from).abs() / RK4_STEP).ceil().max(1.0) as usize;
    let h = (to - from) / steps as f64;
    let mut state = start;
    for i in 0..steps {
        state = rk4_step(lambda, from + i as f64 * h, state, h);
    }
    state
}

/// Decaying start at `x = ±L`: `y ~ |x|^{(λ−1)/2} e^{−x²/2}`, so
/// `y′/y = −x + (λ−1)/(2x)`.
fn decaying_start(lambda: f64, x: f64) -> State {
    (1.0, -x + (lambda - 1.0) / (2.0 * x))
}

/// Green function from the solutions decaying to the left and to the right,
/// `G = SOURCE_SIGN · y₋(min(x,x′))·y₊(max(x,x′)) / W[y₋, y₊]`.
pub fn green_ode_oracle(q: &GreenQuery) -> Result<f64> {
    q.check_pole(ODE_POLE_GUARD)?;
    let l = SHOOTING_BOUNDARY;
    if !(q.x.abs() <= 6.0 && q.xprime.abs() <= 6.0) {
        return Err(domain(
            "green_ode_oracle",
            format!("needs |x|, |x′| ≤ 6, got x={}, x′={}", q.x, q.xprime),
        ));
    }
    let (lo, hi) = if q.x <= q.xprime {
        (q.x, q.xprime)
    } else {
        (q.xprime, q.x)
    };
    let left = shoot(q.lambda, -l, lo, decaying_start(q.lambda, -l));
    let right_hi = shoot(q.lambda, l, hi, decaying_start(q.lambda, l));
    let right_lo = shoot(q.lambda, hi, lo, right_hi);
    let wronskian = left.0 * right_lo.1 - left.1 * right_lo.0;
    let g = SOURCE_SIGN * left.0 * right_hi.0 / wronskian;
    if !g.is_finite() || wronskian == 0.0 {
        return Err(Error::NonConvergence {
            func: "green_ode_oracle",
            best: g,
            error_estimate: f64::INFINITY,
        });
    }
    Ok(g)
}
