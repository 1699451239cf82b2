//! Double-exponential quadrature for finite and semi-infinite intervals.
//!
//! Finite intervals use the tanh-sinh map, which clusters nodes at both
//! endpoints so integrable power-law singularities there are absorbed.
//! The half line uses the exp-sinh map `t = c·exp(π/2·sinh s)`, which does the
//! same at the origin while sweeping the exponential tail in logarithmic steps.
//! Both drivers halve the step until two successive levels agree.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Error, Result};

/// Smallest tolerance accepted by the integrators.
pub const MIN_TOL: f64 = 1e-14;
/// Largest tolerance accepted by the integrators.
pub const MAX_TOL: f64 = 1e-2;

/// Absolute error floor used when the integral itself vanishes.
const ABS_FLOOR: f64 = 1e-300;
/// Safety margin (in e-folds) added to `ln(1/tol)` when truncating tails.
const TAIL_MARGIN: f64 = 40.0;
const MIN_LEVEL: u32 = 3;
const MAX_LEVEL: u32 = 11;
/// tanh-sinh abscissae beyond this underflow the endpoint distance.
const TANH_SINH_TMAX: f64 = 6.1;

/// Value, absolute error estimate and number of integrand calls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Asymptotic behavior of a semi-infinite integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// `|f(t)| ≲ poly(t)·e^{-rate·t}`.
    Exponential { rate: f64 },
    /// `|f(t)| ≲ t^{exponent}` with `exponent < -1`.
    Algebraic { exponent: f64 },
}

/// Shape information the half-line integrator needs: the power `p` of the
/// `t^p` behavior at the origin and the decay of the tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrandSpec {
    endpoint_exponent: f64,
    tail: Tail,
}

impl IntegrandSpec {
    pub fn new(endpoint_exponent: f64, decay_rate: f64) -> Result<Self> {
        check_endpoint(endpoint_exponent)?;
        if !(decay_rate > 0.0 && decay_rate.is_finite()) {
            return Err(domain(
                "IntegrandSpec",
                format!("decay rate must be positive and finite, got {decay_rate}"),
            ));
        }
        Ok(Self {
            endpoint_exponent,
            tail: Tail::Exponential { rate: decay_rate },
        })
    }

    /// Spec for an integrand whose tail is a pure power `t^{tail_exponent}`.
    pub fn algebraic(endpoint_exponent: f64, tail_exponent: f64) -> Result<Self> {
        check_endpoint(endpoint_exponent)?;
        if !(tail_exponent < -1.0) {
            return Err(domain(
                "IntegrandSpec",
                format!("algebraic tail t^{tail_exponent} is not integrable"),
            ));
        }
        Ok(Self {
            endpoint_exponent,
            tail: Tail::Algebraic {
                exponent: tail_exponent,
            },
        })
    }

    pub fn endpoint_exponent(&self) -> f64 {
        self.endpoint_exponent
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Point beyond which the tail is negligible at tolerance `tol`.
    pub fn truncation_point(&self, tol: f64) -> f64 {
        let budget = (1.0 / tol).ln() + TAIL_MARGIN;
        match self.tail {
            Tail::Exponential { rate } => {
                // Solve rate·T − max(p, 0)·ln(1 + T) = budget by fixed point.
                let p = self.endpoint_exponent.max(0.0);
                let mut t = budget / rate;
                for _ in 0..50 {
                    let next = (budget + p * (1.0 + t).ln()) / rate;
                    if (next - t).abs() <= 1e-12 * next {
                        t = next;
                        break;
                    }
                    t = next;
                }
                t
            }
            Tail::Algebraic { exponent } => (budget / (-exponent - 1.0)).min(690.0).exp(),
        }
    }
}

fn check_endpoint(p: f64) -> Result<()> {
    if p > -1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(domain(
            "IntegrandSpec",
            format!("endpoint exponent must exceed -1, got {p}"),
        ))
    }
}

fn check_tol(func: &'static str, tol: f64) -> Result<()> {
    if (MIN_TOL..=MAX_TOL).contains(&tol) {
        Ok(())
    } else {
        Err(domain(
            func,
            format!("tolerance {tol:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]"),
        ))
    }
}

/// A tanh-sinh node together with its exact distances to both endpoints.
///
/// `x` alone loses the distance to an endpoint once it drops below one ulp of
/// the endpoint; integrands singular there should use `from_lo`/`to_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_lo: f64,
    pub to_hi: f64,
}

/// Running state of the level-halving trapezoid driver.
struct Refinement {
    total: f64,
    abs_total: f64,
    evaluations: usize,
}

impl Refinement {
    fn new() -> Self {
        Self {
            total: 0.0,
            abs_total: 0.0,
            evaluations: 0,
        }
    }

    fn add(&mut self, at: f64, weight: f64, value: f64) -> Result<()> {
        self.evaluations += 1;
        if !value.is_finite() {
            return Err(Error::Evaluation { at, value });
        }
        let term = weight * value;
        self.total += term;
        self.abs_total += term.abs();
        Ok(())
    }
}

/// Drives `visit(level, step, refinement)`, which must add the nodes that are
/// new at `level`, until two successive estimates agree to `tol`.
fn refine<V>(func: &'static str, tol: f64, mut visit: V) -> Result<QuadratureResult>
where
    V: FnMut(u32, f64, &mut Refinement) -> Result<()>,
{
    let mut state = Refinement::new();
    let mut previous: Option<f64> = None;
    let mut error_estimate = f64::INFINITY;
    for level in 0..=MAX_LEVEL {
        let step = 0.5f64.powi(level as i32);
        visit(level, step, &mut state)?;
        let estimate = step * state.total;
        if let Some(prev) = previous {
            error_estimate = (estimate - prev).abs();
            let roundoff = 64.0 * f64::EPSILON * step * state.abs_total;
            if level >= MIN_LEVEL
                && (error_estimate <= tol * estimate.abs()
                    || error_estimate <= ABS_FLOOR
                    || error_estimate <= roundoff)
            {
                return Ok(QuadratureResult {
                    value: estimate,
                    error_estimate,
                    evaluations: state.evaluations,
                });
            }
        }
        previous = Some(estimate);
    }
    Err(Error::NonConvergence {
        func,
        best: previous.unwrap_or(f64::NAN),
        error_estimate,
    })
}

/// Multiples `j·step` in `[lo, hi]` that are new at `level` (odd `j` beyond level 0).
fn level_indices(level: u32, step: f64, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last)
        .filter(move |j| level == 0 || j.rem_euclid(2) == 1)
        .map(move |j| j as f64 * step)
}

/// Integrates `f` over `[lo, hi]` where `f` receives the node with exact
/// endpoint distances. Nodes whose distance to either endpoint underflows
/// are skipped.
pub fn integrate_finite_with<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(Abscissa) -> f64,
{
    check_tol("integrate_finite", tol)?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(domain(
            "integrate_finite",
            format!("need finite lo < hi, got [{lo}, {hi}]"),
        ));
    }
    let half = 0.5 * (hi - lo);
    refine("integrate_finite", tol, |level, step, state| {
        for t in level_indices(level, step, -TANH_SINH_TMAX, TANH_SINH_TMAX) {
            let s = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * s.abs()).exp();
            // 1 ± tanh(s) without cancellation.
            let (near, far) = (2.0 * e / (1.0 + e), 2.0 / (1.0 + e));
            let (from_lo, to_hi) = if s < 0.0 {
                (half * near, half * far)
            } else {
                (half * far, half * near)
            };
            let weight = half * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
            if from_lo == 0.0 || to_hi == 0.0 || weight == 0.0 {
                continue;
            }
            let x = if s < 0.0 { lo + from_lo } else { hi - to_hi };
            let node = Abscissa { x, from_lo, to_hi };
            state.add(x, weight, f(node))?;
        }
        Ok(())
    })
}

/// Integrates `f` over `[lo, hi]` with tanh-sinh node clustering at both ends.
pub fn integrate_finite<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate_finite_with(
        |node| {
            if node.x <= lo || node.x >= hi {
                // Rounded onto an endpoint; its weight is below one ulp of the interval.
                0.0
            } else {
                f(node.x)
            }
        },
        lo,
        hi,
        tol,
    )
}

/// Integrates `f` over `(0, ∞)`.
///
/// The origin is absorbed by the exp-sinh map; the node range is cut where
/// `t^{p+1}` (origin) or the tail envelope (infinity) drop below
/// `tol·e^{-40}`.
pub fn integrate_semi_infinite<F>(f: F, spec: IntegrandSpec, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    check_tol("integrate_semi_infinite", tol)?;
    let budget = (1.0 / tol).ln() + TAIL_MARGIN;
    let scale = match spec.tail {
        Tail::Exponential { rate } => (1.0 / rate).min(1.0),
        Tail::Algebraic { .. } => 1.0,
    };
    let ln_lo = (-budget / (spec.endpoint_exponent + 1.0)).max((1e-300f64 / scale).ln());
    let ln_hi = (spec.truncation_point(tol) / scale).ln().max(1.0);
    let s_lo = (ln_lo / FRAC_PI_2).asinh();
    let s_hi = (ln_hi / FRAC_PI_2).asinh();
    refine("integrate_semi_infinite", tol, |level, step, state| {
        for s in level_indices(level, step, s_lo, s_hi) {
            let t = scale * (FRAC_PI_2 * s.sinh()).exp();
            let weight = t * FRAC_PI_2 * s.cosh();
            if t == 0.0 || !t.is_finite() {
                continue;
            }
            state.add(t, weight, f(t))?;
        }
        Ok(())
    })
}
