//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and exits
//! nonzero if a gating criterion fails. Criterion 8 is informational.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use weber_core::glasser::{
    laplace_closed, laplace_integral, product_reference, product_via_integral,
    product_via_integral_exploratory, LaplaceParams, LaplaceSign, ProductQuery,
};
use weber_core::green::{green_closed, green_ode_oracle, green_spectral, GreenQuery};
use weber_core::hyperbolic::{
    erfc_identity_13a, erfc_identity_13b, k_identity_14, HyperbolicQuery,
};
use weber_core::mehler::{
    mehler_kernel_closed, mehler_kernel_series, series_for_i, sum_rule_lhs, sum_rule_rhs,
    term_decay_exponent, MehlerPoint, SumRuleQuery,
};
use weber_core::quadrature::integrate_finite_with;

const PRODUCT_TOL: f64 = 1e-8;
const PRODUCT_RUNTIME_LIMIT_S: f64 = 60.0;
const LAPLACE_TOL: f64 = 1e-8;
const KERNEL_TOL: f64 = 1e-9;
const SERIES_TOL: f64 = 1e-8;
const GREEN_TOL: f64 = 1e-6;
const ERFC_TOL: f64 = 1e-8;
const K_TOL: f64 = 1e-7;
const SUM_RULE_TOL: f64 = 5e-7;
const DECAY_RANGE: (f64, f64) = (1.3, 1.7);

/// Tolerance handed to the numerical routines.
const WORK_TOL: f64 = 1e-11;

struct Outcome {
    passed: bool,
    detail: String,
}

/// Number, name, whether it gates, check.
type Criterion = (u8, &'static str, bool, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn log_grid(lo: f64, hi: f64) -> [f64; 5] {
    std::array::from_fn(|i| (lo.ln() + i as f64 / 4.0 * (hi.ln() - lo.ln())).exp())
}

fn product_grid() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut errors = Vec::new();
    for nu in [0.5, 1.0, 1.5, 2.5] {
        for x in [1.5, 2.0, 3.0, 4.0] {
            for y in [0.3, 0.7, 1.2] {
                let q = ProductQuery::new(nu, x, y).unwrap();
                match (product_via_integral(&q, WORK_TOL), product_reference(&q)) {
                    (Ok(l), Ok(r)) => worst = worst.max(rel(l.value, r)),
                    (l, r) => errors.push(format!("({nu},{x},{y}): {l:?} {r:?}")),
                }
                count += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        passed: errors.is_empty() && count == 48 && worst <= PRODUCT_TOL && secs <= PRODUCT_RUNTIME_LIMIT_S,
        detail: format!(
            "{count} points, max rel err {worst:.2e} (tol {PRODUCT_TOL:e}), {secs:.3} s (limit {PRODUCT_RUNTIME_LIMIT_S} s){}",
            if errors.is_empty() { String::new() } else { format!(", errors: {errors:?}") }
        ),
    }
}

fn laplace_forms() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst = [0.0f64; 2];
    let mut errors = 0;
    for (k, sign) in [LaplaceSign::Plus, LaplaceSign::Minus]
        .into_iter()
        .enumerate()
    {
        for _ in 0..20 {
            let nu = rng.gen_range(0.3..5.0);
            let b = rng.gen_range(0.1..4.0);
            let a = b + rng.gen_range(0.05..3.0);
            let p = LaplaceParams::new(nu, a, b).unwrap();
            match (
                laplace_integral(&p, sign, WORK_TOL),
                laplace_closed(&p, sign),
            ) {
                (Ok(l), Ok(r)) => worst[k] = worst[k].max(rel(l.value, r)),
                _ => errors += 1,
            }
        }
    }
    Outcome {
        passed: errors == 0 && worst.iter().all(|&w| w <= LAPLACE_TOL),
        detail: format!(
            "20 random sets per sign, max rel err +: {:.2e}, −: {:.2e} (tol {LAPLACE_TOL:e}), {errors} errors",
            worst[0], worst[1]
        ),
    }
}

fn mehler_kernel() -> Outcome {
    let mut rng = StdRng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..200 {
        let p = MehlerPoint::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-0.9..0.9),
        )
        .unwrap();
        match (mehler_kernel_series(&p, WORK_TOL), mehler_kernel_closed(&p)) {
            (Ok(s), Ok(c)) => worst = worst.max((s.value - c).abs() / (1.0 + c.abs())),
            _ => errors += 1,
        }
    }
    Outcome {
        passed: errors == 0 && worst <= KERNEL_TOL,
        detail: format!(
            "200 random points, max |Δ|/(1+|K|) {worst:.2e} (tol {KERNEL_TOL:e}), {errors} errors"
        ),
    }
}

/// The u-form of the Laplace integral with weight `(1−u²)^w`.
fn u_form(nu: f64, a: f64, b: f64, w: f64) -> f64 {
    integrate_finite_with(
        |p| {
            let u = p.x;
            let one_minus_u2 = p.to_hi * (1.0 + u);
            let exponent = (b * u - a * u * u) / one_minus_u2;
            2.0 * ((2.0 * nu - 1.0) * u.ln() + w * one_minus_u2.ln() + exponent).exp()
        },
        0.0,
        1.0,
        WORK_TOL,
    )
    .unwrap()
    .value
}

fn hermite_series() -> Outcome {
    let mut rng = StdRng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..30 {
        let nu = rng.gen_range(0.3..3.0);
        let x: f64 = rng.gen_range(-2.0..2.0);
        let y = loop {
            let y: f64 = rng.gen_range(-2.0..2.0);
            if (x - y).abs() >= 0.3 && x * y != 0.0 {
                break y;
            }
        };
        let (a, b) = (x * x + y * y, 2.0 * x * y);
        let sign = if b > 0.0 {
            LaplaceSign::Plus
        } else {
            LaplaceSign::Minus
        };
        let quad = LaplaceParams::new(2.0 * nu, a, b.abs())
            .and_then(|p| laplace_integral(&p, sign, WORK_TOL));
        match (series_for_i(nu, x, y, WORK_TOL), quad) {
            (Ok(s), Ok(q)) => worst = worst.max(rel(s.value, q.value)),
            _ => errors += 1,
        }
    }
    let (nu, a, b) = (2.0, 2.5, 2.0);
    let t_form = laplace_integral(
        &LaplaceParams::new(2.0 * nu, a, b).unwrap(),
        LaplaceSign::Plus,
        WORK_TOL,
    )
    .unwrap()
    .value;
    let derived = rel(u_form(nu, a, b, -0.5), t_form);
    let other = rel(u_form(nu, a, b, nu - 1.5), t_form);
    Outcome {
        passed: errors == 0 && worst <= SERIES_TOL && derived <= SERIES_TOL && other > SERIES_TOL,
        detail: format!(
            "30 random sets, max rel err {worst:.2e} (tol {SERIES_TOL:e}), {errors} errors; \
             u-form weight (1−u²)^(−1/2): rel err {derived:.1e}, weight (1−u²)^(ν−3/2): rel err {other:.1e}"
        ),
    }
}

fn green_three_way() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for lambda in [-3.0, -1.0, 0.0, 0.5] {
        for (x, xp) in [(1.0, 0.0), (2.0, -1.0), (1.5, 0.5)] {
            let q = GreenQuery::new(lambda, x, xp).unwrap();
            match (
                green_spectral(&q, WORK_TOL),
                green_closed(&q),
                green_ode_oracle(&q),
            ) {
                (Ok(s), Ok(c), Ok(o)) => {
                    worst = worst
                        .max(rel(s.value, c))
                        .max(rel(o, c))
                        .max(rel(o, s.value));
                }
                _ => errors += 1,
            }
        }
    }
    Outcome {
        passed: errors == 0 && worst <= GREEN_TOL,
        detail: format!(
            "12 points, max pairwise rel err {worst:.2e} (tol {GREEN_TOL:e}), {errors} errors"
        ),
    }
}

fn hyperbolic() -> Outcome {
    let mut worst = [0.0f64; 3];
    let mut failures = 0;
    for s in log_grid(0.3, 4.0) {
        for phi in log_grid(0.1, 3.0) {
            let e = HyperbolicQuery::erfc(s, phi).unwrap();
            let k = HyperbolicQuery::bessel(s, phi).unwrap();
            let records = [
                erfc_identity_13a(&e, WORK_TOL),
                erfc_identity_13b(&e, WORK_TOL),
                k_identity_14(&k, WORK_TOL),
            ];
            for (i, r) in records.into_iter().enumerate() {
                match r {
                    Ok(r) => worst[i] = worst[i].max(r.rel_err),
                    Err(_) => failures += 1,
                }
            }
        }
    }
    Outcome {
        passed: failures == 0 && worst[0] <= ERFC_TOL && worst[1] <= ERFC_TOL && worst[2] <= K_TOL,
        detail: format!(
            "5×5 grids, max rel err sech-form {:.2e}, sinh-form {:.2e} (tol {ERFC_TOL:e}), K_1/4-form {:.2e} (tol {K_TOL:e})",
            worst[0], worst[1], worst[2]
        ),
    }
}

fn sum_rule() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    let mut terms = Vec::new();
    let (mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for nu in [0.5, 1.0, 2.0] {
        for (x, y) in [(2.0, 1.0), (3.0, 0.5), (2.5, -0.5)] {
            let q = SumRuleQuery::new(nu, x, y).unwrap();
            match (sum_rule_lhs(&q, WORK_TOL), sum_rule_rhs(&q)) {
                (Ok(l), Ok(r)) => {
                    worst = worst.max(rel(l.value, r));
                    terms.push(l.terms_used);
                }
                _ => errors += 1,
            }
            match term_decay_exponent(x * FRAC_1_SQRT_2, y * FRAC_1_SQRT_2, nu, 100, 20_000) {
                Ok(p) => {
                    pmin = pmin.min(p);
                    pmax = pmax.max(p);
                }
                Err(_) => errors += 1,
            }
        }
    }
    Outcome {
        passed: errors == 0
            && worst <= SUM_RULE_TOL
            && pmin >= DECAY_RANGE.0
            && pmax <= DECAY_RANGE.1,
        detail: format!(
            "9 triples, max rel err {worst:.2e} (tol {SUM_RULE_TOL:e}), terms_used {terms:?}, \
             term-decay exponent in [{pmin:.3}, {pmax:.3}] (required within [{}, {}])",
            DECAY_RANGE.0, DECAY_RANGE.1
        ),
    }
}

fn diagonal_exploration() -> Outcome {
    let mut lines = Vec::new();
    let mut agree = true;
    for (nu, x) in [(0.5, 0.5), (0.5, 2.0), (1.0, 1.0), (1.0, 3.0), (2.5, 1.5)] {
        let q = ProductQuery::new(nu, x, x).unwrap();
        let r = product_reference(&q).unwrap();
        match product_via_integral_exploratory(&q, WORK_TOL) {
            Ok(l) => {
                let e = rel(l.value, r);
                agree &= e <= PRODUCT_TOL;
                lines.push(format!("ν={nu} x=y={x}: integral {:.15e} reference {r:.15e} rel err {e:.1e} ({} evals)", l.value, l.evaluations));
            }
            Err(err) => {
                agree = false;
                lines.push(format!("ν={nu} x=y={x}: integral failed: {err}"));
            }
        }
    }
    // Convergence of the Hermite sum as x − y → 0.
    for gap in [0.5, 0.2, 0.1, 0.05, 0.02] {
        let q = SumRuleQuery::new(1.0, 1.5 + gap, 1.5).unwrap();
        let line = match (sum_rule_lhs(&q, WORK_TOL), sum_rule_rhs(&q)) {
            (Ok(l), Ok(r)) => format!(
                "sum rule ν=1 x−y={gap}: rel err {:.1e}, terms_used {}",
                rel(l.value, r),
                l.terms_used
            ),
            (Err(e), _) | (_, Err(e)) => format!("sum rule ν=1 x−y={gap}: {e}"),
        };
        lines.push(line);
    }
    let verdict = if agree {
        "at x = y the integral converges (algebraic t^(−3/2) tail) and agrees with the reference product"
    } else {
        "at x = y the integral does not reproduce the reference product"
    };
    Outcome {
        passed: agree,
        detail: format!("{verdict}\n      {}", lines.join("\n      ")),
    }
}

fn cli_determinism() -> Outcome {
    let run = |format: &str| {
        Command::new(env!("CARGO_BIN_EXE_weber"))
            .args(["verify", "all", "--format", format])
            .output()
            .expect("weber binary runs")
    };
    let mut notes = Vec::new();
    let mut passed = true;
    for format in ["csv", "json"] {
        let (a, b) = (run(format), run(format));
        let ok = a.status.success()
            && b.status.success()
            && a.stdout == b.stdout
            && !a.stdout.is_empty();
        passed &= ok;
        notes.push(format!(
            "{format}: exit {:?}/{:?}, {} bytes, identical={}, {}",
            a.status.code(),
            b.status.code(),
            a.stdout.len(),
            a.stdout == b.stdout,
            String::from_utf8_lossy(&a.stderr).trim()
        ));
    }
    Outcome {
        passed,
        detail: notes.join("; "),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            1,
            "product integral vs reference, 48-point grid",
            true,
            product_grid,
        ),
        (
            2,
            "Laplace forms vs closed forms, both signs",
            true,
            laplace_forms,
        ),
        (3, "Mehler kernel closed vs series", true, mehler_kernel),
        (
            4,
            "Hermite series vs Laplace integral",
            true,
            hermite_series,
        ),
        (
            5,
            "Green function: spectral, closed form, shooting",
            true,
            green_three_way,
        ),
        (6, "hyperbolic erfc and K_1/4 integrals", true, hyperbolic),
        (7, "sum rule and term decay", true, sum_rule),
        (
            8,
            "exploratory: product integral at x = y",
            false,
            diagonal_exploration,
        ),
        (
            9,
            "CLI `verify all` exit status and determinism",
            true,
            cli_determinism,
        ),
    ];
    let mut gating_failures = 0;
    for (n, name, gating, check) in criteria {
        let start = Instant::now();
        let out = check();
        let tag = match (out.passed, gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "INFO",
        };
        if gating && !out.passed {
            gating_failures += 1;
        }
        println!(
            "criterion {n} {tag}{} {name} [{:.2} s]: {}",
            if gating { "" } else { " (non-gating)" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    if gating_failures == 0 {
        println!("acceptance: all gating criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {gating_failures} gating criteria failed");
        ExitCode::FAILURE
    }
}
