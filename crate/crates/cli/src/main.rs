use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weber_core::glasser::{
    laplace_closed, laplace_integral, product_reference, product_via_integral,
    product_via_integral_exploratory, LaplaceParams, LaplaceSign, ProductQuery, DEFAULT_TOL,
};
use weber_core::green::{green_closed, green_ode_oracle, green_spectral, GreenQuery};
use weber_core::hyperbolic::{lhs_13a, lhs_13b, lhs_14, rhs_13a, rhs_13b, rhs_14};
use weber_core::mehler::{
    mehler_kernel_closed, mehler_kernel_series, series_for_i, sum_rule_lhs, sum_rule_rhs,
    MehlerPoint, SumRuleQuery,
};
use weber_core::specfun::{bessel_k_quarter, erfc, gamma, hermite, pcf_d};
use weber_core::verify::{build_grid, run_sweep, threads_from_env, IdentityId, Point};
use weber_core::{QuadratureResult, SeriesResult};

type Fallible<T> = Result<T, Box<dyn std::error::Error>>;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "weber",
    version,
    about = "Parabolic cylinder function products and their identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity at one point.
    #[command(allow_negative_numbers = true)]
    Eval(EvalArgs),
    /// Check identities over parameter grids.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Target {
    PcfD,
    Gamma,
    Erfc,
    BesselKQuarter,
    Hermite,
    ProductIntegral,
    ProductReference,
    #[value(name = "laplace_I")]
    LaplaceI,
    LaplaceClosed,
    MehlerKernel,
    MehlerKernelClosed,
    #[value(name = "series_for_I")]
    SeriesForI,
    SumRuleLhs,
    SumRuleRhs,
    GreenSpectral,
    GreenClosed,
    GreenOde,
    #[value(name = "hyperbolic_lhs_13a")]
    HyperbolicLhs13a,
    #[value(name = "hyperbolic_rhs_13a")]
    HyperbolicRhs13a,
    #[value(name = "hyperbolic_lhs_13b")]
    HyperbolicLhs13b,
    #[value(name = "hyperbolic_rhs_13b")]
    HyperbolicRhs13b,
    #[value(name = "hyperbolic_lhs_14")]
    HyperbolicLhs14,
    #[value(name = "hyperbolic_rhs_14")]
    HyperbolicRhs14,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(value_enum)]
    target: Target,
    /// Order ν (for pcf_d: the order itself).
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Sign of the square-root exponent in laplace_I: 1 or -1.
    #[arg(long)]
    sign: Option<i8>,
    #[arg(long = "X")]
    big_x: Option<f64>,
    #[arg(long = "Y")]
    big_y: Option<f64>,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    xprime: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Admit x = y in product_integral.
    #[arg(long)]
    exploratory: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct VerifyArgs {
    /// Identity id (EQ3, EQ8_EQ9, EQ10, …, EQ15) or `all`.
    identity: String,
    /// Pass threshold; defaults to each identity's own tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long = "X", allow_hyphen_values = true)]
    big_x: Option<String>,
    #[arg(long = "Y", allow_hyphen_values = true)]
    big_y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xprime: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
}

impl VerifyArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        [
            ("nu", &self.nu),
            ("x", &self.x),
            ("y", &self.y),
            ("a", &self.a),
            ("b", &self.b),
            ("X", &self.big_x),
            ("Y", &self.big_y),
            ("u", &self.u),
            ("lambda", &self.lambda),
            ("xprime", &self.xprime),
            ("alpha", &self.alpha),
            ("phi", &self.phi),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

/// A computed value with whatever metadata its route produced.
enum Outcome {
    Plain(f64),
    Quadrature(QuadratureResult),
    Series(SeriesResult),
}

fn need(name: &str, v: Option<f64>) -> Fallible<f64> {
    Ok(v.ok_or_else(|| format!("missing --{name}"))?)
}

fn evaluate(args: &EvalArgs) -> Fallible<Outcome> {
    let p = |name: &str| -> Fallible<f64> {
        let v = match name {
            "nu" => args.nu,
            "z" => args.z,
            "x" => args.x,
            "y" => args.y,
            "a" => args.a,
            "b" => args.b,
            "X" => args.big_x,
            "Y" => args.big_y,
            "u" => args.u,
            "lambda" => args.lambda,
            "xprime" => args.xprime,
            "alpha" => args.alpha,
            "phi" => args.phi,
            _ => None,
        };
        need(name, v)
    };
    let tol = args.tol;
    let product =
        || -> Fallible<ProductQuery> { Ok(ProductQuery::new(p("nu")?, p("x")?, p("y")?)?) };
    let laplace = || -> Fallible<(LaplaceParams, LaplaceSign)> {
        let sign = match args.sign {
            None => LaplaceSign::Plus,
            Some(1) => LaplaceSign::Plus,
            Some(-1) => LaplaceSign::Minus,
            Some(s) => return Err(format!("--sign must be 1 or -1, got {s}").into()),
        };
        Ok((LaplaceParams::new(p("nu")?, p("a")?, p("b")?)?, sign))
    };
    let mehler = || -> Fallible<MehlerPoint> { Ok(MehlerPoint::new(p("X")?, p("Y")?, p("u")?)?) };
    let sum_rule =
        || -> Fallible<SumRuleQuery> { Ok(SumRuleQuery::new(p("nu")?, p("x")?, p("y")?)?) };
    let green =
        || -> Fallible<GreenQuery> { Ok(GreenQuery::new(p("lambda")?, p("x")?, p("xprime")?)?) };
    let out = match args.target {
        Target::PcfD => Outcome::Plain(pcf_d(p("nu")?, p("z")?)?),
        Target::Gamma => Outcome::Plain(gamma(p("nu")?)?),
        Target::Erfc => Outcome::Plain(erfc(p("z")?)),
        Target::BesselKQuarter => Outcome::Plain(bessel_k_quarter(p("z")?)?),
        Target::Hermite => Outcome::Plain(hermite(args.n.ok_or("missing --n")?, p("x")?)?),
        Target::ProductIntegral if args.exploratory => {
            Outcome::Quadrature(product_via_integral_exploratory(&product()?, tol)?)
        }
        Target::ProductIntegral => Outcome::Quadrature(product_via_integral(&product()?, tol)?),
        Target::ProductReference => Outcome::Plain(product_reference(&product()?)?),
        Target::LaplaceI => {
            let (lp, sign) = laplace()?;
            Outcome::Quadrature(laplace_integral(&lp, sign, tol)?)
        }
        Target::LaplaceClosed => {
            let (lp, sign) = laplace()?;
            Outcome::Plain(laplace_closed(&lp, sign)?)
        }
        Target::MehlerKernel => Outcome::Series(mehler_kernel_series(&mehler()?, tol)?),
        Target::MehlerKernelClosed => Outcome::Plain(mehler_kernel_closed(&mehler()?)?),
        Target::SeriesForI => Outcome::Series(series_for_i(p("nu")?, p("X")?, p("Y")?, tol)?),
        Target::SumRuleLhs => Outcome::Series(sum_rule_lhs(&sum_rule()?, tol)?),
        Target::SumRuleRhs => Outcome::Plain(sum_rule_rhs(&sum_rule()?)?),
        Target::GreenSpectral => Outcome::Series(green_spectral(&green()?, tol)?),
        Target::GreenClosed => Outcome::Plain(green_closed(&green()?)?),
        Target::GreenOde => Outcome::Plain(green_ode_oracle(&green()?)?),
        Target::HyperbolicLhs13a => Outcome::Quadrature(lhs_13a(p("alpha")?, p("phi")?, tol)?),
        Target::HyperbolicRhs13a => Outcome::Plain(rhs_13a(p("alpha")?, p("phi")?)?),
        Target::HyperbolicLhs13b => Outcome::Quadrature(lhs_13b(p("alpha")?, p("phi")?, tol)?),
        Target::HyperbolicRhs13b => Outcome::Plain(rhs_13b(p("alpha")?, p("phi")?)?),
        Target::HyperbolicLhs14 => Outcome::Quadrature(lhs_14(p("a")?, p("phi")?, tol)?),
        Target::HyperbolicRhs14 => Outcome::Plain(rhs_14(p("a")?, p("phi")?)?),
    };
    Ok(out)
}

fn print_outcome(out: &Outcome, mut w: impl Write) -> io::Result<()> {
    match out {
        Outcome::Plain(v) => writeln!(w, "{v}"),
        Outcome::Quadrature(r) => writeln!(
            w,
            "{}\nerror_estimate={:e} evaluations={}",
            r.value, r.error_estimate, r.evaluations
        ),
        Outcome::Series(r) => writeln!(
            w,
            "{}\ntail_bound={:e} terms_used={}",
            r.value, r.tail_bound, r.terms_used
        ),
    }
}

fn cmd_eval(args: &EvalArgs) -> ExitCode {
    match evaluate(args) {
        Ok(out) => match print_outcome(&out, io::stdout().lock()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_FAILED)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

type Jobs = Vec<(IdentityId, Vec<Point>)>;

fn plan(args: &VerifyArgs) -> Result<Jobs, String> {
    let overrides = args.overrides();
    if args.identity.eq_ignore_ascii_case("all") {
        for (name, _) in &overrides {
            if !IdentityId::ALL
                .iter()
                .any(|id| id.params().contains(&name.as_str()))
            {
                return Err(format!("no identity takes parameter `{name}`"));
            }
        }
        IdentityId::ALL
            .into_iter()
            .map(|id| {
                let own: Vec<_> = overrides
                    .iter()
                    .filter(|(k, _)| id.params().contains(&k.as_str()))
                    .cloned()
                    .collect();
                build_grid(id, &own)
                    .map(|g| (id, g))
                    .map_err(|e| e.to_string())
            })
            .collect()
    } else {
        let id: IdentityId = args.identity.parse()?;
        let grid = build_grid(id, &overrides).map_err(|e| e.to_string())?;
        Ok(vec![(id, grid)])
    }
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    if let Some(t) = args.tol {
        if !(t > 0.0 && t < 1.0) {
            eprintln!("error: --tol must lie in (0, 1), got {t}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let jobs = match plan(args) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = run_sweep(&jobs, args.tol, threads);
    let stdout = io::stdout().lock();
    let written = match args.format {
        Format::Csv => report.write_csv(stdout),
        Format::Json => report.write_json(stdout),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILED);
    }
    eprintln!("{}", report.summary);
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Verify(args) => cmd_verify(args),
    }
}
