//! Identity verification sweeps: one [`VerificationRecord`] per grid point,
//! with CSV and JSON reports whose bytes depend only on the inputs.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::glasser::{
    laplace_closed, laplace_integral, product_reference, product_via_integral, LaplaceParams,
    LaplaceSign, ProductQuery,
};
use crate::green::{green_closed, green_spectral, GreenQuery};
use crate::hyperbolic::{erfc_identity_13a, erfc_identity_13b, k_identity_14, HyperbolicQuery};
use crate::mehler::{
    mehler_kernel_closed, mehler_kernel_series, sum_rule_lhs, sum_rule_rhs, MehlerPoint,
    SumRuleQuery,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PCF_MAX_THREADS";

/// Below this magnitude of the right side a record is judged on `abs_err`.
const TINY_RHS: f64 = 1e-280;
const ABS_FLOOR: f64 = 1e-300;

/// Column order used when records of several identities share one table.
const CANONICAL_PARAMS: [&str; 12] = [
    "nu", "x", "y", "a", "b", "alpha", "phi", "X", "Y", "u", "lambda", "xprime",
];

/// One grid point: parameter names with their values, in column order.
pub type Point = Vec<(&'static str, f64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    Eq3,
    Eq8Eq9,
    Eq10,
    Eq11,
    Eq12,
    Eq13a,
    Eq13b,
    Eq14,
    Eq15,
}

impl IdentityId {
    pub const ALL: [IdentityId; 9] = [
        IdentityId::Eq3,
        IdentityId::Eq8Eq9,
        IdentityId::Eq10,
        IdentityId::Eq11,
        IdentityId::Eq12,
        IdentityId::Eq13a,
        IdentityId::Eq13b,
        IdentityId::Eq14,
        IdentityId::Eq15,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::Eq3 => "EQ3",
            IdentityId::Eq8Eq9 => "EQ8_EQ9",
            IdentityId::Eq10 => "EQ10",
            IdentityId::Eq11 => "EQ11",
            IdentityId::Eq12 => "EQ12",
            IdentityId::Eq13a => "EQ13A",
            IdentityId::Eq13b => "EQ13B",
            IdentityId::Eq14 => "EQ14",
            IdentityId::Eq15 => "EQ15",
        }
    }

    /// Parameter names, in report column order.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            IdentityId::Eq3 => &["X", "Y", "u"],
            IdentityId::Eq8Eq9 => &["lambda", "x", "xprime"],
            IdentityId::Eq10 | IdentityId::Eq15 => &["nu", "x", "y"],
            IdentityId::Eq11 | IdentityId::Eq12 => &["nu", "a", "b"],
            IdentityId::Eq13a | IdentityId::Eq13b => &["alpha", "phi"],
            IdentityId::Eq14 => &["a", "phi"],
        }
    }

    /// Pass threshold on the relative discrepancy.
    pub fn default_tol(self) -> f64 {
        match self {
            IdentityId::Eq3 => 1e-9,
            IdentityId::Eq8Eq9 => 1e-6,
            IdentityId::Eq10
            | IdentityId::Eq11
            | IdentityId::Eq12
            | IdentityId::Eq13a
            | IdentityId::Eq13b => 1e-8,
            IdentityId::Eq14 => 1e-7,
            IdentityId::Eq15 => 5e-7,
        }
    }

    /// Denominator floor of `rel_err`. The kernel series is compared on the
    /// mixed scale `1 + |value|` because its terms reach `e^{(X²+Y²)/2}`
    /// while the kernel itself can be far smaller.
    pub fn scale_floor(self) -> f64 {
        match self {
            IdentityId::Eq3 => 1.0,
            _ => ABS_FLOOR,
        }
    }

    /// Default sweep, as range specs per parameter.
    pub fn default_grid(self) -> &'static [(&'static str, &'static str)] {
        match self {
            IdentityId::Eq3 => &[("X", "-3:3:5"), ("Y", "-3:3:5"), ("u", "-0.9:0.9:7")],
            IdentityId::Eq8Eq9 => &[
                ("lambda", "-3,-1,0,0.5"),
                ("x", "1,1.5,2"),
                ("xprime", "-1,0,0.5"),
            ],
            IdentityId::Eq10 => &[
                ("nu", "0.5,1,1.5,2.5"),
                ("x", "1.5,2,3,4"),
                ("y", "0.3,0.7,1.2"),
            ],
            IdentityId::Eq11 | IdentityId::Eq12 => {
                &[("nu", "0.5,1,2.5"), ("a", "2.5,4"), ("b", "0.5,2")]
            }
            IdentityId::Eq13a | IdentityId::Eq13b => {
                &[("alpha", "log:0.3:4:5"), ("phi", "log:0.1:3:5")]
            }
            IdentityId::Eq14 => &[("a", "log:0.3:4:5"), ("phi", "log:0.1:3:5")],
            IdentityId::Eq15 => &[("nu", "0.5,1,2"), ("x", "2,2.5,3"), ("y", "-0.5,0.5,1")],
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown identity `{s}`"))
    }
}

impl Serialize for IdentityId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Skipped,
}

/// Ordered parameter list serialized as a JSON object.
#[derive(Debug, Clone, PartialEq)]
pub struct Params(pub Vec<(&'static str, f64)>);

impl Params {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// One both-sides evaluation of one identity at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub identity_id: IdentityId,
    pub params: Params,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub status: Status,
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationRecord {
    /// Builds a judged record: `abs_err = |lhs − rhs|`,
    /// `rel_err = abs_err / max(|lhs|, |rhs|, floor)`.
    pub fn compare(
        id: IdentityId,
        params: Vec<(&'static str, f64)>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        evaluations: usize,
    ) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = abs_err / lhs.abs().max(rhs.abs()).max(id.scale_floor());
        let passed = if rhs.abs() < TINY_RHS {
            abs_err <= ABS_FLOOR || rel_err <= tolerance
        } else {
            rel_err <= tolerance
        };
        let passed = passed && lhs.is_finite() && rhs.is_finite();
        Self {
            identity_id: id,
            params: Params(params),
            lhs,
            rhs,
            abs_err,
            rel_err,
            tolerance,
            passed,
            status: if passed {
                Status::Passed
            } else {
                Status::Failed
            },
            evaluations: evaluations.max(1),
            note: None,
        }
    }

    fn unjudged(
        id: IdentityId,
        params: Vec<(&'static str, f64)>,
        status: Status,
        note: String,
    ) -> Self {
        Self {
            identity_id: id,
            params: Params(params),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            status,
            evaluations: 1,
            note: Some(note),
        }
    }

    pub fn skipped(id: IdentityId, params: Vec<(&'static str, f64)>, reason: String) -> Self {
        Self::unjudged(id, params, Status::Skipped, reason)
    }

    pub fn failed(id: IdentityId, params: Vec<(&'static str, f64)>, reason: String) -> Self {
        Self::unjudged(id, params, Status::Failed, reason)
    }
}

/// Tolerance handed to the numerical routines for a pass threshold `tol`.
pub fn working_tol(tol: f64) -> f64 {
    (tol * 1e-2).clamp(1e-13, 1e-4)
}

fn product_record(
    id: IdentityId,
    params: Vec<(&'static str, f64)>,
    tol: f64,
) -> Result<VerificationRecord> {
    let p = Params(params.clone());
    let get = |k| p.get(k).unwrap_or(f64::NAN);
    let work = working_tol(tol);
    match id {
        IdentityId::Eq10 => {
            let q = ProductQuery::new(get("nu"), get("x"), get("y"))?;
            let lhs = product_via_integral(&q, work)?;
            let rhs = product_reference(&q)?;
            Ok(VerificationRecord::compare(
                id,
                params,
                lhs.value,
                rhs,
                tol,
                lhs.evaluations,
            ))
        }
        IdentityId::Eq11 | IdentityId::Eq12 => {
            let sign = if id == IdentityId::Eq11 {
                LaplaceSign::Plus
            } else {
                LaplaceSign::Minus
            };
            let lp = LaplaceParams::new(get("nu"), get("a"), get("b"))?;
            let lhs = laplace_integral(&lp, sign, work)?;
            let rhs = laplace_closed(&lp, sign)?;
            Ok(VerificationRecord::compare(
                id,
                params,
                lhs.value,
                rhs,
                tol,
                lhs.evaluations,
            ))
        }
        IdentityId::Eq3 => {
            let mp = MehlerPoint::new(get("X"), get("Y"), get("u"))?;
            let lhs = mehler_kernel_series(&mp, work)?;
            let rhs = mehler_kernel_closed(&mp)?;
            Ok(VerificationRecord::compare(
                id,
                params,
                lhs.value,
                rhs,
                tol,
                lhs.terms_used,
            ))
        }
        IdentityId::Eq8Eq9 => {
            let gq = GreenQuery::new(get("lambda"), get("x"), get("xprime"))?;
            let rhs = green_closed(&gq)?;
            let lhs = green_spectral(&gq, work)?;
            Ok(VerificationRecord::compare(
                id,
                params,
                lhs.value,
                rhs,
                tol,
                lhs.terms_used,
            ))
        }
        IdentityId::Eq15 => {
            let sq = SumRuleQuery::new(get("nu"), get("x"), get("y"))?;
            let lhs = sum_rule_lhs(&sq, work)?;
            let rhs = sum_rule_rhs(&sq)?;
            Ok(VerificationRecord::compare(
                id,
                params,
                lhs.value,
                rhs,
                tol,
                lhs.terms_used,
            ))
        }
        IdentityId::Eq13a | IdentityId::Eq13b => {
            let hq = HyperbolicQuery::erfc(get("alpha"), get("phi"))?;
            let mut r = if id == IdentityId::Eq13a {
                erfc_identity_13a(&hq, work)?
            } else {
                erfc_identity_13b(&hq, work)?
            };
            rejudge(&mut r, tol);
            Ok(r)
        }
        IdentityId::Eq14 => {
            let hq = HyperbolicQuery::bessel(get("a"), get("phi"))?;
            let mut r = k_identity_14(&hq, work)?;
            rejudge(&mut r, tol);
            Ok(r)
        }
    }
}

fn rejudge(r: &mut VerificationRecord, tol: f64) {
    *r = VerificationRecord::compare(
        r.identity_id,
        r.params.0.clone(),
        r.lhs,
        r.rhs,
        tol,
        r.evaluations,
    );
}

/// Evaluates one identity at one point. Domain violations become skipped
/// records and numerical failures become failed records.
pub fn evaluate_point(
    id: IdentityId,
    params: Vec<(&'static str, f64)>,
    tol: f64,
) -> VerificationRecord {
    match product_record(id, params.clone(), tol) {
        Ok(r) => r,
        Err(e @ Error::Domain { .. }) | Err(e @ Error::Pole { .. }) => {
            VerificationRecord::skipped(id, params, e.to_string())
        }
        Err(e) => VerificationRecord::failed(id, params, e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("malformed range spec `{0}`: {1}")]
    Malformed(String, &'static str),
    #[error("unknown parameter `{param}` for {id}")]
    UnknownParam { id: IdentityId, param: String },
}

/// Parses a range spec: comma-separated items, each a number, `lo:hi:count`
/// (inclusive, linear) or `log:lo:hi:count` (inclusive, geometric).
pub fn parse_range(spec: &str) -> std::result::Result<Vec<f64>, GridError> {
    let bad = |why| GridError::Malformed(spec.to_string(), why);
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(bad("empty item"));
        }
        let (log, body) = match item.strip_prefix("log:") {
            Some(rest) => (true, rest),
            None => (false, item),
        };
        let parts: Vec<&str> = body.split(':').collect();
        match parts.as_slice() {
            [v] if !log => out.push(v.parse::<f64>().map_err(|_| bad("not a number"))?),
            [lo, hi, count] => {
                let lo: f64 = lo.parse().map_err(|_| bad("bad lower bound"))?;
                let hi: f64 = hi.parse().map_err(|_| bad("bad upper bound"))?;
                let count: usize = count.parse().map_err(|_| bad("bad count"))?;
                if count == 0 {
                    return Err(bad("count must be positive"));
                }
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(bad("bounds must be finite"));
                }
                if log && !(lo > 0.0 && hi > 0.0) {
                    return Err(bad("log spacing needs positive bounds"));
                }
                for i in 0..count {
                    let f = if count == 1 {
                        0.0
                    } else {
                        i as f64 / (count - 1) as f64
                    };
                    let v = if log {
                        (lo.ln() + f * (hi.ln() - lo.ln())).exp()
                    } else {
                        lo + f * (hi - lo)
                    };
                    // Pin the endpoints exactly.
                    out.push(if i == 0 {
                        lo
                    } else if i + 1 == count {
                        hi
                    } else {
                        v
                    });
                }
            }
            _ => return Err(bad("expected value, lo:hi:count or log:lo:hi:count")),
        }
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    Ok(out)
}

/// Cartesian grid over an identity's parameters; `overrides` replace the
/// default range spec of the named parameters.
pub fn build_grid(
    id: IdentityId,
    overrides: &[(String, String)],
) -> std::result::Result<Vec<Point>, GridError> {
    for (name, _) in overrides {
        if !id.params().contains(&name.as_str()) {
            return Err(GridError::UnknownParam {
                id,
                param: name.clone(),
            });
        }
    }
    let mut axes = Vec::new();
    for &(name, default) in id.default_grid() {
        let spec = overrides
            .iter()
            .rev()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
            .unwrap_or(default);
        axes.push((name, parse_range(spec)?));
    }
    let mut points: Vec<Point> = vec![Vec::new()];
    for (name, values) in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push((*name, v));
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "summary: total={} passed={} failed={} skipped={}",
            self.total, self.passed, self.failed, self.skipped
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub summary: Summary,
    pub records: Vec<VerificationRecord>,
}

impl Report {
    pub fn from_records(records: Vec<VerificationRecord>) -> Self {
        let mut summary = Summary {
            total: records.len(),
            ..Summary::default()
        };
        for r in &records {
            match r.status {
                Status::Passed => summary.passed += 1,
                Status::Failed => summary.failed += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        Self { summary, records }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    /// Header `identity_id,<params…>,lhs,rhs,abs_err,rel_err,passed`; the
    /// parameter columns are the union over the identities present, and the
    /// `passed` column reads `true`, `false` or `skipped`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let columns: Vec<&str> = CANONICAL_PARAMS
            .into_iter()
            .filter(|c| {
                self.records
                    .iter()
                    .any(|r| r.identity_id.params().contains(c))
            })
            .collect();
        let mut w = csv_writer(out);
        let mut header = vec!["identity_id"];
        header.extend(&columns);
        header.extend(["lhs", "rhs", "abs_err", "rel_err", "passed"]);
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.identity_id.as_str().to_string()];
            for c in &columns {
                row.push(r.params.get(c).map(fmt_num).unwrap_or_default());
            }
            row.extend(
                [r.lhs, r.rhs, r.abs_err, r.rel_err]
                    .into_iter()
                    .map(fmt_num),
            );
            row.push(match r.status {
                Status::Passed => "true".to_string(),
                Status::Failed => "false".to_string(),
                Status::Skipped => "skipped".to_string(),
            });
            w.write_record(&row)?;
        }
        w.flush()
    }
}

/// Shortest round-trip form; scientific outside `[1e-4, 1e7)`.
fn fmt_num(v: f64) -> String {
    let m = v.abs();
    if m == 0.0 || !m.is_finite() || (1e-4..1e7).contains(&m) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Thread cap from `PCF_MAX_THREADS`; `None` when unset.
pub fn threads_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            )),
        },
    }
}

/// Evaluates every point of every requested identity. Points run
/// concurrently; records come back in grid order.
pub fn run_sweep(
    jobs: &[(IdentityId, Vec<Point>)],
    tol: Option<f64>,
    threads: Option<usize>,
) -> Report {
    let work: Vec<(IdentityId, Point)> = jobs
        .iter()
        .flat_map(|(id, points)| points.iter().map(move |p| (*id, p.clone())))
        .collect();
    let eval = || -> Vec<VerificationRecord> {
        work.par_iter()
            .map(|(id, p)| evaluate_point(*id, p.clone(), tol.unwrap_or_else(|| id.default_tol())))
            .collect()
    };
    let records = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(eval),
            Err(_) => eval(),
        },
        None => eval(),
    };
    Report::from_records(records)
}
