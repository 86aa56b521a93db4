use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use misocache::analysis::{compare_savings, evaluate, large_k_gap_trend, LargeKPoint, SavingsComparison};
use misocache::rational::{int, parse_rational};
use misocache::scheme::{suggest_file_size, RequestVector};
use misocache::simulator::{rng, simulate};
use misocache::{Alpha, PerformancePoint, RegimeTag, SystemParams, Value};
use rayon::prelude::*;
use serde::Serialize;

use crate::grid::{parse_int_list, parse_rational_list, GridArgs, AUDIT_GRID};
use crate::output::{self, decimal, exact, human, Format};
use crate::{Cli, CliError, Command, Outcome, SWEEP_HEADER};

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[arg(long = "k")]
    pub k: u64,
    #[arg(long = "n")]
    pub n: u64,
    /// Cache size, e.g. `1`, `3/4` or `31.6`
    #[arg(long = "m")]
    pub m: String,
    /// CSIT exponent in [0, 1]
    #[arg(long, default_value = "0")]
    pub alpha: String,
}

impl PointArgs {
    fn resolve(&self, f: Option<u64>) -> Result<(SystemParams, Alpha)> {
        let m = parse_rational(&self.m)?;
        let params = SystemParams::new(self.k, self.n, m, f)?;
        let alpha: Alpha = self.alpha.parse()?;
        Ok((params, alpha))
    }
}

#[derive(Debug, Clone, Args)]
pub struct GapAuditArgs {
    #[command(flatten)]
    pub grid: GridArgs,

    /// Gap trend for K in 10^3..10^6 with N = K and M = sqrt(K)
    #[arg(long)]
    pub large_k: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DeltaArgs {
    #[command(flatten)]
    pub grid: GridArgs,

    /// Agreement tolerance between closed form and oracle
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub point: PointArgs,

    /// File size in bits
    #[arg(long = "f")]
    pub f: Option<u64>,

    /// Comma separated file indices (0-based), or `random`
    #[arg(long)]
    pub requests: Option<String>,

    /// Print the least valid file size and exit
    #[arg(long)]
    pub suggest_f: bool,

    /// Dump the transmission log, one unit per line
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
}

pub(crate) fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Compute(a) => compute(a, cli.format.unwrap_or(Format::Text)),
        Command::Sweep(g) => sweep(g, cli.format.unwrap_or(Format::Csv)),
        Command::GapAudit(a) if a.large_k => large_k_audit(a, cli.format.unwrap_or(Format::Text)),
        Command::GapAudit(a) => gap_audit(a, cli.format.unwrap_or(Format::Text)),
        Command::Simulate(a) => simulate_cmd(a, cli.seed, cli.format.unwrap_or(Format::Text)),
        Command::Delta(a) => delta(a, cli.format.unwrap_or(Format::Text)),
    }
}

#[derive(Debug, Serialize)]
struct Record {
    #[serde(flatten)]
    params: SystemParams,
    alpha: Alpha,
    #[serde(flatten)]
    point: PerformancePoint,
}

impl Record {
    fn csv_row(&self) -> Vec<String> {
        let p = &self.params;
        let pt = &self.point;
        vec![
            p.k().to_string(),
            p.n().to_string(),
            exact(p.m()),
            exact(p.gamma()),
            exact(p.big_gamma()),
            self.alpha.to_string(),
            pt.regime.name().to_string(),
            pt.regime.eta().map(|e| e.to_string()).unwrap_or_default(),
            decimal(&pt.t),
            decimal(&pt.dof),
            decimal(&pt.t_lb),
            pt.argmax_s.to_string(),
            decimal(&pt.gap),
            pt.delta.as_ref().map(decimal).unwrap_or_default(),
        ]
    }
}

fn evaluate_all(points: Vec<(SystemParams, Alpha)>) -> Result<Vec<Record>> {
    points
        .into_par_iter()
        .map(|(params, alpha)| {
            let point = evaluate(&params, &alpha)?;
            Ok(Record { params, alpha, point })
        })
        .collect()
}

fn compute(args: &PointArgs, format: Format) -> Result<Outcome> {
    let (params, alpha) = args.resolve(None)?;
    let point = evaluate(&params, &alpha)?;
    let rec = Record { params, alpha, point };
    let body = match format {
        Format::Csv => output::csv(&SWEEP_HEADER, [rec.csv_row()]),
        Format::Json => output::json(&rec),
        Format::Text => {
            let (p, pt) = (&rec.params, &rec.point);
            let mut s = String::new();
            let _ = writeln!(
                s,
                "K = {}, N = {}, M = {}, gamma = {}, Gamma = {}, alpha = {}",
                p.k(),
                p.n(),
                exact(p.m()),
                exact(p.gamma()),
                exact(p.big_gamma()),
                rec.alpha
            );
            let _ = writeln!(s, "regime  {}", pt.regime);
            let _ = writeln!(s, "T       {}", human(&pt.t));
            let _ = writeln!(s, "dof     {}", human(&pt.dof));
            let _ = writeln!(s, "T_lb    {} at s = {}", human(&pt.t_lb), pt.argmax_s);
            let _ = writeln!(s, "gap     {}", human(&pt.gap));
            match &pt.delta {
                Some(d) => {
                    let _ = writeln!(s, "delta   {}", human(d));
                }
                None => s.push_str("delta   n/a (Gamma > 1)\n"),
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

fn sweep(grid: &GridArgs, format: Format) -> Result<Outcome> {
    let points = grid.spec(None).map_err(usage)?.points().map_err(usage)?;
    let records = evaluate_all(points)?;
    let body = match format {
        Format::Json => output::json(&records),
        Format::Csv | Format::Text => output::csv(&SWEEP_HEADER, records.iter().map(Record::csv_row)),
    };
    Ok(Outcome::ok(body))
}

fn cmp_values(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => x.cmp(y),
        _ => a.to_f64().total_cmp(&b.to_f64()),
    }
}

fn below_four(v: &Value) -> bool {
    match v {
        Value::Exact(r) => *r < int(4),
        Value::Approx(x) => *x < 4.0,
    }
}

#[derive(Debug, Serialize)]
struct GapAuditReport<'a> {
    points: usize,
    max_gap: &'a Value,
    argmax: &'a Record,
    holds: bool,
}

fn gap_audit(args: &GapAuditArgs, format: Format) -> Result<Outcome> {
    let points = args.grid.spec(Some(&AUDIT_GRID)).map_err(usage)?.points().map_err(usage)?;
    let records = evaluate_all(points)?;
    // first maximum in grid order
    let worst = records
        .iter()
        .reduce(|best, r| if cmp_values(&r.point.gap, &best.point.gap) == Ordering::Greater { r } else { best })
        .expect("grid is never empty");
    let holds = records.iter().all(|r| below_four(&r.point.gap));
    let report = GapAuditReport { points: records.len(), max_gap: &worst.point.gap, argmax: worst, holds };
    let w = &worst.params;
    let body = match format {
        Format::Json => output::json(&report),
        Format::Csv => output::csv(
            &["points", "max_gap", "K", "N", "M", "alpha", "T", "T_lb", "argmax_s", "holds"],
            [vec![
                report.points.to_string(),
                decimal(report.max_gap),
                w.k().to_string(),
                w.n().to_string(),
                exact(w.m()),
                worst.alpha.to_string(),
                decimal(&worst.point.t),
                decimal(&worst.point.t_lb),
                worst.point.argmax_s.to_string(),
                holds.to_string(),
            ]],
        ),
        Format::Text => format!(
            "points   {}\nmax gap  {} at K = {}, N = {}, M = {}, alpha = {}\n         T = {}, T_lb = {} at s = {}\nbound    gap < 4 {}\n",
            report.points,
            human(report.max_gap),
            w.k(),
            w.n(),
            exact(w.m()),
            worst.alpha,
            human(&worst.point.t),
            human(&worst.point.t_lb),
            worst.point.argmax_s,
            if holds { "holds" } else { "VIOLATED" }
        ),
    };
    Ok(Outcome { body, passed: holds, note: None })
}

#[derive(Debug, Serialize)]
struct LargeKReport {
    alpha: Alpha,
    points: Vec<LargeKPoint>,
    max_gap: f64,
    decreasing: bool,
    holds: bool,
}

fn large_k_audit(args: &GapAuditArgs, format: Format) -> Result<Outcome> {
    let ks = parse_int_list(args.grid.k.as_deref().unwrap_or("1000,10000,100000,1000000")).map_err(usage)?;
    if ks.is_empty() {
        return Err(usage("empty K list"));
    }
    let alphas = parse_rational_list(args.grid.alpha.as_deref().unwrap_or("0")).map_err(usage)?;
    let [alpha] = alphas.as_slice() else {
        return Err(usage("--large-k takes a single alpha"));
    };
    let alpha = Alpha::new(alpha.clone())?;
    let points: Vec<LargeKPoint> = ks
        .par_iter()
        .map(|&k| large_k_gap_trend(&[k], &alpha).map(|mut v| v.remove(0)))
        .collect::<std::result::Result<_, _>>()?;
    let max_gap = points.iter().map(|p| p.gap).fold(f64::NEG_INFINITY, f64::max);
    let decreasing = points.windows(2).all(|w| w[1].gap < w[0].gap);
    let holds = points.iter().all(|p| p.gap < 4.0);
    let report = LargeKReport { alpha, points, max_gap, decreasing, holds };
    let body = match format {
        Format::Json => output::json(&report),
        Format::Csv => output::csv(
            &["K", "M", "T", "T_lb", "argmax_s", "gap"],
            report.points.iter().map(|p| {
                vec![
                    p.k.to_string(),
                    p.m.to_string(),
                    p.t.to_string(),
                    p.t_lb.to_string(),
                    p.argmax_s.to_string(),
                    p.gap.to_string(),
                ]
            }),
        ),
        Format::Text => {
            let mut s = format!("alpha = {}, N = K, M = sqrt(K)\n", report.alpha);
            for p in &report.points {
                let _ = writeln!(s, "K = {:<8} gap {:.6}  (T = {:.6}, T_lb = {:.6} at s = {})", p.k, p.gap, p.t, p.t_lb, p.argmax_s);
            }
            let _ = writeln!(s, "max gap     {:.6}", report.max_gap);
            let _ = writeln!(s, "decreasing  {}", if report.decreasing { "yes" } else { "no" });
            let _ = writeln!(s, "bound       gap < 4 {}", if report.holds { "holds" } else { "VIOLATED" });
            s
        }
    };
    Ok(Outcome { body, passed: report.holds, note: None })
}

fn regime_class(r: &RegimeTag) -> &'static str {
    match r {
        RegimeTag::FirstBranch => "first",
        RegimeTag::EtaBranch(_) => "middle",
        _ => "full",
    }
}

#[derive(Debug, Serialize)]
struct DeltaRow {
    #[serde(flatten)]
    params: SystemParams,
    #[serde(flatten)]
    cmp: SavingsComparison,
}

#[derive(Debug, Default, Serialize)]
struct Tally {
    checked: usize,
    agree: usize,
}

#[derive(Debug, Serialize)]
struct DeltaReport {
    tol: f64,
    first: Tally,
    middle: Tally,
    full: Tally,
    rows: Vec<DeltaRow>,
    passed: bool,
}

fn delta(args: &DeltaArgs, format: Format) -> Result<Outcome> {
    let points = args.grid.spec(Some(&AUDIT_GRID)).map_err(usage)?.points().map_err(usage)?;
    if let Some((p, _)) = points.iter().find(|(p, _)| !p.is_small_cache()) {
        return Err(usage(format!(
            "CSIT savings need Gamma <= 1, grid has K={}, N={}, M={}",
            p.k(),
            p.n(),
            exact(p.m())
        )));
    }
    let tol = args.tol;
    let rows: Vec<DeltaRow> = points
        .into_par_iter()
        .map(|(params, alpha)| {
            let cmp = compare_savings(&params, &alpha, tol)?;
            Ok(DeltaRow { params, cmp })
        })
        .collect::<Result<_>>()?;

    let (mut first, mut middle, mut full) = (Tally::default(), Tally::default(), Tally::default());
    for r in &rows {
        let t = match regime_class(&r.cmp.regime) {
            "first" => &mut first,
            "middle" => &mut middle,
            _ => &mut full,
        };
        t.checked += 1;
        t.agree += usize::from(r.cmp.agrees);
    }
    let passed = first.agree == first.checked && full.agree == full.checked;
    let report = DeltaReport { tol, first, middle, full, rows, passed };

    let body = match format {
        Format::Json => output::json(&report),
        Format::Csv => output::csv(
            &["K", "N", "M", "alpha", "regime", "eta", "closed", "oracle", "abs_diff", "agrees"],
            report.rows.iter().map(|r| {
                vec![
                    r.params.k().to_string(),
                    r.params.n().to_string(),
                    exact(r.params.m()),
                    r.cmp.alpha.to_string(),
                    r.cmp.regime.name().to_string(),
                    r.cmp.regime.eta().map(|e| e.to_string()).unwrap_or_default(),
                    decimal(&r.cmp.closed),
                    r.cmp.oracle.to_string(),
                    r.cmp.abs_diff.to_string(),
                    r.cmp.agrees.to_string(),
                ]
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            for (name, t) in [("first branch", &report.first), ("middle branches", &report.middle), ("full CSIT", &report.full)]
            {
                let _ = writeln!(s, "{name:<16} {}/{} agree within {tol:e}", t.agree, t.checked);
            }
            let off: Vec<&DeltaRow> = report.rows.iter().filter(|r| !r.cmp.agrees).collect();
            if !off.is_empty() {
                s.push_str("discrepancies (oracle is authoritative):\n");
                for r in off {
                    let _ = writeln!(
                        s,
                        "  K={} N={} M={} alpha={} {}: closed {} oracle {} diff {:.3e}",
                        r.params.k(),
                        r.params.n(),
                        exact(r.params.m()),
                        r.cmp.alpha,
                        r.cmp.regime,
                        r.cmp.closed.to_f64(),
                        r.cmp.oracle,
                        r.cmp.abs_diff
                    );
                }
            }
            s
        }
    };
    Ok(Outcome { body, passed: report.passed, note: None })
}

fn parse_requests(spec: Option<&str>, params: &SystemParams, seed: u64) -> Result<Option<RequestVector>> {
    match spec {
        None => Ok(None),
        Some("random") => Ok(Some(RequestVector::random(params, &mut rng(seed)))),
        Some(list) => {
            let files = list
                .split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| usage(format!("bad request index {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(Some(RequestVector::new(params, files)?))
        }
    }
}

fn simulate_cmd(args: &SimulateArgs, seed: u64, format: Format) -> Result<Outcome> {
    let (params, alpha) = args.point.resolve(None)?;
    if args.suggest_f {
        let f = suggest_file_size(&params, &alpha)?;
        return Ok(Outcome::ok(format!("{f}\n")));
    }
    let f = args.f.ok_or_else(|| usage("--f is required (use --suggest-f for the least valid size)"))?;
    let params = params.with_file_size(f)?;
    let requests = parse_requests(args.requests.as_deref(), &params, seed)?;
    let (report, log) = simulate(&params, &alpha, seed, requests).map_err(|e| match e {
        misocache::Error::Indivisible { f, base, .. } => {
            usage(format!("{e}; next valid f is {}", f.div_ceil(base) * base))
        }
        other => other.into(),
    })?;
    if let Some(path) = &args.trace {
        output::write_atomic(path, &log.trace())
            .map_err(|e| usage(format!("cannot write trace {}: {e}", path.display())))?;
    }

    let body = match format {
        Format::Json => output::json(&report),
        Format::Csv => output::csv(
            &["K", "N", "M", "alpha", "f", "seed", "user", "requested", "matched", "airtime", "theorem_T"],
            report.users.iter().map(|u| {
                vec![
                    params.k().to_string(),
                    params.n().to_string(),
                    exact(params.m()),
                    alpha.to_string(),
                    f.to_string(),
                    seed.to_string(),
                    u.user.to_string(),
                    u.requested.to_string(),
                    u.matched.to_string(),
                    exact(&report.airtime),
                    exact(&report.theorem_t),
                ]
            }),
        ),
        Format::Text => {
            let mut s = format!(
                "K = {}, N = {}, M = {}, alpha = {}, f = {f}, seed = {seed}\n",
                params.k(),
                params.n(),
                exact(params.m()),
                alpha
            );
            let reqs: Vec<String> = report.requests.as_slice().iter().map(u64::to_string).collect();
            let _ = writeln!(s, "requests  {}", reqs.join(","));
            let _ = writeln!(s, "units     {} XOR, {} MAT, {} ZF", report.xor_units, report.common_units, report.zf_units);
            let _ = writeln!(
                s,
                "airtime   {} ({} the closed-form T {})",
                human(&Value::Exact(report.airtime.clone())),
                if report.airtime_matches { "equals" } else { "DIFFERS from" },
                exact(&report.theorem_t)
            );
            for u in &report.users {
                let _ = writeln!(s, "user {:<4} file {:<4} {}", u.user, u.requested, if u.matched { "ok" } else { "MISMATCH" });
            }
            for v in &report.coverage.violations {
                let _ = writeln!(s, "coverage  {v}");
            }
            let _ = writeln!(s, "result    {}", if report.success { "success" } else { "FAILURE" });
            s
        }
    };
    let note = (!report.success).then(|| "error: simulation did not verify".to_string());
    Ok(Outcome { body, passed: report.success, note })
}
