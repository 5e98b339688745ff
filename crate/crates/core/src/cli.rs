//! Command-line front end.
//!
//! Every subcommand emits one report with the keys `command`, `params`,
//! `result`, `warnings` and `verdict`. Exit codes: 0 success, 1 a computed
//! statement failed, 2 bad invocation.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::betti::{betti_table, compare_mrc, theorem1_from_table, MrcDiff, Theorem1Report};
use crate::error::Error;
use crate::exactdims::{bott, mrc_prediction, o, qr_split, t, DimQuery};
use crate::ffla::DEFAULT_PRIME;
use crate::horacesched::{schedule, ReductionTrace};
use crate::maxrank::{verify_omega, verify_sigma, verify_tau, RankReport, TrialConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "horace",
    version,
    about = "Maximal rank at general points, checked exactly over F_p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Section counts, the split of t_n(l) by n, and Bott numbers.
    Dims(DimsArgs),
    /// Rank of an evaluation map at random points.
    Maxrank(MaxrankArgs),
    /// Betti table of the ideal of random points against the minimal prediction.
    Betti(BettiArgs),
    /// Symbolic reduction trace for the tangent bundle.
    Horace(HoraceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DimsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<i64>,
    /// h^q(Omega^P(K)).
    #[arg(long, num_args = 2, value_names = ["P", "K"], allow_hyphen_values = true)]
    omega: Option<Vec<i64>>,
    #[arg(long, default_value_t = 0)]
    q: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    /// H^0(T(l)) at --points points.
    Tangent,
    /// H^0(T(l)) at q points and r/n of a point.
    Tau,
    /// H^0(Omega^p(k)) at --points points.
    Omega,
}

#[derive(Debug, Args)]
struct MaxrankArgs {
    #[arg(value_enum)]
    map: MapKind,
    #[arg(long)]
    n: u32,
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<i64>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
    #[arg(long)]
    points: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BettiArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    points: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct HoraceArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, allow_hyphen_values = true)]
    ell: i64,
    /// Also write the full trace as JSON to this file.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Serialize)]
struct Report<R: Serialize> {
    command: &'static str,
    params: Value,
    result: R,
    warnings: Vec<String>,
    verdict: String,
}

/// A rendered report and its exit code.
struct Outcome {
    json: String,
    csv: String,
    text: String,
    code: i32,
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Overflow(_) => Failure::Usage(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// Parses `args` (program name first), runs the command and writes the report
/// to `out` unless `--out` redirects it. Diagnostics go to stderr.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(io::stderr(), "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let (common, outcome) = match &cli.command {
        Command::Dims(a) => (&a.common, cmd_dims(a)),
        Command::Maxrank(a) => (&a.common, cmd_maxrank(a)),
        Command::Betti(a) => (&a.common, cmd_betti(a)),
        Command::Horace(a) => (&a.common, cmd_horace(a)),
    };
    match outcome.and_then(|o| emit(common, &o, out).map(|_| o.code)) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Failed(m)) => {
            eprintln!("error: {m}");
            EXIT_FAILED
        }
    }
}

fn emit(common: &Common, o: &Outcome, out: &mut dyn Write) -> Res<()> {
    let body = match common.format {
        Format::Json => &o.json,
        Format::Csv => &o.csv,
        Format::Text => &o.text,
    };
    match &common.out {
        Some(path) => write_file(path, body),
        None => Ok(out.write_all(body.as_bytes())?),
    }
}

fn write_file(path: &Path, body: &str) -> Res<()> {
    File::create(path)
        .and_then(|mut f| f.write_all(body.as_bytes()))
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn trial_config(c: &Common) -> Res<TrialConfig> {
    Ok(TrialConfig::new(c.prime, c.trials, c.seed)?)
}

fn common_params(c: &Common) -> Value {
    json!({ "prime": c.prime, "seed": c.seed, "trials": c.trials })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn to_json<R: Serialize>(report: &Report<R>) -> Res<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Failure::Failed(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Res<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Failed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Failed(e.to_string()))
}

#[derive(Debug, Serialize)]
struct DimsResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    o: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bott: Option<u64>,
}

fn cmd_dims(a: &DimsArgs) -> Res<Outcome> {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be >= 1".into()));
    }
    if a.ell.is_none() && a.omega.is_none() {
        return Err(Failure::Usage("dims needs --ell or --omega P K".into()));
    }
    let mut res = DimsResult {
        o: None,
        t: None,
        q: None,
        r: None,
        bott: None,
    };
    let mut params = json!({ "n": a.n, "ell": a.ell, "q": a.q });
    if let Some(l) = a.ell {
        let split = qr_split(a.n, l)?;
        res.o = Some(o(a.n, l)?);
        res.t = Some(t(a.n, l)?);
        res.q = Some(split.q);
        res.r = Some(split.r);
    }
    if let Some(pk) = &a.omega {
        let p =
            u32::try_from(pk[0]).map_err(|_| Failure::Usage("--omega P must be >= 0".into()))?;
        let query = DimQuery::new(a.n, p, pk[1], a.q)?;
        res.bott = Some(bott(query.n, query.p, query.k, query.q)?);
        params = merge(params, json!({ "omega": { "p": p, "k": pk[1] } }));
    }

    let fields = [
        ("o", res.o),
        ("t", res.t),
        ("q", res.q),
        ("r", res.r),
        ("bott", res.bott),
    ];
    let present: Vec<(&str, u64)> = fields
        .iter()
        .filter_map(|(k, v)| v.map(|v| (*k, v)))
        .collect();
    let rows: Vec<Vec<String>> = present
        .iter()
        .map(|(k, v)| vec![k.to_string(), v.to_string()])
        .collect();
    let text: String = present
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    let report = Report {
        command: "dims",
        params: merge(common_params(&a.common), params),
        result: res,
        warnings: Vec::new(),
        verdict: "ok".into(),
    };
    Ok(Outcome {
        json: to_json(&report)?,
        csv: to_csv(&["quantity", "value"], &rows)?,
        text,
        code: EXIT_OK,
    })
}

fn require<T>(v: Option<T>, flag: &str, map: &str) -> Res<T> {
    v.ok_or_else(|| Failure::Usage(format!("maxrank {map} requires {flag}")))
}

fn cmd_maxrank(a: &MaxrankArgs) -> Res<Outcome> {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be >= 1".into()));
    }
    let cfg = trial_config(&a.common)?;
    let (name, params, report) = match a.map {
        MapKind::Tangent => {
            let l = require(a.ell, "--ell", "tangent")?;
            let pts = require(a.points, "--points", "tangent")?;
            let r = verify_sigma(a.n, l, pts, &cfg)?;
            ("tangent", json!({ "n": a.n, "ell": l, "points": pts }), r)
        }
        MapKind::Tau => {
            let l = require(a.ell, "--ell", "tau")?;
            let r = verify_tau(a.n, l, &cfg)?;
            ("tau", json!({ "n": a.n, "ell": l }), r)
        }
        MapKind::Omega => {
            let p = require(a.p, "--p", "omega")?;
            let k = require(a.k, "--k", "omega")?;
            let pts = require(a.points, "--points", "omega")?;
            let r = verify_omega(a.n, p, k, pts, &cfg)?;
            (
                "omega",
                json!({ "n": a.n, "p": p, "k": k, "points": pts }),
                r,
            )
        }
    };
    let verdict = serde_json::to_value(report.verdict)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let warnings: Vec<String> = report.note.iter().cloned().collect();
    let rows: Vec<Vec<String>> = report
        .achieved
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                i.to_string(),
                r.to_string(),
                report.expected.to_string(),
                report.space_dim.to_string(),
                report.target_dim.to_string(),
            ]
        })
        .collect();
    let text = rank_text(name, &report, &verdict);
    let code = if report.certified() {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    let out = Report {
        command: "maxrank",
        params: merge(
            common_params(&a.common),
            merge(json!({ "map": name }), params),
        ),
        result: report,
        warnings,
        verdict,
    };
    Ok(Outcome {
        json: to_json(&out)?,
        csv: to_csv(
            &["trial", "rank", "expected", "space_dim", "target_dim"],
            &rows,
        )?,
        text,
        code,
    })
}

fn rank_text(name: &str, r: &RankReport, verdict: &str) -> String {
    format!(
        "{name}: rank {}/{} of a {}x{} map after {} trial(s): {verdict}\n",
        r.best(),
        r.expected,
        r.target_dim,
        r.space_dim,
        r.achieved.len()
    )
}

#[derive(Debug, Serialize)]
struct BettiResult {
    computed: crate::betti::BettiTable,
    predicted: crate::betti::BettiTable,
    diff: MrcDiff,
    #[serde(skip_serializing_if = "Option::is_none")]
    theorem1: Option<Theorem1Report>,
}

fn cmd_betti(a: &BettiArgs) -> Res<Outcome> {
    if a.n == 0 || a.points == 0 {
        return Err(Failure::Usage("--n and --points must be >= 1".into()));
    }
    let cfg = trial_config(&a.common)?;
    let computed = betti_table(a.n, a.points, &cfg)?;
    let predicted = mrc_prediction(a.n, a.points)?;
    let diff = compare_mrc(&computed, &predicted)?;
    let theorem1 = if a.n >= 2 {
        Some(theorem1_from_table(&computed)?)
    } else {
        None
    };
    let t1_ok = theorem1.as_ref().is_none_or(|r| r.matches);

    let mut warnings = Vec::new();
    for (p, which) in diff.mismatches() {
        warnings.push(format!("{which}_{p} differs from the minimal prediction"));
    }
    let verdict = match (t1_ok, diff.all_match) {
        (true, true) => "match",
        (true, false) => "theorem1-match",
        (false, _) => "theorem1-mismatch",
    };
    let rows: Vec<Vec<String>> = diff
        .rows
        .iter()
        .map(|r| {
            vec![
                r.p.to_string(),
                r.a_p.to_string(),
                r.b_p.to_string(),
                r.pred_a_p.to_string(),
                r.pred_b_p.to_string(),
                r.matches().to_string(),
            ]
        })
        .collect();
    let mut text = format!("n = {}, points = {}, d = {}\n", a.n, a.points, computed.d);
    text.push_str("p  a_p  b_p  pred_a_p  pred_b_p\n");
    for r in &diff.rows {
        text.push_str(&format!(
            "{:<2} {:<4} {:<4} {:<9} {}{}\n",
            r.p,
            r.a_p,
            r.b_p,
            r.pred_a_p,
            r.pred_b_p,
            if r.matches() { "" } else { " *" }
        ));
    }
    text.push_str(&format!("{verdict}\n"));
    let report = Report {
        command: "betti",
        params: merge(
            common_params(&a.common),
            json!({ "n": a.n, "points": a.points }),
        ),
        result: BettiResult {
            computed,
            predicted,
            diff,
            theorem1,
        },
        warnings,
        verdict: verdict.into(),
    };
    Ok(Outcome {
        json: to_json(&report)?,
        csv: to_csv(&["p", "a_p", "b_p", "pred_a_p", "pred_b_p", "match"], &rows)?,
        text,
        code: if t1_ok { EXIT_OK } else { EXIT_FAILED },
    })
}

fn cmd_horace(a: &HoraceArgs) -> Res<Outcome> {
    let trace = schedule(a.n, a.ell)?;
    if let Some(path) = &a.json {
        let mut body = trace.to_json()?;
        body.push('\n');
        write_file(path, &body)?;
    }
    let verdict = serde_json::to_value(trace.verdict)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let rows: Vec<Vec<String>> = trace
        .nodes
        .iter()
        .map(|n| {
            vec![
                n.id.to_string(),
                n.parent.map(|p| p.to_string()).unwrap_or_default(),
                n.depth.to_string(),
                n.rule.name().to_string(),
                n.leaf.to_string(),
                n.display.clone(),
            ]
        })
        .collect();
    let text = trace_text(&trace, &verdict);
    let code = if trace.certified() {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    let report = Report {
        command: "horace",
        params: json!({ "n": a.n, "ell": a.ell }),
        warnings: trace.warnings(),
        result: trace,
        verdict,
    };
    Ok(Outcome {
        json: to_json(&report)?,
        csv: to_csv(
            &["id", "parent", "depth", "rule", "leaf", "statement"],
            &rows,
        )?,
        text,
        code,
    })
}

fn trace_text(trace: &ReductionTrace, verdict: &str) -> String {
    let mut s = String::new();
    for n in &trace.nodes {
        let pad = "  ".repeat(n.depth);
        s.push_str(&format!("{pad}{} [{}]\n", n.display, n.rule.name()));
        for c in n.violations() {
            s.push_str(&format!(
                "{pad}  violated: {} ({} vs {})\n",
                c.name, c.lhs, c.rhs
            ));
        }
        if let Some(why) = &n.stuck_reason {
            s.push_str(&format!("{pad}  stuck: {why}\n"));
        }
    }
    s.push_str(&format!(
        "{} nodes, depth {} (bound {}), {} warning(s): {verdict}\n",
        trace.nodes.len(),
        trace.depth,
        trace.depth_bound,
        trace.warnings().len()
    ));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(
            std::iter::once("horace").chain(args.iter().copied()),
            &mut buf,
        );
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn dims_ell() {
        let (code, out) = call(&["dims", "--n", "3", "--ell", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["t"], 36);
        assert_eq!(
            (v["result"]["q"].as_u64(), v["result"]["r"].as_u64()),
            (Some(12), Some(0))
        );
        for key in ["command", "params", "result", "warnings", "verdict"] {
            assert!(v.get(key).is_some());
        }
    }

    #[test]
    fn negative_values_parse() {
        let (code, out) = call(&["dims", "--n", "2", "--ell", "-1", "--format", "text"]);
        assert_eq!(code, 0);
        assert!(out.contains("t = 3"));
        let (code, out) = call(&[
            "dims", "--n", "2", "--omega", "1", "0", "--q", "1", "--format", "csv",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "quantity,value\nbott,1\n");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["dims", "--n", "0", "--ell", "1"]).0, 2);
        assert_eq!(call(&["dims", "--n", "2"]).0, 2);
        assert_eq!(call(&["maxrank", "tau", "--n", "2"]).0, 2);
        assert_eq!(
            call(&[
                "maxrank", "omega", "--n", "2", "--p", "1", "--k", "3", "--points", "1", "--prime",
                "65536"
            ])
            .0,
            2
        );
        assert_eq!(call(&["bogus"]).0, 2);
        assert_eq!(
            call(&["betti", "--n", "2", "--points", "3", "--format", "xml"]).0,
            2
        );
    }

    #[test]
    fn help_is_success() {
        let (code, out) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("maxrank"));
    }
}
