//! Command-line front end. [`run`] takes argv and two sinks so it can be
//! driven from tests; data goes to stdout (or `--output`), logs to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channels::NoiseModel;
use crate::error::{Error, Result};
use crate::metrics::closed_form::{combined_deviation_published, combined_fidelity_published};
use crate::metrics::{
    evaluate, haar_sample, k_star, simulated_map, AverageMethod, Evaluation, Resource, ScoreRecord,
};
use crate::states::SchmidtParam;
use crate::sweep::{
    find_alpha_cl, full_precision, linear_grid, reproduce_table1, sweep_alpha, write_csv,
    write_json, Tabular, Threshold, DEFAULT_TABLE_KS, PUBLISHED_P,
};
use crate::teleport::{input_fidelity_form, ChainSpec};

#[derive(Debug, Parser)]
#[command(
    name = "telescore",
    version,
    about = "Score teleportation resources by F, D and tau_k = F - k D"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// F, D and tau_k for one resource.
    Score(ScoreArgs),
    /// Rows of F, D and tau_k over an alpha grid.
    Sweep(SweepArgs),
    /// Closed forms against quadrature and Monte Carlo.
    Verify(VerifyArgs),
    /// Global-depolarizing crossovers alpha_n^k against the published table.
    Table1(TableArgs),
    /// F_n, D_n and tau_k for an n-link chain.
    Chain(ChainArgs),
    /// Sensitivity cutoff k* = min F/D over alpha.
    Kstar(KstarArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodKind {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,
    /// Write data here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MethodArgs {
    #[arg(long, value_enum, default_value_t = MethodKind::ClosedForm)]
    method: MethodKind,
    /// Gauss-Legendre and trapezoid nodes per axis.
    #[arg(long, default_value_t = AverageMethod::DEFAULT_NODES)]
    nodes: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl MethodArgs {
    fn method(&self) -> AverageMethod {
        match self.method {
            MethodKind::ClosedForm => AverageMethod::ClosedForm,
            MethodKind::Quadrature => AverageMethod::quadrature(self.nodes),
            MethodKind::MonteCarlo => AverageMethod::MonteCarlo {
                samples: self.samples,
                seed: self.seed,
            },
        }
    }
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long, value_parser = NoiseModel::from_str, default_value = "noiseless")]
    model: NoiseModel,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    /// Chain length; 1 is a single link.
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy)]
struct GridSpec {
    lo: f64,
    hi: f64,
    n: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, found `{s}`"));
        };
        let num = |name: &str, v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("grid {name} `{v}` is not a number"))
        };
        Ok(GridSpec {
            lo: num("start", lo)?,
            hi: num("end", hi)?,
            n: n.trim()
                .parse()
                .map_err(|_| format!("grid size `{n}` is not a non-negative integer"))?,
        })
    }
}

impl GridSpec {
    fn points(&self) -> Result<Vec<f64>> {
        linear_grid(self.lo, self.hi, self.n)
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_parser = NoiseModel::from_str)]
    model: NoiseModel,
    #[arg(long, default_value = "0:0.5:51")]
    alpha_grid: GridSpec,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,2.5,3,4")]
    k_list: Vec<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_parser = NoiseModel::from_str)]
    model: NoiseModel,
    #[arg(long, default_value = "0:0.5:11")]
    alpha_grid: GridSpec,
    #[arg(long, default_value_t = AverageMethod::DEFAULT_NODES)]
    nodes: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value_t = PUBLISHED_P)]
    p: f64,
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<f64>>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_parser = NoiseModel::from_str, default_value = "noiseless")]
    model: NoiseModel,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,2.5,3,4")]
    k_list: Vec<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct KstarArgs {
    #[arg(long, value_parser = NoiseModel::from_str)]
    model: NoiseModel,
    /// Restrict alpha to where F > 2/3.
    #[arg(long, conflicts_with = "range")]
    nonclassical: bool,
    /// Alpha range `lo:hi` within [0, 1/2].
    #[arg(long)]
    range: Option<RangeSpec>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy)]
struct RangeSpec(f64, f64);

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, found `{s}`"))?;
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("range bound `{v}` is not a number"))
        };
        Ok(RangeSpec(num(lo)?, num(hi)?))
    }
}

/// Runs the CLI and returns the process exit code: 0 on success, 2 for
/// argument errors, 1 for numerical or I/O failures.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. }
        | Error::ModelSpec { .. }
        | Error::EmptyGrid
        | Error::InvalidGrid => 2,
        _ => 1,
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let (body, out) = match command {
        Command::Score(a) => (score(&a, stderr)?, a.out),
        Command::Sweep(a) => (sweep(&a)?, a.out),
        Command::Verify(a) => (verify(&a, stderr)?, a.out),
        Command::Table1(a) => (table1(&a)?, a.out),
        Command::Chain(a) => (chain(&a)?, a.out),
        Command::Kstar(a) => (kstar(&a)?, a.out),
    };
    match out.output {
        Some(path) => fs::write(&path, &body).map_err(|source| Error::Io { path, source }),
        None => stdout.write_all(&body).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn log_method(method: AverageMethod, stderr: &mut dyn Write) {
    if let AverageMethod::MonteCarlo { samples, seed } = method {
        let _ = writeln!(stderr, "monte carlo: {samples} samples, seed {seed}");
    }
}

/// `%g`-style formatting with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

/// Aligned table; numeric cells shown with six significant digits.
fn human_table<T: Tabular>(items: &[T]) -> String {
    let cells: Vec<Vec<String>> = items
        .iter()
        .map(|it| {
            it.fields()
                .into_iter()
                .map(|f| match f.parse::<f64>() {
                    Ok(x) if !f.is_empty() => sig6(x),
                    _ if f.is_empty() => "-".into(),
                    _ => f,
                })
                .collect()
        })
        .collect();
    let mut widths: Vec<usize> = T::HEADER.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |row: Vec<&str>| {
        let padded: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(T::HEADER.to_vec());
    for row in &cells {
        s += &line(row.iter().map(String::as_str).collect());
    }
    s
}

fn render<T: Tabular + Serialize>(items: &[T], format: OutputFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Human => buf.extend(human_table(items).into_bytes()),
        OutputFormat::Csv => write_csv(items, &mut buf)?,
        OutputFormat::Json => write_json(items, &mut buf)?,
    }
    Ok(buf)
}

#[derive(Debug, Clone, Serialize)]
struct ScoreLine {
    kind: &'static str,
    params: String,
    alpha: f64,
    n: u32,
    route: &'static str,
    #[serde(flatten)]
    record: ScoreRecord,
    #[serde(rename = "F_std_error")]
    f_std_error: Option<f64>,
    #[serde(rename = "D_std_error")]
    d_std_error: Option<f64>,
}

impl ScoreLine {
    fn new(model: &NoiseModel, alpha: f64, n: u32, e: &Evaluation, k: f64) -> Result<Self> {
        Ok(ScoreLine {
            kind: model.kind_name(),
            params: model.params_string(),
            alpha,
            n,
            route: e.route.as_str(),
            record: ScoreRecord::new(e.fidelity, e.deviation, k)?,
            f_std_error: e.std_error.map(|s| s.0),
            d_std_error: e.std_error.map(|s| s.1),
        })
    }
}

impl Tabular for ScoreLine {
    const HEADER: &'static [&'static str] = &[
        "kind",
        "params",
        "alpha",
        "n",
        "k",
        "F",
        "D",
        "tau",
        "tau_classical",
        "quantum_useful",
        "route",
        "F_std_error",
        "D_std_error",
    ];

    fn fields(&self) -> Vec<String> {
        let r = &self.record;
        let opt = |x: Option<f64>| x.map(full_precision).unwrap_or_default();
        vec![
            self.kind.to_string(),
            self.params.clone(),
            full_precision(self.alpha),
            self.n.to_string(),
            full_precision(r.k),
            full_precision(r.f),
            full_precision(r.d),
            full_precision(r.tau),
            full_precision(r.tau_classical),
            r.quantum_useful.to_string(),
            self.route.to_string(),
            opt(self.f_std_error),
            opt(self.d_std_error),
        ]
    }
}

fn resource(alpha: f64, n: u32) -> Result<Resource> {
    let a = SchmidtParam::new(alpha)?;
    Ok(if n == 1 {
        Resource::Schmidt(a)
    } else {
        Resource::Chain(ChainSpec::new(n, a)?)
    })
}

fn score(a: &ScoreArgs, stderr: &mut dyn Write) -> Result<Vec<u8>> {
    let method = a.method.method();
    log_method(method, stderr);
    let e = evaluate(&a.model, resource(a.alpha, a.n)?, method)?;
    let line = ScoreLine::new(&a.model, a.alpha, a.n, &e, a.k)?;
    render(&[line], a.out.format)
}

fn sweep(a: &SweepArgs) -> Result<Vec<u8>> {
    let rows = sweep_alpha(&a.model, &a.k_list, &a.alpha_grid.points()?)?;
    render(&rows, a.out.format)
}

fn chain(a: &ChainArgs) -> Result<Vec<u8>> {
    let spec = ChainSpec::new(a.n, SchmidtParam::new(a.alpha)?)?;
    let e = evaluate(&a.model, spec.into(), AverageMethod::ClosedForm)?;
    let lines = a
        .k_list
        .iter()
        .map(|&k| ScoreLine::new(&a.model, a.alpha, a.n, &e, k))
        .collect::<Result<Vec<_>>>()?;
    render(&lines, a.out.format)
}

#[derive(Debug, Clone, Serialize)]
struct KStarLine {
    kind: &'static str,
    params: String,
    alpha_lo: f64,
    alpha_hi: f64,
    k_star: f64,
    alpha: f64,
}

impl Tabular for KStarLine {
    const HEADER: &'static [&'static str] =
        &["kind", "params", "alpha_lo", "alpha_hi", "k_star", "alpha"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.kind.to_string(),
            self.params.clone(),
            full_precision(self.alpha_lo),
            full_precision(self.alpha_hi),
            full_precision(self.k_star),
            full_precision(self.alpha),
        ]
    }
}

fn kstar(a: &KstarArgs) -> Result<Vec<u8>> {
    let (lo, hi) = if a.nonclassical {
        match find_alpha_cl(&a.model)? {
            Threshold::Root { alpha, .. } => (alpha, 0.5),
            Threshold::AlwaysNonclassical => (0.0, 0.5),
            Threshold::AlwaysClassical => {
                return Err(Error::Format {
                    context: "kstar".into(),
                    message: "model never beats the classical fidelity 2/3".into(),
                })
            }
        }
    } else {
        a.range.map_or((0.0, 0.5), |r| (r.0, r.1))
    };
    let ks = k_star(&a.model, (lo, hi))?;
    let line = KStarLine {
        kind: a.model.kind_name(),
        params: a.model.params_string(),
        alpha_lo: lo,
        alpha_hi: hi,
        k_star: ks.k_star,
        alpha: ks.alpha,
    };
    render(&[line], a.out.format)
}

fn table1(a: &TableArgs) -> Result<Vec<u8>> {
    let ks = a
        .k_list
        .clone()
        .unwrap_or_else(|| DEFAULT_TABLE_KS.to_vec());
    let table = reproduce_table1(a.p, &ks)?;
    let mut buf = Vec::new();
    match a.out.format {
        OutputFormat::Human => {
            let published = table
                .published_alpha_cl
                .map_or(String::new(), |v| format!(" (published {v})"));
            buf.extend(format!("alpha_cl = {}{published}\n", sig6(table.alpha_cl)).into_bytes());
            buf.extend(human_table(&table.rows).into_bytes());
            for r in table.discrepancies() {
                let line = format!(
                    "discrepancy: k = {} gives {} but {} is published\n",
                    sig6(r.crossover.k),
                    r.crossover.alpha_nk.map_or("none".into(), sig6),
                    r.published.map_or("marginal".into(), sig6),
                );
                buf.extend(line.into_bytes());
            }
        }
        OutputFormat::Csv => write_csv(&table.rows, &mut buf)?,
        OutputFormat::Json => write_json(&table, &mut buf)?,
    }
    Ok(buf)
}

/// Per-alpha comparison of the catalog against the simulated protocol.
#[derive(Debug, Clone, Serialize)]
struct VerifyRow {
    alpha: f64,
    route: &'static str,
    #[serde(rename = "F_catalog")]
    f_catalog: f64,
    #[serde(rename = "D_catalog")]
    d_catalog: f64,
    #[serde(rename = "F_quadrature")]
    f_quadrature: f64,
    #[serde(rename = "D_quadrature")]
    d_quadrature: f64,
    #[serde(rename = "F_monte_carlo")]
    f_mc: f64,
    #[serde(rename = "F_mc_std_error")]
    f_mc_se: f64,
    #[serde(rename = "D_monte_carlo")]
    d_mc: f64,
    #[serde(rename = "D_mc_std_error")]
    d_mc_se: f64,
    /// Largest per-input formula-vs-simulation gap over sampled inputs.
    per_input_residual: Option<f64>,
    #[serde(rename = "F_published")]
    f_published: Option<f64>,
    #[serde(rename = "D_published")]
    d_published: Option<f64>,
}

impl Tabular for VerifyRow {
    const HEADER: &'static [&'static str] = &[
        "alpha",
        "route",
        "F_catalog",
        "D_catalog",
        "F_quadrature",
        "D_quadrature",
        "F_monte_carlo",
        "F_mc_std_error",
        "D_monte_carlo",
        "D_mc_std_error",
        "per_input_residual",
        "F_published",
        "D_published",
    ];

    fn fields(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(full_precision).unwrap_or_default();
        vec![
            full_precision(self.alpha),
            self.route.to_string(),
            full_precision(self.f_catalog),
            full_precision(self.d_catalog),
            full_precision(self.f_quadrature),
            full_precision(self.d_quadrature),
            full_precision(self.f_mc),
            full_precision(self.f_mc_se),
            full_precision(self.d_mc),
            full_precision(self.d_mc_se),
            opt(self.per_input_residual),
            opt(self.f_published),
            opt(self.d_published),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
struct VerifySummary {
    model: String,
    samples: u64,
    seed: u64,
    max_f_residual: f64,
    max_d_residual: f64,
    max_per_input_residual: Option<f64>,
    /// Largest `|MC - quadrature|` in units of the MC standard error.
    max_mc_z_f: f64,
    max_mc_z_d: f64,
    /// As-published combined-depolarizing residuals; informational only.
    published_f_residual: Option<f64>,
    published_d_residual: Option<f64>,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    summary: VerifySummary,
    rows: Vec<VerifyRow>,
}

/// Catalog-vs-quadrature tolerance used by `verify`.
pub const VERIFY_TOL: f64 = 1e-9;

const PER_INPUT_PROBES: u64 = 200;

// Differences at roundoff level count as agreement whatever the error bar.
fn z_score(diff: f64, se: f64) -> f64 {
    if diff.abs() < 1e-12 {
        0.0
    } else if se > 0.0 {
        diff.abs() / se
    } else {
        f64::INFINITY
    }
}

fn verify(a: &VerifyArgs, stderr: &mut dyn Write) -> Result<Vec<u8>> {
    let model = a.model;
    let quad = AverageMethod::quadrature(a.nodes);
    let mc = AverageMethod::MonteCarlo {
        samples: a.samples,
        seed: a.seed,
    };
    log_method(mc, stderr);
    let rows = a
        .alpha_grid
        .points()?
        .into_iter()
        .map(|alpha| -> Result<VerifyRow> {
            let sp = SchmidtParam::new(alpha)?;
            let r = Resource::Schmidt(sp);
            let cat = evaluate(&model, r, AverageMethod::ClosedForm)?;
            let q = evaluate(&model, r, quad)?;
            let m = evaluate(&model, r, mc)?;
            let (f_se, d_se) = m.std_error.unwrap_or((0.0, 0.0));
            let per_input_residual = match input_fidelity_form(&model, sp) {
                Ok(form) => {
                    let map = simulated_map(&model, r)?;
                    Some(
                        (0..PER_INPUT_PROBES)
                            .map(|i| {
                                let b = haar_sample(a.seed, i);
                                (form.eval(b) - map.fidelity(b)).abs()
                            })
                            .fold(0.0, f64::max),
                    )
                }
                Err(Error::NoClosedForm { .. }) => None,
                Err(e) => return Err(e),
            };
            let (f_published, d_published) = match model {
                NoiseModel::CombinedDepolarizing { p, p1, p2 } => (
                    Some(combined_fidelity_published(sp, p, p1, p2)),
                    combined_deviation_published(sp, p, p1, p2),
                ),
                _ => (None, None),
            };
            Ok(VerifyRow {
                alpha,
                route: cat.route.as_str(),
                f_catalog: cat.fidelity,
                d_catalog: cat.deviation,
                f_quadrature: q.fidelity,
                d_quadrature: q.deviation,
                f_mc: m.fidelity,
                f_mc_se: f_se,
                d_mc: m.deviation,
                d_mc_se: d_se,
                per_input_residual,
                f_published,
                d_published,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let max = |f: &dyn Fn(&VerifyRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let max_opt =
        |f: &dyn Fn(&VerifyRow) -> Option<f64>| rows.iter().filter_map(f).reduce(f64::max);
    let max_f_residual = max(&|r| (r.f_catalog - r.f_quadrature).abs());
    let max_d_residual = max(&|r| (r.d_catalog - r.d_quadrature).abs());
    let max_per_input_residual = max_opt(&|r| r.per_input_residual);
    let pass = max_f_residual < VERIFY_TOL
        && max_d_residual < VERIFY_TOL
        && max_per_input_residual.is_none_or(|r| r < VERIFY_TOL);
    let summary = VerifySummary {
        model: model.to_string(),
        samples: a.samples,
        seed: a.seed,
        max_f_residual,
        max_d_residual,
        max_per_input_residual,
        max_mc_z_f: max(&|r| z_score(r.f_mc - r.f_quadrature, r.f_mc_se)),
        max_mc_z_d: max(&|r| z_score(r.d_mc - r.d_quadrature, r.d_mc_se)),
        published_f_residual: max_opt(&|r| r.f_published.map(|v| (v - r.f_quadrature).abs())),
        published_d_residual: max_opt(&|r| r.d_published.map(|v| (v - r.d_quadrature).abs())),
        pass,
    };

    let mut buf = Vec::new();
    match a.out.format {
        OutputFormat::Human => {
            buf.extend(human_table(&rows).into_bytes());
            buf.extend(human_summary(&summary).into_bytes());
        }
        OutputFormat::Csv => {
            write_csv(&rows, &mut buf)?;
            let _ = stderr.write_all(human_summary(&summary).as_bytes());
        }
        OutputFormat::Json => write_json(
            &VerifyReport {
                summary: summary.clone(),
                rows,
            },
            &mut buf,
        )?,
    }
    if pass {
        Ok(buf)
    } else {
        // Still show what was computed before failing.
        let _ = stderr.write_all(&buf);
        Err(Error::Format {
            context: "verify".into(),
            message: format!(
                "catalog disagrees with quadrature beyond {VERIFY_TOL:e} (F {:e}, D {:e})",
                summary.max_f_residual, summary.max_d_residual
            ),
        })
    }
}

fn human_summary(s: &VerifySummary) -> String {
    let opt = |x: Option<f64>| x.map_or("-".to_string(), sig6);
    let mut out = format!(
        "model {}\nmax |F catalog - quadrature| = {}\nmax |D catalog - quadrature| = {}\n\
         max per-input residual = {}\nmax Monte Carlo z (F, D) = {}, {} ({} samples, seed {})\n",
        s.model,
        sig6(s.max_f_residual),
        sig6(s.max_d_residual),
        opt(s.max_per_input_residual),
        sig6(s.max_mc_z_f),
        sig6(s.max_mc_z_d),
        s.samples,
        s.seed,
    );
    if s.published_f_residual.is_some() {
        out += &format!(
            "as-published F residual = {}, D residual = {} (not checked)\n",
            opt(s.published_f_residual),
            opt(s.published_d_residual)
        );
    }
    out += if s.pass { "PASS\n" } else { "FAIL\n" };
    out
}
