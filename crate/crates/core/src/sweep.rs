//! Alpha sweeps, classical-threshold and crossover root finding, the
//! depolarizing crossover table, and CSV/JSON export.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::NoiseModel;
use crate::error::{check_range, Error, Result};
use crate::metrics::closed_form::{self as cf, sqrt5};
use crate::metrics::{classical_score, evaluate, tele_score, AverageMethod, CLASSICAL_FIDELITY};
use crate::states::SchmidtParam;
use crate::tolerance::{ROOT_ALPHA_TOL, TABLE_TOL};

/// One `(alpha, k)` point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "RowRecord", try_from = "RowRecord")]
pub struct SweepRow {
    pub alpha: f64,
    pub model: NoiseModel,
    pub k: f64,
    pub f: f64,
    pub d: f64,
    pub tau: f64,
    pub tau_noiseless: f64,
    pub tau_classical: f64,
    /// `F > 2/3`.
    pub nonclassical: bool,
    /// `tau > tau_noiseless`.
    pub beats_noiseless: bool,
}

#[derive(Serialize, Deserialize)]
struct RowRecord {
    alpha: f64,
    kind: String,
    params: String,
    k: f64,
    #[serde(rename = "F")]
    f: f64,
    #[serde(rename = "D")]
    d: f64,
    tau: f64,
    tau_noiseless: f64,
    tau_classical: f64,
    nonclassical: bool,
    beats_noiseless: bool,
}

impl From<SweepRow> for RowRecord {
    fn from(r: SweepRow) -> Self {
        RowRecord {
            alpha: r.alpha,
            kind: r.model.kind_name().to_string(),
            params: r.model.params_string(),
            k: r.k,
            f: r.f,
            d: r.d,
            tau: r.tau,
            tau_noiseless: r.tau_noiseless,
            tau_classical: r.tau_classical,
            nonclassical: r.nonclassical,
            beats_noiseless: r.beats_noiseless,
        }
    }
}

impl TryFrom<RowRecord> for SweepRow {
    type Error = Error;

    fn try_from(r: RowRecord) -> Result<Self> {
        let spec = if r.params.is_empty() {
            r.kind
        } else {
            format!("{}:{}", r.kind, r.params)
        };
        Ok(SweepRow {
            alpha: r.alpha,
            model: spec.parse()?,
            k: r.k,
            f: r.f,
            d: r.d,
            tau: r.tau,
            tau_noiseless: r.tau_noiseless,
            tau_classical: r.tau_classical,
            nonclassical: r.nonclassical,
            beats_noiseless: r.beats_noiseless,
        })
    }
}

impl SweepRow {
    pub fn new(
        alpha: f64,
        model: NoiseModel,
        k: f64,
        f: f64,
        d: f64,
        noiseless: (f64, f64),
    ) -> Result<Self> {
        let tau = tele_score(f, d, k)?;
        let tau_noiseless = tele_score(noiseless.0, noiseless.1, k)?;
        Ok(SweepRow {
            alpha,
            model,
            k,
            f,
            d,
            tau,
            tau_noiseless,
            tau_classical: classical_score(k)?,
            nonclassical: f > CLASSICAL_FIDELITY,
            beats_noiseless: tau > tau_noiseless,
        })
    }

    /// Whether the flags agree with the row's own numbers.
    pub fn flags_consistent(&self) -> bool {
        self.nonclassical == (self.f > CLASSICAL_FIDELITY)
            && self.beats_noiseless == (self.tau > self.tau_noiseless)
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(Error::EmptyGrid),
        1 => Ok(vec![lo]),
        _ => Ok((0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect()),
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let in_range = grid.iter().all(|a| (0.0..=0.5).contains(a));
    let sorted = grid.windows(2).all(|w| w[0] <= w[1]);
    if in_range && sorted {
        Ok(())
    } else {
        Err(Error::InvalidGrid)
    }
}

/// One row per `(alpha, k)`, ordered by alpha then by the order of `ks`.
/// `F` and `D` come from the closed-form catalog (numeric where the catalog
/// has no entry).
pub fn sweep_alpha(model: &NoiseModel, ks: &[f64], grid: &[f64]) -> Result<Vec<SweepRow>> {
    check_grid(grid)?;
    for &k in ks {
        check_range("k", k, 0.0, f64::INFINITY, "k >= 0")?;
    }
    model.validate()?;
    let per_alpha: Vec<Vec<SweepRow>> = grid
        .par_iter()
        .map(|&alpha| {
            let a = SchmidtParam::new(alpha)?;
            let e = evaluate(model, a.into(), AverageMethod::ClosedForm)?;
            let base = (cf::noiseless_fidelity(a), cf::noiseless_deviation(a));
            ks.iter()
                .map(|&k| SweepRow::new(alpha, *model, k, e.fidelity, e.deviation, base))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_alpha.into_iter().flatten().collect())
}

/// Where the average fidelity crosses the classical value 2/3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Threshold {
    /// `at_boundary` marks a root sitting on an end of `[0, 1/2]`.
    Root {
        alpha: f64,
        at_boundary: bool,
    },
    AlwaysClassical,
    AlwaysNonclassical,
}

impl Threshold {
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Threshold::Root { alpha, .. } => Some(alpha),
            _ => None,
        }
    }
}

const BISECTION_STEPS: usize = 60;

/// Decreasing-or-increasing root of `g` on `[lo, hi]` given a sign change.
fn bisect(g: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let g_lo = g(lo)?;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if (g(mid)? > 0.0) == (g_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < ROOT_ALPHA_TOL * 1e-6 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection root of `F(alpha) = 2/3` on `[0, 1/2]`.
pub fn find_alpha_cl(model: &NoiseModel) -> Result<Threshold> {
    let excess = |alpha: f64| -> Result<f64> {
        let a = SchmidtParam::new(alpha)?;
        Ok(evaluate(model, a.into(), AverageMethod::ClosedForm)?.fidelity - CLASSICAL_FIDELITY)
    };
    let (g0, g1) = (excess(0.0)?, excess(0.5)?);
    const EDGE: f64 = 1e-12;
    if g0.abs() <= EDGE {
        return Ok(Threshold::Root {
            alpha: 0.0,
            at_boundary: true,
        });
    }
    if g0 > 0.0 {
        return Ok(Threshold::AlwaysNonclassical);
    }
    if g1.abs() <= EDGE {
        return Ok(Threshold::Root {
            alpha: 0.5,
            at_boundary: true,
        });
    }
    if g1 < 0.0 {
        return Ok(Threshold::AlwaysClassical);
    }
    Ok(Threshold::Root {
        alpha: bisect(excess, 0.0, 0.5)?,
        at_boundary: false,
    })
}

/// Alpha below which global-depolarizing noise beats the noiseless resource
/// at sensitivity `k`, solved two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverResult {
    pub p: f64,
    pub k: f64,
    pub alpha_cl: f64,
    /// The crossover when it lies above `alpha_cl`; `None` is the marginal case.
    pub alpha_nk: Option<f64>,
    /// Crossover from inverting the noiseless fidelity at the crossover
    /// fidelity; `None` when no alpha in `[0, 1/2]` reaches it.
    pub closed_form: Option<f64>,
    pub bisection: Option<f64>,
    /// `|closed_form - bisection|`, zero when both are absent.
    pub route_residual: f64,
    /// `|tau_dep - tau_noiseless|` at the bisection root.
    pub bisection_residual: f64,
}

impl CrossoverResult {
    pub fn routes_agree(&self) -> bool {
        match (self.closed_form, self.bisection) {
            (None, None) => true,
            (Some(_), Some(_)) => self.route_residual <= crate::tolerance::ROUTE_AGREEMENT_TOL,
            _ => false,
        }
    }
}

/// Noiseless average fidelity where the global-depolarizing and noiseless
/// scores meet; independent of `p`.
pub fn crossover_fidelity(k: f64) -> f64 {
    let x = k / sqrt5();
    (0.5 + x) / (1.0 + x)
}

/// Inverse of the noiseless average fidelity on `[0, 1/2]`.
fn invert_noiseless(f: f64) -> Option<f64> {
    let s = 1.5 * f - 1.0;
    if !(0.0..=0.5).contains(&s) {
        return None;
    }
    Some(0.5 * (1.0 - (1.0 - 4.0 * s * s).max(0.0).sqrt()))
}

fn global_dep_alpha_cl(p: f64) -> Result<f64> {
    let model = NoiseModel::global_depolarizing(p)?;
    Ok(match find_alpha_cl(&model)? {
        Threshold::Root { alpha, .. } => alpha,
        Threshold::AlwaysClassical => 0.5,
        Threshold::AlwaysNonclassical => 0.0,
    })
}

/// Crossover `alpha_n^k` for global depolarizing noise with state weight `p`.
pub fn find_alpha_nk(p: f64, k: f64) -> Result<CrossoverResult> {
    check_range("p", p, 0.0, 1.0 - f64::EPSILON, "0 <= p < 1")?;
    check_range("k", k, 0.0, f64::INFINITY, "k >= 0")?;
    let alpha_cl = global_dep_alpha_cl(p)?;

    let gap = |alpha: f64| -> Result<f64> {
        let a = SchmidtParam::new(alpha)?;
        let dep = tele_score(
            cf::global_dep_fidelity(a, p),
            cf::global_dep_deviation(a, p),
            k,
        )?;
        let clean = tele_score(cf::noiseless_fidelity(a), cf::noiseless_deviation(a), k)?;
        Ok(dep - clean)
    };
    // The gap decreases in alpha and is negative at 1/2.
    let bisection = if gap(0.0)? > 0.0 {
        Some(bisect(gap, 0.0, 0.5)?)
    } else {
        None
    };
    let closed_form = invert_noiseless(crossover_fidelity(k)).filter(|&a| a > 0.0);
    let route_residual = match (closed_form, bisection) {
        (Some(c), Some(b)) => (c - b).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    };
    let bisection_residual = match bisection {
        Some(b) => gap(b)?.abs(),
        None => 0.0,
    };
    Ok(CrossoverResult {
        p,
        k,
        alpha_cl,
        alpha_nk: closed_form.filter(|&a| a > alpha_cl),
        closed_form,
        bisection,
        route_residual,
        bisection_residual,
    })
}

/// Published entries of the depolarizing crossover table at `p = 0.7`.
pub const PUBLISHED_P: f64 = 0.7;
pub const PUBLISHED_ALPHA_CL: f64 = 0.012;
pub const PUBLISHED_ENTRIES: [(f64, Option<f64>); 5] = [
    (2.0, None),
    (2.1, Some(0.013)),
    (2.5, Some(0.022)),
    (3.5, Some(0.033)),
    (4.0, Some(0.056)),
];
pub const DEFAULT_TABLE_KS: [f64; 5] = [2.0, 2.1, 2.5, 3.5, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableStatus {
    /// Within three decimals of the published value.
    Matches,
    /// No crossover above `alpha_cl`, as published for `k = 2`.
    Marginal,
    Discrepancy,
    /// `k` or `p` not in the published table.
    Unpublished,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(flatten)]
    pub crossover: CrossoverResult,
    /// Published crossover; `None` for the marginal entry or unpublished rows.
    pub published: Option<f64>,
    pub status: TableStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub p: f64,
    pub alpha_cl: f64,
    pub published_alpha_cl: Option<f64>,
    pub rows: Vec<TableRow>,
}

impl Table1 {
    pub fn discrepancies(&self) -> impl Iterator<Item = &TableRow> {
        self.rows
            .iter()
            .filter(|r| r.status == TableStatus::Discrepancy)
    }
}

fn published(p: f64, k: f64) -> Option<Option<f64>> {
    if p != PUBLISHED_P {
        return None;
    }
    PUBLISHED_ENTRIES
        .iter()
        .find(|(pk, _)| (pk - k).abs() < 1e-12)
        .map(|&(_, v)| v)
}

/// Crossovers for each `k`, compared against the published table when `p`
/// and `k` appear in it.
pub fn reproduce_table1(p: f64, ks: &[f64]) -> Result<Table1> {
    let rows = ks
        .iter()
        .map(|&k| {
            let c = find_alpha_nk(p, k)?;
            let entry = published(p, k);
            let status = match (entry, c.alpha_nk) {
                (None, _) => TableStatus::Unpublished,
                (Some(None), None) => TableStatus::Marginal,
                (Some(Some(v)), Some(a)) if (a - v).abs() <= TABLE_TOL => TableStatus::Matches,
                _ => TableStatus::Discrepancy,
            };
            Ok(TableRow {
                crossover: c,
                published: entry.flatten(),
                status,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1 {
        p,
        alpha_cl: global_dep_alpha_cl(p)?,
        published_alpha_cl: (p == PUBLISHED_P).then_some(PUBLISHED_ALPHA_CL),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Rows with a fixed CSV column order.
pub trait Tabular {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// 17 significant digits.
pub fn full_precision(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt_precision(x: Option<f64>) -> String {
    x.map(full_precision).unwrap_or_default()
}

impl Tabular for SweepRow {
    const HEADER: &'static [&'static str] = &[
        "alpha",
        "kind",
        "params",
        "k",
        "F",
        "D",
        "tau",
        "tau_noiseless",
        "tau_classical",
        "nonclassical",
        "beats_noiseless",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            full_precision(self.alpha),
            self.model.kind_name().to_string(),
            self.model.params_string(),
            full_precision(self.k),
            full_precision(self.f),
            full_precision(self.d),
            full_precision(self.tau),
            full_precision(self.tau_noiseless),
            full_precision(self.tau_classical),
            self.nonclassical.to_string(),
            self.beats_noiseless.to_string(),
        ]
    }
}

impl Tabular for TableRow {
    const HEADER: &'static [&'static str] = &[
        "p",
        "k",
        "alpha_cl",
        "alpha_nk",
        "closed_form",
        "bisection",
        "route_residual",
        "published",
        "status",
    ];

    fn fields(&self) -> Vec<String> {
        let c = &self.crossover;
        let status = match self.status {
            TableStatus::Matches => "matches",
            TableStatus::Marginal => "marginal",
            TableStatus::Discrepancy => "discrepancy",
            TableStatus::Unpublished => "unpublished",
        };
        vec![
            full_precision(c.p),
            full_precision(c.k),
            full_precision(c.alpha_cl),
            opt_precision(c.alpha_nk),
            opt_precision(c.closed_form),
            opt_precision(c.bisection),
            full_precision(c.route_residual),
            opt_precision(self.published),
            status.to_string(),
        ]
    }
}

fn format_error(context: &str, e: impl std::fmt::Display) -> Error {
    Error::Format {
        context: context.to_string(),
        message: e.to_string(),
    }
}

pub fn write_csv<T: Tabular, W: Write>(items: &[T], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let csv_err = |e| format_error("csv export", e);
    w.write_record(T::HEADER).map_err(csv_err)?;
    for item in items {
        w.write_record(item.fields()).map_err(csv_err)?;
    }
    w.flush().map_err(|e| format_error("csv export", e))
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| format_error("json export", e))?;
    out.write_all(b"\n")
        .map_err(|e| format_error("json export", e))
}

pub fn write_rows<T: Tabular + Serialize, W: Write>(
    items: &[T],
    format: Format,
    out: W,
) -> Result<()> {
    match format {
        Format::Csv => write_csv(items, out),
        Format::Json => write_json(items, out),
    }
}

/// Writes `items` to the file at `path`; I/O failures carry the path.
pub fn export<T: Tabular + Serialize>(items: &[T], format: Format, path: &Path) -> Result<()> {
    let io_err = |source: io::Error| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut buf = BufWriter::new(file);
    write_rows(items, format, &mut buf).map_err(|e| match e {
        Error::Format { message, .. } => io_err(io::Error::other(message)),
        other => other,
    })?;
    buf.flush().map_err(io_err)
}

pub fn rows_from_json(text: &str) -> Result<Vec<SweepRow>> {
    serde_json::from_str(text).map_err(|e| format_error("json import", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> Vec<f64> {
        vec![0.0, 0.25, 0.5]
    }

    #[test]
    fn noiseless_k0_rows() {
        let rows = sweep_alpha(&NoiseModel::Noiseless, &[0.0], &grid3()).unwrap();
        let want = [
            2.0 / 3.0,
            2.0 / 3.0 + 2.0 / 3.0 * (3.0f64 / 16.0).sqrt(),
            1.0,
        ];
        assert_eq!(rows.len(), 3);
        for (r, w) in rows.iter().zip(want) {
            assert!((r.tau - w).abs() < 1e-12);
            assert!(r.flags_consistent());
            assert!(!r.beats_noiseless);
        }
        assert!(!rows[0].nonclassical);
        assert!(rows[1].nonclassical);
    }

    #[test]
    fn grid_errors() {
        let m = NoiseModel::Noiseless;
        assert!(matches!(
            sweep_alpha(&m, &[1.0], &[]),
            Err(Error::EmptyGrid)
        ));
        assert!(matches!(
            sweep_alpha(&m, &[1.0], &[0.3, 0.1]),
            Err(Error::InvalidGrid)
        ));
        assert!(matches!(
            sweep_alpha(&m, &[1.0], &[0.6]),
            Err(Error::InvalidGrid)
        ));
        assert!(sweep_alpha(&m, &[-1.0], &[0.1]).is_err());
        assert!(matches!(linear_grid(0.0, 0.5, 0), Err(Error::EmptyGrid)));
        assert_eq!(linear_grid(0.0, 0.5, 3).unwrap(), grid3());
    }

    #[test]
    fn bit_flip_low_alpha_is_classical() {
        let m = NoiseModel::bit_flip(0.7, 1.0).unwrap();
        let grid = linear_grid(0.0, 0.5, 51).unwrap();
        let rows = sweep_alpha(&m, &[1.0], &grid).unwrap();
        for r in rows {
            if r.alpha < 0.045 {
                assert!(!r.nonclassical, "alpha {}", r.alpha);
            }
            if r.alpha > 0.055 {
                assert!(r.nonclassical, "alpha {}", r.alpha);
            }
        }
    }

    #[test]
    fn global_dep_beats_noiseless_window() {
        let m = NoiseModel::global_depolarizing(0.7).unwrap();
        let grid = linear_grid(0.0, 0.05, 501).unwrap();
        let cl = find_alpha_cl(&m).unwrap().alpha().unwrap();
        let nk = find_alpha_nk(0.7, 2.5).unwrap().alpha_nk.unwrap();
        for r in sweep_alpha(&m, &[2.5], &grid).unwrap() {
            if r.alpha < nk - 1e-9 {
                assert!(r.beats_noiseless, "alpha {}", r.alpha);
            }
            if r.alpha > nk + 1e-9 {
                assert!(!r.beats_noiseless, "alpha {}", r.alpha);
            }
        }
        assert!(cl < nk && (nk - 0.022).abs() < 1e-3);
    }

    #[test]
    fn alpha_cl_examples() {
        assert_eq!(
            find_alpha_cl(&NoiseModel::Noiseless).unwrap(),
            Threshold::Root {
                alpha: 0.0,
                at_boundary: true
            }
        );
        let g = find_alpha_cl(&NoiseModel::global_depolarizing(0.7).unwrap()).unwrap();
        assert!((g.alpha().unwrap() - 0.011_614_5).abs() < 1e-6);
        let b = find_alpha_cl(&NoiseModel::bit_flip(0.7, 1.0).unwrap()).unwrap();
        assert!((b.alpha().unwrap() - 0.048_246).abs() < 1e-5);
        let dead = NoiseModel::global_depolarizing(0.1).unwrap();
        assert_eq!(find_alpha_cl(&dead).unwrap(), Threshold::AlwaysClassical);
    }

    #[test]
    fn crossover_routes_agree() {
        for k in [2.1, 2.5, 3.0, 3.5, 4.0, 6.0] {
            let c = find_alpha_nk(0.7, k).unwrap();
            assert!(c.routes_agree(), "k = {k}: {c:?}");
            assert!(c.bisection_residual < 1e-9);
            let other = find_alpha_nk(0.5, k).unwrap();
            assert!((other.bisection.unwrap() - c.bisection.unwrap()).abs() < 1e-6);
        }
        let marginal = find_alpha_nk(0.7, 2.0).unwrap();
        assert!(marginal.alpha_nk.is_none());
        assert!(marginal.closed_form.unwrap() < marginal.alpha_cl);
        let low = find_alpha_nk(0.7, 0.5).unwrap();
        assert_eq!((low.closed_form, low.bisection), (None, None));
        assert!(find_alpha_nk(1.0, 2.0).is_err());
    }

    #[test]
    fn crossover_grows_with_k() {
        let a: Vec<f64> = [2.1, 2.5, 3.0, 3.5, 4.0]
            .iter()
            .map(|&k| find_alpha_nk(0.7, k).unwrap().alpha_nk.unwrap())
            .collect();
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn table_statuses() {
        let t = reproduce_table1(PUBLISHED_P, &DEFAULT_TABLE_KS).unwrap();
        let status: Vec<_> = t.rows.iter().map(|r| r.status).collect();
        assert_eq!(
            status,
            [
                TableStatus::Marginal,
                TableStatus::Matches,
                TableStatus::Matches,
                TableStatus::Discrepancy,
                TableStatus::Matches
            ]
        );
        let k35 = t.rows[3].crossover.alpha_nk.unwrap();
        assert!((k35 - 0.045).abs() < 1e-3);
        assert!((t.alpha_cl - PUBLISHED_ALPHA_CL).abs() < 1e-3);
    }

    #[test]
    fn csv_shape() {
        let mut out = Vec::new();
        write_csv::<SweepRow, _>(&[], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "alpha,kind,params,k,F,D,tau,tau_noiseless,tau_classical,nonclassical,beats_noiseless\n"
        );
        let m = NoiseModel::bit_flip(0.7, 1.0).unwrap();
        let rows = sweep_alpha(&m, &[2.5], &[0.5]).unwrap();
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let records: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].len(), 11);
        assert_eq!(&records[0][2], "p=0.7,q=1");
        let f: f64 = records[0][4].parse().unwrap();
        assert_eq!(f, rows[0].f);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_round_trip() {
        let m = NoiseModel::combined_depolarizing(0.1, 0.05, 0.05).unwrap();
        let rows = sweep_alpha(&m, &[0.0, 2.5], &[0.1, 0.3]).unwrap();
        let mut out = Vec::new();
        write_json(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("\"F\"") && text.contains("\"kind\": \"combined_dep\""));
        assert_eq!(rows_from_json(&text).unwrap(), rows);
    }

    #[test]
    fn export_reports_path() {
        let rows = sweep_alpha(&NoiseModel::Noiseless, &[1.0], &[0.2]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("out.csv");
        match export(&rows, Format::Csv, &bad) {
            Err(Error::Io { path, .. }) => assert_eq!(path, bad),
            other => panic!("expected an I/O error, got {other:?}"),
        }
        let good = dir.path().join("out.json");
        export(&rows, Format::Json, &good).unwrap();
        let back = rows_from_json(&std::fs::read_to_string(good).unwrap()).unwrap();
        assert_eq!(back, rows);
    }
}
