//! Benchmark and parameter-sweep harness over a suite of datasets with
//! ground truth.
//!
//! Datasets are processed in parallel on a dedicated rayon pool; every
//! dataset writes only under its own directory and aggregation happens
//! afterwards in manifest order, so outputs do not depend on the worker
//! count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{self, OutputFormat};
use crate::metrics::{self, SuiteRecord, SuiteTable};
use crate::model::{
    EvalReport, GlobalTrendConfig, GroundTruth, LltParams, SeasonRegime, TimeSeries,
};
use crate::pipeline::{lgtd_decompose, lgtd_decompose_ablated, Ablation};
use crate::synth;

/// Default suite seed.
pub const DEFAULT_SEED: u64 = 42;

/// How a method picks its global trend for a series of a given length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GlobalChoice {
    /// Moving average with the default window for the series length.
    DefaultMovingAverage,
    /// Local regression with the default window for the series length.
    DefaultLocalRegression,
    Fixed { config: GlobalTrendConfig },
}

impl GlobalChoice {
    pub fn resolve(&self, len: usize) -> GlobalTrendConfig {
        match *self {
            GlobalChoice::DefaultMovingAverage => GlobalTrendConfig::default_for_len(len),
            GlobalChoice::DefaultLocalRegression => GlobalTrendConfig::LocalRegression {
                window: GlobalTrendConfig::default_window(len),
            },
            GlobalChoice::Fixed { config } => config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Method {
    pub name: String,
    pub global: GlobalChoice,
    /// Drops the local trend (every deviation from the global trend becomes
    /// residual).
    pub zero_local: bool,
}

impl Method {
    pub fn lgtd() -> Self {
        Self {
            name: "lgtd".into(),
            global: GlobalChoice::DefaultMovingAverage,
            zero_local: false,
        }
    }

    /// The three global estimators paired with the local extractor, plus
    /// the zero-local-trend baseline.
    pub fn standard_set() -> Vec<Method> {
        vec![
            Method::lgtd(),
            Method {
                name: "lgtd_poly3".into(),
                global: GlobalChoice::Fixed {
                    config: GlobalTrendConfig::PolynomialLeastSquares { degree: 3 },
                },
                zero_local: false,
            },
            Method {
                name: "lgtd_local".into(),
                global: GlobalChoice::DefaultLocalRegression,
                zero_local: false,
            },
            Method {
                name: "zero_local".into(),
                global: GlobalChoice::DefaultMovingAverage,
                zero_local: true,
            },
        ]
    }

    pub fn run(&self, series: &TimeSeries, llt: &LltParams) -> Result<crate::Decomposition> {
        let global = self.global.resolve(series.len());
        if self.zero_local {
            lgtd_decompose_ablated(series, &global, llt, Ablation::NoLocalTrend)
        } else {
            lgtd_decompose(series, &global, llt)
        }
    }
}

/// A series with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub dir_name: String,
    pub regime: Option<SeasonRegime>,
    pub series: TimeSeries,
    pub truth: GroundTruth,
}

/// The seeded nine-dataset suite, generated in memory.
pub fn generate_suite(seed: u64) -> Result<Vec<Dataset>> {
    synth::suite(seed)
        .into_iter()
        .map(|entry| {
            let (series, truth) = synth::gen_series(&entry.spec)?;
            Ok(Dataset {
                name: entry.name(),
                dir_name: entry.dir_name(),
                regime: Some(entry.spec.season),
                series,
                truth,
            })
        })
        .collect()
}

/// Load the suite under `root`, generating it with `seed` first if no
/// manifest exists there.
pub fn load_or_generate_suite(root: impl AsRef<Path>, seed: u64) -> Result<Vec<Dataset>> {
    let root = root.as_ref();
    if !root.join(io::MANIFEST_FILE).exists() {
        io::write_suite(root, &synth::suite(seed), seed)?;
    }
    load_suite(root)
}

pub fn load_suite(root: impl AsRef<Path>) -> Result<Vec<Dataset>> {
    let root = root.as_ref();
    let manifest = io::read_manifest(root)?;
    manifest
        .datasets
        .iter()
        .map(|entry| {
            let series_path = root.join(&entry.series);
            let series = io::read_series_csv(&series_path)?;
            let truth = io::read_truth(root.join(&entry.truth))?;
            if truth.total.len() != series.len() {
                return Err(Error::LengthMismatch {
                    left: series.len(),
                    right: truth.total.len(),
                });
            }
            let dir_name = Path::new(&entry.series)
                .parent()
                .and_then(|p| p.to_str())
                .filter(|p| !p.is_empty())
                .unwrap_or(&entry.name)
                .to_string();
            Ok(Dataset {
                name: entry.name.clone(),
                dir_name,
                regime: Some(entry.spec.season),
                series,
                truth,
            })
        })
        .collect()
}

/// Build a pool with `threads` workers (rayon's default when `None`).
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))
}

/// Worker cap from `LGTD_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("LGTD_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub llt: LltParams,
    pub methods: Vec<Method>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            llt: LltParams::default(),
            methods: Method::standard_set(),
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub records: Vec<SuiteRecord>,
    pub table: SuiteTable,
}

impl BenchResult {
    pub fn report(&self, dataset: &str, method: &str) -> Option<&EvalReport> {
        self.records
            .iter()
            .find(|r| r.dataset == dataset && r.method == method)
            .map(|r| &r.report)
    }
}

fn evaluate_dataset(
    ds: &Dataset,
    config: &BenchConfig,
    out: Option<&Path>,
) -> Result<Vec<SuiteRecord>> {
    config
        .methods
        .iter()
        .map(|method| {
            let d = method.run(&ds.series, &config.llt)?;
            let report = metrics::evaluate(&d, &ds.truth)?;
            if let Some(out) = out {
                let dir = out.join(&ds.dir_name).join(&method.name);
                io::write_decomposition(&ds.series, &d, &dir, &[OutputFormat::Csv, OutputFormat::Json])?;
                io::write_json(dir.join("eval.json"), &report)?;
            }
            Ok(SuiteRecord {
                dataset: ds.name.clone(),
                regime: ds.regime,
                method: method.name.clone(),
                report,
            })
        })
        .collect()
}

/// Decompose and score every dataset with every method.
pub fn run_bench(datasets: &[Dataset], config: &BenchConfig) -> Result<BenchResult> {
    run_bench_inner(datasets, config, None)
}

fn run_bench_inner(
    datasets: &[Dataset],
    config: &BenchConfig,
    out: Option<&Path>,
) -> Result<BenchResult> {
    config.llt.validate()?;
    let pool = thread_pool(config.threads)?;
    let per_dataset: Vec<Vec<SuiteRecord>> = pool.install(|| {
        datasets
            .par_iter()
            .map(|ds| evaluate_dataset(ds, config, out))
            .collect::<Result<_>>()
    })?;
    let records: Vec<SuiteRecord> = per_dataset.into_iter().flatten().collect();
    let table = metrics::aggregate_suite(&records)?;
    Ok(BenchResult { records, table })
}

fn records_csv(records: &[SuiteRecord]) -> String {
    let mut out = String::from(
        "dataset,regime,method,trend_mae,seasonal_mae,residual_mae,overall_mae,trend_mse,seasonal_mse,residual_mse,overall_mse\n",
    );
    for r in records {
        let e = &r.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.regime.map(|g| g.name()).unwrap_or(""),
            r.method,
            e.trend.mae,
            e.seasonal.mae,
            e.residual.mae,
            e.overall_mae,
            e.trend.mse,
            e.seasonal.mse,
            e.residual.mse,
            e.overall_mse
        );
    }
    out
}

#[derive(Serialize)]
struct BenchEcho<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a BenchConfig,
    datasets: Vec<DatasetEcho<'a>>,
}

#[derive(Serialize)]
struct DatasetEcho<'a> {
    name: &'a str,
    dir: &'a str,
    length: usize,
    global: Vec<(&'a str, GlobalTrendConfig)>,
}

/// [`run_bench`] plus the output tree under `out`:
///
/// - `<dataset>/<method>/{components.csv,result.json,eval.json}`
/// - `records.csv`: one row per (dataset, method)
/// - `summary.csv`, `summary.md`: aggregate tables, overall and per regime
/// - `bench.json`: every effective parameter
pub fn run_bench_to_dir(
    datasets: &[Dataset],
    config: &BenchConfig,
    out: impl AsRef<Path>,
) -> Result<BenchResult> {
    let out = out.as_ref();
    io::create_dir(out)?;
    let result = run_bench_inner(datasets, config, Some(out))?;
    io::write_text(out.join("records.csv"), &records_csv(&result.records))?;
    io::write_text(out.join("summary.csv"), &result.table.to_csv())?;
    io::write_text(out.join("summary.md"), &result.table.to_markdown())?;
    let echo = BenchEcho {
        tool: io::TOOL_NAME,
        version: io::TOOL_VERSION,
        config,
        datasets: datasets
            .iter()
            .map(|ds| DatasetEcho {
                name: &ds.name,
                dir: &ds.dir_name,
                length: ds.series.len(),
                global: config
                    .methods
                    .iter()
                    .map(|m| (m.name.as_str(), m.global.resolve(ds.series.len())))
                    .collect(),
            })
            .collect(),
    };
    io::write_json(out.join("bench.json"), &echo)?;
    Ok(result)
}

/// Extractor parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    P0,
    Dp,
    Window,
    Kmax,
}

impl SweepParam {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "p0" => Ok(SweepParam::P0),
            "dp" => Ok(SweepParam::Dp),
            "window" | "w" => Ok(SweepParam::Window),
            "kmax" => Ok(SweepParam::Kmax),
            other => Err(Error::InvalidParams(format!(
                "unknown sweep parameter `{other}` (expected p0, dp, window or kmax)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::P0 => "p0",
            SweepParam::Dp => "dp",
            SweepParam::Window => "window",
            SweepParam::Kmax => "kmax",
        }
    }

    pub fn apply(self, base: &LltParams, value: f64) -> Result<LltParams> {
        let integral = || {
            if value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::InvalidParams(format!(
                    "{} takes positive integers, got {value}",
                    self.name()
                )))
            }
        };
        let mut p = *base;
        match self {
            SweepParam::P0 => p.baseline_percentile = value,
            SweepParam::Dp => p.percentile_step = value,
            SweepParam::Window => p.window = integral()?,
            SweepParam::Kmax => p.max_iterations = integral()?,
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub dataset: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpread {
    pub dataset: String,
    pub min_overall_mae: f64,
    pub max_overall_mae: f64,
    /// `(max - min) / min` over the swept values.
    pub relative_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub method: Method,
    pub base: LltParams,
    pub rows: Vec<SweepRow>,
    /// Suite-mean overall MAE per swept value, in `values` order.
    pub mean_overall_mae: Vec<f64>,
    pub spreads: Vec<DatasetSpread>,
    pub max_relative_spread: f64,
    /// Spread of the suite-mean overall MAE across values.
    pub mean_relative_spread: f64,
}

fn relative_spread(values: impl Iterator<Item = f64> + Clone) -> (f64, f64, f64) {
    let min = values.clone().fold(f64::INFINITY, f64::min);
    let max = values.fold(f64::NEG_INFINITY, f64::max);
    let spread = if min > 0.0 { (max - min) / min } else if max == min { 0.0 } else { f64::INFINITY };
    (min, max, spread)
}

/// Re-run the benchmark of `method` once per value of `param`.
pub fn run_sweep(
    datasets: &[Dataset],
    base: &LltParams,
    method: &Method,
    param: SweepParam,
    values: &[f64],
    threads: Option<usize>,
) -> Result<SweepReport> {
    if values.is_empty() || datasets.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut rows = Vec::with_capacity(values.len() * datasets.len());
    let mut mean_overall_mae = Vec::with_capacity(values.len());
    for &value in values {
        let config = BenchConfig {
            llt: param.apply(base, value)?,
            methods: vec![method.clone()],
            threads,
        };
        let result = run_bench(datasets, &config)?;
        let mean = result.records.iter().map(|r| r.report.overall_mae).sum::<f64>()
            / result.records.len() as f64;
        mean_overall_mae.push(mean);
        rows.extend(result.records.into_iter().map(|r| SweepRow {
            value,
            dataset: r.dataset,
            report: r.report,
        }));
    }
    let spreads: Vec<DatasetSpread> = datasets
        .iter()
        .map(|ds| {
            let maes = rows
                .iter()
                .filter(|r| r.dataset == ds.name)
                .map(|r| r.report.overall_mae);
            let (min, max, spread) = relative_spread(maes);
            DatasetSpread {
                dataset: ds.name.clone(),
                min_overall_mae: min,
                max_overall_mae: max,
                relative_spread: spread,
            }
        })
        .collect();
    let max_relative_spread = spreads.iter().map(|s| s.relative_spread).fold(0.0, f64::max);
    let (_, _, mean_relative_spread) = relative_spread(mean_overall_mae.iter().copied());
    Ok(SweepReport {
        param,
        values: values.to_vec(),
        method: method.clone(),
        base: *base,
        rows,
        mean_overall_mae,
        spreads,
        max_relative_spread,
        mean_relative_spread,
    })
}

impl SweepReport {
    /// One row per (value, dataset) plus an `all` row per value holding the
    /// suite mean.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "param,value,dataset,trend_mae,seasonal_mae,residual_mae,overall_mae,overall_mse\n",
        );
        let name = self.param.name();
        for (i, &value) in self.values.iter().enumerate() {
            for r in self.rows.iter().filter(|r| r.value == value) {
                let e = &r.report;
                let _ = writeln!(
                    out,
                    "{name},{value},{},{},{},{},{},{}",
                    r.dataset, e.trend.mae, e.seasonal.mae, e.residual.mae, e.overall_mae, e.overall_mse
                );
            }
            let _ = writeln!(out, "{name},{value},all,,,,{},", self.mean_overall_mae[i]);
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("## Sensitivity to `{}`\n\n", self.param.name());
        out.push_str("| value | mean overall MAE |\n|---|---|\n");
        for (v, m) in self.values.iter().zip(&self.mean_overall_mae) {
            let _ = writeln!(out, "| {v} | {m:.4} |");
        }
        out.push_str("\n| dataset | min overall MAE | max overall MAE | relative spread |\n|---|---|---|---|\n");
        for s in &self.spreads {
            let _ = writeln!(
                out,
                "| {} | {:.4} | {:.4} | {:.2}% |",
                s.dataset,
                s.min_overall_mae,
                s.max_overall_mae,
                100.0 * s.relative_spread
            );
        }
        let _ = writeln!(
            out,
            "\nMax relative spread: {:.2}%\nSpread of suite mean: {:.2}%",
            100.0 * self.max_relative_spread,
            100.0 * self.mean_relative_spread
        );
        out
    }

    /// Write to `path` in the format its extension names (`.md`, `.json`,
    /// otherwise CSV). CSV and Markdown also get the full report as a
    /// sibling `.json`. Returns every path written.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let path = path.as_ref();
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            io::create_dir(parent)?;
        }
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if ext == "json" {
            io::write_json(path, self)?;
            return Ok(vec![path.to_path_buf()]);
        }
        let text = if ext == "md" { self.to_markdown() } else { self.to_csv() };
        io::write_text(path, &text)?;
        let json = path.with_extension("json");
        io::write_json(&json, self)?;
        Ok(vec![path.to_path_buf(), json])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_param_apply() {
        let base = LltParams::default();
        assert_eq!(SweepParam::P0.apply(&base, 40.0).unwrap().baseline_percentile, 40.0);
        assert_eq!(SweepParam::Window.apply(&base, 5.0).unwrap().window, 5);
        assert!(SweepParam::Window.apply(&base, 2.5).is_err());
        assert!(SweepParam::P0.apply(&base, 0.0).is_err());
        assert!(SweepParam::parse("bogus").is_err());
        assert_eq!(SweepParam::parse("kmax").unwrap(), SweepParam::Kmax);
    }

    #[test]
    fn spread_definition() {
        let (min, max, s) = relative_spread([2.0, 2.5, 2.2].into_iter());
        assert_eq!((min, max), (2.0, 2.5));
        assert!((s - 0.25).abs() < 1e-12);
    }

    #[test]
    fn global_choice_resolution() {
        assert_eq!(
            GlobalChoice::DefaultMovingAverage.resolve(2000),
            GlobalTrendConfig::MovingAverage { window: 201 }
        );
        assert_eq!(
            GlobalChoice::DefaultLocalRegression.resolve(2000),
            GlobalTrendConfig::LocalRegression { window: 201 }
        );
    }

    #[test]
    fn small_bench_runs_and_is_thread_independent() {
        let mut datasets = generate_suite(3).unwrap();
        datasets.truncate(2);
        let one = run_bench(
            &datasets,
            &BenchConfig {
                threads: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        let four = run_bench(
            &datasets,
            &BenchConfig {
                threads: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one, four);
        assert_eq!(one.records.len(), 2 * Method::standard_set().len());
        assert!(one.report("synth1", "lgtd").is_some());
    }
}
