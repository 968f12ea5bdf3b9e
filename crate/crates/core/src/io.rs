//! File formats: series CSV input, decomposition CSV/JSON output, synthetic
//! dataset files and the suite manifest.
//!
//! Floats are always written with Rust's shortest round-trip formatting so
//! output is byte-for-byte deterministic and reads back bit-exactly.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{Decomposition, EvalReport, GroundTruth, IndexLabel, SyntheticSpec, TimeSeries};
use crate::synth::{self, SuiteEntry};

pub const TOOL_NAME: &str = "lgtd";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const COMPONENTS_FILE: &str = "components.csv";
pub const RESULT_FILE: &str = "result.json";
pub const SERIES_FILE: &str = "series.csv";
pub const TRUTH_FILE: &str = "truth.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Csv,
    Json,
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn parse_timestamp(raw: &str) -> Option<i64> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.timestamp_micros());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(dt.and_utc().timestamp_micros());
        }
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| dt.and_utc().timestamp_micros())
}

fn parse_value(raw: &str, line: usize) -> Result<f64> {
    let v: f64 = raw.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{raw}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("`{raw}` is not finite"),
        });
    }
    Ok(v)
}

/// Parse series CSV text. The header names either a single `value` column
/// or `t,value`; `t` holds consecutive integers or strictly increasing
/// ISO-8601 timestamps. Line numbers count the header as line 1.
pub fn parse_series_csv(text: &str) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let value_col = headers
        .iter()
        .position(|h| h == "value")
        .ok_or_else(|| Error::MissingColumn("value".into()))?;
    let t_col = headers.iter().position(|h| h == "t");

    let mut values = Vec::new();
    let mut labels: Vec<IndexLabel> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let field = |col: usize| {
            record.get(col).ok_or_else(|| Error::Parse {
                line,
                message: "row is missing a column".into(),
            })
        };
        values.push(parse_value(field(value_col)?, line)?);
        let Some(t_col) = t_col else { continue };
        let raw = field(t_col)?;
        let label = match raw.parse::<i64>() {
            Ok(tick) => IndexLabel::Tick(tick),
            Err(_) => match parse_timestamp(raw) {
                Some(micros) => IndexLabel::Timestamp {
                    raw: raw.to_string(),
                    micros,
                },
                None => {
                    return Err(Error::Parse {
                        line,
                        message: format!("`{raw}` is neither an integer nor an ISO-8601 timestamp"),
                    })
                }
            },
        };
        if let Some(prev) = labels.last() {
            let ok = match (prev, &label) {
                (IndexLabel::Tick(a), IndexLabel::Tick(b)) => *b == a + 1,
                (
                    IndexLabel::Timestamp { micros: a, .. },
                    IndexLabel::Timestamp { micros: b, .. },
                ) => b > a,
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: "mixed integer and timestamp index".into(),
                    })
                }
            };
            if !ok {
                return Err(Error::IndexGap(line));
            }
        }
        labels.push(label);
    }
    if t_col.is_some() {
        TimeSeries::with_index(values, labels)
    } else {
        TimeSeries::new(values)
    }
}

/// Read a series CSV file; see [`parse_series_csv`].
pub fn read_series_csv(path: impl AsRef<Path>) -> Result<TimeSeries> {
    parse_series_csv(&read_to_string(path.as_ref())?)
}

/// Contents of `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub tool: String,
    pub version: String,
    pub index: Option<Vec<String>>,
    pub y: Vec<f64>,
    pub decomposition: Decomposition,
    /// SHA-256 of the compact JSON encoding of every other field, with this
    /// one set to the empty string.
    pub checksum: String,
}

impl ResultFile {
    pub fn new(series: &TimeSeries, decomposition: &Decomposition) -> Self {
        let mut file = Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            index: series
                .index()
                .map(|idx| idx.iter().map(|l| l.to_string()).collect()),
            y: series.values().to_vec(),
            decomposition: decomposition.clone(),
            checksum: String::new(),
        };
        file.checksum = file.compute_checksum();
        file
    }

    pub fn compute_checksum(&self) -> String {
        let mut unsigned = self.clone();
        unsigned.checksum.clear();
        let bytes = serde_json::to_vec(&unsigned).expect("result serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

/// Content of `components.csv`: `t,y,global,local,residual,label`.
pub fn components_csv(series: &TimeSeries, d: &Decomposition) -> String {
    let mut out = String::with_capacity(64 * d.len() + 40);
    out.push_str("t,y,global,local,residual,label\n");
    for t in 0..d.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            series.label(t),
            series.values()[t],
            d.global_trend[t],
            d.local_trend[t],
            d.residual[t],
            d.labels[t]
        ));
    }
    out
}

/// Write the requested output files into `dir` and return their paths.
pub fn write_decomposition(
    series: &TimeSeries,
    decomp: &Decomposition,
    dir: impl AsRef<Path>,
    formats: &[OutputFormat],
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    create_dir(dir)?;
    let mut written = Vec::new();
    if formats.contains(&OutputFormat::Csv) {
        let path = dir.join(COMPONENTS_FILE);
        write_file(&path, components_csv(series, decomp))?;
        written.push(path);
    }
    if formats.contains(&OutputFormat::Json) {
        let path = dir.join(RESULT_FILE);
        let file = ResultFile::new(series, decomp);
        let mut bytes = serde_json::to_vec(&file).expect("result serializes");
        bytes.push(b'\n');
        write_file(&path, bytes)?;
        written.push(path);
    }
    Ok(written)
}

/// Read `result.json` from `dir` (or from `dir` itself if it is a file) and
/// verify its checksum.
pub fn read_result(path: impl AsRef<Path>) -> Result<ResultFile> {
    let path = path.as_ref();
    let path = if path.is_dir() {
        path.join(RESULT_FILE)
    } else {
        path.to_path_buf()
    };
    let text = read_to_string(&path)?;
    let file: ResultFile = serde_json::from_str(&text).map_err(|e| Error::format(&path, e))?;
    if file.compute_checksum() != file.checksum {
        return Err(Error::format(&path, "checksum mismatch"));
    }
    Ok(file)
}

/// Serialize any value as deterministic pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    write_file(path.as_ref(), to_json_pretty(value))
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    write_file(path.as_ref(), text)
}

pub fn read_eval_report(path: impl AsRef<Path>) -> Result<EvalReport> {
    let path = path.as_ref();
    serde_json::from_str(&read_to_string(path)?).map_err(|e| Error::format(path, e))
}

/// `t,trend,seasonal,noise,total`.
pub fn truth_csv(truth: &GroundTruth) -> String {
    let mut out = String::from("t,trend,seasonal,noise,total\n");
    for t in 0..truth.total.len() {
        out.push_str(&format!(
            "{t},{},{},{},{}\n",
            truth.trend[t], truth.seasonal[t], truth.noise[t], truth.total[t]
        ));
    }
    out
}

pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in series.values().iter().enumerate() {
        out.push_str(&format!("{},{v}\n", series.label(t)));
    }
    out
}

/// Read a ground-truth CSV from `path`, or from `path/truth.csv` when
/// `path` is a directory.
pub fn read_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let path = if path.is_dir() {
        path.join(TRUTH_FILE)
    } else {
        path.to_path_buf()
    };
    let text = read_to_string(&path)?;
    parse_truth_csv(&text)
}

fn parse_truth_csv(text: &str) -> Result<GroundTruth> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.into()))
    };
    let cols = [col("trend")?, col("seasonal")?, col("noise")?, col("total")?];
    let mut arrays: [Vec<f64>; 4] = Default::default();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        for (array, &c) in arrays.iter_mut().zip(&cols) {
            let raw = record.get(c).ok_or_else(|| Error::Parse {
                line,
                message: "row is missing a column".into(),
            })?;
            array.push(parse_value(raw, line)?);
        }
    }
    let [trend, seasonal, noise, total] = arrays;
    if total.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(GroundTruth {
        trend,
        seasonal,
        noise,
        total,
    })
}

/// Generator constants echoed into every manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConstants {
    pub prng: String,
    pub gaussian: String,
    pub waveform: String,
    pub linear_slope: f64,
    pub piecewise_slopes: [f64; 3],
    pub fixed_period: usize,
    pub transitive_periods: [usize; 2],
    pub variable_periods: Vec<usize>,
}

impl Default for GeneratorConstants {
    fn default() -> Self {
        Self {
            prng: "xoshiro256++ seeded by splitmix64; noise stream after one jump()".into(),
            gaussian: "marsaglia polar, both variates of each pair".into(),
            waveform: "phase-continuous sine".into(),
            linear_slope: synth::LINEAR_SLOPE,
            piecewise_slopes: synth::PIECEWISE_SLOPES,
            fixed_period: synth::FIXED_PERIOD,
            transitive_periods: [synth::TRANSITIVE_PERIODS.0, synth::TRANSITIVE_PERIODS.1],
            variable_periods: synth::variable_periods(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub spec: SyntheticSpec,
    /// Paths relative to the manifest's directory.
    pub series: String,
    pub truth: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub constants: GeneratorConstants,
    pub datasets: Vec<ManifestEntry>,
}

impl Manifest {
    fn new(seed: u64, datasets: Vec<ManifestEntry>) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            seed,
            constants: GeneratorConstants::default(),
            datasets,
        }
    }
}

fn write_dataset(dir: &Path, spec: &SyntheticSpec) -> Result<()> {
    create_dir(dir)?;
    let (series, truth) = synth::gen_series(spec)?;
    write_file(&dir.join(SERIES_FILE), series_csv(&series))?;
    write_file(&dir.join(TRUTH_FILE), truth_csv(&truth))
}

/// Generate one dataset directly into `dir`, with a one-entry manifest.
pub fn write_synthetic(dir: impl AsRef<Path>, name: &str, spec: &SyntheticSpec) -> Result<Manifest> {
    let dir = dir.as_ref();
    write_dataset(dir, spec)?;
    let manifest = Manifest::new(
        spec.seed,
        vec![ManifestEntry {
            name: name.into(),
            spec: *spec,
            series: SERIES_FILE.into(),
            truth: TRUTH_FILE.into(),
        }],
    );
    write_json(dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// Generate the nine-dataset suite under `root`, one subdirectory each.
pub fn write_suite(root: impl AsRef<Path>, entries: &[SuiteEntry], seed: u64) -> Result<Manifest> {
    let root = root.as_ref();
    create_dir(root)?;
    let mut datasets = Vec::with_capacity(entries.len());
    for entry in entries {
        let dir_name = entry.dir_name();
        write_dataset(&root.join(&dir_name), &entry.spec)?;
        datasets.push(ManifestEntry {
            name: entry.name(),
            spec: entry.spec,
            series: format!("{dir_name}/{SERIES_FILE}"),
            truth: format!("{dir_name}/{TRUTH_FILE}"),
        });
    }
    let manifest = Manifest::new(seed, datasets);
    write_json(root.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

pub fn read_manifest(root: impl AsRef<Path>) -> Result<Manifest> {
    let path = root.as_ref().join(MANIFEST_FILE);
    serde_json::from_str(&read_to_string(&path)?).map_err(|e| Error::format(&path, e))
}
