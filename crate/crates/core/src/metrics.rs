//! Component-wise error metrics and suite aggregation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComponentError, Decomposition, EvalReport, GroundTruth, SeasonRegime};

fn check_pair(estimate: &[f64], truth: &[f64]) -> Result<()> {
    if estimate.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: estimate.len(),
            right: truth.len(),
        });
    }
    if estimate.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Mean absolute error.
pub fn mae(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(estimate, truth)?;
    let sum: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / estimate.len() as f64)
}

/// Mean squared error.
pub fn mse(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(estimate, truth)?;
    let sum: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(sum / estimate.len() as f64)
}

fn component(estimate: &[f64], truth: &[f64]) -> Result<ComponentError> {
    Ok(ComponentError {
        mae: mae(estimate, truth)?,
        mse: mse(estimate, truth)?,
    })
}

/// Score a decomposition: global trend against the true trend, local trend
/// against the true seasonal component, residual against the injected noise.
pub fn evaluate(decomp: &Decomposition, truth: &GroundTruth) -> Result<EvalReport> {
    Ok(EvalReport::from_components(
        component(&decomp.global_trend, &truth.trend)?,
        component(&decomp.local_trend, &truth.seasonal)?,
        component(&decomp.residual, &truth.noise)?,
    ))
}

/// One evaluated (dataset, method) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub dataset: String,
    pub regime: Option<SeasonRegime>,
    pub method: String,
    pub report: EvalReport,
}

/// Per-method means over a set of datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub method: String,
    pub datasets: usize,
    pub trend_mae: f64,
    pub seasonal_mae: f64,
    pub residual_mae: f64,
    pub overall_mae: f64,
    pub trend_mse: f64,
    pub seasonal_mse: f64,
    pub residual_mse: f64,
    pub overall_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeTable {
    pub regime: SeasonRegime,
    pub rows: Vec<TableRow>,
}

/// Aggregate over all datasets plus one slice per seasonality regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteTable {
    pub overall: Vec<TableRow>,
    pub by_regime: Vec<RegimeTable>,
}

fn mean_rows<'a>(records: impl Iterator<Item = &'a SuiteRecord>) -> Vec<TableRow> {
    let mut groups: BTreeMap<&str, Vec<&EvalReport>> = BTreeMap::new();
    for r in records {
        groups.entry(r.method.as_str()).or_default().push(&r.report);
    }
    let mut rows: Vec<TableRow> = groups
        .into_iter()
        .map(|(method, reports)| {
            let n = reports.len() as f64;
            let avg = |f: fn(&EvalReport) -> f64| reports.iter().map(|r| f(r)).sum::<f64>() / n;
            TableRow {
                method: method.to_string(),
                datasets: reports.len(),
                trend_mae: avg(|r| r.trend.mae),
                seasonal_mae: avg(|r| r.seasonal.mae),
                residual_mae: avg(|r| r.residual.mae),
                overall_mae: avg(|r| r.overall_mae),
                trend_mse: avg(|r| r.trend.mse),
                seasonal_mse: avg(|r| r.seasonal.mse),
                residual_mse: avg(|r| r.residual.mse),
                overall_mse: avg(|r| r.overall_mse),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.overall_mae
            .total_cmp(&b.overall_mae)
            .then_with(|| a.method.cmp(&b.method))
    });
    rows
}

/// Per-method means, overall and per regime, each sorted by overall MAE.
pub fn aggregate_suite(records: &[SuiteRecord]) -> Result<SuiteTable> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let overall = mean_rows(records.iter());
    let by_regime = SeasonRegime::ALL
        .into_iter()
        .filter_map(|regime| {
            let rows = mean_rows(records.iter().filter(|r| r.regime == Some(regime)));
            (!rows.is_empty()).then_some(RegimeTable { regime, rows })
        })
        .collect();
    Ok(SuiteTable { overall, by_regime })
}

const HEADER: [&str; 10] = [
    "method",
    "datasets",
    "trend_mae",
    "seasonal_mae",
    "residual_mae",
    "overall_mae",
    "trend_mse",
    "seasonal_mse",
    "residual_mse",
    "overall_mse",
];

impl TableRow {
    fn cells(&self) -> [String; 10] {
        [
            self.method.clone(),
            self.datasets.to_string(),
            self.trend_mae.to_string(),
            self.seasonal_mae.to_string(),
            self.residual_mae.to_string(),
            self.overall_mae.to_string(),
            self.trend_mse.to_string(),
            self.seasonal_mse.to_string(),
            self.residual_mse.to_string(),
            self.overall_mse.to_string(),
        ]
    }

    fn rounded_cells(&self) -> [String; 10] {
        let mut cells = self.cells();
        let values = [
            self.trend_mae,
            self.seasonal_mae,
            self.residual_mae,
            self.overall_mae,
            self.trend_mse,
            self.seasonal_mse,
            self.residual_mse,
            self.overall_mse,
        ];
        for (cell, v) in cells[2..].iter_mut().zip(values) {
            *cell = format!("{v:.4}");
        }
        cells
    }
}

impl SuiteTable {
    /// Long-format CSV: a `slice` column (`all` or the regime name) followed
    /// by the row fields at full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("slice,");
        out.push_str(&HEADER.join(","));
        out.push('\n');
        let slices = std::iter::once(("all", &self.overall))
            .chain(self.by_regime.iter().map(|t| (t.regime.name(), &t.rows)));
        for (slice, rows) in slices {
            for row in rows {
                out.push_str(slice);
                out.push(',');
                out.push_str(&row.cells().join(","));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let mut table = |title: &str, rows: &[TableRow]| {
            let _ = writeln!(out, "## {title}\n");
            let _ = writeln!(out, "| {} |", HEADER.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
            for row in rows {
                let _ = writeln!(out, "| {} |", row.rounded_cells().join(" | "));
            }
            out.push('\n');
        };
        table("All datasets", &self.overall);
        for t in &self.by_regime {
            table(&format!("{} period", t.regime.name()), &t.rows);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DecompositionParams, GlobalTrendConfig, LltParams};

    fn report(overall: f64) -> EvalReport {
        let c = ComponentError {
            mae: overall,
            mse: overall * overall,
        };
        EvalReport::from_components(c, c, c)
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mae(&[1.0; 4], &[0.0, 2.0, 0.0, 2.0]).unwrap(), 1.0);
        assert!(matches!(mae(&[1.0], &[]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(mae(&[], &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[4.0, 5.0], &[4.0, 5.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mse(&[3.0], &[0.0]).unwrap(), 9.0);
        assert!(matches!(mse(&[], &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn perfect_decomposition_scores_zero() {
        let truth = GroundTruth {
            trend: vec![1.0, 2.0, 3.0],
            seasonal: vec![0.5, -0.5, 0.0],
            noise: vec![0.0; 3],
            total: vec![1.5, 1.5, 3.0],
        };
        let d = Decomposition {
            global_trend: truth.trend.clone(),
            local_trend: truth.seasonal.clone(),
            residual: truth.noise.clone(),
            labels: vec![-1; 3],
            models: vec![],
            params: DecompositionParams {
                llt: LltParams::default(),
                global: GlobalTrendConfig::MovingAverage { window: 1 },
            },
        };
        let r = evaluate(&d, &truth).unwrap();
        assert_eq!(r.overall_mae, 0.0);
        assert_eq!(r.overall_mse, 0.0);
    }

    #[test]
    fn overall_is_component_mean() {
        let r = EvalReport::from_components(
            ComponentError { mae: 1.0, mse: 2.0 },
            ComponentError { mae: 2.0, mse: 5.0 },
            ComponentError { mae: 6.0, mse: 8.0 },
        );
        assert_eq!(r.overall_mae, 3.0);
        assert_eq!(r.overall_mse, 5.0);
    }

    #[test]
    fn aggregate_single_and_mean() {
        let one = vec![SuiteRecord {
            dataset: "a".into(),
            regime: Some(SeasonRegime::Fixed),
            method: "m".into(),
            report: report(2.0),
        }];
        let t = aggregate_suite(&one).unwrap();
        assert_eq!(t.overall.len(), 1);
        assert_eq!(t.overall[0].overall_mae, 2.0);
        assert_eq!(t.overall[0].trend_mse, 4.0);

        let two = vec![
            one[0].clone(),
            SuiteRecord {
                dataset: "b".into(),
                regime: Some(SeasonRegime::Variable),
                method: "m".into(),
                report: report(4.0),
            },
        ];
        let t = aggregate_suite(&two).unwrap();
        assert_eq!(t.overall[0].overall_mae, 3.0);
        assert_eq!(t.by_regime.len(), 2);
        assert_eq!(t.by_regime[1].regime, SeasonRegime::Variable);
        assert_eq!(t.by_regime[1].rows[0].overall_mae, 4.0);
        assert!(aggregate_suite(&[]).is_err());
    }

    #[test]
    fn rows_sorted_by_overall_mae() {
        let records: Vec<SuiteRecord> = [("x", 5.0), ("y", 1.0), ("z", 3.0)]
            .into_iter()
            .map(|(m, v)| SuiteRecord {
                dataset: "d".into(),
                regime: None,
                method: m.into(),
                report: report(v),
            })
            .collect();
        let t = aggregate_suite(&records).unwrap();
        let order: Vec<&str> = t.overall.iter().map(|r| r.method.as_str()).collect();
        assert_eq!(order, ["y", "z", "x"]);
        assert!(t.by_regime.is_empty());
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("slice,method,datasets"));
        assert!(t.to_markdown().contains("| y | 1 |"));
    }
}
