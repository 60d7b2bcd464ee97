//! Deterministic artifact writers: RFC-4180 CSV with LF endings, pretty JSON,
//! and gnuplot scripts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::convergence::ConvergenceRecord;
use super::rates::{fit_rate, RateFit, RateModel};
use crate::error::{Error, Result};

pub const CONVERGENCE_CSV: &str = "convergence.csv";
pub const RATES_JSON: &str = "rates.json";
pub const PLOT_SCRIPT: &str = "plot.gp";

/// Shortest exact-enough form: 17 significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn cell(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// Write `rows` under `header` as RFC-4180 CSV with `\n` line endings.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record(header).map_err(ser)?;
    for row in rows {
        w.write_record(row).map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline; map keys are sorted by construction.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Serialization(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// A fit, or why it could not be made.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FitOutcome {
    Fit(RateFit),
    Failed { model: RateModel, error: String },
}

impl FitOutcome {
    pub fn compute(ns: &[f64], errors: &[f64], model: RateModel) -> Self {
        match fit_rate(ns, errors, model) {
            Ok(f) => FitOutcome::Fit(f),
            Err(e) => FitOutcome::Failed { model, error: e.to_string() },
        }
    }

    pub fn fit(&self) -> Option<&RateFit> {
        match self {
            FitOutcome::Fit(f) => Some(f),
            FitOutcome::Failed { .. } => None,
        }
    }
}

/// Column names of a convergence table.
pub fn convergence_header(metric_columns: &[String]) -> Vec<String> {
    std::iter::once("N".to_string()).chain(metric_columns.iter().cloned()).chain(std::iter::once("walltime_ms".into())).collect()
}

/// `convergence.csv`, `rates.json` and `plot.gp` in `outdir`.
///
/// `fits` maps each metric column to its fits; `document` is serialized as
/// the body of `rates.json`.
pub fn emit_outputs<D: Serialize>(
    outdir: &Path,
    metric_columns: &[String],
    records: &[ConvergenceRecord],
    fits: &BTreeMap<String, Vec<FitOutcome>>,
    document: &D,
) -> Result<Vec<PathBuf>> {
    ensure_dir(outdir)?;
    let header = convergence_header(metric_columns);
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            std::iter::once(r.n.to_string()).chain(r.values.iter().map(|v| cell(*v))).chain(std::iter::once(cell(r.walltime_ms))).collect()
        })
        .collect();
    let csv_path = outdir.join(CONVERGENCE_CSV);
    write_csv(&csv_path, &header, &rows)?;
    let json_path = outdir.join(RATES_JSON);
    write_json(&json_path, document)?;
    let plot_path = outdir.join(PLOT_SCRIPT);
    fs::write(&plot_path, plot_script(metric_columns, fits)).map_err(|e| Error::io(&plot_path, e))?;
    Ok(vec![csv_path, json_path, plot_path])
}

/// Gnuplot script with a log-log and a semilog panel over `convergence.csv`,
/// overlaying each successful fit.
pub fn plot_script(metric_columns: &[String], fits: &BTreeMap<String, Vec<FitOutcome>>) -> String {
    let mut s = String::new();
    s.push_str("# Render with: gnuplot plot.gp\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 1400,600\n");
    s.push_str("set output 'convergence.png'\n");
    s.push_str("set multiplot layout 1,2\n");
    s.push_str("set key top right\n");
    s.push_str("set xlabel 'N'\n");
    s.push_str("set ylabel 'error'\n");
    s.push_str("set format y '10^{%L}'\n");

    let mut fit_defs = Vec::new();
    let mut curves = |model: RateModel| -> Vec<String> {
        let mut out = Vec::new();
        for (i, col) in metric_columns.iter().enumerate() {
            out.push(format!("'convergence.csv' using 1:{} skip 1 with linespoints title '{}'", i + 2, col));
            for fit in fits.get(col).into_iter().flatten().filter_map(FitOutcome::fit).filter(|f| f.model == model) {
                let name = format!("fit{}_{}", i + 2, if model == RateModel::Power { "pow" } else { "exp" });
                let expr = match model {
                    RateModel::Power => format!("{}(x) = {} * x**({})", name, format_float(fit.coefficient), format_float(fit.slope)),
                    RateModel::Exponential => format!("{}(x) = {} * 10**({} * x)", name, format_float(fit.coefficient), format_float(fit.slope)),
                };
                fit_defs.push(expr);
                let label = match model {
                    RateModel::Power => format!("{col} fit N^{{{:.2}}}", fit.slope),
                    RateModel::Exponential => format!("{col} fit 10^{{{:.3}N}}", fit.slope),
                };
                out.push(format!("{name}(x) with lines dashtype 2 title '{label}'"));
            }
        }
        out
    };
    let power = curves(RateModel::Power);
    let exponential = curves(RateModel::Exponential);
    for d in &fit_defs {
        s.push_str(d);
        s.push('\n');
    }
    s.push_str("set title 'log-log'\nset logscale xy\n");
    s.push_str(&format!("plot {}\n", power.join(", \\\n     ")));
    s.push_str("unset logscale\nset title 'semilog'\nset logscale y\n");
    s.push_str(&format!("plot {}\n", exponential.join(", \\\n     ")));
    s.push_str("unset multiplot\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        let v = 2.0f64.sqrt();
        assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn empty_records_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let doc = BTreeMap::<String, f64>::new();
        emit_outputs(dir.path(), &["w1".into()], &[], &BTreeMap::new(), &doc).unwrap();
        let text = fs::read_to_string(dir.path().join(CONVERGENCE_CSV)).unwrap();
        assert_eq!(text, "N,w1,walltime_ms\n");
    }

    #[test]
    fn rows_and_quoting() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&path, &["a,b".into(), "c".into()], &[vec!["1".into(), "".into()]]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "\"a,b\",c\n1,\n");
        let rec = ConvergenceRecord { n: 8, values: vec![Some(0.5), None], walltime_ms: None, failure: None };
        emit_outputs(dir.path(), &["w1".into(), "l1pdf".into()], &[rec], &BTreeMap::new(), &"x").unwrap();
        let text = fs::read_to_string(dir.path().join(CONVERGENCE_CSV)).unwrap();
        assert_eq!(text, "N,w1,l1pdf,walltime_ms\n8,5.0000000000000000e-1,,\n");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn plot_mentions_every_column() {
        let fit = fit_rate(&[1.0, 2.0, 4.0], &[1.0, 0.25, 0.0625], RateModel::Power).unwrap();
        let fits = BTreeMap::from([("w1".to_string(), vec![FitOutcome::Fit(fit)])]);
        let s = plot_script(&["w1".into(), "w2".into()], &fits);
        assert!(s.contains("using 1:2") && s.contains("using 1:3") && s.contains("fit2_pow(x) ="));
    }
}
