//! CSV output for evolution metrics and optimizer traces, and the text
//! comparison report.

use std::fmt::Write as _;
use std::path::Path;

use polclass_core::accuracy::{Comparison, Improvement};
use polclass_core::diffusion::{EvolutionMetrics, IterationMetrics};
use polclass_core::weights::TraceEntry;

use crate::error::{Error, Result};

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_owned(), source }
}

/// Columns `iteration, mean_weighted_distance, changed_fraction`.
pub fn write_metrics_csv(metrics: &EvolutionMetrics, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["iteration", "mean_weighted_distance", "changed_fraction"]).map_err(csv_err(path))?;
    for m in &metrics.iterations {
        w.write_record([m.iteration.to_string(), m.mean_weighted_distance.to_string(), m.changed_fraction.to_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(Error::io(path))
}

pub fn read_metrics_csv(path: &Path) -> Result<EvolutionMetrics> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut iterations = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err(path))?;
        let bad = || Error::Csv {
            path: path.to_owned(),
            source: csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, "bad metrics row")),
        };
        let field = |i: usize| record.get(i).ok_or_else(bad);
        iterations.push(IterationMetrics {
            iteration: field(0)?.parse().map_err(|_| bad())?,
            mean_weighted_distance: field(1)?.parse().map_err(|_| bad())?,
            changed_fraction: field(2)?.parse().map_err(|_| bad())?,
        });
    }
    Ok(EvolutionMetrics { iterations })
}

/// Columns `iteration, energy, w1, ..., wM`.
pub fn write_trace_csv(trace: &[TraceEntry], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let m = trace.first().map_or(0, |t| t.weights.len());
    let mut header = vec!["iteration".to_owned(), "energy".to_owned()];
    header.extend((1..=m).map(|k| format!("w{k}")));
    w.write_record(&header).map_err(csv_err(path))?;
    for t in trace {
        let mut row = vec![t.iteration.to_string(), t.energy.to_string()];
        row.extend(t.weights.iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(Error::io(path))
}

fn improvement_cell(i: Improvement) -> String {
    match i {
        Improvement::Baseline => "(baseline)".into(),
        Improvement::Percent(p) => format!("({p:.1}%)"),
        Improvement::NotApplicable => String::new(),
    }
}

/// Table of accuracy (improvement) by class plus seconds per method.
pub fn format_report(cmp: &Comparison) -> String {
    let classes = cmp.baseline.len();
    let name_width = cmp.rows.iter().map(|r| r.method.len()).max().unwrap_or(6).max(6);
    let mut s = format!("{:<name_width$}", "method");
    for m in 1..=classes {
        let _ = write!(s, "  {:<20}", format!("class {m}"));
    }
    s.push_str("  seconds\n");
    for row in &cmp.rows {
        let _ = write!(s, "{:<name_width$}", row.method);
        for (a, i) in row.accuracy.iter().zip(&row.improvement) {
            let _ = write!(s, "  {:<20}", format!("{a:.1} {}", improvement_cell(*i)).trim_end().to_owned());
        }
        let _ = writeln!(s, "  {:.3}", row.seconds);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use polclass_core::accuracy::MethodResult;

    #[test]
    fn metrics_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let metrics = EvolutionMetrics {
            iterations: vec![
                IterationMetrics { iteration: 0, mean_weighted_distance: 6.25, changed_fraction: 0.0 },
                IterationMetrics { iteration: 1, mean_weighted_distance: 0.1 + 0.2, changed_fraction: 1.0 / 3.0 },
            ],
        };
        write_metrics_csv(&metrics, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("iteration,mean_weighted_distance,changed_fraction\n0,6.25,0\n"));
        assert_eq!(read_metrics_csv(&path).unwrap(), metrics);
    }

    #[test]
    fn report_layout() {
        let cmp = Comparison::new(vec![
            MethodResult { method: "ED".into(), accuracy: vec![100.0, 93.3], seconds: 0.005 },
            MethodResult { method: "ML".into(), accuracy: vec![100.0, 98.5], seconds: 0.17 },
        ])
        .unwrap();
        let report = format_report(&cmp);
        let lines: Vec<_> = report.lines().collect();
        assert!(lines[0].starts_with("method  class 1"));
        assert!(lines[1].contains("93.3 (baseline)"));
        assert!(lines[2].contains("98.5 (77.6%)"));
        assert!(lines[2].ends_with("0.170"));
    }
}
