//! CSV dataset ingestion and selection export.

use crate::domain::dataset::Dataset;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::io::Write;
use std::path::Path;

/// A standardized dataset plus the transform that produced it, so selection
/// decisions are reproducible on re-ingestion.
#[derive(Debug, Clone)]
pub struct IngestedDataset {
    pub dataset: Dataset,
    pub feature_names: Vec<String>,
    pub means: Vec<f64>,
    /// Population standard deviations (denominator N).
    pub sds: Vec<f64>,
    pub label_column: Option<String>,
}

/// Read a headed CSV: every numeric column is a feature unless it is the
/// named label column. Features are standardized columnwise (center + unit
/// variance, denominator N); labels {0,1} are remapped to {−1,+1}, labels
/// already in ±1 pass through.
pub fn read_dataset_csv(path: &Path, label_column: Option<&str>) -> Result<IngestedDataset> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(|s| s.to_string()).collect();
    let label_idx = match label_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::invalid(format!("label column {name:?} not found")))?,
        ),
        None => None,
    };
    let mut raw: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<f64> = Vec::new();
    for (ri, record) in rdr.records().enumerate() {
        let rec = record?;
        let mut rowv = Vec::with_capacity(headers.len());
        for (ci, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Data {
                row: ri,
                column: headers.get(ci).cloned().unwrap_or_default(),
                message: format!("non-numeric cell {field:?}"),
            })?;
            if Some(ci) == label_idx {
                labels.push(v);
            } else {
                rowv.push(v);
            }
        }
        raw.push(rowv);
    }
    if raw.is_empty() {
        return Err(Error::invalid("CSV has no data rows"));
    }
    let n = raw.len();
    let p = raw[0].len();
    if p == 0 {
        return Err(Error::invalid("CSV has no feature columns"));
    }
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(ci, _)| Some(*ci) != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    // Columnwise standardization with the population (1/N) variance.
    let mut means = vec![0.0; p];
    let mut sds = vec![0.0; p];
    for j in 0..p {
        let mean = raw.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = raw.iter().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<f64>() / n as f64;
        if var <= 0.0 {
            return Err(Error::Data {
                row: 0,
                column: feature_names[j].clone(),
                message: "constant column (zero variance)".into(),
            });
        }
        means[j] = mean;
        sds[j] = var.sqrt();
    }
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            x[(i, j)] = (raw[i][j] - means[j]) / sds[j];
        }
    }

    let label_vec = if label_idx.is_some() {
        let zero_one = labels.iter().all(|&y| y == 0.0 || y == 1.0);
        let pm_one = labels.iter().all(|&y| y == 1.0 || y == -1.0);
        if !zero_one && !pm_one {
            let bad = labels
                .iter()
                .position(|&y| y != 0.0 && y != 1.0 && y != -1.0)
                .unwrap_or(0);
            return Err(Error::Data {
                row: bad,
                column: label_column.unwrap_or("label").to_string(),
                message: format!("label must be in {{0,1}} or {{-1,+1}}, got {}", labels[bad]),
            });
        }
        let mapped: Vec<f64> = labels
            .iter()
            .map(|&y| if zero_one && !pm_one { 2.0 * y - 1.0 } else { y })
            .collect();
        Some(DVector::from_vec(mapped))
    } else {
        None
    };
    Ok(IngestedDataset {
        dataset: Dataset::new(x, label_vec)?,
        feature_names,
        means,
        sds,
        label_column: label_column.map(|s| s.to_string()),
    })
}

/// Per-sample selection export: index, π, weight, included.
#[derive(Debug, Clone, Copy)]
pub struct SelectionRow {
    pub index: usize,
    pub pi: f64,
    pub weight: f64,
    pub included: bool,
}

pub fn write_selection_csv(path: &Path, rows: &[SelectionRow]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "index,pi,weight,included")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.index,
            super::results::fmt_f64(r.pi),
            super::results::fmt_f64(r.weight),
            u8::from(r.included)
        )?;
    }
    out.flush()?;
    Ok(())
}
