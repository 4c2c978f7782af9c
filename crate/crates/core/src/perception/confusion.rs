//! Confusion matrices used as label-emission models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::labels::normalize_label;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfusionError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("matrix is not square: {labels} labels but {rows} rows")]
    NonSquare { labels: usize, rows: usize },
    #[error("row `{row}` has {found} values, expected {expected}")]
    RowLength { row: String, expected: usize, found: usize },
    #[error("row `{row}`, column `{col}`: invalid number `{value}`")]
    Number { row: String, col: String, value: String },
    #[error("row `{row}`, column `{col}`: negative entry")]
    Negative { row: String, col: String },
    #[error("row `{0}` is all zero")]
    ZeroRow(String),
    #[error("row label `{0}` does not match any column label")]
    LabelMismatch(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
}

/// Row-stochastic matrix: `rows[i][j]` is P(predicted = labels[j] | true = labels[i]).
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    rows: Vec<Vec<f64>>,
    raw_sums: Vec<f64>,
}

impl ConfusionMatrix {
    /// Builds a matrix from raw (unnormalized) rows in label order.
    pub fn from_rows(labels: Vec<String>, raw: Vec<Vec<f64>>) -> Result<Self, ConfusionError> {
        if raw.len() != labels.len() {
            return Err(ConfusionError::NonSquare { labels: labels.len(), rows: raw.len() });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ConfusionError::DuplicateLabel(l.clone()));
            }
        }
        let mut rows = Vec::with_capacity(raw.len());
        let mut raw_sums = Vec::with_capacity(raw.len());
        for (label, row) in labels.iter().zip(raw) {
            if row.len() != labels.len() {
                return Err(ConfusionError::RowLength { row: label.clone(), expected: labels.len(), found: row.len() });
            }
            if let Some(j) = row.iter().position(|v| *v < 0.0 || !v.is_finite()) {
                return Err(ConfusionError::Negative { row: label.clone(), col: labels[j].clone() });
            }
            let sum: f64 = row.iter().sum();
            if sum <= 0.0 {
                return Err(ConfusionError::ZeroRow(label.clone()));
            }
            if (sum - 100.0).abs() > 2.0 && (sum - 1.0).abs() > 1e-6 {
                log::info!("confusion row `{label}` sums to {sum:.2}; normalizing");
            }
            raw_sums.push(sum);
            rows.push(row.iter().map(|v| v / sum).collect());
        }
        Ok(ConfusionMatrix { labels, rows, raw_sums })
    }

    pub fn identity<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let raw = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::from_rows(labels, raw).expect("identity matrix is valid")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Row sums before normalization.
    pub fn raw_sums(&self) -> &[f64] {
        &self.raw_sums
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        let n = normalize_label(label);
        self.labels.iter().position(|l| *l == n)
    }

    pub fn row(&self, label: &str) -> Option<&[f64]> {
        self.index_of(label).map(|i| self.rows[i].as_slice())
    }

    /// Draws a predicted label for `true_label`.
    pub fn sample<R: Rng + ?Sized>(&self, true_label: &str, rng: &mut R) -> Result<&str, ConfusionError> {
        let i = self
            .index_of(true_label)
            .ok_or_else(|| ConfusionError::UnknownLabel(true_label.to_string()))?;
        Ok(&self.labels[self.sample_index(i, rng)])
    }

    fn sample_index<R: Rng + ?Sized>(&self, row: usize, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (j, p) in self.rows[row].iter().enumerate() {
            if *p > 0.0 {
                last = j;
                acc += p;
                if u < acc {
                    return j;
                }
            }
        }
        last
    }
}

/// Reads a CSV matrix: header row of predicted labels (first cell names the
/// true-label column), then one row per true label. `#` lines are comments.
pub fn load_confusion(text: &str) -> Result<ConfusionMatrix, ConfusionError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| ConfusionError::Csv(e.to_string()))?.clone();
    let labels: Vec<String> = header.iter().skip(1).map(normalize_label).collect();
    let mut by_label: Vec<Option<Vec<f64>>> = vec![None; labels.len()];
    let mut count = 0;
    for record in reader.records() {
        let record = record.map_err(|e| ConfusionError::Csv(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        count += 1;
        let row_label = normalize_label(record.get(0).unwrap_or(""));
        let values = record
            .iter()
            .skip(1)
            .zip(labels.iter().chain(std::iter::repeat(&String::new())))
            .map(|(v, col)| {
                v.parse::<f64>().map_err(|_| ConfusionError::Number {
                    row: row_label.clone(),
                    col: col.clone(),
                    value: v.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let idx = labels
            .iter()
            .position(|l| *l == row_label)
            .ok_or_else(|| ConfusionError::LabelMismatch(row_label.clone()))?;
        if by_label[idx].replace(values).is_some() {
            return Err(ConfusionError::DuplicateLabel(row_label));
        }
    }
    if count != labels.len() || by_label.iter().any(Option::is_none) {
        return Err(ConfusionError::NonSquare { labels: labels.len(), rows: count });
    }
    ConfusionMatrix::from_rows(labels, by_label.into_iter().map(Option::unwrap).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowEvaluation {
    pub label: String,
    pub expected: Vec<f64>,
    pub observed: Vec<f64>,
    pub counts: Vec<u64>,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorEvaluation {
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<RowEvaluation>,
    pub max_deviation: f64,
}

/// Draws `samples` predictions per true label and compares the empirical
/// frequencies with the matrix rows (L-infinity distance).
pub fn evaluate_sensor(cm: &ConfusionMatrix, samples: u64, seed: u64) -> SensorEvaluation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cm.labels.len();
    let mut rows = Vec::with_capacity(n);
    for (i, label) in cm.labels.iter().enumerate() {
        let mut counts = vec![0u64; n];
        for _ in 0..samples {
            counts[cm.sample_index(i, &mut rng)] += 1;
        }
        let observed: Vec<f64> = counts.iter().map(|&c| c as f64 / samples.max(1) as f64).collect();
        let deviation = observed
            .iter()
            .zip(&cm.rows[i])
            .map(|(o, e)| (o - e).abs())
            .fold(0.0, f64::max);
        rows.push(RowEvaluation { label: label.clone(), expected: cm.rows[i].clone(), observed, counts, deviation });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    SensorEvaluation { samples, seed, rows, max_deviation }
}
