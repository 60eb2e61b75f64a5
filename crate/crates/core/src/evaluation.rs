//! External validity indices and aggregation over seeded runs.

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

use crate::error::{Error, Result};

pub use crate::engine::ScorePair;

/// Counts n_ab of objects in predicted class a and true class b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contingency {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<u64>,
}

impl Contingency {
    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.cells[a * self.cols + b]
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    fn row_sums(&self) -> Vec<u64> {
        self.cells.chunks_exact(self.cols).map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<u64> {
        (0..self.cols).map(|b| (0..self.rows).map(|a| self.get(a, b)).sum()).collect()
    }
}

fn check_lengths(pred: &[u32], truth: &[u32]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

pub fn contingency(pred: &[u32], truth: &[u32]) -> Result<Contingency> {
    check_lengths(pred, truth)?;
    let rows = *pred.iter().max().unwrap() as usize + 1;
    let cols = *truth.iter().max().unwrap() as usize + 1;
    let mut cells = vec![0u64; rows * cols];
    for (&a, &b) in pred.iter().zip(truth) {
        cells[a as usize * cols + b as usize] += 1;
    }
    Ok(Contingency { rows, cols, cells })
}

fn pairs(x: u64) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Two partitions are equal up to relabelling when the contingency table has at
/// most one non-zero cell in every row and every column.
fn same_partition(table: &Contingency) -> bool {
    let per_row = (0..table.rows).all(|a| (0..table.cols).filter(|&b| table.get(a, b) > 0).count() <= 1);
    let per_col = (0..table.cols).all(|b| (0..table.rows).filter(|&a| table.get(a, b) > 0).count() <= 1);
    per_row && per_col
}

/// Adjusted Rand index. When the expected index equals its maximum (for instance
/// both partitions have a single cluster) the value is 1 for identical
/// partitions and 0 otherwise.
pub fn ari(pred: &[u32], truth: &[u32]) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let index: f64 = table.cells.iter().map(|&c| pairs(c)).sum();
    let a: f64 = table.row_sums().into_iter().map(pairs).sum();
    let b: f64 = table.col_sums().into_iter().map(pairs).sum();
    let total = pairs(table.total());
    let expected = a * b / total;
    let max = (a + b) / 2.0;
    if total == 0.0 || (max - expected).abs() <= f64::EPSILON * max.max(1.0) {
        log::warn!("ARI undefined for these partitions, using the identity fallback");
        return Ok(if same_partition(&table) { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / (max - expected))
}

/// Clustering accuracy: the fraction of objects on the diagonal under the best
/// one-to-one matching of predicted clusters to true classes.
pub fn ca(pred: &[u32], truth: &[u32]) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let size = table.rows.max(table.cols);
    let mut weights = Matrix::new(size, size, 0i64);
    for a in 0..table.rows {
        for b in 0..table.cols {
            weights[(a, b)] = table.get(a, b) as i64;
        }
    }
    let (matched, _) = kuhn_munkres(&weights);
    Ok(matched as f64 / table.total() as f64)
}

pub fn score(pred: &[u32], truth: &[u32]) -> Result<ScorePair> {
    Ok(ScorePair {
        ari: ari(pred, truth)?,
        ca: ca(pred, truth)?,
    })
}

/// Mean and sample standard deviation (zero for a single value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        let count = values.len();
        if count == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std, count })
    }
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.4} ± {:.4}", self.mean, self.std)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunAggregate {
    pub ari: Summary,
    pub ca: Summary,
}

pub fn aggregate_runs(scores: &[ScorePair]) -> Option<RunAggregate> {
    let ari: Vec<f64> = scores.iter().map(|s| s.ari).collect();
    let ca: Vec<f64> = scores.iter().map(|s| s.ca).collect();
    Some(RunAggregate {
        ari: Summary::of(&ari)?,
        ca: Summary::of(&ca)?,
    })
}
