//! Base distances between the possible values of each categorical attribute.
//!
//! Two values of an attribute are far apart when the conditional distributions
//! they induce on every attribute (itself included, numerical attributes through
//! their discretized bins) differ. The distance is the summed L1 gap between
//! those distributions.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::schema::{AttributeKind, Dataset, OrdinalView};

/// p(context value j | target value g) for one (target, context) attribute pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CpdTable {
    target_levels: usize,
    context_levels: usize,
    probs: Vec<f64>,
    counts: Vec<usize>,
}

impl CpdTable {
    pub fn target_levels(&self) -> usize {
        self.target_levels
    }

    pub fn context_levels(&self) -> usize {
        self.context_levels
    }

    pub fn get(&self, g: usize, j: usize) -> f64 {
        self.probs[g * self.context_levels + j]
    }

    pub fn row(&self, g: usize) -> &[f64] {
        &self.probs[g * self.context_levels..(g + 1) * self.context_levels]
    }

    /// Number of objects taking target value `g`.
    pub fn count(&self, g: usize) -> usize {
        self.counts[g]
    }

    /// False when value `g` never occurs; its row is then all zeros.
    pub fn observed(&self, g: usize) -> bool {
        self.counts[g] > 0
    }
}

/// Conditional distribution of `context` given each value of the categorical `target`.
pub fn compute_cpd(dataset: &Dataset, view: &OrdinalView, target: usize, context: usize) -> Result<CpdTable> {
    if !dataset.kind(target).is_categorical() {
        return Err(Error::NotCategorical(target));
    }
    let t = view.column(target);
    let c = view.column(context);
    let (vt, vc) = (t.levels, c.levels);
    let mut joint = vec![0usize; vt * vc];
    let mut counts = vec![0usize; vt];
    for (&g, &j) in t.codes.iter().zip(&c.codes) {
        joint[g as usize * vc + j as usize] += 1;
        counts[g as usize] += 1;
    }
    let probs = joint
        .iter()
        .enumerate()
        .map(|(idx, &cnt)| {
            let denom = counts[idx / vc];
            if denom == 0 {
                0.0
            } else {
                cnt as f64 / denom as f64
            }
        })
        .collect();
    Ok(CpdTable {
        target_levels: vt,
        context_levels: vc,
        probs,
        counts,
    })
}

/// Symmetric v×v matrix of base distances for one attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaMatrix {
    v: usize,
    data: Vec<f64>,
}

impl KappaMatrix {
    /// Builds from a dense row-major matrix. Symmetry and the zero diagonal are the caller's problem.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let v = rows.len();
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { v, data }
    }

    pub fn zeros(v: usize) -> Self {
        Self {
            v,
            data: vec![0.0; v * v],
        }
    }

    pub fn size(&self) -> usize {
        self.v
    }

    pub fn get(&self, g: usize, h: usize) -> f64 {
        self.data[g * self.v + h]
    }

    fn set_pair(&mut self, g: usize, h: usize, value: f64) {
        self.data[g * self.v + h] = value;
        self.data[h * self.v + g] = value;
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Comma-separated rows, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for g in 0..self.v {
            let row: Vec<String> = (0..self.v).map(|h| format!("{:.11e}", self.get(g, h))).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

fn all_cpds(dataset: &Dataset, view: &OrdinalView, r: usize) -> Result<Vec<CpdTable>> {
    (0..dataset.d()).map(|s| compute_cpd(dataset, view, r, s)).collect()
}

fn cpd_gap(cpds: &[CpdTable], g: usize, h: usize) -> f64 {
    cpds.iter()
        .map(|cpd| cpd.row(g).iter().zip(cpd.row(h)).map(|(a, b)| (a - b).abs()).sum::<f64>())
        .sum()
}

fn warn_unobserved(dataset: &Dataset, r: usize, cpd: &CpdTable) {
    let missing: Vec<&str> = (0..cpd.target_levels())
        .filter(|&g| !cpd.observed(g))
        .map(|g| dataset.schema().attribute(r).values[g].as_str())
        .collect();
    if !missing.is_empty() {
        log::warn!(
            "attribute `{}`: values never observed ({}); their conditional distributions are all zero",
            dataset.schema().attribute(r).name,
            missing.join(", ")
        );
    }
}

/// Base distances of a nominal attribute: every value pair compared directly.
pub fn base_distance_nominal(dataset: &Dataset, view: &OrdinalView, r: usize) -> Result<KappaMatrix> {
    let cpds = all_cpds(dataset, view, r)?;
    warn_unobserved(dataset, r, &cpds[r]);
    let v = dataset.value_count(r);
    let mut kappa = KappaMatrix::zeros(v);
    for g in 0..v {
        for h in g + 1..v {
            kappa.set_pair(g, h, cpd_gap(&cpds, g, h));
        }
    }
    Ok(kappa)
}

/// Base distances of an ordinal attribute: adjacent-rank gaps, accumulated along the order.
pub fn base_distance_ordinal(dataset: &Dataset, view: &OrdinalView, r: usize) -> Result<KappaMatrix> {
    let cpds = all_cpds(dataset, view, r)?;
    warn_unobserved(dataset, r, &cpds[r]);
    let v = dataset.value_count(r);
    let adjacent: Vec<f64> = (0..v.saturating_sub(1)).map(|s| cpd_gap(&cpds, s, s + 1)).collect();
    Ok(accumulate_adjacent(&adjacent))
}

/// Additive matrix from adjacent gaps: entry (g,h) is the left-to-right sum of gaps g..h-1.
pub fn accumulate_adjacent(adjacent: &[f64]) -> KappaMatrix {
    let v = adjacent.len() + 1;
    let mut kappa = KappaMatrix::zeros(v);
    for g in 0..v {
        let mut acc = 0.0;
        for h in g + 1..v {
            acc += adjacent[h - 1];
            kappa.set_pair(g, h, acc);
        }
    }
    kappa
}

/// One base-distance matrix per categorical attribute; numerical attributes get none.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseDistanceTable {
    matrices: Vec<Option<KappaMatrix>>,
}

impl BaseDistanceTable {
    pub fn get(&self, r: usize) -> Option<&KappaMatrix> {
        self.matrices[r].as_ref()
    }

    /// Number of attributes carrying a matrix.
    pub fn len(&self) -> usize {
        self.matrices.iter().filter(|m| m.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &KappaMatrix)> {
        self.matrices.iter().enumerate().filter_map(|(r, m)| m.as_ref().map(|m| (r, m)))
    }

    /// Debug dump, one (attribute name, csv text) entry per matrix.
    pub fn dump(&self, dataset: &Dataset) -> Vec<(String, String)> {
        self.iter()
            .map(|(r, m)| (dataset.schema().attribute(r).name.clone(), m.to_csv()))
            .collect()
    }
}

/// Routes each categorical attribute to the nominal or ordinal construction.
/// Expects a normalized dataset and its ordinal view.
pub fn build_base_distances(dataset: &Dataset, view: &OrdinalView) -> Result<BaseDistanceTable> {
    let matrices = (0..dataset.d())
        .into_par_iter()
        .map(|r| match dataset.kind(r) {
            AttributeKind::Numerical => Ok(None),
            AttributeKind::Nominal => base_distance_nominal(dataset, view, r).map(Some),
            AttributeKind::Ordinal => base_distance_ordinal(dataset, view, r).map(Some),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaseDistanceTable { matrices })
}
