//! Attribute spaces the clustering loop runs over, and the weighted
//! object-to-prototype distance.

use serde::{Deserialize, Serialize};

use crate::base_distance::BaseDistanceTable;
use crate::projection::{value_distance, ReconstructedSpace};
use crate::schema::{AttributeKind, Column, Dataset};

use super::prototypes::Prototypes;

/// Features derived from one original attribute. Categorical groups carry one
/// v×v value-distance matrix per feature; all of them compare against the
/// attribute's single mode in the prototype.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupKind {
    Numeric,
    Categorical { values: usize, dists: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGroup {
    pub attr: usize,
    /// Index of the group's first feature in the weight vector.
    pub offset: usize,
    pub kind: GroupKind,
}

impl FeatureGroup {
    pub fn len(&self) -> usize {
        match &self.kind {
            GroupKind::Numeric => 1,
            GroupKind::Categorical { dists, .. } => dists.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordered feature list: weight index r addresses feature r.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    groups: Vec<FeatureGroup>,
    dim: usize,
}

impl FeatureSpace {
    fn from_groups(parts: Vec<(usize, GroupKind)>) -> Self {
        let mut offset = 0;
        let groups = parts
            .into_iter()
            .map(|(attr, kind)| {
                let g = FeatureGroup { attr, offset, kind };
                offset += g.len();
                g
            })
            .filter(|g| !g.is_empty())
            .collect();
        Self { groups, dim: offset }
    }

    /// Numerical pass-through attributes followed by every projected sub-attribute.
    pub fn reconstructed(space: &ReconstructedSpace, dataset: &Dataset) -> Self {
        let mut parts: Vec<(usize, GroupKind)> = space.numerical().iter().map(|&a| (a, GroupKind::Numeric)).collect();
        for &(source, _) in space.gamma() {
            let v = dataset.value_count(source);
            let dists = space
                .sub_attributes()
                .iter()
                .filter(|s| s.source == source)
                .map(|s| {
                    let mut m = vec![0.0; v * v];
                    for x in 0..v {
                        for y in 0..v {
                            m[x * v + y] = value_distance(s, x, y);
                        }
                    }
                    m
                })
                .collect();
            parts.push((source, GroupKind::Categorical { values: v, dists }));
        }
        Self::from_groups(parts)
    }

    /// Manhattan on numerical attributes, 0/1 mismatch on categorical ones, in schema order.
    pub fn hamming(dataset: &Dataset) -> Self {
        let parts = (0..dataset.d())
            .map(|r| match dataset.kind(r) {
                AttributeKind::Numerical => (r, GroupKind::Numeric),
                _ => {
                    let v = dataset.value_count(r);
                    let m = (0..v * v).map(|i| f64::from(u8::from(i / v != i % v))).collect();
                    (r, GroupKind::Categorical { values: v, dists: vec![m] })
                }
            })
            .collect();
        Self::from_groups(parts)
    }

    /// Base distances used directly, each attribute's matrix scaled so its largest entry is 1.
    pub fn base_distance(dataset: &Dataset, table: &BaseDistanceTable) -> Self {
        let parts = (0..dataset.d())
            .map(|r| match table.get(r) {
                None => (r, GroupKind::Numeric),
                Some(kappa) => {
                    let v = kappa.size();
                    let max = kappa.max();
                    let m = (0..v * v)
                        .map(|i| {
                            let raw = kappa.get(i / v, i % v);
                            if max > 0.0 {
                                raw / max
                            } else {
                                raw
                            }
                        })
                        .collect();
                    (r, GroupKind::Categorical { values: v, dists: vec![m] })
                }
            })
            .collect();
        Self::from_groups(parts)
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.groups
    }

    /// Number of features (d̂ for the reconstructed space).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// φ_r(x_i, m_l) for every feature r, written into `out` (length `dim`).
    pub fn feature_distances(&self, dataset: &Dataset, i: usize, protos: &Prototypes, l: usize, out: &mut [f64]) {
        for g in &self.groups {
            match (&g.kind, dataset.column(g.attr)) {
                (GroupKind::Numeric, Column::Numerical(x)) => {
                    out[g.offset] = (x[i] - protos.numeric(g.attr, l)).abs();
                }
                (GroupKind::Categorical { values, dists }, Column::Categorical(x)) => {
                    let idx = x[i] as usize * values + protos.mode(g.attr, l) as usize;
                    for (k, m) in dists.iter().enumerate() {
                        out[g.offset + k] = m[idx];
                    }
                }
                _ => unreachable!("feature group kind matches column storage"),
            }
        }
    }
}

/// Attribute weights: one simplex vector shared by all clusters, or one row per cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Weights {
    Vector(Vec<f64>),
    Matrix { k: usize, dim: usize, data: Vec<f64> },
}

impl Weights {
    pub fn uniform_vector(dim: usize) -> Self {
        Weights::Vector(vec![1.0 / dim as f64; dim])
    }

    pub fn uniform_matrix(k: usize, dim: usize) -> Self {
        Weights::Matrix {
            k,
            dim,
            data: vec![1.0 / dim as f64; k * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        Weights::Matrix {
            k: rows.len(),
            dim: rows.first().map(Vec::len).unwrap_or(0),
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Weights applied when measuring distance to cluster `l`.
    pub fn row(&self, l: usize) -> &[f64] {
        match self {
            Weights::Vector(w) => w,
            Weights::Matrix { dim, data, .. } => &data[l * dim..(l + 1) * dim],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Weights::Vector(w) => w.len(),
            Weights::Matrix { dim, .. } => *dim,
        }
    }

    /// Largest deviation of any row sum from 1, and whether every entry is non-negative.
    pub fn simplex_error(&self) -> (f64, bool) {
        let rows: Vec<&[f64]> = match self {
            Weights::Vector(w) => vec![w.as_slice()],
            Weights::Matrix { k, .. } => (0..*k).map(|l| self.row(l)).collect(),
        };
        let err = rows.iter().map(|r| (r.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
        let nonneg = rows.iter().all(|r| r.iter().all(|&w| w >= 0.0));
        (err, nonneg)
    }
}

/// Φ_w(x_i, m_l) = Σ_r φ_r(x_i, m_l)·w_r, evaluated feature by feature.
pub fn weighted_distance(
    dataset: &Dataset,
    i: usize,
    l: usize,
    weights: &Weights,
    space: &FeatureSpace,
    protos: &Prototypes,
) -> f64 {
    let mut phi = vec![0.0; space.dim()];
    space.feature_distances(dataset, i, protos, l, &mut phi);
    phi.iter().zip(weights.row(l)).map(|(p, w)| p * w).sum()
}

/// Per-cluster lookup tables collapsing the weighted sub-attribute sum of each
/// categorical attribute into one entry per possible value of the object.
pub(crate) struct DistanceLookup {
    /// [cluster][group] → per-value cost (categorical) or the weight (numeric).
    tables: Vec<Vec<Vec<f64>>>,
}

impl DistanceLookup {
    pub fn new(space: &FeatureSpace, protos: &Prototypes, weights: &Weights) -> Self {
        let tables = (0..protos.k())
            .map(|l| {
                let w = weights.row(l);
                space
                    .groups
                    .iter()
                    .map(|g| match &g.kind {
                        GroupKind::Numeric => vec![w[g.offset]],
                        GroupKind::Categorical { values, dists } => {
                            let m = protos.mode(g.attr, l) as usize;
                            (0..*values)
                                .map(|x| {
                                    dists
                                        .iter()
                                        .enumerate()
                                        .map(|(k, d)| d[x * values + m] * w[g.offset + k])
                                        .sum()
                                })
                                .collect()
                        }
                    })
                    .collect()
            })
            .collect();
        Self { tables }
    }

    pub fn distance(&self, space: &FeatureSpace, dataset: &Dataset, protos: &Prototypes, i: usize, l: usize) -> f64 {
        let t = &self.tables[l];
        let mut total = 0.0;
        for (g, table) in space.groups.iter().zip(t) {
            total += match dataset.column(g.attr) {
                Column::Numerical(x) => table[0] * (x[i] - protos.numeric(g.attr, l)).abs(),
                Column::Categorical(x) => table[x[i] as usize],
            };
        }
        total
    }
}

/// Cluster labels, zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub labels: Vec<u32>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self, k: usize) -> Vec<usize> {
        let mut s = vec![0; k];
        for &l in &self.labels {
            s[l as usize] += 1;
        }
        s
    }
}

/// Assigns each object to its nearest prototype; ties go to the lowest cluster index.
pub fn assign(dataset: &Dataset, space: &FeatureSpace, protos: &Prototypes, weights: &Weights) -> Partition {
    assign_with_cost(dataset, space, protos, weights).0
}

/// Assignment plus the resulting objective z.
pub(crate) fn assign_with_cost(
    dataset: &Dataset,
    space: &FeatureSpace,
    protos: &Prototypes,
    weights: &Weights,
) -> (Partition, f64) {
    let lookup = DistanceLookup::new(space, protos, weights);
    let mut z = 0.0;
    let labels = (0..dataset.n())
        .map(|i| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for l in 0..protos.k() {
                let d = lookup.distance(space, dataset, protos, i, l);
                if d < best_d {
                    best_d = d;
                    best = l;
                }
            }
            z += best_d;
            best as u32
        })
        .collect();
    (Partition { labels }, z)
}

/// z = Σ_i Φ_w(x_i, m_{q_i}).
pub fn objective(dataset: &Dataset, space: &FeatureSpace, protos: &Prototypes, weights: &Weights, partition: &Partition) -> f64 {
    let lookup = DistanceLookup::new(space, protos, weights);
    partition
        .labels
        .iter()
        .enumerate()
        .map(|(i, &l)| lookup.distance(space, dataset, protos, i, l as usize))
        .sum()
}
