//! Attribute weight learning from intra-cluster compactness and inter-cluster separation.
//!
//! For feature r, D is the average distance of objects to their own prototype and
//! S the average distance to the other prototypes. Importance I = S / (D + ε) and the
//! weights are the importances normalized onto the simplex, either pooled over all
//! clusters (vector) or per cluster (matrix).

use crate::schema::{Column, Dataset};

use super::prototypes::Prototypes;
use super::space::{FeatureSpace, GroupKind, Partition, Weights};

pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Per-cluster, per-feature sums of φ_r over own members and over non-members.
struct DistanceSums {
    /// [l][r] Σ_{i∈c_l} φ_r(x_i, m_l)
    inside: Vec<Vec<f64>>,
    /// [l][r] Σ_{i∉c_l} φ_r(x_i, m_l)
    outside: Vec<Vec<f64>>,
}

fn distance_sums(dataset: &Dataset, space: &FeatureSpace, partition: &Partition, protos: &Prototypes) -> DistanceSums {
    let k = protos.k();
    let dim = space.dim();
    let mut inside = vec![vec![0.0; dim]; k];
    let mut outside = vec![vec![0.0; dim]; k];
    for g in space.groups() {
        match (&g.kind, dataset.column(g.attr)) {
            (GroupKind::Numeric, Column::Numerical(x)) => {
                for l in 0..k {
                    let m = protos.numeric(g.attr, l);
                    let (mut own, mut other) = (0.0, 0.0);
                    for (&xi, &q) in x.iter().zip(&partition.labels) {
                        let d = (xi - m).abs();
                        if q as usize == l {
                            own += d;
                        } else {
                            other += d;
                        }
                    }
                    inside[l][g.offset] = own;
                    outside[l][g.offset] = other;
                }
            }
            (GroupKind::Categorical { values, dists }, Column::Categorical(x)) => {
                // value counts per cluster turn the object sums into v-term sums
                let v = *values;
                let mut counts = vec![0usize; k * v];
                let mut totals = vec![0usize; v];
                for (&c, &q) in x.iter().zip(&partition.labels) {
                    counts[q as usize * v + c as usize] += 1;
                    totals[c as usize] += 1;
                }
                for l in 0..k {
                    let m = protos.mode(g.attr, l) as usize;
                    for (f, dist) in dists.iter().enumerate() {
                        let (mut own, mut other) = (0.0, 0.0);
                        for u in 0..v {
                            let d = dist[u * v + m];
                            let c = counts[l * v + u];
                            own += c as f64 * d;
                            other += (totals[u] - c) as f64 * d;
                        }
                        inside[l][g.offset + f] = own;
                        outside[l][g.offset + f] = other;
                    }
                }
            }
            _ => unreachable!("feature group kind matches column storage"),
        }
    }
    DistanceSums { inside, outside }
}

fn normalize_importance(importance: Vec<f64>, context: &str) -> Vec<f64> {
    let total: f64 = importance.iter().sum();
    let dim = importance.len();
    if total > 0.0 && total.is_finite() {
        importance.into_iter().map(|i| i / total).collect()
    } else {
        log::warn!("{context}: every attribute importance is zero, using uniform weights");
        vec![1.0 / dim as f64; dim]
    }
}

/// One weight per feature shared by all clusters. Requires k ≥ 2.
pub fn update_weight_vector(
    dataset: &Dataset,
    space: &FeatureSpace,
    partition: &Partition,
    protos: &Prototypes,
    epsilon: f64,
) -> Weights {
    let k = protos.k();
    let n = dataset.n() as f64;
    let sums = distance_sums(dataset, space, partition, protos);
    let importance = (0..space.dim())
        .map(|r| {
            let intra: f64 = (0..k).map(|l| sums.inside[l][r]).sum::<f64>() / n;
            let inter: f64 = (0..k).map(|l| sums.outside[l][r]).sum::<f64>() / (n * (k - 1) as f64);
            inter / (intra + epsilon)
        })
        .collect();
    Weights::Vector(normalize_importance(importance, "weight vector"))
}

/// One weight row per cluster. Rows of empty clusters, or of a cluster holding
/// every object, fall back to uniform.
pub fn update_weight_matrix(
    dataset: &Dataset,
    space: &FeatureSpace,
    partition: &Partition,
    protos: &Prototypes,
    epsilon: f64,
) -> Weights {
    let k = protos.k();
    let n = dataset.n();
    let dim = space.dim();
    let sizes = partition.sizes(k);
    let sums = distance_sums(dataset, space, partition, protos);
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|l| {
            let own = sizes[l];
            if own == 0 || own == n {
                log::warn!("cluster {} holds {own} of {n} objects, its weights stay uniform", l + 1);
                return vec![1.0 / dim as f64; dim];
            }
            let importance = (0..dim)
                .map(|r| {
                    let intra = sums.inside[l][r] / own as f64;
                    let inter = sums.outside[l][r] / (n - own) as f64;
                    inter / (intra + epsilon)
                })
                .collect();
            normalize_importance(importance, "weight matrix row")
        })
        .collect();
    Weights::from_rows(&rows)
}
