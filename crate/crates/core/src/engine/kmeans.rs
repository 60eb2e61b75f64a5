//! Squared-Euclidean k-means over a one-hot encoding. Nominal values become
//! indicator columns, ordinal values map to (rank − 1)/(v − 1), numerical values pass through.

use crate::schema::{AttributeKind, Column, Dataset};

use super::run::{initial_objects, ObjectiveTrace, RunConfig, TraceEntry, TraceKind};
use super::space::Partition;

pub(crate) struct KMeansOutcome {
    pub partition: Partition,
    pub trace: ObjectiveTrace,
    pub iterations: usize,
    pub converged: bool,
}

/// Row-major n × width encoding.
pub fn one_hot_encode(dataset: &Dataset) -> (Vec<f64>, usize) {
    let width: usize = (0..dataset.d())
        .map(|r| match dataset.kind(r) {
            AttributeKind::Nominal => dataset.value_count(r),
            _ => 1,
        })
        .sum();
    let n = dataset.n();
    let mut out = vec![0.0; n * width];
    let mut offset = 0;
    for r in 0..dataset.d() {
        match (dataset.kind(r), dataset.column(r)) {
            (AttributeKind::Numerical, Column::Numerical(x)) => {
                for (i, &v) in x.iter().enumerate() {
                    out[i * width + offset] = v;
                }
                offset += 1;
            }
            (AttributeKind::Ordinal, Column::Categorical(x)) => {
                let top = (dataset.value_count(r) - 1) as f64;
                for (i, &c) in x.iter().enumerate() {
                    out[i * width + offset] = c as f64 / top;
                }
                offset += 1;
            }
            (AttributeKind::Nominal, Column::Categorical(x)) => {
                for (i, &c) in x.iter().enumerate() {
                    out[i * width + offset + c as usize] = 1.0;
                }
                offset += dataset.value_count(r);
            }
            _ => unreachable!(),
        }
    }
    (out, width)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn assign(points: &[f64], width: usize, centers: &[f64], k: usize) -> (Vec<u32>, Vec<f64>) {
    points
        .chunks_exact(width)
        .map(|p| {
            let mut best = (0u32, f64::INFINITY);
            for l in 0..k {
                let d = sq_dist(p, &centers[l * width..(l + 1) * width]);
                if d < best.1 {
                    best = (l as u32, d);
                }
            }
            best
        })
        .unzip()
}

pub(crate) fn run_ohe_oc(dataset: &Dataset, config: &RunConfig) -> KMeansOutcome {
    let k = config.k;
    let (points, width) = one_hot_encode(dataset);
    let mut centers: Vec<f64> = initial_objects(dataset.n(), k, config.seed)
        .into_iter()
        .flat_map(|i| points[i * width..(i + 1) * width].to_vec())
        .collect();
    let mut trace = ObjectiveTrace::default();
    let mut previous: Option<Vec<u32>> = None;
    let mut iterations = 0;
    let converged = loop {
        let (labels, dists) = assign(&points, width, &centers, k);
        trace.entries.push(TraceEntry {
            z: dists.iter().sum(),
            kind: TraceKind::Assign,
        });
        iterations += 1;
        if previous.as_ref() == Some(&labels) {
            break true;
        }
        if iterations > config.inner_cap {
            previous = Some(labels);
            break false;
        }
        let mut sums = vec![0.0; k * width];
        let mut sizes = vec![0usize; k];
        for (p, &l) in points.chunks_exact(width).zip(&labels) {
            sizes[l as usize] += 1;
            for (s, x) in sums[l as usize * width..].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut taken = vec![false; dataset.n()];
        for l in 0..k {
            let c = &mut centers[l * width..(l + 1) * width];
            if sizes[l] > 0 {
                for (ci, s) in c.iter_mut().zip(&sums[l * width..]) {
                    *ci = s / sizes[l] as f64;
                }
                continue;
            }
            // empty cluster: move to the farthest object of a cluster with spare members
            let pick = (0..dataset.n())
                .filter(|&i| !taken[i] && sizes[labels[i] as usize] > 1)
                .fold(None, |best: Option<usize>, i| match best {
                    Some(b) if dists[b] >= dists[i] => Some(b),
                    _ => Some(i),
                });
            if let Some(i) = pick {
                c.copy_from_slice(&points[i * width..(i + 1) * width]);
                sizes[labels[i] as usize] -= 1;
                taken[i] = true;
            }
        }
        previous = Some(labels);
    };
    if !converged {
        log::warn!("OHE+OC: iteration cap reached (seed {})", config.seed);
    }
    KMeansOutcome {
        partition: Partition {
            labels: previous.expect("at least one assignment ran"),
        },
        trace,
        iterations,
        converged,
    }
}
