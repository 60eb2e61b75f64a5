use crate::schema::{Column, Dataset};

use super::space::{DistanceLookup, FeatureSpace, Partition, Weights};

#[derive(Debug, Clone, PartialEq)]
enum ProtoColumn {
    Numeric(Vec<f64>),
    Mode(Vec<u32>),
}

/// Cluster representatives: means of numerical attributes, modes of categorical ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Prototypes {
    k: usize,
    columns: Vec<ProtoColumn>,
}

impl Prototypes {
    /// Prototype l copies object `objects[l]`.
    pub fn from_objects(dataset: &Dataset, objects: &[usize]) -> Self {
        let columns = (0..dataset.d())
            .map(|r| match dataset.column(r) {
                Column::Numerical(x) => ProtoColumn::Numeric(objects.iter().map(|&i| x[i]).collect()),
                Column::Categorical(x) => ProtoColumn::Mode(objects.iter().map(|&i| x[i]).collect()),
            })
            .collect();
        Self {
            k: objects.len(),
            columns,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn numeric(&self, attr: usize, l: usize) -> f64 {
        match &self.columns[attr] {
            ProtoColumn::Numeric(m) => m[l],
            ProtoColumn::Mode(_) => panic!("attribute {attr} is categorical"),
        }
    }

    /// Zero-based mode of categorical attribute `attr` in cluster `l`.
    pub fn mode(&self, attr: usize, l: usize) -> u32 {
        match &self.columns[attr] {
            ProtoColumn::Mode(m) => m[l],
            ProtoColumn::Numeric(_) => panic!("attribute {attr} is numerical"),
        }
    }

    fn copy_object(&mut self, dataset: &Dataset, l: usize, i: usize) {
        for (r, col) in self.columns.iter_mut().enumerate() {
            match (col, dataset.column(r)) {
                (ProtoColumn::Numeric(m), Column::Numerical(x)) => m[l] = x[i],
                (ProtoColumn::Mode(m), Column::Categorical(x)) => m[l] = x[i],
                _ => unreachable!(),
            }
        }
    }
}

/// Recomputes prototypes from a partition. Also returns the clusters that ended up
/// empty; their prototypes are left as in `previous`.
pub fn update_prototypes(dataset: &Dataset, partition: &Partition, previous: &Prototypes) -> (Prototypes, Vec<usize>) {
    let k = previous.k();
    let sizes = partition.sizes(k);
    let columns = (0..dataset.d())
        .map(|r| match (dataset.column(r), &previous.columns[r]) {
            (Column::Numerical(x), ProtoColumn::Numeric(prev)) => {
                let mut sums = vec![0.0; k];
                for (&l, &v) in partition.labels.iter().zip(x) {
                    sums[l as usize] += v;
                }
                ProtoColumn::Numeric(
                    (0..k)
                        .map(|l| if sizes[l] > 0 { sums[l] / sizes[l] as f64 } else { prev[l] })
                        .collect(),
                )
            }
            (Column::Categorical(x), ProtoColumn::Mode(prev)) => {
                let v = dataset.value_count(r);
                let mut counts = vec![0usize; k * v];
                for (&l, &c) in partition.labels.iter().zip(x) {
                    counts[l as usize * v + c as usize] += 1;
                }
                ProtoColumn::Mode(
                    (0..k)
                        .map(|l| {
                            if sizes[l] == 0 {
                                return prev[l];
                            }
                            let row = &counts[l * v..(l + 1) * v];
                            // first maximum wins ties
                            let mut best = 0;
                            for (u, &c) in row.iter().enumerate() {
                                if c > row[best] {
                                    best = u;
                                }
                            }
                            best as u32
                        })
                        .collect(),
                )
            }
            _ => unreachable!(),
        })
        .collect();
    let empty = (0..k).filter(|&l| sizes[l] == 0).collect();
    (Prototypes { k, columns }, empty)
}

/// Moves each empty cluster's prototype onto the object currently farthest from
/// its own prototype, taken only from clusters with more than one member.
pub fn reseed_empty(
    dataset: &Dataset,
    space: &FeatureSpace,
    protos: &mut Prototypes,
    weights: &Weights,
    partition: &Partition,
    empty: &[usize],
) {
    if empty.is_empty() {
        return;
    }
    let mut sizes = partition.sizes(protos.k());
    let lookup = DistanceLookup::new(space, protos, weights);
    let dist: Vec<f64> = partition
        .labels
        .iter()
        .enumerate()
        .map(|(i, &l)| lookup.distance(space, dataset, protos, i, l as usize))
        .collect();
    let mut taken = vec![false; dataset.n()];
    for &l in empty {
        let pick = (0..dataset.n())
            .filter(|&i| !taken[i] && sizes[partition.labels[i] as usize] > 1)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if dist[b] >= dist[i] => Some(b),
                _ => Some(i),
            });
        if let Some(i) = pick {
            log::debug!("cluster {} empty, reseeded with object {}", l + 1, i + 1);
            protos.copy_object(dataset, l, i);
            sizes[partition.labels[i] as usize] -= 1;
            taken[i] = true;
        }
    }
}
