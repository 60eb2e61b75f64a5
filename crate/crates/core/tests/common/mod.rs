#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use harr::schema::{AttributeKind, AttributeSchema, Column, Dataset, DatasetSchema};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random dataset with the given attribute kinds. Categorical attributes draw
/// 2..=max_v values; numerical values are uniform on a random range.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, kinds: &[AttributeKind], max_v: usize) -> Dataset {
    let mut attrs = Vec::new();
    let mut columns = Vec::new();
    for (r, &kind) in kinds.iter().enumerate() {
        match kind {
            AttributeKind::Numerical => {
                attrs.push(AttributeSchema::numerical(format!("a{r}")));
                let lo: f64 = rng.gen_range(-5.0..5.0);
                let span: f64 = rng.gen_range(0.1..10.0);
                // a coarse grid makes repeated values, and so ties, likely
                columns.push(Column::Numerical(
                    (0..n).map(|_| lo + span * (rng.gen_range(0..12) as f64 / 11.0)).collect(),
                ));
            }
            _ => {
                let v = rng.gen_range(2..=max_v);
                attrs.push(AttributeSchema::categorical_with_count(format!("a{r}"), kind, v));
                columns.push(Column::Categorical((0..n).map(|_| rng.gen_range(0..v as u32)).collect()));
            }
        }
    }
    Dataset::from_columns(DatasetSchema::new(attrs).unwrap(), columns).unwrap()
}

pub fn random_kinds(rng: &mut ChaCha8Rng, d: usize) -> Vec<AttributeKind> {
    let mut kinds: Vec<AttributeKind> = (0..d)
        .map(|_| match rng.gen_range(0..3) {
            0 => AttributeKind::Numerical,
            1 => AttributeKind::Nominal,
            _ => AttributeKind::Ordinal,
        })
        .collect();
    // keep at least one categorical attribute so there is something to reconstruct
    if kinds.iter().all(|k| *k == AttributeKind::Numerical) {
        kinds[0] = AttributeKind::Nominal;
    }
    kinds
}

pub fn random_simplex(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Value of attribute r for object i as a comparable key.
pub fn cell(ds: &Dataset, r: usize, i: usize) -> f64 {
    match ds.column(r) {
        Column::Numerical(x) => x[i],
        Column::Categorical(x) => x[i] as f64,
    }
}

pub fn same_row(ds: &Dataset, a: usize, b: usize) -> bool {
    (0..ds.d()).all(|r| cell(ds, r, a) == cell(ds, r, b))
}
