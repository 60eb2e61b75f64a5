//! Planted-cluster data generator.
//!
//! Each of the k true clusters gets a center. Numerical centers sit at
//! (l + 0.5)/k under a seeded per-attribute permutation. Categorical centers
//! pick distinct preferred values when v ≥ k; with fewer values the cluster
//! index is spread over base-v digits across attributes. A generated value
//! equals the center's with probability `separation` and is uniform otherwise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::schema::{AttributeKind, AttributeSchema, Column, Dataset, DatasetSchema};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub k_true: usize,
    /// Numerical attributes.
    pub d_u: usize,
    /// Nominal attributes.
    pub d_n: usize,
    /// Ordinal attributes.
    pub d_o: usize,
    /// Values per categorical attribute.
    pub values: usize,
    pub separation: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 100_000,
            k_true: 5,
            d_u: 0,
            d_n: 5,
            d_o: 0,
            values: 5,
            separation: 0.8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    /// Zero-based planted cluster of each object.
    pub labels: Vec<u32>,
}

impl SyntheticSpec {
    pub fn d(&self) -> usize {
        self.d_u + self.d_n + self.d_o
    }

    pub fn validate(&self) -> Result<()> {
        if self.d() == 0 {
            return Err(Error::config("synthetic spec needs at least one attribute"));
        }
        if !(0.0..=1.0).contains(&self.separation) {
            return Err(Error::config(format!("separation must lie in [0, 1], got {}", self.separation)));
        }
        if self.k_true == 0 || self.n < self.k_true {
            return Err(Error::config(format!("need 1 ≤ k_true ≤ n, got k_true = {} and n = {}", self.k_true, self.n)));
        }
        if self.d_n + self.d_o > 0 && self.values < 2 {
            return Err(Error::config("categorical attributes need at least 2 values"));
        }
        if self.d_u == 0 && self.k_true > 1 {
            let digits = self.digits();
            if self.d_n + self.d_o < digits {
                return Err(Error::config(format!(
                    "{} categorical attributes with {} values cannot give {} distinct centers",
                    self.d_n + self.d_o,
                    self.values,
                    self.k_true
                )));
            }
        }
        Ok(())
    }

    /// Base-`values` digits needed to tell k_true clusters apart.
    fn digits(&self) -> usize {
        let mut digits = 1;
        let mut capacity = self.values.max(2);
        while capacity < self.k_true {
            capacity = capacity.saturating_mul(self.values.max(2));
            digits += 1;
        }
        digits
    }

    fn schema(&self) -> DatasetSchema {
        let mut attrs = Vec::with_capacity(self.d());
        attrs.extend((0..self.d_u).map(|i| AttributeSchema::numerical(format!("u{}", i + 1))));
        attrs.extend(
            (0..self.d_n).map(|i| AttributeSchema::categorical_with_count(format!("n{}", i + 1), AttributeKind::Nominal, self.values)),
        );
        attrs.extend(
            (0..self.d_o).map(|i| AttributeSchema::categorical_with_count(format!("o{}", i + 1), AttributeKind::Ordinal, self.values)),
        );
        DatasetSchema::new(attrs).expect("generated schema is valid")
    }

    pub fn generate(&self) -> Result<SyntheticData> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let k = self.k_true;
        let d_c = self.d_n + self.d_o;
        let num_centers: Vec<Vec<f64>> = (0..self.d_u)
            .map(|_| {
                let mut order: Vec<usize> = (0..k).collect();
                order.shuffle(&mut rng);
                order.into_iter().map(|p| (p as f64 + 0.5) / k as f64).collect()
            })
            .collect();
        let digits = self.digits();
        let cat_centers: Vec<Vec<u32>> = (0..d_c)
            .map(|a| {
                let mut perm: Vec<u32> = (0..self.values as u32).collect();
                perm.shuffle(&mut rng);
                let place = (self.values as u64).pow((a % digits) as u32);
                (0..k).map(|l| perm[((l as u64 / place) % self.values as u64) as usize]).collect()
            })
            .collect();

        let labels: Vec<u32> = (0..self.n).map(|i| (i % k) as u32).collect::<Vec<_>>();
        let mut labels = labels;
        labels.shuffle(&mut rng);

        let mut columns = Vec::with_capacity(self.d());
        for centers in &num_centers {
            let col = labels
                .iter()
                .map(|&l| {
                    if rng.gen::<f64>() < self.separation {
                        centers[l as usize]
                    } else {
                        rng.gen::<f64>()
                    }
                })
                .collect();
            columns.push(Column::Numerical(col));
        }
        for centers in &cat_centers {
            let col = labels
                .iter()
                .map(|&l| {
                    if rng.gen::<f64>() < self.separation {
                        centers[l as usize]
                    } else {
                        rng.gen_range(0..self.values as u32)
                    }
                })
                .collect();
            columns.push(Column::Categorical(col));
        }
        let dataset = Dataset::from_columns(self.schema(), columns)?;
        Ok(SyntheticData { dataset, labels })
    }
}
