use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{run_variant, PreparedData, RunConfig, Variant};
use crate::error::{Error, Result};
use crate::projection::ProjectionForm;
use crate::schema::Dataset;

use super::io::{load_dataset, write_text};
use super::synth::SyntheticSpec;

pub const DEFAULT_RATES: [f64; 6] = [0.001, 0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct TimingConfig {
    /// Schema and data files; the default synthetic shape is generated when absent.
    pub input: Option<(PathBuf, PathBuf)>,
    pub synthetic: SyntheticSpec,
    pub variants: Vec<Variant>,
    /// Defaults to the synthetic k_true.
    pub k: Option<usize>,
    pub rates: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
    pub bins: Option<usize>,
    pub inner_cap: usize,
    pub outer_cap: usize,
    pub out: PathBuf,
}

impl TimingConfig {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            input: None,
            synthetic: SyntheticSpec::default(),
            variants: vec![Variant::HarrV, Variant::HarrM],
            k: None,
            rates: DEFAULT_RATES.to_vec(),
            repeats: 3,
            seed: 0,
            bins: None,
            inner_cap: 100,
            outer_cap: 50,
            out: out.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&bad) = self.rates.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::config(format!("sampling rates must lie in (0, 1], got {bad}")));
        }
        if self.rates.is_empty() || self.variants.is_empty() || self.repeats == 0 {
            return Err(Error::config("timing sweep needs rates, variants and at least one repeat"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub rate: f64,
    pub n: usize,
    pub variant: Variant,
    /// Seconds per repeat, reconstruction plus clustering.
    pub samples: Vec<f64>,
}

impl TimingRow {
    pub fn median(&self) -> f64 {
        let mut s = self.samples.clone();
        s.sort_by(f64::total_cmp);
        let m = s.len() / 2;
        if s.len() % 2 == 1 {
            s[m]
        } else {
            (s[m - 1] + s[m]) / 2.0
        }
    }
}

/// ⌈φn⌉, tolerant of round-off in φn.
pub fn subsample_size(rate: f64, n: usize) -> usize {
    let x = rate * n as f64;
    let nearest = x.round();
    let size = if (x - nearest).abs() < 1e-9 * n.max(1) as f64 { nearest } else { x.ceil() };
    (size as usize).clamp(1, n)
}

/// First ⌈φn⌉ rows of a seeded shuffle, in shuffled order.
pub fn subsample(dataset: &Dataset, rate: f64, seed: u64) -> Result<Dataset> {
    let mut order: Vec<usize> = (0..dataset.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order.truncate(subsample_size(rate, dataset.n()));
    dataset.select_rows(&order)
}

/// Times one preprocessing plus clustering pass per repeat, serially.
pub fn time_dataset(dataset: &Dataset, config: &TimingConfig, k: usize) -> Result<Vec<TimingRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for &rate in &config.rates {
        let sample = subsample(dataset, rate, config.seed)?;
        if sample.n() < k {
            log::warn!("rate {rate}: {} objects is fewer than k = {k}, skipped", sample.n());
            continue;
        }
        for &variant in &config.variants {
            let run = RunConfig {
                inner_cap: config.inner_cap,
                outer_cap: config.outer_cap,
                ..RunConfig::new(variant, k, config.seed)
            };
            let samples = (0..config.repeats)
                .map(|_| {
                    let start = Instant::now();
                    let prepared = PreparedData::new(&sample, config.bins, ProjectionForm::Signed)?;
                    run_variant(&prepared, &run)?;
                    Ok(start.elapsed().as_secs_f64())
                })
                .collect::<Result<Vec<_>>>()?;
            let row = TimingRow {
                rate,
                n: sample.n(),
                variant,
                samples,
            };
            log::info!("{variant} φ={rate} n={}: {:.4}s", row.n, row.median());
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn timing_table(rows: &[TimingRow]) -> String {
    let mut out = String::from("phi\tn\tvariant\tmedian_seconds\tsamples\n");
    for r in rows {
        let samples: Vec<String> = r.samples.iter().map(|s| format!("{s:.6}")).collect();
        let _ = writeln!(out, "{}\t{}\t{}\t{:.6}\t{}", r.rate, r.n, r.variant, r.median(), samples.join(","));
    }
    out
}

/// Columns: phi, n, then one median-seconds column per variant.
pub fn timing_plot_data(rows: &[TimingRow], variants: &[Variant]) -> String {
    let mut out = String::from("# phi n");
    for v in variants {
        let _ = write!(out, " {}", v.slug());
    }
    out.push('\n');
    let mut rates: Vec<(f64, usize)> = rows.iter().map(|r| (r.rate, r.n)).collect();
    rates.dedup();
    for (rate, n) in rates {
        let _ = write!(out, "{rate} {n}");
        for v in variants {
            match rows.iter().find(|r| r.rate == rate && r.variant == *v) {
                Some(r) => {
                    let _ = write!(out, " {:.6}", r.median());
                }
                None => out.push_str(" nan"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn cmd_bench_time(config: &TimingConfig) -> Result<Vec<TimingRow>> {
    config.validate()?;
    let (dataset, k) = match &config.input {
        Some((schema, data)) => {
            let ds = load_dataset(schema, data)?;
            let k = config.k.ok_or_else(|| Error::config("--k is required with --data"))?;
            (ds, k)
        }
        None => {
            let synth = config.synthetic.generate()?;
            (synth.dataset, config.k.unwrap_or(config.synthetic.k_true))
        }
    };
    let rows = time_dataset(&dataset, config, k)?;
    write_text(&config.out.join("timing.tsv"), &timing_table(&rows))?;
    write_text(&config.out.join("timing.dat"), &timing_plot_data(&rows, &config.variants))?;
    Ok(rows)
}
