use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::engine::{run_variant, PreparedData, RunConfig, RunReport, Variant, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::evaluation::{aggregate_runs, score, RunAggregate};
use crate::projection::ProjectionForm;
use crate::schema::Dataset;

use super::io::{load_dataset, read_labels, write_text};
use super::report_file::{summary_table, ReportHeader, RunReportFile};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub data: PathBuf,
    pub schema: PathBuf,
    pub labels: Option<PathBuf>,
    pub variants: Vec<Variant>,
    pub k: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub out: PathBuf,
    pub bins: Option<usize>,
    pub inner_cap: usize,
    pub outer_cap: usize,
    pub projection: ProjectionForm,
    pub workers: Option<usize>,
    /// Keep wall-clock timings in the report files (they then differ between reruns).
    pub timings: bool,
    pub json: bool,
}

impl BenchConfig {
    pub fn new(data: impl Into<PathBuf>, schema: impl Into<PathBuf>, k: usize, out: impl Into<PathBuf>) -> Self {
        Self {
            data: data.into(),
            schema: schema.into(),
            labels: None,
            variants: vec![Variant::HarrM],
            k,
            runs: 20,
            base_seed: 0,
            out: out.into(),
            bins: None,
            inner_cap: 100,
            outer_cap: 50,
            projection: ProjectionForm::Signed,
            workers: None,
            timings: false,
            json: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("runs must be at least 1"));
        }
        if self.variants.is_empty() {
            return Err(Error::config("at least one variant is required"));
        }
        if self.bins.is_some_and(|b| b < 2) {
            return Err(Error::config("bin count must be at least 2"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers must be at least 1"));
        }
        self.run_config(self.variants[0], 0).validate(usize::MAX)
    }

    fn run_config(&self, variant: Variant, seed: u64) -> RunConfig {
        RunConfig {
            variant,
            k: self.k,
            seed,
            inner_cap: self.inner_cap,
            outer_cap: self.outer_cap,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub file: RunReportFile,
    pub aggregate: Option<RunAggregate>,
    pub path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct ClusterOutcome {
    pub variants: Vec<VariantResult>,
    pub summary: String,
    pub summary_path: PathBuf,
}

impl ClusterOutcome {
    pub fn all_converged(&self) -> bool {
        self.variants.iter().flat_map(|v| &v.file.runs).all(|r| r.converged)
    }
}

pub(crate) fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    builder.build().map_err(|e| Error::config(format!("cannot start worker pool: {e}")))
}

/// Runs `variant` for every seed of the ladder. Results depend only on the seed,
/// never on scheduling.
pub fn run_seeds(
    prepared: &PreparedData,
    config: &BenchConfig,
    variant: Variant,
    labels: Option<&[u32]>,
) -> Result<Vec<RunReport>> {
    (0..config.runs as u64)
        .into_par_iter()
        .map(|offset| {
            let mut report = run_variant(prepared, &config.run_config(variant, config.base_seed + offset))?;
            if let Some(truth) = labels {
                report.scores = Some(score(&report.partition.labels, truth)?);
            }
            if !config.timings {
                report.timings = None;
            }
            Ok(report)
        })
        .collect()
}

/// Clusters an in-memory dataset and writes one report per variant plus a summary table.
pub fn cluster_dataset(dataset: &Dataset, labels: Option<&[u32]>, config: &BenchConfig) -> Result<ClusterOutcome> {
    config.validate()?;
    config.run_config(config.variants[0], 0).validate(dataset.n())?;
    if let Some(l) = labels {
        if l.len() != dataset.n() {
            return Err(Error::LengthMismatch {
                left: l.len(),
                right: dataset.n(),
            });
        }
    }
    let prepared = PreparedData::new(dataset, config.bins, config.projection)?;
    let pool = thread_pool(config.workers)?;
    let mut variants = Vec::new();
    for &variant in &config.variants {
        let runs = pool.install(|| run_seeds(&prepared, config, variant, labels))?;
        let scores: Vec<_> = runs.iter().filter_map(|r| r.scores).collect();
        let aggregate = aggregate_runs(&scores);
        let file = RunReportFile {
            header: ReportHeader {
                variant,
                k: config.k,
                runs: config.runs,
                base_seed: config.base_seed,
                inner_cap: config.inner_cap,
                outer_cap: config.outer_cap,
                bins: config.bins,
                projection: config.projection,
                n: dataset.n(),
                d_hat: prepared.space.d_hat(),
            },
            runs,
        };
        let path = report_path(&config.out, variant);
        write_text(&path, &file.to_text())?;
        if config.json {
            write_text(&path.with_extension("json"), &file.to_json())?;
        }
        log::info!("{variant}: wrote {}", path.display());
        variants.push(VariantResult { file, aggregate, path });
    }
    let rows: Vec<_> = variants
        .iter()
        .map(|v| (v.file.header.variant, v.file.runs.len(), v.aggregate))
        .collect();
    let summary = summary_table(&rows);
    let summary_path = config.out.join("summary.tsv");
    write_text(&summary_path, &summary)?;
    Ok(ClusterOutcome {
        variants,
        summary,
        summary_path,
    })
}

pub fn cmd_cluster(config: &BenchConfig) -> Result<ClusterOutcome> {
    config.validate()?;
    let dataset = load_dataset(&config.schema, &config.data)?;
    let labels = config.labels.as_deref().map(read_labels).transpose()?;
    cluster_dataset(&dataset, labels.as_deref(), config)
}

pub fn report_path(out: &Path, variant: Variant) -> PathBuf {
    out.join(format!("{}.report", variant.slug()))
}
