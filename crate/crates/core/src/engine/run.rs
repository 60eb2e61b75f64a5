use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base_distance::{build_base_distances, BaseDistanceTable};
use crate::error::{Error, Result};
use crate::projection::{reconstruct_with, ProjectionForm, ReconstructedSpace};
use crate::schema::{discretize_with_bins, normalize_numerical, Dataset, OrdinalView};

use super::kmeans;
use super::prototypes::{reseed_empty, update_prototypes, Prototypes};
use super::space::{assign_with_cost, objective, FeatureSpace, Partition, Weights};
use super::weights::{update_weight_matrix, update_weight_vector, DEFAULT_EPSILON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    HarrV,
    HarrM,
    Kmd,
    Kpt,
    /// KMD on purely categorical data, KPT otherwise.
    KmdKpt,
    OheOc,
    Bd,
    Har,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::HarrV,
        Variant::HarrM,
        Variant::Kmd,
        Variant::Kpt,
        Variant::KmdKpt,
        Variant::OheOc,
        Variant::Bd,
        Variant::Har,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::HarrV => "HARR-V",
            Variant::HarrM => "HARR-M",
            Variant::Kmd => "KMD",
            Variant::Kpt => "KPT",
            Variant::KmdKpt => "KMD/KPT",
            Variant::OheOc => "OHE+OC",
            Variant::Bd => "BD",
            Variant::Har => "HAR",
        }
    }

    /// File-name friendly form.
    pub fn slug(self) -> &'static str {
        match self {
            Variant::HarrV => "harr-v",
            Variant::HarrM => "harr-m",
            Variant::Kmd => "kmd",
            Variant::Kpt => "kpt",
            Variant::KmdKpt => "kmd-kpt",
            Variant::OheOc => "ohe-oc",
            Variant::Bd => "bd",
            Variant::Har => "har",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == up || v.slug().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
                Error::config(format!("unknown variant `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub variant: Variant,
    pub k: usize,
    pub seed: u64,
    pub inner_cap: usize,
    pub outer_cap: usize,
    pub epsilon: f64,
}

impl RunConfig {
    pub fn new(variant: Variant, k: usize, seed: u64) -> Self {
        Self {
            variant,
            k,
            seed,
            inner_cap: 100,
            outer_cap: 50,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k < 2 {
            return Err(Error::config(format!("k must be at least 2, got {}", self.k)));
        }
        if self.k > n {
            return Err(Error::config(format!("k = {} exceeds the number of objects {n}", self.k)));
        }
        if self.inner_cap == 0 || self.outer_cap == 0 {
            return Err(Error::config("iteration caps must be at least 1"));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::config("epsilon must be non-negative"));
        }
        Ok(())
    }
}

/// Preprocessing shared by every run on one dataset.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub dataset: Dataset,
    pub view: OrdinalView,
    pub table: BaseDistanceTable,
    pub space: ReconstructedSpace,
    /// Seconds spent building the base distances and the reconstruction.
    pub reconstruction_secs: f64,
}

impl PreparedData {
    pub fn new(dataset: &Dataset, bins: Option<usize>, form: ProjectionForm) -> Result<Self> {
        let start = Instant::now();
        let dataset = normalize_numerical(dataset);
        let view = discretize_with_bins(&dataset, bins);
        let table = build_base_distances(&dataset, &view)?;
        let space = reconstruct_with(&dataset, &table, form)?;
        Ok(Self {
            dataset,
            view,
            table,
            space,
            reconstruction_secs: start.elapsed().as_secs_f64(),
        })
    }

    pub fn from_dataset(dataset: &Dataset) -> Result<Self> {
        Self::new(dataset, None, ProjectionForm::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceKind {
    /// Objective after a partition update.
    Assign,
    /// Objective of the unchanged partition right after the weights changed.
    WeightUpdate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub z: f64,
    pub kind: TraceKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTrace {
    pub entries: Vec<TraceEntry>,
}

impl ObjectiveTrace {
    fn push(&mut self, z: f64, kind: TraceKind) {
        self.entries.push(TraceEntry { z, kind });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.entries.last().map(|e| e.z)
    }

    /// Increases of z between consecutive entries computed under the same weights
    /// (a weight update starts a new segment). Each item is (entry index, increase).
    pub fn fixed_weight_increases(&self, tolerance: f64) -> Vec<(usize, f64)> {
        self.entries
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].kind == TraceKind::Assign)
            .filter_map(|(i, w)| {
                let rise = w[1].z - w[0].z;
                (rise > tolerance).then_some((i + 1, rise))
            })
            .collect()
    }

    /// Increases across weight updates. Reported, never treated as failures.
    pub fn weight_update_increases(&self) -> Vec<(usize, f64)> {
        self.entries
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].kind == TraceKind::WeightUpdate && w[1].z > w[0].z)
            .map(|(i, w)| (i + 1, w[1].z - w[0].z))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub reconstruction: f64,
    pub clustering: f64,
    pub weight_updates: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    pub ari: f64,
    pub ca: f64,
}

/// Outcome of a single seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub variant: Variant,
    pub seed: u64,
    pub k: usize,
    pub partition: Partition,
    pub weights: Option<Weights>,
    pub trace: ObjectiveTrace,
    /// Partition updates performed (Step 3 evaluations).
    pub inner_iterations: usize,
    /// Weight updates performed.
    pub outer_iterations: usize,
    pub converged: bool,
    pub timings: Option<Timings>,
    pub scores: Option<ScorePair>,
}

enum Learning {
    Frozen,
    Vector,
    Matrix,
}

struct LoopOutcome {
    partition: Partition,
    weights: Weights,
    trace: ObjectiveTrace,
    inner_iterations: usize,
    outer_iterations: usize,
    converged: bool,
    weight_secs: f64,
}

/// k distinct objects drawn uniformly without replacement.
pub fn initial_objects(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::index::sample(&mut rng, n, k).into_vec()
}

/// Alternating partition/prototype updates, with weight learning once the
/// partition settles until it stays put across a weight update.
fn weighted_loop(dataset: &Dataset, space: &FeatureSpace, config: &RunConfig, learning: Learning) -> LoopOutcome {
    let k = config.k;
    let mut protos = Prototypes::from_objects(dataset, &initial_objects(dataset.n(), k, config.seed));
    let mut weights = match learning {
        Learning::Matrix => Weights::uniform_matrix(k, space.dim()),
        _ => Weights::uniform_vector(space.dim()),
    };
    let mut trace = ObjectiveTrace::default();
    let mut last_assigned: Option<Partition> = None;
    let mut last_weighted: Option<Partition> = None;
    let (mut inner_total, mut outer, mut inner_here) = (0, 0, 0);
    let mut weight_secs = 0.0;
    let converged = loop {
        let (partition, z) = assign_with_cost(dataset, space, &protos, &weights);
        trace.push(z, TraceKind::Assign);
        inner_total += 1;
        inner_here += 1;
        if last_assigned.as_ref() != Some(&partition) {
            if inner_here > config.inner_cap {
                last_assigned = Some(partition);
                break false;
            }
            let (mut next, empty) = update_prototypes(dataset, &partition, &protos);
            reseed_empty(dataset, space, &mut next, &weights, &partition, &empty);
            protos = next;
            last_assigned = Some(partition);
            continue;
        }
        if matches!(learning, Learning::Frozen) {
            break true;
        }
        if last_weighted.as_ref() == Some(&partition) {
            break true;
        }
        if outer >= config.outer_cap {
            break false;
        }
        let start = Instant::now();
        weights = match learning {
            Learning::Vector => update_weight_vector(dataset, space, &partition, &protos, config.epsilon),
            _ => update_weight_matrix(dataset, space, &partition, &protos, config.epsilon),
        };
        weight_secs += start.elapsed().as_secs_f64();
        outer += 1;
        inner_here = 0;
        trace.push(objective(dataset, space, &protos, &weights, &partition), TraceKind::WeightUpdate);
        last_weighted = Some(partition);
    };
    if !converged {
        log::warn!("{}: iteration cap reached (seed {})", config.variant, config.seed);
    }
    LoopOutcome {
        partition: last_assigned.expect("at least one assignment ran"),
        weights,
        trace,
        inner_iterations: inner_total,
        outer_iterations: outer,
        converged,
        weight_secs,
    }
}

/// Runs one variant on preprocessed data.
pub fn run_variant(prepared: &PreparedData, config: &RunConfig) -> Result<RunReport> {
    let dataset = &prepared.dataset;
    config.validate(dataset.n())?;
    let schema = dataset.schema();
    let variant = match config.variant {
        Variant::KmdKpt if schema.d_u() == 0 => Variant::Kmd,
        Variant::KmdKpt => Variant::Kpt,
        v => v,
    };
    let start = Instant::now();
    let (space, learning, reconstruction) = match variant {
        Variant::Kmd if schema.d_u() > 0 => {
            return Err(Error::config("KMD handles categorical data only; use KPT for data with numerical attributes"));
        }
        Variant::Kmd | Variant::Kpt => (FeatureSpace::hamming(dataset), Learning::Frozen, 0.0),
        Variant::Bd => (FeatureSpace::base_distance(dataset, &prepared.table), Learning::Frozen, prepared.reconstruction_secs),
        Variant::Har => (FeatureSpace::reconstructed(&prepared.space, dataset), Learning::Frozen, prepared.reconstruction_secs),
        Variant::HarrV => (FeatureSpace::reconstructed(&prepared.space, dataset), Learning::Vector, prepared.reconstruction_secs),
        Variant::HarrM => (FeatureSpace::reconstructed(&prepared.space, dataset), Learning::Matrix, prepared.reconstruction_secs),
        Variant::OheOc => {
            let out = kmeans::run_ohe_oc(dataset, config);
            return Ok(RunReport {
                variant: config.variant,
                seed: config.seed,
                k: config.k,
                partition: out.partition,
                weights: None,
                trace: out.trace,
                inner_iterations: out.iterations,
                outer_iterations: 0,
                converged: out.converged,
                timings: Some(Timings {
                    reconstruction: 0.0,
                    clustering: start.elapsed().as_secs_f64(),
                    weight_updates: 0.0,
                }),
                scores: None,
            });
        }
        Variant::KmdKpt => unreachable!(),
    };
    let learns = !matches!(learning, Learning::Frozen);
    let out = weighted_loop(dataset, &space, config, learning);
    Ok(RunReport {
        variant: config.variant,
        seed: config.seed,
        k: config.k,
        partition: out.partition,
        weights: learns.then_some(out.weights),
        trace: out.trace,
        inner_iterations: out.inner_iterations,
        outer_iterations: out.outer_iterations,
        converged: out.converged,
        timings: Some(Timings {
            reconstruction,
            clustering: start.elapsed().as_secs_f64(),
            weight_updates: out.weight_secs,
        }),
        scores: None,
    })
}

fn run_checked(dataset: &Dataset, config: &RunConfig, expected: &[Variant]) -> Result<RunReport> {
    if !expected.contains(&config.variant) {
        return Err(Error::config(format!("variant {} not valid here", config.variant)));
    }
    run_variant(&PreparedData::from_dataset(dataset)?, config)
}

/// Preprocess, reconstruct and cluster with a learned weight vector.
pub fn run_harr_v(dataset: &Dataset, config: &RunConfig) -> Result<RunReport> {
    run_checked(dataset, config, &[Variant::HarrV])
}

/// Preprocess, reconstruct and cluster with a learned per-cluster weight matrix.
pub fn run_harr_m(dataset: &Dataset, config: &RunConfig) -> Result<RunReport> {
    run_checked(dataset, config, &[Variant::HarrM])
}

pub fn run_baseline(dataset: &Dataset, config: &RunConfig) -> Result<RunReport> {
    run_checked(
        dataset,
        config,
        &[Variant::Kmd, Variant::Kpt, Variant::KmdKpt, Variant::OheOc, Variant::Bd, Variant::Har],
    )
}
