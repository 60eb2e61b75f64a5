//! Run orchestration, persistence, synthetic data and the timing sweep.

pub mod io;
mod orchestrate;
pub mod report_file;
pub mod synth;
pub mod timing;
pub mod trace;

pub use orchestrate::{cluster_dataset, cmd_cluster, report_path, run_seeds, BenchConfig, ClusterOutcome, VariantResult};
pub use report_file::{ReportHeader, RunReportFile};
pub use synth::{SyntheticData, SyntheticSpec};
pub use timing::{cmd_bench_time, TimingConfig, TimingRow};
pub use trace::{cmd_trace_plot, trace_table};

use std::path::{Path, PathBuf};

use crate::error::Result;

/// Writes `<prefix>.schema`, `<prefix>.data` and `<prefix>.labels` into `dir`.
pub fn cmd_synth(spec: &SyntheticSpec, dir: &Path, prefix: &str) -> Result<[PathBuf; 3]> {
    let data = spec.generate()?;
    let paths = [
        dir.join(format!("{prefix}.schema")),
        dir.join(format!("{prefix}.data")),
        dir.join(format!("{prefix}.labels")),
    ];
    io::write_text(&paths[0], &data.dataset.schema().to_text())?;
    io::write_text(&paths[1], &data.dataset.to_csv())?;
    io::write_text(&paths[2], &io::labels_to_text(&data.labels))?;
    Ok(paths)
}
