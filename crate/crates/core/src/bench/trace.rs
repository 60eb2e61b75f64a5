use std::fmt::Write as _;
use std::path::Path;

use crate::engine::TraceKind;
use crate::error::{Error, Result};

use super::io::{read_text, write_text};
use super::report_file::RunReportFile;

/// Plot-ready trace rows for every run of every report: variant, seed,
/// iteration, z and a 0/1 weight-update marker.
pub fn trace_table(reports: &[RunReportFile]) -> Result<String> {
    let mut out = String::from("variant\tseed\titeration\tz\tweight_update\n");
    let mut rows = 0;
    for file in reports {
        for run in &file.runs {
            if run.trace.is_empty() {
                return Err(Error::format("report file", format!("{} seed {} has an empty trace", run.variant, run.seed)));
            }
            for (i, e) in run.trace.entries.iter().enumerate() {
                let marker = u8::from(e.kind == TraceKind::WeightUpdate);
                let _ = writeln!(out, "{}\t{}\t{}\t{:?}\t{marker}", run.variant.slug(), run.seed, i + 1, e.z);
                rows += 1;
            }
        }
    }
    if rows == 0 {
        return Err(Error::format("report file", "no traces to export"));
    }
    Ok(out)
}

pub fn cmd_trace_plot(inputs: &[impl AsRef<Path>], out: &Path) -> Result<String> {
    let reports = inputs
        .iter()
        .map(|p| RunReportFile::parse(&read_text(p.as_ref())?))
        .collect::<Result<Vec<_>>>()?;
    let table = trace_table(&reports)?;
    write_text(out, &table)?;
    Ok(table)
}
