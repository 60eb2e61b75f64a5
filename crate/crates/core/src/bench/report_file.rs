//! Plain-text run report format.
//!
//! ```text
//! # harr run report
//! variant = HARR-M
//! k = 3
//! ...header keys...
//!
//! [run]
//! seed = 0
//! converged = true
//! inner_iterations = 7
//! outer_iterations = 2
//! ari = 0.93            (optional)
//! ca = 0.97             (optional)
//! timing.reconstruction = 0.01   (optional, likewise clustering and weight_updates)
//! labels = 1 1 2 3 ...  (1-based cluster ids)
//! weights = vector w1 w2 ...    or    weights = matrix k dim, then k `weights.row = ...` lines
//! [trace]
//! iteration  z  marker          (tab separated; marker is assign or weight-update)
//! ```
//!
//! Floats use the shortest representation that parses back to the same value.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::{ObjectiveTrace, Partition, RunReport, ScorePair, Timings, TraceEntry, TraceKind, Variant, Weights};
use crate::error::{Error, Result};
use crate::projection::ProjectionForm;

const MAGIC: &str = "# harr run report";
const WHAT: &str = "report file";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub variant: Variant,
    pub k: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub inner_cap: usize,
    pub outer_cap: usize,
    pub bins: Option<usize>,
    pub projection: ProjectionForm,
    pub n: usize,
    pub d_hat: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReportFile {
    pub header: ReportHeader,
    pub runs: Vec<RunReport>,
}

fn join_f64(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ")
}

fn projection_tag(form: ProjectionForm) -> &'static str {
    match form {
        ProjectionForm::Signed => "signed",
        ProjectionForm::Absolute => "absolute",
    }
}

impl RunReportFile {
    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "variant = {}", h.variant);
        let _ = writeln!(out, "k = {}", h.k);
        let _ = writeln!(out, "runs = {}", h.runs);
        let _ = writeln!(out, "base_seed = {}", h.base_seed);
        let _ = writeln!(out, "inner_cap = {}", h.inner_cap);
        let _ = writeln!(out, "outer_cap = {}", h.outer_cap);
        let _ = writeln!(out, "bins = {}", h.bins.map_or("auto".to_string(), |b| b.to_string()));
        let _ = writeln!(out, "projection = {}", projection_tag(h.projection));
        let _ = writeln!(out, "n = {}", h.n);
        let _ = writeln!(out, "d_hat = {}", h.d_hat);
        for run in &self.runs {
            out.push_str("\n[run]\n");
            let _ = writeln!(out, "seed = {}", run.seed);
            let _ = writeln!(out, "converged = {}", run.converged);
            let _ = writeln!(out, "inner_iterations = {}", run.inner_iterations);
            let _ = writeln!(out, "outer_iterations = {}", run.outer_iterations);
            if let Some(s) = run.scores {
                let _ = writeln!(out, "ari = {:?}", s.ari);
                let _ = writeln!(out, "ca = {:?}", s.ca);
            }
            if let Some(t) = run.timings {
                let _ = writeln!(out, "timing.reconstruction = {:?}", t.reconstruction);
                let _ = writeln!(out, "timing.clustering = {:?}", t.clustering);
                let _ = writeln!(out, "timing.weight_updates = {:?}", t.weight_updates);
            }
            let labels: Vec<String> = run.partition.labels.iter().map(|l| (l + 1).to_string()).collect();
            let _ = writeln!(out, "labels = {}", labels.join(" "));
            match &run.weights {
                None => {}
                Some(Weights::Vector(w)) => {
                    let _ = writeln!(out, "weights = vector {}", join_f64(w));
                }
                Some(m @ Weights::Matrix { k, dim, .. }) => {
                    let _ = writeln!(out, "weights = matrix {k} {dim}");
                    for l in 0..*k {
                        let _ = writeln!(out, "weights.row = {}", join_f64(m.row(l)));
                    }
                }
            }
            out.push_str("[trace]\niteration\tz\tmarker\n");
            for (i, e) in run.trace.entries.iter().enumerate() {
                let marker = match e.kind {
                    TraceKind::Assign => "assign",
                    TraceKind::WeightUpdate => "weight-update",
                };
                let _ = writeln!(out, "{}\t{:?}\t{marker}", i + 1, e.z);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format(WHAT, e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).file()
    }
}

struct Parser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::format(WHAT, format!("line {line}: {msg}"))
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| bad(line, format!("cannot parse `{s}`")))
}

fn floats(line: usize, s: &str) -> Result<Vec<f64>> {
    s.split_whitespace().map(|t| num(line, t)).collect()
}

#[derive(Default)]
struct RunBuilder {
    seed: Option<u64>,
    converged: Option<bool>,
    inner: Option<usize>,
    outer: Option<usize>,
    ari: Option<f64>,
    ca: Option<f64>,
    timing: [Option<f64>; 3],
    labels: Option<Vec<u32>>,
    weights: Option<Weights>,
    trace: Vec<TraceEntry>,
}

impl RunBuilder {
    fn finish(self, line: usize, header: &ReportHeader) -> Result<RunReport> {
        let missing = |what: &str| bad(line, format!("run is missing `{what}`"));
        let scores = match (self.ari, self.ca) {
            (Some(ari), Some(ca)) => Some(ScorePair { ari, ca }),
            (None, None) => None,
            _ => return Err(bad(line, "ari and ca must appear together")),
        };
        let timings = match self.timing {
            [Some(reconstruction), Some(clustering), Some(weight_updates)] => Some(Timings {
                reconstruction,
                clustering,
                weight_updates,
            }),
            [None, None, None] => None,
            _ => return Err(bad(line, "incomplete timing block")),
        };
        Ok(RunReport {
            variant: header.variant,
            seed: self.seed.ok_or_else(|| missing("seed"))?,
            k: header.k,
            partition: Partition {
                labels: self.labels.ok_or_else(|| missing("labels"))?,
            },
            weights: self.weights,
            trace: ObjectiveTrace { entries: self.trace },
            inner_iterations: self.inner.ok_or_else(|| missing("inner_iterations"))?,
            outer_iterations: self.outer.ok_or_else(|| missing("outer_iterations"))?,
            converged: self.converged.ok_or_else(|| missing("converged"))?,
            timings,
            scores,
        })
    }
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate().peekable(),
        }
    }

    /// Next non-blank line as (1-based line number, trimmed text).
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.lines.by_ref() {
            let t = l.trim();
            if !t.is_empty() {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn peek_line(&mut self) -> Option<&'a str> {
        while let Some((_, l)) = self.lines.peek() {
            if l.trim().is_empty() {
                self.lines.next();
            } else {
                return Some(l.trim());
            }
        }
        None
    }

    fn key_value(line: usize, text: &'a str) -> Result<(&'a str, &'a str)> {
        let (k, v) = text.split_once('=').ok_or_else(|| bad(line, "expected `key = value`"))?;
        Ok((k.trim(), v.trim()))
    }

    fn file(mut self) -> Result<RunReportFile> {
        match self.next_line() {
            Some((_, MAGIC)) => {}
            _ => return Err(Error::format(WHAT, "missing report header line")),
        }
        let header = self.header()?;
        let mut runs = Vec::new();
        while let Some((line, text)) = self.next_line() {
            if text != "[run]" {
                return Err(bad(line, format!("expected [run], found `{text}`")));
            }
            runs.push(self.run(line, &header)?);
        }
        Ok(RunReportFile { header, runs })
    }

    fn header(&mut self) -> Result<ReportHeader> {
        let mut fields = std::collections::BTreeMap::new();
        let mut last = 1;
        while let Some(text) = self.peek_line() {
            if text.starts_with('[') {
                break;
            }
            let (line, text) = self.next_line().expect("peeked");
            let (k, v) = Self::key_value(line, text)?;
            fields.insert(k, (line, v));
            last = line;
        }
        let mut take = |key: &str| fields.remove(key).ok_or_else(|| bad(last, format!("header is missing `{key}`")));
        let (l, v) = take("variant")?;
        let variant: Variant = v.parse().map_err(|_| bad(l, format!("unknown variant `{v}`")))?;
        let (l, v) = take("k")?;
        let k = num(l, v)?;
        let (l, v) = take("runs")?;
        let runs = num(l, v)?;
        let (l, v) = take("base_seed")?;
        let base_seed = num(l, v)?;
        let (l, v) = take("inner_cap")?;
        let inner_cap = num(l, v)?;
        let (l, v) = take("outer_cap")?;
        let outer_cap = num(l, v)?;
        let (l, v) = take("bins")?;
        let bins = if v == "auto" { None } else { Some(num(l, v)?) };
        let (l, v) = take("projection")?;
        let projection = match v {
            "signed" => ProjectionForm::Signed,
            "absolute" => ProjectionForm::Absolute,
            _ => return Err(bad(l, format!("unknown projection `{v}`"))),
        };
        let (l, v) = take("n")?;
        let n = num(l, v)?;
        let (l, v) = take("d_hat")?;
        let d_hat = num(l, v)?;
        if let Some((key, (line, _))) = fields.into_iter().next() {
            return Err(bad(line, format!("unknown header key `{key}`")));
        }
        Ok(ReportHeader {
            variant,
            k,
            runs,
            base_seed,
            inner_cap,
            outer_cap,
            bins,
            projection,
            n,
            d_hat,
        })
    }

    fn run(&mut self, start: usize, header: &ReportHeader) -> Result<RunReport> {
        let mut b = RunBuilder::default();
        let mut matrix_rows: Option<(usize, usize, Vec<f64>)> = None;
        while let Some(text) = self.peek_line() {
            if text == "[run]" {
                break;
            }
            let (line, text) = self.next_line().expect("peeked");
            if text == "[trace]" {
                match self.next_line() {
                    Some((_, h)) if h.split_whitespace().eq(["iteration", "z", "marker"]) => {}
                    _ => return Err(bad(line, "trace table header missing")),
                }
                while let Some(row) = self.peek_line() {
                    if row.starts_with('[') {
                        break;
                    }
                    let (line, row) = self.next_line().expect("peeked");
                    let cols: Vec<&str> = row.split('\t').collect();
                    if cols.len() != 3 {
                        return Err(bad(line, "trace rows need three columns"));
                    }
                    let idx: usize = num(line, cols[0])?;
                    if idx != b.trace.len() + 1 {
                        return Err(bad(line, "trace iterations must count up from 1"));
                    }
                    let kind = match cols[2] {
                        "assign" => TraceKind::Assign,
                        "weight-update" => TraceKind::WeightUpdate,
                        m => return Err(bad(line, format!("unknown trace marker `{m}`"))),
                    };
                    b.trace.push(TraceEntry { z: num(line, cols[1])?, kind });
                }
                continue;
            }
            let (k, v) = Self::key_value(line, text)?;
            match k {
                "seed" => b.seed = Some(num(line, v)?),
                "converged" => b.converged = Some(num(line, v)?),
                "inner_iterations" => b.inner = Some(num(line, v)?),
                "outer_iterations" => b.outer = Some(num(line, v)?),
                "ari" => b.ari = Some(num(line, v)?),
                "ca" => b.ca = Some(num(line, v)?),
                "timing.reconstruction" => b.timing[0] = Some(num(line, v)?),
                "timing.clustering" => b.timing[1] = Some(num(line, v)?),
                "timing.weight_updates" => b.timing[2] = Some(num(line, v)?),
                "labels" => {
                    let labels = v
                        .split_whitespace()
                        .map(|t| match num::<u32>(line, t)? {
                            0 => Err(bad(line, "cluster ids are 1-based")),
                            l => Ok(l - 1),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    b.labels = Some(labels);
                }
                "weights" => {
                    let mut parts = v.splitn(2, ' ');
                    match (parts.next(), parts.next()) {
                        (Some("vector"), Some(rest)) => b.weights = Some(Weights::Vector(floats(line, rest)?)),
                        (Some("matrix"), Some(rest)) => {
                            let dims: Vec<usize> =
                                rest.split_whitespace().map(|t| num(line, t)).collect::<Result<_>>()?;
                            let [k, dim] = dims[..] else {
                                return Err(bad(line, "matrix weights need `k dim`"));
                            };
                            matrix_rows = Some((k, dim, Vec::with_capacity(k * dim)));
                        }
                        _ => return Err(bad(line, "weights must be `vector ...` or `matrix k dim`")),
                    }
                }
                "weights.row" => {
                    let Some((_, dim, data)) = matrix_rows.as_mut() else {
                        return Err(bad(line, "weight row outside a matrix"));
                    };
                    let row = floats(line, v)?;
                    if row.len() != *dim {
                        return Err(bad(line, format!("weight row has {} entries, expected {dim}", row.len())));
                    }
                    data.extend(row);
                }
                _ => return Err(bad(line, format!("unknown run key `{k}`"))),
            }
        }
        if let Some((k, dim, data)) = matrix_rows {
            if data.len() != k * dim {
                return Err(bad(start, format!("weight matrix has {} rows, expected {k}", data.len() / dim.max(1))));
            }
            b.weights = Some(Weights::Matrix { k, dim, data });
        }
        b.finish(start, header)
    }
}

/// Aggregate table: one row per variant with mean ± std of ARI and CA.
pub fn summary_table(rows: &[(Variant, usize, Option<crate::evaluation::RunAggregate>)]) -> String {
    let mut out = String::from("variant\truns\tARI\tCA\n");
    for (variant, runs, agg) in rows {
        match agg {
            Some(a) => {
                let _ = writeln!(out, "{variant}\t{runs}\t{}\t{}", a.ari, a.ca);
            }
            None => {
                let _ = writeln!(out, "{variant}\t{runs}\t-\t-");
            }
        }
    }
    out
}
