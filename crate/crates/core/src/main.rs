use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use harr::bench::{self, BenchConfig, SyntheticSpec, TimingConfig};
use harr::engine::Variant;
use harr::evaluation;
use harr::projection::ProjectionForm;

#[derive(Parser)]
#[command(name = "harr", version, about = "Mixed-data clustering with attribute reconstruction and weight learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a dataset with one or more variants over a seed ladder.
    Cluster(ClusterArgs),
    /// Score a predicted labelling against ground truth.
    Eval {
        /// Ground-truth labels, one per line.
        #[arg(long)]
        labels: PathBuf,
        /// Predicted labels, one per line.
        #[arg(long)]
        pred: PathBuf,
    },
    /// Generate a planted-cluster dataset.
    Synth(SynthArgs),
    /// Time reconstruction plus clustering over sampling rates.
    BenchTime(BenchTimeArgs),
    /// Export objective traces from report files as a plot-ready table.
    Trace {
        /// Report files written by `cluster`.
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value = "trace.tsv")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    k: usize,
    /// HARR-V, HARR-M, KMD, KPT, KMD/KPT, OHE+OC, BD or HAR. Repeatable.
    #[arg(long = "variant", default_value = "HARR-M")]
    variants: Vec<String>,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Equal-width bins used to discretize numerical attributes.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long, default_value_t = 100)]
    inner_cap: usize,
    #[arg(long, default_value_t = 50)]
    outer_cap: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    /// Keep absolute projection coordinates instead of signed ones.
    #[arg(long)]
    absolute_projection: bool,
    /// Record wall-clock timings in the reports.
    #[arg(long)]
    timings: bool,
    /// Also write JSON reports.
    #[arg(long)]
    json: bool,
    /// Exit with status 4 if any run hits an iteration cap.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Numerical attributes.
    #[arg(long, default_value_t = 0)]
    d_u: usize,
    /// Nominal attributes.
    #[arg(long, default_value_t = 5)]
    d_n: usize,
    /// Ordinal attributes.
    #[arg(long, default_value_t = 0)]
    d_o: usize,
    /// Values per categorical attribute.
    #[arg(long, default_value_t = 5)]
    values: usize,
    #[arg(long, default_value_t = 0.8)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// File name prefix.
    #[arg(long, default_value = "synthetic")]
    name: String,
}

#[derive(Args)]
struct BenchTimeArgs {
    /// Dataset to sample; the default synthetic shape is generated when omitted.
    #[arg(long, requires = "schema")]
    data: Option<PathBuf>,
    #[arg(long, requires = "data")]
    schema: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "variant")]
    variants: Vec<String>,
    /// Sampling rates in (0, 1]. Repeatable.
    #[arg(long = "phi")]
    phis: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long, default_value_t = 100)]
    inner_cap: usize,
    #[arg(long, default_value_t = 50)]
    outer_cap: usize,
    /// Synthetic object count when no data is given.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value = "timing")]
    out: PathBuf,
}

fn parse_variants(names: &[String]) -> harr::Result<Vec<Variant>> {
    names.iter().map(|s| s.parse()).collect()
}

fn run(cli: Cli) -> harr::Result<ExitCode> {
    match cli.command {
        Command::Cluster(a) => {
            let config = BenchConfig {
                labels: a.labels,
                variants: parse_variants(&a.variants)?,
                runs: a.runs,
                base_seed: a.seed,
                bins: a.bins,
                inner_cap: a.inner_cap,
                outer_cap: a.outer_cap,
                projection: if a.absolute_projection { ProjectionForm::Absolute } else { ProjectionForm::Signed },
                workers: a.workers,
                timings: a.timings,
                json: a.json,
                ..BenchConfig::new(a.data, a.schema, a.k, a.out)
            };
            let outcome = bench::cmd_cluster(&config)?;
            print!("{}", outcome.summary);
            if a.strict && !outcome.all_converged() {
                eprintln!("error: at least one run hit an iteration cap");
                return Ok(ExitCode::from(4));
            }
        }
        Command::Eval { labels, pred } => {
            let truth = bench::io::read_labels(&labels)?;
            let pred = bench::io::read_labels(&pred)?;
            let s = evaluation::score(&pred, &truth)?;
            println!("ARI\t{:.4}\nCA\t{:.4}", s.ari, s.ca);
        }
        Command::Synth(a) => {
            let spec = SyntheticSpec {
                n: a.n,
                k_true: a.k,
                d_u: a.d_u,
                d_n: a.d_n,
                d_o: a.d_o,
                values: a.values,
                separation: a.separation,
                seed: a.seed,
            };
            for p in bench::cmd_synth(&spec, &a.out, &a.name)? {
                println!("{}", p.display());
            }
        }
        Command::BenchTime(a) => {
            let mut config = TimingConfig::new(a.out);
            config.input = a.schema.zip(a.data);
            config.synthetic.n = a.n;
            config.synthetic.seed = a.seed;
            config.k = a.k;
            if !a.variants.is_empty() {
                config.variants = parse_variants(&a.variants)?;
            }
            if !a.phis.is_empty() {
                config.rates = a.phis;
            }
            config.repeats = a.repeats;
            config.seed = a.seed;
            config.bins = a.bins;
            config.inner_cap = a.inner_cap;
            config.outer_cap = a.outer_cap;
            let rows = bench::cmd_bench_time(&config)?;
            print!("{}", bench::timing::timing_table(&rows));
        }
        Command::Trace { reports, out } => {
            bench::cmd_trace_plot(&reports, &out)?;
            println!("{}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { 3 } else { 2 })
        }
    }
}
