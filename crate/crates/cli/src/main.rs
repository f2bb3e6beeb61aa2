use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use oppminer::{
    featurize, homogeneity, kmeans, load_labeled_dataset, load_single_series, mine_maximal, mine_variant,
    moving_average, nmi, ColumnSelector, Dataset, EncodedSeries, Filter, Pattern, TimeSeries, Variant,
};

mod report;

use report::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "oppminer", version, about = "Frequent order-preserving pattern mining for time series")]
struct Cli {
    /// Worker threads for support counting (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mine frequent (or maximal) patterns of one series.
    Mine(MineArgs),
    /// Find all occurrences of one pattern in a series.
    Match(MatchArgs),
    /// Build the maximal-pattern feature matrix of a labeled dataset.
    Featurize(FeaturizeArgs),
    /// Cluster a labeled dataset and score the result against its labels.
    Cluster(ClusterArgs),
    /// Run every mining variant on one series and compare them.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct SeriesInput {
    /// Series file: one value per line, or CSV together with --column.
    #[arg(long)]
    input: PathBuf,

    /// CSV column, by header name or 1-based index.
    #[arg(long)]
    column: Option<ColumnSelector>,

    /// Smooth with a centered moving average of this odd width first.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args, Debug)]
#[group(id = "support", required = true, multiple = false)]
struct Minsup {
    /// Minimum support as an absolute occurrence count.
    #[arg(long, group = "support")]
    minsup: Option<usize>,

    /// Minimum support as a fraction of (n - 1), rounded up.
    #[arg(long, group = "support")]
    minsup_rel: Option<f64>,
}

#[derive(Args, Debug)]
struct MineArgs {
    #[command(flatten)]
    series: SeriesInput,
    #[command(flatten)]
    minsup: Minsup,
    /// Report only maximal patterns.
    #[arg(long)]
    maximal: bool,
    #[arg(long, default_value_t = Variant::FusionFvp)]
    variant: Variant,
}

#[derive(Args, Debug)]
struct MatchArgs {
    #[command(flatten)]
    series: SeriesInput,
    /// Pattern as dash-separated ranks, e.g. 3-4-5-1-2.
    #[arg(long)]
    pattern: String,
}

#[derive(Args, Debug)]
struct DatasetInput {
    /// Labeled dataset: one series per line, label first.
    #[arg(long)]
    input: PathBuf,
    /// Smooth every series with a centered moving average of this odd width.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args, Debug)]
struct FeaturizeArgs {
    #[command(flatten)]
    data: DatasetInput,
    /// Absolute minimum support used for every series.
    #[arg(long)]
    minsup: usize,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    #[command(flatten)]
    data: DatasetInput,
    #[arg(long)]
    minsup: usize,
    /// Number of clusters (default: number of distinct labels).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    series: SeriesInput,
    #[command(flatten)]
    minsup: Minsup,
    /// Comma-separated prefix lengths. An absolute --minsup applies to the
    /// shortest prefix and scales with length.
    #[arg(long, value_delimiter = ',')]
    prefix_lengths: Vec<usize>,
    /// Runs per variant and length; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
}

/// Marks failures that are bugs rather than bad input.
#[derive(Debug)]
struct Internal(String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal error: {}", self.0)
    }
}

impl std::error::Error for Internal {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OPPMINER_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Internal>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Internal(e.to_string()))?;
    }
    let report = match &cli.command {
        Command::Mine(a) => cmd_mine(a)?,
        Command::Match(a) => cmd_match(a)?,
        Command::Featurize(a) => cmd_featurize(a)?,
        Command::Cluster(a) => cmd_cluster(a)?,
        Command::Bench(a) => cmd_bench(a)?,
    };
    match &cli.output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut out = BufWriter::new(file);
            report.write(cli.format, &mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            report.write(cli.format, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn load_series(input: &SeriesInput) -> anyhow::Result<TimeSeries> {
    let s =
        load_single_series(&input.input, input.column.as_ref()).with_context(|| input.input.display().to_string())?;
    info!("loaded {} values from {}", s.len(), input.input.display());
    match input.window {
        Some(w) => moving_average(&s, w).with_context(|| input.input.display().to_string()),
        None => Ok(s),
    }
}

fn load_dataset(input: &DatasetInput) -> anyhow::Result<Dataset> {
    let ctx = || input.input.display().to_string();
    let ds = load_labeled_dataset(&input.input).with_context(ctx)?;
    info!("loaded {} series from {}", ds.len(), input.input.display());
    match input.window {
        Some(w) => ds.map_series(|s| moving_average(s, w)).with_context(ctx),
        None => Ok(ds),
    }
}

/// Absolute minimum support for a series of length `n`.
fn resolve_minsup(m: &Minsup, n: usize) -> anyhow::Result<usize> {
    match (m.minsup, m.minsup_rel) {
        (Some(0), _) => bail!("--minsup must be at least 1"),
        (Some(v), _) => Ok(v),
        (None, Some(f)) => relative_minsup(f, n),
        (None, None) => bail!("one of --minsup or --minsup-rel is required"),
    }
}

fn relative_minsup(f: f64, n: usize) -> anyhow::Result<usize> {
    if !(f > 0.0 && f <= 1.0) {
        bail!("--minsup-rel must lie in (0, 1], got {f}");
    }
    Ok(((f * n.saturating_sub(1) as f64).ceil() as usize).max(1))
}

fn cmd_mine(a: &MineArgs) -> anyhow::Result<Report> {
    let s = load_series(&a.series)?;
    let minsup = resolve_minsup(&a.minsup, s.len())?;
    if a.maximal {
        if a.variant != Variant::FusionFvp {
            warn!("maximal mining always uses fusion_fvp; ignoring --variant {}", a.variant);
        }
        let r = mine_maximal(&s, minsup)?;
        let (removed, total) = r.compression_fraction();
        eprintln!(
            "maximal={} frequent={} compression={removed}/{total} ({:.1}%) candidates={} elapsed_ms={:.3}",
            r.maximal.len(),
            total,
            100.0 * r.compression_rate,
            r.mining.candidates_generated,
            r.mining.elapsed_ms()
        );
        Ok(Report::patterns(&r.maximal, minsup, r.mining.candidates_generated, r.mining.elapsed_ms())
            .with_compression(removed, total))
    } else {
        let r = mine_variant(&s, minsup, a.variant)?;
        eprintln!(
            "frequent={} candidates={} elapsed_ms={:.3}",
            r.frequent.len(),
            r.candidates_generated,
            r.elapsed_ms()
        );
        Ok(Report::patterns(&r.frequent, minsup, r.candidates_generated, r.elapsed_ms()))
    }
}

fn cmd_match(a: &MatchArgs) -> anyhow::Result<Report> {
    let p: Pattern = a.pattern.parse().with_context(|| format!("--pattern {}", a.pattern))?;
    let s = load_series(&a.series)?;
    let occ = EncodedSeries::new(&s).occurrences(&p, Filter::Sbndm2);
    Ok(Report::matches(&p, occ.starts()))
}

fn cmd_featurize(a: &FeaturizeArgs) -> anyhow::Result<Report> {
    if a.minsup == 0 {
        bail!("--minsup must be at least 1");
    }
    let ds = load_dataset(&a.data)?;
    let fm = featurize(&ds, a.minsup).with_context(|| a.data.input.display().to_string())?;
    info!("vocabulary of {} maximal patterns", fm.dimensionality());
    Ok(Report::features(&ds, fm))
}

fn cmd_cluster(a: &ClusterArgs) -> anyhow::Result<Report> {
    if a.minsup == 0 {
        bail!("--minsup must be at least 1");
    }
    let ds = load_dataset(&a.data)?;
    let truth = ds.labels.clone().with_context(|| format!("{}: dataset has no labels", a.data.input.display()))?;
    let k = a.k.unwrap_or_else(|| truth.iter().collect::<std::collections::BTreeSet<_>>().len());

    let fm = featurize(&ds, a.minsup).with_context(|| a.data.input.display().to_string())?;
    let mined = kmeans(&fm.points(), k, a.seed, a.max_iter)?;
    let mut rows = vec![report::ClusterRow {
        representation: "mined",
        dimensionality: fm.dimensionality(),
        nmi: nmi(&mined.labels, &truth)?,
        homogeneity: homogeneity(&mined.labels, &truth)?,
    }];

    let n = ds.series[0].len();
    if let Some(other) = ds.series.iter().find(|s| s.len() != n) {
        warn!(
            "series lengths differ ({} has {}, expected {n}); skipping the raw-value comparison",
            other.name(),
            other.len()
        );
    } else {
        let raw: Vec<Vec<f64>> = ds.series.iter().map(|s| s.values().to_vec()).collect();
        let clustered = kmeans(&raw, k, a.seed, a.max_iter)?;
        rows.push(report::ClusterRow {
            representation: "raw",
            dimensionality: n,
            nmi: nmi(&clustered.labels, &truth)?,
            homogeneity: homogeneity(&clustered.labels, &truth)?,
        });
    }
    Ok(Report::Cluster(rows))
}

/// Minimum support for each prefix length. An absolute value is taken to
/// belong to the shortest length and scaled up proportionally.
fn bench_minsups(m: &Minsup, lengths: &[usize]) -> anyhow::Result<Vec<usize>> {
    match (m.minsup, m.minsup_rel) {
        (Some(0), _) => bail!("--minsup must be at least 1"),
        (Some(v), _) => {
            let base = *lengths.iter().min().expect("at least one length");
            Ok(lengths.iter().map(|&l| (v * l).div_ceil(base)).collect())
        }
        (None, Some(f)) => lengths.iter().map(|&l| relative_minsup(f, l)).collect(),
        (None, None) => bail!("one of --minsup or --minsup-rel is required"),
    }
}

fn cmd_bench(a: &BenchArgs) -> anyhow::Result<Report> {
    let s = load_series(&a.series)?;
    let lengths = if a.prefix_lengths.is_empty() { vec![s.len()] } else { a.prefix_lengths.clone() };
    if let Some(&l) = lengths.iter().find(|&&l| l < 2 || l > s.len()) {
        bail!("prefix length {l} outside 2..={}", s.len());
    }
    let minsups = bench_minsups(&a.minsup, &lengths)?;
    let mut rows = Vec::new();
    for (&len, &minsup) in lengths.iter().zip(&minsups) {
        let prefix = s.prefix(len);
        let mut reference = None;
        for v in Variant::ALL {
            let mut best = None::<oppminer::MiningResult>;
            for _ in 0..a.repeat.max(1) {
                let r = mine_variant(&prefix, minsup, v)?;
                if best.as_ref().is_none_or(|b| r.elapsed < b.elapsed) {
                    best = Some(r);
                }
            }
            let r = best.expect("at least one run");
            info!("bench length={len} variant={v} frequent={} elapsed_ms={:.3}", r.frequent.len(), r.elapsed_ms());
            match &reference {
                None => reference = Some(r.frequent.clone()),
                Some(f) if *f != r.frequent => {
                    return Err(Internal(format!("variant {v} disagrees with fusion_fvp at length {len}")).into())
                }
                Some(_) => {}
            }
            rows.push(report::BenchRow {
                variant: v,
                length: len,
                minsup,
                frequent: r.frequent.len(),
                candidates: r.candidates_generated,
                longest: r.longest_length(),
                elapsed_ms: r.elapsed_ms(),
            });
        }
    }
    Ok(Report::Bench(rows))
}
