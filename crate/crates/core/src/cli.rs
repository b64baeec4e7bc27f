//! Command-line front end. Every run writes `run_report.json` next to its
//! outputs; `topolens replay <report>` runs the recorded command again.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::data::{self, DataKind, Dataset, LayerStackConfig, SurrogateConfig};
use crate::dispersion::{dataset_differences, run_dispersion, Comparison, DispersionConfig, DispersionReport};
use crate::error::{Error, Result};
use crate::features::{summarize, write_summaries_csv, SummaryConfig};
use crate::global::{self, GlobalConfig, SummaryTable};
use crate::local::{
    self, default_statistics, CurveKind, LayerSweep, SweepConfig, Variant, DEFAULT_PEAK_KS, DEFAULT_PERMUTATIONS,
};
use crate::ph::{cloud_persistence, Barcode, Condition, Metric, PointCloud, Threshold};
use crate::{seed, svg};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_FILE: &str = "run_report.json";
const DEFAULT_OUT: &str = "topolens_out";

#[derive(Debug, Parser)]
#[command(name = "topolens", version, about = "Persistent homology of activation clouds")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Barcode of one point cloud (CSV or binary activation file).
    Barcode(BarcodeArgs),
    /// Per-layer summaries, pruning, PCA, CCA, logistic regression and SHAP.
    Global(GlobalArgs),
    /// Layer-pair sweeps and peak analysis.
    Local(LocalArgs),
    /// Neighbourhood dispersion tests and cosine bootstraps.
    Dispersion(DispersionArgs),
    /// Synthetic fixtures and surrogate datasets.
    Generate(GenerateArgs),
    /// Run the command recorded in a run report again.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BarcodeArgs {
    /// Input cloud: `.csv` with a header row, or a binary activation file.
    pub input: PathBuf,
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    /// Highest homology dimension (0 or 1).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub max_dim: u8,
    /// Filtration cutoff for loops: a number or `auto`.
    #[arg(long, default_value = "auto")]
    pub threshold: Threshold,
    /// Also write `barcode.svg`.
    #[arg(long)]
    pub svg: bool,
    #[arg(long, env = "TOPOLENS_OUT", default_value = DEFAULT_OUT)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GlobalArgs {
    pub manifest: PathBuf,
    /// Comma-separated layer ids (default: every manifest layer).
    #[arg(long, value_delimiter = ',')]
    pub layers: Option<Vec<u32>>,
    /// Subsamples per condition.
    #[arg(long = "K", default_value_t = 32)]
    pub n_subsamples: usize,
    /// Points per subsample.
    #[arg(long = "k", default_value_t = 256)]
    pub subsample_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = global::DEFAULT_PRUNE_THRESHOLD)]
    pub prune_threshold: f64,
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    #[arg(long, default_value = "auto")]
    pub threshold: Threshold,
    /// Ridge strength of the logistic model.
    #[arg(long, default_value_t = 1.0)]
    pub l2: f64,
    /// Condition compared against clean.
    #[arg(long, default_value = "poisoned")]
    pub adversarial: Condition,
    /// Also write PCA and SHAP plots per layer.
    #[arg(long)]
    pub svg: bool,
    #[arg(long, env = "TOPOLENS_OUT", default_value = DEFAULT_OUT)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LocalArgs {
    pub manifest: PathBuf,
    /// Comma-separated layer distances; one sweep per value.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub interval: Vec<usize>,
    /// Samples per condition.
    #[arg(long, default_value_t = local::DEFAULT_SWEEP_SAMPLES)]
    pub n: usize,
    /// Comma-separated summary features to track.
    #[arg(long, value_delimiter = ',')]
    pub stats: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub variants: Option<Vec<Variant>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo draws for peak p-values on long axes.
    #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
    #[arg(long, default_value = "poisoned")]
    pub adversarial: Condition,
    /// Also write one ratio plot per statistic and interval.
    #[arg(long)]
    pub svg: bool,
    #[arg(long, env = "TOPOLENS_OUT", default_value = DEFAULT_OUT)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DispersionArgs {
    pub manifest: PathBuf,
    /// Comma-separated layer ids (default: every layer that has a difference).
    #[arg(long, value_delimiter = ',')]
    pub layers: Option<Vec<u32>>,
    #[arg(long, default_value_t = crate::dispersion::DEFAULT_NEIGHBORS)]
    pub k_neighbors: usize,
    #[arg(long, default_value_t = crate::dispersion::DEFAULT_BOOTSTRAP_SUBSAMPLE)]
    pub subsample: usize,
    #[arg(long, default_value_t = crate::dispersion::DEFAULT_BOOTSTRAP_ITERATIONS)]
    pub iterations: usize,
    /// Comma-separated comparisons (default: clean vs adversarial plus the ablations).
    #[arg(long, value_delimiter = ',')]
    pub comparisons: Option<Vec<Comparison>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "TOPOLENS_OUT", default_value = DEFAULT_OUT)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: Generator,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, env = "TOPOLENS_OUT", default_value = DEFAULT_OUT)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Two noisy circles, written as `two_circles.csv`.
    TwoCircles {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
    },
    /// Clean and poisoned Gaussian-mixture clouds, one pair per layer.
    Surrogate {
        #[arg(long, default_value_t = 2048)]
        n_samples: usize,
        #[arg(long, default_value_t = data::synth::DEFAULT_SURROGATE_DIM)]
        dim: usize,
        #[arg(long, default_value_t = data::synth::DEFAULT_SPREAD_CLEAN)]
        spread_clean: f64,
        #[arg(long, default_value_t = data::synth::DEFAULT_SPREAD_POISONED)]
        spread_poisoned: f64,
        /// Draw both conditions from the clean family.
        #[arg(long)]
        identical: bool,
        #[arg(long, default_value_t = 1)]
        layers: u32,
    },
    /// Stacked i.i.d. layers with optional injected loops.
    LayerStack {
        #[arg(long, default_value_t = 200)]
        n_samples: usize,
        #[arg(long, default_value_t = 12)]
        n_layers: usize,
        #[arg(long, default_value_t = 512)]
        dim: usize,
        /// Comma-separated layers whose next layer carries a poisoned loop.
        #[arg(long, value_delimiter = ',')]
        loop_layers: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        ring_noise: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub report: PathBuf,
    #[arg(long, env = "TOPOLENS_OUT", default_value = DEFAULT_OUT)]
    #[serde(skip)]
    pub out: PathBuf,
}

/// Everything needed to rerun a command and get the same bytes back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: Command,
    /// Seed of each randomized stage, as resolved for this run.
    pub seeds: BTreeMap<String, u64>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunReport {
    pub fn read(path: &Path) -> Result<RunReport> {
        let mut text = String::new();
        BufReader::new(File::open(path)?).read_to_string(&mut text)?;
        Ok(serde_json::from_str(&text)?)
    }
}

struct Outputs {
    root: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Outputs {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Registers `rel` and returns its absolute path, creating parents.
    fn file(&mut self, rel: &str) -> Result<PathBuf> {
        let p = self.root.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        self.files.push(rel.to_string());
        Ok(p)
    }

    fn writer(&mut self, rel: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.file(rel)?)?))
    }

    fn text(&mut self, rel: &str, content: &str) -> Result<()> {
        Ok(fs::write(self.file(rel)?, content)?)
    }

    fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        self.text(rel, &(serde_json::to_string_pretty(value)? + "\n"))
    }
}

/// Sizes the worker pool and runs the command.
pub fn run(cli: Cli) -> Result<RunReport> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidInput("--threads must be >= 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    execute(cli.command)
}

/// Runs one command and writes its outputs plus the run report.
pub fn execute(command: Command) -> Result<RunReport> {
    if let Command::Replay(args) = command {
        let recorded = RunReport::read(&args.report)?;
        if recorded.version != VERSION {
            eprintln!(
                "warning: report written by version {}, running {VERSION}",
                recorded.version
            );
        }
        if matches!(recorded.command, Command::Replay(_)) {
            return Err(Error::InvalidInput("a run report cannot record a replay".into()));
        }
        return execute(with_out(recorded.command, args.out));
    }
    let command = resolve(command)?;
    let mut out = Outputs::new(out_dir(&command))?;
    let seeds = match &command {
        Command::Barcode(a) => cmd_barcode(a, &mut out)?,
        Command::Global(a) => cmd_global(a, &mut out)?,
        Command::Local(a) => cmd_local(a, &mut out)?,
        Command::Dispersion(a) => cmd_dispersion(a, &mut out)?,
        Command::Generate(a) => cmd_generate(a, &mut out)?,
        Command::Replay(_) => unreachable!("handled above"),
    };
    let mut outputs = out.files.clone();
    outputs.sort();
    let report = RunReport {
        tool: "topolens".into(),
        version: VERSION.into(),
        command,
        seeds,
        outputs,
    };
    fs::write(
        out.root.join(REPORT_FILE),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    Ok(report)
}

fn out_dir(command: &Command) -> &Path {
    match command {
        Command::Barcode(a) => &a.out,
        Command::Global(a) => &a.out,
        Command::Local(a) => &a.out,
        Command::Dispersion(a) => &a.out,
        Command::Generate(a) => &a.out,
        Command::Replay(a) => &a.out,
    }
}

fn with_out(mut command: Command, out: PathBuf) -> Command {
    match &mut command {
        Command::Barcode(a) => a.out = out,
        Command::Global(a) => a.out = out,
        Command::Local(a) => a.out = out,
        Command::Dispersion(a) => a.out = out,
        Command::Generate(a) => a.out = out,
        Command::Replay(a) => a.out = out,
    }
    command
}

fn absolute(path: &Path) -> Result<PathBuf> {
    fs::canonicalize(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Fills every defaulted list and makes input paths absolute, so the
/// recorded command does not depend on the working directory.
fn resolve(command: Command) -> Result<Command> {
    Ok(match command {
        Command::Barcode(mut a) => {
            a.input = absolute(&a.input)?;
            Command::Barcode(a)
        }
        Command::Global(mut a) => {
            a.manifest = absolute(&a.manifest)?;
            if a.layers.is_none() {
                a.layers = Some(Dataset::open(&a.manifest)?.manifest.layers);
            }
            Command::Global(a)
        }
        Command::Local(mut a) => {
            a.manifest = absolute(&a.manifest)?;
            a.stats.get_or_insert_with(default_statistics);
            a.variants.get_or_insert_with(|| Variant::ALL.to_vec());
            Command::Local(a)
        }
        Command::Dispersion(mut a) => {
            a.manifest = absolute(&a.manifest)?;
            if a.layers.is_none() {
                let ds = Dataset::open(&a.manifest)?;
                let mut layers = ds.manifest.layers.clone();
                layers.sort_unstable();
                layers.dedup();
                if ds.manifest.kind == DataKind::Activations && !layers.is_empty() {
                    layers.remove(0);
                }
                a.layers = Some(layers);
            }
            a.comparisons
                .get_or_insert_with(|| DispersionConfig::default().comparisons);
            Command::Dispersion(a)
        }
        other => other,
    })
}

fn read_cloud(path: &Path) -> Result<PointCloud> {
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        data::read_cloud_csv(BufReader::new(File::open(path)?))
    } else {
        data::read_activations(path)
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        v.to_string()
    }
}

fn write_barcode_csv(w: impl std::io::Write, barcode: &Barcode) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["dim", "birth", "death", "truncated"])?;
    for iv in &barcode.intervals {
        w.write_record([
            iv.dim.to_string(),
            fmt_value(iv.birth),
            fmt_value(iv.death),
            iv.truncated.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_barcode(a: &BarcodeArgs, out: &mut Outputs) -> Result<BTreeMap<String, u64>> {
    let cloud = read_cloud(&a.input)?;
    let barcode = cloud_persistence(&cloud, a.metric, a.max_dim as usize, a.threshold)?;
    write_barcode_csv(out.writer("barcode.csv")?, &barcode)?;
    write_summaries_csv(
        out.writer("summary.csv")?,
        &[summarize(&barcode, SummaryConfig::default())],
    )?;
    if a.svg {
        let title = a
            .input
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        out.text("barcode.svg", &svg::barcode_svg(&barcode, &title))?;
    }
    Ok(BTreeMap::new())
}

fn cmd_global(a: &GlobalArgs, out: &mut Outputs) -> Result<BTreeMap<String, u64>> {
    let dataset = Dataset::open(&a.manifest)?;
    let layers = a.layers.clone().unwrap_or_default();
    let mut config = GlobalConfig {
        n_subsamples: a.n_subsamples,
        subsample_size: a.subsample_size,
        metric: a.metric,
        threshold: a.threshold,
        prune_threshold: a.prune_threshold,
        adversarial: a.adversarial,
        seed: a.seed,
        ..GlobalConfig::default()
    };
    config.logistic.l2 = a.l2;
    let results = global::run_global(&dataset, &layers, &config)?;

    let mut overview = csv::Writer::from_writer(out.writer("global.csv")?);
    overview.write_record([
        "layer",
        "n_rows",
        "kept_features",
        "train_accuracy",
        "test_accuracy",
        "test_auc",
        "cv_mean",
    ])?;
    for (report, summaries) in &results {
        let layer = report.layer.unwrap_or_default();
        let dir = format!("layer_{layer:03}");
        let table = SummaryTable::from_summaries(summaries, Some(layer))?;
        report.write_outputs(&out.root.join(&dir), &table)?;
        for f in [
            "report.json",
            "correlation.csv",
            "pca_scores.csv",
            "cca_loadings.csv",
            "shap.csv",
        ] {
            out.files.push(format!("{dir}/{f}"));
        }
        global::write_summaries(&out.file(&format!("{dir}/summaries.csv"))?, summaries)?;
        if a.svg {
            let pts: Vec<[f64; 2]> = report
                .pca
                .scores
                .iter()
                .map(|s| [s[0], s.get(1).copied().unwrap_or(0.0)])
                .collect();
            out.text(
                &format!("{dir}/pca.svg"),
                &svg::scatter_svg(&pts, &table.labels, &format!("layer {layer}"), "PC1", "PC2"),
            )?;
            let pruned = table.select(&report.kept_features)?;
            out.text(
                &format!("{dir}/shap.svg"),
                &svg::beeswarm_svg(&report.shap, &pruned.rows, &format!("layer {layer}")),
            )?;
        }
        let r = &report.regression;
        let cv_mean = crate::stats::mean(&r.cv_scores);
        overview.write_record([
            layer.to_string(),
            report.n_rows.to_string(),
            report.kept_features.len().to_string(),
            r.train_accuracy.to_string(),
            r.test_accuracy.to_string(),
            r.test_auc.to_string(),
            cv_mean.to_string(),
        ])?;
    }
    overview.flush()?;
    Ok(BTreeMap::from([
        ("subsamples".into(), a.seed),
        ("split_and_folds".into(), a.seed),
    ]))
}

fn cmd_local(a: &LocalArgs, out: &mut Outputs) -> Result<BTreeMap<String, u64>> {
    let dataset = Dataset::open(&a.manifest)?;
    for &interval in &a.interval {
        let config = SweepConfig {
            interval,
            n: a.n,
            statistics: a.stats.clone().unwrap_or_else(default_statistics),
            variants: a.variants.clone().unwrap_or_else(|| Variant::ALL.to_vec()),
            adversarial: a.adversarial,
            seed: a.seed,
            ..SweepConfig::default()
        };
        let sweep = local::layer_sweep(&dataset, &config)?;
        sweep.write_csv(out.writer(&format!("sweep_interval{interval}.csv"))?)?;
        let peaks = local::peak_table(&sweep, &DEFAULT_PEAK_KS, a.permutations, a.seed);
        local::write_peak_csv(out.writer(&format!("peaks_interval{interval}.csv"))?, &peaks)?;
        if a.svg {
            write_sweep_svgs(&sweep, interval, out)?;
        }
    }
    Ok(BTreeMap::from([
        ("sample_ids".into(), seed::derive(a.seed, &[0x5a])),
        ("neuron_permutations".into(), a.seed),
        ("peak_null".into(), a.seed),
    ]))
}

fn write_sweep_svgs(sweep: &LayerSweep, interval: usize, out: &mut Outputs) -> Result<()> {
    let labels: Vec<String> = sweep.pairs.iter().map(|(x, y)| format!("{x}-{y}")).collect();
    for stat in &sweep.config.statistics {
        let series: Vec<(String, Vec<f64>)> = sweep
            .config
            .variants
            .iter()
            .map(|&v| (v.to_string(), sweep.curve(v, stat, CurveKind::Ratio)))
            .collect();
        out.text(
            &format!("sweep_interval{interval}_{stat}.svg"),
            &svg::lines_svg(
                &series,
                &labels,
                &format!("{stat}, interval {interval}"),
                "clean / adversarial",
            ),
        )?;
    }
    Ok(())
}

fn write_dispersion_tables(report: &DispersionReport, out: &mut Outputs) -> Result<()> {
    let mut w = csv::Writer::from_writer(out.writer("dispersion_tests.csv")?);
    w.write_record([
        "layer",
        "comparison",
        "n_a",
        "n_b",
        "mean_a",
        "mean_b",
        "sem_a",
        "sem_b",
        "t",
        "df",
        "p_value",
        "p_adjusted",
        "significant",
    ])?;
    for r in report.tests.iter().flatten() {
        w.write_record([
            r.layer.to_string(),
            r.comparison.to_string(),
            r.n_a.to_string(),
            r.n_b.to_string(),
            r.mean_a.to_string(),
            r.mean_b.to_string(),
            r.sem_a.to_string(),
            r.sem_b.to_string(),
            r.welch.statistic.to_string(),
            r.welch.df.to_string(),
            r.welch.p_value.to_string(),
            r.p_adjusted.to_string(),
            r.significant.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(out.writer("cosine.csv")?);
    w.write_record([
        "layer",
        "comparison",
        "iteration",
        "subsample",
        "clamped",
        "mean_a",
        "mean_b",
    ])?;
    for c in &report.cosine {
        let b = &c.bootstrap;
        for (i, (ma, mb)) in b.means_a.iter().zip(&b.means_b).enumerate() {
            w.write_record([
                c.layer.to_string(),
                c.comparison.to_string(),
                i.to_string(),
                b.subsample.to_string(),
                b.clamped.to_string(),
                ma.to_string(),
                mb.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_dispersion(a: &DispersionArgs, out: &mut Outputs) -> Result<BTreeMap<String, u64>> {
    let dataset = Dataset::open(&a.manifest)?;
    let layers = a.layers.clone().unwrap_or_default();
    let reps = dataset_differences(&dataset, &layers)?;
    let config = DispersionConfig {
        k_neighbors: a.k_neighbors,
        comparisons: a
            .comparisons
            .clone()
            .unwrap_or_else(|| DispersionConfig::default().comparisons),
        subsample: a.subsample,
        iterations: a.iterations,
        seed: a.seed,
    };
    let report = run_dispersion(&reps, &config)?;
    out.json("dispersion_report.json", &report)?;
    write_dispersion_tables(&report, out)?;
    Ok(BTreeMap::from([
        ("partitions".into(), a.seed),
        ("cosine_bootstrap".into(), a.seed),
    ]))
}

fn cmd_generate(a: &GenerateArgs, out: &mut Outputs) -> Result<BTreeMap<String, u64>> {
    match &a.kind {
        Generator::TwoCircles { n, noise } => {
            let cloud = data::gen_two_circles(*n, *noise, a.seed)?;
            data::write_cloud_csv(out.writer("two_circles.csv")?, &cloud)?;
        }
        Generator::Surrogate {
            n_samples,
            dim,
            spread_clean,
            spread_poisoned,
            identical,
            layers,
        } => {
            let config = if *identical {
                let base = SurrogateConfig::new(*n_samples, *dim, *spread_clean, *spread_poisoned);
                SurrogateConfig::identical(*n_samples, *dim, base.clean)
            } else {
                SurrogateConfig::new(*n_samples, *dim, *spread_clean, *spread_poisoned)
            };
            let clouds = (0..*layers)
                .map(|l| data::gen_condition_surrogate_with(&config, seed::derive(a.seed, &[l as u64])))
                .collect::<Result<Vec<_>>>()?;
            let per_layer: Vec<(u32, Vec<(Condition, &PointCloud)>)> = clouds
                .iter()
                .enumerate()
                .map(|(l, (c, p))| (l as u32, vec![(Condition::Clean, c), (Condition::Poisoned, p)]))
                .collect();
            write_dataset(out, "surrogate", &per_layer)?;
        }
        Generator::LayerStack {
            n_samples,
            n_layers,
            dim,
            loop_layers,
            ring_noise,
        } => {
            let config = LayerStackConfig {
                n_samples: *n_samples,
                n_layers: *n_layers,
                dim: *dim,
                loop_layers: loop_layers.clone(),
                ring_noise: *ring_noise,
            };
            let stack = data::gen_layer_stack(&config, a.seed)?;
            let per_layer: Vec<(u32, Vec<(Condition, &PointCloud)>)> = stack
                .clean
                .iter()
                .zip(&stack.poisoned)
                .enumerate()
                .map(|(l, (c, p))| (l as u32, vec![(Condition::Clean, c), (Condition::Poisoned, p)]))
                .collect();
            write_dataset(out, "layer_stack", &per_layer)?;
        }
    }
    Ok(BTreeMap::from([("generator".into(), a.seed)]))
}

fn write_dataset(out: &mut Outputs, model: &str, per_layer: &[(u32, Vec<(Condition, &PointCloud)>)]) -> Result<()> {
    data::write_dataset(&out.root, model, DataKind::Activations, per_layer)?;
    out.files.push("manifest.json".into());
    for (layer, clouds) in per_layer {
        for (cond, _) in clouds {
            out.files.push(format!("{cond}_layer{layer:03}.tlns"));
        }
    }
    Ok(())
}
