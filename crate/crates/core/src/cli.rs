//! Command-line front end: `validate`, `eval`, `hist` and `gen-fixtures`.
//!
//! Exit codes: 0 on success, 1 for data or validation failures, 2 for I/O
//! failures (including an unreadable manifest).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::batch::BatchEvaluator;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::ingest::{self, npy, GroundingInstance, Setting};
use crate::model::{BoundingBox, MetricConfig};
use crate::report::{self, GroupBy, InstanceRecord, Metric, NamedHistogram, SummaryRow, TableFormat, DEFAULT_BINS};

pub const RESOLVED_CONFIG: &str = "config.json";

#[derive(Debug, Parser)]
#[command(name = "groundcam", version, about = "Grounding metrics for activation maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that every manifest instance loads and has in-bounds boxes.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Evaluate a manifest and write records, summary tables and histograms.
    Eval(EvalArgs),
    /// Re-bin one metric from an `instances.records` file per (dataset, model).
    Hist {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        metric: String,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Write a synthetic manifest plus `.npy` maps.
    GenFixtures(GenArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct EvalArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// JSON file with any of the override keys below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "tie-tol")]
    pub tie_tol: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Table printed to stdout.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub svg: bool,
    /// Comma-separated subset of dataset,split,setting,model.
    #[arg(long = "group-by")]
    pub group_by: Option<String>,
    /// Comma-separated metrics to histogram.
    #[arg(long = "hist-metrics")]
    pub hist_metrics: Option<String>,
}

/// Options accepted from `--config`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub threshold: Option<f64>,
    pub tau: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub tie_tol: Option<f64>,
    pub bins: Option<usize>,
    pub workers: Option<usize>,
    pub format: Option<String>,
    pub svg: Option<bool>,
    pub group_by: Option<String>,
    pub hist_metrics: Option<String>,
}

/// Fully resolved evaluation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub manifest: PathBuf,
    pub out: PathBuf,
    pub metric: MetricConfig,
    pub group_by: GroupBy,
    pub hist_metrics: Vec<Metric>,
    pub bins: usize,
    pub workers: usize,
    pub format: TableFormat,
    pub svg: bool,
}

/// The part of [`RunConfig`] that can influence results, echoed to
/// `config.json`. The worker count is left out on purpose: it never changes
/// output bytes.
#[derive(Debug, Serialize)]
struct ResolvedEcho<'a> {
    metric: &'a MetricConfig,
    group_by: &'a GroupBy,
    hist_metrics: Vec<&'static str>,
    bins: usize,
    svg: bool,
}

fn parse_metric_list(s: &str) -> Result<Vec<Metric>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

impl RunConfig {
    pub fn new(manifest: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            manifest: manifest.into(),
            out: out.into(),
            metric: MetricConfig::default(),
            group_by: GroupBy::default(),
            hist_metrics: vec![Metric::IouSoft, Metric::IoRatio],
            bins: DEFAULT_BINS,
            workers: 0,
            format: TableFormat::Markdown,
            svg: false,
        }
    }

    /// Flag > config file > built-in defaults.
    pub fn resolve(args: &EvalArgs) -> Result<Self> {
        let file: ConfigFile = match &args.config {
            Some(p) => serde_json::from_str(&fs::read_to_string(p)?)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))?,
            None => ConfigFile::default(),
        };
        let mut run = RunConfig::new(&args.manifest, &args.out);
        let d = run.metric;
        run.metric = MetricConfig {
            binarize_threshold: args.threshold.or(file.threshold).unwrap_or(d.binarize_threshold),
            maxima_threshold: args.tau.or(file.tau).unwrap_or(d.maxima_threshold),
            nms_radius: args.delta.or(file.delta).unwrap_or(d.nms_radius),
            epsilon: args.epsilon.or(file.epsilon).unwrap_or(d.epsilon),
            tie_tolerance: args.tie_tol.or(file.tie_tol).unwrap_or(d.tie_tolerance),
        };
        run.metric.validate()?;
        run.bins = args.bins.or(file.bins).unwrap_or(run.bins);
        run.workers = args.workers.or(file.workers).unwrap_or(run.workers);
        if let Some(f) = args.format.as_ref().or(file.format.as_ref()) {
            run.format = f.parse()?;
        }
        run.svg = args.svg || file.svg.unwrap_or(false);
        if let Some(g) = args.group_by.as_ref().or(file.group_by.as_ref()) {
            run.group_by = g.parse()?;
        }
        if let Some(m) = args.hist_metrics.as_ref().or(file.hist_metrics.as_ref()) {
            run.hist_metrics = parse_metric_list(m)?;
        }
        Ok(run)
    }
}

/// Problems found by [`cmd_validate`]; empty means every instance validated.
#[derive(Debug, Default)]
pub struct ValidationReport {
    pub total: usize,
    pub errors: Vec<(String, Error)>,
}

impl ValidationReport {
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.errors.is_empty())
    }
}

pub fn cmd_validate(manifest: &Path) -> Result<ValidationReport> {
    let instances = ingest::load_manifest(manifest)?;
    let errors = instances
        .iter()
        .filter_map(|inst| ingest::validate_instance(inst).err().map(|e| (inst.id.clone(), e)))
        .collect();
    Ok(ValidationReport {
        total: instances.len(),
        errors,
    })
}

#[derive(Debug)]
pub struct EvalOutcome {
    pub records: Vec<InstanceRecord>,
    pub rows: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
    /// The summary rendered in the requested format.
    pub table: String,
}

pub fn cmd_eval(run: &RunConfig) -> Result<EvalOutcome> {
    run.metric.validate()?;
    let instances = ingest::load_manifest(&run.manifest)?;
    if instances.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let cfg = run.metric;
    let metrics = BatchEvaluator::new(run.workers).map(&instances, |inst| report::evaluate_instance(inst, &cfg))?;
    let records: Vec<InstanceRecord> = instances
        .iter()
        .zip(metrics)
        .map(|(inst, m)| InstanceRecord::new(inst, m))
        .collect();
    let rows = report::summarize(&records, &run.group_by)?;
    let hists = report::histograms_for(&records, &run.hist_metrics, &run.group_by, run.bins)?;
    let table = report::render_table(&rows, run.format)?;

    let mut files = report::write_outputs(&records, &rows, &hists, &run.out, run.svg)?;
    let echo = ResolvedEcho {
        metric: &run.metric,
        group_by: &run.group_by,
        hist_metrics: run.hist_metrics.iter().map(|m| m.name()).collect(),
        bins: run.bins,
        svg: run.svg,
    };
    let config_path = run.out.join(RESOLVED_CONFIG);
    let written = serde_json::to_string_pretty(&echo)
        .map_err(Error::from)
        .and_then(|s| fs::write(&config_path, s + "\n").map_err(Error::from));
    if let Err(e) = written {
        report::remove_all(&files);
        return Err(e);
    }
    files.push(config_path);
    Ok(EvalOutcome {
        records,
        rows,
        files,
        table,
    })
}

pub fn cmd_hist(records: &Path, metric: &str, bins: usize, out: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    let metric: Metric = metric.parse()?;
    let records = report::read_records(records)?;
    let hists: Vec<NamedHistogram> = report::histograms_for(&records, &[metric], &GroupBy::DATASET_MODEL, bins)?;
    fs::create_dir_all(out)?;
    report::write_histograms(&hists, out, svg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    Scenario1,
    Scenario2,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum MapDtype {
    F32,
    #[default]
    F64,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: FixtureKind,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instance count for `random`.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    /// Ground-truth box `y0,x0,y1,x1` for the scenario kinds.
    #[arg(long = "box")]
    pub bbox: Option<String>,
    /// Ascending outside masses for `scenario2`.
    #[arg(long, default_value = "0,1,2,3")]
    pub masses: String,
    #[arg(long, default_value_t = 50.0)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = MapDtype::F64)]
    pub dtype: MapDtype,
}

impl GenArgs {
    pub fn new(kind: FixtureKind, out: impl Into<PathBuf>) -> Self {
        GenArgs {
            kind,
            out: out.into(),
            seed: 0,
            n: 100,
            height: None,
            width: None,
            bbox: None,
            masses: "0,1,2,3".into(),
            delta: 50.0,
            dtype: MapDtype::F64,
        }
    }
}

fn parse_box(s: &str) -> Result<BoundingBox> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidParameter(format!("bad box `{s}`")))?;
    match parts[..] {
        [y0, x0, y1, x1] => Ok(BoundingBox::new(y0, x0, y1, x1)),
        _ => Err(Error::InvalidParameter(format!("box needs four values, got `{s}`"))),
    }
}

fn parse_masses(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidMasses(format!("bad mass `{t}`")))
        })
        .collect()
}

const RANDOM_DATASETS: [&str; 2] = ["synthetic-a", "synthetic-b"];
const RANDOM_MODELS: [&str; 2] = ["model-x", "model-y"];
const SETTINGS: [Setting; 5] = [
    Setting::Phrase,
    Setting::Referring,
    Setting::Triplet,
    Setting::Subject,
    Setting::Object,
];

/// Writes `manifest.jsonl` and `maps/*.npy` under `args.out`; returns the manifest path.
pub fn cmd_gen_fixtures(args: &GenArgs) -> Result<PathBuf> {
    let h = args.height.unwrap_or(match args.kind {
        FixtureKind::Random => 64,
        _ => 224,
    });
    let w = args.width.unwrap_or(h);
    if h == 0 || w == 0 {
        return Err(Error::InvalidParameter("height and width must be positive".into()));
    }
    let scenario_box = match &args.bbox {
        Some(s) => parse_box(s)?,
        None => BoundingBox::new(h * 5 / 14, w * 5 / 14, h * 5 / 8, w * 5 / 8),
    };

    let mut entries: Vec<(GroundingInstance, crate::ActivationMap)> = Vec::new();
    let instance = |id: String, boxes: Vec<BoundingBox>, split: &str, setting: Setting, dataset: &str, model: &str| {
        GroundingInstance {
            map_path: Path::new("maps").join(format!("{id}.npy")),
            id,
            boxes,
            prompt: String::new(),
            dataset: dataset.to_owned(),
            split: split.to_owned(),
            setting,
            model: model.to_owned(),
        }
    };
    match args.kind {
        FixtureKind::Scenario1 => {
            let map = fixtures::scenario1_fixture(h, w, scenario_box, args.delta)?;
            let inst = instance(
                "scenario1-0".into(),
                vec![scenario_box],
                "scenario1",
                Setting::Phrase,
                "synthetic",
                "fixture",
            );
            entries.push((inst, map));
        }
        FixtureKind::Scenario2 => {
            let masses = parse_masses(&args.masses)?;
            let maps = fixtures::scenario2_fixtures(h, w, scenario_box, &masses)?;
            for (k, map) in maps.into_iter().enumerate() {
                let inst = instance(
                    format!("scenario2-{k}"),
                    vec![scenario_box],
                    "scenario2",
                    Setting::Phrase,
                    "synthetic",
                    &format!("model-{k}"),
                );
                entries.push((inst, map));
            }
        }
        FixtureKind::Random => {
            if args.n == 0 {
                return Err(Error::InvalidParameter("--n must be at least 1".into()));
            }
            for k in 0..args.n {
                let (map, gt) = fixtures::random_instance(args.seed, k as u64, h, w);
                let inst = instance(
                    format!("random-{k:06}"),
                    gt.boxes().to_vec(),
                    "test",
                    SETTINGS[k % SETTINGS.len()],
                    RANDOM_DATASETS[k / 2 % 2],
                    RANDOM_MODELS[k % 2],
                );
                entries.push((inst, map));
            }
        }
    }

    let maps_dir = args.out.join("maps");
    fs::create_dir_all(&maps_dir)?;
    let dtype = match args.dtype {
        MapDtype::F32 => npy::Dtype::F32,
        MapDtype::F64 => npy::Dtype::F64,
    };
    for (inst, map) in &entries {
        fs::write(args.out.join(&inst.map_path), npy::encode(map, dtype))?;
    }
    let manifest = args.out.join("manifest.jsonl");
    let instances: Vec<GroundingInstance> = entries.into_iter().map(|(i, _)| i).collect();
    ingest::write_manifest(std::io::BufWriter::new(fs::File::create(&manifest)?), &instances)?;
    Ok(manifest)
}

fn report_error(stderr: &mut impl Write, e: &Error) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    e.exit_code()
}

/// Parses `args` and runs the chosen command, returning the exit code.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(if code == 0 { stdout as &mut dyn Write } else { stderr }, "{e}");
            return code;
        }
    };
    match cli.command {
        Command::Validate { manifest } => match cmd_validate(&manifest) {
            Ok(report) => {
                for (id, e) in &report.errors {
                    let _ = writeln!(stdout, "{id}: {e}");
                }
                let _ = writeln!(
                    stdout,
                    "{} of {} instances valid",
                    report.total - report.errors.len(),
                    report.total
                );
                report.exit_code()
            }
            Err(e) => report_error(stderr, &e),
        },
        Command::Eval(args) => match RunConfig::resolve(&args).and_then(|run| cmd_eval(&run)) {
            Ok(outcome) => {
                let _ = write!(stdout, "{}", outcome.table);
                0
            }
            Err(e) => report_error(stderr, &e),
        },
        Command::Hist {
            records,
            metric,
            bins,
            out,
            svg,
        } => match cmd_hist(&records, &metric, bins, &out, svg) {
            Ok(files) => {
                for f in files {
                    let _ = writeln!(stdout, "{}", f.display());
                }
                0
            }
            Err(e) => report_error(stderr, &e),
        },
        Command::GenFixtures(args) => match cmd_gen_fixtures(&args) {
            Ok(manifest) => {
                let _ = writeln!(stdout, "{}", manifest.display());
                0
            }
            Err(e) => report_error(stderr, &e),
        },
    }
}
