//! Command implementations behind the `ctbkit` binary.
//!
//! Every command returns an exit code: 0 on success, 1 for I/O or parse
//! failures, 2 for validation, shape or capacity failures. Diagnostics go to
//! stderr; output files are written through a temporary file in the target
//! directory and renamed into place.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctbkit::baselines::{baseline_image, BaselineConfig};
use ctbkit::dataset::{
    compute_stats, parse_detections, parse_ground_truth, parse_predictions, serialize_predictions, DatasetError, PredictionSet,
};
use ctbkit::embeddings::{load_archive, ArchiveError, EmbeddingConfig, EmbeddingError, TensorArchive};
use ctbkit::generator::{GeneratorError, DEFAULT_HEADS};
use ctbkit::inference::{feature_map_from_archive, predict_image, InferenceError, Model};
use ctbkit::metrics::{evaluate, IouMode, IouSchedule, MetricReport};

#[derive(Debug, Parser)]
#[command(name = "ctbkit", version, about = "Contextual text block detection toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a ground-truth (--gt) or prediction (--pred) file.
    Validate(IoArgs),
    /// Print unit/block/image ratios of a ground-truth file.
    Stats(IoArgs),
    /// Score predictions against ground truth.
    Evaluate(EvaluateArgs),
    /// Group units with mean shift and sort each group into reading order.
    GroupBaseline(IoArgs),
    /// Predict blocks for detections from a feature archive and model weights.
    Infer(InferArgs),
}

#[derive(Debug, Args)]
pub struct IoArgs {
    #[arg(long)]
    pub gt: Option<PathBuf>,
    #[arg(long)]
    pub pred: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IouPreset {
    #[value(name = "0.5")]
    Iou50,
    #[value(name = "0.75")]
    Iou75,
    Coco,
    All,
}

impl IouPreset {
    pub fn schedules(self) -> Vec<IouSchedule> {
        match self {
            IouPreset::Iou50 => vec![IouSchedule::iou50()],
            IouPreset::Iou75 => vec![IouSchedule::iou75()],
            IouPreset::Coco => vec![IouSchedule::coco()],
            IouPreset::All => IouSchedule::standard(),
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    /// Report path; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    pub iou: IouPreset,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Detections in prediction-file form; blocks may be omitted.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub d: usize,
    #[arg(long, default_value_t = 7)]
    pub roi: usize,
    #[arg(long = "n-index", default_value_t = 1000)]
    pub n_index: usize,
    #[arg(long, default_value_t = DEFAULT_HEADS)]
    pub heads: usize,
}

/// A failed command: message plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn io(path: &Path, e: impl fmt::Display) -> Self {
        Failure { code: 1, message: format!("{}: {e}", path.display()) }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn dataset(path: &Path, e: DatasetError) -> Self {
        match e {
            DatasetError::Validation(v) => {
                let lines: Vec<String> = v.iter().map(ToString::to_string).collect();
                Failure { code: 2, message: format!("{}: {} violation(s)\n{}", path.display(), v.len(), lines.join("\n")) }
            }
            DatasetError::Empty => Failure { code: 2, message: format!("{}: {e}", path.display()) },
            DatasetError::Parse { .. } => Failure { code: 1, message: format!("{}: {e}", path.display()) },
        }
    }

    fn archive(path: &Path, e: ArchiveError) -> Self {
        let code = match e {
            ArchiveError::Missing(_) | ArchiveError::Shape { .. } => 2,
            _ => 1,
        };
        Failure { code, message: format!("{}: {e}", path.display()) }
    }

    fn inference(context: &str, e: InferenceError) -> Self {
        let code = match &e {
            InferenceError::Archive(a) | InferenceError::Embedding(EmbeddingError::Archive(a)) | InferenceError::Generator(GeneratorError::Archive(a)) => {
                if matches!(a, ArchiveError::Missing(_) | ArchiveError::Shape { .. }) {
                    2
                } else {
                    1
                }
            }
            _ => 2,
        };
        Failure { code, message: format!("{context}: {e}") }
    }
}

pub type CmdResult = Result<(), Failure>;

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Validate(a) => cmd_validate(&a),
        Command::Stats(a) => cmd_stats(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::GroupBaseline(a) => cmd_group_baseline(&a),
        Command::Infer(a) => cmd_infer(&a),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(path, e))
}

/// Writes `bytes` to a temporary file beside `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CmdResult {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Failure::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_validate(a: &IoArgs) -> CmdResult {
    let (path, result) = match (&a.gt, &a.pred) {
        (Some(p), None) => (p, parse_ground_truth(&read(p)?).map(|_| ())),
        (None, Some(p)) => (p, parse_predictions(&read(p)?).map(|_| ())),
        _ => return Err(Failure::usage("validate takes exactly one of --gt or --pred")),
    };
    match result {
        Ok(()) => emit(a.out.as_deref(), ""),
        Err(DatasetError::Validation(v)) => {
            let report: String = v.iter().map(|x| format!("{x}\n")).collect();
            emit(a.out.as_deref(), &report)?;
            Err(Failure::usage(format!("{}: {} violation(s)", path.display(), v.len())))
        }
        Err(e) => Err(Failure::dataset(path, e)),
    }
}

pub fn cmd_stats(a: &IoArgs) -> CmdResult {
    let path = a.gt.as_ref().ok_or_else(|| Failure::usage("stats requires --gt"))?;
    let gt = parse_ground_truth(&read(path)?).map_err(|e| Failure::dataset(path, e))?;
    let stats = compute_stats(&gt).map_err(|e| Failure::dataset(path, e))?;
    emit(a.out.as_deref(), &stats.to_string())
}

/// Loads both files and computes the report the way `evaluate` does.
pub fn evaluation_report(gt: &Path, pred: &Path, preset: IouPreset) -> Result<MetricReport, Failure> {
    let g = parse_ground_truth(&read(gt)?).map_err(|e| Failure::dataset(gt, e))?;
    let p = parse_predictions(&read(pred)?).map_err(|e| Failure::dataset(pred, e))?;
    evaluate(&g, &p, &preset.schedules(), IouMode::Polygon).map_err(|e| Failure::usage(format!("{}: {e}", pred.display())))
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> CmdResult {
    let report = evaluation_report(&a.gt, &a.pred, a.iou)?;
    emit(a.out.as_deref(), &report.to_json())
}

pub fn cmd_group_baseline(a: &IoArgs) -> CmdResult {
    let path = a.gt.as_ref().or(a.pred.as_ref()).ok_or_else(|| Failure::usage("group-baseline requires --gt or --pred"))?;
    let out = a.out.as_ref().ok_or_else(|| Failure::usage("group-baseline requires --out"))?;
    let input = parse_detections(&read(path)?).map_err(|e| Failure::dataset(path, e))?;
    let cfg = BaselineConfig::default();
    let pred = PredictionSet { images: input.images.iter().map(|img| baseline_image(img, &cfg)).collect() };
    write_atomic(out, serialize_predictions(&pred).as_bytes())
}

fn load(path: &Path) -> Result<TensorArchive, Failure> {
    load_archive(&read(path)?).map_err(|e| Failure::archive(path, e))
}

pub fn cmd_infer(a: &InferArgs) -> CmdResult {
    let cfg = EmbeddingConfig { d: a.d, roi: a.roi, n_index: a.n_index };
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let detections = parse_detections(&read(&a.pred)?).map_err(|e| Failure::dataset(&a.pred, e))?;
    let features = load(&a.features)?;
    let weights = load(&a.weights)?;

    let mut model: Option<Model> = None;
    let mut images = Vec::with_capacity(detections.images.len());
    for img in &detections.images {
        let id = img.image_id.to_string();
        let context = format!("image {id}");
        let fm = feature_map_from_archive(&features, &id).map_err(|e| Failure::inference(&context, e))?;
        if model.as_ref().is_none_or(|m| m.embedding.feature.input_dim() != fm.channels() * cfg.roi * cfg.roi) {
            model = Some(Model::from_archive(&weights, cfg, fm.channels(), a.heads).map_err(|e| Failure::inference(&a.weights.display().to_string(), e))?);
        }
        let m = model.as_ref().expect("model loaded above");
        images.push(predict_image(img, &fm, m, a.seed).map_err(|e| Failure::inference(&context, e))?);
    }
    write_atomic(&a.out, serialize_predictions(&PredictionSet { images }).as_bytes())
}
