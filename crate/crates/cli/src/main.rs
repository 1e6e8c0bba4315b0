//! `faceparse` command-line tool.
//!
//! Exit codes: 0 success, 1 failure (including partial failure of a batch),
//! 2 usage error.

use std::collections::BTreeSet;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use faceparse_core::dataset::{annotate_dataset, scan_dataset, AnnotateOptions, MaskSource};
use faceparse_core::loss::{boundary_loss_detailed, fusion_loss, semantic_loss, total_loss, LossWeights, ProbMap};
use faceparse_core::metrics::{Evaluator, OverallMode};
use faceparse_core::{extract_boundary, make_weight_map, Annotator, Category, LabelMap, PartSchema};
use faceparse_service::ServiceConfig;

#[derive(Debug, Parser)]
#[command(name = "faceparse", version, about = "Landmark-guided face parsing annotation tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit parts, fuse with hair/skin masks and write label and boundary maps for a dataset.
    Annotate(AnnotateArgs),
    /// Score predicted label maps against ground truth.
    Eval(EvalArgs),
    /// Derive a boundary map from a label map.
    Boundary(BoundaryArgs),
    /// Evaluate the reference losses on stored probability maps.
    LossCheck(LossArgs),
    /// Run the HTTP annotation service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct SchemaArg {
    /// Part schema TOML file [default: built-in 106-point schema]
    #[arg(long)]
    schema: Option<PathBuf>,
}

impl SchemaArg {
    fn annotator(&self) -> Result<Annotator, Failure> {
        let Some(path) = &self.schema else {
            return Ok(Annotator::default_106());
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let schema = PartSchema::from_toml(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        Ok(Annotator::new(schema))
    }
}

fn parse_masks(s: &str) -> Result<MaskSource, String> {
    Ok(if s == "none" { MaskSource::None } else { MaskSource::Dir(PathBuf::from(s)) })
}

#[derive(Debug, Args)]
struct AnnotateArgs {
    /// Dataset root (flat split files or train/val/test directories)
    #[arg(long)]
    dataset: PathBuf,
    #[command(flatten)]
    schema: SchemaArg,
    /// Directory with skin/<id>.png and hair/<id>.png, or "none" for parts-only output
    #[arg(long, default_value = "none", value_parser = parse_masks)]
    masks: MaskSource,
    /// Output directory; receives labels/ and boundaries/
    #[arg(long)]
    output: PathBuf,
    /// Worker threads, 0 = one per core
    #[arg(long, env = "FACEPARSE_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Also write the run summary as JSON to this file
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Directory of predicted label maps (<id>.png)
    #[arg(long)]
    pred: PathBuf,
    /// Directory of ground-truth label maps (<id>.png)
    #[arg(long)]
    gt: PathBuf,
    /// Report the overall merged score as a macro average instead of micro
    #[arg(long = "macro")]
    macro_average: bool,
    /// Write the scores as JSON to this file ("-" for stdout instead of the text report)
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundaryArgs {
    /// Input label map
    labels: PathBuf,
    /// Output boundary map (0/255 PNG)
    output: PathBuf,
    /// Boundary weight; prints weight-map statistics when given
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct LossArgs {
    /// Ground-truth label map
    #[arg(long)]
    labels: PathBuf,
    /// Semantic branch probabilities, JSON {width,height,channels,values}
    #[arg(long)]
    semantic: PathBuf,
    /// Boundary branch probabilities (one channel)
    #[arg(long)]
    boundary: Option<PathBuf>,
    /// Fusion branch probabilities
    #[arg(long)]
    fusion: Option<PathBuf>,
    /// Extra weight of boundary pixels in the fusion loss
    #[arg(long, default_value_t = 200.0)]
    alpha: f64,
    /// Loss weights semantic,boundary,fusion
    #[arg(long, default_value = "1,1,2")]
    lambdas: String,
    /// Class-balance the boundary loss
    #[arg(long)]
    balance: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Dataset root for sessions; without it only stateless routes work
    #[arg(long)]
    dataset_root: Option<PathBuf>,
    /// Mask directory used when saving, or "none"
    #[arg(long, default_value = "none", value_parser = parse_masks)]
    masks: MaskSource,
    #[command(flatten)]
    schema: SchemaArg,
    /// Maximum undo depth per session
    #[arg(long, default_value_t = faceparse_service::DEFAULT_UNDO_DEPTH)]
    undo_depth: usize,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Partial(String),
    Fatal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure::Fatal(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Annotate(a) => annotate(a),
        Command::Eval(a) => eval(a),
        Command::Boundary(a) => boundary(a),
        Command::LossCheck(a) => loss_check(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Partial(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Fatal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn annotate(args: AnnotateArgs) -> Result<(), Failure> {
    let annotator = args.schema.annotator()?;
    let manifest = scan_dataset(&args.dataset).with_context(|| format!("scanning {}", args.dataset.display()))?;
    let (train, val, test) = manifest.counts();
    println!("dataset: {train} train, {val} val, {test} test");
    let opts = AnnotateOptions { masks: args.masks, output: args.output, workers: args.workers };
    let summary = annotate_dataset(&manifest, &annotator, &opts).context("annotating")?;

    println!("processed {}, succeeded {}, failed {}", summary.processed, summary.succeeded, summary.failed());
    let total: u64 = summary.label_pixels.iter().sum();
    for c in Category::ALL {
        let n = summary.label_pixels[c.id() as usize];
        if n > 0 {
            println!("  {:>13} {:>10} px  {:6.2}%", c.name(), n, 100.0 * n as f64 / total as f64);
        }
    }
    if let Some(path) = &args.summary {
        let json = serde_json::to_string_pretty(&summary).context("encoding summary")?;
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    if summary.failed() > 0 {
        let lines: Vec<String> = summary.failures.iter().map(|(id, e)| format!("  {id}: {e}")).collect();
        return Err(Failure::Partial(format!("{} samples failed:\n{}", summary.failed(), lines.join("\n"))));
    }
    Ok(())
}

fn png_ids(dir: &Path) -> Result<BTreeSet<String>> {
    let mut ids = BTreeSet::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "png") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                ids.insert(stem.to_string());
            }
        }
    }
    Ok(ids)
}

fn eval(args: EvalArgs) -> Result<(), Failure> {
    let gt_ids = png_ids(&args.gt)?;
    if gt_ids.is_empty() {
        return Err(Failure::Usage(format!("no ground-truth label maps in {}", args.gt.display())));
    }
    let mut eval = Evaluator::new();
    let mut failures = Vec::new();
    for id in &gt_ids {
        let file = format!("{id}.png");
        let pair = LabelMap::load_png(&args.pred.join(&file))
            .and_then(|p| Ok((p, LabelMap::load_png(&args.gt.join(&file))?)))
            .map_err(|e| e.to_string())
            .and_then(|(p, g)| eval.add(&p, &g).map_err(|e| e.to_string()));
        if let Err(e) = pair {
            failures.push(format!("  {id}: {e}"));
        }
    }
    let mode = if args.macro_average { OverallMode::Macro } else { OverallMode::Micro };
    let scores = eval.scores(mode);
    match args.json.as_deref() {
        Some(p) if p == Path::new("-") => {
            println!("{}", serde_json::to_string_pretty(&scores).context("encoding scores")?);
        }
        other => {
            print!("{}", scores.report());
            if let Some(path) = other {
                let json = serde_json::to_string_pretty(&scores).context("encoding scores")?;
                fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    if !failures.is_empty() {
        return Err(Failure::Partial(format!("{} pairs skipped:\n{}", failures.len(), failures.join("\n"))));
    }
    Ok(())
}

fn boundary(args: BoundaryArgs) -> Result<(), Failure> {
    let labels = LabelMap::load_png(&args.labels).with_context(|| format!("reading {}", args.labels.display()))?;
    let b = extract_boundary(&labels);
    let png = b.encode_png().context("encoding boundary map")?;
    faceparse_core::dataset::write_atomic(&args.output, &png).context("writing boundary map")?;
    let n = labels.len();
    println!("boundary pixels: {} of {} ({:.2}%)", b.count(), n, 100.0 * b.count() as f64 / n as f64);
    if let Some(alpha) = args.alpha {
        let w = make_weight_map(&b, alpha).map_err(|e| Failure::Usage(e.to_string()))?;
        let sum: f64 = w.weights().iter().sum();
        println!("weight map: alpha {alpha}, sum {sum}, mean {:.6}", sum / n as f64);
    }
    Ok(())
}

fn read_probs(path: &Path) -> Result<ProbMap> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_lambdas(s: &str) -> Result<LossWeights, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("--lambdas expects three numbers, got {s:?}")))?;
    let [a, b, c] = parts[..] else {
        return Err(Failure::Usage(format!("--lambdas expects three numbers, got {s:?}")));
    };
    LossWeights::new(a, b, c).map_err(|e| Failure::Usage(e.to_string()))
}

fn loss_check(args: LossArgs) -> Result<(), Failure> {
    let weights = parse_lambdas(&args.lambdas)?;
    let labels = LabelMap::load_png(&args.labels).with_context(|| format!("reading {}", args.labels.display()))?;
    let edges = extract_boundary(&labels);
    let wmap = make_weight_map(&edges, args.alpha).map_err(|e| Failure::Usage(e.to_string()))?;

    let semantic = semantic_loss(&read_probs(&args.semantic)?, &labels).context("semantic loss")?;
    let mut out = serde_json::json!({ "semantic": semantic });
    let boundary = match &args.boundary {
        Some(p) => {
            let b = boundary_loss_detailed(&read_probs(p)?, &edges, args.balance).context("boundary loss")?;
            out["boundary"] = serde_json::to_value(b).context("encoding")?;
            Some(b.value)
        }
        None => None,
    };
    let fusion = match &args.fusion {
        Some(p) => {
            let f = fusion_loss(&read_probs(p)?, &labels, &wmap).context("fusion loss")?;
            out["fusion"] = f.into();
            Some(f)
        }
        None => None,
    };
    if let (Some(b), Some(f)) = (boundary, fusion) {
        out["total"] = total_loss(semantic, b, f, &weights).into();
    }
    out["alpha"] = args.alpha.into();
    out["lambdas"] = serde_json::json!([weights.semantic, weights.boundary, weights.fusion]);
    println!("{}", serde_json::to_string_pretty(&out).context("encoding")?);
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), Failure> {
    let mut config = ServiceConfig::new(args.schema.annotator()?).with_masks(args.masks);
    config.undo_depth = args.undo_depth;
    if let Some(root) = &args.dataset_root {
        let manifest = scan_dataset(root).with_context(|| format!("scanning {}", root.display()))?;
        config = config.with_dataset(manifest);
    }
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build().context("starting runtime")?;
    runtime.block_on(faceparse_service::serve(args.bind, config)).context("serving")?;
    Ok(())
}
