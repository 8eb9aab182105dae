use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use polclass::config::{parse_phantom, ExperimentConfig};
use polclass::header::{header_path, Dtype};
use polclass::image::{read_classmap, read_covariance_image, write_classmap, write_covariance_image};
use polclass::model::TrainedModel;
use polclass::pipeline::{self, interior_roi, MethodRun};
use polclass::render::{palette, render_classmap, render_field};
use polclass::roi::{split_roi, RoiSet};
use polclass::tables::{format_report, write_metrics_csv, write_trace_csv};
use polclass::train::{fit_weights, train};
use polclass_core::accuracy::per_class_accuracy;
use polclass_core::classify::{classify_image, LooksMode, Rule};
use polclass_core::diffusion::{evolve, EvolutionParams};
use polclass_core::phantom::{generate_phantom, PhantomSpec};
use polclass_core::weights::OptimizerConfig;

#[derive(Parser)]
#[command(name = "polclass", version, about = "Weighted Wishart distance classification of PolSAR covariance images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Wishart phantom, its ground truth and interior ROIs.
    Simulate(SimulateArgs),
    /// Estimate per-class covariance and looks from the training half of the ROIs.
    Train(TrainArgs),
    /// Optimize class weights on the training half and store them in the model.
    Weights(WeightsArgs),
    /// Label every pixel with one rule.
    Classify(ClassifyArgs),
    /// Run the diffusion-reaction evolution on an image.
    Evolve(EvolveArgs),
    /// Accuracy of class maps on the test half of the ROIs.
    Evaluate(EvaluateArgs),
    /// False-colour PPM of an image or class map.
    Render(RenderArgs),
    /// Full experiment from a config file.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Phantom config (`phantom.*` keys); defaults to the built-in layout.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 150)]
    width: usize,
    #[arg(long, default_value_t = 150)]
    height: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Margin between ROIs and class boundaries.
    #[arg(long, default_value_t = 2)]
    margin: usize,
    /// Output prefix: writes PREFIX.hdr/.bin, PREFIX_truth.hdr/.bin and PREFIX.roi.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    /// Covariance image header.
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    roi: PathBuf,
    /// Seed of the train/test split.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    split: SplitArgs,
    /// Shared number of looks; defaults to the header value, then to the pooled estimate.
    #[arg(long)]
    looks: Option<f64>,
    /// Use each class's own looks estimate in distances and likelihoods.
    #[arg(long)]
    per_class_looks: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WeightsArgs {
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Optimizer trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Updated model file; defaults to overwriting `--model`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Ml,
    Ed,
    Hd,
    Kl,
    KlOw,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Ml => Rule::MaximumLikelihood,
            RuleArg::Ed => Rule::Euclidean,
            RuleArg::Hd => Rule::Hellinger,
            RuleArg::Kl => Rule::KullbackLeibler,
            RuleArg::KlOw => Rule::WeightedKullbackLeibler,
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value_t = RuleArg::KlOw)]
    rule: RuleArg,
    /// Class map header to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    /// Evolved image header to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    roi: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Class map headers; the method name is the file stem.
    #[arg(long = "map", required = true)]
    maps: Vec<PathBuf>,
    /// Fail unless improvements can be computed.
    #[arg(long)]
    improvements: bool,
}

#[derive(Args)]
struct RenderArgs {
    /// Covariance image header (needs `--model`).
    #[arg(long, conflicts_with = "classmap")]
    image: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Class map header.
    #[arg(long)]
    classmap: Option<PathBuf>,
    /// Number of palette colours for class maps without a model.
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's split seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(a) => simulate(a).context("simulate"),
        Command::Train(a) => cmd_train(a).context("train"),
        Command::Weights(a) => cmd_weights(a).context("weights"),
        Command::Classify(a) => classify(a).context("classify"),
        Command::Evolve(a) => cmd_evolve(a).context("evolve"),
        Command::Evaluate(a) => cmd_evaluate(a).context("evaluate"),
        Command::Render(a) => render(a).context("render"),
        Command::Pipeline(a) => cmd_pipeline(a).context("pipeline"),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    prefix.with_file_name(name)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut spec = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
            parse_phantom(&text, path)?
        }
        None => PhantomSpec::default_with_size(a.width, a.height, 1),
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let (field, truth) = generate_phantom(&spec)?;
    let roi = interior_roi(&truth, spec.classes.len(), a.margin)?;
    write_covariance_image(&field, Some(spec.looks as f64), Dtype::F64, &header_path(&a.out))?;
    write_classmap(&truth, &header_path(&with_suffix(&a.out, "_truth")))?;
    roi.write(&a.out.with_extension("roi"))?;
    Ok(())
}

fn load_split(a: &SplitArgs) -> Result<(polclass::image::CovarianceImage, polclass::roi::Split)> {
    let image = read_covariance_image(&a.image)?;
    if !image.non_positive_definite.is_empty() {
        eprintln!("warning: {} pixels are not positive definite", image.non_positive_definite.len());
    }
    let roi = RoiSet::read(&a.roi)?;
    roi.check_bounds(image.field.width(), image.field.height())?;
    let split = split_roi(&roi, a.seed);
    Ok((image, split))
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let (image, split) = load_split(&a.split)?;
    let mode = if a.per_class_looks { LooksMode::PerClass } else { LooksMode::Shared };
    let training = train(&image.field, &split.train, a.looks.or(image.looks), mode)?;
    for (m, fit) in training.fits.iter().enumerate() {
        let note = if fit.no_root { " (no root, bracket end)" } else { "" };
        println!(
            "class {}: {} samples, looks ML {:.4}, corrected {:.4}{note}",
            m + 1,
            fit.samples,
            fit.looks.ml,
            fit.looks.corrected
        );
    }
    training.model.write(&a.out)?;
    Ok(())
}

fn cmd_weights(a: WeightsArgs) -> Result<()> {
    let (image, split) = load_split(&a.split)?;
    let mut model = TrainedModel::read(&a.model)?;
    if model.classes.len() != split.train.len() {
        bail!("model has {} classes, ROI file has {}", model.classes.len(), split.train.len());
    }
    let config = OptimizerConfig { lambda: a.lambda, ..Default::default() };
    let fit = fit_weights(&image.field, &split.train, &model, &config)?;
    model.set_weights(&fit.weights);
    println!("weights {:?}, energy {}", fit.weights.as_slice(), fit.energy);
    if let Some(trace) = &a.trace {
        write_trace_csv(&fit.trace, trace)?;
    }
    model.write(a.out.as_deref().unwrap_or(&a.model))?;
    Ok(())
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let image = read_covariance_image(&a.image)?;
    let protos = TrainedModel::read(&a.model)?.prototypes()?;
    let result = classify_image(&image.field, &protos, a.rule.into());
    if !result.failed.is_empty() {
        eprintln!("warning: {} pixels left unclassified", result.failed.len());
    }
    write_classmap(&result.labels, &header_path(&a.out))?;
    Ok(())
}

fn cmd_evolve(a: EvolveArgs) -> Result<()> {
    let image = read_covariance_image(&a.image)?;
    let protos = TrainedModel::read(&a.model)?.prototypes()?;
    let params = EvolutionParams { alpha: a.alpha, dt: a.dt, iterations: a.iters, ..Default::default() };
    let (field, metrics) = evolve(&image.field, &protos, &params)?;
    write_covariance_image(&field, image.looks, Dtype::F64, &header_path(&a.out))?;
    if let Some(path) = &a.metrics {
        write_metrics_csv(&metrics, path)?;
    }
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let roi = RoiSet::read(&a.roi)?;
    let split = split_roi(&roi, a.seed);
    let runs = a
        .maps
        .iter()
        .map(|p| {
            let labels = read_classmap(p)?;
            roi.check_bounds(labels.width(), labels.height())?;
            let method = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok(MethodRun { method, labels, seconds: 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    if runs.len() < 2 {
        if a.improvements {
            return Err(polclass::Error::MissingBaseline.into());
        }
        let acc = per_class_accuracy(&runs[0].labels, &split.test)?;
        let cells: Vec<String> = acc.iter().map(|a| format!("{a:.1}")).collect();
        println!("{}  {}", runs[0].method, cells.join("  "));
        return Ok(());
    }
    print!("{}", format_report(&pipeline::evaluate(&runs, &split.test)?));
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let model = a.model.as_deref().map(TrainedModel::read).transpose()?;
    let img = match (&a.image, &a.classmap) {
        (Some(image), _) => {
            let Some(model) = &model else { bail!("rendering an image needs --model") };
            let protos = model.prototypes()?;
            render_field(&read_covariance_image(image)?.field, &protos, &palette(protos.len()))
        }
        (None, Some(map)) => {
            let labels = read_classmap(map)?;
            let n = match (&model, a.classes) {
                (Some(m), _) => m.classes.len(),
                (None, Some(n)) => n,
                (None, None) => labels.as_slice().iter().copied().max().unwrap_or(1).max(1) as usize,
            };
            render_classmap(&labels, &palette(n))
        }
        (None, None) => bail!("give --image or --classmap"),
    };
    img.write_ppm(&a.out)?;
    Ok(())
}

fn cmd_pipeline(a: PipelineArgs) -> Result<()> {
    let mut config = match &a.config {
        Some(path) => ExperimentConfig::read(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(out) = a.out {
        config.out = out;
    }
    let output = pipeline::run(&config)?;
    pipeline::write_artifacts(&output, &config.out)?;
    println!("weights {:?}", output.weights.weights.as_slice());
    print!("{}", output.report());
    Ok(())
}
