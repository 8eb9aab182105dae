//! End-to-end experiment: scene → split → training → weights → every
//! classification rule → diffusion-reaction → evaluation → artifacts.
//!
//! Timings are wall-clock seconds of the compute stages only. Rules that use
//! optimized weights include the weight fit in their time, and the
//! diffusion-reaction method also includes the evolution.

use std::path::Path;
use std::time::Instant;

use polclass_core::accuracy::{per_class_accuracy, Comparison, MethodResult};
use polclass_core::classify::{classify_image, ClassMap, Rule};
use polclass_core::diffusion::{evolve, EvolutionMetrics};
use polclass_core::phantom::generate_phantom;
use polclass_core::weights::OptimizedWeights;
use polclass_core::CovarianceField;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result, StageExt};
use crate::header::{header_path, Dtype};
use crate::image::{read_covariance_image, write_classmap, write_covariance_image};
use crate::model::TrainedModel;
use crate::render::{palette, render_classmap, render_field};
use crate::roi::{split_roi, Pixel, RoiSet, Split};
use crate::tables::{format_report, write_metrics_csv, write_trace_csv};
use crate::train::{fit_weights, train, Training};

/// Input image, optional ground truth and labelled regions.
#[derive(Debug, Clone)]
pub struct Scene {
    pub field: CovarianceField,
    pub truth: Option<ClassMap>,
    pub roi: RoiSet,
    /// Number of looks announced by the image header or phantom.
    pub looks: Option<f64>,
}

/// ROIs made of the largest interior square of every class.
pub fn interior_roi(truth: &ClassMap, classes: usize, margin: usize) -> Result<RoiSet> {
    let mut roi = RoiSet::default();
    for (m, square) in polclass_core::phantom::interior_squares(truth, classes, margin).into_iter().enumerate() {
        match square {
            Some(rect) => roi.add(m + 1, rect),
            None => return Err(Error::EmptyClass { class: m + 1 }),
        }
    }
    Ok(roi)
}

pub fn load_scene(config: &ExperimentConfig) -> Result<Scene> {
    match &config.image {
        Some(path) => {
            let image = read_covariance_image(path)?;
            let roi = RoiSet::read(config.roi.as_deref().expect("validated config"))?;
            roi.check_bounds(image.field.width(), image.field.height())?;
            Ok(Scene { field: image.field, truth: None, roi, looks: image.looks })
        }
        None => {
            let (field, truth) = generate_phantom(&config.phantom)?;
            let roi = match &config.roi {
                Some(path) => RoiSet::read(path)?,
                None => interior_roi(&truth, config.phantom.classes.len(), config.roi_margin)?,
            };
            roi.check_bounds(field.width(), field.height())?;
            Ok(Scene { field, truth: Some(truth), roi, looks: Some(config.phantom.looks as f64) })
        }
    }
}

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: String,
    pub labels: ClassMap,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub scene: Scene,
    pub split: Split,
    pub training: Training,
    pub weights: OptimizedWeights,
    pub runs: Vec<MethodRun>,
    pub evolved: CovarianceField,
    pub metrics: EvolutionMetrics,
    pub comparison: Comparison,
}

impl PipelineOutput {
    pub fn model(&self) -> &TrainedModel {
        &self.training.model
    }

    pub fn report(&self) -> String {
        format_report(&self.comparison)
    }
}

/// Name of the diffusion-reaction method for `n` iterations.
pub fn dr_method_name(iterations: usize) -> String {
    format!("DR+KL+OW+{iterations}")
}

/// Per-class test accuracies of every run and improvements over the worst.
pub fn evaluate(runs: &[MethodRun], test: &[Vec<Pixel>]) -> Result<Comparison> {
    let results = runs
        .iter()
        .map(|r| {
            Ok(MethodResult {
                method: r.method.clone(),
                accuracy: per_class_accuracy(&r.labels, test)?,
                seconds: r.seconds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    compare(results)
}

/// [`Comparison`] of precomputed accuracies.
pub fn compare(results: Vec<MethodResult>) -> Result<Comparison> {
    if results.len() < 2 {
        return Err(Error::MissingBaseline);
    }
    Ok(Comparison::new(results)?)
}

pub fn run(config: &ExperimentConfig) -> Result<PipelineOutput> {
    config.validate().stage("config")?;
    let scene = load_scene(config).stage("load")?;
    let split = split_roi(&scene.roi, config.seed);
    let shared = config.looks.or(scene.looks);
    let mut training = train(&scene.field, &split.train, shared, config.looks_mode).stage("train")?;

    let started = Instant::now();
    let weights = fit_weights(&scene.field, &split.train, &training.model, &config.optimizer).stage("weights")?;
    let weight_seconds = started.elapsed().as_secs_f64();
    training.model.set_weights(&weights.weights);
    let protos = training.model.prototypes().stage("weights")?;

    let mut runs = Vec::new();
    for rule in Rule::ALL {
        let started = Instant::now();
        let labels = classify_image(&scene.field, &protos, rule).labels;
        let mut seconds = started.elapsed().as_secs_f64();
        if rule == Rule::WeightedKullbackLeibler {
            seconds += weight_seconds;
        }
        runs.push(MethodRun { method: rule.name().to_owned(), labels, seconds });
    }

    let started = Instant::now();
    let (evolved, metrics) = evolve(&scene.field, &protos, &config.evolution).stage("evolve")?;
    let labels = classify_image(&evolved, &protos, Rule::WeightedKullbackLeibler).labels;
    runs.push(MethodRun {
        method: dr_method_name(config.evolution.iterations),
        labels,
        seconds: weight_seconds + started.elapsed().as_secs_f64(),
    });

    let comparison = evaluate(&runs, &split.test).stage("evaluate")?;
    Ok(PipelineOutput { scene, split, training, weights, runs, evolved, metrics, comparison })
}

fn slug(method: &str) -> String {
    method.to_ascii_lowercase().replace('+', "_")
}

/// Writes class maps, renders, metrics, trace, model and report into `dir`.
pub fn write_artifacts(output: &PipelineOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let protos = output.model().prototypes()?;
    let colours = palette(protos.len());
    write_covariance_image(&output.scene.field, output.scene.looks, Dtype::F64, &dir.join("input.hdr"))?;
    output.scene.roi.write(&dir.join("roi.txt"))?;
    render_field(&output.scene.field, &protos, &colours).write_ppm(&dir.join("input.ppm"))?;
    render_field(&output.evolved, &protos, &colours).write_ppm(&dir.join("evolved.ppm"))?;
    if let Some(truth) = &output.scene.truth {
        write_classmap(truth, &dir.join("truth.hdr"))?;
        render_classmap(truth, &colours).write_ppm(&dir.join("truth.ppm"))?;
    }
    for run in &output.runs {
        let name = slug(&run.method);
        write_classmap(&run.labels, &header_path(&dir.join(&name)))?;
        render_classmap(&run.labels, &colours).write_ppm(&dir.join(format!("{name}.ppm")))?;
    }
    write_metrics_csv(&output.metrics, &dir.join("metrics.csv"))?;
    write_trace_csv(&output.weights.trace, &dir.join("weights_trace.csv"))?;
    output.model().write(&dir.join("model.txt"))?;
    let report = dir.join("report.txt");
    std::fs::write(&report, output.report()).map_err(Error::io(&report))
}
