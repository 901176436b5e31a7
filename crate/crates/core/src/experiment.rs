//! End-to-end clustering trials: dataset, barcodes, distance matrices,
//! clustering, FMI.
//!
//! The report is a pure function of the configuration. Wall-clock timings
//! live in a separate [`TimingReport`] so that reports from repeated runs
//! compare byte for byte.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barcode::Barcode;
use crate::clustering::{affinity_propagation, agglomerative_average, fmi, k_medoids, AffinityOptions, Method};
use crate::datasets::{load_wav, synth_dataset, wave_dataset, Instrument, WaveSource};
use crate::distance::{distance_matrix, DistanceMatrix, Metric};
use crate::error::{Error, Result};
use crate::persistence::{rips_persistence, sublevel_h0, PointCloud, RipsOptions, Signal};
use crate::rng::substream;

pub const SCHEMA_VERSION: u32 = 1;

const PURPOSE_TRIAL: u64 = 10;
const PURPOSE_SUBSAMPLE: u64 = 11;
const PURPOSE_KMEDOIDS: u64 = 12;

/// Which barcode to compute from a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarcodeKind {
    Rips0,
    Rips1,
    Sublevel0,
}

impl BarcodeKind {
    pub fn name(self) -> &'static str {
        match self {
            BarcodeKind::Rips0 => "rips0",
            BarcodeKind::Rips1 => "rips1",
            BarcodeKind::Sublevel0 => "sublevel0",
        }
    }

    pub fn of_cloud(self, cloud: &PointCloud, options: &RipsOptions) -> Result<Barcode> {
        match self {
            BarcodeKind::Rips0 => rips_persistence(cloud, 0, options),
            BarcodeKind::Rips1 => rips_persistence(cloud, 1, options),
            BarcodeKind::Sublevel0 => Err(Error::InvalidParameter(
                "sublevel0 barcodes need a signal, not a point cloud".into(),
            )),
        }
    }

    pub fn of_signal(self, signal: &Signal) -> Result<Barcode> {
        match self {
            BarcodeKind::Sublevel0 => sublevel_h0(signal),
            other => Err(Error::InvalidParameter(format!(
                "{} barcodes need a point cloud, not a signal",
                other.name()
            ))),
        }
    }
}

impl FromStr for BarcodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rips0" => Ok(BarcodeKind::Rips0),
            "rips1" => Ok(BarcodeKind::Rips1),
            "sublevel0" => Ok(BarcodeKind::Sublevel0),
            other => Err(Error::InvalidParameter(format!(
                "unknown barcode kind {other:?}; valid kinds: rips0, rips1, sublevel0"
            ))),
        }
    }
}

/// A recording to slice, either a WAV file or a built-in synthetic instrument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum WaveInput {
    File { path: PathBuf, window: (f64, f64) },
    Synthetic { instrument: Instrument, sample_rate: f64 },
}

impl WaveInput {
    fn load(&self) -> Result<WaveSource> {
        match self {
            WaveInput::File { path, window } => Ok(WaveSource {
                signal: load_wav(path)?,
                window: *window,
            }),
            WaveInput::Synthetic {
                instrument,
                sample_rate,
            } => Ok(WaveSource {
                signal: instrument.synthesize(*sample_rate)?,
                window: instrument.window(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSpec {
    /// Two- versus three-ellipse clouds. Each entry of `conditions` is run
    /// on the same clouds: `false` untransformed, `true` with random
    /// conformal maps.
    Synthetic {
        per_class: usize,
        /// Points kept per cloud; `None` keeps all 240.
        subsample: Option<usize>,
        #[serde(default)]
        subsample_method: SubsampleMethod,
        conditions: Vec<bool>,
    },
    /// Slices of recordings; source `i` is class `i`.
    Waves { sources: Vec<WaveInput>, per_source: usize },
}

impl DatasetSpec {
    fn default_barcode(&self) -> BarcodeKind {
        match self {
            DatasetSpec::Synthetic { .. } => BarcodeKind::Rips1,
            DatasetSpec::Waves { .. } => BarcodeKind::Sublevel0,
        }
    }

    fn condition_names(&self) -> Vec<&'static str> {
        match self {
            DatasetSpec::Synthetic { conditions, .. } => conditions
                .iter()
                .map(|&t| if t { "transformed" } else { "untransformed" })
                .collect(),
            DatasetSpec::Waves { .. } => vec!["waves"],
        }
    }

    fn n_classes(&self) -> usize {
        match self {
            DatasetSpec::Synthetic { .. } => 2,
            DatasetSpec::Waves { sources, .. } => sources.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub metrics: Vec<Metric>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    /// Defaults to rips1 for point clouds and sublevel0 for waves.
    #[serde(default)]
    pub barcode: Option<BarcodeKind>,
    #[serde(default)]
    pub rips: RipsOptions,
    #[serde(default)]
    pub affinity: AffinityOptions,
    /// Evaluate distance-matrix pairs on the rayon pool. Does not change
    /// results, so it is read from config files but never written into
    /// reports; the timing report records it.
    #[serde(default = "default_parallel", skip_serializing)]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

impl ExperimentConfig {
    /// Small synthetic run: 20 clouds per class subsampled to 100 points,
    /// 5 trials, both conditions, every metric and method.
    pub fn desk_synthetic(seed: u64) -> Self {
        Self {
            dataset: DatasetSpec::Synthetic {
                per_class: 20,
                subsample: Some(100),
                subsample_method: SubsampleMethod::default(),
                conditions: vec![false, true],
            },
            metrics: Metric::ALL.to_vec(),
            methods: Method::ALL.to_vec(),
            trials: 5,
            seed,
            barcode: None,
            rips: RipsOptions::default(),
            affinity: AffinityOptions::default(),
            parallel: true,
        }
    }

    /// Wave run on the built-in instruments with 20 slices each.
    pub fn desk_waves(seed: u64) -> Self {
        Self {
            dataset: DatasetSpec::Waves {
                sources: Instrument::ALL
                    .iter()
                    .map(|&instrument| WaveInput::Synthetic {
                        instrument,
                        sample_rate: 44100.0,
                    })
                    .collect(),
                per_source: 20,
            },
            metrics: Metric::ALL.to_vec(),
            methods: Method::ALL.to_vec(),
            trials: 5,
            seed,
            barcode: None,
            rips: RipsOptions::default(),
            affinity: AffinityOptions::default(),
            parallel: true,
        }
    }

    pub fn barcode_kind(&self) -> BarcodeKind {
        self.barcode.unwrap_or_else(|| self.dataset.default_barcode())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.metrics.is_empty() || self.methods.is_empty() {
            return bad("at least one metric and one clustering method are required");
        }
        match &self.dataset {
            DatasetSpec::Synthetic {
                per_class,
                subsample,
                conditions,
                ..
            } => {
                if *per_class == 0 || conditions.is_empty() {
                    return bad("synthetic data needs per_class >= 1 and at least one condition");
                }
                if matches!(subsample, Some(0)) {
                    return bad("subsample must keep at least one point");
                }
                if self.barcode_kind() == BarcodeKind::Sublevel0 {
                    return bad("point clouds need a rips barcode kind");
                }
            }
            DatasetSpec::Waves { sources, per_source } => {
                if sources.len() < 2 || *per_source == 0 {
                    return bad("wave data needs at least two sources and per_source >= 1");
                }
                if self.barcode_kind() != BarcodeKind::Sublevel0 {
                    return bad("signals need the sublevel0 barcode kind");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmiEntry {
    pub metric: Metric,
    pub method: Method,
    pub mean: f64,
    pub per_trial: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterCountEntry {
    pub metric: Metric,
    pub mean: f64,
    pub per_trial: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub fmi: Vec<FmiEntry>,
    /// Present when affinity propagation is among the methods.
    pub affinity_clusters: Vec<ClusterCountEntry>,
}

impl ConditionReport {
    pub fn fmi_mean(&self, metric: Metric, method: Method) -> Option<f64> {
        self.fmi
            .iter()
            .find(|e| e.metric == metric && e.method == method)
            .map(|e| e.mean)
    }

    pub fn cluster_count_mean(&self, metric: Metric) -> Option<f64> {
        self.affinity_clusters
            .iter()
            .find(|e| e.metric == metric)
            .map(|e| e.mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub conditions: Vec<ConditionReport>,
}

impl ExperimentReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.condition == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Mean FMI per metric and method, then mean affinity cluster counts,
    /// then distance-matrix times when given.
    pub fn to_table(&self, timing: Option<&TimingReport>) -> String {
        let mut out = String::new();
        for cond in &self.conditions {
            let _ = writeln!(out, "== {} ==", cond.condition);
            let _ = write!(out, "{:<8}", "metric");
            for m in &self.config.methods {
                let _ = write!(out, "{:>15}", m.name());
            }
            let _ = writeln!(out);
            for metric in &self.config.metrics {
                let _ = write!(out, "{:<8}", metric.name());
                for method in &self.config.methods {
                    let v = cond.fmi_mean(*metric, *method).unwrap_or(f64::NAN);
                    let _ = write!(out, "{v:>15.3}");
                }
                let _ = writeln!(out);
            }
            if !cond.affinity_clusters.is_empty() {
                let _ = writeln!(out, "affinity propagation clusters (mean):");
                for e in &cond.affinity_clusters {
                    let _ = writeln!(out, "{:<8}{:>15.2}", e.metric.name(), e.mean);
                }
            }
            if let Some(t) = timing.and_then(|t| t.conditions.iter().find(|c| c.condition == cond.condition)) {
                let _ = writeln!(out, "distance-matrix seconds (mean per trial):");
                for e in &t.metrics {
                    let _ = writeln!(out, "{:<8}{:>15.4}", e.metric.name(), e.mean_seconds);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTiming {
    pub metric: Metric,
    pub total_seconds: f64,
    pub mean_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionTiming {
    pub condition: String,
    pub metrics: Vec<MetricTiming>,
}

/// Wall-clock time of the distance-matrix stage only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub schema_version: u32,
    pub parallel: bool,
    pub conditions: Vec<ConditionTiming>,
}

/// Labeled samples ready for barcode computation.
enum Samples {
    Clouds(Vec<PointCloud>),
    Signals(Vec<Signal>),
}

/// Runs every trial. Any failing stage aborts the whole run; no partial
/// report is produced.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentReport, TimingReport)> {
    config.validate()?;
    let names = config.dataset.condition_names();
    let kind = config.barcode_kind();
    let k = config.dataset.n_classes();

    let sources = match &config.dataset {
        DatasetSpec::Waves { sources, .. } => Some(
            sources
                .iter()
                .map(WaveInput::load)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.in_stage("dataset"))?,
        ),
        DatasetSpec::Synthetic { .. } => None,
    };

    // [condition][metric][method] -> per-trial FMI
    let mut scores = vec![vec![vec![Vec::new(); config.methods.len()]; config.metrics.len()]; names.len()];
    let mut counts = vec![vec![Vec::new(); config.metrics.len()]; names.len()];
    let mut seconds = vec![vec![0.0f64; config.metrics.len()]; names.len()];

    for trial in 0..config.trials {
        let trial_seed: u64 = substream(config.seed, &[PURPOSE_TRIAL, trial as u64]).random();
        let kmedoids_seed: u64 = substream(trial_seed, &[PURPOSE_KMEDOIDS]).random();
        let conditions = trial_samples(config, sources.as_deref(), trial_seed).map_err(|e| e.in_stage("dataset"))?;

        for (c, (labels, samples)) in conditions.into_iter().enumerate() {
            let barcodes = barcodes(&samples, kind, &config.rips).map_err(|e| e.in_stage("barcodes"))?;
            for (mi, &metric) in config.metrics.iter().enumerate() {
                let start = Instant::now();
                let d =
                    distance_matrix(&barcodes, metric, config.parallel).map_err(|e| e.in_stage("distance matrix"))?;
                seconds[c][mi] += start.elapsed().as_secs_f64();

                for (ki, &method) in config.methods.iter().enumerate() {
                    let result = cluster(&d, method, k, kmedoids_seed, &config.affinity)
                        .map_err(|e| e.in_stage("clustering"))?;
                    if method == Method::Affinity {
                        counts[c][mi].push(result.n_clusters);
                    }
                    scores[c][mi][ki].push(fmi(&labels, &result.labels).map_err(|e| e.in_stage("scoring"))?);
                }
            }
        }
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let trials = config.trials as f64;
    let mut report_conditions = Vec::new();
    let mut timing_conditions = Vec::new();
    for (c, name) in names.iter().enumerate() {
        let mut fmi_entries = Vec::new();
        let mut cluster_entries = Vec::new();
        let mut timings = Vec::new();
        for (mi, &metric) in config.metrics.iter().enumerate() {
            for (ki, &method) in config.methods.iter().enumerate() {
                let per_trial = std::mem::take(&mut scores[c][mi][ki]);
                fmi_entries.push(FmiEntry {
                    metric,
                    method,
                    mean: mean(&per_trial),
                    per_trial,
                });
            }
            if config.methods.contains(&Method::Affinity) {
                let per_trial = std::mem::take(&mut counts[c][mi]);
                cluster_entries.push(ClusterCountEntry {
                    metric,
                    mean: per_trial.iter().sum::<usize>() as f64 / trials,
                    per_trial,
                });
            }
            timings.push(MetricTiming {
                metric,
                total_seconds: seconds[c][mi],
                mean_seconds: seconds[c][mi] / trials,
            });
        }
        report_conditions.push(ConditionReport {
            condition: name.to_string(),
            fmi: fmi_entries,
            affinity_clusters: cluster_entries,
        });
        timing_conditions.push(ConditionTiming {
            condition: name.to_string(),
            metrics: timings,
        });
    }

    Ok((
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            conditions: report_conditions,
        },
        TimingReport {
            schema_version: SCHEMA_VERSION,
            parallel: config.parallel,
            conditions: timing_conditions,
        },
    ))
}

/// Labels and samples for every condition of one trial.
fn trial_samples(
    config: &ExperimentConfig,
    sources: Option<&[WaveSource]>,
    trial_seed: u64,
) -> Result<Vec<(Vec<usize>, Samples)>> {
    match &config.dataset {
        DatasetSpec::Synthetic {
            per_class,
            subsample,
            subsample_method,
            conditions,
        } => conditions
            .iter()
            .map(|&transformed| {
                let data = synth_dataset(*per_class, transformed, trial_seed)?;
                let clouds = data
                    .samples
                    .iter()
                    .enumerate()
                    .map(|(i, cloud)| match subsample {
                        Some(keep) => subsample_cloud(cloud, *keep, *subsample_method, trial_seed, i),
                        None => Ok(cloud.clone()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((data.labels, Samples::Clouds(clouds)))
            })
            .collect(),
        DatasetSpec::Waves { per_source, .. } => {
            let data = wave_dataset(sources.expect("wave sources are loaded"), *per_source, trial_seed)?;
            Ok(vec![(data.labels, Samples::Signals(data.samples))])
        }
    }
}

/// How a cloud is reduced to a fixed number of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsampleMethod {
    /// Uniformly random distinct points.
    Uniform,
    /// Greedy farthest-point order from a random start: each new point
    /// maximizes its distance to those already kept.
    #[default]
    MaxMin,
}

impl FromStr for SubsampleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(SubsampleMethod::Uniform),
            "maxmin" => Ok(SubsampleMethod::MaxMin),
            other => Err(Error::InvalidParameter(format!(
                "unknown subsample method {other:?}; valid methods: uniform, maxmin"
            ))),
        }
    }
}

/// `keep` distinct points, in their original order.
///
/// The random choices depend only on the trial seed and sample index, and
/// both methods commute with similarity maps, so the transformed and
/// untransformed conditions keep the same points.
pub fn subsample_cloud(
    cloud: &PointCloud,
    keep: usize,
    method: SubsampleMethod,
    trial_seed: u64,
    sample: usize,
) -> Result<PointCloud> {
    let n = cloud.len();
    if keep >= n {
        return Ok(cloud.clone());
    }
    let mut rng = substream(trial_seed, &[PURPOSE_SUBSAMPLE, sample as u64]);
    let mut indices = match method {
        SubsampleMethod::Uniform => rand::seq::index::sample(&mut rng, n, keep).into_vec(),
        SubsampleMethod::MaxMin => {
            let mut chosen = vec![rng.random_range(0..n)];
            let mut gap: Vec<f64> = (0..n).map(|i| cloud.distance(i, chosen[0])).collect();
            while chosen.len() < keep {
                let mut far = 0;
                for i in 1..n {
                    if gap[i] > gap[far] {
                        far = i;
                    }
                }
                chosen.push(far);
                for (i, g) in gap.iter_mut().enumerate() {
                    *g = g.min(cloud.distance(i, far));
                }
            }
            chosen
        }
    };
    indices.sort_unstable();
    cloud.select(&indices)
}

fn barcodes(samples: &Samples, kind: BarcodeKind, rips: &RipsOptions) -> Result<Vec<Barcode>> {
    match samples {
        Samples::Clouds(clouds) => clouds.par_iter().map(|c| kind.of_cloud(c, rips)).collect(),
        Samples::Signals(signals) => signals.par_iter().map(|s| kind.of_signal(s)).collect(),
    }
}

fn cluster(
    d: &DistanceMatrix,
    method: Method,
    k: usize,
    seed: u64,
    affinity: &AffinityOptions,
) -> Result<crate::clustering::ClusteringResult> {
    match method {
        Method::KMedoids => k_medoids(d, k, seed),
        Method::Agglomerative => agglomerative_average(d, k),
        Method::Affinity => affinity_propagation(d, affinity),
    }
}
