//! Synthetic ellipse point clouds under random conformal maps, and audio
//! slices for the wave experiments.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{PointCloud, Signal};
use crate::rng::substream;

/// Standard deviation of the per-coordinate Gaussian noise on ellipse samples.
pub const NOISE_SIGMA: f64 = 0.5;

/// Slice durations, in seconds, for the wave experiments.
pub const SLICE_DURATIONS: (f64, f64) = (0.02, 0.05);

const PURPOSE_CLOUD: u64 = 1;
const PURPOSE_TRANSFORM: u64 = 2;
const PURPOSE_SLICE: u64 = 3;

/// An axis-aligned ellipse and how many points to draw from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseSpec {
    pub center: [f64; 2],
    pub semi_major: f64,
    pub semi_minor: f64,
    pub n_points: usize,
}

impl EllipseSpec {
    pub fn new(center: [f64; 2], semi_major: f64, semi_minor: f64, n_points: usize) -> Result<Self> {
        if !(semi_major >= semi_minor && semi_minor > 0.0 && semi_major.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ellipse semi-axes must satisfy major >= minor > 0, got {semi_major} and {semi_minor}"
            )));
        }
        if n_points == 0 || !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter(
                "ellipse needs a finite center and at least one point".into(),
            ));
        }
        Ok(Self {
            center,
            semi_major,
            semi_minor,
            n_points,
        })
    }
}

/// Class 0: two concentric ellipses, 240 points.
pub fn two_ellipse_class() -> Vec<EllipseSpec> {
    vec![
        EllipseSpec::new([0.0, 0.0], 50.0, 30.0, 120).expect("valid"),
        EllipseSpec::new([0.0, 0.0], 40.0, 20.0, 120).expect("valid"),
    ]
}

/// Class 1: two concentric ellipses plus a third above them, 240 points.
pub fn three_ellipse_class() -> Vec<EllipseSpec> {
    vec![
        EllipseSpec::new([0.0, 80.0], 35.0, 25.0, 40).expect("valid"),
        EllipseSpec::new([0.0, 0.0], 50.0, 30.0, 100).expect("valid"),
        EllipseSpec::new([0.0, 0.0], 40.0, 20.0, 100).expect("valid"),
    ]
}

/// Points at angles uniform on `[0, 2π)` plus independent Gaussian noise.
pub fn sample_ellipse<R: Rng + ?Sized>(spec: &EllipseSpec, noise_sigma: f64, rng: &mut R) -> Result<PointCloud> {
    let points = draw_ellipse(spec, noise_sigma, rng)?;
    PointCloud::new(points)
}

fn draw_ellipse<R: Rng + ?Sized>(spec: &EllipseSpec, noise_sigma: f64, rng: &mut R) -> Result<Vec<[f64; 2]>> {
    let invalid = || Error::InvalidParameter(format!("noise sigma must be finite and >= 0, got {noise_sigma}"));
    if noise_sigma.is_nan() || noise_sigma < 0.0 {
        return Err(invalid());
    }
    let noise = Normal::new(0.0, noise_sigma).map_err(|_| invalid())?;
    Ok((0..spec.n_points)
        .map(|_| {
            let theta = rng.random_range(0.0..TAU);
            let gx = noise.sample(rng);
            let gy = noise.sample(rng);
            [
                spec.center[0] + spec.semi_major * theta.cos() + gx,
                spec.center[1] + spec.semi_minor * theta.sin() + gy,
            ]
        })
        .collect())
}

/// `x ↦ scale · R(rotation) · x + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalTransform {
    pub rotation: f64,
    pub scale: f64,
    pub translation: [f64; 2],
}

impl ConformalTransform {
    pub fn new(rotation: f64, scale: f64, translation: [f64; 2]) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !rotation.is_finite() || !translation.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "conformal map needs finite parameters and scale > 0, got scale {scale}"
            )));
        }
        Ok(Self {
            rotation,
            scale,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: 0.0,
            scale: 1.0,
            translation: [0.0, 0.0],
        }
    }

    pub fn apply_point(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.rotation.sin_cos();
        [
            self.scale * (c * x - s * y) + self.translation[0],
            self.scale * (s * x + c * y) + self.translation[1],
        ]
    }

    /// The map `next ∘ self`.
    pub fn then(&self, next: &ConformalTransform) -> ConformalTransform {
        let moved = next.apply_point(self.translation);
        ConformalTransform {
            rotation: self.rotation + next.rotation,
            scale: self.scale * next.scale,
            translation: moved,
        }
    }
}

/// Rotation in `[0, 2π)`, scale in `[0.1, 10)`, translation in `[0, 1)²`.
pub fn random_conformal<R: Rng + ?Sized>(rng: &mut R) -> ConformalTransform {
    ConformalTransform {
        rotation: rng.random_range(0.0..TAU),
        scale: rng.random_range(0.1..10.0),
        translation: [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)],
    }
}

pub fn apply_conformal(cloud: &PointCloud, t: &ConformalTransform) -> PointCloud {
    let points = cloud.points().iter().map(|&p| t.apply_point(p)).collect();
    PointCloud::new(points).expect("a conformal image of a finite cloud is finite")
}

/// Samples with class labels. `transforms` is present for transformed
/// synthetic data, one entry per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset<S> {
    pub samples: Vec<S>,
    pub labels: Vec<usize>,
    pub seed: u64,
    pub transforms: Option<Vec<ConformalTransform>>,
}

impl<S> LabeledDataset<S> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `per_class` clouds of each class, class 0 first.
///
/// Sample `(class, index)` draws its points from its own substream, so the
/// untransformed clouds are identical whether or not `transformed` is set;
/// transforms come from a separate substream with the same key.
pub fn synth_dataset(per_class: usize, transformed: bool, seed: u64) -> Result<LabeledDataset<PointCloud>> {
    if per_class == 0 {
        return Err(Error::InvalidParameter("per_class must be at least 1".into()));
    }
    let classes = [two_ellipse_class(), three_ellipse_class()];
    let mut samples = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    let mut transforms = transformed.then(Vec::new);
    for (class, ellipses) in classes.iter().enumerate() {
        for index in 0..per_class {
            let key = [PURPOSE_CLOUD, class as u64, index as u64];
            let mut rng = substream(seed, &key);
            let mut points = Vec::with_capacity(240);
            for spec in ellipses {
                points.extend(draw_ellipse(spec, NOISE_SIGMA, &mut rng)?);
            }
            let mut cloud = PointCloud::new(points)?;
            if let Some(ts) = transforms.as_mut() {
                let t = random_conformal(&mut substream(seed, &[PURPOSE_TRANSFORM, class as u64, index as u64]));
                cloud = apply_conformal(&cloud, &t);
                ts.push(t);
            }
            samples.push(cloud);
            labels.push(class);
        }
    }
    Ok(LabeledDataset {
        samples,
        labels,
        seed,
        transforms,
    })
}

/// Decodes 16-bit PCM to `[-1, 1]`, averaging channels.
pub fn load_wav(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::Unsupported => Error::UnsupportedWav {
            path: path.to_path_buf(),
            found: describe_format_tag(path),
        },
        hound::Error::IoError(source) => Error::io(path, source),
        source => Error::Wav {
            path: path.to_path_buf(),
            source,
        },
    })?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedWav {
            path: path.to_path_buf(),
            found: format!(
                "{}-bit {}",
                spec.bits_per_sample,
                match spec.sample_format {
                    hound::SampleFormat::Int => "integer PCM",
                    hound::SampleFormat::Float => "IEEE float",
                }
            ),
        });
    }
    let channels = spec.channels as usize;
    let raw: Vec<i16> = reader
        .samples::<i16>()
        .collect::<std::result::Result<_, _>>()
        .map_err(|source| Error::Wav {
            path: path.to_path_buf(),
            source,
        })?;
    let samples = raw
        .chunks_exact(channels)
        .map(|frame| frame.iter().map(|&s| s as f64 / 32768.0).sum::<f64>() / channels as f64)
        .collect();
    Signal::new(samples, Some(spec.sample_rate as f64))
}

/// Writes a mono 16-bit PCM file; samples are clamped to `[-1, 1]`.
pub fn write_wav(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    let path = path.as_ref();
    let rate = signal
        .sample_rate()
        .ok_or_else(|| Error::InvalidParameter("writing a WAV file needs a sample rate".into()))?;
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: rate.round() as u32,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let wav_err = |source| Error::Wav {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(wav_err)?;
    for &s in signal.samples() {
        writer
            .write_sample((s.clamp(-1.0, 1.0) * 32767.0).round() as i16)
            .map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)
}

/// Names the format tag of the `fmt ` chunk, for diagnostics.
fn describe_format_tag(path: &Path) -> String {
    let Ok(bytes) = std::fs::read(path) else {
        return "unreadable format chunk".into();
    };
    match bytes.windows(4).position(|w| w == b"fmt ") {
        Some(at) if bytes.len() >= at + 10 => {
            let tag = u16::from_le_bytes([bytes[at + 8], bytes[at + 9]]);
            format!("format tag 0x{tag:04x} (only 16-bit PCM is supported)")
        }
        _ => "no fmt chunk".into(),
    }
}

/// `n_slices` random slices of `signal` lying inside `time_window` (seconds).
///
/// Durations are uniform on `duration_range`, truncated to whole samples;
/// start times are uniform on the positions where the slice fits in the
/// window.
pub fn slice_waves<R: Rng + ?Sized>(
    signal: &Signal,
    time_window: (f64, f64),
    duration_range: (f64, f64),
    n_slices: usize,
    rng: &mut R,
) -> Result<Vec<Signal>> {
    let rate = signal
        .sample_rate()
        .ok_or_else(|| Error::InvalidParameter("slicing needs a sample rate".into()))?;
    let extent = signal.len() as f64 / rate;
    let (w0, w1) = time_window;
    let (d0, d1) = duration_range;
    if !(0.0 <= w0 && w0 < w1 && w1 <= extent) {
        return Err(Error::InvalidParameter(format!(
            "time window [{w0}, {w1}) is not inside the signal extent [0, {extent})"
        )));
    }
    if !(0.0 < d0 && d0 < d1 && d1 <= w1 - w0) {
        return Err(Error::InvalidParameter(format!(
            "duration range [{d0}, {d1}) must be non-empty, positive and fit in the window"
        )));
    }
    (0..n_slices)
        .map(|_| {
            let duration = rng.random_range(d0..d1);
            let start = rng.random_range(w0..w1 - duration);
            let first = (start * rate).floor() as usize;
            let len = ((duration * rate).floor() as usize).max(2);
            let last = (first + len).min(signal.len());
            Signal::new(signal.samples()[first..last].to_vec(), Some(rate))
        })
        .collect()
}

/// Synthetic stand-ins for the two recorded instruments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Instrument {
    /// A single partial with slowly drifting pitch and a long exponential decay.
    TuningFork,
    /// A fundamental with three overtones and a short exponential decay.
    Piano,
}

impl Instrument {
    pub const ALL: [Instrument; 2] = [Instrument::TuningFork, Instrument::Piano];

    /// Window, in seconds, from which slices are drawn.
    pub fn window(self) -> (f64, f64) {
        match self {
            Instrument::TuningFork => (3.0, 15.0),
            Instrument::Piano => (0.2, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Instrument::TuningFork => "tuning-fork",
            Instrument::Piano => "piano",
        }
    }

    /// Renders the waveform at `sample_rate`. Both instruments decay over
    /// their slice windows through the same amplitude range, about 0.6 to 0.08.
    pub fn synthesize(self, sample_rate: f64) -> Result<Signal> {
        let (seconds, decay, pitch) = match self {
            Instrument::TuningFork => (16.0, 6.0, 440.0),
            Instrument::Piano => (1.2, 0.4, 261.63),
        };
        let n = (seconds * sample_rate).round() as usize;
        let mut phase = 0.0f64;
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 / sample_rate;
            let envelope = (-t / decay).exp();
            let value = match self {
                Instrument::TuningFork => {
                    let drift = 1.0 + 0.01 * (TAU * 0.1 * t).sin();
                    let tremolo = 1.0 + 0.05 * (TAU * 0.3 * t).sin();
                    let v = envelope * tremolo * phase.sin();
                    phase += TAU * pitch * drift / sample_rate;
                    v
                }
                Instrument::Piano => {
                    let attack = (t / 0.005).min(1.0);
                    let partials = phase.sin()
                        + 0.6 * (2.0 * phase + 0.3).sin()
                        + 0.4 * (3.0 * phase + 1.1).sin()
                        + 0.25 * (4.0 * phase + PI / 3.0).sin();
                    phase += TAU * pitch / sample_rate;
                    attack * envelope * partials / 1.8
                }
            };
            samples.push(value);
        }
        Signal::new(samples, Some(sample_rate))
    }
}

/// A recording and the window its slices are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSource {
    pub signal: Signal,
    pub window: (f64, f64),
}

/// `per_source` slices from each source; source `i` has label `i`.
pub fn wave_dataset(sources: &[WaveSource], per_source: usize, seed: u64) -> Result<LabeledDataset<Signal>> {
    let mut samples = Vec::with_capacity(sources.len() * per_source);
    let mut labels = Vec::with_capacity(sources.len() * per_source);
    for (label, source) in sources.iter().enumerate() {
        let mut rng = substream(seed, &[PURPOSE_SLICE, label as u64]);
        samples.extend(slice_waves(
            &source.signal,
            source.window,
            SLICE_DURATIONS,
            per_source,
            &mut rng,
        )?);
        labels.extend(std::iter::repeat_n(label, per_source));
    }
    Ok(LabeledDataset {
        samples,
        labels,
        seed,
        transforms: None,
    })
}
