use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use simbar_core::datasets::{write_wav, ConformalTransform, Instrument};
use simbar_core::experiment::{WaveInput, SCHEMA_VERSION};
use simbar_core::{
    affinity_propagation, agglomerative_average, distance_matrix, fmi, io, k_medoids, load_wav, run_experiment,
    synth_dataset, AffinityOptions, Barcode, BarcodeKind, DatasetSpec, Error, EssentialBar, ExperimentConfig, Method,
    Result, RipsOptions, Signal,
};

use crate::{BarcodeArgs, ClusterArgs, DistmatArgs, ExperimentArgs, SynthArgs};

const INSTRUMENT_RATE: f64 = 44100.0;

#[derive(Serialize)]
struct Manifest {
    schema_version: u32,
    seed: u64,
    per_class: usize,
    transformed: bool,
    samples: Vec<ManifestEntry>,
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    label: usize,
    transform: Option<ConformalTransform>,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let data = synth_dataset(args.per_class, args.transformed, args.seed)?;
    create_dir(&args.out)?;
    let mut samples = Vec::with_capacity(data.len());
    for (i, (cloud, &label)) in data.samples.iter().zip(&data.labels).enumerate() {
        let file = format!("sample_{i:04}.csv");
        io::write_point_cloud(args.out.join(&file), cloud)?;
        samples.push(ManifestEntry {
            file,
            label,
            transform: data.transforms.as_ref().map(|t| t[i]),
        });
    }
    io::write_labels(args.out.join("labels.txt"), &data.labels)?;
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        seed: args.seed,
        per_class: args.per_class,
        transformed: args.transformed,
        samples,
    };
    write_text(
        &args.out.join("manifest.json"),
        &(serde_json::to_string_pretty(&manifest)? + "\n"),
    )?;
    if args.instruments {
        for inst in Instrument::ALL {
            write_wav(
                args.out.join(format!("{}.wav", inst.name())),
                &inst.synthesize(INSTRUMENT_RATE)?,
            )?;
        }
    }
    eprintln!("wrote {} samples to {}", data.len(), args.out.display());
    Ok(())
}

/// Files named on the command line, with directories replaced by their
/// files of the given extensions in sorted order.
fn expand_inputs(inputs: &[PathBuf], extensions: &[&str]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found = Vec::new();
            for ext in extensions {
                found.extend(io::list_files(input, ext)?);
            }
            found.sort();
            out.extend(found);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

fn read_signal_any(path: &Path) -> Result<Signal> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")) {
        load_wav(path)
    } else {
        io::read_signal(path)
    }
}

pub fn barcode(args: &BarcodeArgs) -> Result<()> {
    let extensions: &[&str] = match args.kind {
        BarcodeKind::Sublevel0 => &["csv", "wav"],
        _ => &["csv"],
    };
    let files = expand_inputs(&args.inputs, extensions)?;
    create_dir(&args.out)?;
    let options = RipsOptions {
        h1_vertex_cap: args.h1_cap,
        essential: if args.drop_essential {
            EssentialBar::Drop
        } else {
            EssentialBar::Cap
        },
    };
    let mut failures: Vec<Error> = Vec::new();
    for file in &files {
        let result = match args.kind {
            BarcodeKind::Sublevel0 => read_signal_any(file).and_then(|s| args.kind.of_signal(&s)),
            _ => io::read_point_cloud(file).and_then(|c| args.kind.of_cloud(&c, &options)),
        }
        .and_then(|b| {
            let stem = file.file_stem().unwrap_or_default().to_string_lossy();
            io::write_barcode(args.out.join(format!("{stem}.bar")), &b)
        });
        if let Err(e) = result {
            eprintln!("error: {}: {e}", file.display());
            failures.push(e);
        }
    }
    eprintln!(
        "wrote {} of {} barcodes to {}",
        files.len() - failures.len(),
        files.len(),
        args.out.display()
    );
    match failures.iter().position(|e| !e.is_input_error()) {
        Some(i) => Err(failures.swap_remove(i)),
        None if failures.is_empty() => Ok(()),
        None => Err(Error::InvalidParameter(format!(
            "{} input file(s) could not be processed",
            failures.len()
        ))),
    }
}

#[derive(Serialize)]
struct DistmatTiming {
    schema_version: u32,
    metric: String,
    barcodes: usize,
    pairs: usize,
    parallel: bool,
    seconds: f64,
}

pub fn distmat(args: &DistmatArgs) -> Result<()> {
    let files = expand_inputs(&args.inputs, &["bar"])?;
    if files.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "a distance matrix needs at least 2 barcode files, got {}",
            files.len()
        )));
    }
    let barcodes = files.iter().map(io::read_barcode).collect::<Result<Vec<Barcode>>>()?;
    let start = Instant::now();
    let matrix = distance_matrix(&barcodes, args.metric, !args.serial)?;
    let seconds = start.elapsed().as_secs_f64();
    io::write_distance_matrix(&args.out, &matrix)?;
    let n = barcodes.len();
    let timing = DistmatTiming {
        schema_version: SCHEMA_VERSION,
        metric: args.metric.name().to_string(),
        barcodes: n,
        pairs: n * (n - 1) / 2,
        parallel: !args.serial,
        seconds,
    };
    eprintln!(
        "{}: {} barcodes, {} pairs, {:.6} s",
        timing.metric, timing.barcodes, timing.pairs, timing.seconds
    );
    if let Some(path) = &args.timing {
        write_text(path, &(serde_json::to_string_pretty(&timing)? + "\n"))?;
    }
    Ok(())
}

pub fn cluster(args: &ClusterArgs) -> Result<()> {
    let matrix = io::read_distance_matrix(&args.matrix)?;
    let result = match args.method {
        Method::KMedoids => k_medoids(&matrix, args.k, args.seed)?,
        Method::Agglomerative => agglomerative_average(&matrix, args.k)?,
        Method::Affinity => affinity_propagation(
            &matrix,
            &AffinityOptions {
                damping: args.damping,
                ..AffinityOptions::default()
            },
        )?,
    };
    match &args.out {
        Some(path) => io::write_labels(path, &result.labels)?,
        None => print!("{}", io::format_labels(&result.labels)),
    }
    eprintln!("clusters: {} (converged: {})", result.n_clusters, result.converged);
    if let Some(path) = &args.labels {
        let truth = io::read_labels(path)?;
        eprintln!("FMI: {}", fmi(&truth, &result.labels)?);
    }
    Ok(())
}

/// `path:start:end`; the path itself may contain colons.
fn parse_wav_spec(spec: &str) -> Result<WaveInput> {
    let bad = || Error::InvalidParameter(format!("expected --wav PATH:START:END, got {spec:?}"));
    let mut parts = spec.rsplitn(3, ':');
    let end: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let start: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let path = parts.next().filter(|p| !p.is_empty()).ok_or_else(bad)?;
    Ok(WaveInput::File {
        path: path.into(),
        window: (start, end),
    })
}

fn build_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let seed = args.seed.unwrap_or(0);
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: path.clone(),
                line: e.line(),
                message: e.to_string(),
            })?
        }
        None => match args.dataset.as_str() {
            "synthetic" => ExperimentConfig::desk_synthetic(seed),
            "waves" => ExperimentConfig::desk_waves(seed),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown dataset {other:?}; valid datasets: synthetic, waves"
                )))
            }
        },
    };
    if !args.wav.is_empty() {
        let sources = args.wav.iter().map(|s| parse_wav_spec(s)).collect::<Result<Vec<_>>>()?;
        let per_source = match config.dataset {
            DatasetSpec::Waves { per_source, .. } => per_source,
            DatasetSpec::Synthetic { .. } => 20,
        };
        config.dataset = DatasetSpec::Waves { sources, per_source };
        config.barcode = None;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if !args.metric.is_empty() {
        config.metrics = args.metric.clone();
    }
    if !args.method.is_empty() {
        config.methods = args.method.clone();
    }
    if let Some(cap) = args.h1_cap {
        config.rips.h1_vertex_cap = cap;
    }
    if args.serial {
        config.parallel = false;
    }
    match &mut config.dataset {
        DatasetSpec::Synthetic {
            per_class,
            subsample,
            subsample_method,
            conditions,
        } => {
            if let Some(n) = args.per_class {
                *per_class = n;
            }
            if let Some(n) = args.subsample {
                *subsample = (n > 0).then_some(n);
            }
            if let Some(m) = args.subsample_method {
                *subsample_method = m;
            }
            if let Some(t) = &args.transformed {
                *conditions = match t.as_str() {
                    "both" => vec![false, true],
                    "yes" => vec![true],
                    "no" => vec![false],
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "--transformed takes both, yes or no, got {other:?}"
                        )))
                    }
                };
            }
        }
        DatasetSpec::Waves { per_source, .. } => {
            if let Some(n) = args.per_class {
                *per_source = n;
            }
        }
    }
    config.validate()?;
    Ok(config)
}

pub fn experiment(args: &ExperimentArgs) -> Result<()> {
    let config = build_config(args)?;
    let (report, timing) = run_experiment(&config)?;
    if let Some(path) = &args.out {
        write_text(path, &report.to_json()?)?;
    }
    if let Some(path) = &args.timing {
        write_text(path, &(serde_json::to_string_pretty(&timing)? + "\n"))?;
    }
    print!("{}", report.to_table(Some(&timing)));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wav_specs() {
        match parse_wav_spec("C:/x:y.wav:3:15").unwrap() {
            WaveInput::File { path, window } => {
                assert_eq!(path, PathBuf::from("C:/x:y.wav"));
                assert_eq!(window, (3.0, 15.0));
            }
            _ => unreachable!(),
        }
        assert!(parse_wav_spec("a.wav:3").is_err());
        assert!(parse_wav_spec(":1:2").is_err());
    }
}
