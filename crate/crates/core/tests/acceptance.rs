//! Acceptance criteria, run in order with one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are printed even when
//! `cargo test` captures output. Exits nonzero if any criterion fails.

use std::ops::RangeInclusive;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use simbar_core::rng::substream;
use simbar_core::{
    apply_conformal, bottleneck, fmi, matching_bruteforce, rips_persistence, run_experiment, spectral_distance,
    spectral_distance_bruteforce, sublevel_h0, wasserstein, Barcode, ConformalTransform, DatasetSpec, ExperimentConfig,
    ExperimentReport, Method, Metric, PointCloud, RipsOptions, Signal, SpectralExponent, TimingReport,
};

const SEED: u64 = 7;
const SPECTRAL: [SpectralExponent; 2] = [SpectralExponent::One, SpectralExponent::Two];
const MATCHING: [Metric; 3] = [Metric::Bottleneck, Metric::Wasserstein1, Metric::Wasserstein2];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn random_barcode(rng: &mut ChaCha8Rng, lengths: RangeInclusive<usize>) -> Barcode {
    let len = rng.random_range(lengths);
    Barcode::canonicalize((0..len).map(|_| {
        let birth = rng.random_range(0.0..10.0);
        (birth, birth + rng.random_range(0.01..5.0))
    }))
    .unwrap()
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> PointCloud {
    PointCloud::new(
        (0..n)
            .map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
            .collect(),
    )
    .unwrap()
}

fn max_pair_gap(a: &Barcode, b: &Barcode) -> f64 {
    let (a, b) = (a.pairs(), b.pairs());
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x.0 - y.0).abs().max((x.1 - y.1).abs()))
        .fold(0.0, f64::max)
}

fn timing_total(timing: &TimingReport, metric: Metric) -> f64 {
    timing
        .conditions
        .iter()
        .flat_map(|c| &c.metrics)
        .filter(|m| m.metric == metric)
        .map(|m| m.total_seconds)
        .sum()
}

fn sorted_matching_optimal() -> Verdict {
    let start = Instant::now();
    let mut rng = substream(SEED, &[1]);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let b = random_barcode(&mut rng, 1..=8);
        let c = random_barcode(&mut rng, 1..=8);
        for p in SPECTRAL {
            let fast = spectral_distance(&b, &c, p).unwrap();
            let slow = spectral_distance_bruteforce(&b, &c, p).unwrap();
            worst = worst.max((fast - slow).abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-12 && elapsed < Duration::from_secs(10),
        format!("max |sorted - exhaustive| = {worst:e} over 500 pairs, {elapsed:.2?}"),
    )
}

fn pseudometric_axioms() -> Verdict {
    let start = Instant::now();
    let mut rng = substream(SEED, &[2]);
    let mut asymmetric = 0;
    let mut worst_excess: f64 = 0.0;
    for _ in 0..200 {
        let t: Vec<Barcode> = (0..3).map(|_| random_barcode(&mut rng, 1..=6)).collect();
        for metric in Metric::ALL {
            let d = |x: &Barcode, y: &Barcode| metric.distance(x, y).unwrap();
            let (ab, ba) = (d(&t[0], &t[1]), d(&t[1], &t[0]));
            if ab != ba {
                asymmetric += 1;
            }
            let (bc, ac) = (d(&t[1], &t[2]), d(&t[0], &t[2]));
            worst_excess = worst_excess.max(ac - (ab + bc));
        }
    }
    let elapsed = start.elapsed();
    verdict(
        asymmetric == 0 && worst_excess <= 1e-9 && elapsed < Duration::from_secs(30),
        format!(
            "{asymmetric} asymmetric pairs, worst triangle excess {worst_excess:e}, 200 triples x 5 metrics, {elapsed:.2?}"
        ),
    )
}

fn similarity_stability() -> Verdict {
    let mut rng = substream(SEED, &[3]);
    let mut worst: f64 = 0.0;
    let mut smallest_bottleneck = f64::INFINITY;
    for _ in 0..100 {
        let b = random_barcode(&mut rng, 1..=12);
        let doubled = b.union(&b);
        for p in SPECTRAL {
            for s in [0.1, 2.0, 10.0] {
                worst = worst.max(spectral_distance(&b, &b.scaled(s).unwrap(), p).unwrap());
            }
            worst = worst.max(spectral_distance(&b, &doubled, p).unwrap());
        }
        smallest_bottleneck = smallest_bottleneck.min(bottleneck(&b, &b.scaled(2.0).unwrap()));
    }
    verdict(
        worst <= 1e-9 && smallest_bottleneck > 0.0,
        format!("max d_S under scaling or doubling {worst:e}; min bottleneck(B, 2B) {smallest_bottleneck}"),
    )
}

fn matching_oracle() -> Verdict {
    let mut rng = substream(SEED, &[4]);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let total = rng.random_range(0..=6);
        let left = rng.random_range(0..=total);
        let b = random_barcode(&mut rng, left..=left);
        let c = random_barcode(&mut rng, total - left..=total - left);
        let gaps = [
            bottleneck(&b, &c) - matching_bruteforce(&b, &c, f64::INFINITY).unwrap(),
            wasserstein(&b, &c, 1.0).unwrap() - matching_bruteforce(&b, &c, 1.0).unwrap(),
            wasserstein(&b, &c, 2.0).unwrap() - matching_bruteforce(&b, &c, 2.0).unwrap(),
        ];
        worst = gaps.iter().fold(worst, |w, g| w.max(g.abs()));
    }
    verdict(
        worst <= 1e-9,
        format!("max |solver - exhaustive| = {worst:e} over 500 pairs"),
    )
}

fn persistence_correctness() -> Verdict {
    let options = RipsOptions::default();
    let square = PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let h1 = rips_persistence(&square, 1, &options).unwrap().pairs();
    let square_ok = h1.len() == 1 && h1[0].0 == 1.0 && (h1[0].1 - 2f64.sqrt()).abs() <= 1e-12;

    let signal = Signal::new(vec![2.0, 0.0, 3.0, 1.0, 4.0], None).unwrap();
    let h0 = sublevel_h0(&signal).unwrap().pairs();
    let signal_ok = h0 == [(0.0, 4.0), (1.0, 3.0)];

    let mut rng = substream(SEED, &[5]);
    let mut rigid_gap: f64 = 0.0;
    let mut scale_gap: f64 = 0.0;
    for _ in 0..50 {
        let cloud = random_cloud(&mut rng, 30);
        let motion = ConformalTransform::new(
            rng.random_range(0.0..std::f64::consts::TAU),
            1.0,
            [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)],
        )
        .unwrap();
        let s = rng.random_range(0.1..10.0);
        let moved = apply_conformal(&cloud, &motion);
        let scaled = apply_conformal(&cloud, &ConformalTransform::new(0.0, s, [0.0, 0.0]).unwrap());
        for dim in [0, 1] {
            let base = rips_persistence(&cloud, dim, &options).unwrap();
            rigid_gap = rigid_gap.max(max_pair_gap(&base, &rips_persistence(&moved, dim, &options).unwrap()));
            scale_gap = scale_gap.max(max_pair_gap(
                &base.scaled(s).unwrap(),
                &rips_persistence(&scaled, dim, &options).unwrap(),
            ));
        }
    }
    verdict(
        square_ok && signal_ok && rigid_gap <= 1e-9 && scale_gap <= 1e-9,
        format!(
            "square H1 {h1:?}; signal H0 {h0:?}; rigid-motion gap {rigid_gap:e}; scaling gap {scale_gap:e} over 50 clouds"
        ),
    )
}

fn transformed_directionality(report: &ExperimentReport, elapsed: Duration) -> Verdict {
    let transformed = report.condition("transformed").unwrap();
    let untransformed = report.condition("untransformed").unwrap();
    let km = |c: &simbar_core::experiment::ConditionReport, m| c.fmi_mean(m, Method::KMedoids).unwrap();
    let best_matching = MATCHING
        .iter()
        .map(|&m| km(transformed, m))
        .fold(f64::NEG_INFINITY, f64::max);
    let ds2 = km(transformed, Metric::Spectral2);
    let ds1 = km(transformed, Metric::Spectral1);
    let drift = (ds2 - km(untransformed, Metric::Spectral2)).abs();
    let margin = (ds2 - best_matching).min(ds1 - best_matching);
    verdict(
        margin >= 0.1 && drift <= 0.1 && elapsed < Duration::from_secs(15 * 60),
        format!(
            "transformed k-medoids FMI dS2 {ds2:.3}, dS1 {ds1:.3}, db {:.3}, dW1 {:.3}, dW2 {:.3}; margin {margin:.3}; dS2 drift {drift:.3}; {elapsed:.1?}",
            km(transformed, Metric::Bottleneck),
            km(transformed, Metric::Wasserstein1),
            km(transformed, Metric::Wasserstein2),
        ),
    )
}

fn affinity_cluster_counts(report: &ExperimentReport) -> Verdict {
    let counts: Vec<(String, f64)> = report
        .conditions
        .iter()
        .map(|c| (c.condition.clone(), c.cluster_count_mean(Metric::Spectral2).unwrap()))
        .collect();
    verdict(
        counts.iter().all(|(_, m)| (2.0..=2.5).contains(m)),
        format!("mean affinity-propagation clusters on dS2: {counts:?}"),
    )
}

fn wave_directionality() -> Verdict {
    let start = Instant::now();
    let (report, _) = run_experiment(&ExperimentConfig::desk_waves(SEED)).unwrap();
    let waves = report.condition("waves").unwrap();
    let ds1 = waves.fmi_mean(Metric::Spectral1, Method::KMedoids).unwrap();
    let db = waves.fmi_mean(Metric::Bottleneck, Method::KMedoids).unwrap();
    verdict(
        ds1 >= 0.9 && ds1 - db >= 0.2,
        format!("k-medoids FMI dS1 {ds1:.3}, db {db:.3}; {:.1?}", start.elapsed()),
    )
}

fn fmi_unit() -> Verdict {
    let perfect = fmi(&[0, 0, 1, 1, 2], &[5, 5, 3, 3, 9]).unwrap();
    let partial = fmi(&[0, 0, 0, 1], &[0, 0, 1, 1]).unwrap();
    let expected = 1.0 / 6f64.sqrt();
    verdict(
        perfect == 1.0 && (partial - expected).abs() <= 1e-12,
        format!("perfect {perfect}; [0,0,0,1] vs [0,0,1,1] {partial} (1/sqrt 6 = {expected})"),
    )
}

fn small_configs() -> Vec<ExperimentConfig> {
    let mut synthetic = ExperimentConfig::desk_synthetic(SEED);
    synthetic.trials = 2;
    if let DatasetSpec::Synthetic {
        per_class, subsample, ..
    } = &mut synthetic.dataset
    {
        *per_class = 4;
        *subsample = Some(40);
    }
    let mut waves = ExperimentConfig::desk_waves(SEED);
    waves.trials = 2;
    if let DatasetSpec::Waves { per_source, .. } = &mut waves.dataset {
        *per_source = 5;
    }
    vec![synthetic, waves]
}

fn determinism() -> Verdict {
    let mut mismatches = Vec::new();
    for config in small_configs() {
        let mut outputs = Vec::new();
        for threads in [1, 4] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            for parallel in [true, false] {
                let c = ExperimentConfig {
                    parallel,
                    ..config.clone()
                };
                outputs.push(pool.install(|| run_experiment(&c).unwrap().0.to_json().unwrap()));
            }
        }
        outputs.push(run_experiment(&config).unwrap().0.to_json().unwrap());
        if outputs.iter().any(|o| o != &outputs[0]) {
            mismatches.push(config.barcode_kind().name());
        }
    }
    verdict(
        mismatches.is_empty(),
        format!(
            "synthetic and wave reports over 1 and 4 threads, serial and parallel pairs; mismatches: {mismatches:?}"
        ),
    )
}

fn relative_timing(timing: &TimingReport) -> Verdict {
    let ds2 = timing_total(timing, Metric::Spectral2);
    let db = timing_total(timing, Metric::Bottleneck);
    verdict(
        ds2 < 0.5 * db,
        format!(
            "serial distance-matrix stage: dS2 {ds2:.4} s, db {db:.4} s, ratio {:.3}",
            ds2 / db
        ),
    )
}

fn run(number: usize, name: &str, check: impl FnOnce() -> Verdict) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
        let message = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        verdict(false, format!("panicked: {message}"))
    });
    let status = if outcome.pass { "PASS" } else { "FAIL" };
    println!("criterion {number:>2} {status} {name}: {}", outcome.detail);
    outcome.pass
}

fn main() -> ExitCode {
    let mut results = vec![
        run(1, "sorted-matching optimality", sorted_matching_optimal),
        run(2, "pseudometric axioms", pseudometric_axioms),
        run(3, "similarity stability", similarity_stability),
        run(4, "matching oracle", matching_oracle),
        run(5, "persistence correctness", persistence_correctness),
    ];

    // One desk-scale synthetic run serves criteria 6, 7 and 11; pairs are
    // evaluated serially so the timings compare single-thread work.
    let start = Instant::now();
    let desk = catch_unwind(|| {
        run_experiment(&ExperimentConfig {
            parallel: false,
            ..ExperimentConfig::desk_synthetic(SEED)
        })
    });
    let elapsed = start.elapsed();
    match desk {
        Ok(Ok((report, timing))) => {
            results.push(run(6, "transformed directionality", || {
                transformed_directionality(&report, elapsed)
            }));
            results.push(run(7, "affinity cluster counts", || affinity_cluster_counts(&report)));
            results.push(run(8, "wave directionality", wave_directionality));
            results.push(run(9, "FMI unit", fmi_unit));
            results.push(run(10, "determinism", determinism));
            results.push(run(11, "relative timing", || relative_timing(&timing)));
        }
        failed => {
            let why = match failed {
                Ok(Err(e)) => e.to_string(),
                _ => "panicked".to_string(),
            };
            for (n, name) in [(6, "transformed directionality"), (7, "affinity cluster counts")] {
                results.push(run(n, name, || verdict(false, format!("desk run failed: {why}"))));
            }
            results.push(run(8, "wave directionality", wave_directionality));
            results.push(run(9, "FMI unit", fmi_unit));
            results.push(run(10, "determinism", determinism));
            results.push(run(11, "relative timing", || {
                verdict(false, format!("desk run failed: {why}"))
            }));
        }
    }

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
