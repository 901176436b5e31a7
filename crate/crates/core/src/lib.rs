//! Persistence barcodes, the spectral barcode pseudometric, classical matching
//! distances, and the clustering machinery used to compare them.

pub mod barcode;
pub mod clustering;
pub mod datasets;
pub mod distance;
pub mod error;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod matching;
pub mod persistence;
pub mod rng;
pub mod spectral;

pub use barcode::{overlap_length, Barcode, Interval};
pub use clustering::{
    affinity_propagation, agglomerative_average, fmi, k_medoids, AffinityOptions, ClusteringResult, Method,
};
pub use datasets::{
    apply_conformal, load_wav, random_conformal, sample_ellipse, slice_waves, synth_dataset, ConformalTransform,
    EllipseSpec, Instrument, LabeledDataset,
};
pub use distance::{distance_matrix, DistanceMatrix, Metric};
pub use error::{Error, Result};
pub use experiment::{run_experiment, BarcodeKind, DatasetSpec, ExperimentConfig, ExperimentReport, TimingReport};
pub use matching::{bottleneck, diagonal_projection, matching_bruteforce, wasserstein, DiagramPoint};
pub use persistence::{
    rips_complex, rips_persistence, sublevel_h0, EssentialBar, FilteredSimplex, PointCloud, RipsOptions, Signal,
};
pub use spectral::{
    gram_matrix, normalized_spectrum, spectral_distance, spectral_distance_bruteforce, GramMatrix, SpectralExponent,
    Spectrum,
};
