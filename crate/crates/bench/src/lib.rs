//! Fixtures shared by the benchmarks.

use simbar_core::experiment::{subsample_cloud, SubsampleMethod};
use simbar_core::{synth_dataset, Barcode, BarcodeKind, RipsOptions};

/// Barcodes of a transformed synthetic dataset, as the desk-scale
/// experiment builds them: clouds reduced to `points` landmarks, then
/// `kind` persistence. Class-major order.
pub fn desk_barcodes(per_class: usize, points: usize, kind: BarcodeKind, seed: u64) -> Vec<Barcode> {
    let data = synth_dataset(per_class, true, seed).expect("valid dataset parameters");
    data.samples
        .iter()
        .enumerate()
        .map(|(i, cloud)| {
            let cloud = subsample_cloud(cloud, points, SubsampleMethod::MaxMin, seed, i).expect("subsample");
            kind.of_cloud(&cloud, &RipsOptions::default()).expect("barcode")
        })
        .collect()
}
