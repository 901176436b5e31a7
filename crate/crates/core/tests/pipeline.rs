use simbar_core::{
    distance_matrix, io, rips_persistence, spectral_distance, synth_dataset, Barcode, Metric, RipsOptions,
    SpectralExponent,
};

fn h0_barcodes(transformed: bool) -> (Vec<Barcode>, Vec<usize>) {
    let data = synth_dataset(3, transformed, 11).unwrap();
    let bars = data
        .samples
        .iter()
        .map(|c| {
            let every_fourth: Vec<usize> = (0..c.len()).step_by(4).collect();
            rips_persistence(&c.select(&every_fourth).unwrap(), 0, &RipsOptions::default()).unwrap()
        })
        .collect();
    (bars, data.labels)
}

#[test]
fn conformal_maps_leave_spectral_distance_unchanged() {
    let (plain, labels) = h0_barcodes(false);
    let (moved, moved_labels) = h0_barcodes(true);
    assert_eq!(labels, moved_labels);
    for (a, b) in plain.iter().zip(&moved) {
        for p in [SpectralExponent::One, SpectralExponent::Two] {
            assert!(spectral_distance(a, b, p).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn distance_matrices_are_valid_and_schedule_independent() {
    let (bars, _) = h0_barcodes(true);
    for metric in Metric::ALL {
        let parallel = distance_matrix(&bars, metric, true).unwrap();
        let serial = distance_matrix(&bars, metric, false).unwrap();
        assert_eq!(parallel, serial, "{metric}");
        let n = parallel.len();
        assert_eq!(n, bars.len());
        for i in 0..n {
            assert_eq!(parallel.get(i, i), 0.0);
            for j in 0..n {
                assert_eq!(parallel.get(i, j), parallel.get(j, i));
                assert!(parallel.get(i, j) >= 0.0);
            }
        }
        assert!(parallel.max_triangle_violation() <= 1e-9, "{metric}");
    }
}

#[test]
fn files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let (bars, labels) = h0_barcodes(false);
    let bar_path = dir.path().join("b.bar");
    io::write_barcode(&bar_path, &bars[0]).unwrap();
    assert_eq!(io::read_barcode(&bar_path).unwrap(), bars[0]);

    let matrix = distance_matrix(&bars, Metric::Spectral2, true).unwrap();
    let m_path = dir.path().join("m.csv");
    io::write_distance_matrix(&m_path, &matrix).unwrap();
    assert_eq!(io::read_distance_matrix(&m_path).unwrap(), matrix);

    let l_path = dir.path().join("labels.txt");
    io::write_labels(&l_path, &labels).unwrap();
    assert_eq!(io::read_labels(&l_path).unwrap(), labels);
}
