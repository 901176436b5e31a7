//! Plain-text interchange formats.
//!
//! * barcode: one `birth,death` per line in canonical order, `#` comments ignored
//! * distance matrix: first line `n`, then `n` rows of `n` comma-separated values
//! * point cloud: one `x,y` per line
//! * signal: optional `sample_rate=<float>` header, then one amplitude per line
//! * labels: one integer per line
//! * spectrum: one comma-separated line of descending eigenvalues
//!
//! Floats are written with Rust's shortest round-trip formatting (at most 17
//! significant digits), so reading a written file reproduces every value
//! bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::barcode::Barcode;
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::persistence::{PointCloud, Signal};
use crate::spectral::Spectrum;

const INLINE: &str = "<input>";

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_f64(field: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_error(path, line, format!("not a number: {:?}", field.trim())))?;
    if !v.is_finite() {
        return Err(parse_error(path, line, format!("non-finite value {v}")));
    }
    Ok(v)
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn format_barcode(barcode: &Barcode) -> String {
    let mut out = String::new();
    for bar in barcode {
        let _ = writeln!(out, "{},{}", bar.birth(), bar.death());
    }
    out
}

pub fn parse_barcode(text: &str) -> Result<Barcode> {
    parse_barcode_from(text, Path::new(INLINE))
}

fn parse_barcode_from(text: &str, path: &Path) -> Result<Barcode> {
    let mut pairs = Vec::new();
    for (line, content) in data_lines(text) {
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 2 {
            return Err(parse_error(path, line, "expected `birth,death`"));
        }
        pairs.push((parse_f64(fields[0], path, line)?, parse_f64(fields[1], path, line)?));
    }
    Barcode::canonicalize(pairs)
}

pub fn read_barcode(path: impl AsRef<Path>) -> Result<Barcode> {
    let path = path.as_ref();
    parse_barcode_from(&read_text(path)?, path)
}

pub fn write_barcode(path: impl AsRef<Path>, barcode: &Barcode) -> Result<()> {
    write_text(path.as_ref(), &format_barcode(barcode))
}

pub fn format_distance_matrix(matrix: &DistanceMatrix) -> String {
    let n = matrix.len();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = matrix.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_distance_matrix(text: &str) -> Result<DistanceMatrix> {
    parse_distance_matrix_from(text, Path::new(INLINE))
}

fn parse_distance_matrix_from(text: &str, path: &Path) -> Result<DistanceMatrix> {
    let mut lines = data_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_error(path, 1, "missing size line"))?;
    let n: usize = header
        .parse()
        .map_err(|_| parse_error(path, line, format!("bad size {header:?}")))?;
    let mut rows = Vec::with_capacity(n);
    for (line, content) in lines {
        let row = content
            .split(',')
            .map(|f| parse_f64(f, path, line))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(parse_error(
                path,
                line,
                format!("expected {n} values, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(parse_error(
            path,
            line,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    DistanceMatrix::from_rows(rows)
}

pub fn read_distance_matrix(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
    let path = path.as_ref();
    parse_distance_matrix_from(&read_text(path)?, path)
}

pub fn write_distance_matrix(path: impl AsRef<Path>, matrix: &DistanceMatrix) -> Result<()> {
    write_text(path.as_ref(), &format_distance_matrix(matrix))
}

pub fn format_point_cloud(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let _ = writeln!(out, "{},{}", p[0], p[1]);
    }
    out
}

pub fn parse_point_cloud(text: &str) -> Result<PointCloud> {
    parse_point_cloud_from(text, Path::new(INLINE))
}

fn parse_point_cloud_from(text: &str, path: &Path) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (line, content) in data_lines(text) {
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 2 {
            return Err(parse_error(path, line, "expected `x,y`"));
        }
        points.push([parse_f64(fields[0], path, line)?, parse_f64(fields[1], path, line)?]);
    }
    PointCloud::new(points).map_err(|e| parse_error(path, 0, e.to_string()))
}

pub fn read_point_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    parse_point_cloud_from(&read_text(path)?, path)
}

pub fn write_point_cloud(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    write_text(path.as_ref(), &format_point_cloud(cloud))
}

pub fn format_signal(signal: &Signal) -> String {
    let mut out = String::new();
    if let Some(rate) = signal.sample_rate() {
        let _ = writeln!(out, "sample_rate={rate}");
    }
    for s in signal.samples() {
        let _ = writeln!(out, "{s}");
    }
    out
}

pub fn parse_signal(text: &str) -> Result<Signal> {
    parse_signal_from(text, Path::new(INLINE))
}

fn parse_signal_from(text: &str, path: &Path) -> Result<Signal> {
    let mut rate = None;
    let mut samples = Vec::new();
    for (line, content) in data_lines(text) {
        if let Some(value) = content.strip_prefix("sample_rate=") {
            if !samples.is_empty() || rate.is_some() {
                return Err(parse_error(path, line, "sample_rate header must come first"));
            }
            rate = Some(parse_f64(value, path, line)?);
            continue;
        }
        samples.push(parse_f64(content, path, line)?);
    }
    Signal::new(samples, rate).map_err(|e| parse_error(path, 0, e.to_string()))
}

pub fn read_signal(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    parse_signal_from(&read_text(path)?, path)
}

pub fn write_signal(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    write_text(path.as_ref(), &format_signal(signal))
}

pub fn format_labels(labels: &[usize]) -> String {
    labels.iter().map(|l| format!("{l}\n")).collect()
}

pub fn parse_labels(text: &str) -> Result<Vec<usize>> {
    parse_labels_from(text, Path::new(INLINE))
}

fn parse_labels_from(text: &str, path: &Path) -> Result<Vec<usize>> {
    data_lines(text)
        .map(|(line, content)| {
            content
                .parse()
                .map_err(|_| parse_error(path, line, format!("not a label: {content:?}")))
        })
        .collect()
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    parse_labels_from(&read_text(path)?, path)
}

pub fn write_labels(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    write_text(path.as_ref(), &format_labels(labels))
}

pub fn format_spectrum(spectrum: &Spectrum) -> String {
    let values: Vec<String> = spectrum.values().iter().map(|v| v.to_string()).collect();
    format!("{}\n", values.join(","))
}

pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let path = Path::new(INLINE);
    let mut values = Vec::new();
    for (line, content) in data_lines(text) {
        for field in content.split(',') {
            values.push(parse_f64(field, path, line)?);
        }
    }
    Spectrum::from_descending(values)
}

/// Sorted list of regular files in `dir` whose extension is `ext`.
pub fn list_files(dir: impl AsRef<Path>, ext: &str) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn barcode_text_format() {
        let b = Barcode::canonicalize([(1.0, 2f64.sqrt()), (0.0, 4.0)]).unwrap();
        assert_eq!(format_barcode(&b), "0,4\n1,1.4142135623730951\n");
    }

    #[test]
    fn barcode_comments_and_blank_lines() {
        let b = parse_barcode("# header\n\n2,4\n1,3\n# trailing\n").unwrap();
        assert_eq!(b.pairs(), vec![(1.0, 3.0), (2.0, 4.0)]);
    }

    #[test]
    fn barcode_parse_errors_name_the_line() {
        let err = parse_barcode("1,2\n3;4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_barcode("1,inf\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn distance_matrix_format() {
        let m = DistanceMatrix::from_rows(vec![vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let text = format_distance_matrix(&m);
        assert_eq!(text, "2\n0,0.5\n0.5,0\n");
        assert_eq!(parse_distance_matrix(&text).unwrap(), m);
        assert!(parse_distance_matrix("2\n0,1\n").is_err());
        assert!(parse_distance_matrix("2\n0,1\n1,0,3\n").is_err());
    }

    #[test]
    fn signal_header() {
        let s = parse_signal("sample_rate=44100\n0.5\n-0.25\n").unwrap();
        assert_eq!(s.sample_rate(), Some(44100.0));
        assert_eq!(s.samples(), &[0.5, -0.25]);
        assert_eq!(parse_signal(&format_signal(&s)).unwrap(), s);
        assert!(parse_signal("1\nsample_rate=2\n3\n").is_err());
        let s = parse_signal("1\n2\n").unwrap();
        assert_eq!(s.sample_rate(), None);
    }

    #[test]
    fn point_cloud_and_labels() {
        let c = parse_point_cloud("0,0\n1.5,-2\n").unwrap();
        assert_eq!(c.points(), &[[0.0, 0.0], [1.5, -2.0]]);
        assert!(parse_point_cloud("").is_err());
        assert_eq!(parse_labels("0\n1\n1\n").unwrap(), vec![0, 1, 1]);
        assert!(parse_labels("0\n-1\n").is_err());
        assert_eq!(format_labels(&[1, 0]), "1\n0\n");
    }

    #[test]
    fn spectrum_line() {
        let s = Spectrum::from_descending(vec![1.0, 1.0 / 3.0, 0.0]).unwrap();
        let text = format_spectrum(&s);
        assert_eq!(text, "1,0.3333333333333333,0\n");
        assert_eq!(parse_spectrum(&text).unwrap(), s);
    }

    #[test]
    fn file_round_trip_and_listing() {
        let dir = tempfile::tempdir().unwrap();
        let b = Barcode::canonicalize([(0.1, 0.7), (0.2, 0.3)]).unwrap();
        write_barcode(dir.path().join("b.bar"), &b).unwrap();
        fs::write(dir.path().join("ignore.txt"), "x").unwrap();
        let files = list_files(dir.path(), "bar").unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(read_barcode(&files[0]).unwrap(), b);
        let err = read_barcode(dir.path().join("missing.bar")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    proptest! {
        #[test]
        fn barcode_round_trip_is_bit_exact(pairs in prop::collection::vec((-1e6..1e6f64, 1e-9..1e6f64), 0..20)) {
            let b = Barcode::canonicalize(pairs.into_iter().map(|(a, l)| (a, a + l))).unwrap();
            let back = parse_barcode(&format_barcode(&b)).unwrap();
            prop_assert_eq!(b.pairs().iter().map(|(x, y)| (x.to_bits(), y.to_bits())).collect::<Vec<_>>(),
                            back.pairs().iter().map(|(x, y)| (x.to_bits(), y.to_bits())).collect::<Vec<_>>());
        }
    }
}
