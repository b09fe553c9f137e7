//! CSV and JSON interchange. All floats are written with 17 significant
//! digits so round trips are exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};
use sha2::{Digest, Sha256};

use crate::embedding::PointCloud;
use crate::error::{Error, Result};
use crate::features::{FEATURE_DIM, FEATURE_NAMES};
use crate::persistence::{PersistenceDiagram, PersistencePair};
use crate::stability::{LabelGrid, LobeBoundary};
use crate::turning::TimeSeries;

/// Shortest-exact is not stable across formatters; fix 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_float(field: &str, context: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("{context}: bad float {field:?}: {e}")))
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = std::io::Result<String>>> {
    Ok(BufReader::new(File::open(path)?).lines())
}

/// One feature-matrix row: the descriptor plus grid-point metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub features: [f64; FEATURE_DIM],
    pub speed_ratio: f64,
    pub b: f64,
    pub label: bool,
}

pub fn write_time_series(path: &Path, ts: &TimeSeries) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,y")?;
    for (i, &y) in ts.values.iter().enumerate() {
        writeln!(w, "{},{}", format_float(ts.time_at(i)), format_float(y))?;
    }
    Ok(())
}

pub fn read_time_series(path: &Path) -> Result<TimeSeries> {
    let mut lines = open_lines(path)?;
    match lines.next().transpose()? {
        Some(h) if h.trim() == "t,y" => {}
        other => return Err(Error::Parse(format!("{path:?}: expected header t,y, got {other:?}"))),
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let context = format!("{path:?} line {}", i + 2);
        let (t, y) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("{context}: expected two fields")))?;
        times.push(parse_float(t, &context)?);
        values.push(parse_float(y, &context)?);
    }
    if values.is_empty() {
        return Err(Error::Parse(format!("{path:?}: no samples")));
    }
    let t0 = times[0];
    let dt = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    for (i, &t) in times.iter().enumerate() {
        let expected = t0 + dt * i as f64;
        if (t - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
            return Err(Error::Parse(format!(
                "{path:?}: sample times are not uniform at row {} ({t} vs {expected})",
                i + 2
            )));
        }
    }
    Ok(TimeSeries { t0, dt, values })
}

pub fn write_point_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header: Vec<String> = (0..cloud.dim).map(|d| format!("x{d}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|&v| format_float(v)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_point_cloud(path: &Path) -> Result<PointCloud> {
    let mut lines = open_lines(path)?;
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Parse(format!("{path:?}: empty file")))?;
    let dim = header.trim().split(',').count();
    for (d, name) in header.trim().split(',').enumerate() {
        if name != format!("x{d}") {
            return Err(Error::Parse(format!("{path:?}: unexpected column {name:?}")));
        }
    }
    let mut data = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let context = format!("{path:?} line {}", i + 2);
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim {
            return Err(Error::Parse(format!(
                "{context}: expected {dim} fields, got {}",
                fields.len()
            )));
        }
        for f in fields {
            data.push(parse_float(f, &context)?);
        }
    }
    Ok(PointCloud::new(dim, data))
}

/// Any number of diagrams in one file, distinguished by the dim column.
pub fn write_diagrams(path: &Path, diagrams: &[&PersistenceDiagram]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "dim,birth,death")?;
    for pd in diagrams {
        for p in &pd.pairs {
            writeln!(w, "{},{},{}", pd.dim, format_float(p.birth), format_float(p.death))?;
        }
    }
    Ok(())
}

/// Reads diagrams back grouped by dimension 0..=max seen (missing dims are
/// returned empty so (H0, H1) files round-trip).
pub fn read_diagrams(path: &Path, max_dim: usize) -> Result<Vec<PersistenceDiagram>> {
    let mut lines = open_lines(path)?;
    match lines.next().transpose()? {
        Some(h) if h.trim() == "dim,birth,death" => {}
        other => {
            return Err(Error::Parse(format!(
                "{path:?}: expected header dim,birth,death, got {other:?}"
            )))
        }
    }
    let mut out: Vec<PersistenceDiagram> =
        (0..=max_dim).map(PersistenceDiagram::empty).collect();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let context = format!("{path:?} line {}", i + 2);
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("{context}: expected dim,birth,death")));
        }
        let dim: usize = fields[0]
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("{context}: bad dim: {e}")))?;
        if dim > max_dim {
            return Err(Error::Parse(format!("{context}: dim {dim} above {max_dim}")));
        }
        out[dim].pairs.push(PersistencePair {
            birth: parse_float(fields[1], &context)?,
            death: parse_float(fields[2], &context)?,
        });
    }
    Ok(out)
}

/// Header row carries the depth axis, the leading column the speed axis,
/// cells are 1 = chatter.
pub fn write_label_grid(path: &Path, grid: &LabelGrid) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let depths: Vec<String> = grid.depth_axis.iter().map(|&d| format_float(d)).collect();
    writeln!(w, "speed_ratio\\depth,{}", depths.join(","))?;
    for (i, &s) in grid.speed_axis.iter().enumerate() {
        let cells: Vec<&str> =
            grid.labels[i].iter().map(|&c| if c { "1" } else { "0" }).collect();
        writeln!(w, "{},{}", format_float(s), cells.join(","))?;
    }
    Ok(())
}

pub fn read_label_grid(path: &Path) -> Result<LabelGrid> {
    let mut lines = open_lines(path)?;
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Parse(format!("{path:?}: empty file")))?;
    let mut fields = header.trim().split(',');
    match fields.next() {
        Some("speed_ratio\\depth") => {}
        other => return Err(Error::Parse(format!("{path:?}: bad corner cell {other:?}"))),
    }
    let depth_axis = fields
        .map(|f| parse_float(f, &format!("{path:?} header")))
        .collect::<Result<Vec<f64>>>()?;
    let mut speed_axis = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let context = format!("{path:?} line {}", i + 2);
        let mut fields = line.split(',');
        let speed = fields
            .next()
            .ok_or_else(|| Error::Parse(format!("{context}: empty row")))?;
        speed_axis.push(parse_float(speed, &context)?);
        let row = fields
            .map(|c| match c.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::Parse(format!("{context}: cell {other:?} not in {{0,1}}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        if row.len() != depth_axis.len() {
            return Err(Error::Parse(format!(
                "{context}: {} cells for {} depths",
                row.len(),
                depth_axis.len()
            )));
        }
        labels.push(row);
    }
    if labels.is_empty() {
        return Err(Error::Parse(format!("{path:?}: no grid rows")));
    }
    Ok(LabelGrid { speed_axis, depth_axis, labels })
}

pub fn write_boundary(path: &Path, boundary: &LobeBoundary) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "speed_ratio,b_lim")?;
    for &(s, b) in &boundary.samples {
        writeln!(w, "{},{}", format_float(s), format_float(b))?;
    }
    Ok(())
}

pub fn read_boundary(path: &Path) -> Result<LobeBoundary> {
    let mut lines = open_lines(path)?;
    match lines.next().transpose()? {
        Some(h) if h.trim() == "speed_ratio,b_lim" => {}
        other => {
            return Err(Error::Parse(format!(
                "{path:?}: expected header speed_ratio,b_lim, got {other:?}"
            )))
        }
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let context = format!("{path:?} line {}", i + 2);
        let (s, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("{context}: expected two fields")))?;
        samples.push((parse_float(s, &context)?, parse_float(b, &context)?));
    }
    if samples.is_empty() {
        return Err(Error::Parse(format!("{path:?}: no boundary samples")));
    }
    Ok(LobeBoundary { samples })
}

pub fn write_feature_rows(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{},speed_ratio,b,label", FEATURE_NAMES.join(","))?;
    for row in rows {
        let feats: Vec<String> = row.features.iter().map(|&v| format_float(v)).collect();
        writeln!(
            w,
            "{},{},{},{}",
            feats.join(","),
            format_float(row.speed_ratio),
            format_float(row.b),
            u8::from(row.label)
        )?;
    }
    Ok(())
}

pub fn read_feature_rows(path: &Path) -> Result<Vec<FeatureRow>> {
    let mut lines = open_lines(path)?;
    let expected_header = format!("{},speed_ratio,b,label", FEATURE_NAMES.join(","));
    match lines.next().transpose()? {
        Some(h) if h.trim() == expected_header => {}
        other => return Err(Error::Parse(format!("{path:?}: unexpected header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let context = format!("{path:?} line {}", i + 2);
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != FEATURE_DIM + 3 {
            return Err(Error::Parse(format!(
                "{context}: expected {} fields, got {}",
                FEATURE_DIM + 3,
                fields.len()
            )));
        }
        let mut features = [0.0; FEATURE_DIM];
        for (slot, f) in features.iter_mut().zip(&fields) {
            *slot = parse_float(f, &context)?;
        }
        let label = match fields[FEATURE_DIM + 2].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse(format!("{context}: label {other:?} not in {{0,1}}")))
            }
        };
        rows.push(FeatureRow {
            features,
            speed_ratio: parse_float(fields[FEATURE_DIM], &context)?,
            b: parse_float(fields[FEATURE_DIM + 1], &context)?,
            label,
        });
    }
    Ok(rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

/// Machine-readable error envelope printed by the CLI on failure.
pub fn error_json(err: &Error) -> String {
    serde_json::json!({ "kind": err.kind(), "message": err.to_string() }).to_string()
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    let mut reader = BufReader::new(File::open(path)?);
    let mut buf = [0u8; 8192];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::PersistencePair;
    use tempfile::TempDir;

    fn dir() -> TempDir {
        TempDir::new().unwrap()
    }

    #[test]
    fn float_format_round_trips_exactly() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -6.02e23, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn time_series_round_trip() {
        let d = dir();
        let path = d.path().join("ts.csv");
        let ts = TimeSeries {
            t0: 0.25,
            dt: 0.125,
            values: vec![1.0, -0.5, 1.0 / 3.0, 7e-13],
        };
        write_time_series(&path, &ts).unwrap();
        let back = read_time_series(&path).unwrap();
        assert_eq!(back.values, ts.values);
        assert_eq!(back.t0, ts.t0);
        assert_eq!(back.dt, ts.dt);
    }

    #[test]
    fn time_series_rejects_bad_header_and_gaps() {
        let d = dir();
        let path = d.path().join("bad.csv");
        std::fs::write(&path, "time,value\n0,1\n").unwrap();
        assert!(matches!(read_time_series(&path), Err(Error::Parse(_))));
        std::fs::write(&path, "t,y\n0,1\n1,1\n5,1\n").unwrap();
        assert!(matches!(read_time_series(&path), Err(Error::Parse(_))));
    }

    #[test]
    fn point_cloud_round_trip() {
        let d = dir();
        let path = d.path().join("cloud.csv");
        let cloud = PointCloud::new(3, vec![0.1, 0.2, 0.3, -1.0, 2.0, -3.0]);
        write_point_cloud(&path, &cloud).unwrap();
        let back = read_point_cloud(&path).unwrap();
        assert_eq!(back, cloud);
        let header = std::fs::read_to_string(&path).unwrap();
        assert!(header.starts_with("x0,x1,x2\n"));
    }

    #[test]
    fn diagrams_round_trip() {
        let d = dir();
        let path = d.path().join("pd.csv");
        let pd0 = PersistenceDiagram {
            dim: 0,
            pairs: vec![PersistencePair { birth: 0.0, death: 1.5 }],
        };
        let pd1 = PersistenceDiagram {
            dim: 1,
            pairs: vec![PersistencePair { birth: 1.0, death: 2f64.sqrt() }],
        };
        write_diagrams(&path, &[&pd0, &pd1]).unwrap();
        let back = read_diagrams(&path, 1).unwrap();
        assert_eq!(back, vec![pd0, pd1]);
    }

    #[test]
    fn label_grid_round_trip() {
        let d = dir();
        let path = d.path().join("labels.csv");
        let grid = LabelGrid {
            speed_axis: vec![0.2, 1.1],
            depth_axis: vec![0.04, 0.08, 0.12],
            labels: vec![vec![false, true, true], vec![false, false, true]],
        };
        write_label_grid(&path, &grid).unwrap();
        let back = read_label_grid(&path).unwrap();
        assert_eq!(back.speed_axis, grid.speed_axis);
        assert_eq!(back.depth_axis, grid.depth_axis);
        assert_eq!(back.labels, grid.labels);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("speed_ratio\\depth,"));
    }

    #[test]
    fn label_grid_rejects_bad_cells() {
        let d = dir();
        let path = d.path().join("labels.csv");
        std::fs::write(&path, "speed_ratio\\depth,1.0e0\n2.0e-1,2\n").unwrap();
        assert!(matches!(read_label_grid(&path), Err(Error::Parse(_))));
    }

    #[test]
    fn boundary_round_trip() {
        let d = dir();
        let path = d.path().join("boundary.csv");
        let boundary = LobeBoundary { samples: vec![(0.2, 0.5), (0.3, 0.1), (1.4, 0.026)] };
        write_boundary(&path, &boundary).unwrap();
        assert_eq!(read_boundary(&path).unwrap().samples, boundary.samples);
    }

    #[test]
    fn feature_rows_round_trip() {
        let d = dir();
        let path = d.path().join("features.csv");
        let rows = vec![
            FeatureRow {
                features: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
                speed_ratio: 1.25,
                b: 0.05,
                label: true,
            },
            FeatureRow {
                features: [0.0; FEATURE_DIM],
                speed_ratio: 0.2,
                b: 0.001,
                label: false,
            },
        ];
        write_feature_rows(&path, &rows).unwrap();
        assert_eq!(read_feature_rows(&path).unwrap(), rows);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("h0_f2,h0_f4,h0_f5,h1_f1,h1_f2,h1_f3,h1_f4,h1_f5,speed_ratio,b,label\n"));
    }

    #[test]
    fn json_round_trip_and_error_envelope() {
        let d = dir();
        let path = d.path().join("norm.json");
        let norm = crate::features::Normalizer {
            means: vec![0.0; 8],
            stds: vec![1.0; 8],
        };
        write_json(&path, &norm).unwrap();
        let back: crate::features::Normalizer = read_json(&path).unwrap();
        assert_eq!(back, norm);

        let err = Error::ZeroVariance;
        let env: serde_json::Value = serde_json::from_str(&error_json(&err)).unwrap();
        assert_eq!(env["kind"], "zero_variance");
        assert!(env["message"].as_str().unwrap().len() > 4);
    }

    #[test]
    fn sha256_known_vector() {
        let d = dir();
        let path = d.path().join("abc.txt");
        std::fs::write(&path, "abc").unwrap();
        assert_eq!(
            sha256_hex(&path).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
