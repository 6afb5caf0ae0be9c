//! File formats: shape and sequence JSON, labeled distance matrices with CSV
//! output, SVG heatmaps, and library manifests.
//!
//! All writers are byte-deterministic for identical inputs; floats are
//! printed with Rust's shortest round-trip formatting.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::MotionSequence;
use crate::shape::{Shape, Topology};

/// A dense row-major matrix with optional row/column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
            row_labels: Vec::new(),
            col_labels: Vec::new(),
        }
    }

    pub fn from_rows(rows_data: &[Vec<f64>]) -> Result<Matrix> {
        let rows = rows_data.len();
        if rows == 0 {
            return Err(Error::InvalidConfig("matrix needs at least one row".into()));
        }
        let cols = rows_data[0].len();
        if cols == 0 || rows_data.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidConfig("ragged or empty matrix rows".into()));
        }
        Ok(Matrix {
            rows,
            cols,
            data: rows_data.iter().flatten().copied().collect(),
            row_labels: Vec::new(),
            col_labels: Vec::new(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(*v))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for c in r + 1..self.cols {
                if (self.get(r, c) - self.get(c, r)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// CSV with a header row/column of labels (indices when unset).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let label = |labels: &Vec<String>, i: usize| -> String {
            labels.get(i).cloned().unwrap_or_else(|| i.to_string())
        };
        write!(w, "id")?;
        for c in 0..self.cols {
            write!(w, ",{}", label(&self.col_labels, c))?;
        }
        writeln!(w)?;
        for r in 0..self.rows {
            write!(w, "{}", label(&self.row_labels, r))?;
            for c in 0..self.cols {
                write!(w, ",{}", self.get(r, c))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_csv_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    /// SVG heatmap, cool colors for small values and warm for large, scaled
    /// over `[0, max]`.
    pub fn write_svg_heatmap<W: Write>(&self, mut w: W) -> Result<()> {
        let cell = 12usize;
        let max = self.max_value().max(f64::MIN_POSITIVE);
        writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}">"#,
            self.cols * cell,
            self.rows * cell
        )?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let t = (self.get(r, c) / max).clamp(0.0, 1.0);
                // Blue (cool, similar) through white to red (warm, distant).
                let (red, green, blue) = if t < 0.5 {
                    let u = t * 2.0;
                    (
                        (59.0 + (242.0 - 59.0) * u) as u8,
                        (76.0 + (242.0 - 76.0) * u) as u8,
                        (192.0 + (242.0 - 192.0) * u) as u8,
                    )
                } else {
                    let u = (t - 0.5) * 2.0;
                    (
                        (242.0 + (180.0 - 242.0) * u) as u8,
                        (242.0 + (4.0 - 242.0) * u) as u8,
                        (242.0 + (38.0 - 242.0) * u) as u8,
                    )
                };
                writeln!(
                    w,
                    r##"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="#{red:02x}{green:02x}{blue:02x}"/>"##,
                    c * cell,
                    r * cell,
                )?;
            }
        }
        writeln!(w, "</svg>")?;
        Ok(())
    }

    pub fn write_svg_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut buf = Vec::new();
        self.write_svg_heatmap(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ShapeDto {
    topology: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
    points: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    region_tags: Option<Vec<String>>,
}

impl ShapeDto {
    fn from_shape(shape: &Shape) -> ShapeDto {
        let (topology, rows, cols) = match shape.topology() {
            Topology::Chain => ("chain".to_string(), None, None),
            Topology::Loop => ("loop".to_string(), None, None),
            Topology::Grid { rows, cols } => ("grid".to_string(), Some(rows), Some(cols)),
        };
        ShapeDto {
            topology,
            rows,
            cols,
            points: (0..shape.len()).map(|i| shape.point(i).to_vec()).collect(),
            region_tags: shape.region_tags().map(|t| t.to_vec()),
        }
    }

    fn into_shape(self) -> Result<Shape> {
        let topology = match self.topology.as_str() {
            "chain" => Topology::Chain,
            "loop" => Topology::Loop,
            "grid" => {
                let (Some(rows), Some(cols)) = (self.rows, self.cols) else {
                    return Err(Error::InvalidShape(
                        "grid topology requires rows and cols".into(),
                    ));
                };
                Topology::Grid { rows, cols }
            }
            other => {
                return Err(Error::InvalidShape(format!(
                    "unknown topology {other:?} (expected chain, loop, or grid)"
                )))
            }
        };
        let dim = match self.points.first().map(|p| p.len()) {
            Some(d @ (2 | 3)) => d,
            Some(d) => {
                return Err(Error::InvalidShape(format!("points must be 2D or 3D, got {d}D")))
            }
            None => return Err(Error::InvalidShape("no points".into())),
        };
        if self.points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidShape("mixed point dimensions".into()));
        }
        Shape::new(
            self.points.into_iter().flatten().collect(),
            dim,
            topology,
            self.region_tags,
        )
    }
}

pub fn shape_to_json(shape: &Shape) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ShapeDto::from_shape(shape))?)
}

pub fn shape_from_json(json: &str) -> Result<Shape> {
    serde_json::from_str::<ShapeDto>(json)?.into_shape()
}

pub fn write_shape<P: AsRef<Path>>(shape: &Shape, path: P) -> Result<()> {
    std::fs::write(path, shape_to_json(shape)?)?;
    Ok(())
}

pub fn read_shape<P: AsRef<Path>>(path: P) -> Result<Shape> {
    shape_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct SequenceDto {
    id: String,
    frames: Vec<ShapeDto>,
    frame_times: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    action_label: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    motion_labels: Vec<String>,
}

pub fn sequence_to_json(seq: &MotionSequence) -> Result<String> {
    let dto = SequenceDto {
        id: seq.id.clone(),
        frames: seq.frames.iter().map(ShapeDto::from_shape).collect(),
        frame_times: seq.frame_times.clone(),
        action_label: seq.action_label.clone(),
        motion_labels: seq.motion_labels.clone(),
    };
    Ok(serde_json::to_string_pretty(&dto)?)
}

pub fn sequence_from_json(json: &str) -> Result<MotionSequence> {
    let dto: SequenceDto = serde_json::from_str(json)?;
    let frames = dto
        .frames
        .into_iter()
        .map(ShapeDto::into_shape)
        .collect::<Result<Vec<_>>>()?;
    MotionSequence::new(dto.id, frames, dto.frame_times, dto.action_label, dto.motion_labels)
}

pub fn write_sequence<P: AsRef<Path>>(seq: &MotionSequence, path: P) -> Result<()> {
    std::fs::write(path, sequence_to_json(seq)?)?;
    Ok(())
}

pub fn read_sequence<P: AsRef<Path>>(path: P) -> Result<MotionSequence> {
    sequence_from_json(&std::fs::read_to_string(path)?)
}

/// One entry of a library manifest: where the sequence file lives and its
/// labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
    pub action_label: String,
    pub motion_labels: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LibraryManifest {
    pub entries: Vec<ManifestEntry>,
}

impl LibraryManifest {
    pub fn write<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read<P: AsRef<Path>>(path: P) -> Result<LibraryManifest> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Load every referenced sequence, resolving relative paths against the
    /// manifest's directory.
    pub fn load_sequences<P: AsRef<Path>>(&self, manifest_path: P) -> Result<Vec<MotionSequence>> {
        let base = manifest_path
            .as_ref()
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        self.entries
            .iter()
            .map(|e| {
                let p = Path::new(&e.path);
                let full = if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
                let mut seq = read_sequence(full)?;
                seq.action_label = Some(e.action_label.clone());
                seq.motion_labels = e.motion_labels.clone();
                Ok(seq)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::circle;

    #[test]
    fn shape_json_round_trip() {
        let s = circle(2.0, [1.0, -1.0], 16);
        let json = shape_to_json(&s).unwrap();
        let back = shape_from_json(&json).unwrap();
        assert_eq!(s, back);
        assert!(json.contains("\"topology\": \"loop\""));
    }

    #[test]
    fn grid_json_round_trip() {
        let pts: Vec<[f64; 3]> = (0..6)
            .map(|i| [(i % 3) as f64, (i / 3) as f64, 0.1 * i as f64])
            .collect();
        let s = Shape::from_points_3d(&pts, Topology::Grid { rows: 2, cols: 3 }).unwrap();
        let back = shape_from_json(&shape_to_json(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn rejects_unknown_topology() {
        let err = shape_from_json(r#"{"topology":"torus","points":[[0,0],[1,0],[0,1]]}"#);
        assert!(err.is_err());
    }

    #[test]
    fn matrix_csv_is_labeled() {
        let mut m = Matrix::zeros(2, 2);
        m.set(0, 1, 1.5);
        m.row_labels = vec!["a".into(), "b".into()];
        m.col_labels = vec!["a".into(), "b".into()];
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "id,a,b\na,0,1.5\nb,0,0\n");
    }

    #[test]
    fn svg_heatmap_smoke() {
        let mut m = Matrix::zeros(3, 3);
        m.set(0, 2, 2.0);
        m.set(2, 0, 2.0);
        let mut buf = Vec::new();
        m.write_svg_heatmap(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("<svg"));
        assert_eq!(text.matches("<rect").count(), 9);
    }
}
