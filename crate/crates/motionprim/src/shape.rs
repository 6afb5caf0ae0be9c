//! Discrete immersed shapes: ordered point samplings of curves and grid
//! surfaces in 2- or 3-space, with optional per-point region tags.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling topology of a shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    /// Open polyline with `n - 1` edges.
    Chain,
    /// Closed polyline with `n` edges.
    Loop,
    /// Rectangular grid surface patch with `(rows-1)*(cols-1)` cells,
    /// stored row-major.
    Grid { rows: usize, cols: usize },
}

impl Topology {
    /// Two topologies are compatible for correspondence when they are the
    /// same class; grids additionally require matching dimensions.
    pub fn same_class(&self, other: &Topology) -> bool {
        matches!(
            (self, other),
            (Topology::Chain, Topology::Chain)
                | (Topology::Loop, Topology::Loop)
                | (Topology::Grid { .. }, Topology::Grid { .. })
        )
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, Topology::Grid { .. })
    }
}

/// An ordered point sampling of an immersed shape.
///
/// Points are stored flat (`n * dim` coordinates, point-major). `dim` is 2
/// or 3. Adjacent sample points must be distinct so that every edge of the
/// sampling has positive length.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    points: Vec<f64>,
    dim: usize,
    topology: Topology,
    region_tags: Option<Vec<String>>,
}

impl Shape {
    pub fn new(
        points: Vec<f64>,
        dim: usize,
        topology: Topology,
        region_tags: Option<Vec<String>>,
    ) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidShape(format!("dim must be 2 or 3, got {dim}")));
        }
        if points.len() % dim != 0 {
            return Err(Error::InvalidShape(format!(
                "coordinate count {} is not a multiple of dim {dim}",
                points.len()
            )));
        }
        let n = points.len() / dim;
        if n < 3 {
            return Err(Error::InvalidShape(format!("need at least 3 points, got {n}")));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidShape("non-finite coordinate".into()));
        }
        if let Topology::Grid { rows, cols } = topology {
            if rows < 2 || cols < 2 {
                return Err(Error::InvalidShape(format!(
                    "grid dimensions must be at least 2x2, got {rows}x{cols}"
                )));
            }
            if rows * cols != n {
                return Err(Error::InvalidShape(format!(
                    "grid {rows}x{cols} does not match {n} points"
                )));
            }
        }
        if let Some(tags) = &region_tags {
            if tags.len() != n {
                return Err(Error::InvalidShape(format!(
                    "{} region tags for {n} points",
                    tags.len()
                )));
            }
        }
        let shape = Shape { points, dim, topology, region_tags };
        shape.check_adjacent_distinct()?;
        Ok(shape)
    }

    /// Convenience constructor from 2D points.
    pub fn from_points_2d(points: &[[f64; 2]], topology: Topology) -> Result<Self> {
        let flat = points.iter().flat_map(|p| p.iter().copied()).collect();
        Shape::new(flat, 2, topology, None)
    }

    /// Convenience constructor from 3D points.
    pub fn from_points_3d(points: &[[f64; 3]], topology: Topology) -> Result<Self> {
        let flat = points.iter().flat_map(|p| p.iter().copied()).collect();
        Shape::new(flat, 3, topology, None)
    }

    fn check_adjacent_distinct(&self) -> Result<()> {
        let n = self.len();
        let check = |i: usize, j: usize| -> Result<()> {
            let (p, q) = (self.point(i), self.point(j));
            if p.iter().zip(q).all(|(a, b)| a == b) {
                return Err(Error::InvalidShape(format!(
                    "adjacent sample points {i} and {j} coincide"
                )));
            }
            Ok(())
        };
        match self.topology {
            Topology::Chain => {
                for i in 0..n - 1 {
                    check(i, i + 1)?;
                }
            }
            Topology::Loop => {
                for i in 0..n {
                    check(i, (i + 1) % n)?;
                }
            }
            Topology::Grid { rows, cols } => {
                for r in 0..rows {
                    for c in 0..cols {
                        if c + 1 < cols {
                            check(r * cols + c, r * cols + c + 1)?;
                        }
                        if r + 1 < rows {
                            check(r * cols + c, (r + 1) * cols + c)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Flat point-major coordinate storage.
    pub fn coords(&self) -> &[f64] {
        &self.points
    }

    pub fn region_tags(&self) -> Option<&[String]> {
        self.region_tags.as_deref()
    }

    /// Same point count, dimension, and topology (grids must match exactly).
    pub fn layout_matches(&self, other: &Shape) -> bool {
        self.len() == other.len() && self.dim == other.dim && self.topology == other.topology
    }

    /// Replace the coordinates, keeping topology and tags. The new
    /// coordinates must have the same cardinality.
    pub fn with_coords(&self, coords: Vec<f64>) -> Result<Shape> {
        if coords.len() != self.points.len() {
            return Err(Error::CardinalityMismatch(format!(
                "{} coordinates for a shape with {}",
                coords.len(),
                self.points.len()
            )));
        }
        Shape::new(coords, self.dim, self.topology, self.region_tags.clone())
    }
}

/// The translation and scale applied by
/// [`centroid_and_scale_normalize`]; invertible exactly.
///
/// Forward map: `p' = (p + translation) * scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub translation: Vec<f64>,
    pub scale: f64,
}

impl TransformRecord {
    pub fn apply(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .zip(&self.translation)
            .map(|(p, t)| (p + t) * self.scale)
            .collect()
    }

    pub fn invert(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .zip(&self.translation)
            .map(|(p, t)| p / self.scale - t)
            .collect()
    }
}

/// Translate the volume-weighted centroid to the origin and rescale so the
/// total volume (curve length, or surface area) is 1.
///
/// Returns the normalized shape together with the exact transform applied.
pub fn centroid_and_scale_normalize(shape: &Shape) -> Result<(Shape, TransformRecord)> {
    let geom = crate::geometry::compute_geometry(shape)?;
    let dim = shape.dim();
    let elements = crate::geometry::Elements::of(shape.topology(), shape.len());

    // Volume-weighted centroid: element volume times element centroid.
    let mut centroid = vec![0.0; dim];
    for (e, corners) in elements.iter() {
        let vol = geom.edge_or_cell_volumes[e];
        let cc = corners.len() as f64;
        for d in 0..dim {
            let avg: f64 = corners.iter().map(|&i| shape.point(i)[d]).sum::<f64>() / cc;
            centroid[d] += vol * avg;
        }
    }
    for c in centroid.iter_mut() {
        *c /= geom.total_volume;
    }

    // Curves scale linearly with length; grid areas scale quadratically.
    let scale = if shape.topology().is_grid() {
        1.0 / geom.total_volume.sqrt()
    } else {
        1.0 / geom.total_volume
    };
    let translation: Vec<f64> = centroid.iter().map(|c| -c).collect();
    let record = TransformRecord { translation, scale };

    let mut coords = Vec::with_capacity(shape.coords().len());
    for i in 0..shape.len() {
        coords.extend(record.apply(shape.point(i)));
    }
    Ok((shape.with_coords(coords)?, record))
}

/// Resample a chain or loop to `n_new` points uniformly spaced by arc length.
///
/// Region tags are carried over by nearest-arc-length assignment. Grids are
/// not resampled.
pub fn resample(shape: &Shape, n_new: usize) -> Result<Shape> {
    if shape.topology().is_grid() {
        return Err(Error::UnsupportedTopology("cannot resample a grid".into()));
    }
    if n_new < 3 {
        return Err(Error::InvalidShape(format!("resample target {n_new} < 3")));
    }
    let n = shape.len();
    let dim = shape.dim();
    let closed = shape.topology() == Topology::Loop;
    let seg_count = if closed { n } else { n - 1 };

    // Cumulative arc length at each original vertex.
    let mut cum = Vec::with_capacity(seg_count + 1);
    cum.push(0.0);
    for s in 0..seg_count {
        let (i, j) = (s, (s + 1) % n);
        let len: f64 = (0..dim)
            .map(|d| (shape.point(j)[d] - shape.point(i)[d]).powi(2))
            .sum::<f64>()
            .sqrt();
        cum.push(cum[s] + len);
    }
    let total = *cum.last().unwrap();

    let positions: Vec<f64> = if closed {
        (0..n_new).map(|k| k as f64 * total / n_new as f64).collect()
    } else {
        (0..n_new)
            .map(|k| k as f64 * total / (n_new - 1) as f64)
            .collect()
    };

    let mut coords = Vec::with_capacity(n_new * dim);
    let mut seg = 0usize;
    for &s in &positions {
        while seg + 1 < seg_count && cum[seg + 1] < s {
            seg += 1;
        }
        let seg_len = cum[seg + 1] - cum[seg];
        let t = if seg_len > 0.0 { (s - cum[seg]) / seg_len } else { 0.0 };
        let t = t.clamp(0.0, 1.0);
        let (i, j) = (seg, (seg + 1) % n);
        for d in 0..dim {
            coords.push(shape.point(i)[d] * (1.0 - t) + shape.point(j)[d] * t);
        }
    }

    let tags = shape.region_tags().map(|tags| {
        // Nearest original vertex in arc-length position.
        positions
            .iter()
            .map(|&s| {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for (k, &ck) in cum.iter().take(n).enumerate() {
                    let d = if closed {
                        let raw = (s - ck).abs();
                        raw.min(total - raw)
                    } else {
                        (s - ck).abs()
                    };
                    if d < best_d {
                        best_d = d;
                        best = k;
                    }
                }
                tags[best].clone()
            })
            .collect()
    });

    Shape::new(coords, dim, shape.topology(), tags)
}

/// Regularly sampled circle, used widely in tests and examples.
pub fn circle(radius: f64, center: [f64; 2], n: usize) -> Shape {
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
        })
        .collect();
    Shape::from_points_2d(&pts, Topology::Loop).expect("circle is a valid loop")
}

/// Regularly sampled axis-aligned ellipse.
pub fn ellipse(a: f64, b: f64, n: usize) -> Shape {
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            [a * t.cos(), b * t.sin()]
        })
        .collect();
    Shape::from_points_2d(&pts, Topology::Loop).expect("ellipse is a valid loop")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_too_few_points() {
        let err = Shape::from_points_2d(&[[0.0, 0.0], [1.0, 0.0]], Topology::Chain);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_coincident_adjacent_points() {
        let err = Shape::from_points_2d(
            &[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
            Topology::Chain,
        );
        assert!(matches!(err, Err(Error::InvalidShape(_))));
    }

    #[test]
    fn rejects_bad_grid_dims() {
        let pts: Vec<[f64; 2]> = (0..6).map(|i| [i as f64, (i % 2) as f64]).collect();
        assert!(Shape::from_points_2d(&pts, Topology::Grid { rows: 2, cols: 2 }).is_err());
    }

    #[test]
    fn rejects_loop_with_coincident_wrap() {
        // Last point equals first: the closing edge is degenerate.
        let err = Shape::from_points_2d(
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 0.0]],
            Topology::Loop,
        );
        assert!(err.is_err());
    }

    #[test]
    fn normalize_circle_closed_form() {
        // Circle radius 5 at (3,3): translate -(3,3), scale 1/(10*pi).
        let s = circle(5.0, [3.0, 3.0], 128);
        let (norm, rec) = centroid_and_scale_normalize(&s).unwrap();
        assert!((rec.translation[0] + 3.0).abs() < 1e-9);
        assert!((rec.translation[1] + 3.0).abs() < 1e-9);
        // Discrete perimeter of the inscribed 128-gon, not 10*pi exactly.
        let perimeter = crate::geometry::compute_geometry(&s).unwrap().total_volume;
        assert!((rec.scale - 1.0 / perimeter).abs() < 1e-12);
        assert!((perimeter - 10.0 * std::f64::consts::PI).abs() / (10.0 * std::f64::consts::PI) < 1e-3);
        let g = crate::geometry::compute_geometry(&norm).unwrap();
        assert!((g.total_volume - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent() {
        let s = ellipse(2.0, 1.0, 64);
        let (n1, _) = centroid_and_scale_normalize(&s).unwrap();
        let (n2, rec) = centroid_and_scale_normalize(&n1).unwrap();
        for (a, b) in n1.coords().iter().zip(n2.coords()) {
            assert!((a - b).abs() <= 1e-12);
        }
        assert!((rec.scale - 1.0).abs() < 1e-9);
        assert!(rec.translation.iter().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn normalize_roundtrip_recovers_input() {
        // Random-ish 50-point chain.
        let pts: Vec<[f64; 2]> = (0..50)
            .map(|i| {
                let x = i as f64 * 0.13;
                [x + (x * 7.7).sin() * 0.4 + 2.0, (x * 3.1).cos() * 1.3 - 5.0]
            })
            .collect();
        let s = Shape::from_points_2d(&pts, Topology::Chain).unwrap();
        let (norm, rec) = centroid_and_scale_normalize(&s).unwrap();
        for i in 0..s.len() {
            let back = rec.invert(norm.point(i));
            for d in 0..2 {
                assert!((back[d] - s.point(i)[d]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalized_grid_has_unit_area() {
        let mut pts = Vec::new();
        for r in 0..4 {
            for c in 0..5 {
                pts.push([c as f64 * 2.0 + 1.0, r as f64 * 3.0 - 2.0, 0.5]);
            }
        }
        let s = Shape::from_points_3d(&pts, Topology::Grid { rows: 4, cols: 5 }).unwrap();
        let (norm, _) = centroid_and_scale_normalize(&s).unwrap();
        let g = crate::geometry::compute_geometry(&norm).unwrap();
        assert!((g.total_volume - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resample_circle_preserves_volume() {
        let s = circle(1.0, [0.0, 0.0], 64);
        let r = resample(&s, 32).unwrap();
        let v0 = crate::geometry::compute_geometry(&s).unwrap().total_volume;
        let v1 = crate::geometry::compute_geometry(&r).unwrap().total_volume;
        assert!((v1 - v0).abs() / v0 <= 0.005);
        assert_eq!(r.len(), 32);
    }

    #[test]
    fn resample_uniform_is_idempotent() {
        let s = circle(1.0, [0.0, 0.0], 48);
        let r = resample(&s, 48).unwrap();
        for (a, b) in s.coords().iter().zip(r.coords()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn resample_triangle_gaps_uniform() {
        // 3-4-5 right triangle as an open chain, non-uniformly sampled.
        let s = Shape::from_points_2d(
            &[[0.0, 0.0], [3.0, 0.0], [3.0, 4.0]],
            Topology::Chain,
        )
        .unwrap();
        let r = resample(&s, 12).unwrap();
        // Arc-length oracle: total length 3 + 4 = 7, so point k sits at arc
        // position 7k/11 -- on the first leg (s, 0) while s <= 3, then at
        // (3, s - 3) up the second leg.
        for (k, expect_s) in (0..12).map(|k| (k, 7.0 * k as f64 / 11.0)) {
            let expect = if expect_s <= 3.0 {
                [expect_s, 0.0]
            } else {
                [3.0, expect_s - 3.0]
            };
            for d in 0..2 {
                assert!(
                    (r.point(k)[d] - expect[d]).abs() < 1e-9,
                    "point {k}: {:?} vs {expect:?}",
                    r.point(k)
                );
            }
        }
    }

    #[test]
    fn resample_rejects_grid() {
        let pts: Vec<[f64; 2]> = (0..4)
            .flat_map(|r| (0..3).map(move |c| [c as f64, r as f64]))
            .collect();
        let s = Shape::from_points_2d(&pts, Topology::Grid { rows: 4, cols: 3 }).unwrap();
        assert!(matches!(
            resample(&s, 10),
            Err(Error::UnsupportedTopology(_))
        ));
    }

    #[test]
    fn resample_carries_tags_proportionally() {
        let pts: Vec<[f64; 2]> = (0..20).map(|i| [i as f64, 0.0]).collect();
        let tags: Vec<String> = (0..20)
            .map(|i| if i < 10 { "hand".into() } else { "foot".into() })
            .collect();
        let s = Shape::new(
            pts.iter().flatten().copied().collect(),
            2,
            Topology::Chain,
            Some(tags),
        )
        .unwrap();
        let r = resample(&s, 40).unwrap();
        let tags = r.region_tags().unwrap();
        let hands = tags.iter().filter(|t| *t == "hand").count();
        // Half the arc length is tagged "hand"; proportion preserved loosely.
        assert!((hands as f64 / 40.0 - 0.5).abs() < 0.1);
    }
}
