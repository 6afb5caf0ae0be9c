//! Quotienting similitudes and sampling reparameterizations before metric
//! evaluation: centroid/scale normalization, optimal rotation by Procrustes
//! (Kabsch), and a discrete reparameterization search over cyclic shifts and
//! orientation flips for loops.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::{centroid_and_scale_normalize, resample, Shape, Topology};

/// A discrete reparameterization of the sampling.
///
/// Loops admit cyclic shifts and orientation flips (a flipped match generally
/// needs a shift as well, so the flip variant carries one); chains and grids
/// only the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reparameterization {
    Identity,
    CyclicShift(usize),
    OrientationFlip { shift: usize },
}

impl Reparameterization {
    /// Apply to a shape: `CyclicShift(k)` maps sample `i` to the input's
    /// sample `(i - k) mod n`, so a shape whose start index leads by `k` is
    /// brought back into register by `CyclicShift(k)`.
    pub fn apply(&self, shape: &Shape) -> Result<Shape> {
        let n = shape.len();
        let dim = shape.dim();
        let index = |i: usize| -> usize {
            match *self {
                Reparameterization::Identity => i,
                Reparameterization::CyclicShift(k) => (i + n - k % n) % n,
                Reparameterization::OrientationFlip { shift } => {
                    let j = (i + n - shift % n) % n;
                    n - 1 - j
                }
            }
        };
        let mut coords = Vec::with_capacity(n * dim);
        for i in 0..n {
            coords.extend_from_slice(shape.point(index(i)));
        }
        let tags = shape
            .region_tags()
            .map(|tags| (0..n).map(|i| tags[index(i)].clone()).collect());
        Shape::new(coords, dim, shape.topology(), tags)
    }
}

/// An orthogonal rotation matrix (determinant +1), stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    dim: usize,
    data: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Rotation {
        let mut data = vec![0.0; dim * dim];
        for d in 0..dim {
            data[d * dim + d] = 1.0;
        }
        Rotation { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.dim + c]
    }

    pub fn determinant(&self) -> f64 {
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        m.determinant()
    }

    /// In-plane rotation angle; meaningful for dim 2.
    pub fn angle_2d(&self) -> f64 {
        self.entry(1, 0).atan2(self.entry(0, 0))
    }

    pub fn apply_point(&self, p: &[f64], out: &mut [f64]) {
        for r in 0..self.dim {
            let mut s = 0.0;
            for c in 0..self.dim {
                s += self.entry(r, c) * p[c];
            }
            out[r] = s;
        }
    }

    pub fn apply_shape(&self, shape: &Shape) -> Result<Shape> {
        let dim = shape.dim();
        let mut coords = vec![0.0; shape.coords().len()];
        for i in 0..shape.len() {
            self.apply_point(shape.point(i), &mut coords[i * dim..(i + 1) * dim]);
        }
        shape.with_coords(coords)
    }
}

/// The outcome of [`align`]: both shapes normalized, `shape_b` additionally
/// reparameterized and rotated onto `shape_a`.
#[derive(Debug, Clone)]
pub struct CorrespondenceResult {
    pub shape_a: Shape,
    pub shape_b: Shape,
    pub rotation: Rotation,
    pub reparam: Reparameterization,
    /// Mean pointwise distance after alignment.
    pub residual: f64,
}

/// Options for [`align_with`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlignOptions {
    /// Normalize total volume to 1 before rotation search. Disable to keep
    /// scale-sensitive features.
    pub normalize_scale: bool,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions { normalize_scale: true }
    }
}

/// The rotation (orthogonal, determinant +1) minimizing the summed squared
/// pointwise distance from `rotation * b_i` to `a_i`.
///
/// Both shapes must have equal cardinality and topology and be
/// centroid-normalized; reflections are excluded.
pub fn kabsch_rotation(a: &Shape, b: &Shape) -> Result<Rotation> {
    if !a.layout_matches(b) {
        return Err(Error::IncompatibleShapes(format!(
            "kabsch needs matching layouts: {} vs {} points, {:?} vs {:?}",
            a.len(),
            b.len(),
            a.topology(),
            b.topology()
        )));
    }
    Ok(kabsch_raw(a.coords(), b.coords(), a.dim()))
}

fn kabsch_raw(a: &[f64], b: &[f64], dim: usize) -> Rotation {
    // Cross-covariance H = sum_i b_i a_i^T; maximize tr(R H).
    let n = a.len() / dim;
    let mut h: DMatrix<f64> = DMatrix::zeros(dim, dim);
    for i in 0..n {
        for r in 0..dim {
            for c in 0..dim {
                h[(r, c)] += b[i * dim + r] * a[i * dim + c];
            }
        }
    }
    let svd = h.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let v = v_t.transpose();
    let vu: DMatrix<f64> = &v * u.transpose();
    let det = vu.determinant();
    let mut d = DMatrix::identity(dim, dim);
    d[(dim - 1, dim - 1)] = if det < 0.0 { -1.0 } else { 1.0 };
    let r: DMatrix<f64> = v * d * u.transpose();
    Rotation {
        dim,
        data: r.transpose().as_slice().to_vec(), // nalgebra stores column-major
    }
}

fn mean_pointwise_distance(a: &[f64], b: &[f64], dim: usize) -> f64 {
    let n = a.len() / dim;
    let mut total = 0.0;
    for i in 0..n {
        let mut s = 0.0;
        for d in 0..dim {
            let diff = a[i * dim + d] - b[i * dim + d];
            s += diff * diff;
        }
        total += s.sqrt();
    }
    total / n as f64
}

fn rotate_coords(rot: &Rotation, coords: &[f64], dim: usize, out: &mut Vec<f64>) {
    out.clear();
    out.resize(coords.len(), 0.0);
    for i in 0..coords.len() / dim {
        rot.apply_point(&coords[i * dim..(i + 1) * dim], &mut out[i * dim..(i + 1) * dim]);
    }
}

/// Full correspondence pipeline with default options.
pub fn align(a: &Shape, b: &Shape) -> Result<CorrespondenceResult> {
    align_with(a, b, &AlignOptions::default())
}

/// Normalize both shapes, then search the discrete reparameterization group
/// (all cyclic shifts times flip/no-flip for loops; identity for chains and
/// grids), solving for the optimal rotation per candidate, and keep the
/// lowest mean-residual alignment. Ties break toward no-flip, then the
/// lowest shift index.
pub fn align_with(a: &Shape, b: &Shape, opts: &AlignOptions) -> Result<CorrespondenceResult> {
    if !a.topology().same_class(&b.topology()) {
        return Err(Error::IncompatibleShapes(format!(
            "topology mismatch: {:?} vs {:?}",
            a.topology(),
            b.topology()
        )));
    }
    if a.dim() != b.dim() {
        return Err(Error::IncompatibleShapes(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    match a.topology() {
        Topology::Grid { .. } => {
            if a.topology() != b.topology() {
                return Err(Error::IncompatibleShapes(
                    "grids must have identical dimensions".into(),
                ));
            }
        }
        _ => {
            if a.len() != b.len() {
                let n = a.len().max(b.len());
                a = resample(&a, n)?;
                b = resample(&b, n)?;
            }
        }
    }

    let (a_norm, _) = normalize_for_align(&a, opts)?;
    let (b_norm, _) = normalize_for_align(&b, opts)?;

    let candidates: Vec<Reparameterization> = match a.topology() {
        Topology::Loop => {
            let n = a.len();
            let mut c = Vec::with_capacity(2 * n);
            c.extend((0..n).map(Reparameterization::CyclicShift));
            c.extend((0..n).map(|k| Reparameterization::OrientationFlip { shift: k }));
            c
        }
        _ => vec![Reparameterization::Identity],
    };

    let dim = a.dim();
    let mut best: Option<(f64, Reparameterization, Rotation, Shape)> = None;
    let mut rotated = Vec::new();
    for cand in candidates {
        let b_re = cand.apply(&b_norm)?;
        let rot = kabsch_raw(a_norm.coords(), b_re.coords(), dim);
        rotate_coords(&rot, b_re.coords(), dim, &mut rotated);
        let residual = mean_pointwise_distance(a_norm.coords(), &rotated, dim);
        if best.as_ref().is_none_or(|(r, ..)| residual < *r) {
            let aligned = b_re.with_coords(rotated.clone())?;
            best = Some((residual, cand, rot, aligned));
        }
    }
    let (residual, reparam, rotation, shape_b) = best.expect("at least one candidate");
    let reparam = match reparam {
        Reparameterization::CyclicShift(0) => Reparameterization::Identity,
        other => other,
    };
    Ok(CorrespondenceResult { shape_a: a_norm, shape_b, rotation, reparam, residual })
}

fn normalize_for_align(shape: &Shape, opts: &AlignOptions) -> Result<(Shape, f64)> {
    let (normalized, record) = centroid_and_scale_normalize(shape)?;
    if opts.normalize_scale {
        Ok((normalized, record.scale))
    } else {
        // Re-apply the original scale around the origin.
        let coords = normalized.coords().iter().map(|x| x / record.scale).collect();
        Ok((normalized.with_coords(coords)?, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{circle, ellipse};

    fn rotate_shape_2d(s: &Shape, angle: f64) -> Shape {
        let (c, sn) = (angle.cos(), angle.sin());
        let coords: Vec<f64> = s
            .coords()
            .chunks(2)
            .flat_map(|p| [c * p[0] - sn * p[1], sn * p[0] + c * p[1]])
            .collect();
        s.with_coords(coords).unwrap()
    }

    #[test]
    fn kabsch_recovers_exact_rotation() {
        let a = {
            let (s, _) = centroid_and_scale_normalize(&ellipse(2.0, 1.0, 32)).unwrap();
            s
        };
        let angle = 37f64.to_radians();
        let b = rotate_shape_2d(&a, -angle); // rotating b by +angle recovers a
        let rot = kabsch_rotation(&a, &b).unwrap();
        assert!((rot.angle_2d() - angle).abs() < 1e-9);
        assert!((rot.determinant() - 1.0).abs() < 1e-9);
        let back = rot.apply_shape(&b).unwrap();
        assert!(mean_pointwise_distance(a.coords(), back.coords(), 2) < 1e-9);
    }

    #[test]
    fn kabsch_identity_for_equal_shapes() {
        let (a, _) = centroid_and_scale_normalize(&ellipse(2.0, 1.0, 24)).unwrap();
        let rot = kabsch_rotation(&a, &a).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((rot.entry(r, c) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kabsch_rejects_mismatched_layout() {
        let a = circle(1.0, [0.0, 0.0], 16);
        let b = circle(1.0, [0.0, 0.0], 24);
        assert!(matches!(
            kabsch_rotation(&a, &b),
            Err(Error::IncompatibleShapes(_))
        ));
    }

    #[test]
    fn kabsch_with_noise_matches_grid_search() {
        // b = a rotated 90 degrees plus per-point noise; compare the SVD
        // answer against a brute-force search over rotation angles.
        let (a, _) = centroid_and_scale_normalize(&ellipse(2.0, 1.0, 48)).unwrap();
        let sigma = 0.01;
        let angle = std::f64::consts::FRAC_PI_2;
        let mut state = 0x243f6a8885a308d3u64;
        let mut gauss = || {
            // Box-Muller on a simple xorshift stream; test-only noise.
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let u1 = (state >> 11) as f64 / (1u64 << 53) as f64;
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let u2 = (state >> 11) as f64 / (1u64 << 53) as f64;
            (-2.0 * u1.max(1e-12).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let noisy: Vec<f64> = rotate_shape_2d(&a, -angle)
            .coords()
            .iter()
            .map(|x| x + sigma * gauss())
            .collect();
        let b = a.with_coords(noisy).unwrap();

        let rot = kabsch_rotation(&a, &b).unwrap();
        assert!((rot.angle_2d() - angle).abs().to_degrees() < 0.5);

        // Brute-force 0.01-degree grid around the circle.
        let mut best = (f64::INFINITY, 0.0);
        let mut step: f64 = 0.0;
        while step < 360.0 {
            let th = step.to_radians();
            let cand = rotate_shape_2d(&b, th);
            let mut ss = 0.0;
            for (x, y) in cand.coords().iter().zip(a.coords()) {
                ss += (x - y) * (x - y);
            }
            if ss < best.0 {
                best = (ss, th);
            }
            step += 0.01;
        }
        assert!((best.1 - rot.angle_2d()).abs().to_degrees() < 0.02);

        let aligned = rot.apply_shape(&b).unwrap();
        let residual = mean_pointwise_distance(a.coords(), aligned.coords(), 2);
        assert!(residual <= 3.0 * sigma, "residual {residual}");
    }

    fn bumpy_loop(n: usize) -> Shape {
        // No rotational symmetry, so shift recovery is unique.
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                let r = 1.0 + 0.25 * t.cos() + 0.1 * (3.0 * t).sin();
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        Shape::from_points_2d(&pts, Topology::Loop).unwrap()
    }

    #[test]
    fn align_recovers_cyclic_shift() {
        let a = bumpy_loop(64);
        let shifted = Reparameterization::CyclicShift(64 - 17).apply(&a).unwrap();
        // `shifted` starts 17 samples ahead of `a`.
        let res = align(&a, &shifted).unwrap();
        assert_eq!(res.reparam, Reparameterization::CyclicShift(17));
        assert!(res.residual <= 1e-9, "residual {}", res.residual);
    }

    #[test]
    fn align_quotients_full_similitude() {
        let a = ellipse(2.0, 1.0, 48);
        let mut b = rotate_shape_2d(&a, 1.1);
        let coords: Vec<f64> = b
            .coords()
            .chunks(2)
            .flat_map(|p| [3.0 * p[0] + 5.0, 3.0 * p[1] - 2.0])
            .collect();
        b = b.with_coords(coords).unwrap();
        let res = align(&a, &b).unwrap();
        assert!(res.residual <= 1e-9, "residual {}", res.residual);
        assert!((res.rotation.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn align_residual_is_symmetric() {
        let a = ellipse(2.0, 1.0, 32);
        let b = circle(1.0, [0.0, 0.0], 32);
        let ab = align(&a, &b).unwrap().residual;
        let ba = align(&b, &a).unwrap().residual;
        assert!((ab - ba).abs() < 1e-9, "{ab} vs {ba}");
    }

    #[test]
    fn align_matches_exhaustive_search() {
        // Independent re-implementation of the shift/flip search.
        let a = circle(1.0, [0.0, 0.0], 64);
        let b = ellipse(2.0, 1.0, 64);
        let res = align(&a, &b).unwrap();

        let (an, _) = centroid_and_scale_normalize(&a).unwrap();
        let (bn, _) = centroid_and_scale_normalize(&b).unwrap();
        let n = 64;
        let mut best = f64::INFINITY;
        for flip in [false, true] {
            for k in 0..n {
                let mut pts = Vec::with_capacity(n * 2);
                for i in 0..n {
                    let j = (i + n - k) % n;
                    let j = if flip { n - 1 - j } else { j };
                    pts.extend_from_slice(bn.point(j));
                }
                let cand = bn.with_coords(pts).unwrap();
                let rot = kabsch_rotation(&an, &cand).unwrap();
                let rotated = rot.apply_shape(&cand).unwrap();
                let r = mean_pointwise_distance(an.coords(), rotated.coords(), 2);
                if r < best {
                    best = r;
                }
            }
        }
        assert!((res.residual - best).abs() < 1e-12, "{} vs {best}", res.residual);
    }

    #[test]
    fn align_rejects_topology_mismatch() {
        let a = circle(1.0, [0.0, 0.0], 16);
        let pts: Vec<[f64; 2]> = (0..16).map(|i| [i as f64, 0.0]).collect();
        let b = Shape::from_points_2d(&pts, Topology::Chain).unwrap();
        assert!(matches!(align(&a, &b), Err(Error::IncompatibleShapes(_))));
    }

    #[test]
    fn align_resamples_differing_counts() {
        let a = circle(1.0, [0.0, 0.0], 40);
        let b = circle(1.0, [0.0, 0.0], 64);
        let res = align(&a, &b).unwrap();
        assert_eq!(res.shape_a.len(), 64);
        assert_eq!(res.shape_b.len(), 64);
        // The resampled 40-gon and the 64-gon are different polygons of the
        // same circle; only sampling-scale residual remains.
        assert!(res.residual < 1e-2, "residual {}", res.residual);
    }
}
