//! First-order discrete geometry of a [`Shape`]: element volumes (edge
//! lengths or cell areas), tangents, and a per-point mean-curvature estimate.
//!
//! Curves use signed turning angle per arc length (unsigned in 3D); grids use
//! the magnitude of the cotangent-Laplacian mean-curvature normal with
//! barycentric vertex areas. Open-chain endpoints and grid boundary vertices
//! get curvature 0.
//!
//! The numeric kernels are generic over [`Real`] so that dual numbers can be
//! pushed through them for exact derivatives.

use crate::dual::Real;
use crate::error::{Error, Result};
use crate::shape::{Shape, Topology};

/// Per-point and per-element geometric quantities of a shape.
#[derive(Debug, Clone)]
pub struct ShapeGeometry {
    /// Edge lengths (chains, loops) or cell areas (grids), all positive.
    pub edge_or_cell_volumes: Vec<f64>,
    /// Per-point first-difference vectors, flat `n * dim`.
    pub tangents: Vec<f64>,
    /// Per-point scalar mean-curvature estimate.
    pub mean_curvature: Vec<f64>,
    /// Sum of element volumes.
    pub total_volume: f64,
}

/// The element decomposition of a sampling topology: edges for curves,
/// quadrilateral cells for grids. Corner indices are stored flat.
#[derive(Debug, Clone)]
pub struct Elements {
    corners: Vec<usize>,
    corner_count: usize,
}

impl Elements {
    pub fn of(topology: Topology, n: usize) -> Elements {
        match topology {
            Topology::Chain => Elements {
                corners: (0..n - 1).flat_map(|i| [i, i + 1]).collect(),
                corner_count: 2,
            },
            Topology::Loop => Elements {
                corners: (0..n).flat_map(|i| [i, (i + 1) % n]).collect(),
                corner_count: 2,
            },
            Topology::Grid { rows, cols } => {
                let mut corners = Vec::with_capacity((rows - 1) * (cols - 1) * 4);
                for r in 0..rows - 1 {
                    for c in 0..cols - 1 {
                        let v00 = r * cols + c;
                        corners.extend([v00, v00 + 1, v00 + cols + 1, v00 + cols]);
                    }
                }
                Elements { corners, corner_count: 4 }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.corners.len() / self.corner_count
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn corner_count(&self) -> usize {
        self.corner_count
    }

    #[inline]
    pub fn corners_of(&self, e: usize) -> &[usize] {
        &self.corners[e * self.corner_count..(e + 1) * self.corner_count]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> {
        (0..self.len()).map(move |e| (e, self.corners_of(e)))
    }
}

#[inline]
pub(crate) fn diff<T: Real>(coords: &[T], dim: usize, i: usize, j: usize, out: &mut [T]) {
    for d in 0..dim {
        out[d] = coords[j * dim + d] - coords[i * dim + d];
    }
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T], dim: usize) -> T {
    let mut s = a[0] * b[0];
    for d in 1..dim {
        s = s + a[d] * b[d];
    }
    s
}

#[inline]
pub(crate) fn norm<T: Real>(a: &[T], dim: usize) -> T {
    dot(a, a, dim).sqrt()
}

/// Magnitude of the cross product; in 2D the absolute z-component.
#[inline]
fn cross_norm<T: Real>(a: &[T], b: &[T], dim: usize) -> T {
    if dim == 2 {
        (a[0] * b[1] - a[1] * b[0]).abs()
    } else {
        let x = a[1] * b[2] - a[2] * b[1];
        let y = a[2] * b[0] - a[0] * b[2];
        let z = a[0] * b[1] - a[1] * b[0];
        (x * x + y * y + z * z).sqrt()
    }
}

/// Signed (2D) or unsigned (3D) z-like cross component used for turning angles.
#[inline]
fn turning_cross<T: Real>(a: &[T], b: &[T], dim: usize) -> T {
    if dim == 2 {
        a[0] * b[1] - a[1] * b[0]
    } else {
        cross_norm(a, b, dim)
    }
}

fn triangle_area<T: Real>(coords: &[T], dim: usize, i: usize, j: usize, k: usize) -> T {
    let mut u = [T::zero(); 3];
    let mut v = [T::zero(); 3];
    diff(coords, dim, i, j, &mut u[..dim]);
    diff(coords, dim, i, k, &mut v[..dim]);
    cross_norm(&u[..dim], &v[..dim], dim) * T::lift(0.5)
}

/// Element volumes: edge lengths for curves, two-triangle cell areas for
/// grids (split along the v00-v11 diagonal, matching the Laplacian below).
pub(crate) fn element_volumes<T: Real>(
    coords: &[T],
    dim: usize,
    elements: &Elements,
    out: &mut Vec<T>,
) {
    out.clear();
    if elements.corner_count() == 2 {
        let mut e = [T::zero(); 3];
        for (_, c) in elements.iter() {
            diff(coords, dim, c[0], c[1], &mut e[..dim]);
            out.push(norm(&e[..dim], dim));
        }
    } else {
        for (_, c) in elements.iter() {
            // corners ordered v00, v01, v11, v10
            let a1 = triangle_area(coords, dim, c[0], c[1], c[2]);
            let a2 = triangle_area(coords, dim, c[0], c[2], c[3]);
            out.push(a1 + a2);
        }
    }
}

/// Turning angle between incoming and outgoing edges at an interior curve
/// point, divided by the mean of the two edge lengths.
#[inline]
pub(crate) fn curve_curvature_at<T: Real>(
    coords: &[T],
    dim: usize,
    prev: usize,
    here: usize,
    next: usize,
) -> T {
    let mut e1 = [T::zero(); 3];
    let mut e2 = [T::zero(); 3];
    diff(coords, dim, prev, here, &mut e1[..dim]);
    diff(coords, dim, here, next, &mut e2[..dim]);
    let l1 = norm(&e1[..dim], dim);
    let l2 = norm(&e2[..dim], dim);
    let theta = turning_cross(&e1[..dim], &e2[..dim], dim).atan2(dot(&e1[..dim], &e2[..dim], dim));
    theta / ((l1 + l2) * T::lift(0.5))
}

/// Per-point mean curvature. Chains get 0 at the two endpoints; grid boundary
/// vertices get 0.
pub(crate) fn point_curvatures<T: Real>(
    coords: &[T],
    dim: usize,
    topology: Topology,
    n: usize,
    out: &mut Vec<T>,
) {
    out.clear();
    out.resize(n, T::zero());
    match topology {
        Topology::Chain => {
            for i in 1..n - 1 {
                out[i] = curve_curvature_at(coords, dim, i - 1, i, i + 1);
            }
        }
        Topology::Loop => {
            for i in 0..n {
                out[i] = curve_curvature_at(coords, dim, (i + n - 1) % n, i, (i + 1) % n);
            }
        }
        Topology::Grid { rows, cols } => {
            grid_mean_curvature(coords, dim, rows, cols, out);
        }
    }
}

/// Cotangent-Laplacian mean-curvature-normal magnitude with barycentric
/// vertex areas, over the fixed two-triangle split of each cell.
fn grid_mean_curvature<T: Real>(coords: &[T], dim: usize, rows: usize, cols: usize, out: &mut [T]) {
    let n = rows * cols;
    let mut lap = vec![T::zero(); n * dim];
    let mut area = vec![T::zero(); n];
    let third = T::lift(1.0 / 3.0);
    let half = T::lift(0.5);
    let eps = T::lift(1e-12);

    let tri = |i: usize, j: usize, k: usize, lap: &mut [T], area: &mut [T]| {
        let a = triangle_area(coords, dim, i, j, k);
        area[i] = area[i] + a * third;
        area[j] = area[j] + a * third;
        area[k] = area[k] + a * third;
        // For each corner, the cotangent of its angle weights the opposite edge.
        let verts = [i, j, k];
        for c in 0..3 {
            let apex = verts[c];
            let (u, v) = (verts[(c + 1) % 3], verts[(c + 2) % 3]);
            let mut eu = [T::zero(); 3];
            let mut ev = [T::zero(); 3];
            diff(coords, dim, apex, u, &mut eu[..dim]);
            diff(coords, dim, apex, v, &mut ev[..dim]);
            let cross = cross_norm(&eu[..dim], &ev[..dim], dim);
            if cross.value() <= eps.value() {
                continue;
            }
            let cot = dot(&eu[..dim], &ev[..dim], dim) / cross;
            let w = cot * half;
            for d in 0..dim {
                let duv = coords[v * dim + d] - coords[u * dim + d];
                lap[u * dim + d] = lap[u * dim + d] + w * duv;
                lap[v * dim + d] = lap[v * dim + d] - w * duv;
            }
        }
    };

    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let v00 = r * cols + c;
            let (v01, v11, v10) = (v00 + 1, v00 + cols + 1, v00 + cols);
            tri(v00, v01, v11, &mut lap, &mut area);
            tri(v00, v11, v10, &mut lap, &mut area);
        }
    }

    for r in 1..rows - 1 {
        for c in 1..cols - 1 {
            let i = r * cols + c;
            let l = norm(&lap[i * dim..(i + 1) * dim], dim);
            let a = area[i];
            if a.value() > eps.value() {
                out[i] = l / (a * T::lift(2.0));
            }
        }
    }
}

fn tangents(shape: &Shape) -> Vec<f64> {
    let n = shape.len();
    let dim = shape.dim();
    let coords = shape.coords();
    let mut out = vec![0.0; n * dim];
    let set = |i: usize, from: usize, to: usize, out: &mut [f64]| {
        for d in 0..dim {
            out[i * dim + d] = coords[to * dim + d] - coords[from * dim + d];
        }
    };
    match shape.topology() {
        Topology::Chain => {
            for i in 0..n - 1 {
                set(i, i, i + 1, &mut out);
            }
            set(n - 1, n - 2, n - 1, &mut out);
        }
        Topology::Loop => {
            for i in 0..n {
                set(i, i, (i + 1) % n, &mut out);
            }
        }
        Topology::Grid { rows, cols } => {
            for r in 0..rows {
                for c in 0..cols {
                    let i = r * cols + c;
                    if c + 1 < cols {
                        set(i, i, i + 1, &mut out);
                    } else {
                        set(i, i - 1, i, &mut out);
                    }
                }
            }
        }
    }
    out
}

/// Compute element volumes, tangents, mean curvature, and total volume.
///
/// Fails with [`Error::DegenerateShape`] if any element has zero volume
/// (possible for grids whose cell corners are collinear even when all
/// adjacent points are distinct).
pub fn compute_geometry(shape: &Shape) -> Result<ShapeGeometry> {
    let elements = Elements::of(shape.topology(), shape.len());
    let mut volumes = Vec::new();
    element_volumes(shape.coords(), shape.dim(), &elements, &mut volumes);
    let mut total = 0.0;
    for (e, &v) in volumes.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::DegenerateShape(format!(
                "element {e} has volume {v}"
            )));
        }
        total += v;
    }
    let mut curvature = Vec::new();
    point_curvatures(
        shape.coords(),
        shape.dim(),
        shape.topology(),
        shape.len(),
        &mut curvature,
    );
    Ok(ShapeGeometry {
        edge_or_cell_volumes: volumes,
        tangents: tangents(shape),
        mean_curvature: curvature,
        total_volume: total,
    })
}
