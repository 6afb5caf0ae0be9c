//! The weighted inner product on deformation fields of a shape.
//!
//! For a shape `q` with element volumes `vol_e` and per-element weights
//!
//! ```text
//! w_e(q) = emphasis_e * ( a*(1 + ln(1 + V(q))) + b*(1 + kappa_e(q)^2) + c )
//! ```
//!
//! the inner product of two deformation fields `u`, `v` is
//!
//! ```text
//! <u, v>_q = sum_e w_e(q) * vol_e(q) * mean_{corner p of e} <u_p, v_p>
//! ```
//!
//! `V` is the total volume, `kappa_e` the mean of the element's corner
//! curvatures, and `emphasis_e` the region multiplier of the element's first
//! corner tag. All three weight inputs are invariant under rigid motions and
//! sampling reparameterizations, and the weight is strictly positive whenever
//! the emphasis is, which keeps the induced geodesic distance from
//! degenerating.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::{Error, Result};
use crate::geometry::{self, Elements};
use crate::shape::Shape;

/// Functional form of the weighting; a single form is currently defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PhiForm {
    /// `a*(1 + ln(1+V)) + b*(1 + kappa^2) + c`
    #[default]
    LogVolumeSquaredCurvature,
}

/// Weights for the volume, curvature, and position terms of the metric,
/// plus optional per-region emphasis multipliers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Weight `a` of the total-volume term.
    pub volume_weight: f64,
    /// Weight `b` of the squared-curvature term.
    pub curvature_weight: f64,
    /// Weight `c` of the constant (ambient position) term.
    pub position_weight: f64,
    /// Region tag to multiplier; tags absent from the map default to 1.
    #[serde(default)]
    pub region_emphasis: BTreeMap<String, f64>,
    #[serde(default)]
    pub phi_form: PhiForm,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            volume_weight: 1.0,
            curvature_weight: 1.0,
            position_weight: 1.0,
            region_emphasis: BTreeMap::new(),
            phi_form: PhiForm::default(),
        }
    }
}

impl MetricConfig {
    pub fn new(volume_weight: f64, curvature_weight: f64, position_weight: f64) -> Result<Self> {
        let cfg = MetricConfig {
            volume_weight,
            curvature_weight,
            position_weight,
            ..MetricConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The flat configuration `a = b = 0, c = 1`: a volume-weighted L2
    /// product whose geodesics are straight lines.
    pub fn flat() -> Self {
        MetricConfig::new(0.0, 0.0, 1.0).expect("flat config is valid")
    }

    pub fn with_region_emphasis(mut self, emphasis: BTreeMap<String, f64>) -> Result<Self> {
        self.region_emphasis = emphasis;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, c) = (self.volume_weight, self.curvature_weight, self.position_weight);
        for (name, v) in [("volume", a), ("curvature", b), ("position", c)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!("{name} weight {v} must be finite and >= 0")));
            }
        }
        if a + b + c <= 0.0 {
            return Err(Error::InvalidConfig("weights must not all be zero".into()));
        }
        for (tag, m) in &self.region_emphasis {
            if !m.is_finite() || *m < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "region emphasis for {tag:?} is {m}, must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }

    fn emphasis_of(&self, tag: Option<&str>) -> f64 {
        tag.and_then(|t| self.region_emphasis.get(t).copied()).unwrap_or(1.0)
    }
}

/// A per-point deformation field over a shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationField {
    vectors: Vec<f64>,
    dim: usize,
}

impl DeformationField {
    pub fn new(vectors: Vec<f64>, dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidConfig(format!("dim must be 2 or 3, got {dim}")));
        }
        if vectors.len() % dim != 0 {
            return Err(Error::CardinalityMismatch(format!(
                "{} coordinates not divisible by dim {dim}",
                vectors.len()
            )));
        }
        Ok(DeformationField { vectors, dim })
    }

    pub fn zeros(n: usize, dim: usize) -> Self {
        DeformationField { vectors: vec![0.0; n * dim], dim }
    }

    /// Pointwise difference of two shapes as a deformation of the first.
    pub fn between(from: &Shape, to: &Shape) -> Result<Self> {
        if !from.layout_matches(to) {
            return Err(Error::CardinalityMismatch(
                "deformation requires matching shape layouts".into(),
            ));
        }
        let vectors = to
            .coords()
            .iter()
            .zip(from.coords())
            .map(|(t, f)| t - f)
            .collect();
        Ok(DeformationField { vectors, dim: from.dim() })
    }

    pub fn len(&self) -> usize {
        self.vectors.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.vectors
    }

    pub fn norm_inf(&self) -> f64 {
        self.vectors.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Per-element metric weights of a shape under a configuration; the building
/// block shared by [`metric_inner`] and the path-energy machinery.
pub(crate) struct ElementWeights {
    /// Resolved per-element emphasis multipliers (constant in the shape).
    pub emphasis: Vec<f64>,
}

impl ElementWeights {
    pub fn resolve(shape: &Shape, elements: &Elements, cfg: &MetricConfig) -> ElementWeights {
        let tags = shape.region_tags();
        let emphasis = elements
            .iter()
            .map(|(_, corners)| cfg.emphasis_of(tags.map(|t| t[corners[0]].as_str())))
            .collect();
        ElementWeights { emphasis }
    }
}

/// Compute `w_e` for every element of a frame: emphasis times the
/// volume/curvature/position weight evaluated on the frame's geometry.
pub(crate) fn element_metric_weights<T: Real>(
    coords: &[T],
    dim: usize,
    topology: crate::shape::Topology,
    n: usize,
    elements: &Elements,
    emphasis: &[f64],
    cfg: &MetricConfig,
    scratch_volumes: &mut Vec<T>,
    scratch_curv: &mut Vec<T>,
    out: &mut Vec<T>,
) {
    let a = cfg.volume_weight;
    let b = cfg.curvature_weight;
    let c = cfg.position_weight;

    let phi_vol = if a > 0.0 {
        geometry::element_volumes(coords, dim, elements, scratch_volumes);
        let mut total = T::zero();
        for &v in scratch_volumes.iter() {
            total = total + v;
        }
        T::lift(1.0) + total.ln_1p()
    } else {
        T::zero()
    };
    if b > 0.0 {
        geometry::point_curvatures(coords, dim, topology, n, scratch_curv);
    }

    out.clear();
    let cc = elements.corner_count();
    let inv_cc = T::lift(1.0 / cc as f64);
    for (e, corners) in elements.iter() {
        let mut w = T::lift(c);
        if a > 0.0 {
            w = w + T::lift(a) * phi_vol;
        }
        if b > 0.0 {
            let mut kappa = T::zero();
            for &p in corners {
                kappa = kappa + scratch_curv[p];
            }
            kappa = kappa * inv_cc;
            w = w + T::lift(b) * (T::lift(1.0) + kappa * kappa);
        }
        out.push(w * T::lift(emphasis[e]));
    }
}

/// The weighted inner product `<u, v>` at shape `q`.
///
/// Symmetric and bilinear in `(u, v)`; positive semi-definite, and positive
/// definite whenever every element has positive effective weight.
pub fn metric_inner(
    q: &Shape,
    u: &DeformationField,
    v: &DeformationField,
    cfg: &MetricConfig,
) -> Result<f64> {
    cfg.validate()?;
    if u.len() != q.len() || v.len() != q.len() || u.dim() != q.dim() || v.dim() != q.dim() {
        return Err(Error::CardinalityMismatch(format!(
            "shape has {} points (dim {}), fields have {} (dim {}) and {} (dim {})",
            q.len(),
            q.dim(),
            u.len(),
            u.dim(),
            v.len(),
            v.dim()
        )));
    }
    let geom = geometry::compute_geometry(q)?;
    let elements = Elements::of(q.topology(), q.len());
    let weights = ElementWeights::resolve(q, &elements, cfg);

    let mut w = Vec::new();
    let (mut sv, mut sc) = (Vec::new(), Vec::new());
    element_metric_weights(
        q.coords(),
        q.dim(),
        q.topology(),
        q.len(),
        &elements,
        &weights.emphasis,
        cfg,
        &mut sv,
        &mut sc,
        &mut w,
    );
    if w.iter().all(|&x| x == 0.0) {
        return Err(Error::DegenerateMetric(
            "every element has zero effective weight".into(),
        ));
    }

    let dim = q.dim();
    let cc = elements.corner_count() as f64;
    let (uc, vc) = (u.components(), v.components());
    let mut total = 0.0;
    for (e, corners) in elements.iter() {
        let mut inner = 0.0;
        for &p in corners {
            for d in 0..dim {
                inner += uc[p * dim + d] * vc[p * dim + d];
            }
        }
        total += w[e] * geom.edge_or_cell_volumes[e] * inner / cc;
    }
    Ok(total)
}
