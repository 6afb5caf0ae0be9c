//! Pose self-similarity matrices and sequence-to-sequence distance with
//! temporal alignment.
//!
//! A sequence pair is compared by computing the geodesic distance between
//! every frame pair (the alignment cost matrix), dynamic-time-warping over
//! it, and normalizing the warped cost by the path length so sequences of
//! different durations stay comparable.
//!
//! By default one correspondence (rotation plus reparameterization, solved
//! on the first frame pair) is reused for all frame pairs of a sequence
//! pair, which keeps all-pairs matrices affordable; strict mode re-solves
//! the correspondence per frame pair.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correspondence::{align_with, AlignOptions};
use crate::error::{Error, Result};
use crate::geodesic::{straighten, GeodesicOptions, MetricContext, DEFAULT_SEGMENTS};
use crate::io::Matrix;
use crate::metric::MetricConfig;
use crate::shape::{centroid_and_scale_normalize, resample, Shape};

/// A labeled sequence of poses sampled at strictly increasing times.
#[derive(Debug, Clone)]
pub struct MotionSequence {
    pub id: String,
    pub frames: Vec<Shape>,
    pub frame_times: Vec<f64>,
    pub action_label: Option<String>,
    pub motion_labels: Vec<String>,
}

impl MotionSequence {
    pub fn new(
        id: String,
        frames: Vec<Shape>,
        frame_times: Vec<f64>,
        action_label: Option<String>,
        motion_labels: Vec<String>,
    ) -> Result<MotionSequence> {
        if frames.len() < 2 {
            return Err(Error::InvalidSequence(format!(
                "sequence {id:?} needs at least 2 frames, got {}",
                frames.len()
            )));
        }
        if frame_times.len() != frames.len() {
            return Err(Error::InvalidSequence(format!(
                "sequence {id:?} has {} times for {} frames",
                frame_times.len(),
                frames.len()
            )));
        }
        if frame_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSequence(format!(
                "sequence {id:?} frame times must be strictly increasing"
            )));
        }
        let first = &frames[0];
        if frames.iter().any(|f| !first.layout_matches(f)) {
            return Err(Error::InvalidSequence(format!(
                "sequence {id:?} frames must share cardinality, dimension, and topology"
            )));
        }
        Ok(MotionSequence { id, frames, frame_times, action_label, motion_labels })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Throughput and correspondence options for sequence-level distances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceConfig {
    /// Path segments per frame-pair geodesic.
    pub segments: usize,
    pub geodesic: GeodesicOptions,
    /// Re-solve the correspondence for every frame pair instead of reusing
    /// the first-frame alignment.
    pub strict_correspondence: bool,
    pub align: AlignOptions,
}

impl Default for SequenceConfig {
    fn default() -> Self {
        SequenceConfig {
            segments: DEFAULT_SEGMENTS,
            geodesic: GeodesicOptions::default(),
            strict_correspondence: false,
            align: AlignOptions::default(),
        }
    }
}

/// Pairwise geodesic distances between all frames of one sequence.
#[derive(Debug, Clone)]
pub struct SelfSimilarityMatrix {
    pub values: Matrix,
    /// The region-tag restriction the matrix was computed under, if any.
    pub region: Option<Vec<String>>,
}

/// A monotone warping of one sequence onto another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    /// Index pairs from `(0, 0)` to `(T_a - 1, T_b - 1)` with steps in
    /// `{(1,0), (0,1), (1,1)}`.
    pub path: Vec<(usize, usize)>,
    pub raw_cost: f64,
    /// `raw_cost` divided by the path length.
    pub normalized_cost: f64,
}

impl AlignmentResult {
    /// Structural warping-path invariants; used by tests and assertions.
    pub fn is_valid_for(&self, rows: usize, cols: usize) -> bool {
        if self.path.first() != Some(&(0, 0)) || self.path.last() != Some(&(rows - 1, cols - 1)) {
            return false;
        }
        self.path.windows(2).all(|w| {
            let di = w[1].0 as isize - w[0].0 as isize;
            let dj = w[1].1 as isize - w[0].1 as isize;
            matches!((di, dj), (1, 0) | (0, 1) | (1, 1))
        })
    }
}

/// Restrict a metric configuration to the given region tags: emphasis 1 on
/// selected tags, 0 elsewhere.
fn restrict_to_region(cfg: &MetricConfig, template: &Shape, region: &[String]) -> Result<MetricConfig> {
    let Some(tags) = template.region_tags() else {
        return Err(Error::UnknownRegionTag(
            "sequence frames carry no region tags".into(),
        ));
    };
    for want in region {
        if !tags.iter().any(|t| t == want) {
            return Err(Error::UnknownRegionTag(want.clone()));
        }
    }
    let mut emphasis = std::collections::BTreeMap::new();
    for tag in tags {
        let selected = region.iter().any(|r| r == tag);
        emphasis.insert(tag.clone(), if selected { 1.0 } else { 0.0 });
    }
    cfg.clone().with_region_emphasis(emphasis)
}

fn normalized_frames(frames: &[Shape], opts: &AlignOptions) -> Result<Vec<Shape>> {
    frames
        .iter()
        .map(|f| {
            let (norm, record) = centroid_and_scale_normalize(f)?;
            if opts.normalize_scale {
                Ok(norm)
            } else {
                let coords = norm.coords().iter().map(|x| x / record.scale).collect();
                norm.with_coords(coords)
            }
        })
        .collect()
}

/// Pose-pose geodesic distances within one sequence; the upper triangle is
/// computed and mirrored, and the diagonal is zero.
pub fn self_similarity(
    seq: &MotionSequence,
    cfg: &MetricConfig,
    region: Option<&[String]>,
) -> Result<SelfSimilarityMatrix> {
    self_similarity_with(seq, cfg, region, &SequenceConfig::default())
}

pub fn self_similarity_with(
    seq: &MotionSequence,
    cfg: &MetricConfig,
    region: Option<&[String]>,
    sopts: &SequenceConfig,
) -> Result<SelfSimilarityMatrix> {
    let cfg_eff = match region {
        Some(tags) => restrict_to_region(cfg, &seq.frames[0], tags)?,
        None => cfg.clone(),
    };
    let t = seq.len();
    let frames = normalized_frames(&seq.frames, &sopts.align)?;
    let ctx = MetricContext::new(&frames[0], &cfg_eff)?;

    let pairs: Vec<(usize, usize)> = (0..t)
        .flat_map(|i| (i + 1..t).map(move |j| (i, j)))
        .collect();
    let distances: Vec<((usize, usize), f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let d = if sopts.strict_correspondence {
                crate::geodesic::geodesic_distance(
                    &seq.frames[i],
                    &seq.frames[j],
                    &cfg_eff,
                    sopts.segments,
                    &sopts.geodesic,
                )?
            } else {
                straighten(&ctx, frames[i].coords(), frames[j].coords(), sopts.segments, &sopts.geodesic)?
                    .length
            };
            Ok(((i, j), d))
        })
        .collect::<Result<_>>()?;

    let mut m = Matrix::zeros(t, t);
    for ((i, j), d) in distances {
        m.set(i, j, d);
        m.set(j, i, d);
    }
    let labels: Vec<String> = (0..t).map(|i| format!("{}#{i}", seq.id)).collect();
    m.row_labels = labels.clone();
    m.col_labels = labels;
    Ok(SelfSimilarityMatrix { values: m, region: region.map(|r| r.to_vec()) })
}

/// Bring two sequences onto a common frame layout (resampling chains and
/// loops to the larger point count when they differ).
fn common_layout(a: &MotionSequence, b: &MotionSequence) -> Result<(Vec<Shape>, Vec<Shape>)> {
    let (fa, fb) = (&a.frames[0], &b.frames[0]);
    if !fa.topology().same_class(&fb.topology()) || fa.dim() != fb.dim() {
        return Err(Error::IncompatibleShapes(format!(
            "sequences {:?} and {:?} have incompatible frames",
            a.id, b.id
        )));
    }
    if fa.topology().is_grid() && fa.topology() != fb.topology() {
        return Err(Error::IncompatibleShapes(
            "grid sequences must have identical grid dimensions".into(),
        ));
    }
    if fa.len() == fb.len() {
        return Ok((a.frames.clone(), b.frames.clone()));
    }
    let n = fa.len().max(fb.len());
    let res = |frames: &[Shape]| -> Result<Vec<Shape>> {
        frames.iter().map(|f| resample(f, n)).collect()
    };
    Ok((res(&a.frames)?, res(&b.frames)?))
}

/// Geodesic distances between every frame of `a` and every frame of `b`.
pub fn frame_cost_matrix(
    a: &MotionSequence,
    b: &MotionSequence,
    cfg: &MetricConfig,
) -> Result<Matrix> {
    frame_cost_matrix_with(a, b, cfg, &SequenceConfig::default())
}

pub fn frame_cost_matrix_with(
    a: &MotionSequence,
    b: &MotionSequence,
    cfg: &MetricConfig,
    sopts: &SequenceConfig,
) -> Result<Matrix> {
    let (a_frames, b_frames) = common_layout(a, b)?;
    let (ta, tb) = (a_frames.len(), b_frames.len());
    let mut m = Matrix::zeros(ta, tb);
    m.row_labels = (0..ta).map(|i| format!("{}#{i}", a.id)).collect();
    m.col_labels = (0..tb).map(|j| format!("{}#{j}", b.id)).collect();

    if sopts.strict_correspondence {
        let entries: Vec<(usize, f64)> = (0..ta * tb)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / tb, idx % tb);
                let d = crate::geodesic::geodesic_distance(
                    &a_frames[i],
                    &b_frames[j],
                    cfg,
                    sopts.segments,
                    &sopts.geodesic,
                )?;
                Ok((idx, d))
            })
            .collect::<Result<_>>()?;
        for (idx, d) in entries {
            m.data_mut()[idx] = d;
        }
        return Ok(m);
    }

    // One correspondence for the whole pair, solved on the first frames.
    let corr = align_with(&a_frames[0], &b_frames[0], &sopts.align)?;
    let a_norm = normalized_frames(&a_frames, &sopts.align)?;
    let b_norm = normalized_frames(&b_frames, &sopts.align)?;
    let b_aligned: Vec<Shape> = b_norm
        .iter()
        .map(|f| corr.rotation.apply_shape(&corr.reparam.apply(f)?))
        .collect::<Result<_>>()?;

    let ctx = MetricContext::new(&a_norm[0], cfg)?;
    let entries: Vec<(usize, f64)> = (0..ta * tb)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / tb, idx % tb);
            let out = straighten(
                &ctx,
                a_norm[i].coords(),
                b_aligned[j].coords(),
                sopts.segments,
                &sopts.geodesic,
            )?;
            Ok((idx, out.length))
        })
        .collect::<Result<_>>()?;
    for (idx, d) in entries {
        m.data_mut()[idx] = d;
    }
    Ok(m)
}

/// Dynamic time warping over a nonnegative cost matrix: standard dynamic
/// program with steps `{(1,0), (0,1), (1,1)}` from `(0,0)` to the opposite
/// corner. Cost ties in the backtrack prefer the diagonal step, then
/// `(1,0)`, then `(0,1)`.
pub fn dtw_align(cost: &Matrix) -> Result<AlignmentResult> {
    let (rows, cols) = (cost.rows(), cost.cols());
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidConfig("empty cost matrix".into()));
    }
    if cost.data().iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidConfig(
            "cost matrix must be nonnegative and finite".into(),
        ));
    }

    let mut acc = vec![0.0f64; rows * cols];
    acc[0] = cost.get(0, 0);
    for j in 1..cols {
        acc[j] = acc[j - 1] + cost.get(0, j);
    }
    for i in 1..rows {
        acc[i * cols] = acc[(i - 1) * cols] + cost.get(i, 0);
        for j in 1..cols {
            let best = acc[(i - 1) * cols + j - 1]
                .min(acc[(i - 1) * cols + j])
                .min(acc[i * cols + j - 1]);
            acc[i * cols + j] = cost.get(i, j) + best;
        }
    }

    let mut path = vec![(rows - 1, cols - 1)];
    let (mut i, mut j) = (rows - 1, cols - 1);
    while i > 0 || j > 0 {
        let (ni, nj) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let diag = acc[(i - 1) * cols + j - 1];
            let up = acc[(i - 1) * cols + j];
            let left = acc[i * cols + j - 1];
            if diag <= up && diag <= left {
                (i - 1, j - 1)
            } else if up <= left {
                (i - 1, j)
            } else {
                (i, j - 1)
            }
        };
        path.push((ni, nj));
        i = ni;
        j = nj;
    }
    path.reverse();
    let raw_cost = acc[(rows - 1) * cols + cols - 1];
    Ok(AlignmentResult {
        raw_cost,
        normalized_cost: raw_cost / path.len() as f64,
        path,
    })
}

/// A single value quantifying how related two motion sequences are: the
/// length-normalized DTW cost over frame-pair geodesic distances.
pub fn sequence_distance(
    a: &MotionSequence,
    b: &MotionSequence,
    cfg: &MetricConfig,
) -> Result<f64> {
    sequence_distance_with(a, b, cfg, &SequenceConfig::default())
}

pub fn sequence_distance_with(
    a: &MotionSequence,
    b: &MotionSequence,
    cfg: &MetricConfig,
    sopts: &SequenceConfig,
) -> Result<f64> {
    let cost = frame_cost_matrix_with(a, b, cfg, sopts)?;
    Ok(dtw_align(&cost)?.normalized_cost)
}

/// Symmetric matrix of sequence distances over a set of sequences, computed
/// pair-parallel.
pub fn pairwise_sequence_distances(
    seqs: &[MotionSequence],
    cfg: &MetricConfig,
    sopts: &SequenceConfig,
) -> Result<Matrix> {
    let n = seqs.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let distances: Vec<((usize, usize), f64)> = pairs
        .par_iter()
        .map(|&(i, j)| Ok(((i, j), sequence_distance_with(&seqs[i], &seqs[j], cfg, sopts)?)))
        .collect::<Result<_>>()?;
    let mut m = Matrix::zeros(n, n);
    for ((i, j), d) in distances {
        m.set(i, j, d);
        m.set(j, i, d);
    }
    m.row_labels = seqs.iter().map(|s| s.id.clone()).collect();
    m.col_labels = m.row_labels.clone();
    Ok(m)
}

/// Distances from every sequence in `rows` to every sequence in `cols`.
pub fn cross_sequence_distances(
    rows: &[MotionSequence],
    cols: &[MotionSequence],
    cfg: &MetricConfig,
    sopts: &SequenceConfig,
) -> Result<Matrix> {
    let (nr, nc) = (rows.len(), cols.len());
    let entries: Vec<(usize, f64)> = (0..nr * nc)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nc, idx % nc);
            Ok((idx, sequence_distance_with(&rows[i], &cols[j], cfg, sopts)?))
        })
        .collect::<Result<_>>()?;
    let mut m = Matrix::zeros(nr, nc);
    for (idx, d) in entries {
        m.data_mut()[idx] = d;
    }
    m.row_labels = rows.iter().map(|s| s.id.clone()).collect();
    m.col_labels = cols.iter().map(|s| s.id.clone()).collect();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{circle, Topology};
    use proptest::prelude::*;

    fn morphing_sequence(id: &str, frames: usize, wobble: f64) -> MotionSequence {
        let shapes: Vec<Shape> = (0..frames)
            .map(|f| {
                let t = f as f64 / (frames - 1) as f64;
                let pts: Vec<[f64; 2]> = (0..14)
                    .map(|i| {
                        let th = 2.0 * std::f64::consts::PI * i as f64 / 14.0;
                        let r = 1.0 + wobble * t * (2.0 * th).sin() + 0.2 * th.cos();
                        [r * th.cos(), r * th.sin()]
                    })
                    .collect();
                Shape::from_points_2d(&pts, Topology::Loop).unwrap()
            })
            .collect();
        let times: Vec<f64> = (0..frames).map(|f| f as f64 / 30.0).collect();
        MotionSequence::new(id.into(), shapes, times, None, vec![]).unwrap()
    }

    #[test]
    fn sequence_validation() {
        let s = circle(1.0, [0.0, 0.0], 8);
        assert!(MotionSequence::new("x".into(), vec![s.clone()], vec![0.0], None, vec![]).is_err());
        assert!(MotionSequence::new(
            "x".into(),
            vec![s.clone(), s.clone()],
            vec![0.0, 0.0],
            None,
            vec![]
        )
        .is_err());
        let other = circle(1.0, [0.0, 0.0], 9);
        assert!(MotionSequence::new(
            "x".into(),
            vec![s.clone(), other],
            vec![0.0, 1.0],
            None,
            vec![]
        )
        .is_err());
        assert!(
            MotionSequence::new("x".into(), vec![s.clone(), s], vec![0.0, 1.0], None, vec![])
                .is_ok()
        );
    }

    #[test]
    fn frozen_pose_has_zero_self_similarity() {
        let s = circle(1.0, [0.0, 0.0], 10);
        let seq = MotionSequence::new(
            "frozen".into(),
            vec![s.clone(), s.clone(), s.clone(), s],
            vec![0.0, 1.0, 2.0, 3.0],
            None,
            vec![],
        )
        .unwrap();
        let ssm = self_similarity(&seq, &MetricConfig::default(), None).unwrap();
        assert!(ssm.values.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn self_similarity_symmetric_zero_diagonal() {
        let seq = morphing_sequence("m", 5, 0.4);
        let ssm = self_similarity(&seq, &MetricConfig::default(), None).unwrap();
        assert!(ssm.values.is_symmetric(1e-6));
        for i in 0..5 {
            assert_eq!(ssm.values.get(i, i), 0.0);
        }
        assert!(ssm.values.get(0, 4) > 0.0);
    }

    #[test]
    fn self_similarity_unknown_region_rejected() {
        let seq = morphing_sequence("m", 3, 0.2);
        let err = self_similarity(&seq, &MetricConfig::default(), Some(&["hand".to_string()]));
        assert!(matches!(err, Err(Error::UnknownRegionTag(_))));
    }

    #[test]
    fn cost_matrix_zero_diagonal_for_identical_sequences() {
        let a = morphing_sequence("a", 4, 0.4);
        let m = frame_cost_matrix(&a, &a, &MetricConfig::default()).unwrap();
        for i in 0..4 {
            assert!(m.get(i, i) <= 1e-9, "diag {i}: {}", m.get(i, i));
        }
    }

    #[test]
    fn cost_matrix_antidiagonal_for_reversed_sequence() {
        let a = morphing_sequence("a", 4, 0.4);
        let rev = MotionSequence::new(
            "rev".into(),
            a.frames.iter().rev().cloned().collect(),
            a.frame_times.clone(),
            None,
            vec![],
        )
        .unwrap();
        let m = frame_cost_matrix(&a, &rev, &MetricConfig::default()).unwrap();
        for i in 0..4 {
            assert!(m.get(i, 3 - i) <= 1e-6, "antidiag {i}: {}", m.get(i, 3 - i));
        }
    }

    #[test]
    fn strict_cost_matrix_matches_single_calls() {
        let a = morphing_sequence("a", 3, 0.4);
        let b = morphing_sequence("b", 3, 0.7);
        let cfg = MetricConfig::default();
        let sopts = SequenceConfig { strict_correspondence: true, ..Default::default() };
        let m = frame_cost_matrix_with(&a, &b, &cfg, &sopts).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = crate::geodesic::geodesic_distance(
                    &a.frames[i],
                    &b.frames[j],
                    &cfg,
                    sopts.segments,
                    &sopts.geodesic,
                )
                .unwrap();
                assert!((m.get(i, j) - d).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn dtw_zero_diagonal_path() {
        let mut cost = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                cost.set(i, j, if i == j { 0.0 } else { 1.0 });
            }
        }
        let res = dtw_align(&cost).unwrap();
        assert_eq!(res.raw_cost, 0.0);
        assert_eq!(res.path, vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert!(res.is_valid_for(4, 4));
    }

    #[test]
    fn dtw_single_row_visits_every_column() {
        let mut cost = Matrix::zeros(1, 5);
        for j in 0..5 {
            cost.set(0, j, (j + 1) as f64);
        }
        let res = dtw_align(&cost).unwrap();
        assert_eq!(res.path.len(), 5);
        assert_eq!(res.raw_cost, 15.0);
        assert!(res.is_valid_for(1, 5));
    }

    #[test]
    fn dtw_rejects_empty_and_negative() {
        assert!(dtw_align(&Matrix::zeros(0, 0)).is_err());
        let mut m = Matrix::zeros(2, 2);
        m.set(0, 1, -1.0);
        assert!(dtw_align(&m).is_err());
    }

    // Exhaustive enumeration of every monotone warping path; the
    // independent oracle for the dynamic program.
    fn brute_force_dtw(cost: &Matrix, i: usize, j: usize) -> f64 {
        let here = cost.get(i, j);
        if i == 0 && j == 0 {
            return here;
        }
        let mut best = f64::INFINITY;
        if i > 0 && j > 0 {
            best = best.min(brute_force_dtw(cost, i - 1, j - 1));
        }
        if i > 0 {
            best = best.min(brute_force_dtw(cost, i - 1, j));
        }
        if j > 0 {
            best = best.min(brute_force_dtw(cost, i, j - 1));
        }
        here + best
    }

    #[test]
    fn dtw_matches_brute_force_4x4() {
        let rows = vec![
            vec![3.0, 1.0, 4.0, 1.0],
            vec![5.0, 9.0, 2.0, 6.0],
            vec![5.0, 3.0, 5.0, 8.0],
            vec![9.0, 7.0, 9.0, 3.0],
        ];
        let cost = Matrix::from_rows(&rows).unwrap();
        let res = dtw_align(&cost).unwrap();
        let oracle = brute_force_dtw(&cost, 3, 3);
        assert_eq!(res.raw_cost, oracle);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn dtw_matches_brute_force_up_to_6x6(
            rows in 1usize..=6,
            cols in 1usize..=6,
            seed in proptest::collection::vec(0u8..100, 36),
        ) {
            let data: Vec<Vec<f64>> = (0..rows)
                .map(|r| (0..cols).map(|c| seed[r * 6 + c] as f64).collect())
                .collect();
            let cost = Matrix::from_rows(&data).unwrap();
            let res = dtw_align(&cost).unwrap();
            let oracle = brute_force_dtw(&cost, rows - 1, cols - 1);
            prop_assert_eq!(res.raw_cost, oracle);
            prop_assert!(res.is_valid_for(rows, cols));
            let path_sum: f64 = res.path.iter().map(|&(i, j)| cost.get(i, j)).sum();
            prop_assert!((path_sum - res.raw_cost).abs() < 1e-9);
        }
    }

    #[test]
    fn sequence_distance_zero_for_self_and_symmetric() {
        let a = morphing_sequence("a", 4, 0.4);
        let b = morphing_sequence("b", 5, 0.8);
        let cfg = MetricConfig::default();
        assert!(sequence_distance(&a, &a, &cfg).unwrap() <= 1e-9);
        let ab = sequence_distance(&a, &b, &cfg).unwrap();
        let ba = sequence_distance(&b, &a, &cfg).unwrap();
        assert!(ab > 0.0);
        assert!((ab - ba).abs() / ab <= 1e-6, "{ab} vs {ba}");
    }

    #[test]
    fn sequence_distance_viewpoint_invariant() {
        let a = morphing_sequence("a", 4, 0.4);
        let b = morphing_sequence("b", 4, 0.8);
        let cfg = MetricConfig::default();
        let d0 = sequence_distance(&a, &b, &cfg).unwrap();
        let rotated = MotionSequence::new(
            "rot".into(),
            b.frames
                .iter()
                .map(|f| {
                    let (c, s) = (1.3f64.cos(), 1.3f64.sin());
                    let coords: Vec<f64> = f
                        .coords()
                        .chunks(2)
                        .flat_map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]])
                        .collect();
                    f.with_coords(coords).unwrap()
                })
                .collect(),
            b.frame_times.clone(),
            None,
            vec![],
        )
        .unwrap();
        let d1 = sequence_distance(&a, &rotated, &cfg).unwrap();
        assert!((d1 - d0).abs() / d0 <= 1e-3, "{d0} vs {d1}");
    }

    #[test]
    fn pairwise_matrix_symmetric_with_labels() {
        let seqs = vec![
            morphing_sequence("s0", 3, 0.3),
            morphing_sequence("s1", 3, 0.6),
            morphing_sequence("s2", 4, 0.9),
        ];
        let m =
            pairwise_sequence_distances(&seqs, &MetricConfig::default(), &SequenceConfig::default())
                .unwrap();
        assert!(m.is_symmetric(1e-12));
        assert_eq!(m.row_labels, vec!["s0", "s1", "s2"]);
        assert_eq!(m.get(0, 0), 0.0);
    }
}
