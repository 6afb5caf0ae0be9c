//! Similarity analysis for motion primitives on discretized shape spaces.
//!
//! The crate is organized around a pipeline:
//!
//! 1. [`shape`] — discrete immersed shapes (chains, loops, grids) and their
//!    first-order geometry (element volumes, tangents, mean curvature).
//! 2. [`correspondence`] — quotienting similitudes and sampling
//!    reparameterizations before any metric evaluation (Kabsch rotation plus
//!    a cyclic shift/flip search for loops).
//! 3. [`metric`] / [`geodesic`] — a weighted Riemannian inner product on
//!    deformation fields and geodesic distance via discrete path
//!    straightening.
//! 4. [`sequence`] — pose self-similarity matrices and sequence-to-sequence
//!    distance with dynamic time warping.
//! 5. [`annotation`] — weighted k-nearest-neighbor label transfer with
//!    bagging and Monte Carlo evaluation protocols.
//! 6. [`synthetic`] — parametric motion-class generators used as a
//!    controllable stand-in for video-derived pose data.
//! 7. [`rl`] — semi-Markov Q-learning over macro-actions in grid-world
//!    manipulation tasks, with annotated hierarchical action selection.
//!
//! The `motionprim` binary exposes every stage as a subcommand; see the
//! repository README for usage.

pub mod annotation;
pub mod correspondence;
mod dual;
pub mod error;
pub mod geodesic;
pub mod geometry;
pub mod io;
pub mod metric;
pub mod rl;
pub mod sequence;
pub mod shape;
pub mod synthetic;

pub use error::{Error, Result};
pub use shape::{Shape, Topology};
