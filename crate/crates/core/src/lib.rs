//! Counting dilated point configurations in the finite plane and space F_p^d.
//!
//! Points live in F_p^d with the quadratic "distance" ‖x − y‖ = Σ (x_i − y_i)².
//! The counters here enumerate pairs of configurations (paths, cycles,
//! simplexes) whose squared edge lengths differ by a fixed ratio r, each by
//! more than one independent method so that results can be cross-checked.

pub mod configcount;
pub mod error;
pub mod families;
pub mod field;
pub mod geometry;
pub mod limits;
pub mod orthogonal;
pub mod pattern;
pub mod simgraph;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Prime, Ratio, Scalar};
pub use geometry::{Point, PointSet};
