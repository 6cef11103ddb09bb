//! Bézier sketch animation driven by per-frame control-point trajectories.
//!
//! A sketch is a set of cubic strokes. A small motion model predicts a global
//! affine transform and per-point offsets for every frame interval; frames are
//! composed recurrently and the trajectory is optimized against a guidance
//! oracle plus a length/swept-area regularizer and an as-rigid-as-possible
//! energy over a Delaunay mesh of the rest pose.

pub mod error;
pub mod geometry;
pub mod par;

pub use error::{Error, Result};
pub mod io;
pub mod losses;
pub mod motion;
pub mod optim;
pub mod sketch;
