//! Adam and the training loop.

mod adam;
mod train;

pub use adam::{adam_step, AdamHyper, AdamState};
pub use train::{train, Problem, TrainConfig, TrainReport, Wiring};
