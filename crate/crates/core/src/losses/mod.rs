//! Loss terms: length-area regularizer, ARAP energy, and guidance oracles.

mod arap;
mod la;
mod oracle;
mod total;

pub use arap::{
    arap_loss, fit_triangle, frame_energy, ArapConfig, ArapOutput, FitMode, TriangleFit,
};
pub use la::{la_loss, LaConfig, LaOutput, LengthAnchor, SweepPath};
pub use oracle::{
    make_rigid_motion_oracle, make_static_oracle, make_target_oracle, GuidanceOracle,
    RigidMotionOracle, TargetOracle,
};
pub use total::{total_loss, LossBreakdown, LossGradients, Objective};
