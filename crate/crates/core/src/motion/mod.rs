//! Motion model: positional encoding, shared feature map, local and global
//! branches, refine head, and checkpoints.

mod checkpoint;
mod encoding;
mod mlp;
mod model;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, MAGIC,
};
pub use encoding::{canvas_to_unit, encode_scalar, positional_encode, EncodingSpec};
pub use mlp::{Mlp, Trace};
pub use model::{forward, MotionConfig, MotionForward, MotionGradients, MotionParams};
