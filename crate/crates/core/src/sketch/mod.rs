//! Sketch, frame, and video data model.

mod compose;
mod frame;
mod svg;

pub use compose::{
    compose_backward, compose_video, ComposeGradient, CompositionMode, LocalOffsets,
};
pub use frame::{frame_centroid, SketchFrame, SketchVideo, VideoGradient};
pub use svg::{
    frame_to_svg, normalize_to_canvas, parse_svg, parse_svg_raw, CANVAS_MARGIN, CANVAS_SIZE,
};

pub(crate) use frame::centroid;
