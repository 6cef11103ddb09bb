//! Bézier geometry, quadrature, swept area, and control-point triangulation.

mod bezier;
mod delaunay;
mod point;
mod quadrature;
mod sweep;
mod transform;

pub use bezier::{
    bernstein, bernstein_derivative, bezier_velocity, curve_length, curve_length_grad, eval_bezier,
    CubicBezier,
};
pub use delaunay::{delaunay_triangulate, signed_area2, MeshEdge, TriangleMesh, DEGENERATE_AREA};
pub use point::{Mat2, Point2};
pub use quadrature::{midpoint_node, QuadratureSpec};
pub use sweep::{swept_area, swept_area_grad, SweepGradient};
pub use transform::{GlobalTransform, InterpolatedAffine};

pub(crate) use quadrature::MomentTable;
pub(crate) use sweep::sweep;
