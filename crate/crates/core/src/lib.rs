//! Cross-ratios, central projection and conic incidence on the unit sphere,
//! the plane `z = 1` and the upper sheet of the hyperboloid `x² + y² − z² = −1`.
//!
//! Points are ambient 3-vectors. Geodesics are central planes cut with the
//! surface; conics and degree-n curves are homogeneous cones.

pub mod ambient;
pub mod curves;
pub mod error;
pub mod incidence;
pub mod projection;
pub mod theorems;

pub use ambient::{bilinear_form, distance, gsin, Geometry, Point, Vec3};
pub use curves::{conic_through_five, curve_residual, curve_through, fit_singular_values, intersect_curve_geodesic, Conic, Curve, DegreeNCurve};
pub use error::{GeometryError, Result};
pub use incidence::{
    antipode, arc_position, cross_ratio_pencil, cross_ratio_points, cross_ratio_positions, geodesic_through,
    perspectivity, Geodesic, Pencil,
};
pub use projection::{hemisphere_normalize, klein_coordinates, project_point, pushforward_curve, PlanarCurve, ProjectionPlane};
pub use theorems::{
    butterfly_check, carnot_cross_ratio_product, carnot_n_product, carnot_product, chasles_deviation,
    menelaus_product, CevianSextuple, Triangle,
};
