//! Central projection onto affine planes and the Beltrami–Klein chart.
//!
//! A plane is `{x : n · x = 1}` with a fixed orthonormal chart `(e₁, e₂)` and
//! base point `b = n / |n|²`. Chart coordinates of a surface point `p` are
//! those of `p / (n · p)`. A chart point `(s₁, s₂)` is handed back as the
//! Euclidean-model point `(s₁, s₂, 1)`, so every projected configuration can
//! be re-evaluated with [`Geometry::Euclidean`].

use nalgebra::Matrix3;

use crate::ambient::{Geometry, Point, Vec3};
use crate::curves::{Curve, DegreeNCurve};
use crate::error::{GeometryError, Result};
use crate::incidence::Geodesic;

/// `|n · p|` at or below this is treated as a ray parallel to the plane.
pub const AT_INFINITY_TOL: f64 = 1e-12;
/// Horizon tolerance for hemisphere normalization.
pub const HORIZON_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionPlane {
    normal: Vec3,
    e1: Vec3,
    e2: Vec3,
    base: Vec3,
}

impl ProjectionPlane {
    pub fn new(normal: Vec3) -> Result<Self> {
        let n2 = normal.norm_squared();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(GeometryError::DegenerateInput("plane through the origin"));
        }
        let n_hat = normal / n2.sqrt();
        // Deterministic chart: e₁ is the smallest-magnitude axis projected
        // into the plane (first axis wins ties), e₂ = n̂ × e₁.
        let abs = n_hat.abs();
        let axis = if abs.x <= abs.y && abs.x <= abs.z {
            Vec3::x()
        } else if abs.y <= abs.z {
            Vec3::y()
        } else {
            Vec3::z()
        };
        let e1 = (axis - n_hat * n_hat.dot(&axis)).normalize();
        let e2 = n_hat.cross(&e1);
        Ok(ProjectionPlane { normal, e1, e2, base: normal / n2 })
    }

    /// The plane `z = 1`, charted by `(x, y)`.
    pub fn z1() -> Self {
        Self::new(Vec3::z()).expect("z = 1 is a valid plane")
    }

    /// Plane tangent to the unit sphere at `pole` (`n = pole`).
    pub fn tangent_to_sphere(pole: &Point) -> Result<Self> {
        Self::new(*pole.coords())
    }

    pub fn normal(&self) -> &Vec3 {
        &self.normal
    }

    pub fn frame(&self) -> (&Vec3, &Vec3, &Vec3) {
        (&self.e1, &self.e2, &self.base)
    }

    /// Columns `[e₁ e₂ b]`: chart-homogeneous `(s₁, s₂, s₀)` to ambient.
    pub fn chart_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.e1, self.e2, self.base])
    }

    pub fn project(&self, p: &Vec3) -> Result<[f64; 2]> {
        let scale = self.normal.dot(p);
        if scale.abs() <= AT_INFINITY_TOL * self.normal.norm() * p.norm() || !scale.is_finite() {
            return Err(GeometryError::AtInfinity);
        }
        let x = p / scale - self.base;
        Ok([x.dot(&self.e1), x.dot(&self.e2)])
    }

    /// Projection as a point of the Euclidean model.
    pub fn project_to_chart(&self, p: &Point) -> Result<Point> {
        let [s1, s2] = self.project(p.coords())?;
        Ok(Point::from_coords_unchecked(Vec3::new(s1, s2, 1.0)))
    }

    /// The ambient point of the plane with chart coordinates `s`.
    pub fn lift(&self, s: [f64; 2]) -> Vec3 {
        self.base + self.e1 * s[0] + self.e2 * s[1]
    }

    /// Image of a geodesic: the chart line cut by its central plane.
    pub fn project_geodesic(&self, line: &Geodesic) -> Result<Geodesic> {
        let m = line.plane_normal();
        let coeffs = Vec3::new(m.dot(&self.e1), m.dot(&self.e2), m.dot(&self.base));
        Geodesic::from_plane_normal(Geometry::Euclidean, &coeffs)
    }
}

pub fn project_point(p: &Point, w: &ProjectionPlane) -> Result<[f64; 2]> {
    w.project(p.coords())
}

/// Replace each point by itself or its antipode, whichever has positive
/// inner product with `pole`.
pub fn hemisphere_normalize(pts: &[Point], pole: &Point) -> Result<Vec<Point>> {
    let pole = pole.coords().normalize();
    pts.iter()
        .map(|p| {
            let d = pole.dot(p.coords());
            if d.abs() <= HORIZON_TOL * p.coords().norm() {
                Err(GeometryError::OnHorizon)
            } else if d > 0.0 {
                Ok(*p)
            } else {
                Ok(p.neg())
            }
        })
        .collect()
}

/// Planar image of a homogeneous curve: its polynomial in chart-homogeneous
/// coordinates `(s₁, s₂, s₀)`; the affine chart polynomial is `s₀ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    curve: DegreeNCurve,
}

impl PlanarCurve {
    pub fn homogeneous(&self) -> &DegreeNCurve {
        &self.curve
    }

    pub fn degree(&self) -> u32 {
        self.curve.degree()
    }

    pub fn eval(&self, s: [f64; 2]) -> f64 {
        self.curve.eval(&Vec3::new(s[0], s[1], 1.0))
    }

    /// Scale-free residual of a chart point.
    pub fn residual(&self, s: [f64; 2]) -> f64 {
        self.curve.residual(&Vec3::new(s[0], s[1], 1.0))
    }

    /// True when the image has no affine part: every monomial carrying `s₁` or
    /// `s₂` vanishes (the curve projects into the line at infinity).
    pub fn is_degenerate(&self) -> bool {
        let n = self.curve.degree();
        let scale = self.curve.max_coeff();
        self.curve
            .terms()
            .all(|([a, b, _], c)| (a == 0 && b == 0) || c.abs() <= 1e-12 * scale)
            && n > 0
    }

    /// Coefficient of `s₁ᵃ s₂ᵇ` in the affine chart polynomial.
    pub fn affine_coeff(&self, a: u32, b: u32) -> f64 {
        let n = self.curve.degree();
        if a + b > n {
            return 0.0;
        }
        self.curve.coeff([a, b, n - a - b])
    }

    pub fn to_curve(&self) -> Curve {
        Curve::from_general(self.curve.clone())
    }
}

/// Substitute the chart embedding `b + s₁e₁ + s₂e₂` into `F`.
pub fn pushforward_curve(curve: &Curve, w: &ProjectionPlane) -> PlanarCurve {
    PlanarCurve { curve: curve.to_general().compose_linear(&w.chart_matrix()) }
}

/// Beltrami–Klein coordinates of a hyperboloid point.
pub fn klein_coordinates(p: &Point) -> [f64; 2] {
    let v = p.coords();
    [v.x / v.z, v.y / v.z]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn project_point_examples() {
        let w = ProjectionPlane::z1();
        let h = Geometry::Hyperbolic;
        assert_eq!(project_point(&h.point(0.0, 0.0, 1.0).unwrap(), &w).unwrap(), [0.0, 0.0]);
        let s = Geometry::Spherical;
        assert_eq!(project_point(&s.point(1.0, 0.0, 0.0).unwrap(), &w), Err(GeometryError::AtInfinity));
        let [a, b] = project_point(&s.point(0.6, 0.0, 0.8).unwrap(), &w).unwrap();
        assert_relative_eq!(a, 0.75, epsilon = 1e-15);
        assert_eq!(b, 0.0);
    }

    #[test]
    fn antipodes_share_an_image() {
        let w = ProjectionPlane::new(Vec3::new(0.3, -0.2, 0.9)).unwrap();
        let p = Geometry::Spherical.point(0.48, 0.6, 0.64).unwrap();
        assert_eq!(project_point(&p, &w).unwrap(), project_point(&p.neg(), &w).unwrap());
    }

    #[test]
    fn lift_inverts_project() {
        let w = ProjectionPlane::new(Vec3::new(0.2, 0.5, -1.4)).unwrap();
        let p = Vec3::new(0.3, 0.7, -1.1);
        let s = w.project(&p).unwrap();
        let x = w.lift(s);
        assert_relative_eq!(x, p / w.normal().dot(&p), epsilon = 1e-14);
        assert_relative_eq!(w.normal().dot(&x), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hemisphere_examples() {
        let s = Geometry::Spherical;
        let pole = s.point(0.0, 0.0, 1.0).unwrap();
        let out = hemisphere_normalize(&[s.point(0.6, 0.0, -0.8).unwrap()], &pole).unwrap();
        assert_eq!(out[0].to_array(), [-0.6, -0.0, 0.8]);
        let p = s.point(0.6, 0.0, 0.8).unwrap();
        assert_eq!(hemisphere_normalize(&[p], &pole).unwrap()[0], p);
        assert_eq!(
            hemisphere_normalize(&[s.point(1.0, 0.0, 0.0).unwrap()], &pole),
            Err(GeometryError::OnHorizon)
        );
    }

    #[test]
    fn pushforward_examples() {
        let w = ProjectionPlane::z1();
        // x² + y² − z²  →  s₁² + s₂² − 1
        let cone = Curve::from_coeffs(2, &[1.0, 0.0, 0.0, 1.0, 0.0, -1.0]).unwrap();
        let img = pushforward_curve(&cone, &w);
        let c = img.affine_coeff(0, 0);
        assert_relative_eq!(img.affine_coeff(2, 0) / -c, 1.0, epsilon = 1e-15);
        assert_relative_eq!(img.affine_coeff(0, 2) / -c, 1.0, epsilon = 1e-15);
        assert_eq!(img.affine_coeff(1, 1), 0.0);
        assert_eq!(img.affine_coeff(1, 0), 0.0);
        assert!(!img.is_degenerate());
        assert!(img.residual([0.6, 0.8]) < 1e-15);

        let z = Curve::from_coeffs(1, &[0.0, 0.0, 1.0]).unwrap();
        assert!(pushforward_curve(&z, &w).is_degenerate());

        let x = Curve::from_coeffs(1, &[1.0, 0.0, 0.0]).unwrap();
        let img = pushforward_curve(&x, &w);
        assert!(!img.is_degenerate());
        assert_eq!(img.affine_coeff(0, 0), 0.0);
        assert_eq!(img.affine_coeff(0, 1), 0.0);
        assert!(img.affine_coeff(1, 0) > 0.0);
    }

    #[test]
    fn klein_examples() {
        let h = Geometry::Hyperbolic;
        assert_eq!(klein_coordinates(&h.point(0.0, 0.0, 1.0).unwrap()), [0.0, 0.0]);
        let [a, b] = klein_coordinates(&h.point(1f64.sinh(), 0.0, 1f64.cosh()).unwrap());
        assert_relative_eq!(a, 1f64.tanh(), epsilon = 1e-15);
        assert_relative_eq!(a, 0.76159, epsilon = 1e-5);
        assert_eq!(b, 0.0);
    }

    #[test]
    fn projected_geodesic_contains_projected_points() {
        let s = Geometry::Spherical;
        let l = Geodesic::through(s, &s.point(0.6, 0.0, 0.8).unwrap(), &s.point(0.0, 0.6, 0.8).unwrap()).unwrap();
        let w = ProjectionPlane::new(Vec3::new(0.1, 0.2, 1.1)).unwrap();
        let img = w.project_geodesic(&l).unwrap();
        for t in [-0.3, 0.1, 0.5, 0.9] {
            let q = w.project_to_chart(&l.at(t)).unwrap();
            assert!(img.residual(&q) < 1e-12);
        }
    }
}
