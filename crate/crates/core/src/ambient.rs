//! Curvature-indexed ambient linear algebra.
//!
//! All three geometries share one representation: a point is a 3-vector on a
//! model surface in ℝ³.
//!
//! | geometry   | K  | form            | surface                        |
//! |------------|----|-----------------|--------------------------------|
//! | spherical  | +1 | diag(1, 1, 1)   | x² + y² + z² = 1               |
//! | euclidean  |  0 | diag(1, 1, 1)   | z = 1                          |
//! | hyperbolic | −1 | diag(1, 1, −1)  | x² + y² − z² = −1, z > 0        |
//!
//! The Euclidean plane lives at `z = 1` so that central projection and
//! homogeneous curves need no special case for it.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

pub type Vec3 = Vector3<f64>;

/// Surface membership tolerance for points produced by this crate.
pub const SURFACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Spherical,
    Euclidean,
    Hyperbolic,
}

impl Geometry {
    pub const ALL: [Geometry; 3] = [Geometry::Spherical, Geometry::Euclidean, Geometry::Hyperbolic];

    pub fn curvature(self) -> i8 {
        match self {
            Geometry::Spherical => 1,
            Geometry::Euclidean => 0,
            Geometry::Hyperbolic => -1,
        }
    }

    pub fn from_curvature(k: i8) -> Option<Self> {
        match k {
            1 => Some(Geometry::Spherical),
            0 => Some(Geometry::Euclidean),
            -1 => Some(Geometry::Hyperbolic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Spherical => "spherical",
            Geometry::Euclidean => "euclidean",
            Geometry::Hyperbolic => "hyperbolic",
        }
    }

    pub fn is_curved(self) -> bool {
        self != Geometry::Euclidean
    }

    /// `u₁v₁ + u₂v₂ + σu₃v₃` with σ = −1 only for the hyperboloid.
    #[inline]
    pub fn form(self, u: &Vec3, v: &Vec3) -> f64 {
        let third = u.z * v.z;
        match self {
            Geometry::Hyperbolic => u.x * v.x + u.y * v.y - third,
            _ => u.x * v.x + u.y * v.y + third,
        }
    }

    /// Generalized sine: `sin`, identity or `sinh` by curvature.
    #[inline]
    pub fn gsin(self, x: f64) -> f64 {
        match self {
            Geometry::Spherical => x.sin(),
            Geometry::Euclidean => x,
            Geometry::Hyperbolic => x.sinh(),
        }
    }

    pub fn distance(self, p: &Point, q: &Point) -> f64 {
        let (p, q) = (&p.0, &q.0);
        match self {
            // atan2 and the half-chord form stay exact at d = 0, where
            // arccos/arccosh of a rounded 1 ± ε would return ~1e-8.
            Geometry::Spherical => p.cross(q).norm().atan2(self.form(p, q).clamp(-1.0, 1.0)),
            Geometry::Hyperbolic => {
                let d = p - q;
                2.0 * (self.form(&d, &d).max(0.0).sqrt() / 2.0).asinh()
            }
            Geometry::Euclidean => (p.x - q.x).hypot(p.y - q.y),
        }
    }

    /// Rescale `v` back onto the model surface.
    ///
    /// Sphere and hyperboloid divide by `√|Q(v,v)|` (the hyperboloid also
    /// flips to the upper sheet); the plane divides by `z`.
    pub fn renormalize(self, v: &Vec3) -> Result<Point> {
        match self {
            Geometry::Spherical => {
                let n = v.norm();
                if !(n > 0.0) || !n.is_finite() {
                    return Err(GeometryError::DegenerateInput("zero vector"));
                }
                Ok(Point(v / n))
            }
            Geometry::Hyperbolic => {
                let q = self.form(v, v);
                if !(q < 0.0) || !q.is_finite() {
                    return Err(GeometryError::OffSurface { drift: q + 1.0 });
                }
                let s = (-q).sqrt() * v.z.signum();
                Ok(Point(v / s))
            }
            Geometry::Euclidean => {
                if v.z.abs() <= 1e-300 || !v.z.is_finite() {
                    return Err(GeometryError::AtInfinity);
                }
                let mut p = v / v.z;
                p.z = 1.0;
                Ok(Point(p))
            }
        }
    }

    /// Renormalize, rejecting inputs that moved by more than `tol`
    /// (relative, max-norm).
    pub fn validate(self, v: &Vec3, tol: f64) -> Result<Point> {
        let p = self.renormalize(v)?;
        let drift = (p.0 - v).amax() / v.amax().max(1.0);
        if drift > tol || !drift.is_finite() {
            return Err(GeometryError::OffSurface { drift });
        }
        Ok(p)
    }

    pub fn point(self, x: f64, y: f64, z: f64) -> Result<Point> {
        self.validate(&Vec3::new(x, y, z), SURFACE_TOL)
    }

    /// Signed deviation of `v` from the surface equation.
    pub fn surface_defect(self, v: &Vec3) -> f64 {
        match self {
            Geometry::Spherical => self.form(v, v) - 1.0,
            Geometry::Hyperbolic => self.form(v, v) + 1.0,
            Geometry::Euclidean => v.z - 1.0,
        }
    }

    /// Orthonormal basis of the tangent plane at `p` under the restricted
    /// form (positive definite in all three geometries).
    ///
    /// `hint` fixes the first axis when it is a usable tangent direction.
    pub fn tangent_frame(self, p: &Point, hint: Option<&Vec3>) -> (Vec3, Vec3) {
        let p = &p.0;
        match self {
            Geometry::Euclidean => {
                let e1 = hint
                    .map(|h| Vec3::new(h.x, h.y, 0.0))
                    .filter(|h| h.norm() > 1e-12)
                    .map(|h| h.normalize())
                    .unwrap_or_else(Vec3::x);
                (e1, Vec3::new(-e1.y, e1.x, 0.0))
            }
            _ => {
                let project = |w: &Vec3| -> Vec3 {
                    let s = self.form(w, p) / self.form(p, p);
                    w - p * s
                };
                let candidates = hint.into_iter().copied().chain([Vec3::x(), Vec3::y(), Vec3::z()]);
                let mut e1 = Vec3::zeros();
                for c in candidates {
                    let t = project(&c);
                    let n2 = self.form(&t, &t);
                    if n2 > 1e-6 * c.norm_squared().max(1e-300) {
                        e1 = t / n2.sqrt();
                        break;
                    }
                }
                let mut e2 = p.cross(&e1);
                if self == Geometry::Hyperbolic {
                    e2.z = -e2.z;
                }
                let n2 = self.form(&e2, &e2);
                (e1, e2 / n2.sqrt())
            }
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Geometry {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spherical" | "sphere" | "s2" | "+1" | "1" => Ok(Geometry::Spherical),
            "euclidean" | "plane" | "e2" | "0" => Ok(Geometry::Euclidean),
            "hyperbolic" | "hyperboloid" | "h2" | "-1" => Ok(Geometry::Hyperbolic),
            other => Err(format!("unknown geometry `{other}`")),
        }
    }
}

/// `⟨u, v⟩_K`.
pub fn bilinear_form(g: Geometry, u: &Vec3, v: &Vec3) -> f64 {
    g.form(u, v)
}

pub fn gsin(g: Geometry, x: f64) -> f64 {
    g.gsin(x)
}

pub fn distance(g: Geometry, p: &Point, q: &Point) -> f64 {
    g.distance(p, q)
}

/// A point on one of the model surfaces. The geometry is carried by the
/// operations, not by the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(pub(crate) Vec3);

impl Point {
    /// Wrap coordinates without checking surface membership.
    pub fn from_coords_unchecked(v: Vec3) -> Self {
        Point(v)
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    pub fn neg(&self) -> Point {
        Point(-self.0)
    }
}

impl From<Point> for Vec3 {
    fn from(p: Point) -> Self {
        p.0
    }
}
