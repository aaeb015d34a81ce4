//! Oriented geodesics, signed arc positions and cross-ratios.
//!
//! A geodesic is a central plane cut with the model surface. It is stored as
//! an orthonormal frame `(u, v)` under the ambient form, with `u` on the
//! surface and `v` a unit tangent at `u`:
//!
//! ```text
//! K = +1   γ(t) = cos t · u + sin t · v
//! K =  0   γ(t) = u + t · v            (u₃ = 1, v₃ = 0)
//! K = −1   γ(t) = cosh t · u + sinh t · v
//! ```
//!
//! Signed lengths along a geodesic are differences of the parameter `t`.

use std::f64::consts::PI;

use crate::ambient::{Geometry, Point, Vec3};
use crate::error::{GeometryError, Result};

/// Residual below which a point counts as lying on a geodesic.
pub const ON_LINE_TOL: f64 = 1e-10;
/// Coincidence / antipodality tolerance.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    geometry: Geometry,
    u: Vec3,
    v: Vec3,
}

impl Geodesic {
    /// Oriented geodesic from `p` toward `q`, with `γ(0) = p`.
    pub fn through(g: Geometry, p: &Point, q: &Point) -> Result<Self> {
        let (pv, qv) = (p.coords(), q.coords());
        let scale = pv.amax().max(qv.amax()).max(1.0);
        if (pv - qv).amax() <= DEGENERACY_TOL * scale {
            return Err(GeometryError::DegenerateInput("coincident points"));
        }
        let v = match g {
            Geometry::Euclidean => {
                let d = qv - pv;
                Vec3::new(d.x, d.y, 0.0)
            }
            _ => {
                if g == Geometry::Spherical && (pv + qv).amax() <= DEGENERACY_TOL {
                    return Err(GeometryError::DegenerateInput("antipodal points"));
                }
                qv - pv * (g.form(qv, pv) / g.form(pv, pv))
            }
        };
        let n2 = g.form(&v, &v);
        if !(n2 > (DEGENERACY_TOL * scale).powi(2)) {
            return Err(GeometryError::DegenerateInput("points do not span a geodesic"));
        }
        Ok(Geodesic { geometry: g, u: *pv, v: v / n2.sqrt() })
    }

    /// Geodesic from an explicit frame; rejects frames that are not orthonormal
    /// to 1e−12, relative to the Euclidean size of the vectors.
    pub fn from_frame(g: Geometry, u: &Point, v: Vec3) -> Result<Self> {
        let u = *u.coords();
        let orth = g.form(&u, &v).abs() / (u.norm() * v.norm()).max(1.0);
        let unit = (g.form(&v, &v) - 1.0).abs() / v.norm_squared().max(1.0);
        let flat = g == Geometry::Euclidean && v.z != 0.0;
        if orth > 1e-12 && g != Geometry::Euclidean || unit > 1e-12 || flat {
            return Err(GeometryError::DegenerateInput("frame is not orthonormal"));
        }
        Ok(Geodesic { geometry: g, u, v })
    }

    /// Geodesic cut out by the central plane `{x : m · x = 0}`, `m` given in
    /// Euclidean components.
    pub fn from_plane_normal(g: Geometry, m: &Vec3) -> Result<Self> {
        let scale = m.norm();
        if !(scale > 0.0) {
            return Err(GeometryError::DegenerateInput("zero plane normal"));
        }
        let m = m / scale;
        // Base point: the surface point of the plane closest to the model's
        // pole direction (0, 0, 1).
        let u = match g {
            Geometry::Euclidean => {
                let (a, b, c) = (m.x, m.y, m.z);
                let r2 = a * a + b * b;
                if r2 <= 1e-24 {
                    return Err(GeometryError::AtInfinity);
                }
                Vec3::new(-c * a / r2, -c * b / r2, 1.0)
            }
            _ => {
                let w = Vec3::z() - m * m.z;
                if w.norm() > 1e-8 {
                    w
                } else {
                    Vec3::x() - m * m.x
                }
            }
        };
        let u = g.renormalize(&u).map_err(|_| GeometryError::NoIntersection)?;
        let v = match g {
            Geometry::Euclidean => Vec3::new(-m.y, m.x, 0.0),
            Geometry::Spherical => m.cross(u.coords()),
            Geometry::Hyperbolic => {
                let mut w = m.cross(u.coords());
                w.z = -w.z;
                w
            }
        };
        let n2 = g.form(&v, &v);
        if !(n2 > 1e-24) {
            return Err(GeometryError::NoIntersection);
        }
        Ok(Geodesic { geometry: g, u: *u.coords(), v: v / n2.sqrt() })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn origin(&self) -> Point {
        Point::from_coords_unchecked(self.u)
    }

    pub fn direction(&self) -> &Vec3 {
        &self.v
    }

    /// Same point set, opposite orientation.
    pub fn reversed(&self) -> Self {
        Geodesic { v: -self.v, ..*self }
    }

    pub fn at(&self, t: f64) -> Point {
        Point::from_coords_unchecked(self.eval(t))
    }

    fn eval(&self, t: f64) -> Vec3 {
        match self.geometry {
            Geometry::Spherical => self.u * t.cos() + self.v * t.sin(),
            Geometry::Euclidean => self.u + self.v * t,
            Geometry::Hyperbolic => self.u * t.cosh() + self.v * t.sinh(),
        }
    }

    /// `dγ/dt`.
    pub fn tangent_at(&self, t: f64) -> Vec3 {
        match self.geometry {
            Geometry::Spherical => -self.u * t.sin() + self.v * t.cos(),
            Geometry::Euclidean => self.v,
            Geometry::Hyperbolic => self.u * t.sinh() + self.v * t.cosh(),
        }
    }

    /// Euclidean normal of the central plane, `u × v`.
    pub fn plane_normal(&self) -> Vec3 {
        self.u.cross(&self.v)
    }

    /// Parameter of the foot of `p` and the relative residual of `p` from it.
    pub fn locate(&self, p: &Point) -> (f64, f64) {
        let g = self.geometry;
        let pv = p.coords();
        let t = match g {
            Geometry::Spherical => g.form(pv, &self.v).atan2(g.form(pv, &self.u)),
            Geometry::Euclidean => (pv - self.u).dot(&self.v),
            Geometry::Hyperbolic => g.form(pv, &self.v).asinh(),
        };
        let residual = (self.eval(t) - pv).amax() / pv.amax().max(1.0);
        (t, residual)
    }

    /// Relative distance of `p` from the geodesic.
    pub fn residual(&self, p: &Point) -> f64 {
        self.locate(p).1
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.residual(p) <= ON_LINE_TOL
    }

    /// `t` with `γ(t) = p`; in (−π, π] on the sphere.
    pub fn position(&self, p: &Point) -> Result<f64> {
        let (t, residual) = self.locate(p);
        if residual > ON_LINE_TOL || !residual.is_finite() {
            return Err(GeometryError::OffCurve { residual });
        }
        Ok(t)
    }

    /// Intersection with `other`. On the sphere the two antipodal candidates
    /// are resolved toward `reference`, falling back to this geodesic's
    /// origin.
    pub fn intersect(&self, other: &Geodesic, reference: Option<&Point>) -> Result<Point> {
        let g = self.geometry;
        let (n1, n2) = (self.plane_normal(), other.plane_normal());
        let d = n1.cross(&n2);
        let scale = n1.norm() * n2.norm();
        if d.norm() <= 1e-12 * scale {
            return Err(GeometryError::DegenerateInput("coincident geodesics"));
        }
        match g {
            Geometry::Spherical => {
                let r = reference.map(|r| *r.coords()).unwrap_or(self.u);
                let d = if d.dot(&r) < 0.0 { -d } else { d };
                g.renormalize(&d)
            }
            Geometry::Euclidean => {
                if d.z.abs() <= 1e-12 * d.norm() {
                    return Err(GeometryError::NoIntersection);
                }
                g.renormalize(&d)
            }
            Geometry::Hyperbolic => {
                if g.form(&d, &d) >= -1e-12 * d.norm_squared() {
                    return Err(GeometryError::NoIntersection);
                }
                g.renormalize(&d)
            }
        }
    }
}

/// The antipode `−p`; spherical only.
pub fn antipode(g: Geometry, p: &Point) -> Result<Point> {
    match g {
        Geometry::Spherical => Ok(p.neg()),
        other => Err(GeometryError::WrongGeometry(other)),
    }
}

pub fn geodesic_through(g: Geometry, p: &Point, q: &Point) -> Result<Geodesic> {
    Geodesic::through(g, p, q)
}

pub fn arc_position(line: &Geodesic, p: &Point) -> Result<f64> {
    line.position(p)
}

/// Cross-ratio of four signed positions on one geodesic:
/// `gsin(AC)/gsin(AD) · gsin(BD)/gsin(BC)`.
pub fn cross_ratio_positions(g: Geometry, [a, b, c, d]: [f64; 4]) -> Result<f64> {
    let factors = [c - a, d - a, d - b, c - b].map(|x| g.gsin(x));
    if factors.iter().any(|f| f.abs() <= DEGENERACY_TOL) {
        return Err(GeometryError::DegenerateInput("coincident or antipodal points"));
    }
    Ok(factors[0] / factors[1] * (factors[2] / factors[3]))
}

/// `(ABCD)` along `line`.
pub fn cross_ratio_points(line: &Geodesic, pts: [&Point; 4]) -> Result<f64> {
    let mut t = [0.0; 4];
    for (slot, p) in t.iter_mut().zip(pts) {
        *slot = line.position(p)?;
    }
    wrap_positions(line.geometry(), &mut t);
    cross_ratio_positions(line.geometry(), t)
}

/// Reduce spherical position differences relative to the first position into
/// (−π, π]; gsin-based ratios do not depend on the branch.
fn wrap_positions(g: Geometry, t: &mut [f64; 4]) {
    if g == Geometry::Spherical {
        let base = t[0];
        for x in t.iter_mut().skip(1) {
            let mut d = (*x - base) % (2.0 * PI);
            if d <= -PI {
                d += 2.0 * PI;
            } else if d > PI {
                d -= 2.0 * PI;
            }
            *x = base + d;
        }
    }
}

/// Four geodesics through a common vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    vertex: Point,
    lines: [Geodesic; 4],
}

impl Pencil {
    pub fn new(vertex: Point, lines: [Geodesic; 4]) -> Result<Self> {
        for l in &lines {
            let residual = l.residual(&vertex);
            if residual > ON_LINE_TOL {
                return Err(GeometryError::OffCurve { residual });
            }
        }
        Ok(Pencil { vertex, lines })
    }

    /// Lines from `vertex` to each of `pts`.
    pub fn joining(g: Geometry, vertex: &Point, pts: [&Point; 4]) -> Result<Self> {
        let mut lines = Vec::with_capacity(4);
        for p in pts {
            lines.push(Geodesic::through(g, vertex, p)?);
        }
        let lines: [Geodesic; 4] = lines.try_into().expect("four lines");
        Ok(Pencil { vertex: *vertex, lines })
    }

    pub fn vertex(&self) -> &Point {
        &self.vertex
    }

    pub fn lines(&self) -> &[Geodesic; 4] {
        &self.lines
    }

    /// Oriented angle of each line's tangent at the vertex, measured in one
    /// orthonormal tangent frame.
    pub fn angles(&self) -> Result<[f64; 4]> {
        let g = self.lines[0].geometry();
        let dirs = self.lines.map(|l| {
            let (t, _) = l.locate(&self.vertex);
            l.tangent_at(t)
        });
        let (e1, e2) = g.tangent_frame(&self.vertex, Some(&dirs[0]));
        Ok(dirs.map(|d| g.form(&d, &e2).atan2(g.form(&d, &e1))))
    }
}

/// `sin∠ℓ₁ℓ₃ / sin∠ℓ₁ℓ₄ · sin∠ℓ₂ℓ₄ / sin∠ℓ₂ℓ₃`.
pub fn cross_ratio_pencil(pencil: &Pencil) -> Result<f64> {
    let [a1, a2, a3, a4] = pencil.angles()?;
    cross_ratio_angles([a1, a2, a3, a4])
}

pub(crate) fn cross_ratio_angles([a1, a2, a3, a4]: [f64; 4]) -> Result<f64> {
    let s = [a3 - a1, a4 - a1, a4 - a2, a3 - a2].map(f64::sin);
    if s.iter().any(|x| x.abs() <= DEGENERACY_TOL) {
        return Err(GeometryError::DegenerateInput("coincident lines in pencil"));
    }
    Ok(s[0] / s[1] * (s[2] / s[3]))
}

/// Images of `pts` (on `src`) under the perspectivity from `center` onto
/// `dst`. Spherical images are taken in the hemisphere of their source point
/// unless `reference` is given.
pub fn perspectivity(
    center: &Point,
    src: &Geodesic,
    dst: &Geodesic,
    pts: &[Point],
    reference: Option<&Point>,
) -> Result<Vec<Point>> {
    let g = src.geometry();
    if src.residual(center) <= ON_LINE_TOL || dst.residual(center) <= ON_LINE_TOL {
        return Err(GeometryError::DegenerateInput("perspectivity center on a line"));
    }
    pts.iter()
        .map(|x| {
            let residual = src.residual(x);
            if residual > ON_LINE_TOL {
                return Err(GeometryError::OffCurve { residual });
            }
            let join = Geodesic::through(g, center, x)?;
            join.intersect(dst, Some(reference.unwrap_or(x)))
        })
        .collect()
}
