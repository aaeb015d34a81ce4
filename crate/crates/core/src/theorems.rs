//! Left-hand sides of the incidence theorems: Menelaus, Carnot, the
//! cross-ratio form of Carnot, Chasles, the Butterfly and degree-n Carnot.
//!
//! Everything returns a number. Thresholds are the caller's business.

use std::f64::consts::PI;

use crate::ambient::{Geometry, Point};
use crate::curves::Conic;
use crate::error::{GeometryError, Result};
use crate::incidence::{cross_ratio_pencil, cross_ratio_points, Geodesic, Pencil, ON_LINE_TOL};

/// Vertex-to-opposite-side residual below which a triangle is flat.
pub const COLLINEAR_TOL: f64 = 1e-8;
/// `|gsin|` at or below this in a denominator is a degenerate configuration.
pub const DENOMINATOR_TOL: f64 = 1e-12;
/// Curve residual accepted as "on the conic".
pub const ON_CONIC_TOL: f64 = 1e-8;

/// One side of a triangle: the oriented geodesic from `from` to `to`, with
/// `γ(0) = from` and `γ(end) = to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Side {
    line: Geodesic,
    end: f64,
}

impl Side {
    fn new(g: Geometry, from: &Point, to: &Point) -> Result<Self> {
        let line = Geodesic::through(g, from, to)?;
        let end = line.position(to)?;
        Ok(Side { line, end })
    }

    pub fn line(&self) -> &Geodesic {
        &self.line
    }

    /// `gsin(from X) / gsin(X to)`.
    pub fn ratio(&self, x: &Point) -> Result<f64> {
        let g = self.line.geometry();
        let t = self.line.position(x)?;
        let num = g.gsin(t);
        let den = g.gsin(self.end - t);
        if den.abs() <= DENOMINATOR_TOL || num.abs() <= DENOMINATOR_TOL {
            return Err(GeometryError::DegenerateInput("side point at a vertex"));
        }
        Ok(num / den)
    }

    fn check_interior(&self, x: &Point) -> Result<()> {
        let g = self.line.geometry();
        let t = self.line.position(x)?;
        if g.gsin(t).abs() <= ON_LINE_TOL || g.gsin(self.end - t).abs() <= ON_LINE_TOL {
            return Err(GeometryError::DegenerateInput("side point at a vertex"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    geometry: Geometry,
    vertices: [Point; 3],
    /// line(B,C), line(C,A), line(A,B)
    sides: [Side; 3],
}

impl Triangle {
    pub fn new(g: Geometry, a: &Point, b: &Point, c: &Point) -> Result<Self> {
        let sides = [Side::new(g, b, c)?, Side::new(g, c, a)?, Side::new(g, a, b)?];
        for (side, v) in sides.iter().zip([a, b, c]) {
            if side.line.residual(v) <= COLLINEAR_TOL {
                return Err(GeometryError::DegenerateInput("collinear vertices"));
            }
        }
        Ok(Triangle { geometry: g, vertices: [*a, *b, *c], sides })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn vertices(&self) -> &[Point; 3] {
        &self.vertices
    }

    /// Side opposite vertex `i` (0 = A): line(B,C), line(C,A), line(A,B).
    pub fn side(&self, i: usize) -> &Side {
        &self.sides[i]
    }

    pub fn sides(&self) -> &[Side; 3] {
        &self.sides
    }
}

fn side_product(t: &Triangle, a: &[Point], b: &[Point], c: &[Point]) -> Result<f64> {
    let [bc, ca, ab] = &t.sides;
    let mut product = 1.0;
    for (side, pts) in [(ab, c), (bc, a), (ca, b)] {
        for p in pts {
            product *= side.ratio(p)?;
        }
    }
    Ok(product)
}

/// `gsin(AC_ℓ)/gsin(C_ℓB) · gsin(BA_ℓ)/gsin(A_ℓC) · gsin(CB_ℓ)/gsin(B_ℓA)`;
/// −1 exactly when the three points are collinear.
pub fn menelaus_product(t: &Triangle, a_l: &Point, b_l: &Point, c_l: &Point) -> Result<f64> {
    side_product(t, std::slice::from_ref(a_l), std::slice::from_ref(b_l), std::slice::from_ref(c_l))
}

/// Two points on each side: `a` on line(B,C), `b` on line(C,A), `c` on line(A,B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CevianSextuple {
    triangle: Triangle,
    a: [Point; 2],
    b: [Point; 2],
    c: [Point; 2],
}

impl CevianSextuple {
    pub fn new(triangle: Triangle, a: [Point; 2], b: [Point; 2], c: [Point; 2]) -> Result<Self> {
        for (side, pts) in triangle.sides.iter().zip([&a, &b, &c]) {
            for p in pts {
                side.check_interior(p)?;
            }
        }
        Ok(CevianSextuple { triangle, a, b, c })
    }

    pub fn triangle(&self) -> &Triangle {
        &self.triangle
    }

    pub fn a(&self) -> &[Point; 2] {
        &self.a
    }

    pub fn b(&self) -> &[Point; 2] {
        &self.b
    }

    pub fn c(&self) -> &[Point; 2] {
        &self.c
    }

    /// `[A₁, A₂, B₁, B₂, C₁, C₂]`.
    pub fn points(&self) -> [Point; 6] {
        [self.a[0], self.a[1], self.b[0], self.b[1], self.c[0], self.c[1]]
    }
}

/// Six-factor product; 1 exactly when the six points lie on a conic.
pub fn carnot_product(s: &CevianSextuple) -> Result<f64> {
    side_product(&s.triangle, &s.a, &s.b, &s.c)
}

/// `(ABC_ℓC₁)(ABC_ℓC₂)(BCA_ℓA₁)(BCA_ℓA₂)(CAB_ℓB₁)(CAB_ℓB₂)` where
/// `A_ℓ, B_ℓ, C_ℓ` are the crossings of `l` with the side lines.
///
/// Equals `menelaus² / carnot_product`, so it is 1 exactly when the Carnot
/// product is.
pub fn carnot_cross_ratio_product(s: &CevianSextuple, l: &Geodesic) -> Result<f64> {
    let t = &s.triangle;
    let [va, vb, vc] = &t.vertices;
    for v in &t.vertices {
        if l.residual(v) <= COLLINEAR_TOL {
            return Err(GeometryError::DegenerateInput("auxiliary line through a vertex"));
        }
    }
    let [bc, ca, ab] = &t.sides;
    let a_l = bc.line.intersect(l, Some(vb))?;
    let b_l = ca.line.intersect(l, Some(vc))?;
    let c_l = ab.line.intersect(l, Some(va))?;
    let mut product = 1.0;
    for p in &s.c {
        product *= cross_ratio_points(&ab.line, [va, vb, &c_l, p])?;
    }
    for p in &s.a {
        product *= cross_ratio_points(&bc.line, [vb, vc, &a_l, p])?;
    }
    for p in &s.b {
        product *= cross_ratio_points(&ca.line, [vc, va, &b_l, p])?;
    }
    Ok(product)
}

/// Crossings of `l` with line(B,C), line(C,A), line(A,B).
pub fn transversal_points(t: &Triangle, l: &Geodesic) -> Result<[Point; 3]> {
    let [va, vb, vc] = &t.vertices;
    let [bc, ca, ab] = &t.sides;
    Ok([bc.line.intersect(l, Some(vb))?, ca.line.intersect(l, Some(vc))?, ab.line.intersect(l, Some(va))?])
}

/// Pencil cross-ratios `(EA, EB, EC, ED)` and `(FA, FB, FC, FD)`, relative
/// disagreement. No conic is consulted.
pub fn pencil_pair_deviation(g: Geometry, pts: [&Point; 6]) -> Result<f64> {
    let [a, b, c, d, e, f] = pts;
    let x = cross_ratio_pencil(&Pencil::joining(g, e, [a, b, c, d])?)?;
    let y = cross_ratio_pencil(&Pencil::joining(g, f, [a, b, c, d])?)?;
    Ok((x - y).abs() / x.abs().max(1.0))
}

/// [`pencil_pair_deviation`] after checking that all six points lie on the
/// non-degenerate conic `q`.
pub fn chasles_deviation(g: Geometry, q: &Conic, pts: [&Point; 6]) -> Result<f64> {
    if q.is_degenerate() {
        return Err(GeometryError::DegenerateInput("degenerate conic"));
    }
    for p in pts {
        let residual = q.residual(p.coords());
        if residual > ON_CONIC_TOL {
            return Err(GeometryError::OffCurve { residual });
        }
    }
    pencil_pair_deviation(g, pts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Butterfly {
    /// Chord P→Q.
    pub chord: Geodesic,
    pub midpoint: Point,
    pub x: Point,
    pub y: Point,
    /// Arc length of PQ.
    pub chord_length: f64,
    /// `|XM − MY|` in arc-length units.
    pub defect: f64,
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d <= -PI {
        d += 2.0 * PI;
    } else if d > PI {
        d -= 2.0 * PI;
    }
    d
}

/// Butterfly construction on chord PQ with chords AB, CD through its midpoint.
pub fn butterfly(g: Geometry, q: &Conic, pts: [&Point; 6]) -> Result<Butterfly> {
    let [p, qpt, a, b, c, d] = pts;
    for x in pts {
        let residual = q.residual(x.coords());
        if residual > ON_CONIC_TOL {
            return Err(GeometryError::OffCurve { residual });
        }
    }
    let chord = Geodesic::through(g, p, qpt)?;
    let t_q = chord.position(qpt)?;
    let t_m = 0.5 * t_q;
    let m = chord.at(t_m);
    let ab = Geodesic::through(g, a, b)?;
    let cd = Geodesic::through(g, c, d)?;
    let normal = |l: &Geodesic| l.plane_normal().normalize();
    let (n_pq, n_ab, n_cd) = (normal(&chord), normal(&ab), normal(&cd));
    for (u, v) in [(n_pq, n_ab), (n_pq, n_cd), (n_ab, n_cd)] {
        if u.cross(&v).norm() <= ON_LINE_TOL {
            return Err(GeometryError::DegenerateInput("coincident chords"));
        }
    }
    let x = Geodesic::through(g, a, d)?.intersect(&chord, Some(&m))?;
    let y = Geodesic::through(g, b, c)?.intersect(&chord, Some(&m))?;
    let (t_x, t_y) = (chord.position(&x)?, chord.position(&y)?);
    let (xm, my) = match g {
        Geometry::Spherical => (wrap(t_m - t_x), wrap(t_y - t_m)),
        _ => (t_m - t_x, t_y - t_m),
    };
    Ok(Butterfly { chord, midpoint: m, x, y, chord_length: t_q.abs(), defect: (xm - my).abs() })
}

/// Midpoint defect `|XM − MY|` of the Butterfly construction.
pub fn butterfly_check(g: Geometry, q: &Conic, pts: [&Point; 6]) -> Result<f64> {
    butterfly(g, q, pts).map(|b| b.defect)
}

/// `∏ₖ gsin(AC_k)/gsin(C_kB) · gsin(BA_k)/gsin(A_kC) · gsin(CB_k)/gsin(B_kA)`;
/// `(−1)ⁿ` exactly when the `3n` points lie on a curve of degree `n`.
///
/// Points are labeled as in [`carnot_product`]: `a` on line(B,C), `b` on
/// line(C,A), `c` on line(A,B). The other common labeling gives the
/// reciprocal.
pub fn carnot_n_product(t: &Triangle, a: &[Point], b: &[Point], c: &[Point]) -> Result<f64> {
    let n = a.len();
    if n == 0 || b.len() != n || c.len() != n {
        return Err(GeometryError::DegenerateInput("need n ≥ 1 points on every side"));
    }
    side_product(t, a, b, c)
}
