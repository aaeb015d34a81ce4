//! Conics and degree-n curves as homogeneous cones.
//!
//! A curve on any of the three model surfaces is the zero set of a
//! homogeneous polynomial `F(x, y, z)` cut with the surface. Degree-2 curves
//! are stored as symmetric matrices, everything else as a coefficient vector
//! over the monomials `xᵃyᵇzᶜ` (`a + b + c = n`) in graded-lex order:
//! `x², xy, xz, y², yz, z²` for `n = 2`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, Matrix3};

use crate::ambient::{Geometry, Point, Vec3};
use crate::error::{GeometryError, Result};
use crate::incidence::Geodesic;

/// `|det Q|` at or below this (after normalization) marks a degenerate conic.
pub const DEGENERATE_DET_TOL: f64 = 1e-10;
/// Relative singular value threshold for null space detection.
pub const NULLITY_TOL: f64 = 1e-10;
/// Samples for the degree ≥ 3 root scan.
pub const SCAN_SAMPLES: usize = 2048;
/// Residual target for polished roots.
pub const ROOT_RESIDUAL: f64 = 1e-12;

pub fn monomial_count(n: u32) -> usize {
    ((n + 1) * (n + 2) / 2) as usize
}

/// Exponents `[a, b, c]` in graded-lex order.
pub fn monomials(n: u32) -> impl Iterator<Item = [u32; 3]> {
    (0..=n).rev().flat_map(move |a| (0..=n - a).rev().map(move |b| [a, b, n - a - b]))
}

pub fn monomial_index(n: u32, [a, b, _]: [u32; 3]) -> usize {
    let m = (n - a) as usize;
    m * (m + 1) / 2 + (m - b as usize)
}

fn powers(x: f64, n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 1.0;
    for _ in 0..=n {
        out.push(acc);
        acc *= x;
    }
    out
}

fn normalize_sign(c: &mut [f64]) -> Result<()> {
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(GeometryError::DegenerateInput("zero polynomial"));
    }
    let first = c.iter().copied().find(|x| *x != 0.0).unwrap_or(1.0);
    let s = norm.copysign(first);
    c.iter_mut().for_each(|x| *x /= s);
    Ok(())
}

/// Homogeneous polynomial of degree `n` on ℝ³, unit coefficient norm.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeNCurve {
    degree: u32,
    coeffs: Vec<f64>,
}

impl DegreeNCurve {
    pub fn new(degree: u32, coeffs: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(GeometryError::DegenerateInput("degree must be positive"));
        }
        if coeffs.len() != monomial_count(degree) {
            return Err(GeometryError::DegenerateInput("wrong coefficient count for degree"));
        }
        let mut coeffs = coeffs;
        normalize_sign(&mut coeffs)?;
        Ok(DegreeNCurve { degree, coeffs })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, e: [u32; 3]) -> f64 {
        self.coeffs[monomial_index(self.degree, e)]
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 3], f64)> + '_ {
        monomials(self.degree).zip(self.coeffs.iter().copied())
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, p: &Vec3) -> f64 {
        let n = self.degree;
        let (px, py, pz) = (powers(p.x, n), powers(p.y, n), powers(p.z, n));
        self.terms()
            .map(|([a, b, c], k)| k * px[a as usize] * py[b as usize] * pz[c as usize])
            .sum()
    }

    pub fn gradient(&self, p: &Vec3) -> Vec3 {
        let n = self.degree;
        let (px, py, pz) = (powers(p.x, n), powers(p.y, n), powers(p.z, n));
        let mut g = Vec3::zeros();
        for ([a, b, c], k) in self.terms() {
            let (a, b, c) = (a as usize, b as usize, c as usize);
            if a > 0 {
                g.x += k * a as f64 * px[a - 1] * py[b] * pz[c];
            }
            if b > 0 {
                g.y += k * b as f64 * px[a] * py[b - 1] * pz[c];
            }
            if c > 0 {
                g.z += k * c as f64 * px[a] * py[b] * pz[c - 1];
            }
        }
        g
    }

    /// Scale-free residual `|F(p)| / (max|coeff| · ‖p‖∞ⁿ)`.
    pub fn residual(&self, p: &Vec3) -> f64 {
        scaled_residual(self.eval(p), self.max_coeff(), p, self.degree)
    }

    /// `G(q) = F(M q)`.
    pub fn compose_linear(&self, m: &Matrix3<f64>) -> DegreeNCurve {
        let n = self.degree;
        let rows: Vec<Vec<f64>> = (0..3).map(|k| vec![m[(k, 0)], m[(k, 1)], m[(k, 2)]]).collect();
        // powers of each linear form, as homogeneous polynomials
        let pow_tables: Vec<Vec<Vec<f64>>> = rows
            .iter()
            .map(|row| {
                let mut table = vec![vec![1.0]];
                for d in 1..=n {
                    let next = poly_mul(&table[(d - 1) as usize], d - 1, row, 1);
                    table.push(next);
                }
                table
            })
            .collect();
        let mut out = vec![0.0; monomial_count(n)];
        for ([a, b, c], k) in self.terms() {
            if k == 0.0 {
                continue;
            }
            let ab = poly_mul(&pow_tables[0][a as usize], a, &pow_tables[1][b as usize], b);
            let abc = poly_mul(&ab, a + b, &pow_tables[2][c as usize], c);
            out.iter_mut().zip(abc).for_each(|(o, x)| *o += k * x);
        }
        DegreeNCurve::new(n, out).unwrap_or(DegreeNCurve { degree: n, coeffs: vec![0.0; monomial_count(n)] })
    }
}

/// Product of homogeneous polynomials in graded-lex storage.
fn poly_mul(p: &[f64], dp: u32, q: &[f64], dq: u32) -> Vec<f64> {
    let n = dp + dq;
    let mut out = vec![0.0; monomial_count(n)];
    for (ep, cp) in monomials(dp).zip(p) {
        if *cp == 0.0 {
            continue;
        }
        for (eq, cq) in monomials(dq).zip(q) {
            let e = [ep[0] + eq[0], ep[1] + eq[1], ep[2] + eq[2]];
            out[monomial_index(n, e)] += cp * cq;
        }
    }
    out
}

fn scaled_residual(value: f64, max_coeff: f64, p: &Vec3, degree: u32) -> f64 {
    let scale = max_coeff * p.amax().powi(degree as i32);
    if scale > 0.0 {
        value.abs() / scale
    } else {
        value.abs()
    }
}

/// Quadratic cone `pᵀ Q p = 0`, Frobenius-normalized with the first nonzero
/// upper-triangle entry positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    q: Matrix3<f64>,
}

impl Conic {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let sym = (m + m.transpose()) * 0.5;
        let mut upper = [sym[(0, 0)], sym[(0, 1)], sym[(0, 2)], sym[(1, 1)], sym[(1, 2)], sym[(2, 2)]];
        let fro = sym.norm();
        if !(fro > 0.0) || !fro.is_finite() {
            return Err(GeometryError::DegenerateInput("zero conic"));
        }
        let first = upper.iter().copied().find(|x| *x != 0.0).unwrap_or(1.0);
        let s = fro.copysign(first);
        upper.iter_mut().for_each(|x| *x /= s);
        let [a, b, c, d, e, f] = upper;
        Ok(Conic { q: Matrix3::new(a, b, c, b, d, e, c, e, f) })
    }

    pub fn diagonal(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&Vec3::new(a, b, c)))
    }

    /// From graded-lex coefficients `[x², xy, xz, y², yz, z²]`.
    pub fn from_coeffs(c: &[f64; 6]) -> Result<Self> {
        let [xx, xy, xz, yy, yz, zz] = *c;
        Self::new(Matrix3::new(xx, xy / 2.0, xz / 2.0, xy / 2.0, yy, yz / 2.0, xz / 2.0, yz / 2.0, zz))
    }

    pub fn coeffs(&self) -> [f64; 6] {
        let q = &self.q;
        [q[(0, 0)], 2.0 * q[(0, 1)], 2.0 * q[(0, 2)], q[(1, 1)], 2.0 * q[(1, 2)], q[(2, 2)]]
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.q
    }

    pub fn determinant(&self) -> f64 {
        self.q.determinant()
    }

    pub fn is_degenerate(&self) -> bool {
        self.determinant().abs() <= DEGENERATE_DET_TOL
    }

    pub fn eval(&self, p: &Vec3) -> f64 {
        p.dot(&(self.q * p))
    }

    pub fn gradient(&self, p: &Vec3) -> Vec3 {
        self.q * p * 2.0
    }

    pub fn max_coeff(&self) -> f64 {
        self.q.amax()
    }

    pub fn residual(&self, p: &Vec3) -> f64 {
        scaled_residual(self.eval(p), self.max_coeff(), p, 2)
    }

    /// Distance to `other` up to sign, Frobenius.
    pub fn distance_up_to_sign(&self, other: &Conic) -> f64 {
        (self.q - other.q).norm().min((self.q + other.q).norm())
    }
}

/// Either representation; degree 2 inputs always become [`Conic`].
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    Conic(Conic),
    General(DegreeNCurve),
}

impl Curve {
    pub fn from_coeffs(degree: u32, coeffs: &[f64]) -> Result<Self> {
        if degree == 2 {
            let c: [f64; 6] = coeffs
                .try_into()
                .map_err(|_| GeometryError::DegenerateInput("wrong coefficient count for degree"))?;
            return Conic::from_coeffs(&c).map(Curve::Conic);
        }
        DegreeNCurve::new(degree, coeffs.to_vec()).map(Curve::General)
    }

    pub fn from_general(c: DegreeNCurve) -> Self {
        if c.degree() == 2 {
            let coeffs: [f64; 6] = c.coeffs().try_into().expect("six coefficients");
            if let Ok(conic) = Conic::from_coeffs(&coeffs) {
                return Curve::Conic(conic);
            }
        }
        Curve::General(c)
    }

    pub fn degree(&self) -> u32 {
        match self {
            Curve::Conic(_) => 2,
            Curve::General(c) => c.degree(),
        }
    }

    pub fn coeffs(&self) -> Vec<f64> {
        match self {
            Curve::Conic(c) => c.coeffs().to_vec(),
            Curve::General(c) => c.coeffs().to_vec(),
        }
    }

    pub fn as_conic(&self) -> Option<&Conic> {
        match self {
            Curve::Conic(c) => Some(c),
            Curve::General(_) => None,
        }
    }

    pub fn to_general(&self) -> DegreeNCurve {
        match self {
            Curve::Conic(c) => DegreeNCurve::new(2, c.coeffs().to_vec()).expect("nonzero conic"),
            Curve::General(c) => c.clone(),
        }
    }

    pub fn eval(&self, p: &Vec3) -> f64 {
        match self {
            Curve::Conic(c) => c.eval(p),
            Curve::General(c) => c.eval(p),
        }
    }

    pub fn gradient(&self, p: &Vec3) -> Vec3 {
        match self {
            Curve::Conic(c) => c.gradient(p),
            Curve::General(c) => c.gradient(p),
        }
    }

    pub fn residual(&self, p: &Vec3) -> f64 {
        match self {
            Curve::Conic(c) => c.residual(p),
            Curve::General(c) => c.residual(p),
        }
    }
}

impl From<Conic> for Curve {
    fn from(c: Conic) -> Self {
        Curve::Conic(c)
    }
}

impl From<DegreeNCurve> for Curve {
    fn from(c: DegreeNCurve) -> Self {
        Curve::General(c)
    }
}

pub fn curve_residual(curve: &Curve, p: &Point) -> f64 {
    curve.residual(p.coords())
}

/// Monomial matrix of `pts` with unit rows; the null space is unchanged and
/// the rows are comparable.
fn monomial_matrix(degree: u32, pts: &[Vec3]) -> DMatrix<f64> {
    let cols = monomial_count(degree);
    let rows = pts.len().max(cols);
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    for (i, p) in pts.iter().enumerate() {
        let p = p / p.amax().max(1e-300);
        let (px, py, pz) = (powers(p.x, degree), powers(p.y, degree), powers(p.z, degree));
        let mut norm = 0.0;
        for (j, [x, y, z]) in monomials(degree).enumerate() {
            let v = px[x as usize] * py[y as usize] * pz[z as usize];
            a[(i, j)] = v;
            norm += v * v;
        }
        let norm = norm.sqrt();
        for j in 0..cols {
            a[(i, j)] /= norm;
        }
    }
    a
}

/// Singular values of the degree-`degree` fit through `pts`, largest first.
pub fn fit_singular_values(degree: u32, pts: &[Vec3]) -> Vec<f64> {
    let mut s: Vec<f64> = monomial_matrix(degree, pts).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Null vector of the monomial matrix of `pts`: the unique degree-`n` cone
/// through them.
pub fn curve_through(degree: u32, pts: &[Vec3]) -> Result<DegreeNCurve> {
    let cols = monomial_count(degree);
    if pts.len() + 1 < cols {
        return Err(GeometryError::IllConditioned { nullity: cols - pts.len(), singular_values: vec![] });
    }
    let a = monomial_matrix(degree, pts);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = sigma.iter().fold(0.0f64, |m, s| m.max(*s));
    let small: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] <= NULLITY_TOL * sigma_max).collect();
    if small.len() != 1 {
        let mut sorted = sigma.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        return Err(GeometryError::IllConditioned { nullity: small.len(), singular_values: sorted });
    }
    let null: Vec<f64> = v_t.row(small[0]).iter().copied().collect();
    DegreeNCurve::new(degree, null)
}

/// The conic through five points in general position.
pub fn conic_through_five(pts: [&Point; 5]) -> Result<Conic> {
    let v: Vec<Vec3> = pts.iter().map(|p| *p.coords()).collect();
    let c = curve_through(2, &v)?;
    let coeffs: [f64; 6] = c.coeffs().try_into().expect("six coefficients");
    Conic::from_coeffs(&coeffs)
}

/// A projective root `(α : β)` of `h(α, β) = F(α u + β v)` mapped to the
/// arc parameters it represents on `line`.
fn projective_root_positions(g: Geometry, alpha: f64, beta: f64, out: &mut Vec<f64>) {
    match g {
        Geometry::Spherical => {
            let mut t = beta.atan2(alpha);
            if t > FRAC_PI_2 {
                t -= PI;
            } else if t <= -FRAC_PI_2 {
                t += PI;
            }
            out.push(t);
            out.push(if t > 0.0 { t - PI } else { t + PI });
        }
        Geometry::Euclidean => {
            if alpha.abs() > 1e-14 * beta.abs() {
                out.push(beta / alpha);
            }
        }
        Geometry::Hyperbolic => {
            let tau = beta / alpha;
            if alpha != 0.0 && tau.abs() < 1.0 {
                out.push(tau.atanh());
            }
        }
    }
}

fn homogeneous_on(line: &Geodesic, theta: f64) -> Vec3 {
    line.origin().coords() * theta.cos() + line.direction() * theta.sin()
}

fn polish(curve: &Curve, line: &Geodesic, t0: f64) -> f64 {
    let value = |t: f64| {
        let p = line.at(t);
        (curve.eval(p.coords()), curve.residual(p.coords()))
    };
    let (mut t, (_, mut best)) = (t0, value(t0));
    for _ in 0..8 {
        if best <= ROOT_RESIDUAL * 1e-3 {
            break;
        }
        let p = line.at(t);
        let (f, _) = value(t);
        let df = curve.gradient(p.coords()).dot(&line.tangent_at(t));
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let next = t - f / df;
        let (_, r) = value(next);
        if !(r < best) {
            break;
        }
        t = next;
        best = r;
    }
    t
}

/// Every arc parameter `t` with `F(γ(t)) = 0`, ascending.
///
/// Degrees 1 and 2 are solved in closed form in the projective parameter
/// `τ = tan t` (sphere), `tanh t` (hyperboloid) or `t` (plane). Higher degrees
/// scan 2048 samples of `θ` with `γ ∝ cos θ · u + sin θ · v`, then bisect and
/// Newton-polish. A scan can miss root pairs closer than one step.
pub fn intersect_curve_geodesic(curve: &Curve, line: &Geodesic) -> Result<Vec<f64>> {
    let g = line.geometry();
    let (lo, hi) = match g {
        Geometry::Hyperbolic => (-FRAC_PI_4, FRAC_PI_4),
        _ => (-FRAC_PI_2, FRAC_PI_2),
    };
    let degree = curve.degree();
    let samples = if degree <= 2 { 16 } else { SCAN_SAMPLES };
    let thetas: Vec<f64> = (0..=samples).map(|k| lo + (hi - lo) * k as f64 / samples as f64).collect();
    let values: Vec<f64> = thetas.iter().map(|&th| curve.eval(&homogeneous_on(line, th))).collect();
    let max_residual = thetas
        .iter()
        .map(|&th| curve.residual(&homogeneous_on(line, th)))
        .fold(0.0, f64::max);
    if max_residual <= ROOT_RESIDUAL {
        return Err(GeometryError::IdenticallyZero);
    }

    let mut raw = Vec::new();
    let u = line.origin();
    let v = line.direction();
    match (degree, curve) {
        (1, _) => {
            let (fu, fv) = (curve.eval(u.coords()), curve.eval(v));
            projective_root_positions(g, fv, -fu, &mut raw);
        }
        (2, Curve::Conic(c)) => {
            let q = c.matrix();
            let a = u.coords().dot(&(q * u.coords()));
            let b = u.coords().dot(&(q * v));
            let cc = v.dot(&(q * v));
            // c τ² + 2 b τ + a = 0 with τ = β / α; roots as (α, β) pairs
            let disc = b * b - a * cc;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                let qq = -(b + sq.copysign(b));
                if qq == 0.0 {
                    if a == 0.0 {
                        projective_root_positions(g, 1.0, 0.0, &mut raw);
                    } else {
                        projective_root_positions(g, 0.0, 1.0, &mut raw);
                    }
                } else {
                    projective_root_positions(g, cc, qq, &mut raw);
                    if disc > 0.0 {
                        projective_root_positions(g, qq, a, &mut raw);
                    }
                }
            }
        }
        _ => {
            for k in 0..samples {
                let (f0, f1) = (values[k], values[k + 1]);
                let (mut a, mut b) = (thetas[k], thetas[k + 1]);
                if f0 == 0.0 {
                    if !(g == Geometry::Hyperbolic && k == 0) {
                        push_theta(g, a, &mut raw);
                    }
                    continue;
                }
                if f0.signum() == f1.signum() || f1 == 0.0 {
                    continue;
                }
                let mut fa = f0;
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let fm = curve.eval(&homogeneous_on(line, m));
                    if fm == 0.0 {
                        a = m;
                        b = m;
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                push_theta(g, 0.5 * (a + b), &mut raw);
            }
            if g != Geometry::Hyperbolic && values[samples] == 0.0 {
                push_theta(g, thetas[samples], &mut raw);
            }
        }
    }

    let mut roots: Vec<f64> = raw.into_iter().map(|t| polish(curve, line, t)).collect();
    if g == Geometry::Spherical {
        for t in roots.iter_mut() {
            if *t <= -PI {
                *t += 2.0 * PI;
            } else if *t > PI {
                *t -= 2.0 * PI;
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    if g == Geometry::Spherical && roots.len() > 1 {
        let (first, last) = (roots[0], roots[roots.len() - 1]);
        if (first + 2.0 * PI - last).abs() <= 1e-12 {
            roots.pop();
        }
    }
    Ok(roots)
}

fn push_theta(g: Geometry, theta: f64, out: &mut Vec<f64>) {
    projective_root_positions(g, theta.cos(), theta.sin(), out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn monomial_order_and_index() {
        let m: Vec<_> = monomials(2).collect();
        assert_eq!(m, vec![[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]]);
        for n in 1..6 {
            for (i, e) in monomials(n).enumerate() {
                assert_eq!(monomial_index(n, e), i);
            }
            assert_eq!(monomials(n).count(), monomial_count(n));
        }
    }

    #[test]
    fn conic_normalization() {
        let c = Conic::diagonal(-2.0, -2.0, 2.0).unwrap();
        assert_relative_eq!(c.matrix().norm(), 1.0, epsilon = 1e-15);
        assert!(c.matrix()[(0, 0)] > 0.0);
        assert!(!c.is_degenerate());
        let line_pair = Conic::diagonal(1.0, -1.0, 0.0).unwrap();
        assert!(line_pair.is_degenerate());
    }

    #[test]
    fn conic_coeff_round_trip() {
        let c = Conic::from_coeffs(&[1.0, 0.4, -0.2, 2.0, 0.6, -1.5]).unwrap();
        let d = Conic::from_coeffs(&c.coeffs()).unwrap();
        assert!(c.distance_up_to_sign(&d) < 1e-15);
        let g = Curve::Conic(c).to_general();
        let p = Vec3::new(0.3, -0.8, 1.7);
        assert_relative_eq!(g.eval(&p) / g.coeffs()[0], c.eval(&p) / c.coeffs()[0], max_relative = 1e-13);
    }

    #[test]
    fn residual_examples() {
        let equator = Curve::Conic(Conic::diagonal(0.0, 0.0, 1.0).unwrap());
        assert_eq!(equator.residual(&Vec3::x()), 0.0);
        let c = Curve::Conic(Conic::diagonal(1.0, 1.0, -1.0).unwrap());
        assert_eq!(c.residual(&Vec3::new(0.6, 0.8, 1.0)), 0.0);
        assert_relative_eq!(c.residual(&Vec3::z()), 1.0, epsilon = 1e-15);
        // scale invariance in p and in F
        let p = Vec3::new(0.2, 0.5, 0.9);
        assert_relative_eq!(c.residual(&p), c.residual(&(p * 7.0)), max_relative = 1e-14);
        let c2 = Curve::from_coeffs(2, &[3.0, 0.0, 0.0, 3.0, 0.0, -3.0]).unwrap();
        assert_relative_eq!(c.residual(&p), c2.residual(&p), max_relative = 1e-14);
    }

    #[test]
    fn homogeneity_and_gradient() {
        let f = DegreeNCurve::new(3, (0..10).map(|i| (i as f64 * 0.7).sin()).collect()).unwrap();
        let p = Vec3::new(0.3, -1.2, 0.8);
        assert_relative_eq!(f.eval(&(p * 1.7)), 1.7f64.powi(3) * f.eval(&p), max_relative = 1e-13);
        let h = 1e-6;
        let g = f.gradient(&p);
        for k in 0..3 {
            let mut e = Vec3::zeros();
            e[k] = h;
            let fd = (f.eval(&(p + e)) - f.eval(&(p - e))) / (2.0 * h);
            assert_relative_eq!(g[k], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn compose_linear_matches_substitution() {
        let f = DegreeNCurve::new(3, (0..10).map(|i| (i as f64 * 1.3).cos()).collect()).unwrap();
        let m = Matrix3::new(0.5, -0.2, 1.0, 0.3, 0.9, -0.4, -0.7, 0.1, 0.6);
        let g = f.compose_linear(&m);
        for q in [Vec3::new(0.1, 0.2, 0.3), Vec3::new(-1.0, 0.5, 2.0)] {
            let ratio = g.eval(&q) / f.eval(&(m * q));
            let ratio2 = g.eval(&(q * -0.4 + Vec3::x())) / f.eval(&(m * (q * -0.4 + Vec3::x())));
            assert_relative_eq!(ratio, ratio2, max_relative = 1e-12);
        }
    }

    #[test]
    fn fit_unit_circle() {
        let e = Geometry::Euclidean;
        let pts: Vec<Point> = [0.1f64, 1.3, 2.2, 3.9, 5.0].iter().map(|a| e.point(a.cos(), a.sin(), 1.0).unwrap()).collect();
        let c = conic_through_five([&pts[0], &pts[1], &pts[2], &pts[3], &pts[4]]).unwrap();
        let expected = Conic::diagonal(1.0, 1.0, -1.0).unwrap();
        assert!(c.distance_up_to_sign(&expected) < 1e-12);
        for p in &pts {
            assert!(c.residual(p.coords()) <= 1e-10);
        }
    }

    #[test]
    fn fit_rejects_collinear_quadruple() {
        let e = Geometry::Euclidean;
        let pts: Vec<Point> = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (-1.0, -1.0), (0.5, 3.0)]
            .iter()
            .map(|&(x, y)| e.point(x, y, 1.0).unwrap())
            .collect();
        let r = conic_through_five([&pts[0], &pts[1], &pts[2], &pts[3], &pts[4]]);
        assert!(matches!(r, Err(GeometryError::IllConditioned { nullity: 2, .. })), "{r:?}");
    }

    #[test]
    fn fit_rejects_equatorial_points() {
        let s = Geometry::Spherical;
        let pts: Vec<Point> = [0.0f64, 0.7, 1.5, 2.9, 4.4].iter().map(|a| s.point(a.cos(), a.sin(), 0.0).unwrap()).collect();
        let r = conic_through_five([&pts[0], &pts[1], &pts[2], &pts[3], &pts[4]]);
        assert!(matches!(r, Err(GeometryError::IllConditioned { nullity: 3, .. })), "{r:?}");
    }

    #[test]
    fn intersect_circle_with_chart_axis() {
        let e = Geometry::Euclidean;
        let c = Curve::Conic(Conic::diagonal(1.0, 1.0, -1.0).unwrap());
        let l = Geodesic::through(e, &e.point(0.0, 0.0, 1.0).unwrap(), &e.point(1.0, 0.0, 1.0).unwrap()).unwrap();
        let roots = intersect_curve_geodesic(&c, &l).unwrap();
        assert_eq!(roots.len(), 2);
        assert_relative_eq!(roots[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(roots[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn intersect_sphere_meridian() {
        let s = Geometry::Spherical;
        let c = Curve::Conic(Conic::diagonal(1.0, 1.0, -1.0).unwrap());
        let l = Geodesic::through(s, &s.point(1.0, 0.0, 0.0).unwrap(), &s.point(0.0, 0.0, 1.0).unwrap()).unwrap();
        let roots = intersect_curve_geodesic(&c, &l).unwrap();
        let expected = [-3.0 * FRAC_PI_4, -FRAC_PI_4, FRAC_PI_4, 3.0 * FRAC_PI_4];
        assert_eq!(roots.len(), 4, "{roots:?}");
        for (r, e) in roots.iter().zip(expected) {
            assert_relative_eq!(*r, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn intersect_sphere_root_at_quarter_turn() {
        // z = 0 and x = 0 as a line pair: γ(t) = (cos t, 0, sin t) meets x = 0 at t = ±π/2
        let s = Geometry::Spherical;
        let c = Curve::Conic(Conic::new(Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)).unwrap());
        let l = Geodesic::through(s, &s.point(1.0, 0.0, 0.0).unwrap(), &s.point(0.0, 0.0, 1.0).unwrap()).unwrap();
        let roots = intersect_curve_geodesic(&c, &l).unwrap();
        assert_eq!(roots.len(), 4, "{roots:?}");
        for (r, e) in roots.iter().zip([-FRAC_PI_2, 0.0, FRAC_PI_2, PI]) {
            assert!((r - e).abs() < 1e-14, "{roots:?}");
        }
    }

    #[test]
    fn intersect_hyperbolic_outside_light_cone_is_empty() {
        let h = Geometry::Hyperbolic;
        let c = Curve::Conic(Conic::diagonal(1.0, 1.0, -4.0).unwrap());
        for m in [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.3, 1.0, 0.5), Vec3::new(-1.0, 0.2, -0.9)] {
            let l = Geodesic::from_plane_normal(h, &m).unwrap();
            assert!(intersect_curve_geodesic(&c, &l).unwrap().is_empty());
        }
    }

    #[test]
    fn line_on_curve_is_identically_zero() {
        let e = Geometry::Euclidean;
        let c = Curve::from_coeffs(1, &[0.0, 1.0, 0.0]).unwrap();
        let l = Geodesic::through(e, &e.point(-1.0, 0.0, 1.0).unwrap(), &e.point(1.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(intersect_curve_geodesic(&c, &l), Err(GeometryError::IdenticallyZero));
    }

    #[test]
    fn cubic_scan_finds_three_roots() {
        // (x − 0.5z)(x + 0.3z)(x − 1.2z) on the chart x-axis
        let e = Geometry::Euclidean;
        let lin = |r: f64| DegreeNCurve::new(1, vec![1.0, 0.0, -r]).unwrap();
        let prod = poly_mul(&poly_mul(lin(0.5).coeffs(), 1, lin(-0.3).coeffs(), 1), 2, lin(1.2).coeffs(), 1);
        let c = Curve::General(DegreeNCurve::new(3, prod).unwrap());
        let l = Geodesic::through(e, &e.point(0.0, 0.0, 1.0).unwrap(), &e.point(1.0, 0.0, 1.0).unwrap()).unwrap();
        let roots = intersect_curve_geodesic(&c, &l).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, x) in roots.iter().zip([-0.3, 0.5, 1.2]) {
            assert_relative_eq!(*r, x, epsilon = 1e-13);
        }
    }
}
