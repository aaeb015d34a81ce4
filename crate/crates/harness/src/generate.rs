//! Random scenes realizing the hypotheses of each suite.
//!
//! Every builder draws from the trial's own stream, so a scene depends only
//! on `(geometry, suite, seed, trial)`. A draw that violates a precondition
//! is discarded and redrawn from the same stream.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use noneuclid::{
    curve_through, fit_singular_values, intersect_curve_geodesic, conic_through_five, Curve, Geodesic, Geometry, Point,
};
use noneuclid::theorems::transversal_points;
use noneuclid::Triangle;

use crate::config::Tolerances;
use crate::predicates::{check_signature, evaluate, Resolved, DIFFERENTIAL, POLE};
use crate::rng::{sample_direction, sample_point, trial_rng};
use crate::scene::{Assertion, Metadata, Scene};
use crate::suite::Suite;

pub const MAX_RETRIES: u32 = 64;
/// Attempts per auxiliary line in the carnot suite.
pub const AUX_LINE_ATTEMPTS: u32 = 32;
/// Triangle draws within one resample.
pub const TRIANGLE_ATTEMPTS: usize = 32;
pub const AUX_LINES: usize = 4;
pub const DEFAULT_DEGREE: u32 = 3;
/// Smallest `|pole · p|` for spherical scenes.
pub const HEMISPHERE_MARGIN: f64 = 0.1;
/// Constructed points must stay within this sup-norm.
pub const DOMAIN: f64 = 10.0;
/// Minimum separation between points that must be distinct.
pub const SEPARATION: f64 = 0.05;
/// Smallest eigenvalue magnitude of a generating conic's normalized matrix.
pub const CONIC_CONDITION: f64 = 1e-2;
/// Smallest accepted ratio of the last nonzero fit singular value to the
/// largest.
pub const FIT_CONDITION: f64 = 1e-4;
/// Step along a side for the converse control.
pub const SIDE_SHIFT: f64 = 0.01;
/// Geodesic step off the conic for the chasles control, as a fraction of
/// the distance to the nearest base point.
pub const PUSH_OFF: f64 = 0.2;
/// The chasles cross-ratio must clear 0, 1 and ∞ by this much.
pub const PENCIL_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Request {
    pub suite: Suite,
    pub geometry: Geometry,
    pub seed: u64,
    pub trial: u64,
    pub degree: u32,
}

impl Request {
    pub fn new(suite: Suite, geometry: Geometry, seed: u64) -> Self {
        Request { suite, geometry, seed, trial: 0, degree: DEFAULT_DEGREE }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("GenerationFailed: {suite} on {geometry} (seed {seed}, trial {trial}) after {MAX_RETRIES} resamples; last rejection: {last}")]
pub struct GenerationFailed {
    pub suite: Suite,
    pub geometry: Geometry,
    pub seed: u64,
    pub trial: u64,
    pub last: String,
}

type Draw<T> = Result<T, String>;

fn reject<T>(why: impl Into<String>) -> Draw<T> {
    Err(why.into())
}

fn ensure(cond: bool, why: &str) -> Draw<()> {
    if cond {
        Ok(())
    } else {
        reject(why)
    }
}

pub fn generate_scene(req: &Request, tol: &Tolerances) -> Result<Scene, GenerationFailed> {
    let mut rng = trial_rng(req.seed, req.trial);
    let mut last = String::new();
    for retries in 0..=MAX_RETRIES {
        match attempt(req, tol, &mut rng) {
            Ok(mut scene) => {
                let swaps = match finalize(&mut scene) {
                    Ok(s) => s,
                    Err(e) => {
                        last = e;
                        continue;
                    }
                };
                scene.metadata = Some(Metadata {
                    suite: req.suite.name().to_string(),
                    seed: req.seed,
                    trial: req.trial,
                    retries,
                    antipode_swaps: swaps,
                    degree: (req.suite == Suite::CarnotN).then_some(req.degree),
                });
                return Ok(scene);
            }
            Err(e) => last = e,
        }
    }
    Err(GenerationFailed { suite: req.suite, geometry: req.geometry, seed: req.seed, trial: req.trial, last })
}

fn attempt(req: &Request, tol: &Tolerances, rng: &mut ChaCha8Rng) -> Draw<Scene> {
    let mut b = Builder { scene: Scene::new(req.geometry), suite: req.suite, tol };
    let g = req.geometry;
    match req.suite {
        Suite::CrossRatio => cross_ratio(&mut b, g, rng)?,
        Suite::Pencil => pencil(&mut b, g, rng)?,
        Suite::Projection => projection(&mut b, g, rng)?,
        Suite::Menelaus => menelaus(&mut b, g, rng)?,
        Suite::Carnot => carnot(&mut b, g, rng)?,
        Suite::Chasles => chasles(&mut b, g, rng)?,
        Suite::Butterfly => butterfly(&mut b, g, rng)?,
        Suite::CarnotN => carnot_n(&mut b, g, req.degree, rng)?,
    }
    Ok(b.scene)
}

/// Spherical scenes get a pole: the sign-aligned mean of their points, which
/// every point must clear by [`HEMISPHERE_MARGIN`]. Returns how many points
/// sit in the opposite hemisphere. Every assertion must then evaluate.
fn finalize(scene: &mut Scene) -> Draw<u32> {
    let mut swaps = 0;
    if scene.geometry == Geometry::Spherical {
        let pts: Vec<_> = scene.points.values().map(|c| noneuclid::Vec3::from(*c)).collect();
        let mut sum = noneuclid::Vec3::zeros();
        for p in &pts {
            sum += if sum.dot(p) < 0.0 { -p } else { *p };
        }
        let pole = Geometry::Spherical.renormalize(&sum).map_err(|e| e.to_string())?;
        for p in &pts {
            let d = pole.coords().dot(p);
            ensure(d.abs() >= HEMISPHERE_MARGIN, "point near the horizon of the pole")?;
            swaps += u32::from(d < 0.0);
        }
        scene.add_point(POLE, &pole);
    }
    let r = Resolved::new(scene).map_err(|e| e.to_string())?;
    for a in &scene.assertions {
        check_signature(&a.predicate, a.args.len())?;
        evaluate(&r, &a.predicate, &a.args).map_err(|e| format!("{}: {e}", a.label()))?;
    }
    Ok(swaps)
}

struct Builder<'a> {
    scene: Scene,
    suite: Suite,
    tol: &'a Tolerances,
}

impl Builder<'_> {
    fn point(&mut self, name: &str, p: &Point) {
        self.scene.add_point(name, p);
    }

    fn tol(&self, key: &str) -> f64 {
        self.tol.get(self.suite, key).unwrap_or_else(|e| panic!("{e}"))
    }

    fn within(&mut self, key: &str, predicate: &str, args: &[&str], expect: f64) {
        let a = Assertion::new(key, predicate, args, expect, self.tol(key));
        self.scene.assert(a);
    }

    fn beyond(&mut self, key: &str, predicate: &str, args: &[&str], expect: f64) {
        let a = Assertion::new(key, predicate, args, expect, self.tol(key)).beyond();
        self.scene.assert(a);
    }

    fn differential(&mut self, predicate: &str, args: &[&str]) {
        if self.scene.geometry.is_curved() {
            self.within("differential", &format!("{DIFFERENTIAL}{predicate}"), args, 0.0);
        }
    }
}

fn in_domain(p: &Point) -> bool {
    p.coords().amax() < DOMAIN
}

fn separated(g: Geometry, p: &Point, q: &Point, min: f64) -> bool {
    g.distance(p, q) > min && (g != Geometry::Spherical || g.distance(&p.neg(), q) > min)
}

fn pair<R: Rng>(g: Geometry, rng: &mut R) -> Draw<(Point, Point)> {
    let p = sample_point(g, rng);
    let q = sample_point(g, rng);
    ensure(separated(g, &p, &q, 0.2), "coincident pair")?;
    Ok((p, q))
}

fn line<R: Rng>(g: Geometry, rng: &mut R) -> Draw<Geodesic> {
    let (p, q) = pair(g, rng)?;
    Geodesic::through(g, &p, &q).map_err(|e| e.to_string())
}

fn window(g: Geometry) -> f64 {
    match g {
        Geometry::Spherical => 1.2,
        _ => 1.8,
    }
}

/// Four positions on `l`, pairwise [`SEPARATION`] apart.
fn quadruple<R: Rng>(l: &Geodesic, w: f64, rng: &mut R) -> Draw<[Point; 4]> {
    let t: [f64; 4] = std::array::from_fn(|_| rng.random_range(-w..w));
    ensure((0..4).all(|i| (0..i).all(|j| (t[i] - t[j]).abs() > SEPARATION)), "clustered positions")?;
    let p = t.map(|s| l.at(s));
    ensure(p.iter().all(in_domain), "point outside the domain")?;
    Ok(p)
}

fn off_line<R: Rng>(g: Geometry, l: &Geodesic, rng: &mut R) -> Draw<Point> {
    let p = sample_point(g, rng);
    ensure(l.residual(&p) > 0.05, "vertex on the line")?;
    Ok(p)
}

const ABCD: [&str; 4] = ["A", "B", "C", "D"];

fn cross_ratio(b: &mut Builder, g: Geometry, rng: &mut ChaCha8Rng) -> Draw<()> {
    let l = line(g, rng)?;
    let p = quadruple(&l, window(g), rng)?;
    for (n, x) in ABCD.iter().zip(&p) {
        b.point(n, x);
    }
    b.within("oracle", "cross_ratio_oracle_dev", &ABCD, 0.0);
    b.within("flip", "cross_ratio_flip_dev", &ABCD, 0.0);
    b.within("swap", "cross_ratio_swap_dev", &ABCD, 0.0);
    if g == Geometry::Spherical {
        b.within("antipode", "cross_ratio_antipode_dev", &ABCD, 0.0);
    }
    b.differential("cross_ratio", &ABCD);
    Ok(())
}

fn pencil(b: &mut Builder, g: Geometry, rng: &mut ChaCha8Rng) -> Draw<()> {
    let src = line(g, rng)?;
    let p = quadruple(&src, window(g), rng)?;
    let vertex = off_line(g, &src, rng)?;
    let center = off_line(g, &src, rng)?;
    // a line across the two outermost rays from the center meets every ray
    let t: Vec<f64> = p.iter().map(|x| src.position(x)).collect::<noneuclid::Result<_>>().map_err(|e| e.to_string())?;
    let (lo, hi) = (0..4).fold((0, 0), |(lo, hi), i| (if t[i] < t[lo] { i } else { lo }, if t[i] > t[hi] { i } else { hi }));
    let mut across = [lo, hi].into_iter().map(|i| -> Draw<Point> {
        let ray = Geodesic::through(g, &center, &p[i]).map_err(|e| e.to_string())?;
        let d = g.distance(&center, &p[i]);
        Ok(ray.at(d * rng.random_range(0.3..1.5)))
    });
    let (u, v) = (across.next().unwrap()?, across.next().unwrap()?);
    let dst = Geodesic::through(g, &u, &v).map_err(|e| e.to_string())?;
    let (d1, d2) = (dst.at(rng.random_range(-1.0..0.0)), dst.at(rng.random_range(1.0..2.0)));
    ensure(dst.residual(&center) > 0.05, "center on a line")?;
    let img = noneuclid::perspectivity(&center, &src, &dst, &p, None).map_err(|e| e.to_string())?;
    ensure(img.iter().all(in_domain), "image outside the domain")?;
    ensure(
        (0..4).all(|i| (0..i).all(|j| separated(g, &img[i], &img[j], SEPARATION))),
        "clustered images",
    )?;
    for (n, x) in ABCD.iter().zip(&p) {
        b.point(n, x);
    }
    b.point("P", &vertex);
    b.point("O", &center);
    b.point("D1", &d1);
    b.point("D2", &d2);
    b.within("points_pencil", "points_pencil_dev", &["P", "A", "B", "C", "D"], 0.0);
    b.within("perspectivity", "perspectivity_dev", &["O", "D1", "D2", "A", "B", "C", "D"], 0.0);
    b.differential("pencil_cross_ratio", &["P", "A", "B", "C", "D"]);
    Ok(())
}

/// Hyperbolic line passing within `1e-3` of the apex `(0, 0, 1)`.
fn near_apex_line<R: Rng>(rng: &mut R) -> Draw<Geodesic> {
    let h = Geometry::Hyperbolic;
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let offset: f64 = rng.random_range(-1e-3..1e-3);
    let u = h
        .renormalize(&noneuclid::Vec3::new(offset * phi.sin(), -offset * phi.cos(), 1.0))
        .map_err(|e| e.to_string())?;
    let (e1, _) = h.tangent_frame(&u, Some(&noneuclid::Vec3::new(phi.cos(), phi.sin(), 0.0)));
    Geodesic::from_frame(h, &u, e1).map_err(|e| e.to_string())
}

fn projection(b: &mut Builder, g: Geometry, rng: &mut ChaCha8Rng) -> Draw<()> {
    let l = if g == Geometry::Hyperbolic && rng.random_bool(0.25) { near_apex_line(rng)? } else { line(g, rng)? };
    let p = quadruple(&l, window(g), rng)?;
    let vertex = off_line(g, &l, rng)?;
    let x = l.at(rng.random_range(-window(g)..window(g)));
    ensure(in_domain(&x) && separated(g, &x, &p[0], SEPARATION) && separated(g, &x, &p[1], SEPARATION), "incidence point")?;
    for (n, q) in ABCD.iter().zip(&p) {
        b.point(n, q);
    }
    b.point("P", &vertex);
    b.point("X", &x);
    b.within("projection", "projection_dev", &ABCD, 0.0);
    b.within("pencil", "pencil_projection_dev", &["P", "A", "B", "C", "D"], 0.0);
    b.within("incidence", "incidence_dev", &["A", "B", "X"], 0.0);
    match g {
        Geometry::Hyperbolic => b.within("klein", "klein_dev", &ABCD, 0.0),
        Geometry::Spherical => b.within("antipode_collapse", "antipode_collapse_dev", &["A"], 0.0),
        Geometry::Euclidean => {}
    }
    b.differential("pencil_cross_ratio", &["P", "A", "B", "C", "D"]);
    Ok(())
}

/// A triangle with sides at least `0.3` long and every vertex well off the
/// opposite side.
fn triangle<R: Rng>(g: Geometry, rng: &mut R) -> Draw<Triangle> {
    let mut last = reject("no triangle drawn");
    for _ in 0..TRIANGLE_ATTEMPTS {
        last = triangle_once(g, rng);
        if last.is_ok() {
            break;
        }
    }
    last
}

fn triangle_once<R: Rng>(g: Geometry, rng: &mut R) -> Draw<Triangle> {
    let v: [Point; 3] = std::array::from_fn(|_| sample_point(g, rng));
    ensure((0..3).all(|i| separated(g, &v[i], &v[(i + 1) % 3], 0.3)), "short side")?;
    let t = Triangle::new(g, &v[0], &v[1], &v[2]).map_err(|e| e.to_string())?;
    ensure(t.sides().iter().zip(t.vertices()).all(|(s, v)| s.line().residual(v) > 0.25), "flat triangle")?;
    Ok(t)
}

/// Fraction of a side away from both endpoints, outside and inside.
fn fraction<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..3) {
        0 => rng.random_range(-0.5..-0.1),
        1 => rng.random_range(0.1..0.9),
        _ => rng.random_range(1.1..1.5),
    }
}

/// The point at fraction `s` of side `i`, measured from its first vertex.
fn on_side(t: &Triangle, i: usize, s: f64) -> Point {
    let line = t.side(i).line();
    let end = line.position(&t.vertices()[(i + 2) % 3]).expect("vertex on its side");
    line.at(s * end)
}

fn clear_of_vertices(t: &Triangle, p: &Point) -> bool {
    t.vertices().iter().all(|v| separated(t.geometry(), v, p, SEPARATION)) && in_domain(p)
}

fn all_separated(g: Geometry, pts: &[Point]) -> bool {
    (0..pts.len()).all(|i| (0..i).all(|j| separated(g, &pts[i], &pts[j], SEPARATION)))
}

fn put_triangle(b: &mut Builder, t: &Triangle) {
    for (n, v) in ["A", "B", "C"].iter().zip(t.vertices()) {
        b.point(n, v);
    }
}

fn menelaus(b: &mut Builder, g: Geometry, rng: &mut ChaCha8Rng) -> Draw<()> {
    let t = triangle(g, rng)?;
    let l = if rng.random_bool(0.5) {
        line(g, rng)?
    } else {
        // inside one side, then past the far end of the next: meets the third
        let i = rng.random_range(0..3);
        let p = on_side(&t, i, rng.random_range(0.1..0.9));
        let q = on_side(&t, (i + 1) % 3, rng.random_range(1.1..1.5));
        Geodesic::through(g, &p, &q).map_err(|e| e.to_string())?
    };
    ensure(t.vertices().iter().all(|v| l.residual(v) > 0.05), "transversal through a vertex")?;
    let x = transversal_points(&t, &l).map_err(|e| e.to_string())?;
    ensure(x.iter().all(|p| clear_of_vertices(&t, p)), "transversal point near a vertex")?;

    let c: [Point; 3] = std::array::from_fn(|i| on_side(&t, i, fraction(rng)));
    let join = Geodesic::through(g, &c[0], &c[1]).map_err(|e| e.to_string())?;
    ensure(join.residual(&c[2]) > b.tol("collinearity_control"), "control is collinear")?;

    put_triangle(b, &t);
    for (n, p) in ["X", "Y", "Z"].iter().zip(&x) {
        b.point(n, p);
    }
    for (n, p) in ["Xc", "Yc", "Zc"].iter().zip(&c) {
        b.point(n, p);
    }
    let args = ["A", "B", "C", "X", "Y", "Z"];
    b.within("menelaus", "menelaus", &args, -1.0);
    b.beyond("collinearity_control", "collinearity_residual", &["Xc", "Yc", "Zc"], 0.0);
    b.beyond("menelaus_control", "menelaus", &["A", "B", "C", "Xc", "Yc", "Zc"], -1.0);
    b.differential("menelaus", &args);
    Ok(())
}

/// Another crossing of `curve` with side `i`, away from `known`.
fn other_crossing(curve: &Curve, t: &Triangle, i: usize, known: &[Point]) -> Draw<Point> {
    let line = t.side(i).line();
    let g = t.geometry();
    let roots = intersect_curve_geodesic(curve, line).map_err(|e| e.to_string())?;
    let p = roots
        .into_iter()
        .map(|r| line.at(r))
        .find(|p| known.iter().all(|k| separated(g, p, k, SEPARATION)))
        .ok_or("no further crossing")?;
    ensure(clear_of_vertices(t, &p), "crossing near a vertex")?;
    Ok(p)
}

/// Six side points on one conic: two on each of BC and CA and one on AB fix
/// the conic, whose second crossing of AB completes the sextuple.
fn conic_sextuple<R: Rng>(t: &Triangle, rng: &mut R) -> Draw<(noneuclid::Conic, [Point; 6])> {
    let g = t.geometry();
    let fixed = [0, 0, 1, 1, 2].map(|i| on_side(t, i, fraction(rng)));
    ensure(fixed.iter().all(|p| clear_of_vertices(t, p)), "side point outside the domain")?;
    ensure(all_separated(g, &fixed), "clustered side points")?;
    let conic = conic_through_five(std::array::from_fn(|i| &fixed[i])).map_err(|e| e.to_string())?;
    ensure(well_conditioned(&conic), "nearly degenerate conic")?;
    let c2 = other_crossing(&Curve::Conic(conic), t, 2, &fixed[4..])?;
    let [a1, a2, b1, b2, c1] = fixed;
    let pts = [a1, a2, b1, b2, c1, c2];
    ensure(all_separated(g, &pts), "clustered side points")?;
    Ok((conic, pts))
}

/// Far from every line pair: the normalized matrix has no small eigenvalue.
fn well_conditioned(q: &noneuclid::Conic) -> bool {
    let min = q.matrix().symmetric_eigenvalues().iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
    min >= CONIC_CONDITION * q.matrix().norm()
}

const SEXTUPLE: [&str; 6] = ["A1", "A2", "B1", "B2", "C1", "C2"];

fn carnot(b: &mut Builder, g: Geometry, rng: &mut ChaCha8Rng) -> Draw<()> {
    let t = triangle(g, rng)?;
    let (conic, pts) = conic_sextuple(&t, rng)?;

    let side = t.side(0).line();
    let ta = side.position(&pts[0]).map_err(|e| e.to_string())?;
    let size = rng.random_range(SIDE_SHIFT..10.0 * SIDE_SHIFT);
    let shift = if rng.random_bool(0.5) { size } else { -size };
    let moved = side.at(ta + shift);
    ensure(clear_of_vertices(&t, &moved), "shifted point near a vertex")?;
    ensure(separated(g, &moved, &pts[1], SEPARATION), "shifted onto the other crossing")?;

    let mut aux = Vec::with_capacity(AUX_LINES);
    for _ in 0..AUX_LINES {
        let mut found = None;
        for _ in 0..AUX_LINE_ATTEMPTS {
            let Ok((p, q)) = pair(g, rng) else { continue };
            let Ok(l) = Geodesic::through(g, &p, &q) else { continue };
            if !t.vertices().iter().all(|v| l.residual(v) > 1e-2) {
                continue;
            }
            match transversal_points(&t, &l) {
                Ok(x) if x.iter().all(in_domain) => {
                    found = Some((p, q));
                    break;
                }
                _ => {}
            }
        }
        aux.push(found.ok_or("no admissible auxiliary line")?);
    }

    put_triangle(b, &t);
    for (n, p) in SEXTUPLE.iter().zip(&pts) {
        b.point(n, p);
    }
    b.point("A1s", &moved);
    b.scene.add_curve("Q", &Curve::Conic(conic));

    let mut args = vec!["A", "B", "C"];
    args.extend(SEXTUPLE);
    let mut shifted = args.clone();
    shifted[3] = "A1s";

    b.within("carnot", "carnot", &args, 1.0);
    for n in SEXTUPLE {
        b.within("construction", "curve_residual", &["Q", n], 0.0);
    }
    b.within("fit", "fit_residual", &SEXTUPLE, 0.0);
    b.beyond("carnot_control", "carnot", &shifted, 1.0);
    b.beyond("fit_control", "fit_residual", &["A2", "B1", "B2", "C1", "C2", "A1s"], 0.0);
    for (k, (p, q)) in aux.iter().enumerate() {
        let (np, nq) = (format!("L{k}p"), format!("L{k}q"));
        b.point(&np, p);
        b.point(&nq, q);
        let mut with_line = args.clone();
        with_line.extend([np.as_str(), nq.as_str()]);
        b.within("cross_ratio", "carnot_cross_ratio", &with_line, 1.0);
        let mut shifted_line = shifted.clone();
        shifted_line.extend([np.as_str(), nq.as_str()]);
        b.within("identity", "carnot_identity_dev", &shifted_line, 0.0);
    }
    b.differential("carnot", &args);
    Ok(())
}

/// Walk `step` from `p` in the surface direction leaving `curve` fastest.
fn push_off(g: Geometry, curve: &Curve, p: &Point, step: f64) -> Draw<Point> {
    let grad = curve.gradient(p.coords());
    let (e1, e2) = g.tangent_frame(p, None);
    let d = e1 * grad.dot(&e1) + e2 * grad.dot(&e2);
    let norm = g.form(&d, &d).sqrt();
    ensure(norm > 0.0 && norm.is_finite(), "flat gradient")?;
    Ok(Geodesic::from_frame(g, p, d / norm).map_err(|e| e.to_string())?.at(step))
}

fn chasles(b: &mut Builder, g: Geometry, rng: &mut ChaCha8Rng) -> Draw<()> {
    let t = triangle(g, rng)?;
    let (conic, pts) = conic_sextuple(&t, rng)?;
    ensure(!conic.is_degenerate(), "degenerate conic")?;
    let mut order = SEXTUPLE;
    order.shuffle(rng);
    let last = SEXTUPLE.iter().position(|n| *n == order[5]).expect("permutation");
    let curve = Curve::Conic(conic);
    let at = |n: &str| &pts[SEXTUPLE.iter().position(|m| *m == n).expect("sextuple name")];
    let pencil = noneuclid::Pencil::joining(g, at(order[4]), [at(order[0]), at(order[1]), at(order[2]), at(order[3])])
        .map_err(|e| e.to_string())?;
    let lambda = noneuclid::cross_ratio_pencil(&pencil).map_err(|e| e.to_string())?;
    ensure(
        lambda.abs() > PENCIL_MARGIN && (lambda - 1.0).abs() > PENCIL_MARGIN && lambda.abs() < 1.0 / PENCIL_MARGIN,
        "pencil with nearly coincident lines",
    )?;
    let reach = order[..4]
        .iter()
        .map(|n| g.distance(at(n), &pts[last]))
        .fold(f64::INFINITY, f64::min);
    let off = push_off(g, &curve, &pts[last], PUSH_OFF * reach)?;
    ensure(in_domain(&off), "control outside the domain")?;

    for (n, p) in SEXTUPLE.iter().zip(&pts) {
        b.point(n, p);
    }
    b.point("Fc", &off);
    b.scene.add_curve("Q", &curve);
    let mut args = vec!["Q"];
    args.extend(order);
    b.within("chasles", "chasles", &args, 0.0);
    let mut control = order.to_vec();
    control[5] = "Fc";
    b.beyond("chasles_control", "pencil_deviation", &control, 0.0);
    b.differential("pencil_cross_ratio", &[order[4], order[0], order[1], order[2], order[3]]);
    Ok(())
}

/// Two crossings of `curve` with the geodesic through `m` in direction `d`.
fn chord_through<R: Rng>(g: Geometry, curve: &Curve, m: &Point, rng: &mut R) -> Draw<(Geodesic, [Point; 2])> {
    let d = sample_direction(g, m, rng);
    let l = Geodesic::from_frame(g, m, d).map_err(|e| e.to_string())?;
    let roots = intersect_curve_geodesic(curve, &l).map_err(|e| e.to_string())?;
    let first = *roots.first().ok_or("chord misses the conic")?;
    let second = roots
        .iter()
        .copied()
        .find(|r| g.gsin(r - first).abs() > 0.1)
        .ok_or("near-tangent chord")?;
    let pts = [l.at(first), l.at(second)];
    ensure(pts.iter().all(in_domain), "chord end outside the domain")?;
    Ok((l, pts))
}

fn butterfly(b: &mut Builder, g: Geometry, rng: &mut ChaCha8Rng) -> Draw<()> {
    let five: [Point; 5] = std::array::from_fn(|_| sample_point(g, rng));
    ensure(all_separated(g, &five), "clustered conic points")?;
    let conic = conic_through_five(std::array::from_fn(|i| &five[i])).map_err(|e| e.to_string())?;
    ensure(!conic.is_degenerate(), "degenerate conic")?;
    let curve = Curve::Conic(conic);
    let [p, q, ..] = five;
    ensure(g.distance(&p, &q) > 0.3, "short chord")?;
    let pq = Geodesic::through(g, &p, &q).map_err(|e| e.to_string())?;
    let m = pq.at(0.5 * pq.position(&q).map_err(|e| e.to_string())?);
    let (l1, [a, bb]) = chord_through(g, &curve, &m, rng)?;
    let (l2, [c, d]) = chord_through(g, &curve, &m, rng)?;
    let angle = |x: &Geodesic, y: &Geodesic| x.plane_normal().normalize().cross(&y.plane_normal().normalize()).norm();
    ensure(angle(&l1, &pq) > 0.05 && angle(&l2, &pq) > 0.05 && angle(&l1, &l2) > 0.05, "chords nearly coincide")?;
    ensure(all_separated(g, &[p, q, a, bb, c, d]), "clustered chord ends")?;
    let ad = Geodesic::through(g, &a, &d).map_err(|e| e.to_string())?;
    let bc = Geodesic::through(g, &bb, &c).map_err(|e| e.to_string())?;
    ensure(angle(&ad, &pq) > 0.05 && angle(&bc, &pq) > 0.05, "crossing chord nearly parallel to PQ")?;
    ensure(well_conditioned(&conic), "ill-conditioned conic")?;
    for l in [&ad, &bc] {
        let x = pq.intersect(l, Some(&m)).map_err(|e| e.to_string())?;
        ensure(in_domain(&x), "chord crossing outside the domain")?;
    }

    for (n, x) in ["P", "Qp", "A", "B", "C", "D"].iter().zip([p, q, a, bb, c, d]) {
        b.point(n, &x);
    }
    b.scene.add_curve("Q", &curve);
    b.within("butterfly", "butterfly", &["Q", "P", "Qp", "A", "B", "C", "D"], 0.0);
    b.differential("butterfly_cross_ratio", &["P", "Qp", "A", "B", "C", "D"]);
    Ok(())
}

/// `3n` side points on one degree-`n` curve: `n` on BC, `n` on CA, `n − 1`
/// on AB and `(n − 1)(n − 2)/2` free points fix the curve, and a further
/// crossing of AB completes the set.
fn carnot_n(b: &mut Builder, g: Geometry, n: u32, rng: &mut ChaCha8Rng) -> Draw<()> {
    ensure((1..=3).contains(&n), "degree must be 1, 2 or 3")?;
    let t = triangle(g, rng)?;
    let n_us = n as usize;
    let mut sides: [Vec<Point>; 3] = Default::default();
    for (i, side) in sides.iter_mut().enumerate() {
        let count = if i == 2 { n_us - 1 } else { n_us };
        *side = (0..count).map(|_| on_side(&t, i, fraction(rng))).collect();
    }
    let free = (n_us - 1) * n_us.saturating_sub(2) / 2;
    let extra: Vec<Point> = (0..free).map(|_| sample_point(g, rng)).collect();
    let fit: Vec<Point> = sides.iter().flatten().chain(&extra).copied().collect();
    ensure(fit.iter().all(|p| in_domain(p)), "point outside the domain")?;
    ensure(sides.iter().flatten().all(|p| clear_of_vertices(&t, p)), "side point near a vertex")?;
    ensure(all_separated(g, &fit), "clustered points")?;
    let coords: Vec<_> = fit.iter().map(|p| *p.coords()).collect();
    let sv = fit_singular_values(n, &coords);
    ensure(sv[sv.len() - 2] >= FIT_CONDITION * sv[0], "ill-conditioned fit")?;
    let curve = Curve::from_general(curve_through(n, &coords).map_err(|e| e.to_string())?);
    let last = other_crossing(&curve, &t, 2, &sides[2])?;
    sides[2].push(last);
    let all: Vec<Point> = sides.iter().flatten().copied().collect();
    ensure(all_separated(g, &all), "clustered side points")?;

    put_triangle(b, &t);
    let mut args = vec!["A".to_string(), "B".to_string(), "C".to_string()];
    for (letter, side) in ["A", "B", "C"].iter().zip(&sides) {
        for (k, p) in side.iter().enumerate() {
            let name = format!("{letter}{}", k + 1);
            b.point(&name, p);
            args.push(name);
        }
    }
    for (k, p) in extra.iter().enumerate() {
        b.point(&format!("E{}", k + 1), p);
    }
    b.scene.add_curve("F", &curve);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    b.within("carnot_n", "carnot_n", &args, sign);
    match n {
        1 => b.within("reduction", "menelaus", &args, -1.0),
        2 => b.within("reduction", "carnot", &args, 1.0),
        _ => {}
    }
    b.differential("carnot_n", &args);
    Ok(())
}
