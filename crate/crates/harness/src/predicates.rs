//! Named predicates evaluated against a scene's points and curves.
//!
//! Every predicate returns a real number. An assertion compares it with its
//! `expect` value through [`deviation`]; predicates ending in `_dev` and the
//! `differential:` family already return a deviation and expect 0.

use std::collections::BTreeMap;

use nalgebra::Matrix3;
use noneuclid::theorems::{butterfly, pencil_pair_deviation, transversal_points};
use noneuclid::{
    carnot_cross_ratio_product, carnot_n_product, carnot_product, chasles_deviation, conic_through_five,
    cross_ratio_pencil, cross_ratio_points, klein_coordinates, menelaus_product, perspectivity, pushforward_curve,
    CevianSextuple, Curve, Geodesic, Geometry, GeometryError, Pencil, Point, ProjectionPlane, Triangle,
};

use crate::scene::{Assertion, Relation, Scene, SceneError};

/// Prefix that turns a value predicate into a surface-vs-chart comparison.
pub const DIFFERENTIAL: &str = "differential:";

/// Name of the optional point that fixes the projection plane of a
/// spherical scene.
pub const POLE: &str = "pole";

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, EvalError>;

/// `(name, min arity, max arity)`.
const SIGNATURES: &[(&str, usize, usize)] = &[
    ("cross_ratio", 4, 4),
    ("pencil_cross_ratio", 5, 5),
    ("menelaus", 6, 6),
    ("carnot", 9, 9),
    ("carnot_cross_ratio", 11, 11),
    ("carnot_n", 6, usize::MAX),
    ("chasles", 7, 7),
    ("pencil_deviation", 6, 6),
    ("butterfly", 7, 7),
    ("butterfly_cross_ratio", 6, 6),
    ("curve_residual", 2, 2),
    ("fit_residual", 6, 6),
    ("collinearity_residual", 3, 3),
    ("cross_ratio_oracle_dev", 4, 4),
    ("cross_ratio_antipode_dev", 4, 4),
    ("cross_ratio_flip_dev", 4, 4),
    ("cross_ratio_swap_dev", 4, 4),
    ("points_pencil_dev", 5, 5),
    ("perspectivity_dev", 7, 7),
    ("carnot_identity_dev", 11, 11),
    ("projection_dev", 4, 4),
    ("pencil_projection_dev", 5, 5),
    ("klein_dev", 4, 4),
    ("incidence_dev", 3, 3),
    ("antipode_collapse_dev", 1, 1),
];

pub fn predicate_names() -> impl Iterator<Item = &'static str> {
    SIGNATURES.iter().map(|s| s.0)
}

pub fn check_signature(predicate: &str, arity: usize) -> std::result::Result<(), String> {
    let base = predicate.strip_prefix(DIFFERENTIAL).unwrap_or(predicate);
    if base.starts_with(DIFFERENTIAL) {
        return Err(format!("nested differential in `{predicate}`"));
    }
    let (_, lo, hi) = SIGNATURES
        .iter()
        .find(|s| s.0 == base)
        .ok_or_else(|| format!("unknown predicate `{predicate}`"))?;
    if arity < *lo || arity > *hi {
        return Err(format!("`{predicate}` takes {lo}..={hi} arguments, got {arity}"));
    }
    if base == "carnot_n" && (arity - 3) % 3 != 0 {
        return Err(format!("`carnot_n` takes 3 + 3n arguments, got {arity}"));
    }
    Ok(())
}

/// `|value − expect| / max(1, |expect|)`.
pub fn deviation(value: f64, expect: f64) -> f64 {
    let d = (value - expect).abs() / expect.abs().max(1.0);
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

/// A scene with every name resolved and validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub geometry: Geometry,
    pub points: BTreeMap<String, Point>,
    pub curves: BTreeMap<String, Curve>,
}

impl Resolved {
    pub fn new(scene: &Scene) -> std::result::Result<Self, SceneError> {
        let points = scene.points.keys().map(|k| Ok((k.clone(), scene.point(k)?))).collect::<std::result::Result<_, _>>()?;
        let curves = scene.curves.keys().map(|k| Ok((k.clone(), scene.curve(k)?))).collect::<std::result::Result<_, _>>()?;
        Ok(Resolved { geometry: scene.geometry, points, curves })
    }

    fn point(&self, name: &str) -> Result<&Point> {
        self.points
            .get(name)
            .ok_or_else(|| EvalError::Usage(format!("`{name}` is not a point")))
    }

    fn pts<const N: usize>(&self, args: &[String]) -> Result<[Point; N]> {
        let v = args.iter().map(|a| self.point(a).copied()).collect::<Result<Vec<_>>>()?;
        v.try_into().map_err(|_| EvalError::Usage(format!("expected {N} points")))
    }

    fn curve(&self, name: &str) -> Result<&Curve> {
        self.curves
            .get(name)
            .ok_or_else(|| EvalError::Usage(format!("`{name}` is not a curve")))
    }

    /// Plane the scene is projected onto: tangent at `pole` for a spherical
    /// scene that names one, `z = 1` otherwise.
    pub fn chart_plane(&self) -> Result<ProjectionPlane> {
        match (self.geometry, self.points.get(POLE)) {
            (Geometry::Spherical, Some(pole)) => Ok(ProjectionPlane::tangent_to_sphere(pole)?),
            _ => Ok(ProjectionPlane::z1()),
        }
    }

    /// The whole configuration centrally projected into the chart, as a
    /// Euclidean scene.
    pub fn projected(&self) -> Result<Resolved> {
        let w = self.chart_plane()?;
        let points = self
            .points
            .iter()
            .map(|(k, p)| Ok((k.clone(), w.project_to_chart(p)?)))
            .collect::<Result<_>>()?;
        let curves = self.curves.iter().map(|(k, c)| (k.clone(), pushforward_curve(c, &w).to_curve())).collect();
        Ok(Resolved { geometry: Geometry::Euclidean, points, curves })
    }
}

fn line(g: Geometry, p: &Point, q: &Point) -> Result<Geodesic> {
    Ok(Geodesic::through(g, p, q)?)
}

fn cross_ratio(g: Geometry, [a, b, c, d]: &[Point; 4]) -> Result<f64> {
    Ok(cross_ratio_points(&line(g, a, b)?, [a, b, c, d])?)
}

fn sextuple(g: Geometry, p: &[Point; 9]) -> Result<CevianSextuple> {
    let t = Triangle::new(g, &p[0], &p[1], &p[2])?;
    Ok(CevianSextuple::new(t, [p[3], p[4]], [p[5], p[6]], [p[7], p[8]])?)
}

fn chart_cross_ratio(w: &ProjectionPlane, p: &[Point; 4]) -> Result<f64> {
    let q = p.iter().map(|x| w.project_to_chart(x)).collect::<noneuclid::Result<Vec<_>>>()?;
    cross_ratio(Geometry::Euclidean, &[q[0], q[1], q[2], q[3]])
}

/// Evaluate `predicate` on `args`.
pub fn evaluate(r: &Resolved, predicate: &str, args: &[String]) -> Result<f64> {
    check_signature(predicate, args.len()).map_err(EvalError::Usage)?;
    if let Some(base) = predicate.strip_prefix(DIFFERENTIAL) {
        let surface = evaluate(r, base, args)?;
        let chart = evaluate(&r.projected()?, base, args)?;
        return Ok(deviation(surface, chart));
    }
    let g = r.geometry;
    let v = match predicate {
        "cross_ratio" => cross_ratio(g, &r.pts(args)?)?,
        "pencil_cross_ratio" => {
            let [p, a, b, c, d] = r.pts(args)?;
            cross_ratio_pencil(&Pencil::joining(g, &p, [&a, &b, &c, &d])?)?
        }
        "menelaus" => {
            let [a, b, c, x, y, z] = r.pts(args)?;
            menelaus_product(&Triangle::new(g, &a, &b, &c)?, &x, &y, &z)?
        }
        "carnot" => carnot_product(&sextuple(g, &r.pts(args)?)?)?,
        "carnot_cross_ratio" | "carnot_identity_dev" => {
            let p: [Point; 11] = r.pts(args)?;
            let s = sextuple(g, p[..9].try_into().expect("nine points"))?;
            let l = line(g, &p[9], &p[10])?;
            let cross = carnot_cross_ratio_product(&s, &l)?;
            if predicate == "carnot_cross_ratio" {
                cross
            } else {
                let [x, y, z] = transversal_points(s.triangle(), &l)?;
                let m = menelaus_product(s.triangle(), &x, &y, &z)?;
                rel(cross * carnot_product(&s)?, m * m)
            }
        }
        "carnot_n" => {
            let p = args.iter().map(|a| r.point(a).copied()).collect::<Result<Vec<_>>>()?;
            let n = (p.len() - 3) / 3;
            let t = Triangle::new(g, &p[0], &p[1], &p[2])?;
            carnot_n_product(&t, &p[3..3 + n], &p[3 + n..3 + 2 * n], &p[3 + 2 * n..])?
        }
        "chasles" => {
            let q = conic_arg(r, &args[0])?;
            let p: [Point; 6] = r.pts(&args[1..])?;
            chasles_deviation(g, &q, std::array::from_fn(|i| &p[i]))?
        }
        "pencil_deviation" => {
            let p: [Point; 6] = r.pts(args)?;
            pencil_pair_deviation(g, std::array::from_fn(|i| &p[i]))?
        }
        "butterfly" => {
            let q = conic_arg(r, &args[0])?;
            let p: [Point; 6] = r.pts(&args[1..])?;
            let b = butterfly(g, &q, std::array::from_fn(|i| &p[i]))?;
            b.defect / b.chord_length
        }
        "butterfly_cross_ratio" => {
            let [p, q, a, b, c, d] = r.pts(args)?;
            let chord = line(g, &p, &q)?;
            let x = line(g, &a, &d)?.intersect(&chord, Some(&p))?;
            let y = line(g, &b, &c)?.intersect(&chord, Some(&p))?;
            cross_ratio_points(&chord, [&p, &q, &x, &y])?
        }
        "curve_residual" => {
            let c = r.curve(&args[0])?;
            c.residual(r.point(&args[1])?.coords())
        }
        "fit_residual" => {
            let p: [Point; 6] = r.pts(args)?;
            conic_through_five([&p[0], &p[1], &p[2], &p[3], &p[4]])?.residual(p[5].coords())
        }
        "collinearity_residual" => {
            let [a, b, c] = r.pts(args)?;
            line(g, &a, &b)?.residual(&c)
        }
        "cross_ratio_oracle_dev" => {
            let p: [Point; 4] = r.pts(args)?;
            let n = line(g, &p[0], &p[1])?.plane_normal();
            let br = |i: usize, j: usize| Matrix3::from_columns(&[*p[i].coords(), *p[j].coords(), n]).determinant();
            rel(cross_ratio(g, &p)?, br(0, 2) * br(1, 3) / (br(0, 3) * br(1, 2)))
        }
        "cross_ratio_antipode_dev" => {
            let p: [Point; 4] = r.pts(args)?;
            let a = noneuclid::antipode(g, &p[0])?;
            let l = line(g, &p[0], &p[1])?;
            rel(cross_ratio_points(&l, [&a, &p[1], &p[2], &p[3]])?, cross_ratio_points(&l, [&p[0], &p[1], &p[2], &p[3]])?)
        }
        "cross_ratio_flip_dev" => {
            let [a, b, c, d] = r.pts(args)?;
            let l = line(g, &a, &b)?;
            rel(cross_ratio_points(&l.reversed(), [&a, &b, &c, &d])?, cross_ratio_points(&l, [&a, &b, &c, &d])?)
        }
        "cross_ratio_swap_dev" => {
            let [a, b, c, d] = r.pts(args)?;
            let l = line(g, &a, &b)?;
            rel(cross_ratio_points(&l, [&a, &b, &c, &d])? * cross_ratio_points(&l, [&a, &b, &d, &c])?, 1.0)
        }
        "points_pencil_dev" => {
            let [p, a, b, c, d] = r.pts(args)?;
            rel(cross_ratio_pencil(&Pencil::joining(g, &p, [&a, &b, &c, &d])?)?, cross_ratio(g, &[a, b, c, d])?)
        }
        "perspectivity_dev" => {
            let [o, d1, d2, a, b, c, d] = r.pts(args)?;
            let src = line(g, &a, &b)?;
            let dst = line(g, &d1, &d2)?;
            let img = perspectivity(&o, &src, &dst, &[a, b, c, d], None)?;
            let y = cross_ratio_points(&dst, [&img[0], &img[1], &img[2], &img[3]])?;
            rel(y, cross_ratio_points(&src, [&a, &b, &c, &d])?)
        }
        "projection_dev" => {
            let p: [Point; 4] = r.pts(args)?;
            rel(chart_cross_ratio(&r.chart_plane()?, &p)?, cross_ratio(g, &p)?)
        }
        "pencil_projection_dev" => {
            let [p, a, b, c, d] = r.pts(args)?;
            let w = r.chart_plane()?;
            let lines = [a, b, c, d].map(|x| line(g, &p, &x));
            let surface = cross_ratio_pencil(&Pencil::joining(g, &p, [&a, &b, &c, &d])?)?;
            let mut chart = Vec::with_capacity(4);
            for l in lines {
                chart.push(w.project_geodesic(&l?)?);
            }
            let chart: [Geodesic; 4] = chart.try_into().expect("four lines");
            rel(cross_ratio_pencil(&Pencil::new(w.project_to_chart(&p)?, chart)?)?, surface)
        }
        "klein_dev" => {
            if g != Geometry::Hyperbolic {
                return Err(GeometryError::WrongGeometry(g).into());
            }
            let p: [Point; 4] = r.pts(args)?;
            let k = p.map(|x| klein_coordinates(&x));
            let dir = [k[1][0] - k[0][0], k[1][1] - k[0][1]];
            let d = |i: usize, j: usize| (k[j][0] - k[i][0]) * dir[0] + (k[j][1] - k[i][1]) * dir[1];
            rel(d(0, 2) / d(0, 3) * (d(1, 3) / d(1, 2)), cross_ratio(g, &p)?)
        }
        "incidence_dev" => {
            let [a, b, x] = r.pts(args)?;
            let w = r.chart_plane()?;
            w.project_geodesic(&line(g, &a, &b)?)?.residual(&w.project_to_chart(&x)?)
        }
        "antipode_collapse_dev" => {
            let [a] = r.pts(args)?;
            let w = r.chart_plane()?;
            let (s, t) = (w.project(a.coords())?, w.project(noneuclid::antipode(g, &a)?.coords())?);
            (s[0] - t[0]).abs().max((s[1] - t[1]).abs())
        }
        other => return Err(EvalError::Usage(format!("unknown predicate `{other}`"))),
    };
    Ok(v)
}

fn conic_arg(r: &Resolved, name: &str) -> Result<noneuclid::Conic> {
    r.curve(name)?
        .as_conic()
        .copied()
        .ok_or_else(|| EvalError::Usage(format!("`{name}` is not a conic")))
}

/// Result of checking one assertion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub predicate: String,
    /// Predicate value, or the evaluation error.
    pub value: std::result::Result<f64, String>,
    pub deviation: f64,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
}

pub fn check_assertion(r: &Resolved, a: &Assertion) -> Outcome {
    let value = evaluate(r, &a.predicate, &a.args).map_err(|e| e.to_string());
    let deviation = match &value {
        Ok(v) => deviation(*v, a.expect),
        Err(_) => f64::INFINITY,
    };
    let pass = value.is_ok()
        && match a.relation {
            Relation::Within => deviation <= a.tol,
            Relation::Beyond => deviation > a.tol,
        };
    Outcome {
        label: a.label().to_string(),
        predicate: a.predicate.clone(),
        value,
        deviation,
        tol: a.tol,
        relation: a.relation,
        pass,
    }
}

/// Check every assertion of a scene.
pub fn check_scene(scene: &Scene) -> std::result::Result<Vec<Outcome>, SceneError> {
    let r = Resolved::new(scene)?;
    Ok(scene.assertions.iter().map(|a| check_assertion(&r, a)).collect())
}
