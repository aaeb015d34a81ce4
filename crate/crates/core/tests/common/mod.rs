#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use noneuclid::{Geodesic, Geometry, Point};
use proptest::prelude::*;

pub fn geometry() -> impl Strategy<Value = Geometry> {
    prop_oneof![Just(Geometry::Spherical), Just(Geometry::Euclidean), Just(Geometry::Hyperbolic)]
}

pub fn curved() -> impl Strategy<Value = Geometry> {
    prop_oneof![Just(Geometry::Spherical), Just(Geometry::Hyperbolic)]
}

/// Random surface point; sphere points are kept in the upper cap `z > 0.2`.
pub fn point(g: Geometry) -> BoxedStrategy<Point> {
    match g {
        Geometry::Spherical => (0.0..2.0 * PI, 0.2f64..1.0)
            .prop_map(|(phi, z)| {
                let r = (1.0 - z * z).sqrt();
                Geometry::Spherical.point(r * phi.cos(), r * phi.sin(), z).unwrap()
            })
            .boxed(),
        Geometry::Euclidean => (-2.0f64..2.0, -2.0f64..2.0)
            .prop_map(|(x, y)| Geometry::Euclidean.point(x, y, 1.0).unwrap())
            .boxed(),
        Geometry::Hyperbolic => (0.0f64..2.0, 0.0..2.0 * PI)
            .prop_map(|(r, th)| {
                Geometry::Hyperbolic.renormalize(&Vector3::new(r.sinh() * th.cos(), r.sinh() * th.sin(), r.cosh())).unwrap()
            })
            .boxed(),
    }
}

pub fn point_pair(g: Geometry) -> impl Strategy<Value = (Point, Point)> {
    (point(g), point(g)).prop_filter("well separated", move |(p, q)| g.distance(p, q) > 0.2)
}

/// Geodesic with four positions on it, pairwise at least `0.05` apart.
pub fn collinear_quadruple(g: Geometry) -> impl Strategy<Value = (Geodesic, [f64; 4])> {
    let window = match g {
        Geometry::Spherical => 1.2,
        _ => 1.8,
    };
    (point_pair(g), proptest::array::uniform4(-window..window))
        .prop_filter("separated positions", |(_, t): &((Point, Point), [f64; 4])| {
            (0..4).all(|i| (0..i).all(|j| (t[i] - t[j]).abs() > 0.05))
        })
        .prop_map(move |((p, q), t)| (Geodesic::through(g, &p, &q).unwrap(), t))
}

/// Determinant cross-ratio of four vectors in one central plane, with the
/// plane's normal completing each bracket.
pub fn det_cross_ratio(pts: [&Vector3<f64>; 4], normal: &Vector3<f64>) -> f64 {
    let br = |p: &Vector3<f64>, q: &Vector3<f64>| Matrix3::from_columns(&[*p, *q, *normal]).determinant();
    let [a, b, c, d] = pts;
    br(a, c) * br(b, d) / (br(a, d) * br(b, c))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
