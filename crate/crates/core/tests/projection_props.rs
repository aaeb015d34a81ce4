mod common;

use common::*;
use nalgebra::Vector3;
use noneuclid::{
    cross_ratio_pencil, cross_ratio_points, hemisphere_normalize, klein_coordinates, project_point, pushforward_curve,
    Conic, Curve, Geodesic, Geometry, Pencil, Point, ProjectionPlane,
};
use proptest::prelude::*;

fn plane() -> impl Strategy<Value = ProjectionPlane> {
    (-0.3f64..0.3, -0.3f64..0.3, 0.8f64..1.5).prop_map(|(x, y, z)| ProjectionPlane::new(Vector3::new(x, y, z)).unwrap())
}

fn chart_cross_ratio(w: &ProjectionPlane, p: &[Point; 4]) -> f64 {
    let q = p.map(|x| w.project_to_chart(&x).unwrap());
    let line = Geodesic::through(Geometry::Euclidean, &q[0], &q[1]).unwrap();
    cross_ratio_points(&line, [&q[0], &q[1], &q[2], &q[3]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn sphere_cross_ratio_survives_projection((line, t) in collinear_quadruple(Geometry::Spherical), w in plane()) {
        let raw = t.map(|s| line.at(s));
        let pole = Geometry::Spherical.renormalize(w.normal()).unwrap();
        let p: [Point; 4] = hemisphere_normalize(&raw, &pole).unwrap().try_into().unwrap();
        prop_assume!(p.iter().all(|x| w.normal().dot(x.coords()) > 0.05));
        let surface = cross_ratio_points(&line, [&raw[0], &raw[1], &raw[2], &raw[3]]).unwrap();
        prop_assert!(rel(chart_cross_ratio(&w, &p), surface) <= 1e-9);
    }

    #[test]
    fn hyperbolic_cross_ratio_survives_projection((line, t) in collinear_quadruple(Geometry::Hyperbolic)) {
        let p = t.map(|s| line.at(s));
        let surface = cross_ratio_points(&line, [&p[0], &p[1], &p[2], &p[3]]).unwrap();
        prop_assert!(rel(chart_cross_ratio(&ProjectionPlane::z1(), &p), surface) <= 1e-9);
    }

    #[test]
    fn lines_near_the_apex(phi in 0.0..std::f64::consts::TAU, offset in -1e-3f64..1e-3, t in proptest::array::uniform4(-1.5f64..1.5)) {
        prop_assume!((0..4).all(|i| (0..i).all(|j| (t[i] - t[j]).abs() > 0.05)));
        let h = Geometry::Hyperbolic;
        let u = h.renormalize(&Vector3::new(offset * phi.sin(), -offset * phi.cos(), 1.0)).unwrap();
        let line = Geodesic::from_frame(h, &u, {
            let (e1, _) = h.tangent_frame(&u, Some(&Vector3::new(phi.cos(), phi.sin(), 0.0)));
            e1
        }).unwrap();
        let p = t.map(|s| line.at(s));
        let surface = cross_ratio_points(&line, [&p[0], &p[1], &p[2], &p[3]]).unwrap();
        prop_assert!(rel(chart_cross_ratio(&ProjectionPlane::z1(), &p), surface) <= 1e-9);
    }

    #[test]
    fn klein_chords((line, t) in collinear_quadruple(Geometry::Hyperbolic)) {
        let p = t.map(|s| line.at(s));
        let k = p.map(|x| klein_coordinates(&x));
        let d = |i: usize, j: usize| {
            // signed along the chord direction
            let dir = [k[1][0] - k[0][0], k[1][1] - k[0][1]];
            (k[j][0] - k[i][0]) * dir[0] + (k[j][1] - k[i][1]) * dir[1]
        };
        let chordal = d(0, 2) / d(0, 3) * (d(1, 3) / d(1, 2));
        let surface = cross_ratio_points(&line, [&p[0], &p[1], &p[2], &p[3]]).unwrap();
        prop_assert!(rel(chordal, surface) <= 1e-9);
        prop_assert!(k.iter().all(|s| s[0] * s[0] + s[1] * s[1] < 1.0));
    }

    #[test]
    fn pencils_survive_projection(
        (g, vertex, dirs) in curved().prop_flat_map(|g| (Just(g), point(g), proptest::array::uniform4(0.0..std::f64::consts::PI)))
    ) {
        prop_assume!((0..4).all(|i| (0..i).all(|j| (dirs[i] - dirs[j]).abs() > 0.05)));
        let lines = dirs.map(|a| {
            let (e1, e2) = g.tangent_frame(&vertex, None);
            Geodesic::from_frame(g, &vertex, e1 * a.cos() + e2 * a.sin()).unwrap()
        });
        let surface = cross_ratio_pencil(&Pencil::new(vertex, lines).unwrap()).unwrap();
        let w = ProjectionPlane::z1();
        let v = w.project_to_chart(&vertex).unwrap();
        let images = lines.map(|l| w.project_geodesic(&l).unwrap());
        let planar = cross_ratio_pencil(&Pencil::new(v, images).unwrap()).unwrap();
        prop_assert!(rel(planar, surface) <= 1e-9, "{g} {planar} {surface}");
    }

    #[test]
    fn incidence_survives_projection((_g, (line, t)) in curved().prop_flat_map(|g| (Just(g), collinear_quadruple(g)))) {
        let w = ProjectionPlane::z1();
        let image = w.project_geodesic(&line).unwrap();
        for s in t {
            let q = w.project_to_chart(&line.at(s)).unwrap();
            prop_assert!(image.residual(&q) <= 1e-8);
        }
    }

    #[test]
    fn antipodes_collapse(p in point(Geometry::Spherical), w in plane()) {
        prop_assert_eq!(project_point(&p, &w).unwrap(), project_point(&p.neg(), &w).unwrap());
    }

    #[test]
    fn pushforward_keeps_zeros(
        (g, coeffs, (p, q)) in curved().prop_flat_map(|g| (Just(g), proptest::array::uniform6(-1.0f64..1.0), point_pair(g)))
    ) {
        let curve = Curve::Conic(Conic::from_coeffs(&coeffs).unwrap());
        let line = Geodesic::through(g, &p, &q).unwrap();
        let w = ProjectionPlane::z1();
        let image = pushforward_curve(&curve, &w);
        for t in noneuclid::intersect_curve_geodesic(&curve, &line).unwrap() {
            let x = line.at(t);
            if w.normal().dot(x.coords()).abs() < 0.05 {
                continue;
            }
            let s = project_point(&x, &w).unwrap();
            prop_assert!(image.residual(s) <= 1e-8, "{}", image.residual(s));
        }
    }
}
