//! Chart-coordinate polylines of a scene for external plotting.
//!
//! Points are projected into the chosen plane; each curve's pushforward is
//! traced by marching squares over a grid covering the projected points.

use std::collections::HashMap;
use std::io::{self, Write};
use std::str::FromStr;

use noneuclid::{pushforward_curve, Geometry, PlanarCurve, ProjectionPlane, Vec3};

use crate::predicates::{Resolved, POLE};
use crate::scene::{format_num, Scene, SceneError};

pub const DEFAULT_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaneSpec {
    /// `z = 1`.
    Z1,
    /// Tangent to the sphere at the scene's `pole` point.
    Pole,
    /// `{x : n · x = 1}`.
    Normal(Vec3),
}

impl FromStr for PlaneSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "z=1" => Ok(PlaneSpec::Z1),
            "pole" => Ok(PlaneSpec::Pole),
            other => {
                let v: Vec<f64> = other
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| format!("plane must be `z=1`, `pole` or a normal `a,b,c`, got `{other}`"))?;
                match v.as_slice() {
                    [a, b, c] => Ok(PlaneSpec::Normal(Vec3::new(*a, *b, *c))),
                    _ => Err(format!("plane normal needs three components, got `{other}`")),
                }
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("invalid plane: {0}")]
    Plane(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl PlaneSpec {
    fn resolve(&self, r: &Resolved) -> Result<ProjectionPlane, PlotError> {
        let n = match self {
            PlaneSpec::Z1 => Vec3::z(),
            PlaneSpec::Normal(n) => *n,
            PlaneSpec::Pole => match (r.geometry, r.points.get(POLE)) {
                (Geometry::Spherical, Some(p)) => *p.coords(),
                _ => return Err(PlotError::Plane("scene has no spherical `pole` point".into())),
            },
        };
        ProjectionPlane::new(n).map_err(|e| PlotError::Plane(e.to_string()))
    }
}

/// Counts of what was written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlotSummary {
    pub points: usize,
    pub skipped_points: usize,
    pub polylines: usize,
}

pub fn export<W: Write>(scene: &Scene, plane: PlaneSpec, grid: usize, out: W) -> Result<PlotSummary, PlotError> {
    let r = Resolved::new(scene)?;
    let w = plane.resolve(&r)?;
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(["element", "kind", "polyline", "vertex", "x", "y"]).map_err(io::Error::from)?;
    let mut summary = PlotSummary::default();
    let mut projected = Vec::new();
    for (name, p) in &r.points {
        match w.project(p.coords()) {
            Ok(s) => {
                csv.write_record([name, "point", "0", "0", &format_num(s[0]), &format_num(s[1])])
                    .map_err(io::Error::from)?;
                projected.push(s);
                summary.points += 1;
            }
            Err(_) => summary.skipped_points += 1,
        }
    }
    let bounds = bounding_box(&projected);
    for (name, c) in &r.curves {
        let planar = pushforward_curve(c, &w);
        for (k, line) in trace(&planar, bounds, grid.max(2)).iter().enumerate() {
            for (v, s) in line.iter().enumerate() {
                csv.write_record([name, "curve", &k.to_string(), &v.to_string(), &format_num(s[0]), &format_num(s[1])])
                    .map_err(io::Error::from)?;
            }
            summary.polylines += 1;
        }
    }
    csv.flush()?;
    Ok(summary)
}

/// Box around the points padded by a quarter of its size; `[−2, 2]²`
/// without points.
fn bounding_box(pts: &[[f64; 2]]) -> [[f64; 2]; 2] {
    if pts.is_empty() {
        return [[-2.0, -2.0], [2.0, 2.0]];
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let pad = 0.25 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
    [[lo[0] - pad, lo[1] - pad], [hi[0] + pad, hi[1] + pad]]
}

/// Grid edge: `(horizontal, i, j)` names the edge leaving vertex `(i, j)`
/// in +x or +y.
type Edge = (bool, usize, usize);

/// Zero set of `curve` inside `bounds` as polylines.
pub fn trace(curve: &PlanarCurve, bounds: [[f64; 2]; 2], n: usize) -> Vec<Vec<[f64; 2]>> {
    let [lo, hi] = bounds;
    let at = |i: usize, j: usize| {
        [lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64, lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64]
    };
    let f: Vec<Vec<f64>> = (0..=n).map(|i| (0..=n).map(|j| curve.eval(at(i, j))).collect()).collect();
    let crossing = |e: Edge| -> [f64; 2] {
        let (h, i, j) = e;
        let (i2, j2) = if h { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (f[i][j], f[i2][j2]);
        let t = a / (a - b);
        let (p, q) = (at(i, j), at(i2, j2));
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    };

    let mut segments: Vec<[Edge; 2]> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = [f[i][j] > 0.0, f[i + 1][j] > 0.0, f[i + 1][j + 1] > 0.0, f[i][j + 1] > 0.0];
            let bottom = (true, i, j);
            let right = (false, i + 1, j);
            let top = (true, i, j + 1);
            let left = (false, i, j);
            let cut: Vec<Edge> = [(bottom, 0, 1), (right, 1, 2), (top, 3, 2), (left, 0, 3)]
                .into_iter()
                .filter(|&(_, a, b)| v[a] != v[b])
                .map(|(e, _, _)| e)
                .collect();
            match cut.len() {
                2 => segments.push([cut[0], cut[1]]),
                4 => {
                    let mid = at(i, j);
                    let step = [(hi[0] - lo[0]) / (2 * n) as f64, (hi[1] - lo[1]) / (2 * n) as f64];
                    let centre = curve.eval([mid[0] + step[0], mid[1] + step[1]]) > 0.0;
                    if centre == v[0] {
                        segments.push([bottom, right]);
                        segments.push([top, left]);
                    } else {
                        segments.push([bottom, left]);
                        segments.push([right, top]);
                    }
                }
                _ => {}
            }
        }
    }

    let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, s) in segments.iter().enumerate() {
        for e in s {
            by_edge.entry(*e).or_default().push(k);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain: std::collections::VecDeque<Edge> = segments[start].iter().copied().collect();
        for forward in [true, false] {
            loop {
                let end = if forward { *chain.back().unwrap() } else { *chain.front().unwrap() };
                let next = by_edge[&end].iter().copied().find(|k| !used[*k]);
                let Some(k) = next else { break };
                used[k] = true;
                let [a, b] = segments[k];
                let other = if a == end { b } else { a };
                if forward {
                    chain.push_back(other);
                } else {
                    chain.push_front(other);
                }
            }
        }
        lines.push(chain.into_iter().map(crossing).collect());
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use noneuclid::Curve;

    #[test]
    fn traces_the_unit_circle() {
        let c = Curve::from_coeffs(2, &[1.0, 0.0, 0.0, 1.0, 0.0, -1.0]).unwrap();
        let planar = pushforward_curve(&c, &ProjectionPlane::z1());
        let lines = trace(&planar, [[-2.0, -2.0], [2.0, 2.0]], 64);
        assert_eq!(lines.len(), 1);
        let line = &lines[0];
        assert!(line.len() > 50);
        for s in line {
            assert!((s[0].hypot(s[1]) - 1.0).abs() < 1e-2);
        }
        assert_eq!(line.first(), line.last());
    }

    #[test]
    fn plane_specs_parse() {
        assert_eq!("z=1".parse::<PlaneSpec>().unwrap(), PlaneSpec::Z1);
        assert_eq!("0,0,2".parse::<PlaneSpec>().unwrap(), PlaneSpec::Normal(Vec3::new(0.0, 0.0, 2.0)));
        assert!("x".parse::<PlaneSpec>().is_err());
    }
}
