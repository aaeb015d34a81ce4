//! Scene documents: named points and curves plus the assertions to check.
//!
//! ```json
//! {"geometry": "euclidean",
//!  "points": {"A": [0, 0, 1]},
//!  "curves": {"Q": {"degree": 2, "coeffs": [1, 0, 0, 1, 0, -1]}},
//!  "assertions": [{"predicate": "menelaus", "args": ["A", ...], "expect": -1, "tol": 1e-12}]}
//! ```
//!
//! Numbers are written with 17 significant digits so a write/read cycle is
//! exact.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use noneuclid::{Curve, Geometry, Point, Vec3};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::predicates;

/// Surface drift accepted on load.
pub const LOAD_DRIFT_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("ParseError at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("ValidationError({invariant}): {detail}")]
    Validation { invariant: &'static str, detail: String },
}

impl SceneError {
    fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        SceneError::Validation { invariant, detail: detail.into() }
    }

    pub fn invariant(&self) -> Option<&'static str> {
        match self {
            SceneError::Validation { invariant, .. } => Some(invariant),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `deviation ≤ tol`
    #[default]
    Within,
    /// `deviation > tol`; used by perturbed controls.
    Beyond,
}

impl Relation {
    fn is_within(&self) -> bool {
        *self == Relation::Within
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub degree: u32,
    #[serde(serialize_with = "ser_vec")]
    pub coeffs: Vec<f64>,
}

impl CurveSpec {
    pub fn from_curve(c: &Curve) -> Self {
        CurveSpec { degree: c.degree(), coeffs: c.coeffs() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    /// Label used for aggregation; defaults to the predicate name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub predicate: String,
    pub args: Vec<String>,
    #[serde(serialize_with = "ser_num")]
    pub expect: f64,
    #[serde(serialize_with = "ser_num")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Relation::is_within")]
    pub relation: Relation,
}

impl Assertion {
    pub fn new(name: &str, predicate: &str, args: &[&str], expect: f64, tol: f64) -> Self {
        Assertion {
            name: (name != predicate).then(|| name.to_string()),
            predicate: predicate.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
            expect,
            tol,
            relation: Relation::Within,
        }
    }

    pub fn beyond(mut self) -> Self {
        self.relation = Relation::Beyond;
        self
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.predicate)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Metadata {
    pub suite: String,
    pub seed: u64,
    pub trial: u64,
    pub retries: u32,
    #[serde(default)]
    pub antipode_swaps: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub geometry: Geometry,
    #[serde(serialize_with = "ser_points")]
    pub points: BTreeMap<String, [f64; 3]>,
    #[serde(default)]
    pub curves: BTreeMap<String, CurveSpec>,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl Scene {
    pub fn new(geometry: Geometry) -> Self {
        Scene { geometry, points: BTreeMap::new(), curves: BTreeMap::new(), assertions: Vec::new(), metadata: None }
    }

    pub fn add_point(&mut self, name: &str, p: &Point) {
        self.points.insert(name.to_string(), p.to_array());
    }

    pub fn add_curve(&mut self, name: &str, c: &Curve) {
        self.curves.insert(name.to_string(), CurveSpec::from_curve(c));
    }

    pub fn assert(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    pub fn point(&self, name: &str) -> Result<Point, SceneError> {
        let c = self
            .points
            .get(name)
            .ok_or_else(|| SceneError::validation("unresolved name", format!("no point `{name}`")))?;
        self.geometry
            .validate(&Vec3::from(*c), LOAD_DRIFT_TOL)
            .map_err(|e| SceneError::validation("surface membership", format!("point `{name}`: {e}")))
    }

    pub fn curve(&self, name: &str) -> Result<Curve, SceneError> {
        let spec = self
            .curves
            .get(name)
            .ok_or_else(|| SceneError::validation("unresolved name", format!("no curve `{name}`")))?;
        Curve::from_coeffs(spec.degree, &spec.coeffs)
            .map_err(|e| SceneError::validation("curve coefficients", format!("curve `{name}`: {e}")))
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        for name in self.points.keys() {
            self.point(name)?;
        }
        for name in self.curves.keys() {
            self.curve(name)?;
        }
        for (i, a) in self.assertions.iter().enumerate() {
            for arg in &a.args {
                if !self.points.contains_key(arg) && !self.curves.contains_key(arg) {
                    return Err(SceneError::validation(
                        "unresolved name",
                        format!("assertion {i} ({}) references `{arg}`", a.predicate),
                    ));
                }
            }
            predicates::check_signature(&a.predicate, a.args.len())
                .map_err(|e| SceneError::validation("predicate signature", format!("assertion {i}: {e}")))?;
            if !(a.tol >= 0.0) || !a.tol.is_finite() || !a.expect.is_finite() {
                return Err(SceneError::validation("assertion bounds", format!("assertion {i}: expect/tol must be finite, tol ≥ 0")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let scene: Scene = serde_json::from_str(text).map_err(|e| SceneError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, SceneError> {
        let text = fs::read_to_string(path).map_err(|source| SceneError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), SceneError> {
        fs::write(path, self.to_json()).map_err(|source| SceneError::Io { path: path.display().to_string(), source })
    }
}

/// 17 significant digits.
pub fn format_num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom("non-finite number"));
        }
        RawValue::from_string(format_num(self.0)).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

fn ser_num<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    Num(*x).serialize(s)
}

fn ser_vec<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Num(*x))?;
    }
    seq.end()
}

fn ser_points<S: Serializer>(m: &BTreeMap<String, [f64; 3]>, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &v.map(Num))?;
    }
    map.end()
}
