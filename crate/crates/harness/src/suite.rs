//! Suite execution: many independent generated scenes, aggregated.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use noneuclid::Geometry;
use rayon::prelude::*;

use crate::config::{ConfigError, Tolerances};
use crate::generate::{generate_scene, Request, DEFAULT_DEGREE};
use crate::predicates::{check_scene, Outcome};
use crate::scene::Relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    CrossRatio,
    Pencil,
    Projection,
    Menelaus,
    Carnot,
    Chasles,
    Butterfly,
    CarnotN,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::CrossRatio,
        Suite::Pencil,
        Suite::Projection,
        Suite::Menelaus,
        Suite::Carnot,
        Suite::Chasles,
        Suite::Butterfly,
        Suite::CarnotN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CrossRatio => "cross-ratio",
            Suite::Pencil => "pencil",
            Suite::Projection => "projection",
            Suite::Menelaus => "menelaus",
            Suite::Carnot => "carnot",
            Suite::Chasles => "chasles",
            Suite::Butterfly => "butterfly",
            Suite::CarnotN => "carnot-n",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|k| k.name()).collect();
                format!("unknown suite `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("degree must be 1, 2 or 3, got {0}")]
    BadDegree(u32),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSpec {
    pub suite: Suite,
    pub geometry: Geometry,
    pub trials: u64,
    pub seed: u64,
    /// Curve degree for `carnot-n`; ignored by other suites.
    pub degree: u32,
}

impl RunSpec {
    pub fn new(suite: Suite, geometry: Geometry, trials: u64, seed: u64) -> Self {
        RunSpec { suite, geometry, trials, seed, degree: DEFAULT_DEGREE }
    }

    pub fn with_degree(mut self, degree: u32) -> Self {
        self.degree = degree;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialResult {
    Checked { retries: u32, outcomes: Vec<Outcome> },
    GenerationFailed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub result: TrialResult,
}

impl TrialRecord {
    pub fn pass(&self) -> bool {
        matches!(&self.result, TrialResult::Checked { outcomes, .. } if outcomes.iter().all(|o| o.pass))
    }
}

/// Aggregate over every assertion sharing one label.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantStats {
    pub relation: Relation,
    pub tol: f64,
    pub checked: u64,
    pub failed: u64,
    pub max_deviation: f64,
    pub min_deviation: f64,
}

impl InvariantStats {
    fn new(o: &Outcome) -> Self {
        InvariantStats {
            relation: o.relation,
            tol: o.tol,
            checked: 0,
            failed: 0,
            max_deviation: f64::NEG_INFINITY,
            min_deviation: f64::INFINITY,
        }
    }

    fn add(&mut self, o: &Outcome) {
        self.checked += 1;
        self.failed += u64::from(!o.pass);
        self.max_deviation = self.max_deviation.max(o.deviation);
        self.min_deviation = self.min_deviation.min(o.deviation);
    }

    /// The statistic the tolerance is compared with.
    pub fn worst(&self) -> f64 {
        match self.relation {
            Relation::Within => self.max_deviation,
            Relation::Beyond => self.min_deviation,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub spec: RunSpec,
    pub passed: u64,
    /// Includes generation failures.
    pub failed: u64,
    pub generation_failed: u64,
    pub max_retries: u32,
    pub invariants: BTreeMap<String, InvariantStats>,
    pub duration: Duration,
    pub records: Vec<TrialRecord>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// Largest within-deviation over every invariant.
    pub fn max_deviation(&self) -> f64 {
        self.invariants
            .values()
            .filter(|s| s.relation == Relation::Within)
            .map(|s| s.max_deviation)
            .fold(0.0, f64::max)
    }

    /// Equality of everything except wall-clock time.
    pub fn same_results(&self, other: &SuiteReport) -> bool {
        SuiteReport { duration: Duration::ZERO, ..self.clone() } == SuiteReport { duration: Duration::ZERO, ..other.clone() }
    }
}

pub fn run_trial(spec: &RunSpec, trial: u64, tol: &Tolerances) -> TrialRecord {
    let req = Request { suite: spec.suite, geometry: spec.geometry, seed: spec.seed, trial, degree: spec.degree };
    let result = match generate_scene(&req, tol) {
        Ok(scene) => {
            let retries = scene.metadata.as_ref().map_or(0, |m| m.retries);
            match check_scene(&scene) {
                Ok(outcomes) => TrialResult::Checked { retries, outcomes },
                Err(e) => TrialResult::GenerationFailed(e.to_string()),
            }
        }
        Err(e) => TrialResult::GenerationFailed(e.to_string()),
    };
    TrialRecord { trial, result }
}

pub fn run_suite(spec: &RunSpec, tol: &Tolerances) -> Result<SuiteReport, RunError> {
    if spec.trials == 0 {
        return Err(RunError::NoTrials);
    }
    if spec.suite == Suite::CarnotN && !(1..=3).contains(&spec.degree) {
        return Err(RunError::BadDegree(spec.degree));
    }
    tol.validate(spec.suite)?;
    let start = Instant::now();
    let records: Vec<TrialRecord> = (0..spec.trials).into_par_iter().map(|i| run_trial(spec, i, tol)).collect();
    let duration = start.elapsed();

    let mut report = SuiteReport {
        spec: *spec,
        passed: 0,
        failed: 0,
        generation_failed: 0,
        max_retries: 0,
        invariants: BTreeMap::new(),
        duration,
        records: Vec::new(),
    };
    for r in &records {
        if r.pass() {
            report.passed += 1;
        } else {
            report.failed += 1;
        }
        match &r.result {
            TrialResult::Checked { retries, outcomes } => {
                report.max_retries = report.max_retries.max(*retries);
                for o in outcomes {
                    report.invariants.entry(o.label.clone()).or_insert_with(|| InvariantStats::new(o)).add(o);
                }
            }
            TrialResult::GenerationFailed(_) => report.generation_failed += 1,
        }
    }
    report.records = records;
    Ok(report)
}
