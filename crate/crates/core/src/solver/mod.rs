//! Inverse engine: recover reflection points and materials from a measurement.
//!
//! Two localization methods share the [`LocalizationMethod`] trait and are
//! looked up by name through [`MethodRegistry`]:
//!
//! * `method1` matches the total path length first, then compares the
//!   measured loss with the loss predicted for every candidate pair and
//!   material sequence;
//! * `method2` inverts the loss table first (iso-loss loci over the two
//!   incident angles) and keeps the beam-consistent trajectories whose total
//!   length matches.
//!
//! Both return every candidate within tolerance, ranked; the first entry is
//! the preferred answer.

mod export;
mod method1;
mod method2;
mod pairs;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Trajectory, Vec3};
use crate::rl_db::{MaterialSequence, RlDatabase};
use crate::scene::Measurement;

pub use export::{
    candidates_from_csv, candidates_from_json, candidates_to_csv, candidates_to_json, export_points,
    points_from_records, points_to_csv, CandidateRecord, TaggedPoint,
};
pub use method1::{method1, method1_with_pairs, Method1};
pub use method2::{method2, method2_detailed, Method2, Method2Outcome, RlMatch};
pub use pairs::{enumerate_pairs, path_matches, PathMatch};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Spacing of the sample points along each beam, meters.
    pub delta_d: f64,
    pub path_tol: f64,
    pub rl_tol: f64,
    /// Grid step of the iso-loss scan, degrees.
    pub angle_step: f64,
    pub max_path: f64,
    pub extrapolation_bound: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            delta_d: 0.02,
            path_tol: 0.02,
            rl_tol: 0.1,
            angle_step: 0.1,
            max_path: 200.0,
            extrapolation_bound: 90.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta_d", self.delta_d),
            ("path_tol", self.path_tol),
            ("rl_tol", self.rl_tol),
            ("angle_step", self.angle_step),
            ("max_path", self.max_path),
            ("extrapolation_bound", self.extrapolation_bound),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if self.path_tol < self.delta_d / 2.0 {
            return Err(Error::InvalidConfig(format!(
                "path_tol {} is below half the sampling step {}",
                self.path_tol, self.delta_d
            )));
        }
        Ok(())
    }

    /// Loss tolerance widened to the measurement's own uncertainty.
    pub fn effective_rl_tol(&self, m: &Measurement) -> f64 {
        self.rl_tol.max(m.rl_uncertainty_db)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSolution {
    pub trajectory: Trajectory,
    pub materials: MaterialSequence,
    pub sum_rl: f64,
    /// Predicted minus measured loss, dB.
    pub rl_residual: f64,
    /// Trajectory length minus measured length, meters.
    pub path_residual: f64,
}

impl CandidateSolution {
    pub fn reflection_points(&self) -> &[Vec3] {
        self.trajectory.reflection_points()
    }
}

/// Why a solve produced no candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnostic {
    /// No beam-consistent trajectory has the measured length.
    NoPathMatch,
    /// Trajectories exist but none predicts the measured loss.
    NoRlMatch,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NoPathMatch => "no trajectory matches the measured path length",
            Self::NoRlMatch => "no trajectory matches the measured reflection loss",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub candidates: Vec<CandidateSolution>,
    pub diagnostic: Option<Diagnostic>,
}

impl SolveReport {
    fn from_candidates(candidates: Vec<CandidateSolution>, empty: Diagnostic) -> Self {
        let diagnostic = candidates.is_empty().then_some(empty);
        Self {
            candidates,
            diagnostic,
        }
    }

    pub fn best(&self) -> Option<&CandidateSolution> {
        self.candidates.first()
    }
}

/// Predicts the summed loss of a trajectory for a material sequence.
pub trait LossModel: Sync {
    fn materials(&self) -> Vec<String>;

    /// `Ok(None)` when the trajectory lies outside the model's domain (for
    /// example an incident angle beyond the lookup bound).
    fn predict(&self, trajectory: &Trajectory, seq: &MaterialSequence) -> Result<Option<f64>>;
}

/// A loss table queried with a specific extrapolation bound.
pub struct TableModel {
    db: RlDatabase,
}

impl TableModel {
    pub fn new(db: &RlDatabase, cfg: &SolverConfig) -> Self {
        Self {
            db: db.clone().with_extrapolation_bound(cfg.extrapolation_bound),
        }
    }

    pub fn db(&self) -> &RlDatabase {
        &self.db
    }
}

impl LossModel for TableModel {
    fn materials(&self) -> Vec<String> {
        self.db.materials().into_iter().map(str::to_string).collect()
    }

    fn predict(&self, trajectory: &Trajectory, seq: &MaterialSequence) -> Result<Option<f64>> {
        match self.db.sum_rl(seq, &trajectory.incident_angles) {
            Ok(v) => Ok(Some(v)),
            Err(Error::AngleBeyondBound { .. }) | Err(Error::AngleOutOfRange(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

pub trait LocalizationMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn solve(&self, m: &Measurement, db: &RlDatabase, cfg: &SolverConfig) -> Result<SolveReport>;
}

#[derive(Default)]
pub struct MethodRegistry {
    methods: BTreeMap<&'static str, Box<dyn LocalizationMethod>>,
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding `method1` and `method2`.
    pub fn with_builtin() -> Self {
        let mut r = Self::new();
        r.register(Box::new(Method1));
        r.register(Box::new(Method2));
        r
    }

    /// Adds a method, replacing any previous one with the same name.
    pub fn register(&mut self, method: Box<dyn LocalizationMethod>) {
        self.methods.insert(method.name(), method);
    }

    pub fn get(&self, name: &str) -> Result<&dyn LocalizationMethod> {
        self.methods
            .get(name)
            .map(|m| m.as_ref())
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown method `{name}` (available: {})",
                    self.names().join(", ")
                ))
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.keys().copied().collect()
    }
}

/// Orders by key then by the fallback index so results never depend on
/// iteration or thread scheduling.
pub(crate) fn total_cmp_keys(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}
