//! Forward simulation: specular tracing through scenes of material-tagged
//! planes and synthesis of sensing measurements.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{build_trajectory, reflect_direction, unit, PlaneScatterer, Ray, Trajectory, Vec3};
use crate::linkbudget::{aggregate_rss, fspl, rl_from_powers, PowerObservation, RssSampleSet};
use crate::rl_db::{MaterialSequence, RlDatabase};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const DEFAULT_ARRIVAL_TOL: f64 = 1e-3;
pub const DEFAULT_MAX_BOUNCES: usize = 3;

/// Smallest ray parameter accepted for a new intersection.
const MIN_ADVANCE: f64 = 1e-6;
const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub scatterers: Vec<PlaneScatterer>,
    pub frequency_ghz: f64,
    pub max_bounces: usize,
}

/// Transmitter position, departure direction and receiver position stored
/// alongside a scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub tx: Vec3,
    pub aod: Vec3,
    pub rx: Vec3,
}

impl Probe {
    pub fn tx_ray(&self) -> Result<Ray> {
        Ray::new(self.tx, self.aod)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SceneFile {
    frequency_ghz: f64,
    #[serde(default = "default_max_bounces")]
    max_bounces: usize,
    scatterers: Vec<PlaneScatterer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probe: Option<Probe>,
}

fn default_max_bounces() -> usize {
    DEFAULT_MAX_BOUNCES
}

impl Scene {
    pub fn new(scatterers: Vec<PlaneScatterer>, frequency_ghz: f64, max_bounces: usize) -> Result<Self> {
        ensure_positive("frequency", frequency_ghz)?;
        if max_bounces == 0 {
            return Err(Error::InvalidConfig("max_bounces must be at least 1".into()));
        }
        let scatterers = scatterers
            .into_iter()
            .map(|p| PlaneScatterer::new(p.normal, p.offset, p.material))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            scatterers,
            frequency_ghz,
            max_bounces,
        })
    }

    /// Parses a scene file, returning the optional probe stored with it.
    pub fn from_json_str(text: &str) -> Result<(Self, Option<Probe>)> {
        let file: SceneFile = serde_json::from_str(text)?;
        let scene = Self::new(file.scatterers, file.frequency_ghz, file.max_bounces)?;
        Ok((scene, file.probe))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, Option<Probe>)> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self, probe: Option<&Probe>) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SceneFile {
            frequency_ghz: self.frequency_ghz,
            max_bounces: self.max_bounces,
            scatterers: self.scatterers.clone(),
            probe: probe.copied(),
        })?)
    }

    /// Nearest plane hit strictly ahead of the ray origin; ties go to the
    /// lower scene index.
    fn nearest_hit(&self, ray: &Ray) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, plane) in self.scatterers.iter().enumerate() {
            let Some(t) = plane.intersect(ray) else { continue };
            if t <= MIN_ADVANCE {
                continue;
            }
            match best {
                Some((_, bt)) if t >= bt - TIE_EPS => {}
                _ => best = Some((k, t)),
            }
        }
        best
    }
}

/// A traced path with the index of the scatterer struck at each bounce.
#[derive(Debug, Clone, PartialEq)]
pub struct TracedPath {
    pub trajectory: Trajectory,
    pub scatterer_indices: Vec<usize>,
}

impl TracedPath {
    pub fn materials(&self, scene: &Scene) -> Result<MaterialSequence> {
        MaterialSequence::new(
            self.scatterer_indices
                .iter()
                .map(|&k| scene.scatterers[k].material.clone()),
        )
    }
}

/// Bounces `ray` through the scene up to `bounces` times without a target.
/// Returns the hit points, struck plane indices and the outgoing ray.
pub fn propagate(scene: &Scene, ray: &Ray, bounces: usize) -> (Vec<Vec3>, Vec<usize>, Ray) {
    let mut ray = *ray;
    let mut hits = Vec::new();
    let mut planes = Vec::new();
    for _ in 0..bounces {
        let Some((k, t)) = scene.nearest_hit(&ray) else { break };
        let point = ray.at(t);
        let direction = reflect_direction(&ray.direction, &scene.scatterers[k].normal);
        hits.push(point);
        planes.push(k);
        ray = Ray { origin: point, direction };
    }
    (hits, planes, ray)
}

pub fn trace_with_hits(scene: &Scene, tx_ray: &Ray, rx: &Vec3, arrival_tol: f64) -> Option<TracedPath> {
    let mut ray = *tx_ray;
    let mut points = vec![tx_ray.origin];
    let mut indices = Vec::new();
    for _ in 0..scene.max_bounces {
        let (k, t) = scene.nearest_hit(&ray)?;
        let point = ray.at(t);
        let direction = reflect_direction(&ray.direction, &scene.scatterers[k].normal);
        points.push(point);
        indices.push(k);
        ray = Ray { origin: point, direction };

        let (s, miss) = ray.project(rx);
        if s > MIN_ADVANCE && miss <= arrival_tol {
            let blocked = scene.nearest_hit(&ray).is_some_and(|(_, t)| t < s - arrival_tol);
            if !blocked {
                points.push(*rx);
                let trajectory = build_trajectory(&points).ok()?;
                return Some(TracedPath {
                    trajectory,
                    scatterer_indices: indices,
                });
            }
        }
    }
    None
}

pub fn trace(scene: &Scene, tx_ray: &Ray, rx: &Vec3, arrival_tol: f64) -> Option<Trajectory> {
    trace_with_hits(scene, tx_ray, rx, arrival_tol).map(|p| p.trajectory)
}

/// One sensing observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub tx: Vec3,
    pub rx: Vec3,
    /// Departure direction at the transmitter.
    pub aod: Vec3,
    /// Arrival direction at the receiver, pointing into it.
    pub aoa: Vec3,
    pub path_length_m: f64,
    pub frequency_ghz: f64,
    pub rl_measured_db: f64,
    /// Half-width of the loss uncertainty interval.
    #[serde(default)]
    pub rl_uncertainty_db: f64,
}

impl Measurement {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tx: Vec3,
        rx: Vec3,
        aod: Vec3,
        aoa: Vec3,
        path_length_m: f64,
        frequency_ghz: f64,
        rl_measured_db: f64,
        rl_uncertainty_db: f64,
    ) -> Result<Self> {
        let m = Self {
            tx,
            rx,
            aod: unit(aod)?,
            aoa: unit(aoa)?,
            path_length_m,
            frequency_ghz,
            rl_measured_db,
            rl_uncertainty_db,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("path length", self.path_length_m)?;
        ensure_positive("frequency", self.frequency_ghz)?;
        if self.path_length_m < (self.tx - self.rx).norm() - 1e-9 {
            return Err(Error::Inconsistent(format!(
                "path length {} m is shorter than the TX-RX distance {} m",
                self.path_length_m,
                (self.tx - self.rx).norm()
            )));
        }
        if !(self.rl_uncertainty_db >= 0.0) {
            return Err(Error::Inconsistent("loss uncertainty must be non-negative".into()));
        }
        if !self.rl_measured_db.is_finite() {
            return Err(Error::Inconsistent("measured loss must be finite".into()));
        }
        Ok(())
    }

    pub fn tx_ray(&self) -> Ray {
        Ray {
            origin: self.tx,
            direction: self.aod,
        }
    }

    /// Ray at the receiver with the arrival direction.
    pub fn rx_ray(&self) -> Ray {
        Ray {
            origin: self.rx,
            direction: self.aoa,
        }
    }

    pub fn path_length_from_tof(tof_s: f64) -> f64 {
        SPEED_OF_LIGHT * tof_s
    }

    /// Replaces the measured loss with one extracted from transmit and
    /// (averaged) received power.
    pub fn with_powers(mut self, p_tx_dbm: f64, p_rx_dbm: f64) -> Result<Self> {
        let est = rl_from_powers(&PowerObservation {
            p_tx_dbm,
            p_rx_dbm,
            freq_mhz: self.frequency_ghz * 1000.0,
            path_length_m: self.path_length_m,
        })?;
        self.rl_measured_db = est.rl_db;
        Ok(self)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut m: Self = serde_json::from_str(text)?;
        // keep stored unit vectors bit-exact; only rescale hand-written ones
        for d in [&mut m.aod, &mut m.aoa] {
            if (d.norm() - 1.0).abs() > 1e-12 {
                *d = unit(*d)?;
            }
        }
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub noise_sigma_db: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub arrival_tol: f64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            noise_sigma_db: 0.0,
            n_samples: 1,
            seed: 0,
            arrival_tol: DEFAULT_ARRIVAL_TOL,
        }
    }
}

/// Traces the probe ray and builds the measurement it would produce. `Ok(None)`
/// when the ray never reaches the receiver.
pub fn synthesize(
    scene: &Scene,
    tx_ray: &Ray,
    rx: &Vec3,
    db: &RlDatabase,
    opts: &SynthesisOptions,
) -> Result<Option<Measurement>> {
    if opts.n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
    }
    if !(opts.noise_sigma_db >= 0.0) {
        return Err(Error::InvalidConfig("noise sigma must be non-negative".into()));
    }
    let Some(path) = trace_with_hits(scene, tx_ray, rx, opts.arrival_tol) else {
        return Ok(None);
    };
    let traj = &path.trajectory;
    let rl_true = db.sum_rl(&path.materials(scene)?, &traj.incident_angles)?;

    let (rl_measured_db, rl_uncertainty_db) = if opts.noise_sigma_db > 0.0 {
        let normal = Normal::new(0.0, opts.noise_sigma_db)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let samples_dbm = (0..opts.n_samples).map(|_| normal.sample(&mut rng)).collect();
        let summary = aggregate_rss(&RssSampleSet { samples_dbm })?;
        (
            rl_true + summary.mean_dbm,
            summary.stderr_db.unwrap_or(opts.noise_sigma_db),
        )
    } else {
        (rl_true, 0.0)
    };

    Ok(Some(Measurement {
        tx: traj.tx(),
        rx: traj.rx(),
        aod: traj.departure(),
        aoa: traj.arrival(),
        path_length_m: traj.total_length,
        frequency_ghz: scene.frequency_ghz,
        rl_measured_db,
        rl_uncertainty_db,
    }))
}

/// Received power for a transmit power, path length and reflection loss.
pub fn received_power_dbm(p_tx_dbm: f64, freq_ghz: f64, path_length_m: f64, rl_db: f64) -> Result<f64> {
    Ok(p_tx_dbm - fspl(freq_ghz * 1000.0, path_length_m / 1000.0)? - rl_db)
}

/// Two-plane scene realizing a double-bounce trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DihedralScene {
    pub scene: Scene,
    /// Angle between the two reflecting faces, measured inside the wedge.
    pub dihedral_angle_deg: f64,
    /// Whether the path lies in a single plane (perpendicular to the edge).
    pub planar: bool,
}

const DIHEDRAL_TOL_DEG: f64 = 0.1;

/// Builds the two planes whose normals bisect the incoming and outgoing
/// directions at each reflection point of `trajectory`.
///
/// For a path confined to one plane the wedge angle equals `theta1 + theta2`;
/// this is checked. Out-of-plane paths only report the wedge angle.
pub fn dihedral_scene(
    theta1: f64,
    theta2: f64,
    trajectory: &Trajectory,
    materials: &MaterialSequence,
    freq_ghz: f64,
) -> Result<DihedralScene> {
    if trajectory.bounce_count() != 2 {
        return Err(Error::Inconsistent(format!(
            "dihedral scene needs 2 reflection points, trajectory has {}",
            trajectory.bounce_count()
        )));
    }
    if materials.len() != 2 {
        return Err(Error::Inconsistent(format!(
            "dihedral scene needs 2 materials, got {}",
            materials.len()
        )));
    }
    for (k, (&given, &actual)) in [theta1, theta2].iter().zip(&trajectory.incident_angles).enumerate() {
        if (given - actual).abs() > DIHEDRAL_TOL_DEG {
            return Err(Error::Inconsistent(format!(
                "incident angle {} is {given}°, trajectory has {actual:.3}°",
                k + 1
            )));
        }
    }
    let p = &trajectory.points;
    let mut planes = Vec::with_capacity(2);
    for k in 1..=2 {
        let normal = unit(unit(p[k - 1] - p[k])? + unit(p[k + 1] - p[k])?)?;
        planes.push(PlaneScatterer::through(p[k], normal, materials.names()[k - 1].clone())?);
    }
    let cos = planes[0].normal.dot(&planes[1].normal).clamp(-1.0, 1.0);
    let dihedral_angle_deg = 180.0 - cos.acos().to_degrees();

    let plane_normal = (p[1] - p[0]).cross(&(p[2] - p[1]));
    let planar = p
        .iter()
        .all(|q| plane_normal.norm() < 1e-12 || ((q - p[0]).dot(&plane_normal) / plane_normal.norm()).abs() < 1e-6);
    if planar && (dihedral_angle_deg - (theta1 + theta2)).abs() > DIHEDRAL_TOL_DEG {
        return Err(Error::Inconsistent(format!(
            "wedge angle {dihedral_angle_deg:.3}° differs from {theta1}° + {theta2}°"
        )));
    }
    Ok(DihedralScene {
        scene: Scene::new(planes, freq_ghz, 2)?,
        dihedral_angle_deg,
        planar,
    })
}
