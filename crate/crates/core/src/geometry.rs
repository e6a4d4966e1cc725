//! Rays, planes and multi-bounce trajectories.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

pub type Vec3 = Vector3<f64>;

/// Default tolerance on the normalized scalar triple product used to decide
/// whether the TX and RX beams are coplanar.
pub const COPLANAR_TOL: f64 = 1e-6;

const UNIT_TOL: f64 = 1e-9;

pub fn unit(v: Vec3) -> Result<Vec3> {
    let n = v.norm();
    if n > 0.0 && n.is_finite() {
        Ok(v / n)
    } else {
        Err(Error::ZeroVector)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
}

impl Ray {
    /// Builds a ray, normalizing `direction`.
    pub fn new(origin: Vec3, direction: Vec3) -> Result<Self> {
        Ok(Self {
            origin,
            direction: unit(direction)?,
        })
    }

    pub fn at(&self, s: f64) -> Vec3 {
        self.origin + self.direction * s
    }

    pub fn reversed(&self) -> Self {
        Self {
            origin: self.origin,
            direction: -self.direction,
        }
    }

    /// Signed distance along the ray to the orthogonal projection of `p`, and
    /// the perpendicular distance from `p` to the ray's line.
    pub fn project(&self, p: &Vec3) -> (f64, f64) {
        let w = p - self.origin;
        let s = w.dot(&self.direction);
        (s, (w - self.direction * s).norm())
    }
}

/// Infinite plane `normal . x = offset` tagged with a material name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneScatterer {
    pub normal: Vec3,
    pub offset: f64,
    pub material: String,
}

impl PlaneScatterer {
    pub fn new(normal: Vec3, offset: f64, material: impl Into<String>) -> Result<Self> {
        let len = normal.norm();
        if !(len > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            normal: normal / len,
            offset: offset / len,
            material: material.into(),
        })
    }

    /// Plane `a*x + b*y + c*z + d = 0`.
    pub fn from_coefficients(a: f64, b: f64, c: f64, d: f64, material: impl Into<String>) -> Result<Self> {
        Self::new(Vec3::new(a, b, c), -d, material)
    }

    /// Plane through `point` with the given normal.
    pub fn through(point: Vec3, normal: Vec3, material: impl Into<String>) -> Result<Self> {
        let n = unit(normal)?;
        Ok(Self {
            normal: n,
            offset: n.dot(&point),
            material: material.into(),
        })
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    /// Ray parameter of the intersection, if the ray is not parallel.
    pub fn intersect(&self, ray: &Ray) -> Option<f64> {
        let denom = self.normal.dot(&ray.direction);
        if denom.abs() < 1e-12 {
            return None;
        }
        Some(-self.signed_distance(&ray.origin) / denom)
    }

    pub fn is_normalized(&self) -> bool {
        (self.normal.norm() - 1.0).abs() <= UNIT_TOL
    }
}

/// Half of the angle between `u` and `v`; with both vectors leaving a
/// reflection point toward its neighbours this is the incident angle.
pub fn incident_angle(u: &Vec3, v: &Vec3) -> Result<f64> {
    let (nu, nv) = (u.norm(), v.norm());
    if !(nu > 0.0) || !(nv > 0.0) {
        return Err(Error::ZeroVector);
    }
    let cos = (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(0.5 * cos.acos().to_degrees())
}

pub fn reflect_direction(d: &Vec3, n: &Vec3) -> Vec3 {
    d - n * (2.0 * d.dot(n))
}

/// Reflection point of a single-bounce path: the intersection of the TX beam
/// with the RX beam traced backwards. `rx_ray.direction` is the arrival
/// direction at the receiver.
pub fn single_bounce_rp(tx_ray: &Ray, rx_ray: &Ray, coplanar_tol: f64) -> Option<Vec3> {
    let a = tx_ray.direction;
    let b = -rx_ray.direction;
    let w = rx_ray.origin - tx_ray.origin;
    let cross = a.cross(&b);
    let cross_norm = cross.norm();
    if cross_norm < 1e-12 || w.norm() < 1e-12 {
        return None;
    }
    let triple = w.dot(&cross) / (w.norm() * a.norm() * b.norm());
    if triple.abs() >= coplanar_tol {
        return None;
    }
    // tx + s a = rx + t b, solved in the least-squares sense
    let s = w.cross(&b).dot(&cross) / (cross_norm * cross_norm);
    let t = w.cross(&a).dot(&cross) / (cross_norm * cross_norm);
    if s <= 0.0 || t <= 0.0 {
        return None;
    }
    Some((tx_ray.at(s) + rx_ray.reversed().at(t)) * 0.5)
}

/// Points at arc lengths `0, delta, 2*delta, ...` up to `d_max` inclusive.
pub fn sample_ray(ray: &Ray, delta_d: f64, d_max: f64) -> Result<Vec<Vec3>> {
    ensure_positive("sampling step", delta_d)?;
    ensure_positive("maximum distance", d_max)?;
    let count = (d_max / delta_d + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| ray.at(i as f64 * delta_d)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<Vec3>,
    pub incident_angles: Vec<f64>,
    pub segment_lengths: Vec<f64>,
    pub total_length: f64,
}

impl Trajectory {
    pub fn tx(&self) -> Vec3 {
        self.points[0]
    }

    pub fn rx(&self) -> Vec3 {
        *self.points.last().expect("trajectory has endpoints")
    }

    pub fn reflection_points(&self) -> &[Vec3] {
        &self.points[1..self.points.len() - 1]
    }

    pub fn bounce_count(&self) -> usize {
        self.points.len() - 2
    }

    /// Unit direction of the first segment.
    pub fn departure(&self) -> Vec3 {
        (self.points[1] - self.points[0]) / self.segment_lengths[0]
    }

    /// Unit direction of the last segment, pointing into the receiver.
    pub fn arrival(&self) -> Vec3 {
        let n = self.points.len();
        (self.points[n - 1] - self.points[n - 2]) / self.segment_lengths[n - 2]
    }
}

pub fn build_trajectory(points: &[Vec3]) -> Result<Trajectory> {
    if points.len() < 2 {
        return Err(Error::Inconsistent(
            "a trajectory needs at least two points".into(),
        ));
    }
    let segment_lengths: Vec<f64> = points.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    if let Some(k) = segment_lengths.iter().position(|&l| l < 1e-12) {
        return Err(Error::DuplicatePoint(k, k + 1));
    }
    let incident_angles = points
        .windows(3)
        .map(|w| incident_angle(&(w[0] - w[1]), &(w[2] - w[1])))
        .collect::<Result<Vec<_>>>()?;
    let total_length = segment_lengths.iter().sum();
    Ok(Trajectory {
        points: points.to_vec(),
        incident_angles,
        segment_lengths,
        total_length,
    })
}
