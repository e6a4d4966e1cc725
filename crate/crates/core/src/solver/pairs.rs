//! Beam-consistent reflection point pairs with a given total length.

use rayon::prelude::*;

use super::{total_cmp_keys, SolverConfig};
use crate::cluster::connected_components;
use crate::error::Result;
use crate::geometry::{build_trajectory, Trajectory, Vec3};
use crate::scene::Measurement;

/// A pair `P_i = TX + i*dd*aod`, `Q_j = RX - j*dd*aoa` whose trajectory length
/// matches the measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMatch {
    pub i: usize,
    pub j: usize,
    pub trajectory: Trajectory,
    pub path_residual: f64,
}

pub(crate) fn beam_points(m: &Measurement, delta_d: f64, i: usize, j: usize) -> (Vec3, Vec3) {
    let s = i as f64 * delta_d;
    let t = j as f64 * delta_d;
    (m.tx + m.aod * s, m.rx - m.aoa * t)
}

/// Every sample pair (indices from 1) within `path_tol` of the measured length,
/// ordered by `(i, j)`. A length no trajectory can reach gives an empty list.
pub fn path_matches(m: &Measurement, cfg: &SolverConfig) -> Result<Vec<PathMatch>> {
    cfg.validate()?;
    let d = m.path_length_m;
    let reach = (d + cfg.path_tol).min(cfg.max_path);
    let n = (reach / cfg.delta_d + 1e-9).floor() as usize;
    let rows: Vec<Vec<PathMatch>> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for j in 1..=n {
                // |PQ| >= 0, so s + t alone bounds the total length from below
                if (i + j) as f64 * cfg.delta_d > reach {
                    break;
                }
                let (p, q) = beam_points(m, cfg.delta_d, i, j);
                let pq = (q - p).norm();
                if pq < 1e-9 {
                    continue;
                }
                let length = (i + j) as f64 * cfg.delta_d + pq;
                if (length - d).abs() > cfg.path_tol {
                    continue;
                }
                if let Ok(trajectory) = build_trajectory(&[m.tx, p, q, m.rx]) {
                    let path_residual = trajectory.total_length - d;
                    row.push(PathMatch {
                        i,
                        j,
                        trajectory,
                        path_residual,
                    });
                }
            }
            row
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Path-matched pairs grouped by 8-connectivity in `(i, j)`; each group is
/// represented by its member with the smallest path residual.
pub fn enumerate_pairs(m: &Measurement, cfg: &SolverConfig) -> Result<Vec<PathMatch>> {
    let matches = path_matches(m, cfg)?;
    let cells: Vec<(usize, usize)> = matches.iter().map(|p| (p.i, p.j)).collect();
    Ok(connected_components(&cells)
        .into_iter()
        .map(|members| {
            let best = members
                .into_iter()
                .min_by(|&a, &b| {
                    total_cmp_keys(&[matches[a].path_residual.abs()], &[matches[b].path_residual.abs()])
                        .then(a.cmp(&b))
                })
                .expect("components are non-empty");
            matches[best].clone()
        })
        .collect())
}
