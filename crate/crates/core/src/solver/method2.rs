//! Reflection loss first, then path length.

use rayon::prelude::*;

use super::method1::single_bounce_candidates;
use super::pairs::beam_points;
use super::{
    total_cmp_keys, CandidateSolution, Diagnostic, LocalizationMethod, SolveReport, SolverConfig, TableModel,
};
use crate::cluster::connected_components;
use crate::error::Result;
use crate::geometry::{build_trajectory, incident_angle, Trajectory};
use crate::rl_db::{InverseMatches, MaterialSequence, RlDatabase};
use crate::scene::Measurement;

pub struct Method2;

impl LocalizationMethod for Method2 {
    fn name(&self) -> &'static str {
        "method2"
    }

    fn description(&self) -> &'static str {
        "invert the loss table to iso-loss loci, then match path length"
    }

    fn solve(&self, m: &Measurement, db: &RlDatabase, cfg: &SolverConfig) -> Result<SolveReport> {
        method2(m, db, cfg)
    }
}

/// A beam-consistent pair whose angles lie on an iso-loss locus, before the
/// path length is checked.
#[derive(Debug, Clone, PartialEq)]
pub struct RlMatch {
    pub i: usize,
    pub j: usize,
    pub materials: MaterialSequence,
    pub trajectory: Trajectory,
    pub sum_rl: f64,
    pub rl_residual: f64,
    pub path_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Method2Outcome {
    /// Every loss-consistent pair up to `max_path`; empty unless requested.
    pub pre_length: Vec<RlMatch>,
    pub report: SolveReport,
}

pub fn method2(m: &Measurement, db: &RlDatabase, cfg: &SolverConfig) -> Result<SolveReport> {
    Ok(method2_detailed(m, db, cfg, false)?.report)
}

struct Star {
    i: usize,
    j: usize,
    seq: usize,
    sum_rl: f64,
    length: f64,
}

/// Runs method2 and, when `keep_pre_length` is set, also returns the
/// loss-consistent pairs of every length. That scan covers all pairs up to
/// `max_path` and is only cheap for coarse sampling steps.
pub fn method2_detailed(
    m: &Measurement,
    db: &RlDatabase,
    cfg: &SolverConfig,
    keep_pre_length: bool,
) -> Result<Method2Outcome> {
    cfg.validate()?;
    m.validate()?;
    let model = TableModel::new(db, cfg);
    let db = model.db();
    let tol = cfg.effective_rl_tol(m);
    let target = m.rl_measured_db;

    let single = single_bounce_candidates(m, &model, cfg, tol)?;
    if !single.is_empty() {
        let InverseMatches::Single(inverse) = db.inverse_lookup(target, tol, 1, cfg.angle_step)? else {
            unreachable!("one-bounce lookup returns single matches")
        };
        let half = cfg.angle_step / 2.0 + 1e-9;
        let kept: Vec<CandidateSolution> = single
            .into_iter()
            .filter(|c| {
                let theta = c.trajectory.incident_angles[0];
                inverse
                    .iter()
                    .any(|s| s.material == c.materials.names()[0] && (s.theta_deg - theta).abs() <= half)
            })
            .collect();
        if !kept.is_empty() {
            return Ok(Method2Outcome {
                pre_length: Vec::new(),
                report: SolveReport::from_candidates(rank_by_path(kept), Diagnostic::NoRlMatch),
            });
        }
    }

    let mask = db.iso_rl_mask(target, tol, cfg.angle_step)?;
    if (0..mask.sequences.len()).all(|s| mask.count(s) == 0) {
        return Ok(Method2Outcome {
            pre_length: Vec::new(),
            report: SolveReport::from_candidates(Vec::new(), Diagnostic::NoRlMatch),
        });
    }

    let n = (cfg.max_path / cfg.delta_d + 1e-9).floor() as usize;
    let rows: Vec<(Vec<Star>, usize)> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let mut stars = Vec::new();
            let mut path_ok_count = 0;
            for j in 1..=n {
                if (i + j) as f64 * cfg.delta_d > cfg.max_path {
                    break;
                }
                let (p, q) = beam_points(m, cfg.delta_d, i, j);
                let pq = (q - p).norm();
                if pq < 1e-9 {
                    continue;
                }
                let length = (i + j) as f64 * cfg.delta_d + pq;
                if length > cfg.max_path {
                    continue;
                }
                let path_ok = (length - m.path_length_m).abs() <= cfg.path_tol;
                path_ok_count += usize::from(path_ok);
                if !path_ok && !keep_pre_length {
                    continue;
                }
                let (Ok(t1), Ok(t2)) = (
                    incident_angle(&(m.tx - p), &(q - p)),
                    incident_angle(&(p - q), &(m.rx - q)),
                ) else {
                    continue;
                };
                for (s, seq) in mask.sequences.iter().enumerate() {
                    if !mask.contains_angles(s, t1, t2) {
                        continue;
                    }
                    if let Ok(sum_rl) = db.sum_rl(seq, &[t1, t2]) {
                        if (sum_rl - target).abs() <= tol {
                            stars.push(Star {
                                i,
                                j,
                                seq: s,
                                sum_rl,
                                length,
                            });
                        }
                    }
                }
            }
            (stars, path_ok_count)
        })
        .collect();
    let path_ok_total: usize = rows.iter().map(|r| r.1).sum();
    let stars: Vec<Star> = rows.into_iter().flat_map(|r| r.0).collect();

    let to_match = |s: &Star| -> Result<RlMatch> {
        let (p, q) = beam_points(m, cfg.delta_d, s.i, s.j);
        let trajectory = build_trajectory(&[m.tx, p, q, m.rx])?;
        Ok(RlMatch {
            i: s.i,
            j: s.j,
            materials: mask.sequences[s.seq].clone(),
            path_residual: trajectory.total_length - m.path_length_m,
            trajectory,
            sum_rl: s.sum_rl,
            rl_residual: s.sum_rl - target,
        })
    };

    let pre_length = if keep_pre_length {
        stars.iter().map(to_match).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let mut candidates = Vec::new();
    for s in 0..mask.sequences.len() {
        let group: Vec<&Star> = stars
            .iter()
            .filter(|st| st.seq == s && (st.length - m.path_length_m).abs() <= cfg.path_tol)
            .collect();
        let cells: Vec<(usize, usize)> = group.iter().map(|st| (st.i, st.j)).collect();
        for members in connected_components(&cells) {
            // the path band is only one sample wide, so the loss residual
            // locates the crossing along it; ties fall back to path residual
            let key = |k: usize| {
                [
                    (group[k].sum_rl - target).abs(),
                    (group[k].length - m.path_length_m).abs(),
                ]
            };
            let best = members
                .into_iter()
                .min_by(|&a, &b| total_cmp_keys(&key(a), &key(b)).then(a.cmp(&b)))
                .expect("components are non-empty");
            let rm = to_match(group[best])?;
            candidates.push(CandidateSolution {
                trajectory: rm.trajectory,
                materials: rm.materials,
                sum_rl: rm.sum_rl,
                rl_residual: rm.rl_residual,
                path_residual: rm.path_residual,
            });
        }
    }
    let empty = if path_ok_total == 0 {
        Diagnostic::NoPathMatch
    } else {
        Diagnostic::NoRlMatch
    };
    Ok(Method2Outcome {
        pre_length,
        report: SolveReport::from_candidates(rank_by_path(candidates), empty),
    })
}

fn rank_by_path(mut candidates: Vec<CandidateSolution>) -> Vec<CandidateSolution> {
    candidates.sort_by(|a, b| {
        total_cmp_keys(
            &[a.path_residual.abs(), a.rl_residual.abs()],
            &[b.path_residual.abs(), b.rl_residual.abs()],
        )
    });
    candidates
}
