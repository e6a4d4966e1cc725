//! Path length first, then reflection loss.

use rayon::prelude::*;

use super::pairs::path_matches;
use super::{
    total_cmp_keys, CandidateSolution, Diagnostic, LocalizationMethod, LossModel, SolveReport, SolverConfig,
    TableModel,
};
use crate::cluster::connected_components;
use crate::error::Result;
use crate::geometry::{build_trajectory, single_bounce_rp, Trajectory, COPLANAR_TOL};
use crate::rl_db::{MaterialSequence, RlDatabase};
use crate::scene::Measurement;

pub struct Method1;

impl LocalizationMethod for Method1 {
    fn name(&self) -> &'static str {
        "method1"
    }

    fn description(&self) -> &'static str {
        "match path length, then compare predicted and measured reflection loss"
    }

    fn solve(&self, m: &Measurement, db: &RlDatabase, cfg: &SolverConfig) -> Result<SolveReport> {
        method1(m, db, cfg)
    }
}

pub fn method1(m: &Measurement, db: &RlDatabase, cfg: &SolverConfig) -> Result<SolveReport> {
    method1_with_model(m, &TableModel::new(db, cfg), cfg)
}

pub fn method1_with_model(m: &Measurement, model: &dyn LossModel, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    m.validate()?;
    let tol = cfg.effective_rl_tol(m);

    let single = single_bounce_candidates(m, model, cfg, tol)?;
    if !single.is_empty() {
        return Ok(SolveReport::from_candidates(rank_by_rl(single), Diagnostic::NoRlMatch));
    }

    let matches = path_matches(m, cfg)?;
    if matches.is_empty() {
        return Ok(SolveReport::from_candidates(Vec::new(), Diagnostic::NoPathMatch));
    }
    let sequences = MaterialSequence::all_ordered(&model.materials(), 2);

    // (match index, sequence index, predicted loss)
    let hits: Vec<(usize, usize, f64)> = matches
        .par_iter()
        .enumerate()
        .map(|(k, pm)| {
            let mut found = Vec::new();
            for (s, seq) in sequences.iter().enumerate() {
                if let Some(rl) = model.predict(&pm.trajectory, seq)? {
                    if (rl - m.rl_measured_db).abs() <= tol {
                        found.push((k, s, rl));
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut candidates = Vec::new();
    for (s, seq) in sequences.iter().enumerate() {
        let group: Vec<&(usize, usize, f64)> = hits.iter().filter(|h| h.1 == s).collect();
        let cells: Vec<(usize, usize)> = group.iter().map(|h| (matches[h.0].i, matches[h.0].j)).collect();
        for members in connected_components(&cells) {
            let best = members
                .into_iter()
                .min_by(|&a, &b| {
                    let ra = (group[a].2 - m.rl_measured_db).abs();
                    let rb = (group[b].2 - m.rl_measured_db).abs();
                    total_cmp_keys(&[ra], &[rb]).then(a.cmp(&b))
                })
                .expect("components are non-empty");
            let (k, _, rl) = *group[best];
            candidates.push(CandidateSolution {
                trajectory: matches[k].trajectory.clone(),
                materials: seq.clone(),
                sum_rl: rl,
                rl_residual: rl - m.rl_measured_db,
                path_residual: matches[k].path_residual,
            });
        }
    }
    Ok(SolveReport::from_candidates(rank_by_rl(candidates), Diagnostic::NoRlMatch))
}

/// Scores an explicit list of candidate trajectories instead of enumerating
/// the beams. Every trajectory within the path tolerance is paired with every
/// material sequence of matching length.
pub fn method1_with_pairs(
    m: &Measurement,
    trajectories: &[Trajectory],
    model: &dyn LossModel,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    m.validate()?;
    let tol = cfg.effective_rl_tol(m);
    let materials = model.materials();
    let mut any_path = false;
    let mut candidates = Vec::new();
    for trajectory in trajectories {
        let path_residual = trajectory.total_length - m.path_length_m;
        if path_residual.abs() > cfg.path_tol {
            continue;
        }
        any_path = true;
        for seq in MaterialSequence::all_ordered(&materials, trajectory.bounce_count()) {
            if let Some(rl) = model.predict(trajectory, &seq)? {
                if (rl - m.rl_measured_db).abs() <= tol {
                    candidates.push(CandidateSolution {
                        trajectory: trajectory.clone(),
                        materials: seq,
                        sum_rl: rl,
                        rl_residual: rl - m.rl_measured_db,
                        path_residual,
                    });
                }
            }
        }
    }
    let empty = if any_path { Diagnostic::NoRlMatch } else { Diagnostic::NoPathMatch };
    Ok(SolveReport::from_candidates(rank_by_rl(candidates), empty))
}

/// Candidates for the one-bounce hypothesis; empty unless the beams are
/// coplanar, meet in front of both ends and give the measured length.
pub(crate) fn single_bounce_candidates(
    m: &Measurement,
    model: &dyn LossModel,
    cfg: &SolverConfig,
    tol: f64,
) -> Result<Vec<CandidateSolution>> {
    let Some(rp) = single_bounce_rp(&m.tx_ray(), &m.rx_ray(), COPLANAR_TOL) else {
        return Ok(Vec::new());
    };
    let Ok(trajectory) = build_trajectory(&[m.tx, rp, m.rx]) else {
        return Ok(Vec::new());
    };
    let path_residual = trajectory.total_length - m.path_length_m;
    if path_residual.abs() > cfg.path_tol {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for seq in MaterialSequence::all_ordered(&model.materials(), 1) {
        if let Some(rl) = model.predict(&trajectory, &seq)? {
            if (rl - m.rl_measured_db).abs() <= tol {
                out.push(CandidateSolution {
                    trajectory: trajectory.clone(),
                    materials: seq,
                    sum_rl: rl,
                    rl_residual: rl - m.rl_measured_db,
                    path_residual,
                });
            }
        }
    }
    Ok(out)
}

fn rank_by_rl(mut candidates: Vec<CandidateSolution>) -> Vec<CandidateSolution> {
    candidates.sort_by(|a, b| {
        total_cmp_keys(
            &[a.rl_residual.abs(), a.path_residual.abs()],
            &[b.rl_residual.abs(), b.path_residual.abs()],
        )
    });
    candidates
}
