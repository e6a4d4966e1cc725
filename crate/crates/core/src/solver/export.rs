//! Tabular candidate output and material-tagged point export.

use serde::{Deserialize, Serialize};

use super::CandidateSolution;
use crate::error::{Error, Result};

/// One ranked candidate as written to CSV or JSON. Second-bounce fields are
/// empty for single-bounce candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub rank: usize,
    pub rp1_x: f64,
    pub rp1_y: f64,
    pub rp1_z: f64,
    pub rp2_x: Option<f64>,
    pub rp2_y: Option<f64>,
    pub rp2_z: Option<f64>,
    pub theta1_deg: f64,
    pub theta2_deg: Option<f64>,
    pub material1: String,
    pub material2: Option<String>,
    pub sum_rl_db: f64,
    pub rl_residual_db: f64,
    pub path_residual_m: f64,
}

impl CandidateRecord {
    pub fn from_candidate(rank: usize, c: &CandidateSolution) -> Result<Self> {
        let rps = c.reflection_points();
        let names = c.materials.names();
        if rps.is_empty() || rps.len() > 2 || names.len() != rps.len() {
            return Err(Error::Inconsistent(format!(
                "cannot tabulate a {}-bounce candidate with {} materials",
                rps.len(),
                names.len()
            )));
        }
        let angles = &c.trajectory.incident_angles;
        let rp2 = rps.get(1);
        Ok(Self {
            rank,
            rp1_x: rps[0].x,
            rp1_y: rps[0].y,
            rp1_z: rps[0].z,
            rp2_x: rp2.map(|p| p.x),
            rp2_y: rp2.map(|p| p.y),
            rp2_z: rp2.map(|p| p.z),
            theta1_deg: angles[0],
            theta2_deg: angles.get(1).copied(),
            material1: names[0].clone(),
            material2: names.get(1).cloned(),
            sum_rl_db: c.sum_rl,
            rl_residual_db: c.rl_residual,
            path_residual_m: c.path_residual,
        })
    }
}

fn records(candidates: &[CandidateSolution]) -> Result<Vec<CandidateRecord>> {
    candidates
        .iter()
        .enumerate()
        .map(|(k, c)| CandidateRecord::from_candidate(k + 1, c))
        .collect()
}

pub fn candidates_to_csv(candidates: &[CandidateSolution]) -> Result<String> {
    to_csv(&records(candidates)?, CANDIDATE_HEADER)
}

pub fn candidates_to_json(candidates: &[CandidateSolution]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&records(candidates)?)?)
}

pub fn candidates_from_csv(text: &str) -> Result<Vec<CandidateRecord>> {
    from_csv(text)
}

pub fn candidates_from_json(text: &str) -> Result<Vec<CandidateRecord>> {
    Ok(serde_json::from_str(text)?)
}

/// A reflection point labelled with the material identified there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub material: String,
}

pub fn export_points(candidates: &[CandidateSolution]) -> Vec<TaggedPoint> {
    candidates
        .iter()
        .flat_map(|c| {
            c.reflection_points()
                .iter()
                .zip(c.materials.names())
                .map(|(p, name)| TaggedPoint {
                    x: p.x,
                    y: p.y,
                    z: p.z,
                    material: name.clone(),
                })
        })
        .collect()
}

pub fn points_from_records(records: &[CandidateRecord]) -> Vec<TaggedPoint> {
    let mut out = Vec::new();
    for r in records {
        out.push(TaggedPoint {
            x: r.rp1_x,
            y: r.rp1_y,
            z: r.rp1_z,
            material: r.material1.clone(),
        });
        if let (Some(x), Some(y), Some(z), Some(m)) = (r.rp2_x, r.rp2_y, r.rp2_z, &r.material2) {
            out.push(TaggedPoint {
                x,
                y,
                z,
                material: m.clone(),
            });
        }
    }
    out
}

pub fn points_to_csv(points: &[TaggedPoint]) -> Result<String> {
    to_csv(points, &["x", "y", "z", "material"])
}

const CANDIDATE_HEADER: &[&str] = &[
    "rank",
    "rp1_x",
    "rp1_y",
    "rp1_z",
    "rp2_x",
    "rp2_y",
    "rp2_z",
    "theta1_deg",
    "theta2_deg",
    "material1",
    "material2",
    "sum_rl_db",
    "rl_residual_db",
    "path_residual_m",
];

fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    // explicit header so an empty result still carries the column names
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_trajectory, Vec3};
    use crate::rl_db::MaterialSequence;

    fn candidate() -> CandidateSolution {
        let t = build_trajectory(&[
            Vec3::new(1.0, 3.0, 0.0),
            Vec3::new(0.0, 2.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(3.0, 1.0, 0.0),
        ])
        .unwrap();
        CandidateSolution {
            trajectory: t,
            materials: MaterialSequence::new(["wood", "glass"]).unwrap(),
            sum_rl: 20.5,
            rl_residual: 0.01,
            path_residual: -0.004,
        }
    }

    #[test]
    fn csv_round_trip() {
        let c = vec![candidate()];
        let text = candidates_to_csv(&c).unwrap();
        assert!(text.starts_with("rank,rp1_x,rp1_y,rp1_z,rp2_x"));
        let back = candidates_from_csv(&text).unwrap();
        assert_eq!(back, vec![CandidateRecord::from_candidate(1, &c[0]).unwrap()]);
        let json = candidates_to_json(&c).unwrap();
        assert_eq!(candidates_from_json(&json).unwrap(), back);
    }

    #[test]
    fn empty_csv_keeps_header() {
        let text = candidates_to_csv(&[]).unwrap();
        assert_eq!(text.trim(), CANDIDATE_HEADER.join(","));
        assert!(candidates_from_csv(&text).unwrap().is_empty());
    }

    #[test]
    fn points_are_tagged() {
        let c = vec![candidate()];
        let pts = export_points(&c);
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].material, "glass");
        let recs = candidates_from_csv(&candidates_to_csv(&c).unwrap()).unwrap();
        assert_eq!(points_from_records(&recs), pts);
        assert!(points_to_csv(&pts).unwrap().starts_with("x,y,z,material\n0.0,2.0,0.0,wood"));
    }
}
