//! Bundled reference data: the published loss table at 100 GHz, the
//! reflection-loss listings for the four example trajectories, the
//! path-length listing of the inverse example, and the demonstration scenes.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{Trajectory, Vec3};
use crate::rl_db::{MaterialSequence, RlDatabase};
use crate::scene::{Probe, Scene};
use crate::solver::LossModel;

const TABLE2: &str = include_str!("../assets/table2.csv");
const TABLE3: &str = include_str!("../assets/table3.csv");
const TABLE4: &str = include_str!("../assets/table4.csv");

const SCENES: &[(&str, &str)] = &[
    ("fig1a", include_str!("../assets/scenes/fig1a.json")),
    ("fig1b", include_str!("../assets/scenes/fig1b.json")),
    ("fig1c", include_str!("../assets/scenes/fig1c.json")),
    ("fig2a", include_str!("../assets/scenes/fig2a.json")),
    ("fig2b", include_str!("../assets/scenes/fig2b.json")),
    ("fig2c", include_str!("../assets/scenes/fig2c.json")),
    ("fig2d", include_str!("../assets/scenes/fig2d.json")),
];

/// Published loss table (wood, plasterboard, glass; 0..=80 deg in 5 deg steps).
pub fn reference_rl_table() -> RlDatabase {
    RlDatabase::from_csv_reader(TABLE2.as_bytes()).expect("bundled loss table is valid")
}

/// Per-material losses of a labelled double-bounce trajectory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LossRow {
    pub trajectory: String,
    pub rp1_x: f64,
    pub rp1_y: f64,
    pub rp1_z: f64,
    pub rp2_x: f64,
    pub rp2_y: f64,
    pub rp2_z: f64,
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    pub material1: String,
    pub material2: String,
    pub rl1_db: f64,
    pub rl2_db: f64,
    pub sum_rl_db: f64,
}

/// A loss-consistent trajectory with its total length.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LengthRow {
    pub trajectory: u32,
    pub rp1_x: f64,
    pub rp1_y: f64,
    pub rp1_z: f64,
    pub rp2_x: f64,
    pub rp2_y: f64,
    pub rp2_z: f64,
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    pub material1: String,
    pub material2: String,
    pub path_length_m: f64,
}

macro_rules! rp_accessors {
    ($t:ty) => {
        impl $t {
            pub fn rp1(&self) -> Vec3 {
                Vec3::new(self.rp1_x, self.rp1_y, self.rp1_z)
            }

            pub fn rp2(&self) -> Vec3 {
                Vec3::new(self.rp2_x, self.rp2_y, self.rp2_z)
            }

            pub fn sequence(&self) -> MaterialSequence {
                MaterialSequence::new([self.material1.as_str(), self.material2.as_str()])
                    .expect("two materials")
            }
        }
    };
}

rp_accessors!(LossRow);
rp_accessors!(LengthRow);

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Vec<T> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .expect("bundled table is valid")
}

pub fn loss_rows() -> Vec<LossRow> {
    parse(TABLE3)
}

pub fn length_rows() -> Vec<LengthRow> {
    parse(TABLE4)
}

pub fn scene_names() -> Vec<&'static str> {
    SCENES.iter().map(|(n, _)| *n).collect()
}

pub fn scene(name: &str) -> Result<(Scene, Option<Probe>)> {
    let (_, text) = SCENES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidConfig(format!("no bundled scene named `{name}`")))?;
    Scene::from_json_str(text)
}

/// Loss model answering from the tabulated per-trajectory sums: a trajectory
/// is recognised when both reflection points lie within `tolerance_m` of a
/// listed pair.
pub struct TabulatedLosses {
    rows: Vec<LossRow>,
    tolerance_m: f64,
}

impl TabulatedLosses {
    pub fn new(rows: Vec<LossRow>, tolerance_m: f64) -> Self {
        Self { rows, tolerance_m }
    }

    pub fn builtin() -> Self {
        Self::new(loss_rows(), 0.05)
    }
}

impl LossModel for TabulatedLosses {
    fn materials(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.rows {
            for m in [&r.material1, &r.material2] {
                if !names.contains(m) {
                    names.push(m.clone());
                }
            }
        }
        names
    }

    fn predict(&self, trajectory: &Trajectory, seq: &MaterialSequence) -> Result<Option<f64>> {
        let rps = trajectory.reflection_points();
        if rps.len() != 2 || seq.len() != 2 {
            return Ok(None);
        }
        Ok(self
            .rows
            .iter()
            .find(|r| {
                r.material1 == seq.names()[0]
                    && r.material2 == seq.names()[1]
                    && (r.rp1() - rps[0]).norm() <= self.tolerance_m
                    && (r.rp2() - rps[1]).norm() <= self.tolerance_m
            })
            .map(|r| r.sum_rl_db))
    }
}
