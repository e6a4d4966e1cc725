//! Reflection-loss database.
//!
//! A table of single-bounce reflection loss per material over an incident-angle
//! grid, either computed from the material models or imported from CSV. Queries
//! interpolate linearly between grid angles and extrapolate the last segment
//! linearly up to a configurable bound. Multi-bounce losses are the sum of the
//! per-bounce values, and the inverse query scans an angle grid for every
//! ordered material pair to recover the iso-loss loci of a measured total.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fresnel::reflection_loss;
use crate::materials::{MaterialCatalog, MaterialParams};

pub const DEFAULT_ANGLE_STEP: f64 = 0.1;
pub const DEFAULT_RL_TOL: f64 = 0.05;
/// Distance past the last grid angle that lookups may extrapolate.
pub const DEFAULT_EXTRAPOLATION_MARGIN: f64 = 10.0;

const MAX_GRID_ANGLE: f64 = 89.0;
const MAX_BOUNCES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    Imported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RlDatabase {
    frequency_ghz: Option<f64>,
    angle_grid: Vec<f64>,
    entries: Vec<(String, Vec<f64>)>,
    provenance: Provenance,
    extrapolation_bound: f64,
}

/// Ordered materials struck along a trajectory, one per bounce.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MaterialSequence(Vec<String>);

impl MaterialSequence {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > MAX_BOUNCES {
            return Err(Error::Inconsistent(format!(
                "material sequence length {} outside 1..={MAX_BOUNCES}",
                names.len()
            )));
        }
        Ok(Self(names))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate_against(&self, catalog: &MaterialCatalog) -> Result<()> {
        for n in &self.0 {
            catalog.lookup(n)?;
        }
        Ok(())
    }

    /// All ordered sequences of length `n` drawn from `materials`.
    pub fn all_ordered<S: AsRef<str>>(materials: &[S], n: usize) -> Vec<Self> {
        let mut out: Vec<Vec<String>> = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    materials.iter().map(move |m| {
                        let mut next = prefix.clone();
                        next.push(m.as_ref().to_string());
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(Self).collect()
    }
}

impl fmt::Display for MaterialSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("->"))
    }
}

/// A connected set of angle pairs whose summed loss matches a target.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoRlLocus {
    pub sequence: MaterialSequence,
    /// `(theta1, theta2)` in degrees, ordered by grid index.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleMatch {
    pub material: String,
    pub theta_deg: f64,
    pub rl_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InverseMatches {
    Single(Vec<SingleMatch>),
    Double(Vec<IsoRlLocus>),
}

impl InverseMatches {
    pub fn is_empty(&self) -> bool {
        match self {
            Self::Single(v) => v.is_empty(),
            Self::Double(v) => v.is_empty(),
        }
    }
}

/// Per-sequence membership grid for a two-bounce inverse query.
#[derive(Debug, Clone)]
pub struct IsoRlMask {
    pub angle_step: f64,
    pub cells: usize,
    pub sequences: Vec<MaterialSequence>,
    masks: Vec<Vec<bool>>,
}

impl IsoRlMask {
    pub fn angle(&self, index: usize) -> f64 {
        index as f64 * self.angle_step
    }

    pub fn contains(&self, seq_index: usize, i: usize, j: usize) -> bool {
        i < self.cells && j < self.cells && self.masks[seq_index][i * self.cells + j]
    }

    /// Whether the grid cell nearest to `(theta1, theta2)` belongs to the locus.
    pub fn contains_angles(&self, seq_index: usize, theta1: f64, theta2: f64) -> bool {
        let i = (theta1 / self.angle_step).round();
        let j = (theta2 / self.angle_step).round();
        i >= 0.0 && j >= 0.0 && self.contains(seq_index, i as usize, j as usize)
    }

    pub fn count(&self, seq_index: usize) -> usize {
        self.masks[seq_index].iter().filter(|&&b| b).count()
    }
}

fn interpolate(grid: &[f64], values: &[f64], theta: f64) -> f64 {
    if grid.len() == 1 {
        return values[0];
    }
    let k = match grid.partition_point(|&g| g <= theta) {
        0 => 0,
        p => (p - 1).min(grid.len() - 2),
    };
    if theta == grid[k] {
        return values[k];
    }
    let (g0, g1) = (grid[k], grid[k + 1]);
    values[k] + (values[k + 1] - values[k]) * (theta - g0) / (g1 - g0)
}

impl RlDatabase {
    fn new(
        frequency_ghz: Option<f64>,
        angle_grid: Vec<f64>,
        entries: Vec<(String, Vec<f64>)>,
        provenance: Provenance,
    ) -> Result<Self> {
        validate_grid(&angle_grid).map_err(|message| Error::Schema {
            row: 1,
            column: 0,
            message,
        })?;
        let bound = angle_grid.last().copied().unwrap_or(0.0) + DEFAULT_EXTRAPOLATION_MARGIN;
        Ok(Self {
            frequency_ghz,
            angle_grid,
            entries,
            provenance,
            extrapolation_bound: bound,
        })
    }

    pub fn frequency_ghz(&self) -> Option<f64> {
        self.frequency_ghz
    }

    pub fn angle_grid(&self) -> &[f64] {
        &self.angle_grid
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn extrapolation_bound(&self) -> f64 {
        self.extrapolation_bound
    }

    pub fn set_extrapolation_bound(&mut self, bound_deg: f64) {
        self.extrapolation_bound = bound_deg;
    }

    pub fn with_extrapolation_bound(mut self, bound_deg: f64) -> Self {
        self.extrapolation_bound = bound_deg;
        self
    }

    pub fn materials(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn row(&self, material: &str) -> Result<&[f64]> {
        self.entries
            .iter()
            .find(|(n, _)| n == material)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::MaterialNotFound(material.to_string()))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, material: &str, theta_deg: f64) -> Result<f64> {
        let row = self.row(material)?;
        if !(theta_deg >= 0.0) {
            return Err(Error::AngleOutOfRange(theta_deg));
        }
        if theta_deg > self.extrapolation_bound {
            return Err(Error::AngleBeyondBound {
                angle: theta_deg,
                bound: self.extrapolation_bound,
            });
        }
        Ok(interpolate(&self.angle_grid, row, theta_deg))
    }

    pub fn sum_rl(&self, seq: &MaterialSequence, angles_deg: &[f64]) -> Result<f64> {
        if seq.len() != angles_deg.len() {
            return Err(Error::Inconsistent(format!(
                "{} materials but {} angles",
                seq.len(),
                angles_deg.len()
            )));
        }
        seq.names()
            .iter()
            .zip(angles_deg)
            .map(|(m, &a)| self.lookup(m, a))
            .sum()
    }

    /// Every material's loss sampled at `i * angle_step` up to the scan limit.
    fn sampled_rows(&self, angle_step: f64) -> Result<(usize, Vec<Vec<f64>>)> {
        if !(angle_step > 0.0) {
            return Err(Error::NonPositive {
                what: "angle step",
                value: angle_step,
            });
        }
        let limit = self.extrapolation_bound.min(90.0);
        let cells = (limit / angle_step + 1e-9).floor() as usize + 1;
        let rows = self
            .entries
            .iter()
            .map(|(_, values)| {
                (0..cells)
                    .map(|i| interpolate(&self.angle_grid, values, i as f64 * angle_step))
                    .collect()
            })
            .collect();
        Ok((cells, rows))
    }

    /// Membership grids of `|RL1 + RL2 - target| <= tol` for all ordered pairs.
    pub fn iso_rl_mask(&self, target_db: f64, tol_db: f64, angle_step: f64) -> Result<IsoRlMask> {
        if !(tol_db > 0.0) {
            return Err(Error::NonPositive {
                what: "tolerance",
                value: tol_db,
            });
        }
        let (cells, rows) = self.sampled_rows(angle_step)?;
        let n = self.entries.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        let masks = pairs
            .par_iter()
            .map(|&(a, b)| {
                let mut mask = vec![false; cells * cells];
                for i in 0..cells {
                    for j in 0..cells {
                        mask[i * cells + j] = (rows[a][i] + rows[b][j] - target_db).abs() <= tol_db;
                    }
                }
                mask
            })
            .collect();
        let names = self.materials();
        let sequences = pairs
            .iter()
            .map(|&(a, b)| MaterialSequence(vec![names[a].to_string(), names[b].to_string()]))
            .collect();
        Ok(IsoRlMask {
            angle_step,
            cells,
            sequences,
            masks,
        })
    }

    pub fn inverse_lookup(
        &self,
        target_db: f64,
        tol_db: f64,
        n_bounces: usize,
        angle_step: f64,
    ) -> Result<InverseMatches> {
        match n_bounces {
            1 => {
                if !(tol_db > 0.0) {
                    return Err(Error::NonPositive {
                        what: "tolerance",
                        value: tol_db,
                    });
                }
                let (cells, rows) = self.sampled_rows(angle_step)?;
                let mut out = Vec::new();
                for ((name, _), row) in self.entries.iter().zip(&rows) {
                    for (i, &rl) in row.iter().enumerate().take(cells) {
                        if (rl - target_db).abs() <= tol_db {
                            out.push(SingleMatch {
                                material: name.clone(),
                                theta_deg: i as f64 * angle_step,
                                rl_db: rl,
                            });
                        }
                    }
                }
                Ok(InverseMatches::Single(out))
            }
            2 => {
                let mask = self.iso_rl_mask(target_db, tol_db, angle_step)?;
                let mut loci = Vec::new();
                for (s, seq) in mask.sequences.iter().enumerate() {
                    let cells: Vec<(usize, usize)> = (0..mask.cells)
                        .flat_map(|i| (0..mask.cells).map(move |j| (i, j)))
                        .filter(|&(i, j)| mask.contains(s, i, j))
                        .collect();
                    for component in crate::cluster::connected_components(&cells) {
                        loci.push(IsoRlLocus {
                            sequence: seq.clone(),
                            points: component
                                .into_iter()
                                .map(|k| (mask.angle(cells[k].0), mask.angle(cells[k].1)))
                                .collect(),
                        });
                    }
                }
                Ok(InverseMatches::Double(loci))
            }
            n => Err(Error::InvalidConfig(format!(
                "inverse lookup supports 1 or 2 bounces, got {n}"
            ))),
        }
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = rdr.records();
        let header = records.next().ok_or_else(|| Error::Schema {
            row: 1,
            column: 1,
            message: "missing header row".into(),
        })??;
        if header.get(0) != Some("material") {
            return Err(Error::Schema {
                row: 1,
                column: 1,
                message: "first header cell must be `material`".into(),
            });
        }
        let grid = header
            .iter()
            .enumerate()
            .skip(1)
            .map(|(c, cell)| {
                cell.parse::<f64>().map_err(|_| Error::Schema {
                    row: 1,
                    column: c + 1,
                    message: format!("angle `{cell}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        validate_grid(&grid).map_err(|message| Error::Schema {
            row: 1,
            column: 2,
            message,
        })?;

        let mut entries: Vec<(String, Vec<f64>)> = Vec::new();
        for (r, record) in records.enumerate() {
            let row = r + 2;
            let record = record?;
            if record.len() != grid.len() + 1 {
                return Err(Error::Schema {
                    row,
                    column: record.len(),
                    message: format!("expected {} cells, found {}", grid.len() + 1, record.len()),
                });
            }
            let name = record.get(0).unwrap_or_default().to_string();
            if name.is_empty() {
                return Err(Error::Schema {
                    row,
                    column: 1,
                    message: "empty material name".into(),
                });
            }
            if entries.iter().any(|(n, _)| *n == name) {
                return Err(Error::Schema {
                    row,
                    column: 1,
                    message: format!("duplicate material `{name}`"),
                });
            }
            let values = record
                .iter()
                .enumerate()
                .skip(1)
                .map(|(c, cell)| match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
                    _ => Err(Error::Schema {
                        row,
                        column: c + 1,
                        message: format!("`{cell}` is not a finite non-negative loss"),
                    }),
                })
                .collect::<Result<Vec<_>>>()?;
            entries.push((name, values));
        }
        Self::new(None, grid, entries, Provenance::Imported)
    }

    pub fn import(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["material".to_string()];
        header.extend(self.angle_grid.iter().map(|a| format_number(*a)));
        wtr.write_record(&header)?;
        for (name, values) in &self.entries {
            let mut record = vec![name.clone()];
            record.extend(values.iter().map(|v| format_db(*v)));
            wtr.write_record(&record)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> std::result::Result<(), String> {
    if grid.is_empty() {
        return Err("angle grid is empty".into());
    }
    if grid.iter().any(|a| !(0.0..=MAX_GRID_ANGLE).contains(a)) {
        return Err(format!("grid angles must lie in [0, {MAX_GRID_ANGLE}]"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err("angle grid must be strictly increasing".into());
    }
    Ok(())
}

fn format_number(v: f64) -> String {
    format!("{v}")
}

/// At least two decimals, and never fewer digits than needed to round-trip.
pub(crate) fn format_db(v: f64) -> String {
    let short = format!("{v:.2}");
    if short.parse::<f64>().ok() == Some(v) {
        short
    } else {
        format!("{v}")
    }
}

/// Computes the loss table for `materials` at `freq_ghz`.
pub fn generate_db(materials: &[MaterialParams], freq_ghz: f64, angle_grid: &[f64]) -> Result<RlDatabase> {
    validate_grid(angle_grid).map_err(Error::InvalidConfig)?;
    let cells: Vec<(usize, usize)> = (0..materials.len())
        .flat_map(|m| (0..angle_grid.len()).map(move |k| (m, k)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(m, k)| reflection_loss(&materials[m], angle_grid[k], freq_ghz))
        .collect::<Result<Vec<f64>>>()?;
    let entries = materials
        .iter()
        .zip(values.chunks(angle_grid.len().max(1)))
        .map(|(m, row)| (m.name.clone(), row.to_vec()))
        .collect();
    RlDatabase::new(Some(freq_ghz), angle_grid.to_vec(), entries, Provenance::Computed)
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_angle_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidConfig(format!("invalid angle range `{spec}`, expected start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}
