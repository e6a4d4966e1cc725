//! Plot-ready tables for the forward and inverse models.
//!
//! Each curve kind is a [`CurveEmitter`] registered by name in
//! [`CurveRegistry`]; the CLI picks one with `emit-curves <kind>`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fresnel::{reflection_coefficients, reflection_loss};
use crate::materials::MaterialParams;
use crate::rl_db::{generate_db, validate_grid, InverseMatches, MaterialSequence, RlDatabase, DEFAULT_RL_TOL};

#[derive(Debug, Clone)]
pub struct CurveParams {
    pub materials: Vec<MaterialParams>,
    pub freq_ghz: f64,
    /// Incident angles to sample, degrees.
    pub angles: Vec<f64>,
    /// Loss table for the surface and trace kinds; computed from `materials`
    /// on `angles` when absent.
    pub db: Option<RlDatabase>,
    pub target_rl_db: Option<f64>,
    pub rl_tol: f64,
    pub angle_step: f64,
}

impl CurveParams {
    pub fn new(materials: Vec<MaterialParams>, freq_ghz: f64, angles: Vec<f64>) -> Self {
        Self {
            materials,
            freq_ghz,
            angles,
            db: None,
            target_rl_db: None,
            rl_tol: DEFAULT_RL_TOL,
            angle_step: 0.1,
        }
    }

    fn checked_angles(&self) -> Result<&[f64]> {
        if self.angles.is_empty() {
            return Err(Error::InvalidConfig("angle grid is empty".into()));
        }
        validate_grid(&self.angles).map_err(Error::InvalidConfig)?;
        Ok(&self.angles)
    }

    fn table(&self) -> Result<RlDatabase> {
        match &self.db {
            Some(db) => Ok(db.clone()),
            None => generate_db(&self.materials, self.freq_ghz, self.checked_angles()?),
        }
    }
}

/// Header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CurveTable {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

pub trait CurveEmitter: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn emit(&self, params: &CurveParams) -> Result<CurveTable>;
}

/// Single-bounce loss against incident angle for each material.
pub struct RlVsAngle;

impl CurveEmitter for RlVsAngle {
    fn name(&self) -> &'static str {
        "rl-vs-angle"
    }

    fn description(&self) -> &'static str {
        "single-bounce reflection loss per material and incident angle"
    }

    fn emit(&self, p: &CurveParams) -> Result<CurveTable> {
        let angles = p.checked_angles()?;
        let mut t = CurveTable::new(&["material", "theta_deg", "rl_db"]);
        for m in &p.materials {
            for &a in angles {
                t.push(vec![m.name.clone(), num(a), num(reflection_loss(m, a, p.freq_ghz)?)]);
            }
        }
        Ok(t)
    }
}

/// Magnitudes of the smooth-surface TE and TM coefficients.
pub struct CoeffAmplitude;

impl CurveEmitter for CoeffAmplitude {
    fn name(&self) -> &'static str {
        "coeff-amplitude"
    }

    fn description(&self) -> &'static str {
        "|r_TE| and |r_TM| of a smooth surface"
    }

    fn emit(&self, p: &CurveParams) -> Result<CurveTable> {
        let angles = p.checked_angles()?;
        let mut t = CurveTable::new(&["material", "theta_deg", "te", "tm"]);
        for m in &p.materials {
            let eta = m.relative_permittivity(p.freq_ghz)?;
            for &a in angles {
                let r = reflection_coefficients(eta, a)?;
                t.push(vec![m.name.clone(), num(a), num(r.r_te.norm()), num(r.r_tm.norm())]);
            }
        }
        Ok(t)
    }
}

/// Reflected power fractions of the smooth-surface TE and TM waves.
pub struct CoeffPower;

impl CurveEmitter for CoeffPower {
    fn name(&self) -> &'static str {
        "coeff-power"
    }

    fn description(&self) -> &'static str {
        "|r_TE|^2, |r_TM|^2 and their mean for a smooth surface"
    }

    fn emit(&self, p: &CurveParams) -> Result<CurveTable> {
        let angles = p.checked_angles()?;
        let mut t = CurveTable::new(&["material", "theta_deg", "te", "tm", "mean"]);
        for m in &p.materials {
            let eta = m.relative_permittivity(p.freq_ghz)?;
            for &a in angles {
                let r = reflection_coefficients(eta, a)?;
                let (te, tm) = r.power();
                t.push(vec![m.name.clone(), num(a), num(te), num(tm), num(r.effective_power())]);
            }
        }
        Ok(t)
    }
}

/// Summed double-bounce loss over the angle grid for every ordered pair.
pub struct SigmaRlSurface;

impl CurveEmitter for SigmaRlSurface {
    fn name(&self) -> &'static str {
        "sigma-rl-surface"
    }

    fn description(&self) -> &'static str {
        "summed loss over (theta1, theta2) for every ordered material pair"
    }

    fn emit(&self, p: &CurveParams) -> Result<CurveTable> {
        let angles = p.checked_angles()?;
        let db = p.table()?;
        let mut t = CurveTable::new(&["sequence", "theta1_deg", "theta2_deg", "sum_rl_db"]);
        for seq in MaterialSequence::all_ordered(&db.materials(), 2) {
            for &a1 in angles {
                for &a2 in angles {
                    t.push(vec![seq.to_string(), num(a1), num(a2), num(db.sum_rl(&seq, &[a1, a2])?)]);
                }
            }
        }
        Ok(t)
    }
}

/// Angle pairs on the iso-loss loci of a target summed loss.
pub struct IsoRlTrace;

impl CurveEmitter for IsoRlTrace {
    fn name(&self) -> &'static str {
        "iso-rl-trace"
    }

    fn description(&self) -> &'static str {
        "iso-loss traces of a target summed loss (needs a target)"
    }

    fn emit(&self, p: &CurveParams) -> Result<CurveTable> {
        let target = p
            .target_rl_db
            .ok_or_else(|| Error::InvalidConfig("iso-rl-trace needs a target loss".into()))?;
        let db = p.table()?;
        let InverseMatches::Double(loci) = db.inverse_lookup(target, p.rl_tol, 2, p.angle_step)? else {
            unreachable!("two-bounce lookup returns loci")
        };
        let mut t = CurveTable::new(&["sequence", "trace", "theta1_deg", "theta2_deg", "sum_rl_db"]);
        for (k, locus) in loci.iter().enumerate() {
            for &(a1, a2) in &locus.points {
                t.push(vec![
                    locus.sequence.to_string(),
                    k.to_string(),
                    num(a1),
                    num(a2),
                    num(db.sum_rl(&locus.sequence, &[a1, a2])?),
                ]);
            }
        }
        Ok(t)
    }
}

#[derive(Default)]
pub struct CurveRegistry {
    emitters: BTreeMap<&'static str, Box<dyn CurveEmitter>>,
}

impl CurveRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtin() -> Self {
        let mut r = Self::new();
        r.register(Box::new(RlVsAngle));
        r.register(Box::new(CoeffAmplitude));
        r.register(Box::new(CoeffPower));
        r.register(Box::new(SigmaRlSurface));
        r.register(Box::new(IsoRlTrace));
        r
    }

    pub fn register(&mut self, emitter: Box<dyn CurveEmitter>) {
        self.emitters.insert(emitter.name(), emitter);
    }

    pub fn get(&self, name: &str) -> Result<&dyn CurveEmitter> {
        self.emitters.get(name).map(|e| e.as_ref()).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "unknown curve kind `{name}` (available: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.emitters.keys().copied().collect()
    }
}
