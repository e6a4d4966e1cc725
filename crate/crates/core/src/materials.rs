//! Building-material electrical properties.
//!
//! Each material is described by the four-coefficient power-law model used for
//! indoor building materials: the real part of the relative permittivity is
//! `a * f^b` and the conductivity is `c * f^d`, with `f` in GHz. A material also
//! carries the RMS height deviation of its surface, used by the roughness
//! correction in [`crate::fresnel`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

const BUILTIN_CATALOG: &str = include_str!("../assets/table1.json");

/// Conversion constant between conductivity (S/m) and the imaginary part of the
/// relative permittivity when the frequency is expressed in GHz.
const CONDUCTIVITY_FACTOR: f64 = 17.98;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// RMS surface height deviation in meters.
    #[serde(rename = "roughness_m")]
    pub roughness_sigma: f64,
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidMaterial {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        if self.name.trim().is_empty() {
            return fail("empty name");
        }
        if !(self.a > 0.0) || !self.a.is_finite() {
            return fail("coefficient a must be positive");
        }
        if !(self.c >= 0.0) || !self.c.is_finite() {
            return fail("coefficient c must be non-negative");
        }
        if !self.b.is_finite() || !self.d.is_finite() {
            return fail("exponents b and d must be finite");
        }
        if !(self.roughness_sigma >= 0.0) || !self.roughness_sigma.is_finite() {
            return fail("roughness must be non-negative");
        }
        Ok(())
    }

    /// Copy of this material with a different surface roughness.
    pub fn with_roughness(&self, sigma_m: f64) -> Self {
        Self {
            roughness_sigma: sigma_m,
            ..self.clone()
        }
    }

    pub fn relative_permittivity(&self, freq_ghz: f64) -> Result<ComplexPermittivity> {
        relative_permittivity(self, freq_ghz)
    }
}

/// Complex relative permittivity `re - j*im`; `im` holds the magnitude of the
/// (negative) imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPermittivity {
    pub re: f64,
    pub im: f64,
}

impl ComplexPermittivity {
    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re, -self.im)
    }
}

pub fn relative_permittivity(params: &MaterialParams, freq_ghz: f64) -> Result<ComplexPermittivity> {
    ensure_positive("frequency", freq_ghz)?;
    let re = params.a * freq_ghz.powf(params.b);
    let im = CONDUCTIVITY_FACTOR * params.c * freq_ghz.powf(params.d) / freq_ghz;
    Ok(ComplexPermittivity { re, im })
}

/// Named set of materials, unique by name, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaterialCatalog {
    materials: Vec<MaterialParams>,
}

impl MaterialCatalog {
    /// Wood, plasterboard and glass.
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN_CATALOG).expect("built-in catalog is valid")
    }

    pub fn from_materials(materials: Vec<MaterialParams>) -> Result<Self> {
        let mut catalog = Self::default();
        for m in materials {
            catalog.insert(m)?;
        }
        Ok(catalog)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let records: Vec<MaterialParams> = serde_json::from_str(text)?;
        Self::from_materials(records)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.materials)?)
    }

    pub fn insert(&mut self, material: MaterialParams) -> Result<()> {
        material.validate()?;
        if self.materials.iter().any(|m| m.name == material.name) {
            return Err(Error::DuplicateMaterial(material.name));
        }
        self.materials.push(material);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Result<&MaterialParams> {
        self.materials
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    /// Resolves a list of names, failing on the first unknown one.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<MaterialParams>> {
        names
            .iter()
            .map(|n| self.lookup(n.as_ref()).cloned())
            .collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.materials.iter().map(|m| m.name.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = &MaterialParams> {
        self.materials.iter()
    }

    pub fn len(&self) -> usize {
        self.materials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.materials.is_empty()
    }
}

/// Looks a material up in the built-in catalog.
pub fn catalog_lookup(name: &str) -> Result<MaterialParams> {
    MaterialCatalog::builtin().lookup(name).cloned()
}
