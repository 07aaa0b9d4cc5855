//! Optical constants: tabulated or constant complex refractive indices.
//!
//! Tables are read from a small CSV dialect with the header
//! `wavelength_nm,n,k` and one row per wavelength. Lookups interpolate `n`
//! and `k` linearly and independently; there is no extrapolation.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Header line every material table must start with.
pub const TABLE_HEADER: &str = "wavelength_nm,n,k";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaterialError {
    #[error("material table is empty (expected header `{TABLE_HEADER}`)")]
    Empty,
    #[error("bad header `{0}` (expected `{TABLE_HEADER}`)")]
    BadHeader(String),
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("row {row}: wavelength {wavelength} nm is not greater than the previous row")]
    NonIncreasing { row: usize, wavelength: f64 },
    #[error("row {row}: {column} = {value} is not allowed (need n > 0 and k >= 0)")]
    InvalidIndex {
        row: usize,
        column: &'static str,
        value: f64,
    },
    #[error("material table has no data rows")]
    NoRows,
    #[error("{material}: wavelength {wavelength} nm is outside the table range [{min}, {max}] nm")]
    OutOfRange {
        material: String,
        wavelength: f64,
        min: f64,
        max: f64,
    },
    #[error("constant index {n}+{k}i is not a passive medium (need n > 0 and k >= 0)")]
    InvalidConstant { n: f64, k: f64 },
}

/// One tabulated wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRow {
    pub wavelength_nm: f64,
    pub n: f64,
    pub k: f64,
}

/// Validated table: strictly increasing wavelengths, `n > 0`, `k >= 0`, at least one row.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTable {
    rows: Vec<DispersionRow>,
}

impl DispersionTable {
    pub fn new(rows: Vec<DispersionRow>) -> Result<Self, MaterialError> {
        if rows.is_empty() {
            return Err(MaterialError::NoRows);
        }
        for (i, r) in rows.iter().enumerate() {
            let row = i + 1;
            if !r.wavelength_nm.is_finite() || r.wavelength_nm <= 0.0 {
                return Err(MaterialError::MalformedRow {
                    row,
                    reason: alloc::format!("wavelength {} nm must be finite and positive", r.wavelength_nm),
                });
            }
            if !(r.n.is_finite() && r.n > 0.0) {
                return Err(MaterialError::InvalidIndex { row, column: "n", value: r.n });
            }
            if !(r.k.is_finite() && r.k >= 0.0) {
                return Err(MaterialError::InvalidIndex { row, column: "k", value: r.k });
            }
            if i > 0 && r.wavelength_nm <= rows[i - 1].wavelength_nm {
                return Err(MaterialError::NonIncreasing {
                    row,
                    wavelength: r.wavelength_nm,
                });
            }
        }
        Ok(Self { rows })
    }

    /// Parses the CSV dialect described in the module docs. Blank lines are
    /// ignored; row numbers in errors count data rows from 1.
    pub fn parse(document: &str) -> Result<Self, MaterialError> {
        let mut lines = document.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(MaterialError::Empty)?;
        let header = header.trim_start_matches('\u{feff}');
        if header != TABLE_HEADER {
            return Err(MaterialError::BadHeader(header.to_string()));
        }

        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = i + 1;
            let mut fields = line.split(',').map(str::trim);
            let mut next = |column: &str| -> Result<f64, MaterialError> {
                let text = fields.next().ok_or_else(|| MaterialError::MalformedRow {
                    row,
                    reason: alloc::format!("missing column `{column}`"),
                })?;
                text.parse::<f64>().map_err(|_| MaterialError::MalformedRow {
                    row,
                    reason: alloc::format!("`{text}` is not a number (column `{column}`)"),
                })
            };
            let wavelength_nm = next("wavelength_nm")?;
            let n = next("n")?;
            let k = next("k")?;
            if fields.next().is_some() {
                return Err(MaterialError::MalformedRow {
                    row,
                    reason: "expected exactly 3 columns".to_string(),
                });
            }
            rows.push(DispersionRow { wavelength_nm, n, k });
        }
        Self::new(rows)
    }

    pub fn rows(&self) -> &[DispersionRow] {
        &self.rows
    }

    /// Inclusive wavelength range covered by the table.
    pub fn range(&self) -> (f64, f64) {
        (self.rows[0].wavelength_nm, self.rows[self.rows.len() - 1].wavelength_nm)
    }

    /// Linear interpolation of `(n, k)`, `None` outside the table range.
    pub fn interpolate(&self, wavelength_nm: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.range();
        if !(wavelength_nm >= lo && wavelength_nm <= hi) {
            return None;
        }
        // first row with wavelength >= query
        let j = self.rows.partition_point(|r| r.wavelength_nm < wavelength_nm);
        let upper = self.rows[j];
        if upper.wavelength_nm == wavelength_nm {
            return Some((upper.n, upper.k));
        }
        let lower = self.rows[j - 1];
        let t = (wavelength_nm - lower.wavelength_nm) / (upper.wavelength_nm - lower.wavelength_nm);
        Some((lower.n + t * (upper.n - lower.n), lower.k + t * (upper.k - lower.k)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dispersion {
    Table(DispersionTable),
    Constant { n: f64, k: f64 },
}

/// A named source of complex refractive index `n + ik` versus wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    name: String,
    dispersion: Dispersion,
}

impl Material {
    pub fn from_table(name: impl Into<String>, table: DispersionTable) -> Self {
        Self {
            name: name.into(),
            dispersion: Dispersion::Table(table),
        }
    }

    pub fn constant(name: impl Into<String>, n: f64, k: f64) -> Result<Self, MaterialError> {
        if !(n.is_finite() && n > 0.0 && k.is_finite() && k >= 0.0) {
            return Err(MaterialError::InvalidConstant { n, k });
        }
        Ok(Self {
            name: name.into(),
            dispersion: Dispersion::Constant { n, k },
        })
    }

    /// Loads a material from the content of a `wavelength_nm,n,k` table.
    pub fn load_table(name: impl Into<String>, document: &str) -> Result<Self, MaterialError> {
        Ok(Self::from_table(name, DispersionTable::parse(document)?))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.dispersion
    }

    /// Wavelength range this material can be evaluated on; constants cover everything.
    pub fn range(&self) -> (f64, f64) {
        match &self.dispersion {
            Dispersion::Table(t) => t.range(),
            Dispersion::Constant { .. } => (0.0, f64::INFINITY),
        }
    }

    pub fn refractive_index_at(&self, wavelength_nm: f64) -> Result<Complex64, MaterialError> {
        let (n, k) = match &self.dispersion {
            Dispersion::Constant { n, k } if wavelength_nm.is_finite() && wavelength_nm > 0.0 => (*n, *k),
            Dispersion::Constant { .. } => return Err(self.out_of_range(wavelength_nm)),
            Dispersion::Table(t) => t
                .interpolate(wavelength_nm)
                .ok_or_else(|| self.out_of_range(wavelength_nm))?,
        };
        Ok(Complex64::new(n, k))
    }

    /// Relative permittivity `(n + ik)^2`.
    pub fn permittivity_at(&self, wavelength_nm: f64) -> Result<Complex64, MaterialError> {
        let idx = self.refractive_index_at(wavelength_nm)?;
        Ok(Complex64::new(idx.re * idx.re - idx.im * idx.im, 2.0 * idx.re * idx.im))
    }

    fn out_of_range(&self, wavelength: f64) -> MaterialError {
        let (min, max) = self.range();
        MaterialError::OutOfRange {
            material: self.name.clone(),
            wavelength,
            min,
            max,
        }
    }
}

impl fmt::Display for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
