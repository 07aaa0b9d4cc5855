//! The six published sensor configurations and their printed performance figures.
//!
//! Only the configuration names and the printed sensitivity, FWHM and FoM
//! columns are published; layer thicknesses, operating wavelength per row and
//! optical constants are not. The stacks built here use documented defaults
//! (BK7 prism, 633 nm, water analyte, 50 nm class metal films, 2D films as a
//! single monolayer) so they reproduce the configurations, not the values.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bundled;
use crate::materials::{Material, MaterialError};
use crate::stack::{Layer, Stack, StackError};

pub const WAVELENGTH_NM: f64 = 633.0;
pub const SENSING_INDEX: f64 = 1.33;

/// Metal film thickness used for single-metal rows, nm.
pub const METAL_NM: f64 = 50.0;
/// Bimetallic row: silver under a thin protective gold film, nm.
pub const BIMETAL_AG_NM: f64 = 45.0;
pub const BIMETAL_AU_NM: f64 = 5.0;
/// Monolayer thicknesses, nm.
pub const BP_MONOLAYER_NM: f64 = 0.53;
pub const MOS2_MONOLAYER_NM: f64 = 0.65;

/// A row of the published comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRow {
    pub name: &'static str,
    /// deg/RIU
    pub sensitivity: f64,
    /// deg
    pub fwhm: f64,
    /// 1/RIU, as printed (rounded)
    pub fom: f64,
}

impl PublishedRow {
    /// FoM recomputed from the printed sensitivity and FWHM.
    pub fn recomputed_fom(&self) -> f64 {
        self.sensitivity / self.fwhm
    }

    /// Whether the printed FoM agrees with the recomputed one within ±1.
    pub fn is_consistent(&self) -> bool {
        (self.recomputed_fom() - self.fom).abs() <= 1.0
    }
}

pub const PUBLISHED: [PublishedRow; 6] = [
    PublishedRow { name: "Ag-BP", sensitivity: 3200.0, fwhm: 1.5, fom: 2133.0 },
    PublishedRow { name: "Ag-only", sensitivity: 1100.0, fwhm: 3.2, fom: 343.0 },
    PublishedRow { name: "Au-BP", sensitivity: 1800.0, fwhm: 2.5, fom: 720.0 },
    PublishedRow { name: "Ag-MoS2", sensitivity: 1500.0, fwhm: 2.8, fom: 536.0 },
    PublishedRow { name: "Au-MoS2", sensitivity: 1600.0, fwhm: 2.9, fom: 552.0 },
    PublishedRow { name: "Ag-Au", sensitivity: 1000.0, fwhm: 4.0, fom: 250.0 },
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("material `{0}` is not available")]
    MissingMaterial(String),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Stack(#[from] StackError),
}

/// Layer recipe for each published row: `(material id, thickness nm)` from the prism side.
pub fn recipe(name: &str) -> Option<Vec<(&'static str, f64)>> {
    Some(match name {
        "Ag-BP" => vec![("ag", METAL_NM), ("bp", BP_MONOLAYER_NM)],
        "Ag-only" => vec![("ag", METAL_NM)],
        "Au-BP" => vec![("au", METAL_NM), ("bp", BP_MONOLAYER_NM)],
        "Ag-MoS2" => vec![("ag", METAL_NM), ("mos2", MOS2_MONOLAYER_NM)],
        "Au-MoS2" => vec![("au", METAL_NM), ("mos2", MOS2_MONOLAYER_NM)],
        "Ag-Au" => vec![("ag", BIMETAL_AG_NM), ("au", BIMETAL_AU_NM)],
        _ => return None,
    })
}

/// Builds the six benchmark stacks using `resolve` to look up materials by id.
pub fn stacks_with<F>(mut resolve: F) -> Result<Vec<(String, Stack)>, BenchError>
where
    F: FnMut(&str) -> Result<Arc<Material>, BenchError>,
{
    let prism = resolve("bk7")?;
    PUBLISHED
        .iter()
        .map(|row| {
            let layers = recipe(row.name)
                .unwrap_or_default()
                .into_iter()
                .map(|(id, d)| Ok(Layer::new(resolve(id)?, d)))
                .collect::<Result<Vec<_>, BenchError>>()?;
            let stack = Stack::new(prism.clone(), layers, SENSING_INDEX, WAVELENGTH_NM)?;
            Ok((String::from(row.name), stack))
        })
        .collect()
}

/// The six benchmark stacks built from the bundled tables.
pub fn stacks() -> Result<Vec<(String, Stack)>, BenchError> {
    stacks_with(|id| {
        bundled::material(id)
            .ok_or_else(|| BenchError::MissingMaterial(id.into()))?
            .map_err(BenchError::from)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_fom_column_is_self_consistent() {
        let expected = [2133.3, 343.8, 720.0, 535.7, 551.7, 250.0];
        for (row, want) in PUBLISHED.iter().zip(expected) {
            assert_eq!((row.recomputed_fom() * 10.0).round() / 10.0, want, "{}", row.name);
            assert!(row.is_consistent(), "{}", row.name);
        }
    }

    #[test]
    fn six_named_stacks() {
        let s = stacks().unwrap();
        let names: Vec<&str> = s.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["Ag-BP", "Ag-only", "Au-BP", "Ag-MoS2", "Au-MoS2", "Ag-Au"]);
        assert_eq!(s[5].1.layers().len(), 2);
        assert_eq!(s[1].1.layers().len(), 1);
    }
}
