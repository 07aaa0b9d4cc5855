//! Optical-constant tables shipped with the crate (`data/materials/*.csv`).
//!
//! Sources are listed in `data/materials/README.md`.

use alloc::sync::Arc;

use crate::materials::{Material, MaterialError};

/// `(identifier, table content)` for every bundled material.
pub const TABLES: &[(&str, &str)] = &[
    ("ag", include_str!("../../../data/materials/ag.csv")),
    ("au", include_str!("../../../data/materials/au.csv")),
    ("bk7", include_str!("../../../data/materials/bk7.csv")),
    ("bp", include_str!("../../../data/materials/bp.csv")),
    ("mos2", include_str!("../../../data/materials/mos2.csv")),
    ("ws2", include_str!("../../../data/materials/ws2.csv")),
];

/// Loads a bundled material, `None` for an unknown identifier.
pub fn material(id: &str) -> Option<Result<Arc<Material>, MaterialError>> {
    TABLES
        .iter()
        .find(|(name, _)| *name == id)
        .map(|(name, doc)| Material::load_table(*name, doc).map(Arc::new))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_parses() {
        for (id, _) in TABLES {
            let m = material(id).unwrap().unwrap();
            assert_eq!(m.name(), *id);
            m.refractive_index_at(633.0).unwrap();
        }
        assert!(material("unobtainium").is_none());
    }

    #[test]
    fn bk7_at_633() {
        let n = material("bk7").unwrap().unwrap().refractive_index_at(633.0).unwrap();
        assert_eq!(n.re, 1.5151);
        assert_eq!(n.im, 0.0);
    }
}
