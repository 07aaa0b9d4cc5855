//! JSON stack documents.
//!
//! ```json
//! {"prism":"bk7","layers":[{"material":"ag","thickness_nm":50}],"medium":{"n":1.33},"wavelength_nm":633}
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use spr_core::{Layer, Material, MaterialError, Stack, StackError};
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackDocument {
    pub prism: String,
    pub layers: Vec<LayerDocument>,
    pub medium: MediumDocument,
    pub wavelength_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDocument {
    pub material: String,
    pub thickness_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumDocument {
    pub n: f64,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("invalid stack document: {0}")]
    Json(serde_json::Error),
    #[error("prism: {0}")]
    Prism(CatalogError),
    #[error("layer {index}: {cause}")]
    LayerMaterial {
        index: usize,
        cause: CatalogError,
    },
    #[error("layer {index}: thickness_nm {thickness_nm} must be positive")]
    NonPositiveThickness { index: usize, thickness_nm: f64 },
    #[error("medium.n {0} must be >= 1")]
    MediumIndex(f64),
    #[error("wavelength_nm {wavelength_nm} is outside table `{table}` range [{min}, {max}] nm")]
    OutOfRange {
        table: String,
        wavelength_nm: f64,
        min: f64,
        max: f64,
    },
    #[error(transparent)]
    Stack(#[from] StackError),
}

impl StackDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(DocumentError::Json)
    }

    /// Document describing `stack`; materials are referred to by name.
    pub fn from_stack(stack: &Stack) -> Self {
        Self {
            prism: stack.prism().name().into(),
            layers: stack
                .layers()
                .iter()
                .map(|l| LayerDocument {
                    material: l.material.name().into(),
                    thickness_nm: l.thickness_nm,
                })
                .collect(),
            medium: MediumDocument { n: stack.sensing_index() },
            wavelength_nm: stack.wavelength_nm(),
        }
    }

    pub fn to_json(&self) -> String {
        // plain data with string keys: serialization cannot fail
        serde_json::to_string_pretty(self).expect("stack document serializes")
    }

    pub fn resolve(&self, catalog: &Catalog) -> Result<Stack, DocumentError> {
        if !(self.medium.n.is_finite() && self.medium.n >= 1.0) {
            return Err(DocumentError::MediumIndex(self.medium.n));
        }
        let prism = catalog.resolve(&self.prism).map_err(DocumentError::Prism)?;
        self.check_range(&prism)?;
        let mut layers = Vec::with_capacity(self.layers.len());
        for (index, layer) in self.layers.iter().enumerate() {
            if !(layer.thickness_nm.is_finite() && layer.thickness_nm > 0.0) {
                return Err(DocumentError::NonPositiveThickness {
                    index,
                    thickness_nm: layer.thickness_nm,
                });
            }
            let material = catalog
                .resolve(&layer.material)
                .map_err(|cause| DocumentError::LayerMaterial { index, cause })?;
            self.check_range(&material)?;
            layers.push(Layer::new(material, layer.thickness_nm));
        }
        Ok(Stack::new(prism, layers, self.medium.n, self.wavelength_nm)?)
    }

    fn check_range(&self, material: &Arc<Material>) -> Result<(), DocumentError> {
        match material.refractive_index_at(self.wavelength_nm) {
            Err(MaterialError::OutOfRange { min, max, .. }) => Err(DocumentError::OutOfRange {
                table: material.name().into(),
                wavelength_nm: self.wavelength_nm,
                min,
                max,
            }),
            // other failures (NaN wavelength) surface from Stack::new
            _ => Ok(()),
        }
    }
}

/// Parses and resolves a stack document in one step.
pub fn parse_stack_config(text: &str, catalog: &Catalog) -> Result<Stack, DocumentError> {
    StackDocument::parse(text)?.resolve(catalog)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        r#"{"prism":"bk7","layers":[{"material":"ag","thickness_nm":50}],"medium":{"n":1.33},"wavelength_nm":633}"#;

    #[test]
    fn minimal_document() {
        let stack = parse_stack_config(MINIMAL, &Catalog::bundled()).unwrap();
        assert_eq!(stack.layers().len(), 1);
        assert_eq!(stack.layers()[0].material.name(), "ag");
        assert_eq!(stack.layers()[0].thickness_nm, 50.0);
        assert_eq!(stack.sensing_index(), 1.33);
        assert_eq!(stack.wavelength_nm(), 633.0);
    }

    #[test]
    fn unknown_material_is_named() {
        let doc = MINIMAL.replace("\"ag\"", "\"unobtainium\"");
        let err = parse_stack_config(&doc, &Catalog::bundled()).unwrap_err();
        assert!(err.to_string().contains("unobtainium"), "{err}");
    }

    #[test]
    fn negative_thickness_names_layer_zero() {
        let doc = MINIMAL.replace("50", "-5");
        let err = parse_stack_config(&doc, &Catalog::bundled()).unwrap_err();
        assert!(matches!(err, DocumentError::NonPositiveThickness { index: 0, .. }));
        assert!(err.to_string().starts_with("layer 0"), "{err}");
    }

    #[test]
    fn zero_thickness_is_rejected() {
        let doc = MINIMAL.replace("50", "0");
        assert!(matches!(
            parse_stack_config(&doc, &Catalog::bundled()),
            Err(DocumentError::NonPositiveThickness { index: 0, .. })
        ));
    }

    #[test]
    fn out_of_range_wavelength_names_the_table() {
        // bk7 spans 400-1000 nm but the metal tables stop short of 900 nm
        let doc = MINIMAL.replace("633", "900");
        let err = parse_stack_config(&doc, &Catalog::bundled()).unwrap_err();
        assert!(matches!(&err, DocumentError::OutOfRange { table, .. } if table == "ag"), "{err}");
    }

    #[test]
    fn medium_below_one_is_rejected() {
        let doc = MINIMAL.replace("1.33", "0.9");
        assert!(matches!(parse_stack_config(&doc, &Catalog::bundled()), Err(DocumentError::MediumIndex(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let doc = MINIMAL.replace("\"wavelength_nm\"", "\"lambda\":1,\"wavelength_nm\"");
        assert!(matches!(StackDocument::parse(&doc), Err(DocumentError::Json(_))));
    }

    #[test]
    fn round_trip() {
        let cat = Catalog::bundled();
        let stack = parse_stack_config(MINIMAL, &cat).unwrap();
        let again = parse_stack_config(&StackDocument::from_stack(&stack).to_json(), &cat).unwrap();
        assert_eq!(stack, again);
    }
}
