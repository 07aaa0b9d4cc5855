//! Material-level description of a Kretschmann sensor: prism, films, analyte.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use crate::materials::{Material, MaterialError};
use crate::tmm::{Film, Multilayer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StackError {
    #[error("layer {index} ({material}): thickness {thickness_nm} nm must be finite and non-negative")]
    InvalidThickness {
        index: usize,
        material: String,
        thickness_nm: f64,
    },
    #[error("sensing index {0} must be real and >= 1")]
    InvalidSensingIndex(f64),
    #[error("wavelength {0} nm must be finite and positive")]
    InvalidWavelength(f64),
    #[error("prism {material} is absorbing at {wavelength_nm} nm (k = {k})")]
    AbsorbingPrism {
        material: String,
        wavelength_nm: f64,
        k: f64,
    },
    #[error("layer {index} does not exist (stack has {len} layers)")]
    NoSuchLayer { index: usize, len: usize },
    #[error(transparent)]
    Material(#[from] MaterialError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: Arc<Material>,
    pub thickness_nm: f64,
}

impl Layer {
    pub fn new(material: Arc<Material>, thickness_nm: f64) -> Self {
        Self {
            material,
            thickness_nm,
        }
    }
}

/// Prism half-space, films from the prism side, and a real-index sensing medium.
///
/// Zero-thickness layers are accepted and are optically neutral; file formats
/// reject them.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    prism: Arc<Material>,
    layers: Vec<Layer>,
    sensing_index: f64,
    wavelength_nm: f64,
}

impl Stack {
    pub fn new(
        prism: Arc<Material>,
        layers: Vec<Layer>,
        sensing_index: f64,
        wavelength_nm: f64,
    ) -> Result<Self, StackError> {
        let stack = Self {
            prism,
            layers,
            sensing_index,
            wavelength_nm,
        };
        stack.validate()?;
        Ok(stack)
    }

    fn validate(&self) -> Result<(), StackError> {
        if !(self.wavelength_nm.is_finite() && self.wavelength_nm > 0.0) {
            return Err(StackError::InvalidWavelength(self.wavelength_nm));
        }
        if !(self.sensing_index.is_finite() && self.sensing_index >= 1.0) {
            return Err(StackError::InvalidSensingIndex(self.sensing_index));
        }
        for (index, layer) in self.layers.iter().enumerate() {
            if !(layer.thickness_nm.is_finite() && layer.thickness_nm >= 0.0) {
                return Err(StackError::InvalidThickness {
                    index,
                    material: layer.material.name().into(),
                    thickness_nm: layer.thickness_nm,
                });
            }
            layer.material.refractive_index_at(self.wavelength_nm)?;
        }
        let prism = self.prism.refractive_index_at(self.wavelength_nm)?;
        if prism.im != 0.0 {
            return Err(StackError::AbsorbingPrism {
                material: self.prism.name().into(),
                wavelength_nm: self.wavelength_nm,
                k: prism.im,
            });
        }
        Ok(())
    }

    pub fn prism(&self) -> &Arc<Material> {
        &self.prism
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn sensing_index(&self) -> f64 {
        self.sensing_index
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_nm
    }

    /// Real prism index at the working wavelength.
    pub fn prism_index(&self) -> f64 {
        // validated on construction
        self.prism
            .refractive_index_at(self.wavelength_nm)
            .map(|n| n.re)
            .unwrap_or(f64::NAN)
    }

    pub fn with_sensing_index(&self, n: f64) -> Result<Self, StackError> {
        Self::new(self.prism.clone(), self.layers.clone(), n, self.wavelength_nm)
    }

    pub fn with_layer_thickness(&self, index: usize, thickness_nm: f64) -> Result<Self, StackError> {
        let mut layers = self.layers.clone();
        let len = layers.len();
        layers
            .get_mut(index)
            .ok_or(StackError::NoSuchLayer { index, len })?
            .thickness_nm = thickness_nm;
        Self::new(self.prism.clone(), layers, self.sensing_index, self.wavelength_nm)
    }

    /// Evaluates every material at the working wavelength.
    pub fn multilayer(&self) -> Result<Multilayer, StackError> {
        let films = self
            .layers
            .iter()
            .map(|l| Ok(Film::new(l.material.permittivity_at(self.wavelength_nm)?, l.thickness_nm)))
            .collect::<Result<Vec<_>, StackError>>()?;
        Ok(Multilayer::interface(self.prism_index(), self.sensing_index.into(), self.wavelength_nm).with_films(films))
    }
}

impl Multilayer {
    pub fn with_films(mut self, films: Vec<Film>) -> Self {
        self.films = films;
        self
    }
}
