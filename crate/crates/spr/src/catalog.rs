//! Material lookup: an optional on-disk directory of `<id>.csv` tables layered
//! over the tables bundled with `spr-core`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use spr_core::{bundled, Material, MaterialError};
use thiserror::Error;

/// Environment variable naming the materials directory.
pub const MATERIALS_ENV: &str = "SPR_MATERIALS_DIR";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown material `{0}`")]
    Unknown(String),
    #[error("material identifier `{0}` is not a plain file stem")]
    InvalidId(String),
    #[error("{}: {cause}", path.display())]
    Io {
        path: PathBuf,
        cause: std::io::Error,
    },
    #[error("{}: {cause}", path.display())]
    Table {
        path: PathBuf,
        cause: MaterialError,
    },
    #[error("bundled table `{id}`: {cause}")]
    Bundled {
        id: String,
        cause: MaterialError,
    },
}

/// Resolves material identifiers. A directory entry shadows the bundled table
/// of the same name.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    dir: Option<PathBuf>,
}

impl Catalog {
    /// Bundled tables only.
    pub fn bundled() -> Self {
        Self { dir: None }
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn resolve(&self, id: &str) -> Result<Arc<Material>, CatalogError> {
        if id.is_empty() || id.contains(['/', '\\']) || id.starts_with('.') {
            return Err(CatalogError::InvalidId(id.into()));
        }
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{id}.csv"));
            if path.is_file() {
                return load_material_file(&path).map(Arc::new);
            }
        }
        match bundled::material(id) {
            Some(Ok(m)) => Ok(m),
            Some(Err(cause)) => Err(CatalogError::Bundled { id: id.into(), cause }),
            None => Err(CatalogError::Unknown(id.into())),
        }
    }
}

/// Reads one material table; the identifier is the file stem.
pub fn load_material_file(path: &Path) -> Result<Material, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|cause| CatalogError::Io {
        path: path.to_path_buf(),
        cause,
    })?;
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CatalogError::InvalidId(path.display().to_string()))?;
    Material::load_table(id, &text).map_err(|cause| CatalogError::Table {
        path: path.to_path_buf(),
        cause,
    })
}
