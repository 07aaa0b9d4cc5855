//! File formats, material directories, parallel sweeps and the `spr`
//! command-line driver built on [`spr_core`].

pub mod catalog;
pub mod cli;
pub mod document;
pub mod formats;
pub mod parallel;

pub use catalog::{Catalog, CatalogError, MATERIALS_ENV};
pub use document::{parse_stack_config, DocumentError, StackDocument};
