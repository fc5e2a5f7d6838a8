//! Composition engine for notebook cells placed in 3D space.

pub mod config;
pub mod error;
pub mod geom;
pub mod gesture;
pub mod layout;
pub mod metrics;
pub mod model;
pub mod notebook;
pub mod ops;
pub mod protocol;
pub mod scene;
pub mod session;
pub mod validate;

pub use error::{Error, Result};
