//! Monolithic ALE fluid-structure interaction solver.

pub mod config;
pub mod driver;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod partition;
pub mod physics;
pub mod tensor;
pub mod time;
pub mod verify;

pub use error::{BlockId, Error, Result};
