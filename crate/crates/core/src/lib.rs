//! Mixed-data clustering through attribute reconstruction and weight learning.

pub mod base_distance;
pub mod bench;
pub mod engine;
pub mod evaluation;
pub mod error;
pub mod projection;
pub mod schema;

pub use error::{Error, Result};
