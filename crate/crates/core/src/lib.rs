pub mod classes;
pub mod compactness;
pub mod duals;
pub mod error;
pub mod kernel;
pub mod matrices;
pub mod numerics;
pub mod selftest;
pub mod spaces;
pub mod spec;

pub use error::{Error, Result};
