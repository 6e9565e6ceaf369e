pub mod bathymetry;
pub mod error;
pub mod grid;
pub mod homogenized;
pub mod spectral;
pub mod traveling_wave;

pub use error::{Error, Result};
