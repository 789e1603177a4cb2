pub mod accumulator;
pub mod cli;
pub mod datagen;
pub mod detector;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod ppf;

pub use error::{Error, Result};
