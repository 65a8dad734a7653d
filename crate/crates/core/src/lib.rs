pub mod characterize;
pub mod cli;
pub mod error;
pub mod expr;
pub mod green;
pub mod ode;
pub mod problem;
pub mod spectral;

pub use error::{Error, Result};
