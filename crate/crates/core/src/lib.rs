//! Geometry of unitary orbits of isospectral density operators.

pub mod cli;
pub mod distance;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod optim;
pub mod random;
pub mod scenario;

pub use error::{Error, Result};
