pub mod cli;
pub mod envelope;
pub mod error;
pub mod linalg;
pub mod projector;
pub mod ratfield;
pub mod registry;
pub mod report;
pub mod rootsys;
pub mod solver;
pub mod verma;

pub use error::{Error, Result};
