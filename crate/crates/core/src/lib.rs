pub mod assembly;
pub mod boundary;
pub mod case;
pub mod config;
pub mod error;
pub mod laminate;
pub mod nurbs;
pub mod postproc;
pub mod quadrature;
pub mod reference;
pub mod solvers;
pub mod suite;

pub use error::{Error, Result};
