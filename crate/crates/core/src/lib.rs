//! Exact computations on Bratteli diagrams.

pub mod bdspec;
pub mod corpus;
pub mod diagram;
pub mod error;
pub mod k0;
pub mod linalg;
pub mod pathspace;
pub mod reduction;

pub use diagram::{BratteliDiagram, MultiplicityMatrix, ShapeClass};
pub use error::{Error, Result};
