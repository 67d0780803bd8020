//! Exact computation of Ishida's complex of a rational fan and the
//! vanishing theorems for its cohomology.

pub mod error;
pub mod exterior;
pub mod homology;
pub mod ishida;
pub mod kcomplex;
pub mod linalg;
pub mod polyhedral;
pub mod random;

pub use error::{Error, Result};
