//! Warped orthogonal complex structures on flat tori and Calabi's
//! hyperelliptic threefolds, with numeric and symbolic identity checks.

pub mod calabi;
pub mod error;
pub mod framecalc;
pub mod meromorphic;
pub mod poly;
pub mod quadrature;
pub mod report;
pub mod torsion_algebra;
pub mod warped;
pub mod zspace;

pub use error::{Error, Result};
