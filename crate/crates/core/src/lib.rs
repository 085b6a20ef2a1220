//! Exact verification of locally conformally Kähler structures on
//! low-dimensional real Lie algebras.

pub mod exterior;
pub mod expr;
pub mod hermitian;
pub mod liealg;
pub mod lck;
pub mod linalg;
pub mod report;
pub mod catalog;
pub mod constructions;
pub mod scalars;
pub mod solver;
pub mod specfile;

pub use exterior::KForm;
pub use hermitian::{Automorphism, ComplexStructure};
pub use liealg::LieAlgebra;
pub use linalg::Matrix;
pub use scalars::{Assignment, Rational, Scalar};
