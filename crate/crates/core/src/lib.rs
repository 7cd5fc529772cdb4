//! Conserved invariants of CMC surfaces in the 3-sphere from Fuchsian DPW
//! potentials: Willmore energy, enclosed volume and the holonomy of the
//! Chern-Simons line bundle along the unit-circle spectral family.

pub mod algebra;
pub mod closedform;
pub mod error;
pub mod fuchsian;
pub mod holonomy;
pub mod lawson;
pub mod monodromy;
pub mod monodromy_solver;
pub mod ode;
pub mod quadrature;
pub mod verify;

pub use algebra::{c, eig2, mat2_exp, re, LaurentLoop, Mat2, MatrixLoop, ScalarLoop, C64, I};
pub use error::*;
