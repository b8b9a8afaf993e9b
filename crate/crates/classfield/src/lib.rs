//! Level-N form class groups of imaginary quadratic orders, ray class
//! invariants from Siegel and Fricke functions, and derivatives of the
//! associated L-functions at s = 0.

pub mod cartan;
pub mod error;
pub mod invariants;
pub mod lfunctions;
pub mod modfun;
pub mod numerics;
pub mod orderideals;
pub mod quadforms;

pub use error::{Error, Result};
