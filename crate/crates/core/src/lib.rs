//! Exact computations with CR maps between Heisenberg hyperquadrics.

pub mod error;
pub mod family_reduce;
pub mod exactnum;
pub mod hermitian;
pub mod io;
pub mod linalg;
pub mod polyring;
pub mod quadric;
pub mod rescale;

pub use error::{Error, Result};
pub use exactnum::{GaussianRational, Rational, GR};
pub use hermitian::Signature;
pub use polyring::{FormalPoly, Monomial, VarKind, VarSpace};
