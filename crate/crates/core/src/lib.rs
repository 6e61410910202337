//! Finitary quantum observables.
//!
//! The crate is organised around five model families:
//!
//! * [`measurement`]: partial labelings, the information quasiorder and its
//!   order ideals, represented canonically as partitions with a distinguished
//!   "undefined" element.
//! * [`finitary`]: operators given by eigen-data (real eigenvalues and an
//!   orthonormal family of eigenvectors) with restriction, commeasurability and
//!   the functional calculus.
//! * [`dynamics`]: eigenfunction-series Schrödinger evolution, expected values,
//!   state compression, concatenation of experiments and complementarity.
//! * [`socks`]: antisymmetric tensors over a sequence of two-element sets and
//!   the truncated Fock space they generate.
//! * [`fhlogic`]: finite-matrix plus scalar operators over an unbounded atom
//!   set, the finite/cofinite subspace lattice and the two-valued state.
//!
//! [`io`] defines the JSON file formats and [`verify`] bundles the exhaustive
//! and seeded property suites used by the acceptance tests and the CLI.

pub mod dynamics;
pub mod error;
pub mod fhlogic;
pub mod finitary;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod socks;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
