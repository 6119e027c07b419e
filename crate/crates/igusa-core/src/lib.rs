//! Local and global Igusa zeta functions of elliptic curves.
//!
//! The crate computes exact local data (point counts mod p^k, Frobenius
//! traces, local zeta factors), the cyclotomic expansion machinery that
//! drives meromorphic continuation of the global product, and the boundary
//! apparatus exhibiting the accumulation of local zeros on Re(s) = -3/2.
//!
//! Prime sweeps run in parallel via rayon when the `parallel` feature
//! (enabled by default) is on; disabling it yields a dependency-light
//! sequential build with identical results.

pub mod boundary;
pub mod curve;
pub mod error;
pub mod euler;
pub mod expand;
pub mod local;
pub mod primes;
pub mod ring;
pub mod sweep;
pub mod verify;
pub mod zeta;

pub use curve::{CurveModel, CurveSpec, FrobeniusData};
pub use error::{Error, Result};
pub use expand::{cyclotomic_expand, ExpansionResult, Factor, LatticePoint};
pub use ring::{Monomial, RingElement, SymElement};
