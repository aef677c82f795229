//! Simulation and analysis of odd-dimension qudit circuits in the discrete
//! center-chord (Wigner-Weyl) phase space.
//!
//! Three backends share one set of conventions:
//!
//! * [`dense`] builds gate unitaries and state vectors explicitly. It is the
//!   oracle every other backend is checked against.
//! * [`stabilizer`] propagates stabilizer states as Wigner delta sets
//!   `{x : Φx = r}` under affine symplectic maps. Cost is polynomial in the
//!   number of qudits.
//! * [`pathint`] expands gates as sums of phase-space reflections. A
//!   single-qudit T gate costs `d²` terms and the naive path count of a
//!   circuit is the product over its non-Clifford gates.
//!
//! The phase-space vector ordering is `x = (x_p, x_q)` with all momenta
//! first; qudit 0 is the most significant digit of every computational or
//! phase-space index.

pub mod dense;
pub mod harmonic;
pub mod pathint;
pub mod stabilizer;
pub mod weyl;
pub mod zmod;

mod error;

pub use dense::{DenseOperator, DenseState, GateKind, GateSpec};
pub use error::{Error, Result};
pub use harmonic::{AffineSymplecticMap, GateCatalogEntry, HbarOrder, QuadraticAction};
pub use pathint::{PathCountReport, ReflectionExpansion};
pub use stabilizer::{GaussianForm, StabilizerState, SupportClass};
pub use weyl::{CenterTable, ChordTable, WignerTable};
pub use zmod::{Dim, ZdMatrix, ZdVector};

/// Default bound on the number of phase-space points any enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;
