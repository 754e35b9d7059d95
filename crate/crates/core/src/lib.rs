//! Numerical laboratory for the fundamental equation of information of
//! multiplicative type and its Hyers–Ulam stability bounds.
//!
//! * [`domain`]: the unit cube, `D_k`, `Γ_n`, and their lattice grids.
//! * [`multiplicative`]: multiplicative `M` as products of atoms, additivity
//!   defects and witnesses.
//! * [`feim`]: the equation, its exact solutions, the constructive fit and
//!   the stability certificate.
//! * [`measures`]: `J_n`, recursive and perturbed measures, and the system
//!   certificate.
//! * [`harness`]: noise, the minimax oracle and the suite runner.
//! * [`cli`]: the `feistab` command line.
//!
//! Grid suprema run through [`scan`], which uses rayon when the `parallel`
//! feature is on and a serial loop otherwise.

pub mod cli;
pub mod domain;
pub mod error;
pub mod feim;
pub mod harness;
pub mod measures;
pub mod multiplicative;
pub mod scan;

pub use domain::{DkPair, KVec, SimplexTuple};
pub use error::{Error, Result};
pub use feim::{Fcn, QStar, StabilityCertificate, Verdict};
pub use harness::NoiseSpec;
pub use measures::{JFamily, MeasureFamily, SystemCertificate};
pub use multiplicative::{Atom, Class, MultiplicativeSpec};
