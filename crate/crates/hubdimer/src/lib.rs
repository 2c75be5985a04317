//! Universal one-particle reduced density matrix (1RDM) functionals of the
//! generalized Hubbard dimer, in the three-dimensional singlet sector.
//!
//! The crate provides four layers:
//!
//! * [`model`] — the singlet-subspace Hilbert space: Hamiltonians, states,
//!   density operators, and the maps from states to per-spin 1RDM blocks.
//! * [`analytic`] — closed forms for the six universal functionals and the
//!   geometry derived from them (excluded ellipses, exchange-force
//!   prefactor, Hessian determinant).
//! * [`search`] — independent numerical oracles: constrained-search
//!   minimization over pure real, pure complex, and ensemble states,
//!   discrete lower convex envelopes, and ground-state energies recovered
//!   from any functional by the conjugate-function construction.
//! * [`varrep`] — representability classification, whole-disk maps,
//!   ground-state sweeps, degenerate state families, and force fits.
//!
//! All types are immutable values and all operations are pure functions,
//! safe to evaluate concurrently.

pub mod analytic;
pub mod error;
pub mod export;
pub mod model;
pub mod search;
pub mod tol;
pub mod varrep;

pub use analytic::FunctionalKind;
pub use error::{DimerError, Result};
pub use model::{
    DensityOperator, InteractionParams, OneBodyParams, PolarRdm, RealRdm, Rdm, SingletState,
};
pub use search::{GridField, SearchOptions};

/// Library version as reported in run manifests.
pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}
