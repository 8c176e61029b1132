//! Quantum annealing on the collective-spin sector of `N` qubits, with a
//! non-stoquastic anti-ferromagnetic driver term.
//!
//! The driver `H_D + α H_XX` and the fully connected problem Hamiltonians
//! share the conserved parity `K = exp(iπ/2 Σσ_x)`. When the ground states of
//! the two endpoints sit in different parity sectors, closed-system annealing
//! fails however slowly it runs. A bath whose coupling operator breaks the
//! parity, described by an adiabatic Redfield-type master equation, restores
//! ground-state preparation; a phenomenological GKSL bath does not.

pub mod closed_dynamics;
pub mod error;
pub mod experiments;
pub mod hamiltonians;
pub mod integrator;
pub mod open_dynamics;
pub mod spectrum;
pub mod spin_algebra;

pub use error::{Error, Result};
pub use hamiltonians::{AnnealSchedule, ProblemKind};
pub use integrator::IntegratorOptions;
pub use spin_algebra::{Axis, CollectiveBasis, Operator, PureState, C64};
