//! Exact-rational, event-driven simulator for decentralized perimeter
//! surveillance, with runtime monitors for the protocol's convergence
//! invariants.
//!
//! `N` UAVs patrol the segment `[0, P]`. UAV `i` owns `[i·S, (i+1)·S]` with
//! `S = P / N`; all UAVs move at one segment per unit of time. They reverse
//! at the perimeter endpoints, and when two neighbours meet they travel
//! together to their shared boundary and separate there. From any
//! well-formed start the ensemble becomes periodic with period 2 after at
//! most `2N - 1` units of time.

// Errors carry the offending exact values; they are rare and not on a hot path.
#![allow(clippy::result_large_err)]

pub mod ensemble;
pub mod error;
pub mod event;
pub mod fuzz;
pub mod harness;
pub mod invariants;
pub mod oracle;
pub mod scalar;
pub mod scenario;
pub mod stepper;
pub mod trace;

pub use ensemble::{wf_ensemble, Direction, Ensemble, EnsembleError, UavState};
pub use error::SimError;
pub use event::{Dpss, EventRule, ImpactTime};
pub use scalar::{average, Scalar};
pub use stepper::{Simulator, StepBudget, StepOutcome};
