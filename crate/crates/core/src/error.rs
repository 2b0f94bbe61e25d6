use thiserror::Error;

use crate::ensemble::EnsembleError;
use crate::scalar::Scalar;

/// Failures raised while advancing an ensemble.
///
/// `FuelExhausted` means "did not finish"; every other variant is a broken
/// internal invariant and indicates a bug in the event engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("no UAV has an impending impact in {ensemble}")]
    NoImpendingImpact { ensemble: String },
    #[error("advancing by {dt} leaves an ill-formed ensemble: {cause}")]
    UnsafeAdvance { dt: Scalar, cause: EnsembleError },
    #[error("time increment must be non-negative, got {0}")]
    NegativeIncrement(Scalar),
    #[error("step budget of {fuel} iterations exhausted with {remaining} time units left")]
    FuelExhausted { fuel: u64, remaining: Scalar },
}

impl SimError {
    pub fn is_fuel_exhausted(&self) -> bool {
        matches!(self, SimError::FuelExhausted { .. })
    }
}
