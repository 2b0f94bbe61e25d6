//! Continuous-time advancement, event to event.

use num_traits::ToPrimitive;

use crate::ensemble::Ensemble;
use crate::error::SimError;
use crate::event::{always_smallest_min_time_to_impending_impact, flip_on_events_with, Dpss, EventRule};
use crate::scalar::Scalar;

/// Maximum number of `next_step` iterations one `step_time` call may take.
///
/// Termination of the event loop is not proven (a Zeno trajectory would need
/// infinitely many events in finite time), so every run carries fuel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepBudget {
    fuel: u64,
}

impl StepBudget {
    const PER_UAV_UNIT: u64 = 10_000;

    /// # Panics
    /// If `fuel` is zero.
    pub fn new(fuel: u64) -> Self {
        assert!(fuel >= 1, "a step budget needs at least one iteration");
        StepBudget { fuel }
    }

    /// `10_000 * N * max(1, ceil(dt))` iterations.
    pub fn default_for(dt: &Scalar, ens: &Ensemble) -> Self {
        let units = dt.ceil().to_u64().unwrap_or(u64::MAX).max(1);
        let fuel = Self::PER_UAV_UNIT
            .saturating_mul(ens.count() as u64)
            .saturating_mul(units);
        StepBudget::new(fuel)
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }
}

/// Result of one `next_step`: the time still to be consumed and the state
/// after the applied increment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub remaining: Scalar,
    pub state: Ensemble,
}

/// Moves every UAV `direction * S * dt`. The result is re-validated rather
/// than clamped; an ill-formed result means `dt` overshot an event.
pub fn update_location_all(dt: &Scalar, ens: &Ensemble) -> Result<Ensemble, SimError> {
    if dt.is_negative() {
        return Err(SimError::NegativeIncrement(dt.clone()));
    }
    if dt.is_zero() {
        return Ok(ens.clone());
    }
    let travel = ens.seg_length() * dt;
    let locations = ens
        .uavs()
        .iter()
        .map(|u| &u.location + &travel * Scalar::from_integer(u.direction.sign()))
        .collect();
    let moved = ens.with_locations_unchecked(locations);
    moved.validate().map_err(|cause| SimError::UnsafeAdvance {
        dt: dt.clone(),
        cause,
    })?;
    Ok(moved)
}

/// The event-driven simulator, parameterised by its flip rule.
#[derive(Debug, Clone, Copy, Default)]
pub struct Simulator<R = Dpss> {
    rule: R,
}

impl Simulator<Dpss> {
    pub fn new() -> Self {
        Simulator { rule: Dpss }
    }
}

impl<R: EventRule> Simulator<R> {
    pub fn with_rule(rule: R) -> Self {
        Simulator { rule }
    }

    pub fn rule(&self) -> &R {
        &self.rule
    }

    pub fn event_for_uav(&self, i: usize, ens: &Ensemble) -> bool {
        self.rule.event_for_uav(i, ens)
    }

    pub fn flip_on_events(&self, ens: &Ensemble) -> Ensemble {
        flip_on_events_with(&self.rule, ens)
    }

    /// Flip, then advance by the lesser of `dt` and the time to the next
    /// actual event.
    pub fn next_step(&self, dt: &Scalar, ens: &Ensemble) -> Result<StepOutcome, SimError> {
        let flipped = self.flip_on_events(ens);
        let next_event = always_smallest_min_time_to_impending_impact(&flipped)?;
        let step = dt.clone().min(next_event);
        let state = update_location_all(&step, &flipped)?;
        Ok(StepOutcome {
            remaining: dt - &step,
            state,
        })
    }

    /// Advances by exactly `dt`. A zero increment returns the input untouched,
    /// pending flips included; a state that lands on an event instant is
    /// returned before its flips are applied.
    pub fn step_time(&self, dt: &Scalar, ens: &Ensemble, budget: StepBudget) -> Result<Ensemble, SimError> {
        self.step_time_counted(dt, ens, budget).map(|(state, _)| state)
    }

    /// Like [`Simulator::step_time`], also returning the number of
    /// `next_step` iterations used.
    pub fn step_time_counted(
        &self,
        dt: &Scalar,
        ens: &Ensemble,
        budget: StepBudget,
    ) -> Result<(Ensemble, u64), SimError> {
        if dt.is_negative() {
            return Err(SimError::NegativeIncrement(dt.clone()));
        }
        let mut remaining = dt.clone();
        let mut state = ens.clone();
        let mut used = 0u64;
        while !remaining.is_zero() {
            if used == budget.fuel() {
                return Err(SimError::FuelExhausted {
                    fuel: budget.fuel(),
                    remaining,
                });
            }
            let outcome = self.next_step(&remaining, &state)?;
            used += 1;
            remaining = outcome.remaining;
            state = outcome.state;
        }
        Ok((state, used))
    }

    /// Returns the time to the next actual event and the state at that
    /// instant, before its flips.
    pub fn step_to_next_event(&self, ens: &Ensemble) -> Result<(Scalar, Ensemble), SimError> {
        let flipped = self.flip_on_events(ens);
        let dt = always_smallest_min_time_to_impending_impact(&flipped)?;
        let state = update_location_all(&dt, &flipped)?;
        Ok((dt, state))
    }
}

pub fn next_step(dt: &Scalar, ens: &Ensemble) -> Result<StepOutcome, SimError> {
    Simulator::new().next_step(dt, ens)
}

pub fn step_time(dt: &Scalar, ens: &Ensemble, budget: StepBudget) -> Result<Ensemble, SimError> {
    Simulator::new().step_time(dt, ens, budget)
}

/// [`step_time`] with the default budget for `dt`.
pub fn step_time_default(dt: &Scalar, ens: &Ensemble) -> Result<Ensemble, SimError> {
    step_time(dt, ens, StepBudget::default_for(dt, ens))
}

pub fn step_to_next_event(ens: &Ensemble) -> Result<(Scalar, Ensemble), SimError> {
    Simulator::new().step_to_next_event(ens)
}
