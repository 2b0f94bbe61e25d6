//! Event detection, simultaneous flips and exact times to the next impact.
//!
//! A UAV has an *event* when it must reverse direction at the current
//! instant. Every rule here looks only at UAV `i`, its immediate neighbours
//! and the perimeter constants.

use crate::ensemble::{Direction, Ensemble};
use crate::error::SimError;
use crate::scalar::Scalar;

/// Time until UAV `i` next takes part in an impact; `None` while it is
/// chasing a neighbour that moves away at the same speed.
pub type ImpactTime = Option<Scalar>;

/// Decides whether a UAV reverses direction at the current instant.
///
/// The simulator is generic over this so that harness tests can plug in a
/// deliberately broken rule and confirm the fuzzer notices.
pub trait EventRule: Sync {
    fn event_for_uav(&self, i: usize, ens: &Ensemble) -> bool;
}

/// The surveillance protocol's rule.
///
/// A UAV moving left flips when it bounces off the left endpoint (UAV 0
/// only) or when it is co-located with its left neighbour at or left of its
/// own left boundary. That single condition covers both a head-on meeting
/// inside the neighbour's segment and the end of a leftward escort. Moving
/// right is the mirror image.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dpss;

impl EventRule for Dpss {
    fn event_for_uav(&self, i: usize, ens: &Ensemble) -> bool {
        let n = ens.count();
        let me = ens.uav(i);
        match me.direction {
            Direction::Left => {
                if i == 0 {
                    me.location.is_zero()
                } else {
                    me.location == *ens.location(i - 1) && me.location <= ens.uav_left_boundary(i)
                }
            }
            Direction::Right => {
                if i == n - 1 {
                    me.location == *ens.perimeter()
                } else {
                    me.location == *ens.location(i + 1) && me.location >= ens.uav_right_boundary(i)
                }
            }
        }
    }
}

/// Whether UAV `i` must flip right now.
///
/// # Panics
/// If `i >= N`.
pub fn event_for_uav(i: usize, ens: &Ensemble) -> bool {
    Dpss.event_for_uav(i, ens)
}

/// Indices of every UAV with an event, evaluated against one snapshot.
pub fn events_with<R: EventRule + ?Sized>(rule: &R, ens: &Ensemble) -> Vec<usize> {
    (0..ens.count()).filter(|&i| rule.event_for_uav(i, ens)).collect()
}

pub fn events(ens: &Ensemble) -> Vec<usize> {
    events_with(&Dpss, ens)
}

/// Flags are computed from the input snapshot, then all flagged UAVs flip at
/// once; the order of evaluation cannot matter.
pub fn flip_on_events_with<R: EventRule + ?Sized>(rule: &R, ens: &Ensemble) -> Ensemble {
    let flagged = events_with(rule, ens);
    if flagged.is_empty() {
        return ens.clone();
    }
    let mut directions: Vec<Direction> = ens.uavs().iter().map(|u| u.direction).collect();
    for i in flagged {
        directions[i] = -directions[i];
    }
    ens.with_directions(&directions)
}

pub fn flip_on_events(ens: &Ensemble) -> Ensemble {
    flip_on_events_with(&Dpss, ens)
}

/// True when UAV `i`'s next impact time can be read off its neighbours:
/// it heads for an endpoint with no one in between, approaches a neighbour
/// head-on, or travels together with the neighbour in front of it.
///
/// # Panics
/// If `i >= N`.
pub fn impending_impact_event_for_uav(i: usize, ens: &Ensemble) -> bool {
    let n = ens.count();
    let me = ens.uav(i);
    match me.direction {
        Direction::Left => {
            i == 0
                || ens.direction(i - 1) == Direction::Right
                || *ens.location(i - 1) == me.location
        }
        Direction::Right => {
            i == n - 1
                || ens.direction(i + 1) == Direction::Left
                || *ens.location(i + 1) == me.location
        }
    }
}

/// Exact time until UAV `i` or one of its neighbours next flips, measured
/// from UAV `i`'s local view. Returns zero, never a negative time, when
/// called on a state that still has pending events.
///
/// # Panics
/// If `i >= N`.
pub fn min_time_to_impact_for_uav(i: usize, ens: &Ensemble) -> ImpactTime {
    if !impending_impact_event_for_uav(i, ens) {
        return None;
    }
    let n = ens.count();
    let speed = ens.seg_length();
    let me = ens.uav(i);
    let distance = match me.direction {
        Direction::Left => {
            if i == 0 {
                me.location.clone()
            } else if ens.direction(i - 1) == Direction::Right {
                // closing at twice the speed
                (&me.location - ens.location(i - 1)) / Scalar::from_integer(2)
            } else {
                &me.location - ens.uav_left_boundary(i)
            }
        }
        Direction::Right => {
            if i == n - 1 {
                ens.perimeter() - &me.location
            } else if ens.direction(i + 1) == Direction::Left {
                (ens.location(i + 1) - &me.location) / Scalar::from_integer(2)
            } else {
                ens.uav_right_boundary(i) - &me.location
            }
        }
    };
    Some((distance / speed).max(Scalar::zero()))
}

/// The time to the next actual event anywhere in the ensemble: the least
/// impending impact time.
///
/// Fails with [`SimError::NoImpendingImpact`] if no UAV has an impending
/// impact, which would contradict the existence lemma.
pub fn always_smallest_min_time_to_impending_impact(ens: &Ensemble) -> Result<Scalar, SimError> {
    (0..ens.count())
        .filter_map(|i| min_time_to_impact_for_uav(i, ens))
        .min()
        .ok_or_else(|| SimError::NoImpendingImpact {
            ensemble: ens.to_string(),
        })
}
