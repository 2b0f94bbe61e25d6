//! Have-met and synchronization predicates, the periodicity check, and
//! runtime monitors that watch them along a simulated trajectory.
//!
//! The left predicates are transcribed directly; the right ones are the left
//! ones evaluated on the mirrored ensemble.

use serde::Serialize;

use crate::ensemble::{Direction, Ensemble};
use crate::error::SimError;
use crate::event::{always_smallest_min_time_to_impending_impact, EventRule};
use crate::scalar::{average, Scalar};
use crate::stepper::{update_location_all, Simulator, StepBudget};

/// UAV `i` has met its right neighbour.
///
/// Vacuously true for the rightmost UAV and for any UAV moving right.
/// Otherwise a UAV beyond its right boundary must be escorted back by its
/// right neighbour, and a UAV strictly inside `(L_i, R_i]` must mirror its
/// right neighbour about `R_i`, with that neighbour moving right unless both
/// sit on the boundary.
pub fn have_met_left_p(i: usize, ens: &Ensemble) -> bool {
    let n = ens.count();
    let me = ens.uav(i);
    if i + 1 >= n || me.direction != Direction::Left {
        return true;
    }
    let right = ens.uav(i + 1);
    let lo = ens.uav_left_boundary(i);
    let hi = ens.uav_right_boundary(i);
    let loc = &me.location;

    if *loc > hi && !(right.direction == Direction::Left && *loc == right.location) {
        return false;
    }
    if lo < *loc && *loc <= hi {
        if *loc < hi && right.direction != Direction::Right {
            return false;
        }
        if average(loc, &right.location) != hi {
            return false;
        }
    }
    true
}

/// UAV `j` is left synchronized: its midpoint with the left neighbour is not
/// left of `L_j`, and if it moves left away from that neighbour, the
/// neighbour moves right.
pub fn left_synchronized_p(j: usize, ens: &Ensemble) -> bool {
    let me = ens.uav(j);
    if j == 0 {
        return true;
    }
    let left = ens.uav(j - 1);
    if ens.uav_left_boundary(j) > average(&left.location, &me.location) {
        return false;
    }
    if me.direction == Direction::Left && me.location != left.location {
        return left.direction == Direction::Right;
    }
    true
}

fn mirror_index(i: usize, ens: &Ensemble) -> usize {
    // index check happens on the original ensemble first
    ens.uav(i);
    ens.count() - 1 - i
}

pub fn have_met_right_p(i: usize, ens: &Ensemble) -> bool {
    have_met_left_p(mirror_index(i, ens), &ens.reflect())
}

pub fn right_synchronized_p(j: usize, ens: &Ensemble) -> bool {
    left_synchronized_p(mirror_index(j, ens), &ens.reflect())
}

/// Both have-met variants for every UAV.
pub fn all_have_met_p(ens: &Ensemble) -> bool {
    let mirror = ens.reflect();
    (0..ens.count()).all(|i| have_met_left_p(i, ens) && have_met_left_p(i, &mirror))
}

/// Both synchronization variants for every UAV.
pub fn all_synchronized_p(ens: &Ensemble) -> bool {
    let mirror = ens.reflect();
    (0..ens.count()).all(|i| left_synchronized_p(i, ens) && left_synchronized_p(i, &mirror))
}

/// `L_i <= location(i) <= R_i`.
pub fn segment_containment_p(i: usize, ens: &Ensemble) -> bool {
    let loc = ens.location(i);
    ens.uav_left_boundary(i) <= *loc && *loc <= ens.uav_right_boundary(i)
}

pub fn all_contained_p(ens: &Ensemble) -> bool {
    (0..ens.count()).all(|i| segment_containment_p(i, ens))
}

/// Every UAV is back at its current location two time units from now.
pub fn location_convergence_p(ens: &Ensemble, budget: StepBudget) -> Result<bool, SimError> {
    location_convergence_p_with(&Simulator::new(), ens, budget)
}

pub fn location_convergence_p_with<R: EventRule>(
    sim: &Simulator<R>,
    ens: &Ensemble,
    budget: StepBudget,
) -> Result<bool, SimError> {
    let later = sim.step_time(&Scalar::from_integer(2), ens, budget)?;
    Ok(later.locations().eq(ens.locations()))
}

/// The four predicates (plus containment) for one UAV at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PredicateValues {
    pub have_met_left: bool,
    pub have_met_right: bool,
    pub left_synchronized: bool,
    pub right_synchronized: bool,
    pub contained: bool,
}

impl PredicateValues {
    pub fn evaluate_all(ens: &Ensemble) -> Vec<PredicateValues> {
        let mirror = ens.reflect();
        let n = ens.count();
        (0..n)
            .map(|i| PredicateValues {
                have_met_left: have_met_left_p(i, ens),
                have_met_right: have_met_left_p(n - 1 - i, &mirror),
                left_synchronized: left_synchronized_p(i, ens),
                right_synchronized: left_synchronized_p(n - 1 - i, &mirror),
                contained: segment_containment_p(i, ens),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    HaveMetLeft,
    HaveMetRight,
    LeftSynchronized,
    RightSynchronized,
}

/// A predicate that was established and later observed false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub time: Scalar,
    pub uav: usize,
    pub predicate: Predicate,
}

/// Which UAVs count as "having experienced an event" at an event instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventReading {
    /// The UAV itself flipped.
    OwnFlip,
    /// A co-located neighbour flipped while this UAV kept its direction.
    Participation,
}

/// An event instant after which a participating UAV did not satisfy both
/// have-met predicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventMiss {
    pub time: Scalar,
    pub uav: usize,
    pub reading: EventReading,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UavRecord {
    pub id: usize,
    /// First time this UAV flipped.
    pub first_event: Option<Scalar>,
    /// First time it flipped or a co-located neighbour flipped.
    pub first_impact: Option<Scalar>,
    pub first_have_met_left: Option<Scalar>,
    pub first_have_met_right: Option<Scalar>,
    pub first_left_synchronized: Option<Scalar>,
    pub first_right_synchronized: Option<Scalar>,
}

/// Outcome of [`run_monitors`].
///
/// Predicates are sampled only at flip-quiescent states: after the flips at
/// every event instant, at every whole time unit, and halfway between
/// consecutive samples. `*_since` fields hold the earliest sample time from
/// which the property held at every later sample up to the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonitorReport {
    pub count: usize,
    pub horizon: Scalar,
    pub initial: Vec<PredicateValues>,
    pub uavs: Vec<UavRecord>,
    pub all_have_met_since: Option<Scalar>,
    pub all_synchronized_since: Option<Scalar>,
    pub contained_since: Option<Scalar>,
    pub violations: Vec<Violation>,
    /// Synchronization losses under the stronger hypothesis that, besides all
    /// UAVs having met on that side, every UAV between `j` and the far end
    /// of that side (UAVs `0..=j` for left) was synchronized as well.
    pub prefix_sync_violations: Vec<Violation>,
    pub event_misses: Vec<EventMiss>,
    pub event_instants: u64,
    pub samples: u64,
    pub steps: u64,
}

impl MonitorReport {
    pub fn have_met_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| matches!(v.predicate, Predicate::HaveMetLeft | Predicate::HaveMetRight))
    }

    pub fn synchronized_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| {
            matches!(v.predicate, Predicate::LeftSynchronized | Predicate::RightSynchronized)
        })
    }
}

fn set_first(slot: &mut Option<Scalar>, t: &Scalar) {
    if slot.is_none() {
        *slot = Some(t.clone());
    }
}

fn track_since(slot: &mut Option<Scalar>, holds: bool, t: &Scalar) {
    if !holds {
        *slot = None;
    } else if slot.is_none() {
        *slot = Some(t.clone());
    }
}

struct Monitor {
    report: MonitorReport,
    // per UAV: have-met left/right currently established
    have_met: Vec<[bool; 2]>,
    // per UAV: synchronized left/right established while all have met on that side
    synced: Vec<[bool; 2]>,
    // same, additionally requiring every UAV on the far side of `j` synchronized
    synced_prefix: Vec<[bool; 2]>,
}

impl Monitor {
    fn new(ens: &Ensemble, horizon: &Scalar) -> Self {
        let n = ens.count();
        Monitor {
            report: MonitorReport {
                count: n,
                horizon: horizon.clone(),
                initial: Vec::new(),
                uavs: (0..n)
                    .map(|id| UavRecord {
                        id,
                        first_event: None,
                        first_impact: None,
                        first_have_met_left: None,
                        first_have_met_right: None,
                        first_left_synchronized: None,
                        first_right_synchronized: None,
                    })
                    .collect(),
                all_have_met_since: None,
                all_synchronized_since: None,
                contained_since: None,
                violations: Vec::new(),
                prefix_sync_violations: Vec::new(),
                event_misses: Vec::new(),
                event_instants: 0,
                samples: 0,
                steps: 0,
            },
            have_met: vec![[false; 2]; n],
            synced: vec![[false; 2]; n],
            synced_prefix: vec![[false; 2]; n],
        }
    }

    /// Records the flips at an event instant; `before` is the landing state
    /// and `after` its flip-quiescent image.
    fn events(&mut self, t: &Scalar, before: &Ensemble, after: &Ensemble) {
        let n = before.count();
        let flipped: Vec<bool> = (0..n)
            .map(|i| before.direction(i) != after.direction(i))
            .collect();
        if !flipped.iter().any(|&f| f) {
            return;
        }
        self.report.event_instants += 1;
        let values = PredicateValues::evaluate_all(after);
        for i in 0..n {
            let touched_by = |j: usize| flipped[j] && before.location(j) == before.location(i);
            let participated =
                !flipped[i] && ((i > 0 && touched_by(i - 1)) || (i + 1 < n && touched_by(i + 1)));
            let reading = if flipped[i] {
                EventReading::OwnFlip
            } else if participated {
                EventReading::Participation
            } else {
                continue;
            };
            let rec = &mut self.report.uavs[i];
            if flipped[i] {
                set_first(&mut rec.first_event, t);
            }
            set_first(&mut rec.first_impact, t);
            if !(values[i].have_met_left && values[i].have_met_right) {
                self.report.event_misses.push(EventMiss {
                    time: t.clone(),
                    uav: i,
                    reading,
                });
            }
        }
    }

    fn sample(&mut self, t: &Scalar, ens: &Ensemble) {
        let values = PredicateValues::evaluate_all(ens);
        let report = &mut self.report;
        if report.samples == 0 {
            report.initial = values.clone();
        }
        report.samples += 1;

        let all_met = [
            values.iter().all(|v| v.have_met_left),
            values.iter().all(|v| v.have_met_right),
        ];
        let n = values.len();
        // prefix[0][j]: UAVs 0..=j left synchronized; prefix[1][j]: UAVs j..n right synchronized
        let mut prefix = [vec![false; n], vec![false; n]];
        let mut run = true;
        for (j, v) in values.iter().enumerate() {
            run &= v.left_synchronized;
            prefix[0][j] = run;
        }
        run = true;
        for (j, v) in values.iter().enumerate().rev() {
            run &= v.right_synchronized;
            prefix[1][j] = run;
        }
        for (i, v) in values.iter().enumerate() {
            let rec = &mut report.uavs[i];
            let met = [v.have_met_left, v.have_met_right];
            let sync = [v.left_synchronized, v.right_synchronized];
            if met[0] {
                set_first(&mut rec.first_have_met_left, t);
            }
            if met[1] {
                set_first(&mut rec.first_have_met_right, t);
            }
            if sync[0] {
                set_first(&mut rec.first_left_synchronized, t);
            }
            if sync[1] {
                set_first(&mut rec.first_right_synchronized, t);
            }
            for side in 0..2 {
                let (met_pred, sync_pred) = if side == 0 {
                    (Predicate::HaveMetLeft, Predicate::LeftSynchronized)
                } else {
                    (Predicate::HaveMetRight, Predicate::RightSynchronized)
                };
                if self.have_met[i][side] && !met[side] {
                    report.violations.push(Violation {
                        time: t.clone(),
                        uav: i,
                        predicate: met_pred,
                    });
                }
                self.have_met[i][side] = met[side];

                if self.synced[i][side] && !sync[side] {
                    report.violations.push(Violation {
                        time: t.clone(),
                        uav: i,
                        predicate: sync_pred,
                    });
                    self.synced[i][side] = false;
                }
                if sync[side] && all_met[side] {
                    self.synced[i][side] = true;
                }

                if self.synced_prefix[i][side] && !sync[side] {
                    report.prefix_sync_violations.push(Violation {
                        time: t.clone(),
                        uav: i,
                        predicate: sync_pred,
                    });
                    self.synced_prefix[i][side] = false;
                }
                if prefix[side][i] && all_met[side] {
                    self.synced_prefix[i][side] = true;
                }
            }
        }
        let all_sync = values.iter().all(|v| v.left_synchronized && v.right_synchronized);
        let contained = values.iter().all(|v| v.contained);
        track_since(&mut report.all_have_met_since, all_met[0] && all_met[1], t);
        track_since(&mut report.all_synchronized_since, all_sync, t);
        track_since(&mut report.contained_since, contained, t);
    }
}

/// Simulates from `ens` to `horizon`, recording first-event times, predicate
/// establishment times and invariance violations.
pub fn run_monitors(ens: &Ensemble, horizon: &Scalar, budget: StepBudget) -> Result<MonitorReport, SimError> {
    run_monitors_with(&Simulator::new(), ens, horizon, budget)
}

pub fn run_monitors_with<R: EventRule>(
    sim: &Simulator<R>,
    ens: &Ensemble,
    horizon: &Scalar,
    budget: StepBudget,
) -> Result<MonitorReport, SimError> {
    if horizon.is_negative() {
        return Err(SimError::NegativeIncrement(horizon.clone()));
    }
    let half = Scalar::ratio(1, 2);
    let mut monitor = Monitor::new(ens, horizon);
    let mut t = Scalar::zero();
    let mut quiet = sim.flip_on_events(ens);
    monitor.events(&t, ens, &quiet);
    monitor.sample(&t, &quiet);

    while t < *horizon {
        if monitor.report.steps == budget.fuel() {
            return Err(SimError::FuelExhausted {
                fuel: budget.fuel(),
                remaining: horizon - &t,
            });
        }
        let to_event = always_smallest_min_time_to_impending_impact(&quiet)?;
        let to_tick = Scalar::from(t.floor() + 1) - &t;
        let step = to_event.clone().min(horizon - &t).min(to_tick);

        let mid = update_location_all(&(&step * &half), &quiet)?;
        monitor.sample(&(&t + &step * &half), &mid);

        let landed = update_location_all(&step, &quiet)?;
        monitor.report.steps += 1;
        t = t + &step;
        quiet = if step == to_event {
            let flipped = sim.flip_on_events(&landed);
            monitor.events(&t, &landed, &flipped);
            flipped
        } else {
            landed
        };
        monitor.sample(&t, &quiet);
    }
    Ok(monitor.report)
}
