//! The work behind each CLI command, kept free of I/O so it can be tested
//! directly.

use serde::Serialize;

use crate::ensemble::Ensemble;
use crate::error::SimError;
use crate::event::{always_smallest_min_time_to_impending_impact, events};
use crate::invariants::{location_convergence_p, run_monitors, MonitorReport};
use crate::scalar::Scalar;
use crate::stepper::{step_time, update_location_all, Simulator, StepBudget};
use crate::trace::{rows_for, TraceRecord};

/// Event-aligned trace: the initial rows, pre- and post-flip rows at every
/// event instant, and the final state. The final rows are the exact result
/// of stepping by `duration`, so flips pending at that instant show only as
/// event flags.
pub fn simulate_trace(ens: &Ensemble, duration: &Scalar, budget: StepBudget) -> Result<Vec<TraceRecord>, SimError> {
    if duration.is_negative() {
        return Err(SimError::NegativeIncrement(duration.clone()));
    }
    let sim = Simulator::new();
    let mut rows = rows_for(&Scalar::zero(), ens, &events(ens));
    let mut t = Scalar::zero();
    let mut state = ens.clone();
    let mut used = 0u64;
    while t < *duration {
        if used == budget.fuel() {
            return Err(SimError::FuelExhausted {
                fuel: budget.fuel(),
                remaining: duration - &t,
            });
        }
        let flipped = sim.flip_on_events(&state);
        if flipped != state {
            rows.extend(rows_for(&t, &flipped, &[]));
        }
        let to_event = always_smallest_min_time_to_impending_impact(&flipped)?;
        let step = to_event.min(duration - &t);
        state = update_location_all(&step, &flipped)?;
        used += 1;
        t = t + step;
        rows.extend(rows_for(&t, &state, &events(&state)));
    }
    Ok(rows)
}

/// Rows at `0, interval, 2·interval, ...` up to `duration`, for plotting.
///
/// # Panics
/// If `interval` is not positive.
pub fn sampled_trace(
    ens: &Ensemble,
    duration: &Scalar,
    interval: &Scalar,
    budget: StepBudget,
) -> Result<Vec<TraceRecord>, SimError> {
    assert!(interval.is_positive(), "sampling interval must be positive");
    let mut rows = rows_for(&Scalar::zero(), ens, &events(ens));
    let mut t = Scalar::zero();
    let mut state = ens.clone();
    loop {
        let next = &t + interval;
        if next > *duration {
            break;
        }
        state = step_time(interval, &state, budget)?;
        t = next;
        rows.extend(rows_for(&t, &state, &events(&state)));
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpotCheck {
    pub offset: Scalar,
    pub periodic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergeReport {
    pub n: usize,
    /// `2N - 1`.
    pub bound: Scalar,
    pub converged: bool,
    /// Periodicity re-checked this many units after the bound.
    pub spot_checks: Vec<SpotCheck>,
    /// Earliest event-aligned time at or before the bound at which the
    /// period-2 check already passes.
    pub first_periodic_time: Option<Scalar>,
    pub state_at_bound: String,
}

impl ConvergeReport {
    pub fn passed(&self) -> bool {
        self.converged && self.spot_checks.iter().all(|s| s.periodic)
    }
}

pub const SPOT_CHECK_OFFSETS: [i64; 2] = [4, 6];

/// Steps to `2N - 1` and checks the period-2 condition there and a few
/// units later.
pub fn converge(ens: &Ensemble) -> Result<ConvergeReport, SimError> {
    converge_with_fuel(ens, None)
}

pub fn converge_with_fuel(ens: &Ensemble, fuel: Option<u64>) -> Result<ConvergeReport, SimError> {
    let two = Scalar::from_integer(2);
    let budget_for = |dt: &Scalar, e: &Ensemble| fuel.map(StepBudget::new).unwrap_or_else(|| StepBudget::default_for(dt, e));
    let n = ens.count();
    let bound = Scalar::from_integer(2 * n as i64 - 1);
    let at_bound = step_time(&bound, ens, budget_for(&bound, ens))?;
    let converged = location_convergence_p(&at_bound, budget_for(&two, &at_bound))?;

    let mut spot_checks = Vec::new();
    for offset in SPOT_CHECK_OFFSETS {
        let offset = Scalar::from_integer(offset);
        let later = step_time(&offset, &at_bound, budget_for(&offset, &at_bound))?;
        spot_checks.push(SpotCheck {
            periodic: location_convergence_p(&later, budget_for(&two, &later))?,
            offset,
        });
    }

    let sim = Simulator::new();
    let mut first_periodic_time = None;
    let mut t = Scalar::zero();
    let mut state = ens.clone();
    let mut visited = 0u64;
    let cap = budget_for(&bound, ens).fuel();
    while t <= bound && visited < cap {
        if location_convergence_p(&state, budget_for(&two, &state))? {
            first_periodic_time = Some(t);
            break;
        }
        let (dt, next) = sim.step_to_next_event(&state)?;
        t = t + dt;
        state = next;
        visited += 1;
    }

    Ok(ConvergeReport {
        n,
        bound,
        converged,
        spot_checks,
        first_periodic_time,
        state_at_bound: at_bound.to_string(),
    })
}

/// Assertion groups `check` can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Every UAV flips within `N` units.
    FirstEvent,
    /// All have-met predicates hold from time `N` on.
    HaveMet,
    /// All synchronization predicates hold from time `2N - 1` on.
    Synchronized,
    /// No established predicate is later lost.
    Invariance,
}

impl CheckKind {
    pub const ALL: [CheckKind; 4] = [
        CheckKind::FirstEvent,
        CheckKind::HaveMet,
        CheckKind::Synchronized,
        CheckKind::Invariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::FirstEvent => "first-event",
            CheckKind::HaveMet => "have-met",
            CheckKind::Synchronized => "synchronized",
            CheckKind::Invariance => "invariance",
        }
    }

    pub fn from_name(name: &str) -> Option<CheckKind> {
        CheckKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assertion {
    pub check: CheckKind,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    pub monitor: MonitorReport,
}

fn show(t: &Option<Scalar>) -> String {
    t.as_ref().map_or_else(|| "never".to_string(), Scalar::to_string)
}

/// Runs the monitors to `horizon` and asserts the selected bounds. Bounds
/// that lie beyond the horizon cannot fail.
pub fn check(ens: &Ensemble, horizon: &Scalar, selection: &[CheckKind], budget: StepBudget) -> Result<CheckReport, SimError> {
    let monitor = run_monitors(ens, horizon, budget)?;
    let n = Scalar::from_integer(ens.count() as i64);
    let sync_bound = Scalar::from_integer(2 * ens.count() as i64 - 1);
    let within = |since: &Option<Scalar>, bound: &Scalar| -> bool {
        if horizon < bound {
            true
        } else {
            since.as_ref().is_some_and(|t| t <= bound)
        }
    };

    let assertions = selection
        .iter()
        .map(|&kind| {
            let (passed, detail) = match kind {
                CheckKind::FirstEvent => {
                    let late: Vec<String> = monitor
                        .uavs
                        .iter()
                        .filter(|u| !within(&u.first_event, &n))
                        .map(|u| format!("UAV {} first flips at {}", u.id, show(&u.first_event)))
                        .collect();
                    (late.is_empty(), if late.is_empty() { format!("every UAV flips by {n}") } else { late.join("; ") })
                }
                CheckKind::HaveMet => (
                    within(&monitor.all_have_met_since, &n),
                    format!("all have met since {} (bound {n})", show(&monitor.all_have_met_since)),
                ),
                CheckKind::Synchronized => (
                    within(&monitor.all_synchronized_since, &sync_bound),
                    format!(
                        "all synchronized since {} (bound {sync_bound})",
                        show(&monitor.all_synchronized_since)
                    ),
                ),
                CheckKind::Invariance => (
                    monitor.violations.is_empty(),
                    format!("{} invariance violations", monitor.violations.len()),
                ),
            };
            Assertion {
                check: kind,
                passed,
                detail,
            }
        })
        .collect::<Vec<_>>();
    Ok(CheckReport {
        passed: assertions.iter().all(|a| a.passed),
        assertions,
        monitor,
    })
}
