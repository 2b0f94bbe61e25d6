//! Seeded randomized property campaigns.
//!
//! Case `k` of a campaign with seed `s` uses generator seed `s + k`, so any
//! failing case can be replayed on its own. Cases run on a worker pool and
//! are aggregated in case order, so the summary does not depend on
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{wf_ensemble, Ensemble};
use crate::event::{always_smallest_min_time_to_impending_impact, events_with, EventRule};
use crate::invariants::location_convergence_p_with;
use crate::oracle::{enumerate_events_small, random_rational, random_wf_ensemble, triangle_trajectory, GeneratorConfig, OracleEvent};
use crate::scalar::Scalar;
use crate::scenario::scenario_value;
use crate::stepper::{Simulator, StepBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    WellFormedness,
    Composition,
    Reflection,
    Quiescence,
    Existence,
    Convergence,
    OracleAgreement,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::WellFormedness,
        Property::Composition,
        Property::Reflection,
        Property::Quiescence,
        Property::Existence,
        Property::Convergence,
        Property::OracleAgreement,
    ];
}

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub generator: GeneratorConfig,
    pub cases: u64,
    /// Largest denominator of the random time increments.
    pub time_denominator: u64,
    /// Overrides the default step budget when set.
    pub fuel: Option<u64>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            generator: GeneratorConfig::default(),
            cases: 500,
            time_denominator: 16,
            fuel: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub property: Property,
    pub checked: u64,
    pub failed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub case: u64,
    pub seed: u64,
    pub property: Property,
    pub detail: String,
    pub scenario: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub cases: u64,
    pub seed: u64,
    pub failures: u64,
    pub tallies: Vec<Tally>,
    pub first_counterexample: Option<Counterexample>,
    /// Largest number of `next_step` iterations per unit of simulated time
    /// seen while stepping to `2N - 1`. A measurement, not a bound.
    pub max_steps_per_unit: f64,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct CaseOutcome {
    ensemble: Ensemble,
    results: Vec<(Property, Result<(), String>)>,
    steps_per_unit: f64,
}

/// The event sequence the engine produces up to `horizon`: flips detected
/// at each landing instant, including time zero.
pub fn engine_events<R: EventRule>(
    sim: &Simulator<R>,
    ens: &Ensemble,
    horizon: &Scalar,
    max_steps: u64,
) -> Result<Vec<OracleEvent>, String> {
    let mut out = Vec::new();
    let mut t = Scalar::zero();
    let mut state = ens.clone();
    let record = |t: &Scalar, s: &Ensemble, out: &mut Vec<OracleEvent>| {
        for i in events_with(sim.rule(), s) {
            out.push(OracleEvent {
                time: t.clone(),
                uav: i,
                location: s.location(i).clone(),
            });
        }
    };
    record(&t, &state, &mut out);
    for _ in 0..max_steps {
        let (dt, next) = sim.step_to_next_event(&state).map_err(|e| e.to_string())?;
        t = t + dt;
        if t > *horizon {
            return Ok(out);
        }
        state = next;
        record(&t, &state, &mut out);
    }
    Err(format!("more than {max_steps} events before {horizon}"))
}

fn check(cond: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

fn run_case<R: EventRule>(sim: &Simulator<R>, cfg: &FuzzConfig, seed: u64) -> CaseOutcome {
    let ens = random_wf_ensemble(&cfg.generator.with_seed(seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = ens.count();
    let n_scalar = Scalar::from_integer(n as i64);
    let bound = Scalar::from_integer(2 * n as i64 - 1);
    let span = &n_scalar + Scalar::one();
    let budget = |dt: &Scalar, e: &Ensemble| {
        cfg.fuel
            .map(StepBudget::new)
            .unwrap_or_else(|| StepBudget::default_for(dt, e))
    };
    let step = |dt: &Scalar, e: &Ensemble| sim.step_time(dt, e, budget(dt, e)).map_err(|err| err.to_string());

    let mut results = Vec::new();
    let mut steps_per_unit = 0.0;

    // quiescence and existence along the trajectory, landing state by landing state
    let horizon = Scalar::from_integer(2 * n as i64 + 2);
    let mut visited = vec![ens.clone()];
    let mut walk_result = Ok(());
    let mut t = Scalar::zero();
    for _ in 0..budget(&horizon, &ens).fuel() {
        match sim.step_to_next_event(visited.last().unwrap()) {
            Ok((dt, next)) => {
                t = t + dt;
                if t > horizon {
                    break;
                }
                visited.push(next);
            }
            Err(e) => {
                walk_result = Err(e.to_string());
                break;
            }
        }
    }
    let quiescence = visited.iter().try_for_each(|s| {
        let flipped = sim.flip_on_events(s);
        let left = events_with(sim.rule(), &flipped);
        check(left.is_empty(), || format!("UAVs {left:?} still have events after flipping {s}"))
    });
    results.push((Property::Quiescence, quiescence.and(walk_result)));
    let existence = visited.iter().try_for_each(|s| {
        for candidate in [s.clone(), sim.flip_on_events(s)] {
            always_smallest_min_time_to_impending_impact(&candidate).map_err(|e| e.to_string())?;
        }
        Ok(())
    });
    results.push((Property::Existence, existence));

    let dt = random_rational(&mut rng, &span, cfg.time_denominator);
    let wf = step(&dt, &ens).and_then(|after| {
        check(wf_ensemble(&after), || format!("ill-formed after {dt}: {after}"))
    });
    results.push((Property::WellFormedness, wf));

    let a = random_rational(&mut rng, &span, cfg.time_denominator);
    let b = random_rational(&mut rng, &span, cfg.time_denominator);
    let composition = (|| {
        let whole = step(&(&a + &b), &ens)?;
        let nested = step(&b, &step(&a, &ens)?)?;
        check(whole == nested, || format!("A={a} B={b}: {whole} != {nested}"))
    })();
    results.push((Property::Composition, composition));

    let reflection = (|| {
        let mirrored_after = step(&dt, &ens)?.reflect();
        let after_mirrored = step(&dt, &ens.reflect())?;
        check(mirrored_after == after_mirrored, || {
            format!("dt={dt}: {mirrored_after} != {after_mirrored}")
        })
    })();
    results.push((Property::Reflection, reflection));

    let convergence = (|| {
        let (at_bound, used) = sim
            .step_time_counted(&bound, &ens, budget(&bound, &ens))
            .map_err(|e| e.to_string())?;
        steps_per_unit = used as f64 / bound.to_f64();
        let two = Scalar::from_integer(2);
        let ok = location_convergence_p_with(sim, &at_bound, budget(&two, &at_bound)).map_err(|e| e.to_string())?;
        check(ok, || format!("not periodic at {bound}: {at_bound}"))
    })();
    results.push((Property::Convergence, convergence));

    if n <= 3 {
        let agreement = (|| {
            let expected = enumerate_events_small(&ens, &horizon).map_err(|e| e.to_string())?;
            let actual = engine_events(sim, &ens, &horizon, budget(&horizon, &ens).fuel())?;
            check(expected == actual, || format!("oracle {expected:?} vs engine {actual:?}"))?;
            if n == 1 {
                let t = random_rational(&mut rng, &span, cfg.time_denominator);
                let uav = ens.uav(0);
                let expected = triangle_trajectory(&uav.location, uav.direction, &t, ens.perimeter());
                let after = step(&t, &ens)?;
                let actual = (after.location(0).clone(), after.direction(0));
                check(expected == actual, || format!("t={t}: closed form {expected:?} vs engine {actual:?}"))?;
            }
            Ok(())
        })();
        results.push((Property::OracleAgreement, agreement));
    }

    CaseOutcome {
        ensemble: ens,
        results,
        steps_per_unit,
    }
}

/// Runs `cfg.cases` seeded cases against `sim`.
pub fn run_campaign<R: EventRule>(sim: &Simulator<R>, cfg: &FuzzConfig) -> FuzzSummary {
    let base = cfg.generator.seed;
    let outcomes: Vec<CaseOutcome> = (0..cfg.cases)
        .into_par_iter()
        .map(|k| run_case(sim, cfg, base.wrapping_add(k)))
        .collect();

    let mut tallies: Vec<Tally> = Property::ALL
        .iter()
        .map(|&property| Tally {
            property,
            checked: 0,
            failed: 0,
        })
        .collect();
    let mut failures = 0;
    let mut first_counterexample = None;
    let mut max_steps_per_unit: f64 = 0.0;
    for (k, outcome) in outcomes.into_iter().enumerate() {
        max_steps_per_unit = max_steps_per_unit.max(outcome.steps_per_unit);
        for (property, result) in outcome.results {
            let tally = tallies.iter_mut().find(|t| t.property == property).unwrap();
            tally.checked += 1;
            if let Err(detail) = result {
                tally.failed += 1;
                failures += 1;
                if first_counterexample.is_none() {
                    first_counterexample = Some(Counterexample {
                        case: k as u64,
                        seed: base.wrapping_add(k as u64),
                        property,
                        detail,
                        scenario: scenario_value(&outcome.ensemble),
                    });
                }
            }
        }
    }
    FuzzSummary {
        cases: cfg.cases,
        seed: base,
        failures,
        tallies,
        first_counterexample,
        max_steps_per_unit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lone_uav_case_passes() {
        let cfg = FuzzConfig {
            generator: GeneratorConfig {
                n_min: 1,
                n_max: 1,
                ..GeneratorConfig::default()
            },
            cases: 1,
            ..FuzzConfig::default()
        };
        let summary = run_campaign(&Simulator::new(), &cfg);
        assert!(summary.passed(), "{summary:?}");
        assert!(summary.tallies.iter().all(|t| t.checked == 1));
    }

    #[test]
    fn campaign_is_deterministic() {
        let cfg = FuzzConfig {
            cases: 20,
            ..FuzzConfig::default()
        };
        let a = run_campaign(&Simulator::new(), &cfg);
        let b = run_campaign(&Simulator::new(), &cfg);
        assert_eq!(a, b);
    }
}
