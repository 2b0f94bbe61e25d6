//! The fuzz campaign must catch a broken flip rule.

use dpss_core::ensemble::{Direction, Ensemble};
use dpss_core::fuzz::{run_campaign, FuzzConfig, Property};
use dpss_core::oracle::GeneratorConfig;
use dpss_core::{Dpss, EventRule, Simulator};

/// The standard rule with the boundary comparison of co-located meetings
/// negated: UAVs that meet inside their own segment turn, those that meet
/// in a neighbour's segment pass through.
struct InvertedBoundary;

impl EventRule for InvertedBoundary {
    fn event_for_uav(&self, i: usize, ens: &Ensemble) -> bool {
        let me = ens.uav(i);
        let n = ens.count();
        match me.direction {
            Direction::Left if i > 0 => {
                me.location == *ens.location(i - 1) && me.location > ens.uav_left_boundary(i)
            }
            Direction::Right if i + 1 < n => {
                me.location == *ens.location(i + 1) && me.location < ens.uav_right_boundary(i)
            }
            _ => Dpss.event_for_uav(i, ens),
        }
    }
}

fn small_campaign(seed: u64) -> FuzzConfig {
    FuzzConfig {
        generator: GeneratorConfig {
            n_min: 2,
            n_max: 4,
            seed,
            ..GeneratorConfig::default()
        },
        cases: 20,
        fuel: Some(500),
        ..FuzzConfig::default()
    }
}

#[test]
fn standard_rule_passes_small_campaign() {
    let summary = run_campaign(&Simulator::new(), &small_campaign(11));
    assert!(summary.passed(), "{:?}", summary.first_counterexample);
}

#[test]
fn inverted_boundary_rule_is_caught() {
    let summary = run_campaign(&Simulator::with_rule(InvertedBoundary), &small_campaign(11));
    assert!(!summary.passed());
    let counterexample = summary.first_counterexample.expect("a counterexample is reported");
    assert!(counterexample.seed >= 11 && counterexample.seed < 31);
    assert!(!counterexample.detail.is_empty());
    println!("caught by {:?}: {}", counterexample.property, counterexample.detail);
    let failed: Vec<Property> = summary.tallies.iter().filter(|t| t.failed > 0).map(|t| t.property).collect();
    // the broken rule disagrees with the independent enumerator and never
    // settles into the period-2 pattern
    assert!(failed.contains(&Property::OracleAgreement), "{:?}", summary.tallies);
    assert!(failed.contains(&Property::Convergence), "{:?}", summary.tallies);
}
