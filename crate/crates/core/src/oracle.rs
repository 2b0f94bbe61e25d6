//! Ground truth that does not go through the event engine: a closed form
//! for a lone UAV, a pairwise kinematic event enumerator for up to three
//! UAVs, and a seeded generator of well-formed ensembles.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ensemble::{Direction, Ensemble};
use crate::scalar::Scalar;

/// Position and heading of a single UAV bouncing between `0` and
/// `perimeter` at one perimeter length per unit of time, `t` units after
/// starting at `loc0` heading `dir0`.
///
/// At the instant it reaches an endpoint the heading reported is the one it
/// arrived with. `t = 0` returns the input unchanged.
pub fn triangle_trajectory(loc0: &Scalar, dir0: Direction, t: &Scalar, perimeter: &Scalar) -> (Scalar, Direction) {
    if t.is_zero() {
        return (loc0.clone(), dir0);
    }
    let cycle = perimeter * Scalar::from_integer(2);
    // unfold onto a circle of length 2P: [0, P] outbound, (P, 2P) on the way back
    let start = match dir0 {
        Direction::Right => loc0.clone(),
        Direction::Left => &cycle - loc0,
    };
    let mut phase = (start + t * perimeter).rem_euclid(&cycle);
    if phase.is_zero() {
        phase = cycle.clone();
    }
    if phase <= *perimeter {
        (phase, Direction::Right)
    } else {
        (cycle - phase, Direction::Left)
    }
}

/// One direction reversal found by [`enumerate_events_small`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OracleEvent {
    pub time: Scalar,
    pub uav: usize,
    pub location: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the pairwise enumerator handles at most 3 UAVs, got {0}")]
    TooManyUavs(usize),
    #[error("no interaction ahead at time {0}")]
    NoInteraction(Scalar),
    #[error("stalled at time {0} without reaching the horizon")]
    NoProgress(Scalar),
}

/// Heading a UAV takes at the current instant.
///
/// From the protocol description: bounce at a perimeter end; when paired
/// with a co-located neighbour, a UAV standing at or past the pair's shared
/// boundary, seen from its own segment, heads back towards its own segment.
/// Otherwise it keeps going.
fn settle_heading(k: usize, xs: &[Scalar], heading: &[i64], perimeter: &Scalar, seg: &Scalar) -> i64 {
    let n = xs.len();
    let boundary = |j: usize| seg * Scalar::from_integer(j as i64);
    if k == 0 && xs[k].is_zero() {
        return 1;
    }
    if k == n - 1 && xs[k] == *perimeter {
        return -1;
    }
    if k + 1 < n && xs[k] == xs[k + 1] && xs[k] >= boundary(k + 1) {
        return -1;
    }
    if k > 0 && xs[k] == xs[k - 1] && xs[k] <= boundary(k) {
        return 1;
    }
    heading[k]
}

/// Enumerates every direction reversal up to and including `horizon` by
/// solving, at each instant, the endpoint-arrival, head-on-meeting and
/// escort-arrival equations of each UAV and adjacent pair.
pub fn enumerate_events_small(ens: &Ensemble, horizon: &Scalar) -> Result<Vec<OracleEvent>, OracleError> {
    let n = ens.count();
    if n > 3 {
        return Err(OracleError::TooManyUavs(n));
    }
    let perimeter = ens.perimeter().clone();
    let seg = &perimeter / Scalar::from_integer(n as i64);
    let two = Scalar::from_integer(2);
    let mut xs: Vec<Scalar> = ens.locations().cloned().collect();
    let mut heading: Vec<i64> = ens.uavs().iter().map(|u| u.direction.sign()).collect();
    let mut t = Scalar::zero();
    let mut out = Vec::new();

    loop {
        let settled: Vec<i64> = (0..n)
            .map(|k| settle_heading(k, &xs, &heading, &perimeter, &seg))
            .collect();
        for k in 0..n {
            if settled[k] != heading[k] {
                out.push(OracleEvent {
                    time: t.clone(),
                    uav: k,
                    location: xs[k].clone(),
                });
            }
        }
        heading = settled;

        let mut candidates: Vec<Scalar> = Vec::new();
        if heading[0] == -1 {
            candidates.push(&xs[0] / &seg);
        }
        if heading[n - 1] == 1 {
            candidates.push((&perimeter - &xs[n - 1]) / &seg);
        }
        for k in 0..n.saturating_sub(1) {
            let shared = &seg * Scalar::from_integer(k as i64 + 1);
            let gap = &xs[k + 1] - &xs[k];
            match (heading[k], heading[k + 1]) {
                (1, -1) => candidates.push(gap / (&seg * &two)),
                (1, 1) if gap.is_zero() && xs[k] < shared => candidates.push((&shared - &xs[k]) / &seg),
                (-1, -1) if gap.is_zero() && xs[k] > shared => candidates.push((&xs[k] - &shared) / &seg),
                _ => {}
            }
        }
        let dt = candidates
            .into_iter()
            .min()
            .ok_or_else(|| OracleError::NoInteraction(t.clone()))?;
        if !dt.is_positive() {
            return Err(OracleError::NoProgress(t));
        }
        let next = &t + &dt;
        if next > *horizon {
            break;
        }
        let travel = &seg * &dt;
        for k in 0..n {
            xs[k] = &xs[k] + &travel * Scalar::from_integer(heading[k]);
        }
        t = next;
    }
    Ok(out)
}

/// Knobs for [`random_wf_ensemble`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub perimeters: Vec<Scalar>,
    /// Largest denominator of a sampled location.
    pub max_denominator: u64,
    pub seed: u64,
    /// Probability that a UAV is placed on top of one already placed.
    pub colocation_rate: f64,
    /// Probability that a UAV is placed on a segment boundary or endpoint
    /// (when that point's denominator fits `max_denominator`).
    pub boundary_rate: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_min: 1,
            n_max: 8,
            perimeters: ["1", "2", "7/3", "10"].iter().map(|p| p.parse().unwrap()).collect(),
            max_denominator: 64,
            seed: 0,
            colocation_rate: 0.1,
            boundary_rate: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("empty UAV count range {0}..={1}")]
    EmptyRange(usize, usize),
    #[error("UAV count range must start at 1 or more")]
    ZeroUavs,
    #[error("max denominator must be at least 1")]
    ZeroDenominator,
    #[error("at least one positive perimeter is required")]
    NoPerimeter,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_min == 0 {
            return Err(ConfigError::ZeroUavs);
        }
        if self.n_min > self.n_max {
            return Err(ConfigError::EmptyRange(self.n_min, self.n_max));
        }
        if self.max_denominator == 0 {
            return Err(ConfigError::ZeroDenominator);
        }
        if self.perimeters.is_empty() || self.perimeters.iter().any(|p| !p.is_positive()) {
            return Err(ConfigError::NoPerimeter);
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            seed,
            ..self.clone()
        }
    }
}

/// A rational in `[0, max]` whose denominator is at most `max_denominator`.
pub fn random_rational<R: Rng>(rng: &mut R, max: &Scalar, max_denominator: u64) -> Scalar {
    let denom = rng.gen_range(1..=max_denominator.max(1));
    let top = (max * Scalar::from_integer(denom as i64)).floor().to_i64().unwrap_or(0);
    let numer = rng.gen_range(0..=top.max(0));
    Scalar::ratio(numer, denom as i64)
}

/// A well-formed ensemble, fully determined by `cfg` (including its seed).
///
/// # Panics
/// If `cfg` is invalid.
pub fn random_wf_ensemble(cfg: &GeneratorConfig) -> Ensemble {
    cfg.validate().expect("invalid generator config");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = rng.gen_range(cfg.n_min..=cfg.n_max);
    let perimeter = cfg.perimeters.choose(&mut rng).unwrap().clone();
    let seg = &perimeter / Scalar::from_integer(n as i64);
    let denom_fits = |x: &Scalar| x.denom().to_u64().is_some_and(|d| d <= cfg.max_denominator);

    let mut locations: Vec<Scalar> = Vec::with_capacity(n);
    while locations.len() < n {
        let roll: f64 = rng.gen();
        let loc = if roll < cfg.colocation_rate && !locations.is_empty() {
            locations.choose(&mut rng).unwrap().clone()
        } else if roll < cfg.colocation_rate + cfg.boundary_rate {
            let mark = &seg * Scalar::from_integer(rng.gen_range(0..=n as i64));
            if denom_fits(&mark) {
                mark
            } else {
                random_rational(&mut rng, &perimeter, cfg.max_denominator)
            }
        } else {
            random_rational(&mut rng, &perimeter, cfg.max_denominator)
        };
        locations.push(loc);
    }
    locations.sort();
    let states: Vec<(Scalar, Direction)> = locations
        .into_iter()
        .map(|loc| {
            let dir = if rng.gen_bool(0.5) {
                Direction::Right
            } else {
                Direction::Left
            };
            (loc, dir)
        })
        .collect();
    Ensemble::from_states(perimeter, states).expect("generator produced an ill-formed ensemble")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{wf_ensemble, Direction::Left, Direction::Right};

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    fn ens(p: &str, states: &[(&str, Direction)]) -> Ensemble {
        Ensemble::from_states(q(p), states.iter().map(|(l, d)| (q(l), *d))).unwrap()
    }

    fn ev(t: &str, uav: usize, loc: &str) -> OracleEvent {
        OracleEvent {
            time: q(t),
            uav,
            location: q(loc),
        }
    }

    #[test]
    fn triangle_examples() {
        assert_eq!(triangle_trajectory(&q("0"), Right, &q("1"), &q("1")), (q("1"), Right));
        assert_eq!(triangle_trajectory(&q("0"), Right, &q("2"), &q("1")).0, q("0"));
        assert_eq!(triangle_trajectory(&q("1/3"), Left, &q("1/3"), &q("1")), (q("0"), Left));
        assert_eq!(triangle_trajectory(&q("1/3"), Left, &q("1/2"), &q("1")), (q("1/6"), Right));
        assert_eq!(triangle_trajectory(&q("5"), Left, &q("3/2"), &q("10")), (q("10"), Right));
    }

    #[test]
    fn enumerator_examples() {
        let skew = ens("2", &[("0", Right), ("1/4", Left)]);
        assert_eq!(
            enumerate_events_small(&skew, &q("3")).unwrap(),
            vec![
                ev("1/8", 1, "1/8"),
                ev("1", 0, "1"),
                ev("2", 0, "0"),
                ev("2", 1, "2"),
                ev("3", 0, "1"),
                ev("3", 1, "1"),
            ]
        );
        let apart = ens("2", &[("1", Left), ("1", Right)]);
        assert_eq!(
            enumerate_events_small(&apart, &q("2")).unwrap(),
            vec![ev("1", 0, "0"), ev("1", 1, "2"), ev("2", 0, "1"), ev("2", 1, "1")]
        );
        let lone = ens("1", &[("1/3", Left)]);
        assert_eq!(
            enumerate_events_small(&lone, &q("2")).unwrap(),
            vec![ev("1/3", 0, "0"), ev("4/3", 0, "1")]
        );
    }

    #[test]
    fn enumerator_rejects_large_ensembles() {
        let four = ens("4", &[("0", Left), ("1", Left), ("2", Left), ("3", Left)]);
        assert_eq!(enumerate_events_small(&four, &q("1")), Err(OracleError::TooManyUavs(4)));
    }

    #[test]
    fn generator_is_deterministic_and_well_formed() {
        let cfg = GeneratorConfig::default();
        for seed in 0..200 {
            let a = random_wf_ensemble(&cfg.with_seed(seed));
            assert!(wf_ensemble(&a));
            assert_eq!(a, random_wf_ensemble(&cfg.with_seed(seed)));
            for loc in a.locations() {
                assert!(loc.denom().to_u64().unwrap() <= cfg.max_denominator);
            }
        }
    }

    #[test]
    fn generator_produces_colocations_on_coarse_grids() {
        let cfg = GeneratorConfig {
            n_min: 3,
            n_max: 6,
            max_denominator: 2,
            colocation_rate: 0.0,
            boundary_rate: 0.0,
            ..GeneratorConfig::default()
        };
        let colocated = (0..200)
            .filter(|&seed| {
                let e = random_wf_ensemble(&cfg.with_seed(seed));
                e.uavs().windows(2).any(|w| w[0].location == w[1].location)
            })
            .count();
        assert!(colocated > 0);
    }

    #[test]
    fn config_validation() {
        let bad = GeneratorConfig {
            n_min: 4,
            n_max: 2,
            ..GeneratorConfig::default()
        };
        assert_eq!(bad.validate(), Err(ConfigError::EmptyRange(4, 2)));
        let bad = GeneratorConfig {
            max_denominator: 0,
            ..GeneratorConfig::default()
        };
        assert_eq!(bad.validate(), Err(ConfigError::ZeroDenominator));
    }
}
