//! UAV and ensemble state, segment geometry and the mirror symmetry.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Scalar;

/// Direction of travel along the perimeter. `Left` is towards 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    /// `-1` for `Left`, `+1` for `Right`.
    pub fn sign(self) -> i64 {
        match self {
            Direction::Left => -1,
            Direction::Right => 1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Direction> {
        match sign {
            -1 => Some(Direction::Left),
            1 => Some(Direction::Right),
            _ => None,
        }
    }

    pub fn reversed(self) -> Direction {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;
    fn neg(self) -> Direction {
        self.reversed()
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign())
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i64(self.sign())
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let sign = i64::deserialize(deserializer)?;
        Direction::from_sign(sign)
            .ok_or_else(|| serde::de::Error::custom(format!("direction must be -1 or 1, got {sign}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UavState {
    pub id: usize,
    pub location: Scalar,
    pub direction: Direction,
}

impl UavState {
    pub fn new(id: usize, location: Scalar, direction: Direction) -> Self {
        UavState {
            id,
            location,
            direction,
        }
    }
}

/// The first invariant a candidate ensemble violates.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnsembleError {
    #[error("perimeter length must be positive, got {0}")]
    NonPositivePerimeter(Scalar),
    #[error("an ensemble needs at least one UAV")]
    Empty,
    #[error("declared count {declared} but {actual} UAVs supplied")]
    CountMismatch { declared: usize, actual: usize },
    #[error("UAV at position {position} has id {id}")]
    IdMismatch { position: usize, id: usize },
    #[error("UAV {id} at {location} lies outside [0, {perimeter}]")]
    OutOfRange {
        id: usize,
        location: Scalar,
        perimeter: Scalar,
    },
    #[error("UAV {id} at {location} is left of UAV {prev} at {prev_location}")]
    Unordered {
        prev: usize,
        prev_location: Scalar,
        id: usize,
        location: Scalar,
    },
}

/// Perimeter length, UAV count and the UAVs ordered by id.
///
/// Derived quantities follow the normalized time scheme: a UAV crosses one
/// segment of length `S = P / N` per unit of time, so a full traverse of the
/// perimeter takes `T = N` units.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ensemble {
    perimeter: Scalar,
    count: usize,
    uavs: Vec<UavState>,
}

impl Ensemble {
    /// Builds a well-formed ensemble, rejecting the first violated invariant.
    pub fn new(perimeter: Scalar, uavs: Vec<UavState>) -> Result<Self, EnsembleError> {
        let count = uavs.len();
        Self::with_count(perimeter, count, uavs)
    }

    pub fn with_count(
        perimeter: Scalar,
        count: usize,
        uavs: Vec<UavState>,
    ) -> Result<Self, EnsembleError> {
        let ens = Ensemble {
            perimeter,
            count,
            uavs,
        };
        ens.validate()?;
        Ok(ens)
    }

    /// Convenience constructor assigning ids `0..N` in order.
    pub fn from_states<I>(perimeter: Scalar, states: I) -> Result<Self, EnsembleError>
    where
        I: IntoIterator<Item = (Scalar, Direction)>,
    {
        let uavs = states
            .into_iter()
            .enumerate()
            .map(|(id, (location, direction))| UavState::new(id, location, direction))
            .collect();
        Self::new(perimeter, uavs)
    }

    /// Assembles a candidate without checking anything. Use [`wf_ensemble`]
    /// to classify the result.
    pub fn from_parts_unchecked(perimeter: Scalar, count: usize, uavs: Vec<UavState>) -> Self {
        Ensemble {
            perimeter,
            count,
            uavs,
        }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if !self.perimeter.is_positive() {
            return Err(EnsembleError::NonPositivePerimeter(self.perimeter.clone()));
        }
        if self.count == 0 {
            return Err(EnsembleError::Empty);
        }
        if self.count != self.uavs.len() {
            return Err(EnsembleError::CountMismatch {
                declared: self.count,
                actual: self.uavs.len(),
            });
        }
        let zero = Scalar::zero();
        for (position, uav) in self.uavs.iter().enumerate() {
            if uav.id != position {
                return Err(EnsembleError::IdMismatch {
                    position,
                    id: uav.id,
                });
            }
            if uav.location < zero || uav.location > self.perimeter {
                return Err(EnsembleError::OutOfRange {
                    id: uav.id,
                    location: uav.location.clone(),
                    perimeter: self.perimeter.clone(),
                });
            }
            if position > 0 {
                let prev = &self.uavs[position - 1];
                if prev.location > uav.location {
                    return Err(EnsembleError::Unordered {
                        prev: prev.id,
                        prev_location: prev.location.clone(),
                        id: uav.id,
                        location: uav.location.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn perimeter(&self) -> &Scalar {
        &self.perimeter
    }

    /// Number of UAVs, `N`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn uavs(&self) -> &[UavState] {
        &self.uavs
    }

    /// # Panics
    /// If `i >= N`.
    pub fn uav(&self, i: usize) -> &UavState {
        self.check_index(i);
        &self.uavs[i]
    }

    pub fn location(&self, i: usize) -> &Scalar {
        &self.uav(i).location
    }

    pub fn direction(&self, i: usize) -> Direction {
        self.uav(i).direction
    }

    pub fn locations(&self) -> impl Iterator<Item = &Scalar> {
        self.uavs.iter().map(|u| &u.location)
    }

    /// Segment length `S = P / N`.
    pub fn seg_length(&self) -> Scalar {
        &self.perimeter / Scalar::from_integer(self.count as i64)
    }

    /// Time for one UAV to traverse the whole perimeter: `T = N` units.
    pub fn traverse_time(&self) -> Scalar {
        Scalar::from_integer(self.count as i64)
    }

    /// Left end `i·S` of UAV `i`'s segment.
    ///
    /// # Panics
    /// If `i >= N`.
    pub fn uav_left_boundary(&self, i: usize) -> Scalar {
        self.check_index(i);
        self.seg_length() * Scalar::from_integer(i as i64)
    }

    /// Right end `(i+1)·S` of UAV `i`'s segment.
    ///
    /// # Panics
    /// If `i >= N`.
    pub fn uav_right_boundary(&self, i: usize) -> Scalar {
        self.check_index(i);
        self.seg_length() * Scalar::from_integer(i as i64 + 1)
    }

    /// Mirror image under `x -> P - x`: UAV `i` becomes UAV `N-1-i` and every
    /// direction is reversed.
    pub fn reflect(&self) -> Ensemble {
        let n = self.count;
        let uavs = (0..n)
            .map(|new_id| {
                let old = &self.uavs[n - 1 - new_id];
                UavState::new(new_id, &self.perimeter - &old.location, -old.direction)
            })
            .collect();
        Ensemble {
            perimeter: self.perimeter.clone(),
            count: n,
            uavs,
        }
    }

    /// Same configuration with new directions.
    ///
    /// # Panics
    /// If `directions` has the wrong length.
    pub fn with_directions(&self, directions: &[Direction]) -> Ensemble {
        assert_eq!(directions.len(), self.count, "one direction per UAV");
        let mut next = self.clone();
        for (uav, &d) in next.uavs.iter_mut().zip(directions) {
            uav.direction = d;
        }
        next
    }

    /// Same configuration with new locations; not re-validated.
    pub(crate) fn with_locations_unchecked(&self, locations: Vec<Scalar>) -> Ensemble {
        let mut next = self.clone();
        for (uav, loc) in next.uavs.iter_mut().zip(locations) {
            uav.location = loc;
        }
        next
    }

    fn check_index(&self, i: usize) {
        assert!(
            i < self.count,
            "UAV index {i} out of range for an ensemble of {}",
            self.count
        );
    }
}

/// Segment length `S = P / N`.
pub fn seg_length(ens: &Ensemble) -> Scalar {
    ens.seg_length()
}

pub fn uav_left_boundary(i: usize, ens: &Ensemble) -> Scalar {
    ens.uav_left_boundary(i)
}

pub fn uav_right_boundary(i: usize, ens: &Ensemble) -> Scalar {
    ens.uav_right_boundary(i)
}

/// True iff every ensemble invariant holds. Never panics.
pub fn wf_ensemble(ens: &Ensemble) -> bool {
    ens.validate().is_ok()
}

pub fn reflect(ens: &Ensemble) -> Ensemble {
    ens.reflect()
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P={} N={} [", self.perimeter, self.count)?;
        for (k, u) in self.uavs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            let arrow = match u.direction {
                Direction::Left => '<',
                Direction::Right => '>',
            };
            write!(f, "{}{}", u.location, arrow)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::{Left, Right};

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    fn ens(p: &str, states: &[(&str, Direction)]) -> Ensemble {
        Ensemble::from_states(q(p), states.iter().map(|(l, d)| (q(l), *d))).unwrap()
    }

    #[test]
    fn segment_geometry() {
        assert_eq!(ens("2", &[("0", Left), ("1", Left)]).seg_length(), q("1"));
        assert_eq!(ens("1", &[("0", Left)]).seg_length(), q("1"));
        let four = ens("7/3", &[("0", Left); 4]);
        assert_eq!(four.seg_length(), q("7/12"));

        let two = ens("2", &[("0", Left), ("1", Left)]);
        assert_eq!((two.uav_left_boundary(0), two.uav_right_boundary(0)), (q("0"), q("1")));
        assert_eq!((two.uav_left_boundary(1), two.uav_right_boundary(1)), (q("1"), q("2")));
        let three = ens("3", &[("0", Left); 3]);
        assert_eq!((three.uav_left_boundary(2), three.uav_right_boundary(2)), (q("2"), q("3")));
    }

    #[test]
    fn boundaries_tile_the_perimeter() {
        let e = ens("7/3", &[("0", Left); 5]);
        for i in 0..5 {
            assert!(e.uav_left_boundary(i) < e.uav_right_boundary(i));
            if i + 1 < 5 {
                assert_eq!(e.uav_right_boundary(i), e.uav_left_boundary(i + 1));
            }
        }
        assert_eq!(e.uav_right_boundary(4), *e.perimeter());
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn boundary_index_out_of_range() {
        ens("2", &[("0", Left), ("1", Left)]).uav_left_boundary(2);
    }

    #[test]
    fn well_formedness() {
        let raw = |locs: [&str; 2]| {
            Ensemble::from_parts_unchecked(
                q("2"),
                2,
                vec![UavState::new(0, q(locs[0]), Right), UavState::new(1, q(locs[1]), Left)],
            )
        };
        assert!(wf_ensemble(&raw(["1/2", "3/2"])));
        assert!(!wf_ensemble(&raw(["3/2", "1/2"])));
        assert!(!wf_ensemble(&raw(["1/2", "5/2"])));
        assert!(!wf_ensemble(&raw(["-1/2", "1/2"])));

        let miscounted = Ensemble::from_parts_unchecked(q("2"), 3, raw(["0", "1"]).uavs().to_vec());
        assert!(!wf_ensemble(&miscounted));
        let bad_ids = Ensemble::from_parts_unchecked(
            q("2"),
            2,
            vec![UavState::new(1, q("0"), Right), UavState::new(0, q("1"), Left)],
        );
        assert!(!wf_ensemble(&bad_ids));
        assert_eq!(
            Ensemble::new(q("0"), vec![UavState::new(0, q("0"), Left)]),
            Err(EnsembleError::NonPositivePerimeter(q("0")))
        );
        assert_eq!(Ensemble::new(q("1"), vec![]), Err(EnsembleError::Empty));
    }

    #[test]
    fn reflection_examples() {
        let sym = ens("2", &[("1/2", Right), ("3/2", Left)]);
        assert_eq!(sym.reflect(), sym);

        let skew = ens("2", &[("0", Right), ("1/4", Left)]);
        assert_eq!(skew.reflect(), ens("2", &[("7/4", Right), ("2", Left)]));
        assert_eq!(skew.reflect().reflect(), skew);
        assert!(wf_ensemble(&skew.reflect()));
    }

    #[test]
    fn direction_signs() {
        assert_eq!(Left.sign(), -1);
        assert_eq!(Right.sign(), 1);
        assert_eq!(-Left, Right);
        assert_eq!(Direction::from_sign(0), None);
    }
}
