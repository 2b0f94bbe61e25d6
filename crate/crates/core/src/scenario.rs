//! JSON scenario documents.
//!
//! ```json
//! {"perimeter": "2", "n": 2,
//!  "uavs": [{"location": "1/2", "direction": 1}, {"location": "3/2", "direction": -1}]}
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::{Direction, Ensemble, EnsembleError, UavState};
use crate::scalar::{ParseScalarError, Scalar};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    perimeter: String,
    n: u64,
    uavs: Vec<UavDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UavDoc {
    location: String,
    direction: i64,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario is not valid JSON of the expected shape: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    MalformedRational {
        field: String,
        #[source]
        source: ParseScalarError,
    },
    #[error("uavs[{index}].direction must be -1 or 1, got {value}")]
    BadDirection { index: usize, value: i64 },
    #[error(transparent)]
    Invalid(#[from] EnsembleError),
}

/// A validated scenario; always holds a well-formed ensemble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    ensemble: Ensemble,
}

impl Scenario {
    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn into_ensemble(self) -> Ensemble {
        self.ensemble
    }

    pub fn to_json(&self) -> String {
        emit_scenario(&self.ensemble)
    }
}

impl From<Ensemble> for Scenario {
    fn from(ensemble: Ensemble) -> Self {
        Scenario { ensemble }
    }
}

fn parse_field(field: String, text: &str) -> Result<Scalar, ScenarioError> {
    text.parse()
        .map_err(|source| ScenarioError::MalformedRational { field, source })
}

/// Parses and validates a scenario document.
pub fn parse_scenario(document: &[u8]) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_slice(document)?;
    let perimeter = parse_field("perimeter".into(), &doc.perimeter)?;
    let mut uavs = Vec::with_capacity(doc.uavs.len());
    for (index, uav) in doc.uavs.iter().enumerate() {
        let location = parse_field(format!("uavs[{index}].location"), &uav.location)?;
        let direction = Direction::from_sign(uav.direction).ok_or(ScenarioError::BadDirection {
            index,
            value: uav.direction,
        })?;
        uavs.push(UavState::new(index, location, direction));
    }
    let declared = usize::try_from(doc.n).unwrap_or(usize::MAX);
    let ensemble = Ensemble::with_count(perimeter, declared, uavs)?;
    Ok(Scenario { ensemble })
}

fn to_doc(ens: &Ensemble) -> ScenarioDoc {
    ScenarioDoc {
        perimeter: ens.perimeter().to_string(),
        n: ens.count() as u64,
        uavs: ens
            .uavs()
            .iter()
            .map(|u| UavDoc {
                location: u.location.to_string(),
                direction: u.direction.sign(),
            })
            .collect(),
    }
}

/// Serializes an ensemble as a scenario document.
pub fn emit_scenario(ens: &Ensemble) -> String {
    serde_json::to_string(&to_doc(ens)).expect("scenario serialization cannot fail")
}

pub fn scenario_value(ens: &Ensemble) -> serde_json::Value {
    serde_json::to_value(to_doc(ens)).expect("scenario serialization cannot fail")
}
