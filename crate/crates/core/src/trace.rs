//! CSV trace rows: `time,uav,location,direction,event`.

use std::io::{Read, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ensemble::{Direction, Ensemble};
use crate::scalar::Scalar;

pub const TRACE_HEADER: &str = "time,uav,location,direction,event";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: Scalar,
    pub uav: usize,
    pub location: Scalar,
    pub direction: Direction,
    #[serde(serialize_with = "flag_out", deserialize_with = "flag_in")]
    pub event: bool,
}

fn flag_out<S: Serializer>(flag: &bool, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_u8(u8::from(*flag))
}

fn flag_in<'de, D: Deserializer<'de>>(deserializer: D) -> Result<bool, D::Error> {
    match u8::deserialize(deserializer)? {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(serde::de::Error::custom(format!("event flag must be 0 or 1, got {other}"))),
    }
}

/// One row per UAV at time `t`; `flagged` lists the UAVs whose event flag is set.
pub fn rows_for(t: &Scalar, ens: &Ensemble, flagged: &[usize]) -> Vec<TraceRecord> {
    ens.uavs()
        .iter()
        .map(|u| TraceRecord {
            time: t.clone(),
            uav: u.id,
            location: u.location.clone(),
            direction: u.direction,
            event: flagged.contains(&u.id),
        })
        .collect()
}

pub fn write_trace<W: Write>(records: &[TraceRecord], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    if records.is_empty() {
        writer.write_record(TRACE_HEADER.split(','))?;
    }
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> csv::Result<Vec<TraceRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
