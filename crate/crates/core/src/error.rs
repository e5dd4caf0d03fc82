use std::path::PathBuf;

use thiserror::Error;

use crate::model::{SlotId, TagId, ZoneId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown slot id {0}")]
    UnknownSlot(SlotId),
    #[error("unknown zone id {0}")]
    UnknownZone(ZoneId),
    #[error("unknown tag id {0}")]
    UnknownTag(TagId),
    #[error("slot {0} was already added to this coverage state")]
    DuplicateSlot(SlotId),
    #[error("horizon [{start}, {end}) is not divisible into slots of {slot_len} ticks")]
    HorizonNotDivisible { start: i64, end: i64, slot_len: i64 },
    #[error("{path}: line {line}: {message}")]
    Row {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: expected header `{expected}`, found `{found}`")]
    BadHeader {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("instance exceeds oracle limits: {0}")]
    LimitsExceeded(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("generated instance is invalid: {0}")]
    InvalidInstance(String),
    #[error("{method} produced an infeasible allocation (theta {theta}, seed {seed}): {detail}")]
    AuditFailed {
        method: String,
        theta: f64,
        seed: u64,
        detail: String,
    },
    #[error("unsupported snapshot `{format}` version {version}")]
    SnapshotVersion { format: String, version: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
