//! Report emission.
//!
//! Reports are JSON objects with sorted keys, so identical payloads are
//! byte-identical. Wall-clock time is confined to the single top-level
//! `timestamp_unix` field; everything else is a pure function of inputs
//! and seeds.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use super::HarnessError;

pub fn write_report(
    out_dir: &Path,
    command: &str,
    seed: Option<u64>,
    payload: impl Serialize,
) -> Result<(), HarnessError> {
    let mut root = serde_json::Map::new();
    root.insert("command".into(), Value::from(command));
    if let Some(seed) = seed {
        root.insert("seed".into(), Value::from(seed));
    }
    root.insert(
        "timestamp_unix".into(),
        Value::from(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        ),
    );
    root.insert(
        "report".into(),
        serde_json::to_value(payload).expect("report payloads serialize"),
    );
    let path = out_dir.join("report.json");
    let text = serde_json::to_string_pretty(&Value::Object(root)).expect("valid JSON value");
    std::fs::write(&path, text + "\n").map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}
