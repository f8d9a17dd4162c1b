//! Versioned JSON envelope for everything the CLI writes.
//!
//! Complex amplitudes serialize as `[re, im]` pairs of full-precision
//! numbers, and floats print in shortest round-trip form, so reading a
//! record and writing it back reproduces the file byte for byte.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord<C, P> {
    pub schema_version: u32,
    /// The command line that produced the record, program name excluded.
    pub command: Vec<String>,
    pub config: C,
    pub payload: P,
    /// Wall-clock time; absent unless asked for, since it breaks
    /// byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl<C: Serialize + DeserializeOwned, P: Serialize + DeserializeOwned> RunRecord<C, P> {
    pub fn new(command: Vec<String>, config: C, payload: P) -> Self {
        RunRecord { schema_version: SCHEMA_VERSION, command, config, payload, timing: None }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::State(format!("serializing record: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: Self = serde_json::from_str(text).map_err(|e| Error::Argument(format!("parsing record: {e}")))?;
        if rec.schema_version != SCHEMA_VERSION {
            return Err(Error::Argument(format!(
                "record schema version {} is not the supported version {SCHEMA_VERSION}",
                rec.schema_version
            )));
        }
        Ok(rec)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::Resource(format!("writing {}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Resource(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{generic_inputs, run_protocol, OutcomePolicy, Transcript};
    use crate::ChannelKind;

    #[test]
    fn transcript_record_round_trips_byte_for_byte() {
        let t = run_protocol(&generic_inputs::<f64>(3, 5), ChannelKind::Entangled, &OutcomePolicy::Seeded(5)).unwrap();
        let rec = RunRecord::new(vec!["run".into()], serde_json::json!({"n": 3}), t);
        let text = rec.to_json().unwrap();
        let back: RunRecord<serde_json::Value, Transcript<f64>> = RunRecord::from_json(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.to_json().unwrap(), text);
        assert!(!text.contains("timing"));
    }

    #[test]
    fn wrong_version_is_rejected() {
        let rec = RunRecord::new(vec![], 0u8, 0u8);
        let text = rec.to_json().unwrap().replace("\"schema_version\": 1", "\"schema_version\": 99");
        assert!(RunRecord::<u8, u8>::from_json(&text).is_err());
    }
}
