//! Report serialisation. JSON fields follow struct declaration order, so
//! identical inputs give byte-identical output.

use serde::Serialize;

use crate::protocol::engine::TrialRecord;
use crate::{Error, Result};

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Per-trial CSV: `run,group,trial,register,branch,passed`.
pub fn trials_csv(records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::invalid(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(format!("csv: {e}")))
}
