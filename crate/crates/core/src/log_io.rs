//! Trial-log CSV reading and writing.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::trial::Trial;

pub const LOG_HEADER: [&str; 13] = [
    "participant_id",
    "technique",
    "posture",
    "block",
    "trial_index",
    "width_m",
    "distance_m",
    "height_m",
    "angle_deg",
    "movement_time_s",
    "endpoint_deviation_m",
    "error_attempts",
    "success",
];

/// Writes the header and one row per trial. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_log<W: Write>(writer: W, trials: &[Trial]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(LOG_HEADER).map_err(io_err)?;
    for t in trials {
        w.serialize(t).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_log_string(trials: &[Trial]) -> Result<String> {
    let mut buf = Vec::new();
    write_log(&mut buf, trials)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Parses a log. Errors carry the 1-based file line of the first bad row.
pub fn read_log<R: Read>(reader: R) -> Result<Vec<Trial>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = r.headers().map_err(|e| Error::MalformedLog {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(LOG_HEADER.iter().copied()) {
        return Err(Error::MalformedLog {
            line: 1,
            message: format!("header must be exactly '{}'", LOG_HEADER.join(",")),
        });
    }
    let mut trials = Vec::new();
    for (i, row) in r.deserialize::<Trial>().enumerate() {
        let trial = row.map_err(|e| Error::MalformedLog {
            line: e.position().map_or(i + 2, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        trials.push(trial);
    }
    Ok(trials)
}

pub fn read_log_str(text: &str) -> Result<Vec<Trial>> {
    read_log(text.as_bytes())
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
