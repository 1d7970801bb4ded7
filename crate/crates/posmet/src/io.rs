//! CSV and JSON plumbing.

use std::io::{Read, Write};

use posmet_core::estimation::FringePoint;
use posmet_core::hardware::ShotRecord;
use serde::{Deserialize, Serialize};

use crate::error::AppError;

#[derive(Debug, Serialize, Deserialize)]
struct ShotRow {
    shot_index: u64,
    qubit_bit: u8,
    antiqubit_bit: u8,
}

pub fn write_shots_csv<W: Write>(record: &ShotRecord, w: W) -> Result<(), AppError> {
    let mut out = csv::Writer::from_writer(w);
    for (i, b) in record.outcomes.iter().enumerate() {
        out.serialize(ShotRow { shot_index: i as u64, qubit_bit: b[0], antiqubit_bit: b[1] })?;
    }
    out.flush()?;
    Ok(())
}

/// The seed is not part of the CSV and must be supplied.
pub fn read_shots_csv<R: Read>(r: R, seed: u64) -> Result<ShotRecord, AppError> {
    let mut outcomes = Vec::new();
    for (line, row) in csv::Reader::from_reader(r).deserialize::<ShotRow>().enumerate() {
        let row = row?;
        if row.shot_index != line as u64 || row.qubit_bit > 1 || row.antiqubit_bit > 1 {
            return Err(AppError::Io(format!("shot row {}: malformed", line + 1)));
        }
        outcomes.push([row.qubit_bit, row.antiqubit_bit]);
    }
    Ok(ShotRecord { seed, n_shots: outcomes.len() as u64, outcomes })
}

#[derive(Debug, Serialize, Deserialize)]
struct FringeRow {
    alpha_rad: f64,
    outcome_frequency: f64,
    shot_count: u64,
}

pub fn read_fringe_csv<R: Read>(r: R) -> Result<Vec<FringePoint>, AppError> {
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(r).deserialize::<FringeRow>() {
        let row = row?;
        out.push(FringePoint { alpha: row.alpha_rad, frequency: row.outcome_frequency, shots: row.shot_count });
    }
    Ok(out)
}

pub fn write_fringe_csv<W: Write>(data: &[FringePoint], w: W) -> Result<(), AppError> {
    let mut out = csv::Writer::from_writer(w);
    for d in data {
        out.serialize(FringeRow { alpha_rad: d.alpha, outcome_frequency: d.frequency, shot_count: d.shots })?;
    }
    out.flush()?;
    Ok(())
}

/// Header plus rows of already formatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), AppError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}
