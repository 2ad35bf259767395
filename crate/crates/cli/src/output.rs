//! Row types and CSV/JSON writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveRow {
    pub path: String,
    pub x0: f64,
    pub z0: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    pub t: f64,
    pub a0_re: f64,
    pub a0_im: f64,
    pub a1_re: f64,
    pub a1_im: f64,
    pub infidelity: f64,
    pub solver: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalRow {
    pub path: String,
    pub x0: f64,
    pub z0: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    #[serde(rename = "I_exact")]
    pub i_exact: f64,
    #[serde(rename = "I_LZ")]
    pub i_lz: Option<f64>,
    #[serde(rename = "I_APT")]
    pub i_apt: f64,
    #[serde(rename = "APT_envelope")]
    pub apt_envelope: f64,
    #[serde(rename = "T_minus")]
    pub t_minus: Option<f64>,
    #[serde(rename = "T_plus")]
    pub t_plus: Option<f64>,
    #[serde(rename = "T_c")]
    pub t_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRow {
    pub path: String,
    pub x0: f64,
    pub z0: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    pub k: usize,
    pub t_k: f64,
    #[serde(rename = "I")]
    pub infidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub x0: f64,
    pub z0: f64,
    #[serde(rename = "T_minus")]
    pub t_minus: Option<f64>,
    #[serde(rename = "T_plus")]
    pub t_plus: Option<f64>,
    #[serde(rename = "T_c")]
    pub t_c: Option<f64>,
}

pub fn open(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_rows<R: Serialize>(rows: &[R], format: Format, out: Option<&Path>) -> io::Result<()> {
    let mut w = open(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            for r in rows {
                csv.serialize(r)?;
            }
            csv.flush()?;
        }
        Format::Json => {
            serde_json::to_writer(&mut w, rows)?;
            writeln!(w)?;
        }
    }
    w.flush()
}

pub fn write_json<R: Serialize>(value: &R, out: Option<&Path>) -> io::Result<()> {
    let mut w = open(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}
