//! CSV tables written and read by the commands.

use std::path::Path;

use risae_core::ris::Codebook;
use risae_core::autoencoder::LossRecord;
use serde::Deserialize;

use crate::error::{io_error, Result};

/// One point of an SER-versus-SNR curve. Analytic curves carry zero counts.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SerRow {
    pub scheme: String,
    pub snr_db: f64,
    pub ser: f64,
    pub n_symbols: u64,
    pub n_errors: u64,
}

/// One entry of the gain table; `gain_db` is `None` when either curve
/// does not reach the target.
#[derive(Debug, Clone, PartialEq)]
pub struct GainRow {
    pub target_ser: f64,
    pub l_o_db: f64,
    pub gain_db: Option<f64>,
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(io_error(path))?;
    Ok(csv::Writer::from_writer(file))
}

/// `index,angle_deg,e0,…,e{N−1}` with elements written as `1`/`-1`.
pub fn write_codebook(path: &Path, codebook: &Codebook) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["index".to_string(), "angle_deg".to_string()];
    header.extend((0..codebook.n_elements()).map(|n| format!("e{n}")));
    w.write_record(&header)?;
    for (i, (cw, angle)) in codebook.codewords().iter().zip(codebook.target_angles_deg()).enumerate() {
        let mut row = vec![i.to_string(), angle.to_string()];
        row.extend(cw.elements().iter().map(|&e| if e > 0.0 { "1" } else { "-1" }.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(io_error(path))
}

/// `iteration,total_loss,symbol_loss,beam_loss`.
pub fn write_losses(path: &Path, history: &[LossRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["iteration", "total_loss", "symbol_loss", "beam_loss"])?;
    for r in history {
        w.write_record([
            r.iteration.to_string(),
            format!("{:e}", r.total),
            format!("{:e}", r.symbol),
            format!("{:e}", r.beam),
        ])?;
    }
    w.flush().map_err(io_error(path))
}

/// `scheme,snr_db,ser,n_symbols,n_errors`.
pub fn write_ser(path: &Path, rows: &[SerRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["scheme", "snr_db", "ser", "n_symbols", "n_errors"])?;
    for r in rows {
        w.write_record([
            r.scheme.clone(),
            r.snr_db.to_string(),
            format!("{:e}", r.ser),
            r.n_symbols.to_string(),
            r.n_errors.to_string(),
        ])?;
    }
    w.flush().map_err(io_error(path))
}

pub fn read_ser(path: &Path) -> Result<Vec<SerRow>> {
    let file = std::fs::File::open(path).map_err(io_error(path))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .map(|r| r.map_err(Into::into))
        .collect()
}

/// `target_ser,l_o_db,gain_db` with `NA` for unavailable gains.
pub fn write_gains(path: &Path, rows: &[GainRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["target_ser", "l_o_db", "gain_db"])?;
    for r in rows {
        w.write_record([
            format!("{:e}", r.target_ser),
            r.l_o_db.to_string(),
            r.gain_db.map_or_else(|| "NA".to_string(), |g| g.to_string()),
        ])?;
    }
    w.flush().map_err(io_error(path))
}
