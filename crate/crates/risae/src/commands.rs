//! The five subcommands, plus the parallel evaluation helpers they share.

use std::path::{Path, PathBuf};

use risae_core::autoencoder::{train, BeamPolicy, BeamRanking, EndToEndModel, SerEvaluator};
use risae_core::baseline::{
    chunk_count, direct_link_ser, qpsk_awgn_chunk, qpsk_awgn_ser_analytic, ErrorCount,
};
use risae_core::ris::build_codebook;

use crate::checkpoint;
use crate::config::ExperimentConfig;
use crate::error::{io_error, Result};
use crate::gains::gain_db;
use crate::output::{self, GainRow, SerRow};
use crate::parallel::run_chunks;

pub const CODEBOOK_FILE: &str = "codebook.csv";
pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const LOSS_FILE: &str = "loss.csv";
pub const SER_FILE: &str = "ser.csv";
pub const BASELINE_FILE: &str = "baseline.csv";
pub const GAINS_FILE: &str = "gains.csv";

pub const SCHEME_BEST: &str = "ris_ae_best";
pub const SCHEME_ANALYTIC: &str = "qpsk_awgn_analytic";
pub const SCHEME_MONTE_CARLO: &str = "qpsk_awgn_monte_carlo";

pub fn top_k_scheme(k: usize) -> String {
    format!("ris_ae_top{k}")
}

pub fn direct_scheme(l_o_db: f64) -> String {
    format!("direct_qpsk_lo{l_o_db}")
}

fn ensure_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(io_error(out))
}

/// Writes the codebook table to `<out>/codebook.csv`.
pub fn cmd_codebook(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    ensure_dir(out)?;
    let s = cfg.scenario();
    let g = &s.geometry;
    let cb = build_codebook(g, g.incident_azimuth_deg, s.codebook_min_deg, s.codebook_max_deg, s.codebook_size)?;
    let path = out.join(CODEBOOK_FILE);
    output::write_codebook(&path, &cb)?;
    Ok(path)
}

/// Trains a model, saving `<out>/model.ckpt` and `<out>/loss.csv`.
pub fn cmd_train(cfg: &ExperimentConfig, out: &Path) -> Result<EndToEndModel> {
    ensure_dir(out)?;
    let (model, history) = train(&cfg.scenario(), &cfg.train_config())?;
    checkpoint::save(&model, &out.join(CHECKPOINT_FILE))?;
    output::write_losses(&out.join(LOSS_FILE), &history)?;
    Ok(model)
}

/// Symbol errors of `policy` over `n_symbols`, split across `workers`.
pub fn evaluate_parallel(ev: &SerEvaluator<'_>, policy: BeamPolicy, n_symbols: u64, seed: u64, workers: usize) -> Result<ErrorCount> {
    ev.run_chunk(policy, n_symbols, 0, seed)?;
    Ok(run_chunks(chunk_count(n_symbols), workers, |c| {
        ev.run_chunk(policy, n_symbols, c, seed).expect("policy validated")
    }))
}

/// Evaluator at `snr_db` whose top-K order follows `ranking`, with
/// per-codeword probes run in parallel.
pub fn ranked_evaluator<'a>(
    model: &'a EndToEndModel,
    snr_db: f64,
    ranking: BeamRanking,
    seed: u64,
    workers: usize,
) -> Result<SerEvaluator<'a>> {
    let mut ev = SerEvaluator::new(model, snr_db)?;
    if let BeamRanking::MeasuredSer { probe_symbols } = ranking {
        let p = model.codebook().len() as u64;
        let per_beam = chunk_count(probe_symbols);
        let counts: Vec<ErrorCount> = (0..p)
            .map(|b| run_chunks(per_beam, workers, |c| ev.probe_chunk(b as usize, probe_symbols, c, seed)))
            .collect();
        ev.set_measured_ranking(&counts)?;
    }
    Ok(ev)
}

/// All sweep curves for a trained model.
pub fn sweep_rows(model: &EndToEndModel, cfg: &ExperimentConfig, workers: usize) -> Result<Vec<SerRow>> {
    let grid = cfg.sweep.grid();
    let n = cfg.sweep.n_symbols;
    let mut best = Vec::new();
    let mut top: Vec<Vec<SerRow>> = vec![Vec::new(); cfg.top_k.len()];
    for &snr in &grid {
        let ev = ranked_evaluator(model, snr, cfg.ranking(), cfg.seed, workers)?;
        let count = evaluate_parallel(&ev, BeamPolicy::Best, n, cfg.seed, workers)?;
        best.push(ser_row(SCHEME_BEST, snr, count));
        for (rows, &k) in top.iter_mut().zip(&cfg.top_k) {
            let count = evaluate_parallel(&ev, BeamPolicy::TopK(k), n, cfg.seed, workers)?;
            rows.push(ser_row(&top_k_scheme(k), snr, count));
        }
    }
    let mut rows = best;
    rows.extend(top.into_iter().flatten());
    for &l in &cfg.obstruction_losses_db {
        for &snr in &grid {
            rows.push(analytic_row(&direct_scheme(l), snr, direct_link_ser(snr, l)?));
        }
    }
    for &snr in &grid {
        rows.push(analytic_row(SCHEME_ANALYTIC, snr, qpsk_awgn_ser_analytic(snr)));
    }
    Ok(rows)
}

fn ser_row(scheme: &str, snr_db: f64, c: ErrorCount) -> SerRow {
    SerRow {
        scheme: scheme.to_string(),
        snr_db,
        ser: c.ser(),
        n_symbols: c.symbols,
        n_errors: c.errors,
    }
}

fn analytic_row(scheme: &str, snr_db: f64, ser: f64) -> SerRow {
    SerRow {
        scheme: scheme.to_string(),
        snr_db,
        ser,
        n_symbols: 0,
        n_errors: 0,
    }
}

/// Evaluates `<out>/model.ckpt` over the sweep grid into `<out>/ser.csv`.
pub fn cmd_sweep(cfg: &ExperimentConfig, out: &Path, workers: usize) -> Result<PathBuf> {
    let model = checkpoint::load(&out.join(CHECKPOINT_FILE))?;
    let rows = sweep_rows(&model, cfg, workers)?;
    let path = out.join(SER_FILE);
    output::write_ser(&path, &rows)?;
    Ok(path)
}

/// Analytic and Monte Carlo QPSK/AWGN curves into `<out>/baseline.csv`.
pub fn cmd_baseline(cfg: &ExperimentConfig, out: &Path, workers: usize) -> Result<PathBuf> {
    ensure_dir(out)?;
    let grid = cfg.sweep.grid();
    let n = cfg.sweep.n_symbols;
    let mut rows: Vec<SerRow> = grid
        .iter()
        .map(|&snr| analytic_row(SCHEME_ANALYTIC, snr, qpsk_awgn_ser_analytic(snr)))
        .collect();
    for &snr in &grid {
        let c = run_chunks(chunk_count(n), workers, |c| qpsk_awgn_chunk(snr, n, c, cfg.seed));
        rows.push(ser_row(SCHEME_MONTE_CARLO, snr, c));
    }
    let path = out.join(BASELINE_FILE);
    output::write_ser(&path, &rows)?;
    Ok(path)
}

fn curve(rows: &[SerRow], scheme: &str) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.scheme == scheme)
        .map(|r| (r.snr_db, r.ser))
        .collect()
}

/// Gain of the best-beam RIS curve over each direct-link curve at each
/// target SER.
pub fn gain_table(rows: &[SerRow], targets: &[f64], losses: &[f64]) -> Vec<GainRow> {
    let ris = curve(rows, SCHEME_BEST);
    let mut out = Vec::new();
    for &target in targets {
        for &l in losses {
            let direct = curve(rows, &direct_scheme(l));
            out.push(GainRow {
                target_ser: target,
                l_o_db: l,
                gain_db: gain_db(&ris, &direct, target),
            });
        }
    }
    out
}

/// Reads an SER table (default `<out>/ser.csv`) and writes `<out>/gains.csv`.
pub fn cmd_gains(cfg: &ExperimentConfig, ser_csv: Option<&Path>, out: &Path) -> Result<PathBuf> {
    ensure_dir(out)?;
    let default = out.join(SER_FILE);
    let rows = output::read_ser(ser_csv.unwrap_or(&default))?;
    let table = gain_table(&rows, &cfg.gain_targets, &cfg.obstruction_losses_db);
    let path = out.join(GAINS_FILE);
    output::write_gains(&path, &table)?;
    Ok(path)
}
