use alloc::vec::Vec;

use super::chain::{draw_noise, LossParts};
use super::config::{Scenario, TrainConfig};
use super::model::EndToEndModel;
use crate::error::{Error, Result};
use crate::neural::{AdamConfig, AdamState};
use crate::numerics::{RngStream, C64};

const STREAM_INIT: u64 = 0;
const STREAM_MESSAGES: u64 = 1;
const STREAM_SNR: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// Loss values of one training iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRecord {
    pub iteration: usize,
    pub total: f64,
    pub symbol: f64,
    pub beam: f64,
}

/// Passed to a training observer after each iteration, before the
/// parameter update.
#[derive(Debug)]
pub struct IterationReport<'a> {
    pub iteration: usize,
    pub loss: LossParts,
    /// The power-normalized symbols sent in this batch.
    pub x: &'a [C64],
}

/// Trains a fresh model for `scenario`. Deterministic for a fixed
/// `config.seed`.
pub fn train(scenario: &Scenario, config: &TrainConfig) -> Result<(EndToEndModel, Vec<LossRecord>)> {
    train_with_observer(scenario, config, |_| {})
}

/// [`train`] with a callback invoked once per iteration.
pub fn train_with_observer(
    scenario: &Scenario,
    config: &TrainConfig,
    observer: impl FnMut(&IterationReport<'_>),
) -> Result<(EndToEndModel, Vec<LossRecord>)> {
    config.validate()?;
    let mut init = RngStream::new(config.seed, STREAM_INIT);
    let mut model = EndToEndModel::initialize(scenario, config.selector_mode, &mut init)?;
    let history = train_from(&mut model, config, observer)?;
    Ok((model, history))
}

/// Continues training `model` in place with `config`.
pub fn train_from(
    model: &mut EndToEndModel,
    config: &TrainConfig,
    mut observer: impl FnMut(&IterationReport<'_>),
) -> Result<Vec<LossRecord>> {
    config.validate()?;
    let adam = AdamConfig {
        learning_rate: config.learning_rate,
        schedule: config.lr_schedule,
        ..AdamConfig::default()
    };
    let mut enc_opt = AdamState::new(model.encoder(), adam)?;
    let mut sel_opt = AdamState::new(model.selector(), adam)?;
    let mut dec_opt = AdamState::new(model.decoder(), adam)?;
    let mut msg_rng = RngStream::new(config.seed, STREAM_MESSAGES);
    let mut snr_rng = RngStream::new(config.seed, STREAM_SNR);
    let mut noise_rng = RngStream::new(config.seed, STREAM_NOISE);
    let (lo, hi) = config.train_snr_range_db;
    let m = config.batch_size;
    let classes = model.message_count();
    let train_selector = model.selector_mode() != super::SelectorMode::OracleOnly || config.beam_loss_weight > 0.0;
    let mut history = Vec::with_capacity(config.iterations);
    let mut labels = Vec::with_capacity(m);
    let mut noise = Vec::with_capacity(m);

    for iteration in 0..config.iterations {
        labels.clear();
        labels.extend((0..m).map(|_| msg_rng.uniform_index(classes)));
        noise.clear();
        for _ in 0..m {
            let sigma_sq = model.calibrate_snr(snr_rng.uniform_range(lo, hi));
            noise.extend(draw_noise(&mut noise_rng, 1, sigma_sq));
        }
        let (loss, grads, out) =
            model.loss_and_gradients(&labels, &noise, model.selector_mode(), config.beam_loss_weight)?;
        if !loss.total.is_finite() || !grads.is_finite() {
            return Err(Error::Divergence { iteration });
        }
        observer(&IterationReport {
            iteration,
            loss,
            x: &out.x,
        });
        history.push(LossRecord {
            iteration,
            total: loss.total,
            symbol: loss.symbol,
            beam: loss.beam,
        });
        let (enc, sel, dec) = model.networks_mut();
        enc_opt.step(enc, &grads.encoder)?;
        if train_selector {
            sel_opt.step(sel, &grads.selector)?;
        }
        dec_opt.step(dec, &grads.decoder)?;
    }
    Ok(history)
}
