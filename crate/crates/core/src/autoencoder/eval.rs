use alloc::vec;
use alloc::vec::Vec;

use super::chain::draw_noise;
use super::config::{BeamPolicy, BeamRanking, SelectorMode};
use super::model::EndToEndModel;
use crate::baseline::{chunk_count, chunk_len, ErrorCount};
use crate::error::{check_len, invalid, Result};
use crate::neural::Matrix;
use crate::numerics::{RngStream, C64};

const TAG_MESSAGES: u64 = 0;
const TAG_BEAMS: u64 = 1;
const TAG_NOISE: u64 = 2;

/// Stream id for `tag` in `chunk`; `prefix` 0 is the evaluation run and
/// `beam + 1` the per-codeword probe runs. The top bit keeps these apart
/// from the training streams of the same seed.
fn stream_id(prefix: u64, chunk: u64, tag: u64) -> u64 {
    (1 << 63) | (prefix << 40) | (chunk << 8) | tag
}

/// Monte Carlo symbol-error-rate measurement of a trained model at one SNR.
///
/// Each symbol sends one constellation point (the encoder output for all
/// `2^k` messages, normalized as one batch). Work is split into chunks of
/// [`crate::baseline::CHUNK_SYMBOLS`] with independent random streams, so
/// merged counts do not depend on how chunks are scheduled.
///
/// Messages and noise come from streams that do not depend on the beam
/// policy, so different policies at the same seed see the same draws.
#[derive(Debug, Clone)]
pub struct SerEvaluator<'a> {
    model: &'a EndToEndModel,
    sigma_sq: f64,
    constellation: Vec<C64>,
    selected: Vec<usize>,
    ranking: Vec<usize>,
}

impl<'a> SerEvaluator<'a> {
    /// Evaluator at `snr_db` with top-K draws over the gain ranking.
    pub fn new(model: &'a EndToEndModel, snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(invalid("snr_db", "must be finite"));
        }
        let constellation = model.constellation()?;
        let selected = if model.selector_mode() == SelectorMode::OracleOnly {
            vec![model.oracle_beam(); constellation.len()]
        } else {
            model
                .selector()
                .predict(&model.selector_input_batch(&constellation))?
                .argmax_rows()
        };
        Ok(Self {
            model,
            sigma_sq: model.calibrate_snr(snr_db),
            constellation,
            selected,
            ranking: model.gain_ranking().to_vec(),
        })
    }

    /// Evaluator whose top-K ranking follows `ranking`.
    pub fn with_ranking(model: &'a EndToEndModel, snr_db: f64, ranking: BeamRanking, seed: u64) -> Result<Self> {
        let mut ev = Self::new(model, snr_db)?;
        if let BeamRanking::MeasuredSer { probe_symbols } = ranking {
            if probe_symbols == 0 {
                return Err(invalid("probe_symbols", "must be at least 1"));
            }
            let counts: Vec<ErrorCount> = (0..model.codebook().len())
                .map(|b| {
                    (0..chunk_count(probe_symbols))
                        .map(|c| ev.probe_chunk(b, probe_symbols, c, seed))
                        .fold(ErrorCount::default(), ErrorCount::merge)
                })
                .collect();
            ev.set_measured_ranking(&counts)?;
        }
        Ok(ev)
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn constellation(&self) -> &[C64] {
        &self.constellation
    }

    /// Codeword the selector picks for each message.
    pub fn selected_beams(&self) -> &[usize] {
        &self.selected
    }

    /// Codebook indices in top-K order.
    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// Orders the codebook by ascending probe error count, keeping gain
    /// order among ties. The oracle beam stays first so that `TopK(1)`
    /// coincides with the best-beam policy.
    pub fn set_measured_ranking(&mut self, counts: &[ErrorCount]) -> Result<()> {
        check_len(self.model.codebook().len(), counts.len())?;
        let best = self.model.oracle_beam();
        let mut rest: Vec<usize> = self
            .model
            .gain_ranking()
            .iter()
            .copied()
            .filter(|&b| b != best)
            .collect();
        rest.sort_by(|&a, &b| counts[a].ser().partial_cmp(&counts[b].ser()).expect("finite SER"));
        self.ranking = vec![best];
        self.ranking.extend(rest);
        Ok(())
    }

    /// Errors on one chunk of the run with `n_symbols` total symbols.
    pub fn run_chunk(&self, policy: BeamPolicy, n_symbols: u64, chunk: u64, seed: u64) -> Result<ErrorCount> {
        policy.validate(self.model.codebook().len())?;
        Ok(self.count(policy, n_symbols, chunk, seed, 0))
    }

    /// Errors on one chunk of a probe run that always uses codeword `beam`.
    pub fn probe_chunk(&self, beam: usize, n_symbols: u64, chunk: u64, seed: u64) -> ErrorCount {
        self.count(BeamPolicy::Fixed(beam), n_symbols, chunk, seed, beam as u64 + 1)
    }

    fn count(&self, policy: BeamPolicy, n_symbols: u64, chunk: u64, seed: u64, prefix: u64) -> ErrorCount {
        let len = chunk_len(n_symbols, chunk);
        if len == 0 {
            return ErrorCount::default();
        }
        let classes = self.constellation.len();
        let mut msg_rng = RngStream::new(seed, stream_id(prefix, chunk, TAG_MESSAGES));
        let mut beam_rng = RngStream::new(seed, stream_id(prefix, chunk, TAG_BEAMS));
        let mut noise_rng = RngStream::new(seed, stream_id(prefix, chunk, TAG_NOISE));
        let labels: Vec<usize> = (0..len).map(|_| msg_rng.uniform_index(classes)).collect();
        let p = self.ranking.len();
        let beams: Vec<usize> = match policy {
            BeamPolicy::Best => labels.iter().map(|&l| self.selected[l]).collect(),
            BeamPolicy::Fixed(b) => vec![b; len],
            BeamPolicy::TopK(k) => (0..len).map(|_| self.ranking[beam_rng.uniform_index(k)]).collect(),
            BeamPolicy::UniformRandom => (0..len).map(|_| self.ranking[beam_rng.uniform_index(p)]).collect(),
        };
        let noise = draw_noise(&mut noise_rng, len, self.sigma_sq);
        let input = Matrix::from_fn(len, 2, |r, c| {
            let y = self.model.codeword_response(beams[r]) * self.constellation[labels[r]] + noise[r];
            if c == 0 {
                y.re
            } else {
                y.im
            }
        });
        let decided = self
            .model
            .decoder()
            .predict(&input)
            .expect("decoder input width is 2")
            .argmax_rows();
        let errors = decided.iter().zip(&labels).filter(|(d, l)| d != l).count();
        ErrorCount::new(errors as u64, len as u64)
    }

    /// Sequential run over all chunks.
    pub fn evaluate(&self, policy: BeamPolicy, n_symbols: u64, seed: u64) -> Result<ErrorCount> {
        if n_symbols == 0 {
            return Err(invalid("n_symbols", "must be at least 1"));
        }
        policy.validate(self.model.codebook().len())?;
        Ok((0..chunk_count(n_symbols))
            .map(|c| self.count(policy, n_symbols, c, seed, 0))
            .fold(ErrorCount::default(), ErrorCount::merge))
    }

    /// Fraction of `n_symbols` uniformly drawn messages for which the
    /// selector picks the oracle codeword.
    pub fn selector_agreement(&self, n_symbols: u64, seed: u64) -> f64 {
        let best = self.model.oracle_beam();
        let mut rng = RngStream::new(seed, stream_id(0, 0, TAG_MESSAGES));
        let hits = (0..n_symbols)
            .filter(|_| self.selected[rng.uniform_index(self.constellation.len())] == best)
            .count();
        hits as f64 / n_symbols.max(1) as f64
    }
}

/// Symbol error rate of `model` at `snr_db` under `policy`, with top-K
/// draws over the gain ranking.
pub fn evaluate_ser(
    model: &EndToEndModel,
    snr_db: f64,
    n_symbols: u64,
    policy: BeamPolicy,
    seed: u64,
) -> Result<ErrorCount> {
    SerEvaluator::new(model, snr_db)?.evaluate(policy, n_symbols, seed)
}
