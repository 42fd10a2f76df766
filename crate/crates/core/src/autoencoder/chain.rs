use alloc::vec;
use alloc::vec::Vec;

use super::config::{BeamPolicy, Message, SelectorMode};
use super::model::{interleaved_to_complex, EndToEndModel};
use crate::error::{check_len, invalid, Result};
use crate::neural::{
    cross_entropy, power_normalize, power_normalize_backward, softmax_backward,
    softmax_cross_entropy_grad, ForwardCache, Matrix, MlpGrads,
};
use crate::numerics::{RngStream, C64};

/// Loss of one mini-batch: `total = symbol + λ · beam`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    pub total: f64,
    /// Cross-entropy of the decoder output against the sent messages.
    pub symbol: f64,
    /// Cross-entropy of the selector output against the oracle beam
    /// (zero when the selector is not run).
    pub beam: f64,
}

/// Parameter gradients of the total loss for all three networks.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainGrads {
    pub encoder: MlpGrads,
    pub selector: MlpGrads,
    pub decoder: MlpGrads,
}

impl ChainGrads {
    pub fn is_finite(&self) -> bool {
        self.encoder.is_finite() && self.selector.is_finite() && self.decoder.is_finite()
    }

    /// All gradients in the flattened parameter order encoder, selector,
    /// decoder.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.encoder.flatten();
        v.extend(self.selector.flatten());
        v.extend(self.decoder.flatten());
        v
    }
}

/// Everything produced by one pass through the link.
#[derive(Debug, Clone)]
pub struct ChainOutput {
    /// Decoder softmax output, one row per symbol.
    pub decoder_probs: Matrix,
    /// Codeword index used (or, for a soft mixture, the heaviest one).
    pub hard_beams: Vec<usize>,
    /// Power-normalized transmitted symbols.
    pub x: Vec<C64>,
    /// Selector softmax output when the selector ran.
    pub selector_weights: Option<Matrix>,
    /// Received samples including noise.
    pub y: Vec<C64>,
}

impl ChainOutput {
    pub fn decisions(&self) -> Vec<usize> {
        self.decoder_probs.argmax_rows()
    }
}

struct Tape {
    labels: Vec<usize>,
    enc_cache: ForwardCache,
    pn_cache: crate::neural::PowerNormCache,
    x: Vec<C64>,
    sel_cache: Option<ForwardCache>,
    hard: Vec<usize>,
    c_eff: Vec<C64>,
    y: Vec<C64>,
    dec_cache: ForwardCache,
}

fn soft_responses(weights: &Matrix, responses: &[C64]) -> Vec<C64> {
    (0..weights.rows())
        .map(|r| {
            weights
                .row(r)
                .iter()
                .zip(responses)
                .map(|(&w, &c)| c * w)
                .sum()
        })
        .collect()
}

fn decoder_input(y: &[C64]) -> Matrix {
    Matrix::from_fn(y.len(), 2, |r, c| if c == 0 { y[r].re } else { y[r].im })
}

impl EndToEndModel {
    fn run_tape(&self, labels: &[usize], noise: &[C64], mode: SelectorMode, run_selector: bool) -> Result<Tape> {
        if labels.len() < 2 {
            return Err(invalid("batch", "power normalization needs at least two symbols"));
        }
        check_len(labels.len(), noise.len())?;
        self.check_labels(labels)?;
        let enc_cache = self.encoder().forward(&self.encoder_input(labels))?;
        let (x, pn_cache) = power_normalize(&interleaved_to_complex(enc_cache.output()))?;

        let sel_cache = if run_selector {
            Some(self.selector().forward(&self.selector_input_batch(&x))?)
        } else {
            None
        };
        let responses = self.codeword_responses();
        let (hard, c_eff) = match (mode, &sel_cache) {
            (SelectorMode::OracleOnly, _) | (_, None) => {
                let b = self.oracle_beam();
                (vec![b; x.len()], vec![responses[b]; x.len()])
            }
            (SelectorMode::Soft, Some(cache)) => {
                let w = cache.output();
                (w.argmax_rows(), soft_responses(w, responses))
            }
            (SelectorMode::HardStraightThrough, Some(cache)) => {
                let hard = cache.output().argmax_rows();
                let c = hard.iter().map(|&b| responses[b]).collect();
                (hard, c)
            }
        };
        let y: Vec<C64> = x
            .iter()
            .zip(&c_eff)
            .zip(noise)
            .map(|((&x, &c), &n)| c * x + n)
            .collect();
        let dec_cache = self.decoder().forward(&decoder_input(&y))?;
        Ok(Tape {
            labels: labels.to_vec(),
            enc_cache,
            pn_cache,
            x,
            sel_cache,
            hard,
            c_eff,
            y,
            dec_cache,
        })
    }

    fn tape_loss(&self, tape: &Tape, beam_loss_weight: f64) -> Result<LossParts> {
        let symbol = cross_entropy(tape.dec_cache.output(), &tape.labels)?;
        let beam = match &tape.sel_cache {
            Some(cache) => {
                let oracle = vec![self.oracle_beam(); tape.labels.len()];
                cross_entropy(cache.output(), &oracle)?
            }
            None => 0.0,
        };
        Ok(LossParts {
            total: symbol + beam_loss_weight * beam,
            symbol,
            beam,
        })
    }

    fn tape_backward(&self, tape: &Tape, mode: SelectorMode, beam_loss_weight: f64) -> Result<ChainGrads> {
        let m = tape.labels.len();
        let d_dec = softmax_cross_entropy_grad(tape.dec_cache.output(), &tape.labels)?;
        let dec = self.decoder().backward_from_logits(&tape.dec_cache, &d_dec)?;
        // ∂L/∂y as a complex number (∂/∂Re + j ∂/∂Im).
        let g: Vec<C64> = (0..m)
            .map(|r| C64::new(dec.input_grad.get(r, 0), dec.input_grad.get(r, 1)))
            .collect();
        let mut dx: Vec<C64> = g.iter().zip(&tape.c_eff).map(|(g, c)| c.conj() * g).collect();

        let selector = match &tape.sel_cache {
            Some(cache) => {
                let w = cache.output();
                let p = w.cols();
                let mut d_logits = if mode == SelectorMode::OracleOnly {
                    Matrix::zeros(m, p)
                } else {
                    let responses = self.codeword_responses();
                    let d_w = Matrix::from_fn(m, p, |r, q| (g[r].conj() * tape.x[r] * responses[q]).re);
                    softmax_backward(w, &d_w)?
                };
                if beam_loss_weight > 0.0 {
                    let oracle = vec![self.oracle_beam(); m];
                    let d_beam = softmax_cross_entropy_grad(w, &oracle)?;
                    for (a, b) in d_logits.data_mut().iter_mut().zip(d_beam.data()) {
                        *a += beam_loss_weight * b;
                    }
                }
                let sel = self.selector().backward_from_logits(cache, &d_logits)?;
                for (r, d) in dx.iter_mut().enumerate() {
                    *d += C64::new(sel.input_grad.get(r, 0), sel.input_grad.get(r, 1));
                }
                sel.grads
            }
            None => MlpGrads::zeros_like(self.selector()),
        };

        let dx_raw = power_normalize_backward(&dx, &tape.pn_cache)?;
        let d_enc = Matrix::from_fn(m, 2, |r, c| if c == 0 { dx_raw[r].re } else { dx_raw[r].im });
        let enc = self.encoder().backward(&tape.enc_cache, &d_enc)?;
        Ok(ChainGrads {
            encoder: enc.grads,
            selector,
            decoder: dec.grads,
        })
    }

    fn selector_runs(mode: SelectorMode, beam_loss_weight: f64) -> bool {
        mode != SelectorMode::OracleOnly || beam_loss_weight > 0.0
    }

    /// Training loss for message indices `labels` with an explicit noise
    /// draw (already scaled to each example's variance).
    pub fn loss(&self, labels: &[usize], noise: &[C64], mode: SelectorMode, beam_loss_weight: f64) -> Result<LossParts> {
        let tape = self.run_tape(labels, noise, mode, Self::selector_runs(mode, beam_loss_weight))?;
        self.tape_loss(&tape, beam_loss_weight)
    }

    /// Training loss and its gradients with respect to every parameter.
    ///
    /// In `HardStraightThrough` mode the forward pass uses the argmax codeword
    /// while the backward pass uses the soft-mixture gradient. In
    /// `OracleOnly` mode the reflection ignores the selector, which then only
    /// learns from the beam loss.
    pub fn loss_and_gradients(
        &self,
        labels: &[usize],
        noise: &[C64],
        mode: SelectorMode,
        beam_loss_weight: f64,
    ) -> Result<(LossParts, ChainGrads, ChainOutput)> {
        let tape = self.run_tape(labels, noise, mode, Self::selector_runs(mode, beam_loss_weight))?;
        let loss = self.tape_loss(&tape, beam_loss_weight)?;
        let grads = self.tape_backward(&tape, mode, beam_loss_weight)?;
        Ok((loss, grads, tape.into_output()))
    }

    /// Sends `messages` through the link with AWGN of variance `sigma_sq`.
    ///
    /// With `training = Some(mode)` the reflection follows the training
    /// rule for `mode` and `policy` is ignored. With `None` the RIS applies
    /// one hard codeword per symbol chosen by `policy`, with top-K draws
    /// taken over the gain ranking.
    pub fn forward_chain(
        &self,
        messages: &[Message],
        sigma_sq: f64,
        rng: &mut RngStream,
        policy: BeamPolicy,
        training: Option<SelectorMode>,
    ) -> Result<ChainOutput> {
        if !(sigma_sq >= 0.0) || !sigma_sq.is_finite() {
            return Err(invalid("sigma_sq", "noise variance must be finite and non-negative"));
        }
        let labels: Vec<usize> = messages.iter().map(|m| m.index()).collect();
        match training {
            Some(mode) => {
                let noise = draw_noise(rng, labels.len(), sigma_sq);
                let run = mode != SelectorMode::OracleOnly;
                Ok(self.run_tape(&labels, &noise, mode, run)?.into_output())
            }
            None => {
                policy.validate(self.codebook().len())?;
                let x = self.encode(messages)?;
                let beams = self.policy_beams(&x, policy, self.gain_ranking(), rng)?;
                let noise = draw_noise(rng, labels.len(), sigma_sq);
                let y: Vec<C64> = x
                    .iter()
                    .zip(&beams)
                    .zip(&noise)
                    .map(|((&x, &b), &n)| self.codeword_response(b) * x + n)
                    .collect();
                let decoder_probs = self.decoder().predict(&decoder_input(&y))?;
                Ok(ChainOutput {
                    decoder_probs,
                    hard_beams: beams,
                    x,
                    selector_weights: None,
                    y,
                })
            }
        }
    }

    /// Hard codeword per symbol under `policy`; `ranking` orders the codebook
    /// for top-K draws.
    pub(crate) fn policy_beams(
        &self,
        x: &[C64],
        policy: BeamPolicy,
        ranking: &[usize],
        rng: &mut RngStream,
    ) -> Result<Vec<usize>> {
        let p = self.codebook().len();
        Ok(match policy {
            BeamPolicy::Best => {
                if self.selector_mode() == SelectorMode::OracleOnly {
                    vec![self.oracle_beam(); x.len()]
                } else {
                    self.selector().predict(&self.selector_input_batch(x))?.argmax_rows()
                }
            }
            BeamPolicy::Fixed(b) => vec![b; x.len()],
            BeamPolicy::TopK(k) => (0..x.len()).map(|_| ranking[rng.uniform_index(k)]).collect(),
            BeamPolicy::UniformRandom => (0..x.len()).map(|_| ranking[rng.uniform_index(p)]).collect(),
        })
    }
}

impl Tape {
    fn into_output(self) -> ChainOutput {
        ChainOutput {
            decoder_probs: self.dec_cache.into_output(),
            hard_beams: self.hard,
            x: self.x,
            selector_weights: self.sel_cache.map(ForwardCache::into_output),
            y: self.y,
        }
    }
}

pub(crate) fn draw_noise(rng: &mut RngStream, n: usize, sigma_sq: f64) -> Vec<C64> {
    (0..n).map(|_| rng.complex_normal(sigma_sq)).collect()
}
