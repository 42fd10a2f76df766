use alloc::vec::Vec;

use super::config::{EncoderInput, Message, Scenario, SelectorMode};
use crate::channel::{make_channel, Channel};
use crate::error::{check_len, invalid, Error, Result};
use crate::neural::{power_normalize, Activation, Matrix, Mlp};
use crate::numerics::{db_to_linear_power, RngStream, C64};
use crate::ris::{build_codebook, cascaded_response, rank_beams, Codebook};

/// Encoder, beam selector and decoder together with the frozen channel
/// and codebook they were trained on.
#[derive(Debug, Clone)]
pub struct EndToEndModel {
    scenario: Scenario,
    selector_mode: SelectorMode,
    encoder: Mlp,
    selector: Mlp,
    decoder: Mlp,
    codebook: Codebook,
    h_tr: Channel,
    h_ri: Channel,
    kappa: f64,
    codeword_responses: Vec<C64>,
    best_beam: usize,
    gain_ranking: Vec<usize>,
}

fn encoder_input_width(scenario: &Scenario) -> usize {
    match scenario.architecture.encoder_input {
        EncoderInput::OneHot => scenario.message_count(),
        EncoderInput::Scalar => 1,
    }
}

impl EndToEndModel {
    /// Freshly initialized networks for `scenario`.
    pub fn initialize(scenario: &Scenario, selector_mode: SelectorMode, rng: &mut RngStream) -> Result<Self> {
        scenario.validate()?;
        let arch = &scenario.architecture;
        let n = scenario.geometry.n_elements;
        let encoder = Mlp::stack(encoder_input_width(scenario), &arch.encoder_hidden, 2, Activation::Linear, rng)?;
        let selector = Mlp::stack(
            2 + 2 * n,
            &arch.selector_hidden,
            scenario.codebook_size,
            Activation::Softmax,
            rng,
        )?;
        let decoder = Mlp::stack(2, &arch.decoder_hidden, scenario.message_count(), Activation::Softmax, rng)?;
        Self::from_parts(scenario.clone(), selector_mode, encoder, selector, decoder)
    }

    /// Reassembles a model from stored networks, checking every width.
    pub fn from_parts(
        scenario: Scenario,
        selector_mode: SelectorMode,
        encoder: Mlp,
        selector: Mlp,
        decoder: Mlp,
    ) -> Result<Self> {
        scenario.validate()?;
        let g = &scenario.geometry;
        check_len(encoder_input_width(&scenario), encoder.input_width())?;
        check_len(2, encoder.output_width())?;
        check_len(2 + 2 * g.n_elements, selector.input_width())?;
        check_len(scenario.codebook_size, selector.output_width())?;
        check_len(2, decoder.input_width())?;
        check_len(scenario.message_count(), decoder.output_width())?;
        let last_is = |m: &Mlp, a: Activation| m.layers().last().map(|l| l.spec().activation) == Some(a);
        if !last_is(&encoder, Activation::Linear)
            || !last_is(&selector, Activation::Softmax)
            || !last_is(&decoder, Activation::Softmax)
        {
            return Err(invalid("networks", "unexpected output activation"));
        }

        let codebook = build_codebook(
            g,
            g.incident_azimuth_deg,
            scenario.codebook_min_deg,
            scenario.codebook_max_deg,
            scenario.codebook_size,
        )?;
        let h_tr = make_channel(g, g.incident_azimuth_deg, scenario.gain_tr)?;
        let h_ri = make_channel(g, g.receiver_azimuth_deg, scenario.gain_ri)?;
        let kappa = scenario.kappa();
        let codeword_responses = codebook
            .codewords()
            .iter()
            .map(|cw| cascaded_response(&h_tr, &h_ri, cw.elements(), kappa))
            .collect::<Result<Vec<_>>>()?;
        let gain_ranking = rank_beams(&h_tr, &h_ri, &codebook, kappa)?;
        let best_beam = gain_ranking[0];
        Ok(Self {
            scenario,
            selector_mode,
            encoder,
            selector,
            decoder,
            codebook,
            h_tr,
            h_ri,
            kappa,
            codeword_responses,
            best_beam,
            gain_ranking,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn selector_mode(&self) -> SelectorMode {
        self.selector_mode
    }

    pub fn encoder(&self) -> &Mlp {
        &self.encoder
    }

    pub fn selector(&self) -> &Mlp {
        &self.selector
    }

    pub fn decoder(&self) -> &Mlp {
        &self.decoder
    }

    pub fn encoder_mut(&mut self) -> &mut Mlp {
        &mut self.encoder
    }

    pub fn selector_mut(&mut self) -> &mut Mlp {
        &mut self.selector
    }

    pub fn decoder_mut(&mut self) -> &mut Mlp {
        &mut self.decoder
    }

    pub(crate) fn networks_mut(&mut self) -> (&mut Mlp, &mut Mlp, &mut Mlp) {
        (&mut self.encoder, &mut self.selector, &mut self.decoder)
    }

    /// Parameters of all three networks, flattened in the order encoder,
    /// selector, decoder (matching [`super::ChainGrads::flatten`]).
    pub fn parameter_count(&self) -> usize {
        self.encoder.parameter_count() + self.selector.parameter_count() + self.decoder.parameter_count()
    }

    fn locate(&self, index: usize) -> (usize, usize) {
        let e = self.encoder.parameter_count();
        let s = self.selector.parameter_count();
        if index < e {
            (0, index)
        } else if index < e + s {
            (1, index - e)
        } else {
            (2, index - e - s)
        }
    }

    pub fn parameter(&self, index: usize) -> f64 {
        match self.locate(index) {
            (0, i) => self.encoder.parameter(i),
            (1, i) => self.selector.parameter(i),
            (_, i) => self.decoder.parameter(i),
        }
    }

    pub fn set_parameter(&mut self, index: usize, value: f64) {
        match self.locate(index) {
            (0, i) => self.encoder.set_parameter(i, value),
            (1, i) => self.selector.set_parameter(i, value),
            (_, i) => self.decoder.set_parameter(i, value),
        }
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn h_tr(&self) -> &Channel {
        &self.h_tr
    }

    pub fn h_ri(&self) -> &Channel {
        &self.h_ri
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn message_count(&self) -> usize {
        self.scenario.message_count()
    }

    /// Exhaustive-search best codeword for the frozen channel.
    pub fn oracle_beam(&self) -> usize {
        self.best_beam
    }

    /// Codebook indices by descending effective gain.
    pub fn gain_ranking(&self) -> &[usize] {
        &self.gain_ranking
    }

    /// End-to-end complex gain of codeword `index` (includes κ and both
    /// path gains).
    pub fn codeword_response(&self, index: usize) -> C64 {
        self.codeword_responses[index]
    }

    pub(crate) fn codeword_responses(&self) -> &[C64] {
        &self.codeword_responses
    }

    /// Effective gain `|c|²` of the oracle codeword.
    pub fn best_gain(&self) -> f64 {
        self.codeword_responses[self.best_beam].norm_sqr()
    }

    /// Noise variance that makes the best-beam receive SNR equal `snr_db`
    /// for unit average transmit power.
    pub fn calibrate_snr(&self, snr_db: f64) -> f64 {
        self.best_gain() / db_to_linear_power(snr_db)
    }

    pub(crate) fn encoder_input(&self, labels: &[usize]) -> Matrix {
        match self.scenario.architecture.encoder_input {
            EncoderInput::OneHot => Matrix::from_fn(labels.len(), self.message_count(), |r, c| {
                if labels[r] == c {
                    1.0
                } else {
                    0.0
                }
            }),
            EncoderInput::Scalar => Matrix::from_fn(labels.len(), 1, |r, _| labels[r] as f64),
        }
    }

    pub(crate) fn check_labels(&self, labels: &[usize]) -> Result<()> {
        let k_bits = self.scenario.k_bits;
        match labels.iter().find(|&&l| l >= self.message_count()) {
            Some(&l) => Err(Error::InvalidMessage {
                value: l as u32,
                k_bits,
            }),
            None => Ok(()),
        }
    }

    /// Transmitted symbols for a batch of messages, power-normalized over the
    /// batch so the mean symbol power is one.
    pub fn encode(&self, messages: &[Message]) -> Result<Vec<C64>> {
        let labels: Vec<usize> = messages.iter().map(|m| m.index()).collect();
        self.encode_labels(&labels)
    }

    pub(crate) fn encode_labels(&self, labels: &[usize]) -> Result<Vec<C64>> {
        if labels.len() < 2 {
            return Err(invalid("batch", "power normalization needs at least two symbols"));
        }
        self.check_labels(labels)?;
        let raw = self.encoder.predict(&self.encoder_input(labels))?;
        Ok(power_normalize(&interleaved_to_complex(&raw))?.0)
    }

    /// One batch containing every message once, normalized together.
    pub fn constellation(&self) -> Result<Vec<C64>> {
        let labels: Vec<usize> = (0..self.message_count()).collect();
        if labels.len() >= 2 {
            self.encode_labels(&labels)
        } else {
            Err(invalid("k_bits", "need at least two messages"))
        }
    }

    /// `[Re x, Im x, Re h_ri[0], Im h_ri[0], …, Re h_ri[N−1], Im h_ri[N−1]]`.
    pub fn build_selector_input(&self, x: C64) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 + 2 * self.h_ri.len());
        v.push(x.re);
        v.push(x.im);
        for n in 0..self.h_ri.len() {
            let h = self.h_ri.coefficient(n);
            v.push(h.re);
            v.push(h.im);
        }
        v
    }

    pub(crate) fn selector_input_batch(&self, x: &[C64]) -> Matrix {
        let width = 2 + 2 * self.h_ri.len();
        let mut data = Vec::with_capacity(x.len() * width);
        for &s in x {
            data.extend(self.build_selector_input(s));
        }
        Matrix::new(x.len(), width, data).expect("non-empty batch")
    }

    /// Codeword weights and hard choice for one selector input.
    pub fn select_beam(&self, selector_input: &[f64], mode: SelectorMode) -> Result<(Vec<f64>, usize)> {
        let p = self.codebook.len();
        if mode == SelectorMode::OracleOnly {
            let mut w = alloc::vec![0.0; p];
            w[self.best_beam] = 1.0;
            return Ok((w, self.best_beam));
        }
        let input = Matrix::new(1, selector_input.len(), selector_input.to_vec())?;
        let out = self.selector.predict(&input)?;
        let hard = out.argmax_rows()[0];
        Ok((out.into_data(), hard))
    }

    /// Received noiseless sample for symbol `x` when the RIS applies the
    /// real reflection vector `Σ_p weights[p] Ψ_p`, propagated element by
    /// element through `h_tr`, the RIS and `h_ri`.
    pub fn received_signal(&self, x: C64, weights: &[f64]) -> Result<C64> {
        check_len(self.codebook.len(), weights.len())?;
        let psi = self.mix_codewords(weights);
        Ok(cascaded_response(&self.h_tr, &self.h_ri, &psi, self.kappa)? * x)
    }

    pub(crate) fn mix_codewords(&self, weights: &[f64]) -> Vec<f64> {
        let mut psi = alloc::vec![0.0; self.codebook.n_elements()];
        for (cw, &w) in self.codebook.codewords().iter().zip(weights) {
            for (acc, &e) in psi.iter_mut().zip(cw.elements()) {
                *acc += w * e;
            }
        }
        psi
    }
}

pub(crate) fn interleaved_to_complex(m: &Matrix) -> Vec<C64> {
    (0..m.rows()).map(|r| C64::new(m.get(r, 0), m.get(r, 1))).collect()
}
