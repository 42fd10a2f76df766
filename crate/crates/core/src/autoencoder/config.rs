use alloc::vec;
use alloc::vec::Vec;

use crate::channel::Geometry;
use crate::error::{invalid, Error, Result};
use crate::neural::LrSchedule;
use crate::numerics::db_to_linear_amplitude;

/// One of the `2^k` messages a transmitter can send.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Message(u32);

impl Message {
    pub fn new(value: u32, k_bits: u32) -> Result<Self> {
        if k_bits == 0 || k_bits >= 32 || value >= (1u32 << k_bits) {
            return Err(Error::InvalidMessage { value, k_bits });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// How a message is presented to the encoder network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderInput {
    /// Unit basis vector of width `2^k`.
    OneHot,
    /// The message index as a single real input.
    Scalar,
}

/// How the beam selector takes part in training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorMode {
    /// Softmax-weighted codeword mixture in the forward pass.
    Soft,
    /// Argmax codeword forward, soft-mixture gradient backward.
    HardStraightThrough,
    /// The exhaustive-search best codeword; the selector is bypassed.
    OracleOnly,
}

/// Hidden-layer widths of the three networks.
#[derive(Debug, Clone, PartialEq)]
pub struct Architecture {
    pub encoder_hidden: Vec<usize>,
    pub selector_hidden: Vec<usize>,
    pub decoder_hidden: Vec<usize>,
    pub encoder_input: EncoderInput,
}

impl Architecture {
    /// Encoder 256-256, selector 400×4, decoder 1024×3.
    pub fn published() -> Self {
        Self {
            encoder_hidden: vec![256, 256],
            selector_hidden: vec![400; 4],
            decoder_hidden: vec![1024; 3],
            encoder_input: EncoderInput::OneHot,
        }
    }

    /// Every hidden width divided by `divisor` (at least one unit).
    pub fn reduced(divisor: usize) -> Self {
        let shrink = |v: Vec<usize>| v.into_iter().map(|w| (w / divisor.max(1)).max(1)).collect();
        let p = Self::published();
        Self {
            encoder_hidden: shrink(p.encoder_hidden),
            selector_hidden: shrink(p.selector_hidden),
            decoder_hidden: shrink(p.decoder_hidden),
            encoder_input: p.encoder_input,
        }
    }

    fn validate(&self) -> Result<()> {
        let all = self
            .encoder_hidden
            .iter()
            .chain(&self.selector_hidden)
            .chain(&self.decoder_hidden);
        if all.into_iter().any(|&w| w == 0) {
            return Err(invalid("architecture", "hidden widths must be at least 1"));
        }
        Ok(())
    }
}

impl Default for Architecture {
    fn default() -> Self {
        Self::published()
    }
}

/// The fixed experiment: geometry, codebook, insertion loss, message size
/// and network shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: Geometry,
    pub codebook_size: usize,
    pub codebook_min_deg: f64,
    pub codebook_max_deg: f64,
    /// RIS insertion loss in dB (a positive number is a loss).
    pub kappa_db: f64,
    pub k_bits: u32,
    pub gain_tr: f64,
    pub gain_ri: f64,
    pub architecture: Architecture,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            geometry: Geometry::default(),
            codebook_size: 32,
            codebook_min_deg: 100.0,
            codebook_max_deg: 160.0,
            kappa_db: 3.0,
            k_bits: 2,
            gain_tr: 1.0,
            gain_ri: 1.0,
            architecture: Architecture::published(),
        }
    }
}

impl Scenario {
    /// Amplitude factor applied by each reflection, `10^(−κ_dB / 20)`.
    pub fn kappa(&self) -> f64 {
        db_to_linear_amplitude(-self.kappa_db)
    }

    pub fn message_count(&self) -> usize {
        1usize << self.k_bits
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.kappa_db >= 0.0) || !self.kappa_db.is_finite() {
            return Err(invalid("kappa_db", "insertion loss must be finite and non-negative"));
        }
        if self.k_bits == 0 || self.k_bits > 16 {
            return Err(invalid("k_bits", "must lie in 1..=16"));
        }
        if !(self.gain_tr > 0.0) || !(self.gain_ri > 0.0) {
            return Err(invalid("gain", "channel gains must be positive"));
        }
        self.architecture.validate()
    }
}

/// Joint-training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub lr_schedule: LrSchedule,
    /// Per-example SNR is drawn uniformly from this range (dB).
    pub train_snr_range_db: (f64, f64),
    /// Weight of the supervised best-beam cross-entropy term.
    pub beam_loss_weight: f64,
    pub selector_mode: SelectorMode,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 512,
            iterations: 20_000,
            learning_rate: 1e-3,
            lr_schedule: LrSchedule::Constant,
            train_snr_range_db: (0.0, 20.0),
            beam_loss_weight: 1.0,
            selector_mode: SelectorMode::Soft,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(invalid("batch_size", "power normalization needs at least two symbols"));
        }
        let (lo, hi) = self.train_snr_range_db;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid("train_snr_range_db", "need finite lo <= hi"));
        }
        if !(self.beam_loss_weight >= 0.0) {
            return Err(invalid("beam_loss_weight", "must be non-negative"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(invalid("learning_rate", "must be positive"));
        }
        Ok(())
    }
}

/// Which codeword the RIS uses for each evaluated symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamPolicy {
    /// The trained selector's argmax (the oracle beam for `OracleOnly` models).
    Best,
    /// Uniformly random among the `K` top-ranked codewords.
    TopK(usize),
    /// Uniformly random over the whole codebook, i.e. `TopK(|𝒫|)`.
    UniformRandom,
    /// Always the given codebook index.
    Fixed(usize),
}

impl BeamPolicy {
    pub fn validate(&self, codebook_size: usize) -> Result<()> {
        match *self {
            BeamPolicy::TopK(k) if k == 0 || k > codebook_size => {
                Err(invalid("K", "must satisfy 1 <= K <= codebook size"))
            }
            BeamPolicy::Fixed(i) if i >= codebook_size => Err(invalid("beam", "index out of range")),
            _ => Ok(()),
        }
    }
}

/// Ordering of codewords used by [`BeamPolicy::TopK`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BeamRanking {
    /// Descending effective channel gain.
    #[default]
    EffectiveGain,
    /// Ascending symbol error rate of the trained link, measured with
    /// `probe_symbols` per codeword at the evaluation SNR. Ties keep gain order.
    MeasuredSer { probe_symbols: u64 },
}
