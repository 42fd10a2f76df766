//! Experiment configuration: a JSON document whose every field has a
//! default, so `{}` is the published scenario.

use risae_core::autoencoder::{
    Architecture, BeamRanking, EncoderInput, Scenario, SelectorMode, TrainConfig,
};
use risae_core::channel::Geometry;
use risae_core::neural::LrSchedule;
use serde::{Deserialize, Serialize};

use crate::error::{io_error, CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub n_elements: usize,
    pub spacing_wavelengths: f64,
    pub incident_azimuth_deg: f64,
    pub receiver_azimuth_deg: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            n_elements: 32,
            spacing_wavelengths: 0.5,
            incident_azimuth_deg: 90.0,
            receiver_azimuth_deg: 110.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodebookConfig {
    pub size: usize,
    pub min_deg: f64,
    pub max_deg: f64,
}

impl Default for CodebookConfig {
    fn default() -> Self {
        Self {
            size: 32,
            min_deg: 100.0,
            max_deg: 160.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderInputConfig {
    OneHot,
    Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchitectureConfig {
    pub encoder_hidden: Vec<usize>,
    pub selector_hidden: Vec<usize>,
    pub decoder_hidden: Vec<usize>,
    pub encoder_input: EncoderInputConfig,
}

impl Default for ArchitectureConfig {
    fn default() -> Self {
        let a = Architecture::published();
        Self {
            encoder_hidden: a.encoder_hidden,
            selector_hidden: a.selector_hidden,
            decoder_hidden: a.decoder_hidden,
            encoder_input: EncoderInputConfig::OneHot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorModeConfig {
    Soft,
    HardStraightThrough,
    OracleOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LrScheduleConfig {
    Constant,
    Exponential { rate: f64 },
    InverseTime { half_life: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub batch_size: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub lr_schedule: LrScheduleConfig,
    pub snr_lo_db: f64,
    pub snr_hi_db: f64,
    pub beam_loss_weight: f64,
    pub selector_mode: SelectorModeConfig,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            batch_size: 512,
            iterations: 20_000,
            learning_rate: 1e-3,
            lr_schedule: LrScheduleConfig::Constant,
            snr_lo_db: 0.0,
            snr_hi_db: 20.0,
            beam_loss_weight: 1.0,
            selector_mode: SelectorModeConfig::Soft,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub snr_lo_db: f64,
    pub snr_hi_db: f64,
    pub snr_step_db: f64,
    pub n_symbols: u64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            snr_lo_db: -5.0,
            snr_hi_db: 25.0,
            snr_step_db: 1.0,
            n_symbols: 1_000_000,
        }
    }
}

impl SweepSection {
    /// `lo, lo + step, …` up to and including `hi` (within rounding).
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.snr_hi_db - self.snr_lo_db) / self.snr_step_db + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| ((self.snr_lo_db + i as f64 * self.snr_step_db) * 1e9).round() / 1e9)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BeamRankingConfig {
    EffectiveGain,
    MeasuredSer { probe_symbols: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub geometry: GeometryConfig,
    pub codebook: CodebookConfig,
    /// RIS insertion loss in dB.
    pub kappa_db: f64,
    pub k_bits: u32,
    pub architecture: ArchitectureConfig,
    pub train: TrainSection,
    pub sweep: SweepSection,
    /// Direct-link obstruction losses in dB.
    pub obstruction_losses_db: Vec<f64>,
    /// `K` values of the top-K benchmark curves.
    pub top_k: Vec<usize>,
    pub beam_ranking: BeamRankingConfig,
    /// Target SERs of the gain table.
    pub gain_targets: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            geometry: GeometryConfig::default(),
            codebook: CodebookConfig::default(),
            kappa_db: 3.0,
            k_bits: 2,
            architecture: ArchitectureConfig::default(),
            train: TrainSection::default(),
            sweep: SweepSection::default(),
            obstruction_losses_db: vec![6.0, 7.0, 10.0],
            top_k: vec![3, 5, 10, 16, 32],
            beam_ranking: BeamRankingConfig::EffectiveGain,
            gain_targets: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(io_error(path))?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn scenario(&self) -> Scenario {
        let g = &self.geometry;
        let a = &self.architecture;
        Scenario {
            geometry: Geometry {
                n_elements: g.n_elements,
                spacing_wavelengths: g.spacing_wavelengths,
                incident_azimuth_deg: g.incident_azimuth_deg,
                receiver_azimuth_deg: g.receiver_azimuth_deg,
                elevation_deg: 90.0,
            },
            codebook_size: self.codebook.size,
            codebook_min_deg: self.codebook.min_deg,
            codebook_max_deg: self.codebook.max_deg,
            kappa_db: self.kappa_db,
            k_bits: self.k_bits,
            gain_tr: 1.0,
            gain_ri: 1.0,
            architecture: Architecture {
                encoder_hidden: a.encoder_hidden.clone(),
                selector_hidden: a.selector_hidden.clone(),
                decoder_hidden: a.decoder_hidden.clone(),
                encoder_input: match a.encoder_input {
                    EncoderInputConfig::OneHot => EncoderInput::OneHot,
                    EncoderInputConfig::Scalar => EncoderInput::Scalar,
                },
            },
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            batch_size: t.batch_size,
            iterations: t.iterations,
            learning_rate: t.learning_rate,
            lr_schedule: match t.lr_schedule {
                LrScheduleConfig::Constant => LrSchedule::Constant,
                LrScheduleConfig::Exponential { rate } => LrSchedule::Exponential { rate },
                LrScheduleConfig::InverseTime { half_life } => LrSchedule::InverseTime { half_life },
            },
            train_snr_range_db: (t.snr_lo_db, t.snr_hi_db),
            beam_loss_weight: t.beam_loss_weight,
            selector_mode: match t.selector_mode {
                SelectorModeConfig::Soft => SelectorMode::Soft,
                SelectorModeConfig::HardStraightThrough => SelectorMode::HardStraightThrough,
                SelectorModeConfig::OracleOnly => SelectorMode::OracleOnly,
            },
            seed: self.seed,
        }
    }

    pub fn ranking(&self) -> BeamRanking {
        match self.beam_ranking {
            BeamRankingConfig::EffectiveGain => BeamRanking::EffectiveGain,
            BeamRankingConfig::MeasuredSer { probe_symbols } => BeamRanking::MeasuredSer { probe_symbols },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario().validate()?;
        self.train_config().validate()?;
        let bad = |msg: &str| Err(CliError::Config(msg.to_string()));
        let s = &self.sweep;
        if !(s.snr_step_db > 0.0) || !(s.snr_lo_db <= s.snr_hi_db) || !s.snr_hi_db.is_finite() || !s.snr_lo_db.is_finite() {
            return bad("sweep needs finite snr_lo_db <= snr_hi_db and snr_step_db > 0");
        }
        if s.n_symbols == 0 {
            return bad("sweep.n_symbols must be at least 1");
        }
        if self.obstruction_losses_db.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
            return bad("obstruction losses must be finite and non-negative");
        }
        if self.top_k.iter().any(|&k| k == 0 || k > self.codebook.size) {
            return bad("every top_k entry must satisfy 1 <= K <= codebook.size");
        }
        if self.gain_targets.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return bad("gain targets must lie in (0, 1)");
        }
        if let BeamRankingConfig::MeasuredSer { probe_symbols: 0 } = self.beam_ranking {
            return bad("beam_ranking.probe_symbols must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_published_scenario() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.geometry.n_elements, 32);
        assert_eq!(cfg.geometry.incident_azimuth_deg, 90.0);
        assert_eq!(cfg.geometry.receiver_azimuth_deg, 110.0);
        assert_eq!(cfg.geometry.spacing_wavelengths, 0.5);
        assert_eq!(cfg.codebook.size, 32);
        assert_eq!((cfg.codebook.min_deg, cfg.codebook.max_deg), (100.0, 160.0));
        assert_eq!(cfg.kappa_db, 3.0);
        assert_eq!(cfg.k_bits, 2);
        assert_eq!(cfg.obstruction_losses_db, vec![6.0, 7.0, 10.0]);
        assert_eq!(cfg.architecture.encoder_hidden, vec![256, 256]);
        assert_eq!(cfg.architecture.selector_hidden, vec![400; 4]);
        assert_eq!(cfg.architecture.decoder_hidden, vec![1024; 3]);
        assert_eq!(cfg.scenario(), Scenario::default());
    }

    #[test]
    fn round_trip_and_partial_override() {
        let cfg = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let c = ExperimentConfig::from_json(r#"{"seed": 9, "train": {"iterations": 5}}"#).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.train.iterations, 5);
        assert_eq!(c.train.batch_size, 512);
    }

    #[test]
    fn rejects_unknown_and_invalid_fields() {
        assert!(ExperimentConfig::from_json(r#"{"sed": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"top_k": [0]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"top_k": [33]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"train": {"batch_size": 1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"sweep": {"snr_step_db": 0}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"geometry": {"receiver_azimuth_deg": 400}}"#).is_err());
    }

    #[test]
    fn sweep_grid_includes_both_ends() {
        let s = SweepSection {
            snr_lo_db: 0.0,
            snr_hi_db: 1.0,
            snr_step_db: 0.1,
            n_symbols: 1,
        };
        let g = s.grid();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[10], 1.0);
    }
}
