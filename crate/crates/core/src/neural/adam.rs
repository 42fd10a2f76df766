use super::mlp::{Mlp, MlpGrads};
use crate::error::{invalid, Error, Result};
use crate::math;

/// Learning-rate schedule applied on top of the base rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LrSchedule {
    Constant,
    /// `η_t = η · rate^t`.
    Exponential { rate: f64 },
    /// `η_t = η / (1 + t / half_life)`.
    InverseTime { half_life: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub schedule: LrSchedule,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            schedule: LrSchedule::Constant,
        }
    }
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(invalid("learning_rate", "must be positive and finite"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(invalid("beta", "moment decay rates must lie in [0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(invalid("epsilon", "must be positive"));
        }
        match self.schedule {
            LrSchedule::Exponential { rate } if !(rate > 0.0 && rate <= 1.0) => {
                Err(invalid("schedule", "exponential rate must lie in (0, 1]"))
            }
            LrSchedule::InverseTime { half_life } if !(half_life > 0.0) => {
                Err(invalid("schedule", "half-life must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Learning rate used for step `t` (1-based).
    pub fn learning_rate_at(&self, t: u64) -> f64 {
        match self.schedule {
            LrSchedule::Constant => self.learning_rate,
            LrSchedule::Exponential { rate } => self.learning_rate * math::pow(rate, t as f64),
            LrSchedule::InverseTime { half_life } => self.learning_rate / (1.0 + t as f64 / half_life),
        }
    }
}

/// Adam moments and step counter for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    config: AdamConfig,
    first_moment: MlpGrads,
    second_moment: MlpGrads,
    step_count: u64,
}

impl AdamState {
    pub fn new(params: &Mlp, config: AdamConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            first_moment: MlpGrads::zeros_like(params),
            second_moment: MlpGrads::zeros_like(params),
            step_count: 0,
        })
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut Mlp, grads: &MlpGrads) -> Result<()> {
        if !grads.matches(params) || !self.first_moment.matches(params) {
            return Err(Error::LengthMismatch {
                expected: params.parameter_count(),
                actual: grads.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum(),
            });
        }
        self.step_count += 1;
        let t = self.step_count;
        let AdamConfig {
            beta1,
            beta2,
            epsilon,
            ..
        } = self.config;
        let lr = self.config.learning_rate_at(t);
        let c1 = 1.0 - math::pow(beta1, t as f64);
        let c2 = 1.0 - math::pow(beta2, t as f64);
        let (m, v) = (&mut self.first_moment, &mut self.second_moment);
        params.for_each_parameter_mut(|layer, i, is_weight, p| {
            let (g, m, v) = if is_weight {
                (
                    grads.layers[layer].weights[i],
                    &mut m.layers[layer].weights[i],
                    &mut v.layers[layer].weights[i],
                )
            } else {
                (
                    grads.layers[layer].biases[i],
                    &mut m.layers[layer].biases[i],
                    &mut v.layers[layer].biases[i],
                )
            };
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (math::sqrt(v_hat) + epsilon);
        });
        Ok(())
    }
}
