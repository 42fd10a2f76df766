//! Deterministic numeric primitives: complex vectors, dB conversions and
//! seeded random streams.

use alloc::vec::Vec;

use num_complex::Complex;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{check_len, Error, Result};
use crate::math;

/// Complex baseband sample, stored as an interleaved `(re, im)` pair.
pub type C64 = Complex<f64>;

/// Converts a power ratio in dB to a linear factor, `10^(x/10)`.
pub fn db_to_linear_power(x_db: f64) -> f64 {
    math::pow(10.0, x_db / 10.0)
}

/// Converts a dB value to a linear amplitude factor, `10^(x/20)`.
pub fn db_to_linear_amplitude(x_db: f64) -> f64 {
    math::pow(10.0, x_db / 20.0)
}

/// Inverse of [`db_to_linear_power`].
pub fn linear_power_to_db(x: f64) -> f64 {
    10.0 * math::log(x) / core::f64::consts::LN_10
}

/// A non-empty sequence of finite complex samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(entries))
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(alloc::vec![C64::new(1.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn iter(&self) -> core::slice::Iter<'_, C64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    /// Elementwise product `a ⊙ b`.
    pub fn hadamard_product(&self, other: &ComplexVector) -> Result<ComplexVector> {
        hadamard_product(self, other)
    }

    /// Unconjugated inner product `aᵀ b`.
    pub fn dot(&self, other: &ComplexVector) -> Result<C64> {
        check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    /// Mean of `|z|²` over the entries.
    pub fn mean_power(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.0.len() as f64
    }
}

impl core::ops::Index<usize> for ComplexVector {
    type Output = C64;

    fn index(&self, index: usize) -> &C64 {
        &self.0[index]
    }
}

/// Elementwise complex product of two equal-length vectors.
pub fn hadamard_product(a: &ComplexVector, b: &ComplexVector) -> Result<ComplexVector> {
    check_len(a.len(), b.len())?;
    Ok(ComplexVector(
        a.0.iter().zip(&b.0).map(|(x, y)| x * y).collect(),
    ))
}

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id selecting an independent keystream.
/// Gaussian samples use the basic Box-Muller transform on two uniforms drawn
/// from 53-bit mantissas, with `libm` transcendental functions, so sequences
/// are bit-identical across builds and platforms.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform sample in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform sample in `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Unbiased uniform integer in `0..n`.
    ///
    /// # Panics
    ///
    /// Panics if `n == 0`.
    pub fn uniform_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "uniform_index requires n > 0");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// Pair of independent standard normal samples.
    pub fn standard_normal_pair(&mut self) -> (f64, f64) {
        // 1 - U lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = math::sqrt(-2.0 * math::log(u1));
        let theta = 2.0 * math::PI * u2;
        (r * math::cos(theta), r * math::sin(theta))
    }

    /// Circularly symmetric complex Gaussian sample with `E|z|² = variance`.
    pub fn complex_normal(&mut self, variance: f64) -> C64 {
        let (a, b) = self.standard_normal_pair();
        let s = math::sqrt(variance / 2.0);
        C64::new(s * a, s * b)
    }
}

/// Draws `n` i.i.d. circularly symmetric complex Gaussian samples whose
/// real and imaginary parts each have variance `variance / 2`.
pub fn sample_complex_gaussian(rng: &mut RngStream, n: usize, variance: f64) -> Result<ComplexVector> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::InvalidParameter {
            name: "variance",
            reason: "must be finite and non-negative",
        });
    }
    ComplexVector::new((0..n).map(|_| rng.complex_normal(variance)).collect())
}
