//! Conventional QPSK over AWGN: Gray-mapped modulation, minimum-distance
//! detection, the closed-form symbol error rate and a Monte Carlo estimate.
//!
//! SNR is `Es/N0` with unit symbol energy and `N0` the total complex noise
//! variance, the same convention used to calibrate the learned link.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{invalid, Error, Result};
use crate::math;
use crate::numerics::{db_to_linear_power, RngStream, C64};

/// Constellation point for each label. Labels run 0, 1, 3, 2
/// counterclockwise starting from `(1 + j)/√2`.
pub const QPSK_POINTS: [C64; 4] = [
    C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    C64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    C64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    C64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

pub fn qpsk_modulate(messages: &[u32]) -> Result<Vec<C64>> {
    messages
        .iter()
        .map(|&m| {
            QPSK_POINTS
                .get(m as usize)
                .copied()
                .ok_or(Error::InvalidMessage { value: m, k_bits: 2 })
        })
        .collect()
}

/// Minimum-distance decision for one sample; ties go to the lowest label.
pub fn qpsk_decide(y: C64) -> u32 {
    let mut best = 0;
    let mut best_d = (y - QPSK_POINTS[0]).norm_sqr();
    for (label, p) in QPSK_POINTS.iter().enumerate().skip(1) {
        let d = (y - p).norm_sqr();
        if d < best_d {
            best = label;
            best_d = d;
        }
    }
    best as u32
}

pub fn qpsk_demodulate(y: &[C64]) -> Vec<u32> {
    y.iter().map(|&s| qpsk_decide(s)).collect()
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * math::erfc(x * FRAC_1_SQRT_2)
}

/// Exact QPSK symbol error rate, `2Q(√snr) − Q(√snr)²`.
pub fn qpsk_awgn_ser_analytic(snr_db: f64) -> f64 {
    let p = q_function(math::sqrt(db_to_linear_power(snr_db)));
    2.0 * p - p * p
}

/// Error and symbol counts of a Monte Carlo run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ErrorCount {
    pub errors: u64,
    pub symbols: u64,
}

impl ErrorCount {
    pub fn new(errors: u64, symbols: u64) -> Self {
        Self { errors, symbols }
    }

    pub fn ser(&self) -> f64 {
        if self.symbols == 0 {
            0.0
        } else {
            self.errors as f64 / self.symbols as f64
        }
    }

    pub fn merge(self, other: ErrorCount) -> ErrorCount {
        ErrorCount {
            errors: self.errors + other.errors,
            symbols: self.symbols + other.symbols,
        }
    }

    /// Wilson score interval at 95% confidence.
    pub fn wilson_interval(&self) -> (f64, f64) {
        wilson_interval(self.errors, self.symbols, 1.959963984540054)
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * math::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Symbols simulated per independent random stream. Monte Carlo runs are
/// split into chunks of this size so totals do not depend on how chunks
/// are scheduled across workers.
pub const CHUNK_SYMBOLS: usize = 4096;

pub fn chunk_count(n_symbols: u64) -> u64 {
    n_symbols.div_ceil(CHUNK_SYMBOLS as u64)
}

pub(crate) fn chunk_len(n_symbols: u64, chunk: u64) -> usize {
    let start = chunk * CHUNK_SYMBOLS as u64;
    (n_symbols.saturating_sub(start)).min(CHUNK_SYMBOLS as u64) as usize
}

/// Runs one Monte Carlo chunk of the QPSK/AWGN link. Chunk `c` draws from
/// `RngStream::new(seed, c)`.
pub fn qpsk_awgn_chunk(snr_db: f64, n_symbols: u64, chunk: u64, seed: u64) -> ErrorCount {
    let sigma_sq = 1.0 / db_to_linear_power(snr_db);
    let len = chunk_len(n_symbols, chunk);
    let mut rng = RngStream::new(seed, chunk);
    let mut errors = 0;
    for _ in 0..len {
        let m = rng.uniform_index(4);
        let y = QPSK_POINTS[m] + rng.complex_normal(sigma_sq);
        if qpsk_decide(y) as usize != m {
            errors += 1;
        }
    }
    ErrorCount::new(errors, len as u64)
}

/// Monte Carlo QPSK symbol error rate at `snr_db` (`Es/N0`).
pub fn qpsk_awgn_ser_monte_carlo(snr_db: f64, n_symbols: u64, seed: u64) -> Result<ErrorCount> {
    if n_symbols == 0 {
        return Err(invalid("n_symbols", "must be at least 1"));
    }
    Ok((0..chunk_count(n_symbols))
        .map(|c| qpsk_awgn_chunk(snr_db, n_symbols, c, seed))
        .fold(ErrorCount::default(), ErrorCount::merge))
}

/// SER of the obstructed direct link: QPSK at `snr_db − l_o_db`.
pub fn direct_link_ser(snr_db: f64, l_o_db: f64) -> Result<f64> {
    if !(l_o_db >= 0.0) {
        return Err(invalid("l_o_db", "obstruction loss must be non-negative"));
    }
    Ok(qpsk_awgn_ser_analytic(snr_db - l_o_db))
}

/// Bits that differ between two Gray labels.
pub fn gray_bit_errors(a: u32, b: u32) -> u32 {
    (a ^ b).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_map() {
        let pts = qpsk_modulate(&[0, 1, 2, 3]).unwrap();
        let s = FRAC_1_SQRT_2;
        assert_eq!(pts[0], C64::new(s, s));
        let power: f64 = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / 4.0;
        assert!((power - 1.0).abs() < 1e-15);
        // Counterclockwise order 0, 1, 3, 2: neighbours differ in one bit.
        let ring = [0u32, 1, 3, 2];
        for i in 0..4 {
            assert_eq!(gray_bit_errors(ring[i], ring[(i + 1) % 4]), 1);
            let a = QPSK_POINTS[ring[i] as usize].arg();
            let b = QPSK_POINTS[ring[(i + 1) % 4] as usize].arg();
            let step = (b - a).rem_euclid(2.0 * math::PI);
            assert!((step - math::PI / 2.0).abs() < 1e-12);
        }
        assert!(qpsk_modulate(&[4]).is_err());
    }

    #[test]
    fn demodulation() {
        let labels = [0, 1, 2, 3, 3, 1];
        let pts = qpsk_modulate(&labels).unwrap();
        assert_eq!(qpsk_demodulate(&pts), labels);
        assert_eq!(qpsk_decide(C64::new(0.0, 0.0)), 0);
        let mut rng = RngStream::new(4, 4);
        for _ in 0..10_000 {
            let y = rng.complex_normal(2.0);
            let quadrant = match (y.re >= 0.0, y.im >= 0.0) {
                (true, true) => 0,
                (false, true) => 1,
                (true, false) => 2,
                (false, false) => 3,
            };
            assert_eq!(qpsk_decide(y), quadrant);
        }
    }

    #[test]
    fn analytic_values() {
        assert!((q_function(1.0) - 0.158655).abs() < 1e-6);
        assert!((qpsk_awgn_ser_analytic(0.0) - 0.29214).abs() < 1e-5);
        // Reference values from scipy.stats.norm.sf.
        let reference = [
            (0.0, 0.29213901826285904),
            (2.0, 0.19723531683693374),
            (4.0, 0.10979888437897187),
            (6.0, 0.045484949316386615),
            (8.0, 0.011972720144284655),
            (10.0, 0.0015647896369452082),
        ];
        for (snr, ser) in reference {
            assert!((qpsk_awgn_ser_analytic(snr) - ser).abs() < 1e-12 * ser.max(1e-3), "{snr}");
        }
        assert!(qpsk_awgn_ser_analytic(40.0) < 1e-300 || qpsk_awgn_ser_analytic(40.0) == 0.0);
    }

    #[test]
    fn monte_carlo_noiseless_and_deterministic() {
        assert_eq!(qpsk_awgn_ser_monte_carlo(400.0, 10_000, 1).unwrap().errors, 0);
        let a = qpsk_awgn_ser_monte_carlo(3.0, 50_000, 9).unwrap();
        let b = qpsk_awgn_ser_monte_carlo(3.0, 50_000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.symbols, 50_000);
        assert!(qpsk_awgn_ser_monte_carlo(3.0, 0, 9).is_err());
    }

    #[test]
    fn monte_carlo_matches_analytic_at_0db() {
        let r = qpsk_awgn_ser_monte_carlo(0.0, 1_000_000, 21).unwrap();
        let p = qpsk_awgn_ser_analytic(0.0);
        let sd = (p * (1.0 - p) / 1e6).sqrt();
        assert!((r.ser() - p).abs() < 3.0 * sd, "{} vs {p}", r.ser());
    }

    #[test]
    fn gray_single_bit_dominance_at_10db() {
        let mut rng = RngStream::new(8, 0);
        let sigma_sq = 1.0 / db_to_linear_power(10.0);
        let (mut sym_err, mut single) = (0u32, 0u32);
        for _ in 0..400_000 {
            let m = rng.uniform_index(4) as u32;
            let d = qpsk_decide(QPSK_POINTS[m as usize] + rng.complex_normal(sigma_sq));
            if d != m {
                sym_err += 1;
                if gray_bit_errors(d, m) == 1 {
                    single += 1;
                }
            }
        }
        assert!(sym_err > 300);
        assert!(single as f64 / sym_err as f64 > 0.99);
    }

    #[test]
    fn direct_link() {
        assert_eq!(direct_link_ser(5.0, 0.0).unwrap(), qpsk_awgn_ser_analytic(5.0));
        assert!((direct_link_ser(10.0, 10.0).unwrap() - 0.29214).abs() < 1e-5);
        assert_eq!(direct_link_ser(12.0, 3.0).unwrap(), qpsk_awgn_ser_analytic(9.0));
        let mut prev = 0.0;
        for lo in [0.0, 1.0, 3.0, 6.0, 7.0, 10.0] {
            let s = direct_link_ser(8.0, lo).unwrap();
            assert!(s > prev);
            prev = s;
        }
        assert!(direct_link_ser(8.0, -1.0).is_err());
    }

    #[test]
    fn wilson_contains_estimate() {
        let c = ErrorCount::new(30, 1000);
        let (lo, hi) = c.wilson_interval();
        assert!(lo < 0.03 && 0.03 < hi);
        assert!(hi - lo < 0.03);
    }
}
