use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::numerics::C64;

/// State kept by [`power_normalize`] for its backward pass.
#[derive(Debug, Clone)]
pub struct PowerNormCache {
    scale: f64,
    normalized: Vec<C64>,
}

impl PowerNormCache {
    /// `√((1/M) Σ |x'_i|²)`, the divisor applied to the batch.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn batch_size(&self) -> usize {
        self.normalized.len()
    }
}

/// Scales a mini-batch so its mean per-symbol power is exactly one:
/// `x = x' / √((1/M) Σ |x'_i|²)`.
pub fn power_normalize(batch: &[C64]) -> Result<(Vec<C64>, PowerNormCache)> {
    if batch.is_empty() {
        return Err(Error::Empty);
    }
    let mean_power = batch.iter().map(|z| z.norm_sqr()).sum::<f64>() / batch.len() as f64;
    if !mean_power.is_finite() {
        return Err(Error::NonFinite);
    }
    if mean_power == 0.0 {
        return Err(Error::DegenerateBatch);
    }
    let scale = math::sqrt(mean_power);
    let normalized: Vec<C64> = batch.iter().map(|z| z / scale).collect();
    Ok((
        normalized.clone(),
        PowerNormCache { scale, normalized },
    ))
}

/// Gradient of the normalization with respect to its input, including the
/// coupling through the shared batch norm:
/// `∂L/∂x'_i = (g_i − x_i · (1/M) Σ_k ⟨g_k, x_k⟩) / s`.
///
/// Complex gradients are `∂L/∂Re + j ∂L/∂Im`.
pub fn power_normalize_backward(upstream: &[C64], cache: &PowerNormCache) -> Result<Vec<C64>> {
    if upstream.len() != cache.normalized.len() {
        return Err(Error::StaleCache);
    }
    let m = upstream.len() as f64;
    let radial = upstream
        .iter()
        .zip(&cache.normalized)
        .map(|(g, x)| g.re * x.re + g.im * x.im)
        .sum::<f64>()
        / m;
    Ok(upstream
        .iter()
        .zip(&cache.normalized)
        .map(|(g, x)| (g - x * radial) / cache.scale)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::gradcheck::max_relative_error;
    use crate::numerics::RngStream;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn examples() {
        let (x, _) = power_normalize(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(x, vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let (x, _) = power_normalize(&[c(2.0, 0.0), c(0.0, 2.0)]).unwrap();
        assert_eq!(x, vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let (x, cache) = power_normalize(&[c(1.0, 0.0), c(0.0, 3.0)]).unwrap();
        let s = 5f64.sqrt();
        assert!((cache.scale() - s).abs() < 1e-15);
        assert!((x[0].re - 1.0 / s).abs() < 1e-15 && (x[1].im - 3.0 / s).abs() < 1e-15);
        assert_eq!(
            power_normalize(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap_err(),
            Error::DegenerateBatch
        );
    }

    #[test]
    fn stale_cache() {
        let (_, cache) = power_normalize(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(
            power_normalize_backward(&[c(1.0, 0.0)], &cache).unwrap_err(),
            Error::StaleCache
        );
    }

    #[test]
    fn zero_upstream_and_tangent_perturbation() {
        let batch = [c(1.0, 0.0), c(0.0, -1.0), c(0.6, 0.8)];
        let (x, cache) = power_normalize(&batch).unwrap();
        let zero = power_normalize_backward(&[c(0.0, 0.0); 3], &cache).unwrap();
        assert!(zero.iter().all(|z| *z == c(0.0, 0.0)));
        // Orthogonal to the radial direction: Σ⟨g, x⟩ = 0 with unit scale.
        let g = [c(0.0, 1.0), c(1.0, 0.0), c(-0.8, 0.6)];
        let radial: f64 = g.iter().zip(&x).map(|(a, b)| a.re * b.re + a.im * b.im).sum();
        assert!(radial.abs() < 1e-15);
        let back = power_normalize_backward(&g, &cache).unwrap();
        for (a, b) in back.iter().zip(&g) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gradcheck_random_batches() {
        let mut rng = RngStream::new(17, 2);
        for _ in 0..20 {
            let m = 2 + rng.uniform_index(6);
            let batch: Vec<C64> = (0..m).map(|_| rng.complex_normal(1.5)).collect();
            let weights: Vec<C64> = (0..m).map(|_| rng.complex_normal(1.0)).collect();
            // L = Σ Re(conj(w_i) x_i), so ∂L/∂x_i = w_i.
            let loss = |b: &[C64]| -> f64 {
                let (x, _) = power_normalize(b).unwrap();
                x.iter().zip(&weights).map(|(x, w)| w.re * x.re + w.im * x.im).sum()
            };
            let (_, cache) = power_normalize(&batch).unwrap();
            let analytic: Vec<f64> = power_normalize_backward(&weights, &cache)
                .unwrap()
                .iter()
                .flat_map(|z| [z.re, z.im])
                .collect();
            let h = 1e-6;
            let mut numeric = Vec::new();
            for i in 0..m {
                for part in 0..2 {
                    let mut plus = batch.clone();
                    let mut minus = batch.clone();
                    if part == 0 {
                        plus[i].re += h;
                        minus[i].re -= h;
                    } else {
                        plus[i].im += h;
                        minus[i].im -= h;
                    }
                    numeric.push((loss(&plus) - loss(&minus)) / (2.0 * h));
                }
            }
            let err = max_relative_error(&analytic, &numeric, 1e-8);
            assert!(err < 1e-5, "{err}");
        }
    }
}
