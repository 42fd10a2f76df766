//! Central finite differences, used as an independent oracle for the
//! analytic gradients.

use alloc::vec::Vec;

/// Step for network checks. Larger steps cross ReLU kinks; smaller ones
/// lose the difference to round-off.
pub const DEFAULT_STEP: f64 = 1e-6;

/// Gradient magnitude below which central differences of a loss of size
/// `loss` cannot reach relative accuracy `tolerance` in `f64`: round-off in
/// `L(θ+h) − L(θ−h)` is a few ulps of `L`, i.e. about `ε·|L|/h` in the
/// estimate. Used as the floor of [`max_relative_error`].
pub fn roundoff_floor(loss: f64, step: f64, tolerance: f64) -> f64 {
    4.0 * f64::EPSILON * loss.abs().max(1.0) / (step * tolerance)
}

/// Numerical gradient of `loss` by central differences.
///
/// `get`/`set` read and write parameter `i` of `state`; each parameter is
/// restored to its exact original value after it has been probed.
pub fn central_difference<S: ?Sized>(
    state: &mut S,
    count: usize,
    step: f64,
    get: impl Fn(&S, usize) -> f64,
    mut set: impl FnMut(&mut S, usize, f64),
    mut loss: impl FnMut(&S) -> f64,
) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let original = get(state, i);
            set(state, i, original + step);
            let plus = loss(state);
            set(state, i, original - step);
            let minus = loss(state);
            set(state, i, original);
            (plus - minus) / (2.0 * step)
        })
        .collect()
}

/// `|a − b| / max(|a|, |b|, floor)`.
///
/// The floor keeps entries whose true gradient is essentially zero from
/// dominating the statistic through finite-difference round-off.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

pub fn max_relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| relative_error(x, y, floor))
        .fold(0.0, f64::max)
}
