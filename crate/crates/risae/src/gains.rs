//! SNR at a target SER and the resulting dB gain between two curves.

/// SNR (dB) at which a curve reaches `target`, interpolating linearly in
/// `log10(SER)` between the two sweep points that bracket it. Uses the
/// first bracketing segment from the low-SNR end. `None` when the curve
/// never reaches the target or only drops to zero across it.
pub fn snr_at_ser(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let lt = target.log10();
    for pair in points.windows(2) {
        let ((s0, p0), (s1, p1)) = (pair[0], pair[1]);
        if p0 == target {
            return Some(s0);
        }
        if p0 > target && p1 <= target {
            if p1 == target {
                return Some(s1);
            }
            if p1 <= 0.0 {
                return None;
            }
            let (l0, l1) = (p0.log10(), p1.log10());
            return Some(s0 + (lt - l0) * (s1 - s0) / (l1 - l0));
        }
    }
    match points.last() {
        Some(&(s, p)) if p == target => Some(s),
        _ => None,
    }
}

/// `SNR_direct(target) − SNR_ris(target)`: how much less SNR the RIS link
/// needs to reach `target`.
pub fn gain_db(ris: &[(f64, f64)], direct: &[(f64, f64)], target: f64) -> Option<f64> {
    Some(snr_at_ser(direct, target)? - snr_at_ser(ris, target)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Piecewise log-linear curve through the given knots.
    fn curve(knots: &[(f64, f64)], step: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut s = knots[0].0;
        while s <= knots[knots.len() - 1].0 + 1e-12 {
            let i = knots.windows(2).position(|w| s <= w[1].0).unwrap();
            let ((s0, p0), (s1, p1)) = (knots[i], knots[i + 1]);
            let l = p0.log10() + (s - s0) / (s1 - s0) * (p1.log10() - p0.log10());
            out.push((s, 10f64.powf(l)));
            s += step;
        }
        out
    }

    #[test]
    fn exact_on_piecewise_log_linear_curves() {
        let c = curve(&[(0.0, 0.3), (4.0, 0.05), (10.0, 1e-4), (14.0, 1e-6)], 1.0);
        let mid = 4.0 + 6.0 * (-3.0 - 0.05f64.log10()) / (-4.0 - 0.05f64.log10());
        for (target, expected) in [(0.05, 4.0), (1e-4, 10.0), (1e-5, 12.0), (1e-3, mid)] {
            let s = snr_at_ser(&c, target).unwrap();
            assert!((s - expected).abs() < 1e-9, "{target}: {s} vs {expected}");
        }
    }

    #[test]
    fn gain_of_curves_crossing_at_8_and_14_db() {
        let ris = curve(&[(0.0, 0.2), (8.0, 1e-2), (12.0, 1e-3)], 0.5);
        let direct = curve(&[(0.0, 0.5), (14.0, 1e-2), (20.0, 1e-3)], 0.5);
        assert!((gain_db(&ris, &direct, 1e-2).unwrap() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn unreachable_targets() {
        let c = vec![(0.0, 0.2), (1.0, 0.1), (2.0, 0.05)];
        assert_eq!(snr_at_ser(&c, 1e-3), None);
        assert_eq!(snr_at_ser(&c, 0.5), None);
        let z = vec![(0.0, 0.2), (1.0, 0.0)];
        assert_eq!(snr_at_ser(&z, 1e-3), None);
        assert_eq!(snr_at_ser(&c, 0.1), Some(1.0));
    }
}
