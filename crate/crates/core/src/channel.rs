//! Single-path geometric channel over a uniform linear RIS array.
//!
//! The array response for azimuth `φ` is `[a]_n = exp(j·2π·(d/λ)·n·cos φ)`
//! for `n = 0..N`. Elevation is carried in [`Geometry`] but fixed at
//! broadside and does not enter the response.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math;
use crate::numerics::{ComplexVector, RngStream, C64};

/// Placement of the transmitter and receiver relative to the RIS.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub n_elements: usize,
    pub spacing_wavelengths: f64,
    pub incident_azimuth_deg: f64,
    pub receiver_azimuth_deg: f64,
    pub elevation_deg: f64,
}

impl Geometry {
    pub fn new(
        n_elements: usize,
        spacing_wavelengths: f64,
        incident_azimuth_deg: f64,
        receiver_azimuth_deg: f64,
    ) -> Result<Self> {
        let g = Self {
            n_elements,
            spacing_wavelengths,
            incident_azimuth_deg,
            receiver_azimuth_deg,
            elevation_deg: 90.0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(invalid("n_elements", "must be at least 1"));
        }
        if !(self.spacing_wavelengths > 0.0) || !self.spacing_wavelengths.is_finite() {
            return Err(invalid("spacing_wavelengths", "must be positive and finite"));
        }
        for (name, az) in [
            ("incident_azimuth_deg", self.incident_azimuth_deg),
            ("receiver_azimuth_deg", self.receiver_azimuth_deg),
        ] {
            if !(0.0..360.0).contains(&az) {
                return Err(invalid(name, "must lie in [0, 360)"));
            }
        }
        if !self.elevation_deg.is_finite() {
            return Err(invalid("elevation_deg", "must be finite"));
        }
        Ok(())
    }
}

impl Default for Geometry {
    /// 32 half-wavelength-spaced elements, broadside incidence, receiver at 110°.
    fn default() -> Self {
        Self {
            n_elements: 32,
            spacing_wavelengths: 0.5,
            incident_azimuth_deg: 90.0,
            receiver_azimuth_deg: 110.0,
            elevation_deg: 90.0,
        }
    }
}

/// Phase of element `n` in radians for a plane wave at `azimuth_deg`.
pub(crate) fn element_phase_rad(geometry: &Geometry, azimuth_deg: f64, n: usize) -> f64 {
    2.0 * math::PI * geometry.spacing_wavelengths * n as f64 * math::cos_deg(azimuth_deg)
}

/// Unit-modulus array response of the RIS for a plane wave at `azimuth_deg`.
pub fn array_response(geometry: &Geometry, azimuth_deg: f64) -> ComplexVector {
    let entries: Vec<C64> = (0..geometry.n_elements)
        .map(|n| {
            let phase = element_phase_rad(geometry, azimuth_deg, n);
            C64::new(math::cos(phase), math::sin(phase))
        })
        .collect();
    ComplexVector::new(entries).expect("geometry has at least one element")
}

/// A frozen single-path channel `h = α · a(φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    gain: f64,
    response: ComplexVector,
}

impl Channel {
    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn response(&self) -> &ComplexVector {
        &self.response
    }

    pub fn len(&self) -> usize {
        self.response.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Entry `n` of `α · a`.
    pub fn coefficient(&self, n: usize) -> C64 {
        self.response[n] * self.gain
    }

    /// The channel expanded to `α · a` as a vector.
    pub fn coefficients(&self) -> ComplexVector {
        ComplexVector::new(self.response.iter().map(|a| a * self.gain).collect())
            .expect("non-empty finite response")
    }
}

pub fn make_channel(geometry: &Geometry, azimuth_deg: f64, gain: f64) -> Result<Channel> {
    if !(gain > 0.0) || !gain.is_finite() {
        return Err(invalid("gain", "must be positive and finite"));
    }
    geometry.validate()?;
    Ok(Channel {
        gain,
        response: array_response(geometry, azimuth_deg),
    })
}

/// Returns `y + n` with `n` complex Gaussian of per-sample variance `sigma_sq`.
pub fn add_awgn(y: &ComplexVector, sigma_sq: f64, rng: &mut RngStream) -> Result<ComplexVector> {
    if !(sigma_sq >= 0.0) || !sigma_sq.is_finite() {
        return Err(invalid("sigma_sq", "must be finite and non-negative"));
    }
    ComplexVector::new(
        y.iter()
            .map(|s| s + rng.complex_normal(sigma_sq))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(n: usize, spacing: f64) -> Geometry {
        Geometry::new(n, spacing, 90.0, 110.0).unwrap()
    }

    #[test]
    fn broadside_is_all_ones() {
        for n in [1, 4, 32, 64] {
            for d in [0.25, 0.5, 1.3] {
                let a = array_response(&geom(n, d), 90.0);
                assert!(a.iter().all(|z| *z == C64::new(1.0, 0.0)));
            }
        }
    }

    #[test]
    fn endfire_alternates_sign() {
        let a = array_response(&geom(4, 0.5), 0.0);
        let expected = [1.0, -1.0, 1.0, -1.0];
        for (z, e) in a.iter().zip(expected) {
            assert!((z.re - e).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn phase_at_110_degrees() {
        let a = array_response(&geom(2, 0.5), 110.0);
        let deg = a[1].arg().to_degrees();
        assert!((deg - (-61.564)).abs() < 1e-3, "{deg}");
    }

    #[test]
    fn unit_modulus_and_constant_phase_step() {
        let g = geom(32, 0.5);
        for az in [93.0, 110.0, 137.5, 160.0, 251.0] {
            let a = array_response(&g, az);
            assert!(a.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
            let step = (a[1] / a[0]).arg();
            for n in 0..31 {
                let d = (a[n + 1] / a[n]).arg();
                assert!((d - step).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn channel_construction() {
        let g = geom(4, 0.5);
        let h = make_channel(&g, 90.0, 1.0).unwrap();
        assert_eq!(h.gain(), 1.0);
        assert!(h.response().iter().all(|z| *z == C64::new(1.0, 0.0)));
        let h2 = make_channel(&g, 123.0, 2.0).unwrap();
        assert!(h2.coefficients().iter().all(|z| (z.norm() - 2.0).abs() < 1e-12));
        assert_eq!(h2, make_channel(&g, 123.0, 2.0).unwrap());
        assert!(make_channel(&g, 90.0, 0.0).is_err());
        assert!(make_channel(&g, 90.0, -1.0).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(Geometry::new(0, 0.5, 90.0, 110.0).is_err());
        assert!(Geometry::new(4, 0.0, 90.0, 110.0).is_err());
        assert!(Geometry::new(4, 0.5, 360.0, 110.0).is_err());
        assert!(Geometry::new(4, 0.5, 90.0, -1.0).is_err());
        assert!(Geometry::default().validate().is_ok());
    }

    #[test]
    fn awgn_properties() {
        let y = ComplexVector::new(alloc::vec![C64::new(0.3, -0.2); 1000]).unwrap();
        let mut rng = RngStream::new(5, 1);
        assert_eq!(add_awgn(&y, 0.0, &mut rng).unwrap(), y);
        assert!(add_awgn(&y, -0.1, &mut rng).is_err());

        let big = ComplexVector::new(alloc::vec![C64::new(1.0, 1.0); 1_000_000]).unwrap();
        let out = add_awgn(&big, 0.5, &mut rng).unwrap();
        assert_eq!(out.len(), big.len());
        let p = out
            .iter()
            .zip(big.iter())
            .map(|(o, i)| (o - i).norm_sqr())
            .sum::<f64>()
            / big.len() as f64;
        assert!((p - 0.5).abs() < 0.005, "{p}");
    }
}
