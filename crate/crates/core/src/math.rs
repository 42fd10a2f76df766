//! Thin wrappers over `libm` so the crate builds without `std`.

pub(crate) use libm::{cos, erfc, exp, log, log2, pow, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;

pub(crate) fn to_radians(deg: f64) -> f64 {
    deg * (PI / 180.0)
}

/// Cosine of an angle in degrees, exact at multiples of 90°.
pub(crate) fn cos_deg(deg: f64) -> f64 {
    let r = deg.rem_euclid_360();
    if r == 90.0 || r == 270.0 {
        0.0
    } else if r == 0.0 {
        1.0
    } else if r == 180.0 {
        -1.0
    } else {
        cos(to_radians(deg))
    }
}

pub(crate) trait RemEuclid360 {
    fn rem_euclid_360(self) -> f64;
}

impl RemEuclid360 for f64 {
    fn rem_euclid_360(self) -> f64 {
        let r = self % 360.0;
        let r = if r < 0.0 { r + 360.0 } else { r };
        if r >= 360.0 {
            0.0
        } else {
            r
        }
    }
}
