//! 1-bit RIS reflection codebooks and the gain/rate figures used to pick
//! codewords.

use alloc::vec::Vec;

use crate::channel::{Channel, Geometry};
use crate::error::{check_len, invalid, Error, Result};
use crate::math;
use crate::numerics::{ComplexVector, C64};

/// Reflection vector with every element `+1` (0°) or `-1` (180°).
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword(Vec<f64>);

impl Codeword {
    pub fn new(elements: Vec<f64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty);
        }
        if elements.iter().any(|&e| e != 1.0 && e != -1.0) {
            return Err(invalid("codeword", "elements must be exactly +1 or -1"));
        }
        Ok(Self(elements))
    }

    pub fn all_ones(n: usize) -> Result<Self> {
        Self::new(alloc::vec![1.0; n])
    }

    pub fn elements(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Ordered codewords, each labelled with the reflection angle it was designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    codewords: Vec<Codeword>,
    target_angles_deg: Vec<f64>,
    incident_angle_deg: f64,
}

impl Codebook {
    pub fn new(
        codewords: Vec<Codeword>,
        target_angles_deg: Vec<f64>,
        incident_angle_deg: f64,
    ) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::EmptyCodebook);
        }
        check_len(codewords.len(), target_angles_deg.len())?;
        let n = codewords[0].len();
        for cw in &codewords {
            check_len(n, cw.len())?;
        }
        Ok(Self {
            codewords,
            target_angles_deg,
            incident_angle_deg,
        })
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Number of RIS elements per codeword.
    pub fn n_elements(&self) -> usize {
        self.codewords[0].len()
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn codeword(&self, index: usize) -> &Codeword {
        &self.codewords[index]
    }

    pub fn target_angles_deg(&self) -> &[f64] {
        &self.target_angles_deg
    }

    pub fn incident_angle_deg(&self) -> f64 {
        self.incident_angle_deg
    }
}

/// Wraps a phase to `(-180°, 180°]`.
pub fn wrap_phase_deg(phase_deg: f64) -> f64 {
    let mut w = phase_deg % 360.0;
    if w > 180.0 {
        w -= 360.0;
    } else if w <= -180.0 {
        w += 360.0;
    }
    w
}

/// 1-bit phase quantizer: wrapped phases in `[-90°, 90°]` map to 0°, the
/// rest to 180°. The boundary `±90°` maps to 0°.
pub fn quantize_phase_1bit(phase_deg: f64) -> f64 {
    if wrap_phase_deg(phase_deg).abs() <= 90.0 {
        0.0
    } else {
        180.0
    }
}

/// Per-element phase in degrees of the array response at `azimuth_deg`.
pub fn element_phases_deg(geometry: &Geometry, azimuth_deg: f64) -> Vec<f64> {
    let c = math::cos_deg(azimuth_deg);
    (0..geometry.n_elements)
        .map(|n| 360.0 * geometry.spacing_wavelengths * n as f64 * c)
        .collect()
}

/// Continuous (unquantized) design phases `ψ_i,n − ψ_d,n` in degrees.
pub fn continuous_phases_deg(geometry: &Geometry, incident_deg: f64, desired_deg: f64) -> Vec<f64> {
    element_phases_deg(geometry, incident_deg)
        .into_iter()
        .zip(element_phases_deg(geometry, desired_deg))
        .map(|(i, d)| i - d)
        .collect()
}

/// Designs the 1-bit codeword steering a wave from `incident_deg` to `desired_deg`.
pub fn design_codeword(geometry: &Geometry, incident_deg: f64, desired_deg: f64) -> Codeword {
    let elements = continuous_phases_deg(geometry, incident_deg, desired_deg)
        .into_iter()
        .map(|p| if quantize_phase_1bit(p) == 0.0 { 1.0 } else { -1.0 })
        .collect();
    Codeword::new(elements).expect("geometry has at least one element")
}

/// Builds `size` codewords at design angles evenly spaced over
/// `[min_deg, max_deg]`, both endpoints included.
pub fn build_codebook(
    geometry: &Geometry,
    incident_deg: f64,
    min_deg: f64,
    max_deg: f64,
    size: usize,
) -> Result<Codebook> {
    geometry.validate()?;
    if size < 2 {
        return Err(invalid("size", "codebook needs at least two codewords"));
    }
    if !(min_deg < max_deg) || !min_deg.is_finite() || !max_deg.is_finite() {
        return Err(invalid("angle range", "min must be strictly below max"));
    }
    let step = (max_deg - min_deg) / (size - 1) as f64;
    let angles: Vec<f64> = (0..size)
        .map(|i| if i == size - 1 { max_deg } else { min_deg + i as f64 * step })
        .collect();
    let codewords = angles
        .iter()
        .map(|&a| design_codeword(geometry, incident_deg, a))
        .collect();
    Codebook::new(codewords, angles, incident_deg)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa <= 1.0 {
        Ok(())
    } else {
        Err(invalid("kappa", "insertion-loss amplitude must lie in (0, 1]"))
    }
}

/// Passive reflection: `y[n] = ψ_n · κ · x[n]`.
pub fn apply_ris(x_ris: &ComplexVector, psi: &Codeword, kappa: f64) -> Result<ComplexVector> {
    check_len(psi.len(), x_ris.len())?;
    check_kappa(kappa)?;
    ComplexVector::new(
        x_ris
            .iter()
            .zip(psi.elements())
            .map(|(x, &p)| x * (p * kappa))
            .collect(),
    )
}

/// Complex gain from transmitter to receiver through the RIS for a
/// real-valued (possibly soft-combined) reflection vector `psi`:
/// `κ · Σ_n h_tr[n] · h_ri[n] · ψ_n`.
pub fn cascaded_response(h_tr: &Channel, h_ri: &Channel, psi: &[f64], kappa: f64) -> Result<C64> {
    check_len(h_tr.len(), h_ri.len())?;
    check_len(h_tr.len(), psi.len())?;
    let sum: C64 = h_tr
        .response()
        .iter()
        .zip(h_ri.response().iter())
        .zip(psi)
        .map(|((a, b), &p)| a * b * p)
        .sum();
    Ok(sum * (kappa * h_tr.gain() * h_ri.gain()))
}

/// `κ² · α_tr² · α_ri² · |Σ_n a_tr[n] a_ri[n] ψ_n|²`.
pub fn effective_gain(h_tr: &Channel, h_ri: &Channel, psi: &Codeword, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(cascaded_response(h_tr, h_ri, psi.elements(), kappa)?.norm_sqr())
}

/// `log₂(1 + P_t · gain / σ²)`.
pub fn achievable_rate(
    h_tr: &Channel,
    h_ri: &Channel,
    psi: &Codeword,
    kappa: f64,
    pt: f64,
    sigma_sq: f64,
) -> Result<f64> {
    if !(pt > 0.0) {
        return Err(invalid("pt", "transmit power must be positive"));
    }
    if !(sigma_sq > 0.0) {
        return Err(invalid("sigma_sq", "noise variance must be positive"));
    }
    let g = effective_gain(h_tr, h_ri, psi, kappa)?;
    Ok(math::log2(1.0 + pt * g / sigma_sq))
}

fn codebook_gains(h_tr: &Channel, h_ri: &Channel, codebook: &Codebook, kappa: f64) -> Result<Vec<f64>> {
    if codebook.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    codebook
        .codewords()
        .iter()
        .map(|cw| effective_gain(h_tr, h_ri, cw, kappa))
        .collect()
}

/// Exhaustive search for the codeword with the largest effective gain.
/// Ties go to the lowest index.
pub fn oracle_best_beam(h_tr: &Channel, h_ri: &Channel, codebook: &Codebook, kappa: f64) -> Result<usize> {
    let gains = codebook_gains(h_tr, h_ri, codebook, kappa)?;
    let mut best = 0;
    for (i, &g) in gains.iter().enumerate().skip(1) {
        if g > gains[best] {
            best = i;
        }
    }
    Ok(best)
}

/// All codebook indices ordered by descending effective gain (stable on ties).
pub fn rank_beams(h_tr: &Channel, h_ri: &Channel, codebook: &Codebook, kappa: f64) -> Result<Vec<usize>> {
    let gains = codebook_gains(h_tr, h_ri, codebook, kappa)?;
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&a, &b| gains[b].partial_cmp(&gains[a]).expect("finite gains"));
    Ok(order)
}
