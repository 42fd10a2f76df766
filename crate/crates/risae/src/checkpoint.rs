//! Binary model checkpoints. All numbers are little-endian; reals are
//! stored as raw IEEE-754 bits, so a save/load round trip is bit-exact.
//!
//! ```text
//! magic "RISAECKP" | version u32
//! scenario: n u64, spacing f64, incident f64, receiver f64, elevation f64,
//!           codebook size u64, min f64, max f64, kappa_db f64, k u32,
//!           gain_tr f64, gain_ri f64, encoder input u8, selector mode u8
//! encoder, selector, decoder: layers u32, then per layer
//!           in u64, out u64, activation u8, weights (out·in f64), biases (out f64)
//! ```

use std::path::Path;

use risae_core::autoencoder::{Architecture, EncoderInput, EndToEndModel, Scenario, SelectorMode};
use risae_core::channel::Geometry;
use risae_core::neural::{Activation, Dense, LayerSpec, Mlp};

use crate::error::{io_error, CliError, Result};

const MAGIC: &[u8; 8] = b"RISAECKP";
const VERSION: u32 = 1;

pub fn to_bytes(model: &EndToEndModel) -> Vec<u8> {
    let mut w = Vec::new();
    w.extend_from_slice(MAGIC);
    w.extend_from_slice(&VERSION.to_le_bytes());
    let s = model.scenario();
    let g = &s.geometry;
    put_u64(&mut w, g.n_elements as u64);
    for v in [g.spacing_wavelengths, g.incident_azimuth_deg, g.receiver_azimuth_deg, g.elevation_deg] {
        put_f64(&mut w, v);
    }
    put_u64(&mut w, s.codebook_size as u64);
    for v in [s.codebook_min_deg, s.codebook_max_deg, s.kappa_db] {
        put_f64(&mut w, v);
    }
    w.extend_from_slice(&s.k_bits.to_le_bytes());
    put_f64(&mut w, s.gain_tr);
    put_f64(&mut w, s.gain_ri);
    w.push(match s.architecture.encoder_input {
        EncoderInput::OneHot => 0,
        EncoderInput::Scalar => 1,
    });
    w.push(match model.selector_mode() {
        SelectorMode::Soft => 0,
        SelectorMode::HardStraightThrough => 1,
        SelectorMode::OracleOnly => 2,
    });
    for net in [model.encoder(), model.selector(), model.decoder()] {
        put_mlp(&mut w, net);
    }
    w
}

pub fn from_bytes(bytes: &[u8]) -> std::result::Result<EndToEndModel, String> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err("not a checkpoint (bad magic)".into());
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let geometry = Geometry {
        n_elements: r.usize()?,
        spacing_wavelengths: r.f64()?,
        incident_azimuth_deg: r.f64()?,
        receiver_azimuth_deg: r.f64()?,
        elevation_deg: r.f64()?,
    };
    let codebook_size = r.usize()?;
    let codebook_min_deg = r.f64()?;
    let codebook_max_deg = r.f64()?;
    let kappa_db = r.f64()?;
    let k_bits = r.u32()?;
    let gain_tr = r.f64()?;
    let gain_ri = r.f64()?;
    let encoder_input = match r.u8()? {
        0 => EncoderInput::OneHot,
        1 => EncoderInput::Scalar,
        v => return Err(format!("unknown encoder input tag {v}")),
    };
    let mode = match r.u8()? {
        0 => SelectorMode::Soft,
        1 => SelectorMode::HardStraightThrough,
        2 => SelectorMode::OracleOnly,
        v => return Err(format!("unknown selector mode tag {v}")),
    };
    let encoder = r.mlp()?;
    let selector = r.mlp()?;
    let decoder = r.mlp()?;
    if r.pos != bytes.len() {
        return Err("trailing bytes".into());
    }
    let hidden = |m: &Mlp| m.specs()[..m.layers().len() - 1].iter().map(|s| s.output_width).collect();
    let scenario = Scenario {
        geometry,
        codebook_size,
        codebook_min_deg,
        codebook_max_deg,
        kappa_db,
        k_bits,
        gain_tr,
        gain_ri,
        architecture: Architecture {
            encoder_hidden: hidden(&encoder),
            selector_hidden: hidden(&selector),
            decoder_hidden: hidden(&decoder),
            encoder_input,
        },
    };
    EndToEndModel::from_parts(scenario, mode, encoder, selector, decoder).map_err(|e| e.to_string())
}

pub fn save(model: &EndToEndModel, path: &Path) -> Result<()> {
    std::fs::write(path, to_bytes(model)).map_err(io_error(path))
}

pub fn load(path: &Path) -> Result<EndToEndModel> {
    if !path.exists() {
        return Err(CliError::MissingCheckpoint(path.to_path_buf()));
    }
    let bytes = std::fs::read(path).map_err(io_error(path))?;
    from_bytes(&bytes).map_err(|reason| CliError::Checkpoint {
        path: path.to_path_buf(),
        reason,
    })
}

fn put_u64(w: &mut Vec<u8>, v: u64) {
    w.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(w: &mut Vec<u8>, v: f64) {
    w.extend_from_slice(&v.to_bits().to_le_bytes());
}

fn put_mlp(w: &mut Vec<u8>, net: &Mlp) {
    w.extend_from_slice(&(net.layers().len() as u32).to_le_bytes());
    for layer in net.layers() {
        let s = layer.spec();
        put_u64(w, s.input_width as u64);
        put_u64(w, s.output_width as u64);
        w.push(match s.activation {
            Activation::Relu => 0,
            Activation::Linear => 1,
            Activation::Softmax => 2,
        });
        for &v in layer.weights().iter().chain(layer.biases()) {
            put_f64(w, v);
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or("truncated file")?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> std::result::Result<u8, String> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn usize(&mut self) -> std::result::Result<usize, String> {
        usize::try_from(self.u64()?).map_err(|_| "size does not fit in memory".to_string())
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn reals(&mut self, n: usize) -> std::result::Result<Vec<f64>, String> {
        if n > (self.bytes.len() - self.pos) / 8 {
            return Err("truncated file".into());
        }
        (0..n).map(|_| self.f64()).collect()
    }

    fn mlp(&mut self) -> std::result::Result<Mlp, String> {
        let n = self.u32()? as usize;
        let mut layers = Vec::with_capacity(n.min(64));
        for _ in 0..n {
            let input = self.usize()?;
            let output = self.usize()?;
            let activation = match self.u8()? {
                0 => Activation::Relu,
                1 => Activation::Linear,
                2 => Activation::Softmax,
                v => return Err(format!("unknown activation tag {v}")),
            };
            let count = input.checked_mul(output).ok_or("layer too large")?;
            let weights = self.reals(count)?;
            let biases = self.reals(output)?;
            let layer = Dense::from_parts(LayerSpec::new(input, output, activation), weights, biases)
                .map_err(|e| e.to_string())?;
            layers.push(layer);
        }
        Mlp::from_layers(layers).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use risae_core::RngStream;

    fn small_model() -> EndToEndModel {
        let scenario = Scenario {
            architecture: Architecture::reduced(32),
            ..Scenario::default()
        };
        EndToEndModel::initialize(&scenario, SelectorMode::Soft, &mut RngStream::new(4, 0)).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = small_model();
        let bytes = to_bytes(&m);
        let back = from_bytes(&bytes).unwrap();
        assert_eq!(back.scenario(), m.scenario());
        assert_eq!(back.parameter_count(), m.parameter_count());
        for i in 0..m.parameter_count() {
            assert_eq!(back.parameter(i).to_bits(), m.parameter(i).to_bits());
        }
        assert_eq!(to_bytes(&back), bytes);
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let bytes = to_bytes(&small_model());
        assert!(from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(from_bytes(&bad).is_err());
        let mut extra = bytes;
        extra.push(0);
        assert!(from_bytes(&extra).is_err());
    }
}
