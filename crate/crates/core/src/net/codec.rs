//! Binary model container.
//!
//! All integers and floats are little-endian; floats are raw IEEE-754 bits
//! so a round trip is exact.
//!
//! ```text
//! magic            4 bytes  "GTNM"
//! version          u32      FORMAT_VERSION
//! input_dim        u32
//! output_dim       u32
//! hidden_layers    u32
//! width            u32
//! leaky_slope      f64
//! batch_norm       u8       0 or 1
//! seed             u64
//! source tag       u8       0 = standard normal, 1 = Gaussian mixture
//!   (mixture)      tensor weights[k], tensor means[k*input_dim], tensor stds[k*input_dim]
//! output scale     tensor   [output_dim]
//! output offset    tensor   [output_dim]
//! tensor count     u32
//! parameters       tensor*  in Mlp::parameters order
//! running stats    tensor*  mean, var per hidden layer (batch norm only)
//! checksum         u32      CRC-32 (IEEE) of every preceding byte
//!
//! tensor := len u64, then len f64 values
//! ```

use alloc::format;
use alloc::vec::Vec;

use super::mlp::{Mlp, MlpConfig};
use super::source::Source;
use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rng::RngState;

pub const MAGIC: &[u8; 4] = b"GTNM";
pub const FORMAT_VERSION: u32 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn tensor(&mut self, values: &[f64]) {
        self.u64(values.len() as u64);
        values.iter().for_each(|v| self.f64(*v));
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Format(format!("truncated while reading {what} at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }
    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
    fn tensor(&mut self, what: &str, expected: usize) -> Result<Vec<f64>> {
        let len = self.u64(what)?;
        if len != expected as u64 {
            return Err(Error::Format(format!(
                "{what}: file holds {len} values but the declared shape needs {expected}"
            )));
        }
        if (self.buf.len() - self.pos) / 8 < expected {
            return Err(Error::Format(format!("truncated while reading {what}")));
        }
        (0..expected).map(|_| self.f64(what)).collect()
    }
}

pub fn encode_model(model: &Mlp) -> Vec<u8> {
    let cfg = model.config();
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION);
    w.u32(cfg.input_dim as u32);
    w.u32(cfg.output_dim as u32);
    w.u32(cfg.hidden_layers as u32);
    w.u32(cfg.width as u32);
    w.f64(cfg.leaky_slope);
    w.u8(cfg.batch_norm as u8);
    w.u64(cfg.seed);
    match model.source() {
        Source::StandardNormal => w.u8(0),
        Source::Mixture { weights, means, stds } => {
            w.u8(1);
            w.tensor(weights);
            w.tensor(means.as_slice());
            w.tensor(stds.as_slice());
        }
    }
    w.tensor(model.output_scale());
    w.tensor(model.output_offset());
    let params = model.parameters();
    w.u32(params.len() as u32);
    for p in &params {
        w.tensor(p);
    }
    for bn in &model.norms {
        w.tensor(&bn.running_mean);
        w.tensor(&bn.running_var);
    }
    let crc = crc32fast::hash(&w.0);
    w.u32(crc);
    w.0
}

pub fn decode_model(bytes: &[u8]) -> Result<Mlp> {
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let mut r = Reader { buf: bytes, pos: 4 };
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {version} (this build reads {FORMAT_VERSION})"
        )));
    }
    if bytes.len() < 12 {
        return Err(Error::Format("truncated file".into()));
    }
    let body_len = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[body_len..].try_into().expect("4 bytes"));
    if crc32fast::hash(&bytes[..body_len]) != stored {
        return Err(Error::Format("checksum mismatch (file truncated or corrupted)".into()));
    }
    let mut r = Reader { buf: &bytes[..body_len], pos: r.pos };

    let config = MlpConfig {
        input_dim: r.u32("input_dim")? as usize,
        output_dim: r.u32("output_dim")? as usize,
        hidden_layers: r.u32("hidden_layers")? as usize,
        width: r.u32("width")? as usize,
        leaky_slope: r.f64("leaky_slope")?,
        batch_norm: match r.u8("batch_norm")? {
            0 => false,
            1 => true,
            v => return Err(Error::Format(format!("batch_norm flag must be 0 or 1, found {v}"))),
        },
        seed: r.u64("seed")?,
    };
    config.validate().map_err(|e| Error::Format(format!("bad config: {e}")))?;
    let d_in = config.input_dim;

    let source = match r.u8("source tag")? {
        0 => Source::StandardNormal,
        1 => {
            let k = {
                let save = r.pos;
                let k = r.u64("mixture weights")? as usize;
                r.pos = save;
                k
            };
            if k == 0 || k > body_len / 8 {
                return Err(Error::Format(format!("implausible mixture size {k}")));
            }
            let weights = r.tensor("mixture weights", k)?;
            let means = r.tensor("mixture means", k * d_in)?;
            let stds = r.tensor("mixture stds", k * d_in)?;
            let to_points = |v: Vec<f64>| PointSet::from_flat(d_in, v).map_err(|e| Error::Format(format!("{e}")));
            Source::Mixture { weights, means: to_points(means)?, stds: to_points(stds)? }
        }
        t => return Err(Error::Format(format!("unknown source tag {t}"))),
    };
    let scale = r.tensor("output scale", config.output_dim)?;
    let offset = r.tensor("output offset", config.output_dim)?;

    // Build a template for shapes, then overwrite every value from the file.
    let mut model = Mlp::new(config, &mut RngState::new(0))?;
    model.set_source(source);
    model
        .set_output_transform(scale, offset)
        .map_err(|e| Error::Format(format!("{e}")))?;
    let shapes = model.parameter_shapes();
    let count = r.u32("tensor count")? as usize;
    if count != shapes.len() {
        return Err(Error::Format(format!(
            "file holds {count} parameter tensors but the declared architecture has {}",
            shapes.len()
        )));
    }
    {
        let mut params = model.parameters_mut();
        for (i, p) in params.iter_mut().enumerate() {
            let values = r.tensor(&format!("parameter tensor {i}"), p.len())?;
            p.copy_from_slice(&values);
        }
    }
    let width = config.width;
    for (l, bn) in model.norms.iter_mut().enumerate() {
        bn.running_mean = r.tensor(&format!("running mean {l}"), width)?;
        bn.running_var = r.tensor(&format!("running var {l}"), width)?;
    }
    if r.pos != body_len {
        return Err(Error::Format(format!("{} unexpected trailing bytes", body_len - r.pos)));
    }
    if !model.check_finite() {
        return Err(Error::Format("non-finite parameter".into()));
    }
    model.set_train_mode(false);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::sample_standard_normal;
    use alloc::vec;

    fn sample_model(batch_norm: bool) -> Mlp {
        let cfg = MlpConfig { batch_norm, seed: 3, ..MlpConfig::new(2, 2, 3, 5) };
        let mut m = Mlp::from_seed(cfg).unwrap();
        m.forward(&sample_standard_normal(&mut RngState::new(1), 10, 2)).unwrap();
        m.set_train_mode(false);
        m.set_output_transform(vec![2.0, 0.5], vec![0.5, -1.0]).unwrap();
        m
    }

    #[test]
    fn round_trip_is_exact() {
        for bn in [false, true] {
            let m = sample_model(bn);
            let back = decode_model(&encode_model(&m)).unwrap();
            assert_eq!(back, m);
            let probe = sample_standard_normal(&mut RngState::new(2), 7, 2);
            assert_eq!(back.apply(&probe).unwrap(), m.apply(&probe).unwrap());
        }
    }

    #[test]
    fn mixture_source_round_trips() {
        let mut m = sample_model(false);
        m.set_source(Source::Mixture {
            weights: vec![0.25, 0.75],
            means: PointSet::from_rows(&[[0.0, 1.0], [4.0, 1.0]]).unwrap(),
            stds: PointSet::from_rows(&[[0.3, 0.3], [0.2, 0.4]]).unwrap(),
        });
        assert_eq!(decode_model(&encode_model(&m)).unwrap(), m);
    }

    #[test]
    fn truncation_and_corruption_are_errors() {
        let bytes = encode_model(&sample_model(true));
        for cut in [0, 3, 10, 40, bytes.len() - 1] {
            assert!(decode_model(&bytes[..cut]).is_err(), "cut at {cut}");
        }
        let mut flipped = bytes.clone();
        let mid = flipped.len() / 2;
        flipped[mid] ^= 0x40;
        assert!(matches!(decode_model(&flipped), Err(Error::Format(_))));
    }

    #[test]
    fn version_mismatch_is_reported() {
        let mut bytes = encode_model(&sample_model(false));
        bytes[4..8].copy_from_slice(&7u32.to_le_bytes());
        let err = decode_model(&bytes).unwrap_err();
        assert!(format!("{err}").contains("version 7"));
    }

    #[test]
    fn declared_dims_must_match_contents() {
        let mut bytes = encode_model(&sample_model(false));
        // bump input_dim from 2 to 3 and re-seal the checksum
        bytes[8..12].copy_from_slice(&3u32.to_le_bytes());
        let body = bytes.len() - 4;
        let crc = crc32fast::hash(&bytes[..body]);
        bytes[body..].copy_from_slice(&crc.to_le_bytes());
        let err = decode_model(&bytes).unwrap_err();
        assert!(format!("{err}").contains("declared shape"), "{err}");
    }
}
