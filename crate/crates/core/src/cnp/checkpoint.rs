//! Binary model checkpoints: little-endian, versioned, bit-exact round trip.
//!
//! Layout: magic `YAWCNP`, `u32` format version, `u64` d_e, 4 + 4 `f64`
//! normalization means and spreads, `u64` training step, `f64` best
//! validation NLL, then the feature encoder, context encoder and decoder.
//! Each network is a `u64` layer count followed per layer by `u64` input
//! width, `u64` output width, the row-major weights and the biases.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::mlp::{Layer, Mlp};
use super::model::{CnpModel, NormStats};
use crate::error::{Error, Result};

const MAGIC: &[u8; 6] = b"YAWCNP";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: CnpModel,
    /// Optimizer steps taken when the checkpoint was written.
    pub step: u64,
    /// Best validation NLL seen so far; NaN if never evaluated.
    pub best_val_nll: f64,
}

impl Checkpoint {
    pub fn new(model: CnpModel) -> Self {
        Self {
            model,
            step: 0,
            best_val_nll: f64::NAN,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 * self.model.num_params() + 128);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        put_u64(&mut out, self.model.d_e as u64);
        for v in self.model.norm.mean.iter().chain(&self.model.norm.std) {
            put_f64(&mut out, *v);
        }
        put_u64(&mut out, self.step);
        put_f64(&mut out, self.best_val_nll);
        for net in [&self.model.feature_encoder, &self.model.context_encoder, &self.model.decoder] {
            put_u64(&mut out, net.layers.len() as u64);
            for layer in &net.layers {
                put_u64(&mut out, layer.inputs() as u64);
                put_u64(&mut out, layer.outputs() as u64);
                for v in layer.w.iter().chain(layer.b.iter()) {
                    put_f64(&mut out, *v);
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(Error::Checkpoint("not a CNP checkpoint (bad magic)".into()));
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format version {version}, expected {FORMAT_VERSION}"
            )));
        }
        let d_e = r.size()?;
        let mut norm = NormStats::default();
        for v in norm.mean.iter_mut().chain(norm.std.iter_mut()) {
            *v = r.f64()?;
        }
        let step = r.u64()?;
        let best_val_nll = r.f64()?;
        let mut nets = Vec::with_capacity(3);
        for _ in 0..3 {
            let count = r.size()?;
            let mut layers = Vec::with_capacity(count.min(64));
            for _ in 0..count {
                let (rows, cols) = (r.size()?, r.size()?);
                let len = rows
                    .checked_mul(cols)
                    .ok_or_else(|| Error::Checkpoint("layer size overflows".into()))?;
                let w = (0..len).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
                let b = (0..cols).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
                layers.push(Layer {
                    w: Array2::from_shape_vec((rows, cols), w).map_err(|e| Error::Checkpoint(e.to_string()))?,
                    b: Array1::from(b),
                });
            }
            if layers.is_empty() {
                return Err(Error::Checkpoint("network without layers".into()));
            }
            nets.push(Mlp { layers });
        }
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        let decoder = nets.pop().expect("three networks");
        let context_encoder = nets.pop().expect("three networks");
        let feature_encoder = nets.pop().expect("three networks");
        let model = CnpModel {
            feature_encoder,
            context_encoder,
            decoder,
            d_e,
            norm,
        };
        model.validate().map_err(|e| Error::Checkpoint(format!("inconsistent model: {e}")))?;
        Ok(Self {
            model,
            step,
            best_val_nll,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_bytes(&fs::read(path)?)
    }
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Checkpoint("truncated checkpoint".into()))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn size(&mut self) -> Result<usize> {
        let v = self.u64()?;
        if v > (1 << 32) {
            return Err(Error::Checkpoint(format!("implausible dimension {v}")));
        }
        Ok(v as usize)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}
