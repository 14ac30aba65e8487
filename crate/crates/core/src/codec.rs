//! Binary model format used to broadcast the elected model between sites.
//!
//! All integers are little-endian `u32`, all reals IEEE-754 binary64
//! little-endian. Layout:
//!
//! ```text
//! "DSVM"                     magic, 4 bytes
//! u32 version                = 1
//! u8  kernel kind            0 = linear, 1 = rbf
//! f64 gamma                  0 for linear
//! f64 c, f64 kkt_tolerance, u32 max_passes
//! u32 feature count q
//! u32 N, then N × (u32 label, u32 name length, name bytes)     class map
//! u32 P, then P × (u32 first, u32 second)                      pair table
//! P × (u32 sv count m, m·q f64 support vectors, m i8 labels,
//!      m f64 alphas, f64 bias)                                   pair bodies
//! u32 CRC-32 of every preceding byte
//! ```

use crate::error::{DecodeError, Result};
use crate::ovo::{ClassLabel, OvoModel, PairModel};
use crate::svm::{BinaryLabel, BinaryModel, FeatureVector, KernelSpec, TrainParams};

pub const MAGIC: &[u8; 4] = b"DSVM";
pub const FORMAT_VERSION: u32 = 1;

const KERNEL_LINEAR: u8 = 0;
const KERNEL_RBF: u8 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        let v = u32::try_from(v).expect("count exceeds u32 range");
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn serialize_model(model: &OvoModel) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION as usize);
    match model.params.kernel {
        KernelSpec::Linear => {
            w.u8(KERNEL_LINEAR);
            w.f64(0.0);
        }
        KernelSpec::Rbf { gamma } => {
            w.u8(KERNEL_RBF);
            w.f64(gamma);
        }
    }
    w.f64(model.params.c);
    w.f64(model.params.kkt_tolerance);
    w.u32(model.params.max_passes as usize);
    w.u32(model.dim);

    w.u32(model.classes.len());
    for (label, name) in model.classes.iter().zip(&model.class_names) {
        w.u32(label.0);
        w.u32(name.len());
        w.0.extend_from_slice(name.as_bytes());
    }

    w.u32(model.pairs.len());
    for p in &model.pairs {
        w.u32(p.first);
        w.u32(p.second);
    }
    for p in &model.pairs {
        let m = &p.model;
        w.u32(m.support_vectors.len());
        for sv in &m.support_vectors {
            for &x in sv.as_slice() {
                w.f64(x);
            }
        }
        for l in &m.support_labels {
            w.u8(l.as_i8() as u8);
        }
        for &a in &m.alphas {
            w.f64(a);
        }
        w.f64(m.bias);
    }

    let crc = crc32fast::hash(&w.0);
    w.0.extend_from_slice(&crc.to_le_bytes());
    w.0
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        let end = self.pos.checked_add(n).ok_or(DecodeError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(DecodeError::Truncated)?;
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<usize, DecodeError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }
    fn f64(&mut self) -> Result<f64, DecodeError> {
        let b = self.take(8)?;
        let mut a = [0u8; 8];
        a.copy_from_slice(b);
        Ok(f64::from_le_bytes(a))
    }
    /// Bounds a declared element count by the bytes actually left.
    fn count(&mut self, elem_bytes: usize) -> Result<usize, DecodeError> {
        let n = self.u32()?;
        if n.saturating_mul(elem_bytes.max(1)) > self.buf.len() - self.pos {
            return Err(DecodeError::Truncated);
        }
        Ok(n)
    }
}

fn corrupt(msg: impl Into<String>) -> DecodeError {
    DecodeError::Corrupt(msg.into())
}

pub fn deserialize_model(bytes: &[u8]) -> Result<OvoModel> {
    Ok(decode(bytes)?)
}

fn decode(bytes: &[u8]) -> Result<OvoModel, DecodeError> {
    if bytes.len() < 12 {
        return Err(DecodeError::Truncated);
    }
    if &bytes[..4] != MAGIC {
        return Err(DecodeError::BadMagic);
    }
    let version = u32::from_le_bytes([bytes[4], bytes[5], bytes[6], bytes[7]]);
    if version != FORMAT_VERSION {
        return Err(DecodeError::UnsupportedVersion(version));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes([trailer[0], trailer[1], trailer[2], trailer[3]]);
    if crc32fast::hash(body) != stored {
        return Err(DecodeError::ChecksumMismatch);
    }

    let mut r = Reader { buf: body, pos: 8 };
    let kind = r.u8()?;
    let gamma = r.f64()?;
    let kernel = match kind {
        KERNEL_LINEAR => KernelSpec::Linear,
        KERNEL_RBF => KernelSpec::Rbf { gamma },
        other => return Err(corrupt(format!("unknown kernel kind {other}"))),
    };
    let params = TrainParams {
        c: r.f64()?,
        kkt_tolerance: r.f64()?,
        max_passes: r.u32()? as u32,
        kernel,
    };
    params.validate().map_err(|e| corrupt(e.to_string()))?;
    let dim = r.u32()?;

    let n_classes = r.count(8)?;
    let mut classes = Vec::with_capacity(n_classes);
    let mut class_names = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        classes.push(ClassLabel(r.u32()?));
        let len = r.u32()?;
        let name = std::str::from_utf8(r.take(len)?).map_err(|_| corrupt("class name is not utf-8"))?;
        class_names.push(name.to_string());
    }

    let n_pairs = r.count(8)?;
    let mut index = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        index.push((r.u32()?, r.u32()?));
    }
    let mut pairs = Vec::with_capacity(n_pairs);
    for (first, second) in index {
        let m = r.count(dim * 8 + 9)?;
        let mut svs = Vec::with_capacity(m);
        for _ in 0..m {
            let mut v = Vec::with_capacity(dim);
            for _ in 0..dim {
                v.push(r.f64()?);
            }
            svs.push(FeatureVector::new(v).map_err(|_| corrupt("non-finite support vector"))?);
        }
        let mut labels = Vec::with_capacity(m);
        for _ in 0..m {
            labels.push(BinaryLabel::from_i8(r.u8()? as i8).ok_or_else(|| corrupt("bad binary label"))?);
        }
        let mut alphas = Vec::with_capacity(m);
        for _ in 0..m {
            alphas.push(r.f64()?);
        }
        let bias = r.f64()?;
        let model = BinaryModel::from_parts(svs, labels, alphas, bias, kernel).map_err(|e| corrupt(e.to_string()))?;
        pairs.push(PairModel { first, second, model });
    }
    if r.pos != body.len() {
        return Err(corrupt("trailing bytes after last pair"));
    }
    OvoModel::from_parts(classes, class_names, pairs, params, dim).map_err(|e| corrupt(e.to_string()))
}
