//! Checkpoint serialization.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! magic  b"CAPM"
//! u32    format version (currently 1)
//! u8     kind: 0 = full machine, 1 = restricted machine
//! kind 0: u32 n,           then f64 blocks b[n*n], theta[n*n], J[n*n], eps[n]
//! kind 1: u32 nv, u32 nh,  then f64 blocks w[nv*nh as re,im pairs],
//!                          J[nv*nh], bias_v[nv], bias_h[nh]
//! ```
//!
//! Matrices are row-major. Values round-trip bit-exactly.

use crate::error::{Error, Result};
use crate::model::{CapBmParams, CapRbmParams};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::path::Path;

const MAGIC: [u8; 4] = *b"CAPM";
const VERSION: u32 = 1;
const KIND_FULL: u8 = 0;
const KIND_RESTRICTED: u8 = 1;

/// A saved model of either variant.
#[derive(Clone, Debug)]
pub enum Checkpoint {
    Full(CapBmParams),
    Restricted(CapRbmParams),
}

impl Checkpoint {
    /// Unwraps a restricted-machine checkpoint or explains what was found.
    pub fn into_restricted(self) -> Result<CapRbmParams> {
        match self {
            Checkpoint::Restricted(p) => Ok(p),
            Checkpoint::Full(_) => Err(Error::Domain(
                "checkpoint holds a full machine, expected a restricted one".into(),
            )),
        }
    }

    /// Unwraps a full-machine checkpoint or explains what was found.
    pub fn into_full(self) -> Result<CapBmParams> {
        match self {
            Checkpoint::Full(p) => Ok(p),
            Checkpoint::Restricted(_) => Err(Error::Domain(
                "checkpoint holds a restricted machine, expected a full one".into(),
            )),
        }
    }
}

fn push_f64s<'a>(buf: &mut Vec<u8>, values: impl IntoIterator<Item = &'a f64>) {
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn save_checkpoint(path: &Path, model: &Checkpoint) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    match model {
        Checkpoint::Full(p) => {
            buf.push(KIND_FULL);
            buf.extend_from_slice(&u32::try_from(p.n()).expect("unit count fits u32").to_le_bytes());
            push_f64s(&mut buf, p.b.iter());
            push_f64s(&mut buf, p.theta.iter());
            push_f64s(&mut buf, p.jamp.iter());
            push_f64s(&mut buf, p.eps.iter());
        }
        Checkpoint::Restricted(p) => {
            buf.push(KIND_RESTRICTED);
            let nv = u32::try_from(p.n_visible()).expect("layer size fits u32");
            let nh = u32::try_from(p.n_hidden()).expect("layer size fits u32");
            buf.extend_from_slice(&nv.to_le_bytes());
            buf.extend_from_slice(&nh.to_le_bytes());
            for z in p.w.iter() {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
            push_f64s(&mut buf, p.jamp.iter());
            push_f64s(&mut buf, p.bias_v.iter());
            push_f64s(&mut buf, p.bias_h.iter());
        }
    }
    std::fs::write(path, &buf)?;
    Ok(())
}

/// Sequential reader over a byte buffer with explicit truncation errors.
struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Truncated {
                expected: (self.pos + n) as u64,
                found: self.buf.len() as u64,
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n * 8)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    /// Asserts that exactly `n_f64s` values remain. Checking the total in
    /// wide arithmetic up front keeps corrupt headers with huge dimensions
    /// from overflowing size math or triggering absurd allocations.
    fn expect_exact(&self, n_f64s: u128) -> Result<()> {
        let remaining = (self.buf.len() - self.pos) as u128;
        let expected = n_f64s * 8;
        if remaining < expected {
            return Err(Error::Truncated {
                expected: u64::try_from(self.pos as u128 + expected).unwrap_or(u64::MAX),
                found: self.buf.len() as u64,
            });
        }
        if remaining > expected {
            return Err(Error::TrailingData {
                extra: u64::try_from(remaining - expected).unwrap_or(u64::MAX),
            });
        }
        Ok(())
    }
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let buf = std::fs::read(path)?;
    let mut cur = Cursor { buf: &buf, pos: 0 };

    let magic: [u8; 4] = cur.take(4)?.try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic { expected: MAGIC, found: magic });
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion { found: version, supported: VERSION });
    }

    match cur.u8()? {
        KIND_FULL => {
            let n = cur.u32()? as usize;
            cur.expect_exact(3 * (n as u128) * (n as u128) + n as u128)?;
            let b = Array2::from_shape_vec((n, n), cur.f64s(n * n)?).unwrap();
            let theta = Array2::from_shape_vec((n, n), cur.f64s(n * n)?).unwrap();
            let jamp = Array2::from_shape_vec((n, n), cur.f64s(n * n)?).unwrap();
            let eps = Array1::from_vec(cur.f64s(n)?);
            Ok(Checkpoint::Full(CapBmParams::new(b, theta, jamp, eps)?))
        }
        KIND_RESTRICTED => {
            let nv = cur.u32()? as usize;
            let nh = cur.u32()? as usize;
            let pairs = (nv as u128) * (nh as u128);
            cur.expect_exact(3 * pairs + nv as u128 + nh as u128)?;
            let raw_w = cur.f64s(2 * nv * nh)?;
            let w = Array2::from_shape_vec(
                (nv, nh),
                raw_w.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect(),
            )
            .unwrap();
            let jamp = Array2::from_shape_vec((nv, nh), cur.f64s(nv * nh)?).unwrap();
            let bias_v = Array1::from_vec(cur.f64s(nv)?);
            let bias_h = Array1::from_vec(cur.f64s(nh)?);
            Ok(Checkpoint::Restricted(CapRbmParams::new(w, jamp, bias_v, bias_h)?))
        }
        k => Err(Error::Domain(format!("unknown checkpoint kind {k}"))),
    }
}
