//! Datasets of complex-valued vectors: container, binary file format,
//! band-wise amplitude thresholding, synthetic bars imagery, and rendering.
//!
//! File layout ("CPXD", all little-endian):
//!
//! ```text
//! magic  b"CPXD"
//! u32    format version (currently 1)
//! u32    n_samples
//! u32    n_units
//! u32    width   (0 when the dataset has no 2-D shape)
//! u32    height  (0 when the dataset has no 2-D shape)
//! f64    payload: n_samples * n_units complex values as (re, im) pairs,
//!        sample-major
//! ```

mod bars;
mod render;

pub use bars::{gen_bars, BarsConfig};
pub use render::render_complex_image;

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::path::Path;

const MAGIC: [u8; 4] = *b"CPXD";
const VERSION: u32 = 1;

/// Default modulus cutoff for [`threshold_normalize`].
pub const DEFAULT_CUTOFF: f64 = 0.15;

// ---------------------------------------------------------------------------
// container
// ---------------------------------------------------------------------------

/// A set of equally sized complex sample vectors, optionally carrying a 2-D
/// shape `(width, height)` with `width * height == n_units` for rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexDataset {
    n_units: usize,
    shape: Option<(usize, usize)>,
    values: Vec<Complex64>,
}

fn check_shape(n_units: usize, shape: Option<(usize, usize)>) -> Result<()> {
    if let Some((w, h)) = shape {
        if w == 0 || h == 0 {
            return Err(Error::Shape(format!("degenerate image shape {w}x{h}")));
        }
        if w * h != n_units {
            return Err(Error::Shape(format!(
                "image shape {w}x{h} does not cover {n_units} units"
            )));
        }
    }
    Ok(())
}

impl ComplexDataset {
    /// An empty dataset of `n_units`-long samples.
    pub fn new(n_units: usize, shape: Option<(usize, usize)>) -> Result<Self> {
        if n_units == 0 {
            return Err(Error::Shape("samples must have at least one unit".into()));
        }
        check_shape(n_units, shape)?;
        Ok(ComplexDataset { n_units, shape, values: Vec::new() })
    }

    pub fn push_sample(&mut self, sample: &[Complex64]) -> Result<()> {
        if sample.len() != self.n_units {
            return Err(Error::Shape(format!(
                "sample has {} units, dataset holds {}-unit samples",
                sample.len(),
                self.n_units
            )));
        }
        if sample.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("sample entries".into()));
        }
        self.values.extend_from_slice(sample);
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        self.values.len() / self.n_units
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn shape(&self) -> Option<(usize, usize)> {
        self.shape
    }

    pub fn sample(&self, i: usize) -> &[Complex64] {
        &self.values[i * self.n_units..(i + 1) * self.n_units]
    }

    pub fn iter_samples(&self) -> impl Iterator<Item = &[Complex64]> {
        self.values.chunks_exact(self.n_units)
    }

    /// A new dataset holding the listed samples (duplicates allowed).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut out = ComplexDataset::new(self.n_units, self.shape)?;
        for &i in indices {
            if i >= self.n_samples() {
                return Err(Error::Shape(format!(
                    "sample index {i} out of range for {} samples",
                    self.n_samples()
                )));
            }
            out.push_sample(self.sample(i))?;
        }
        Ok(out)
    }

    /// Mean fraction of entries with nonzero modulus, a quick summary of how
    /// sparse the dataset is.
    pub fn mean_on_fraction(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let on = self.values.iter().filter(|z| z.norm() > 0.0).count();
        on as f64 / self.values.len() as f64
    }
}

// ---------------------------------------------------------------------------
// file format
// ---------------------------------------------------------------------------

pub fn save_dataset(path: &Path, ds: &ComplexDataset) -> Result<()> {
    let mut buf = Vec::with_capacity(24 + ds.values.len() * 16);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    let dims = [
        u32::try_from(ds.n_samples()).expect("sample count fits u32"),
        u32::try_from(ds.n_units).expect("unit count fits u32"),
        u32::try_from(ds.shape.map_or(0, |s| s.0)).expect("width fits u32"),
        u32::try_from(ds.shape.map_or(0, |s| s.1)).expect("height fits u32"),
    ];
    for d in dims {
        buf.extend_from_slice(&d.to_le_bytes());
    }
    for z in &ds.values {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    std::fs::write(path, &buf)?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<ComplexDataset> {
    let buf = std::fs::read(path)?;
    let header = 4 + 4 + 4 * 4;
    if buf.len() < header {
        return Err(Error::Truncated { expected: header as u64, found: buf.len() as u64 });
    }
    let magic: [u8; 4] = buf[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic { expected: MAGIC, found: magic });
    }
    let word = |i: usize| u32::from_le_bytes(buf[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    let version = word(0);
    if version != VERSION {
        return Err(Error::UnsupportedVersion { found: version, supported: VERSION });
    }
    let n_samples = word(1) as usize;
    let n_units = word(2) as usize;
    let (w, h) = (word(3) as usize, word(4) as usize);

    let expected = header as u128 + (n_samples as u128) * (n_units as u128) * 16;
    if (buf.len() as u128) < expected {
        return Err(Error::Truncated {
            expected: u64::try_from(expected).unwrap_or(u64::MAX),
            found: buf.len() as u64,
        });
    }
    if (buf.len() as u128) > expected {
        return Err(Error::TrailingData {
            extra: u64::try_from(buf.len() as u128 - expected).unwrap_or(u64::MAX),
        });
    }

    let shape = match (w, h) {
        (0, 0) => None,
        s => Some(s),
    };
    if n_units == 0 {
        return Err(Error::Shape("dataset declares zero units per sample".into()));
    }
    check_shape(n_units, shape)?;

    let mut values = Vec::with_capacity(n_samples * n_units);
    for c in buf[header..].chunks_exact(16) {
        let re = f64::from_le_bytes(c[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(c[8..16].try_into().unwrap());
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite(format!("payload entry {}", values.len())));
        }
        values.push(Complex64::new(re, im));
    }
    Ok(ComplexDataset { n_units, shape, values })
}

// ---------------------------------------------------------------------------
// band partition and thresholding
// ---------------------------------------------------------------------------

/// A split of the unit index range into disjoint half-open bands, used to
/// normalize heterogeneous channels (e.g. wavelet scales) independently.
/// Serialized as one `start:end` line per band.
#[derive(Clone, Debug, PartialEq)]
pub struct BandPartition {
    ranges: Vec<(usize, usize)>,
}

impl BandPartition {
    pub fn new(ranges: Vec<(usize, usize)>) -> Result<Self> {
        if ranges.is_empty() {
            return Err(Error::Domain("partition has no bands".into()));
        }
        for &(s, e) in &ranges {
            if s >= e {
                return Err(Error::Domain(format!("band {s}:{e} is empty or reversed")));
            }
        }
        let mut sorted = ranges.clone();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0].1 > pair[1].0 {
                return Err(Error::Domain(format!(
                    "bands {}:{} and {}:{} overlap",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        Ok(BandPartition { ranges })
    }

    /// The trivial partition: one band over all `n` units.
    pub fn single(n: usize) -> Result<Self> {
        BandPartition::new(vec![(0, n)])
    }

    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    /// Checks that the bands exactly tile `0..n`.
    pub fn check_covers(&self, n: usize) -> Result<()> {
        let mut sorted = self.ranges.clone();
        sorted.sort_unstable();
        let mut next = 0;
        for &(s, e) in &sorted {
            if s != next {
                return Err(Error::Domain(format!(
                    "partition leaves units {next}:{s} uncovered"
                )));
            }
            next = e;
        }
        if next != n {
            return Err(Error::Domain(format!(
                "partition covers {next} units, dataset has {n}"
            )));
        }
        Ok(())
    }

    /// Parses `start:end` lines; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ranges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (s, e) = line.split_once(':').ok_or_else(|| {
                Error::Config(format!("line {}: expected start:end, got {line:?}", lineno + 1))
            })?;
            let parse = |v: &str| {
                v.trim().parse::<usize>().map_err(|_| {
                    Error::Config(format!("line {}: bad index {v:?}", lineno + 1))
                })
            };
            ranges.push((parse(s)?, parse(e)?));
        }
        BandPartition::new(ranges)
    }
}

impl std::fmt::Display for BandPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &(s, e) in &self.ranges {
            writeln!(f, "{s}:{e}")?;
        }
        Ok(())
    }
}

/// Normalizes each band by its maximum modulus over the whole dataset, zeroes
/// entries whose normalized modulus falls below `cutoff`, and rescales the
/// survivors to modulus exactly 1 with phases preserved. Idempotent on its
/// own output (as long as every band keeps at least one survivor).
pub fn threshold_normalize(
    ds: &ComplexDataset,
    cutoff: f64,
    partition: &BandPartition,
) -> Result<ComplexDataset> {
    if !(cutoff > 0.0 && cutoff <= 1.0) {
        return Err(Error::Domain(format!("cutoff must be in (0, 1], got {cutoff}")));
    }
    partition.check_covers(ds.n_units())?;

    let mut scale = vec![0.0f64; ds.n_units()];
    for &(s, e) in partition.ranges() {
        let mut band_max = 0.0f64;
        for sample in ds.iter_samples() {
            for z in &sample[s..e] {
                band_max = band_max.max(z.norm());
            }
        }
        if band_max == 0.0 {
            return Err(Error::Domain(format!(
                "band {s}:{e} is identically zero; normalization undefined"
            )));
        }
        scale[s..e].fill(1.0 / band_max);
    }

    let mut out = ComplexDataset::new(ds.n_units(), ds.shape())?;
    let mut buf = vec![Complex64::new(0.0, 0.0); ds.n_units()];
    for sample in ds.iter_samples() {
        for (j, z) in sample.iter().enumerate() {
            let m = z.norm() * scale[j];
            buf[j] = if m < cutoff {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(1.0, z.arg())
            };
        }
        out.push_sample(&buf)?;
    }
    Ok(out)
}
