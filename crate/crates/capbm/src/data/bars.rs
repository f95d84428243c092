//! Synthetic bars imagery: square complex images containing a few
//! horizontal and vertical bars of unit modulus, each carrying a smooth
//! phase ramp plus bounded per-pixel phase noise. Off-bar pixels are zero.

use crate::error::{Error, Result};
use crate::math::RngHandle;
use num_complex::Complex64;
use std::f64::consts::TAU;

use super::ComplexDataset;

/// Geometry and randomness of the bars generator.
#[derive(Clone, Copy, Debug)]
pub struct BarsConfig {
    /// Image side length in pixels (square images).
    pub side: usize,
    /// Bar thickness in pixels.
    pub bar_width: usize,
    /// Inclusive range for the number of bars per direction.
    pub bars_min: usize,
    pub bars_max: usize,
    /// Per-pixel phase noise is uniform in `[0, phase_noise_max)` radians.
    pub phase_noise_max: f64,
    pub seed: u64,
}

impl Default for BarsConfig {
    fn default() -> Self {
        BarsConfig {
            side: 24,
            bar_width: 2,
            bars_min: 2,
            bars_max: 4,
            phase_noise_max: 0.6,
            seed: 0,
        }
    }
}

impl BarsConfig {
    fn validate(&self) -> Result<()> {
        if self.side == 0 || self.bar_width == 0 || self.bars_min == 0 {
            return Err(Error::Domain("bars geometry fields must be positive".into()));
        }
        if self.bar_width > self.side {
            return Err(Error::Domain(format!(
                "bar width {} exceeds image side {}",
                self.bar_width, self.side
            )));
        }
        if self.bars_min > self.bars_max {
            return Err(Error::Domain(format!(
                "bar count range [{}, {}] is reversed",
                self.bars_min, self.bars_max
            )));
        }
        let slots = self.side - self.bar_width + 1;
        if self.bars_max > slots {
            return Err(Error::Domain(format!(
                "cannot place {} non-duplicated bars in {slots} positions",
                self.bars_max
            )));
        }
        if !(self.phase_noise_max >= 0.0 && self.phase_noise_max < TAU) {
            return Err(Error::Domain(format!(
                "phase noise bound {} outside [0, 2*pi)",
                self.phase_noise_max
            )));
        }
        Ok(())
    }
}

/// One placed bar, recorded for the generator's structural self-tests.
#[cfg_attr(not(test), allow(dead_code))]
#[derive(Clone, Copy, Debug)]
pub(crate) struct BarSpec {
    pub horizontal: bool,
    /// First row (horizontal) or first column (vertical) the bar covers.
    pub position: usize,
    /// Phase-ramp offset at arclength zero.
    pub offset: f64,
}

/// Draws one image. Horizontal bars are painted first, then vertical ones;
/// within a direction, bars are painted in the order their positions were
/// drawn, and overlapping pixels keep the most recently painted phase.
pub(crate) fn draw_sample(cfg: &BarsConfig, rng: &mut RngHandle) -> (Vec<Complex64>, Vec<BarSpec>) {
    let side = cfg.side;
    let mut img = vec![Complex64::new(0.0, 0.0); side * side];
    let mut specs = Vec::new();
    for horizontal in [true, false] {
        let count = cfg.bars_min + rng.index(cfg.bars_max - cfg.bars_min + 1);
        // Partial Fisher-Yates draws `count` distinct positions uniformly.
        let mut slots: Vec<usize> = (0..=side - cfg.bar_width).collect();
        for i in 0..count {
            let j = i + rng.index(slots.len() - i);
            slots.swap(i, j);
        }
        for &position in &slots[..count] {
            let offset = rng.uniform_in(0.0, TAU);
            specs.push(BarSpec { horizontal, position, offset });
            for t in 0..side {
                for w in 0..cfg.bar_width {
                    // One full phase period along the bar, plus noise.
                    let phase = offset
                        + TAU * t as f64 / side as f64
                        + rng.uniform_in(0.0, cfg.phase_noise_max);
                    let (row, col) = if horizontal { (position + w, t) } else { (t, position + w) };
                    img[row * side + col] = Complex64::from_polar(1.0, phase);
                }
            }
        }
    }
    (img, specs)
}

/// Generates `n` bars images as a dataset shaped `side x side`.
pub fn gen_bars(cfg: &BarsConfig, n: usize) -> Result<ComplexDataset> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::Domain("requested an empty bars dataset".into()));
    }
    let mut rng = RngHandle::new(cfg.seed);
    let mut ds = ComplexDataset::new(cfg.side * cfg.side, Some((cfg.side, cfg.side)))?;
    for _ in 0..n {
        let (img, _) = draw_sample(cfg, &mut rng);
        ds.push_sample(&img)?;
    }
    Ok(ds)
}

/// Pixel ownership map for a drawn sample: which spec index painted each
/// pixel last. Used by tests to verify the painted phases bar by bar.
#[cfg(test)]
pub(crate) fn owners(cfg: &BarsConfig, specs: &[BarSpec]) -> ndarray::Array2<Option<usize>> {
    let side = cfg.side;
    let mut own = ndarray::Array2::from_elem((side, side), None);
    for (i, spec) in specs.iter().enumerate() {
        for t in 0..side {
            for w in 0..cfg.bar_width {
                let (row, col) =
                    if spec.horizontal { (spec.position + w, t) } else { (t, spec.position + w) };
                own[(row, col)] = Some(i);
            }
        }
    }
    own
}
