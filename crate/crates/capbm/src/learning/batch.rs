//! Batched split-complex kernels for training.
//!
//! Layer input sums, sampling, and sufficient statistics over a whole batch
//! reduce to real matrix products on the split (re, im, modulus) staging of
//! the batch, which keeps the inner loops inside the matrix-multiply kernel
//! instead of per-unit scalar code. Results agree with the per-sample
//! operations in the sampler module; tests pin that equivalence.

use crate::error::Result;
use crate::math::{bessel_ratio, sample_von_mises, sigmoid, Angle, RngHandle};
use crate::model::{amp_logit, target_bias, CapRbmParams, LayerDir, PhasorState};
use ndarray::linalg::general_mat_mul;
use ndarray::Array2;
use num_complex::Complex64;

/// A batch of complex layer values split into real parts: one row per
/// sample, one column per unit. `amp` holds the moduli.
#[derive(Clone, Debug)]
pub(crate) struct Staged {
    pub re: Array2<f64>,
    pub im: Array2<f64>,
    pub amp: Array2<f64>,
}

impl Staged {
    pub fn zeros(n: usize, units: usize) -> Self {
        Staged {
            re: Array2::zeros((n, units)),
            im: Array2::zeros((n, units)),
            amp: Array2::zeros((n, units)),
        }
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let n = rows.len();
        let units = rows.first().map_or(0, |r| r.len());
        let mut out = Staged::zeros(n, units);
        for (i, row) in rows.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                out.re[(i, j)] = z.re;
                out.im[(i, j)] = z.im;
                out.amp[(i, j)] = z.norm();
            }
        }
        out
    }

    pub fn from_states(states: &[PhasorState]) -> Self {
        let n = states.len();
        let units = states.first().map_or(0, |s| s.n());
        let mut out = Staged::zeros(n, units);
        for (i, s) in states.iter().enumerate() {
            for j in 0..units {
                let z = s.value(j);
                out.re[(i, j)] = z.re;
                out.im[(i, j)] = z.im;
                out.amp[(i, j)] = if s.amp(j) { 1.0 } else { 0.0 };
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.re.nrows()
    }

    pub fn units(&self) -> usize {
        self.re.ncols()
    }

    pub fn row_complex(&self, i: usize) -> Vec<Complex64> {
        (0..self.units()).map(|j| Complex64::new(self.re[(i, j)], self.im[(i, j)])).collect()
    }

    /// Converts sampled rows (moduli exactly 0 or 1) back to states.
    pub fn to_states(&self) -> Result<Vec<PhasorState>> {
        (0..self.n())
            .map(|i| PhasorState::from_complex(&self.row_complex(i), 1e-9))
            .collect()
    }
}

/// Per-unit conditional inputs for a whole batch: complex sums split into
/// `(ur, ui)` and the amplitude-coupling sums `mu`, each `n x targets`.
pub(crate) struct BatchSums {
    pub ur: Array2<f64>,
    pub ui: Array2<f64>,
    pub mu: Array2<f64>,
}

/// Input sums of the target layer for every sample in the batch, computed
/// with four real matrix products plus one for the amplitude couplings.
pub(crate) fn batch_layer_sums(params: &CapRbmParams, src: &Staged, dir: LayerDir) -> BatchSums {
    let (nv, nh) = (params.n_visible(), params.n_hidden());
    let mut wr = Array2::zeros((nv, nh));
    let mut wi = Array2::zeros((nv, nh));
    for (jk, z) in params.w().indexed_iter() {
        wr[jk] = z.re;
        wi[jk] = z.im;
    }
    let jm = params.jamp();

    let n = src.n();
    let targets = match dir {
        LayerDir::VisibleToHidden => nh,
        LayerDir::HiddenToVisible => nv,
    };
    let mut ur = Array2::zeros((n, targets));
    let mut ui = Array2::zeros((n, targets));
    let mut mu = Array2::zeros((n, targets));
    match dir {
        LayerDir::VisibleToHidden => {
            // u = conj(W)^T v per sample row: U = V_re W_re + V_im W_im etc.
            general_mat_mul(1.0, &src.re, &wr, 0.0, &mut ur);
            general_mat_mul(1.0, &src.im, &wi, 1.0, &mut ur);
            general_mat_mul(1.0, &src.im, &wr, 0.0, &mut ui);
            general_mat_mul(-1.0, &src.re, &wi, 1.0, &mut ui);
            general_mat_mul(1.0, &src.amp, jm, 0.0, &mut mu);
        }
        LayerDir::HiddenToVisible => {
            // u = W h per sample row: U = H_re W_re^T - H_im W_im^T etc.
            general_mat_mul(1.0, &src.re, &wr.t(), 0.0, &mut ur);
            general_mat_mul(-1.0, &src.im, &wi.t(), 1.0, &mut ur);
            general_mat_mul(1.0, &src.re, &wi.t(), 0.0, &mut ui);
            general_mat_mul(1.0, &src.im, &wr.t(), 1.0, &mut ui);
            general_mat_mul(1.0, &src.amp, &jm.t(), 0.0, &mut mu);
        }
    }
    BatchSums { ur, ui, mu }
}

/// Draws the target layer for every sample. Iteration is row-major
/// (sample-major), so the draw sequence is fixed by the RNG state alone.
pub(crate) fn batch_sample(
    params: &CapRbmParams,
    sums: &BatchSums,
    dir: LayerDir,
    rng: &mut RngHandle,
) -> Result<Staged> {
    let bias = target_bias(params, dir);
    let (n, targets) = sums.ur.dim();
    let mut out = Staged::zeros(n, targets);
    for i in 0..n {
        for t in 0..targets {
            let (ur, ui) = (sums.ur[(i, t)], sums.ui[(i, t)]);
            let a = ur.hypot(ui);
            let logit = amp_logit(a, sums.mu[(i, t)], bias[t]);
            if rng.uniform() < sigmoid(logit) {
                let mean = Angle::new(ui.atan2(ur));
                let phase = sample_von_mises(mean, a, rng)?;
                out.re[(i, t)] = phase.cos();
                out.im[(i, t)] = phase.sin();
                out.amp[(i, t)] = 1.0;
            }
        }
    }
    Ok(out)
}

/// Expected target-layer activities for every sample: per-unit activation
/// probability times the von Mises mean resultant along the input direction.
pub(crate) fn batch_rate(params: &CapRbmParams, sums: &BatchSums, dir: LayerDir) -> Result<Staged> {
    let bias = target_bias(params, dir);
    let (n, targets) = sums.ur.dim();
    let mut out = Staged::zeros(n, targets);
    for i in 0..n {
        for t in 0..targets {
            let (ur, ui) = (sums.ur[(i, t)], sums.ui[(i, t)]);
            let a = ur.hypot(ui);
            let p = sigmoid(amp_logit(a, sums.mu[(i, t)], bias[t]));
            out.amp[(i, t)] = p;
            if a > 0.0 {
                let scale = p * bessel_ratio(a)? / a;
                out.re[(i, t)] = scale * ur;
                out.im[(i, t)] = scale * ui;
            }
        }
    }
    Ok(out)
}
