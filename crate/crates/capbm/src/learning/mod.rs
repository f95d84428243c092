//! Contrastive-divergence training for the restricted machine.
//!
//! The learning signal is the gap between data-clamped and model-generated
//! sufficient statistics. Couplings are updated in rectangular complex form
//! (which keeps the modulus non-negative and the polar decomposition
//! implicit); [`polar_gradients`] exposes the equivalent modulus/angle
//! gradients for diagnostics and finite-difference checks.
//!
//! Two estimators of the model term are provided: one-step contrastive
//! divergence ([`cd1_update`]) reconstructs from the data batch, while
//! persistent chains ([`pcd_update`]) keep a set of fantasy states alive
//! across updates and advance each by one hidden/visible alternation per
//! update. Both feed the same negative-statistics code path.

mod batch;

use crate::data::ComplexDataset;
use crate::error::{Error, Result};
use crate::math::RngHandle;
use crate::model::{visible_free_energy, CapRbmParams, LayerDir, PhasorState};
use batch::{batch_layer_sums, batch_rate, batch_sample, Staged};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::fmt;

/// Modulus scale of freshly initialized complex couplings.
const INIT_COUPLING_SCALE: f64 = 0.01;

/// Substream offset separating per-epoch metric evaluation from the
/// training draw sequence, so monitoring never perturbs the learned model.
const METRIC_STREAM: u64 = 0x6d65_7472;

/// Estimator of the model-side statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// One-step contrastive divergence: reconstruct from the data batch.
    Cd1,
    /// Persistent chains advanced one alternation per update.
    Pcd,
}

/// Hyperparameters of the training loop.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Multiplicative shrinkage of coupling magnitudes per update, applied
    /// as `(1 - learning_rate * weight_decay)`; phases are unaffected.
    pub weight_decay: f64,
    pub algorithm: Algorithm,
    /// Number of fantasy chains kept alive by [`Algorithm::Pcd`].
    pub n_persistent_chains: usize,
    /// When false the amplitude-coupling matrix is left untouched by
    /// updates (initialized at zero it stays zero), isolating the phase
    /// couplings.
    pub amp_coupling: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            epochs: 10,
            batch_size: 50,
            weight_decay: 0.0,
            algorithm: Algorithm::Cd1,
            n_persistent_chains: 50,
            amp_coupling: true,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Baseline hyperparameters for `algorithm`. Persistent chains get a
    /// small weight decay to keep couplings from outrunning the mixing of
    /// the fantasy states; plain contrastive divergence does not need it.
    pub fn defaults_for(algorithm: Algorithm) -> Self {
        TrainConfig {
            algorithm,
            weight_decay: match algorithm {
                Algorithm::Cd1 => 0.0,
                Algorithm::Pcd => 1e-4,
            },
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self, n_samples: usize) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::Config(format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if !self.weight_decay.is_finite() || self.weight_decay < 0.0 {
            return Err(Error::Config(format!(
                "weight decay must be finite and non-negative, got {}",
                self.weight_decay
            )));
        }
        if self.learning_rate * self.weight_decay >= 1.0 {
            return Err(Error::Config(format!(
                "decay factor 1 - lr*wd = {} would flip coupling signs",
                1.0 - self.learning_rate * self.weight_decay
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.batch_size > n_samples {
            return Err(Error::Config(format!(
                "batch size {} exceeds dataset size {n_samples}",
                self.batch_size
            )));
        }
        if self.algorithm == Algorithm::Pcd && self.n_persistent_chains == 0 {
            return Err(Error::Config("persistent chains need at least one chain".into()));
        }
        Ok(())
    }
}

/// Sufficient statistics of a set of (visible, hidden) pairs, stored as
/// running sums over `count` weighted samples. `pair_complex[(j, k)]`
/// accumulates `v_j * conj(h_k)`; `pair_amp` the modulus products; `amp_v`/
/// `amp_h` the per-unit moduli.
#[derive(Clone, Debug)]
pub struct GradientStats {
    pair_complex: Array2<Complex64>,
    pair_amp: Array2<f64>,
    amp_v: Array1<f64>,
    amp_h: Array1<f64>,
    count: usize,
}

impl GradientStats {
    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        GradientStats {
            pair_complex: Array2::zeros((n_visible, n_hidden)),
            pair_amp: Array2::zeros((n_visible, n_hidden)),
            amp_v: Array1::zeros(n_visible),
            amp_h: Array1::zeros(n_hidden),
            count: 0,
        }
    }

    pub fn n_visible(&self) -> usize {
        self.amp_v.len()
    }

    pub fn n_hidden(&self) -> usize {
        self.amp_h.len()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Adds one (visible, hidden) pair to the sums.
    pub fn accumulate(&mut self, v: &[Complex64], h: &[Complex64]) -> Result<()> {
        if v.len() != self.n_visible() || h.len() != self.n_hidden() {
            return Err(Error::Shape(format!(
                "statistics are {}x{}, sample is {}x{}",
                self.n_visible(),
                self.n_hidden(),
                v.len(),
                h.len()
            )));
        }
        for (j, vj) in v.iter().enumerate() {
            let va = vj.norm();
            self.amp_v[j] += va;
            for (k, hk) in h.iter().enumerate() {
                self.pair_complex[(j, k)] += vj * hk.conj();
                self.pair_amp[(j, k)] += va * hk.norm();
            }
        }
        for (k, hk) in h.iter().enumerate() {
            self.amp_h[k] += hk.norm();
        }
        self.count += 1;
        Ok(())
    }

    /// Adds one visible sample paired with per-unit hidden rates: the
    /// expected complex value `h_mean` and the expected modulus `h_amp`
    /// (which in general exceeds `|h_mean|`). With the visibles clamped,
    /// products of the form `v * conj(h)` average to `v * conj(h_mean)`.
    pub fn accumulate_rates(
        &mut self,
        v: &[Complex64],
        h_mean: &[Complex64],
        h_amp: &[f64],
    ) -> Result<()> {
        if v.len() != self.n_visible()
            || h_mean.len() != self.n_hidden()
            || h_amp.len() != self.n_hidden()
        {
            return Err(Error::Shape(format!(
                "statistics are {}x{}, sample is {}x{}/{}",
                self.n_visible(),
                self.n_hidden(),
                v.len(),
                h_mean.len(),
                h_amp.len()
            )));
        }
        for (j, vj) in v.iter().enumerate() {
            let va = vj.norm();
            self.amp_v[j] += va;
            for k in 0..h_mean.len() {
                self.pair_complex[(j, k)] += vj * h_mean[k].conj();
                self.pair_amp[(j, k)] += va * h_amp[k];
            }
        }
        for (k, &hk) in h_amp.iter().enumerate() {
            self.amp_h[k] += hk;
        }
        self.count += 1;
        Ok(())
    }

    /// Builds statistics directly from already-averaged expectations, e.g.
    /// exact model-side expectations computed by enumeration.
    pub fn from_means(
        pair_complex: Array2<Complex64>,
        pair_amp: Array2<f64>,
        amp_v: Array1<f64>,
        amp_h: Array1<f64>,
    ) -> Result<Self> {
        let (nv, nh) = (amp_v.len(), amp_h.len());
        if pair_complex.dim() != (nv, nh) || pair_amp.dim() != (nv, nh) {
            return Err(Error::Shape(format!(
                "pair statistics must be {nv}x{nh}, got {:?} and {:?}",
                pair_complex.dim(),
                pair_amp.dim()
            )));
        }
        if pair_complex.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
            || pair_amp.iter().chain(amp_v.iter()).chain(amp_h.iter()).any(|x| !x.is_finite())
        {
            return Err(Error::NonFinite("gradient statistics".into()));
        }
        Ok(GradientStats { pair_complex, pair_amp, amp_v, amp_h, count: 1 })
    }

    /// Batched accumulation over staged layers, one row per sample. The
    /// pair sums are computed as real matrix products on the split parts.
    fn from_staged(v: &Staged, h: &Staged) -> Self {
        use ndarray::linalg::general_mat_mul;
        let (nv, nh) = (v.units(), h.units());
        let mut pr = Array2::zeros((nv, nh));
        let mut pi = Array2::zeros((nv, nh));
        let mut pa = Array2::zeros((nv, nh));
        general_mat_mul(1.0, &v.re.t(), &h.re, 0.0, &mut pr);
        general_mat_mul(1.0, &v.im.t(), &h.im, 1.0, &mut pr);
        general_mat_mul(1.0, &v.im.t(), &h.re, 0.0, &mut pi);
        general_mat_mul(-1.0, &v.re.t(), &h.im, 1.0, &mut pi);
        general_mat_mul(1.0, &v.amp.t(), &h.amp, 0.0, &mut pa);
        let pair_complex =
            Array2::from_shape_fn((nv, nh), |jk| Complex64::new(pr[jk], pi[jk]));
        GradientStats {
            pair_complex,
            pair_amp: pa,
            amp_v: v.amp.sum_axis(ndarray::Axis(0)),
            amp_h: h.amp.sum_axis(ndarray::Axis(0)),
            count: v.n(),
        }
    }

    fn mean_scale(&self) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::Domain("statistics hold no samples".into()));
        }
        Ok(1.0 / self.count as f64)
    }

    pub fn mean_pair_complex(&self) -> Result<Array2<Complex64>> {
        let s = self.mean_scale()?;
        Ok(self.pair_complex.mapv(|z| z * s))
    }

    pub fn mean_pair_amp(&self) -> Result<Array2<f64>> {
        let s = self.mean_scale()?;
        Ok(&self.pair_amp * s)
    }

    pub fn mean_amp_v(&self) -> Result<Array1<f64>> {
        let s = self.mean_scale()?;
        Ok(&self.amp_v * s)
    }

    pub fn mean_amp_h(&self) -> Result<Array1<f64>> {
        let s = self.mean_scale()?;
        Ok(&self.amp_h * s)
    }

    /// Checks the triangle-inequality invariant `|pair_complex| <= pair_amp`
    /// entrywise (with slack for accumulated rounding).
    pub fn validate(&self) -> Result<()> {
        for (jk, z) in self.pair_complex.indexed_iter() {
            if z.norm() > self.pair_amp[jk] + 1e-9 {
                return Err(Error::Domain(format!(
                    "pair statistic at {jk:?} has |complex| = {} > modulus product {}",
                    z.norm(),
                    self.pair_amp[jk]
                )));
            }
        }
        Ok(())
    }
}

/// Statistics of a single (visible, hidden) pair.
pub fn collect_stats(
    params: &CapRbmParams,
    v: &[Complex64],
    h: &[Complex64],
) -> Result<GradientStats> {
    let mut stats = GradientStats::zeros(params.n_visible(), params.n_hidden());
    stats.accumulate(v, h)?;
    Ok(stats)
}

/// Ascent directions in the polar parametrization: coupling modulus `db`,
/// coupling angle `dtheta`, amplitude coupling `dj`, and the two bias
/// vectors (whose energies enter with positive sign, hence the reversed
/// data/model order).
#[derive(Clone, Debug)]
pub struct PolarGradients {
    pub db: Array2<f64>,
    pub dtheta: Array2<f64>,
    pub dj: Array2<f64>,
    pub d_bias_v: Array1<f64>,
    pub d_bias_h: Array1<f64>,
}

/// Log-likelihood ascent directions from data-clamped (`positive`) and
/// model (`negative`) statistics. Writing the mean pair statistic gap as
/// `d = <v conj(h)>+ - <v conj(h)>-` and the coupling as `b e^{i theta}`,
/// the modulus and angle components are the real and (scaled) imaginary
/// parts of `e^{-i theta} d`. At zero modulus the angle is immaterial and
/// its gradient is zero.
pub fn polar_gradients(
    params: &CapRbmParams,
    positive: &GradientStats,
    negative: &GradientStats,
) -> Result<PolarGradients> {
    let (nv, nh) = (params.n_visible(), params.n_hidden());
    for (name, stats) in [("positive", positive), ("negative", negative)] {
        if stats.n_visible() != nv || stats.n_hidden() != nh {
            return Err(Error::Shape(format!(
                "{name} statistics are {}x{}, parameters are {nv}x{nh}",
                stats.n_visible(),
                stats.n_hidden()
            )));
        }
    }
    let dpc = positive.mean_pair_complex()? - negative.mean_pair_complex()?;
    let dpa = positive.mean_pair_amp()? - negative.mean_pair_amp()?;
    let mut db = Array2::zeros((nv, nh));
    let mut dtheta = Array2::zeros((nv, nh));
    for (jk, w) in params.w().indexed_iter() {
        let b = w.norm();
        let aligned = if b > 0.0 { dpc[jk] * (w.conj() / b) } else { dpc[jk] };
        db[jk] = aligned.re;
        dtheta[jk] = b * aligned.im;
    }
    Ok(PolarGradients {
        db,
        dtheta,
        dj: dpa,
        d_bias_v: negative.mean_amp_v()? - positive.mean_amp_v()?,
        d_bias_h: negative.mean_amp_h()? - positive.mean_amp_h()?,
    })
}

/// Applies one ascent step in rectangular form:
/// `W <- (1 - lr*wd) W + lr (pair+ - pair-)`, likewise for the amplitude
/// couplings, and plain ascent on the biases. The multiplicative decay
/// shrinks moduli toward zero without touching phases.
fn apply_update(
    params: &CapRbmParams,
    positive: &GradientStats,
    negative: &GradientStats,
    cfg: &TrainConfig,
) -> Result<CapRbmParams> {
    let lr = cfg.learning_rate;
    let keep = 1.0 - lr * cfg.weight_decay;
    let dpc = positive.mean_pair_complex()? - negative.mean_pair_complex()?;
    let mut out = params.clone();
    out.w.zip_mut_with(&dpc, |w, d| *w = *w * keep + *d * lr);
    if cfg.amp_coupling {
        let dpa = positive.mean_pair_amp()? - negative.mean_pair_amp()?;
        out.jamp.zip_mut_with(&dpa, |j, d| *j = *j * keep + lr * d);
    }
    let dbv = negative.mean_amp_v()? - positive.mean_amp_v()?;
    let dbh = negative.mean_amp_h()? - positive.mean_amp_h()?;
    out.bias_v.zip_mut_with(&dbv, |b, d| *b += lr * d);
    out.bias_h.zip_mut_with(&dbh, |b, d| *b += lr * d);
    Ok(out)
}

/// Model-side statistics given the current fantasy visibles: hidden rates
/// conditioned on them, paired with the visible samples themselves. Both
/// estimators funnel through here.
fn negative_stats(params: &CapRbmParams, v: &Staged) -> Result<GradientStats> {
    let sums = batch_layer_sums(params, v, LayerDir::VisibleToHidden);
    let h_rate = batch_rate(params, &sums, LayerDir::VisibleToHidden)?;
    Ok(GradientStats::from_staged(v, &h_rate))
}

fn stage_batch(params: &CapRbmParams, batch: &[&[Complex64]]) -> Result<Staged> {
    if batch.is_empty() {
        return Err(Error::Shape("empty batch".into()));
    }
    for row in batch {
        if row.len() != params.n_visible() {
            return Err(Error::Shape(format!(
                "batch row has {} units, model has {} visibles",
                row.len(),
                params.n_visible()
            )));
        }
    }
    Ok(Staged::from_rows(batch))
}

/// One-step contrastive divergence on a batch of visible vectors: clamp the
/// data for the positive statistics, then sample hidden, reconstruct
/// visible, and take the negative statistics from the reconstruction.
pub fn cd1_update(
    params: &CapRbmParams,
    batch: &[&[Complex64]],
    cfg: &TrainConfig,
    rng: &mut RngHandle,
) -> Result<CapRbmParams> {
    let v_data = stage_batch(params, batch)?;
    let sums_h = batch_layer_sums(params, &v_data, LayerDir::VisibleToHidden);
    let h_rate = batch_rate(params, &sums_h, LayerDir::VisibleToHidden)?;
    let positive = GradientStats::from_staged(&v_data, &h_rate);
    let h_s = batch_sample(params, &sums_h, LayerDir::VisibleToHidden, rng)?;
    let sums_v = batch_layer_sums(params, &h_s, LayerDir::HiddenToVisible);
    let v1 = batch_sample(params, &sums_v, LayerDir::HiddenToVisible, rng)?;
    let negative = negative_stats(params, &v1)?;
    apply_update(params, &positive, &negative, cfg)
}

/// Persistent-chain update: positive statistics from the data batch as in
/// [`cd1_update`], negative statistics from the fantasy chains, each
/// advanced by one hidden/visible alternation.
pub fn pcd_update(
    params: &CapRbmParams,
    batch: &[&[Complex64]],
    cfg: &TrainConfig,
    chains: &mut Vec<PhasorState>,
    rng: &mut RngHandle,
) -> Result<CapRbmParams> {
    if chains.is_empty() {
        return Err(Error::Config("persistent chains need at least one chain".into()));
    }
    let v_data = stage_batch(params, batch)?;
    let sums_h = batch_layer_sums(params, &v_data, LayerDir::VisibleToHidden);
    let h_rate = batch_rate(params, &sums_h, LayerDir::VisibleToHidden)?;
    let positive = GradientStats::from_staged(&v_data, &h_rate);

    let v_chain = Staged::from_states(chains);
    let sums_ch = batch_layer_sums(params, &v_chain, LayerDir::VisibleToHidden);
    let h_s = batch_sample(params, &sums_ch, LayerDir::VisibleToHidden, rng)?;
    let sums_v = batch_layer_sums(params, &h_s, LayerDir::HiddenToVisible);
    let v1 = batch_sample(params, &sums_v, LayerDir::HiddenToVisible, rng)?;
    let negative = negative_stats(params, &v1)?;
    *chains = v1.to_states()?;
    apply_update(params, &positive, &negative, cfg)
}

/// One line of the training log.
#[derive(Clone, Debug, PartialEq)]
pub struct LogRecord {
    pub epoch: usize,
    pub batch: usize,
    pub metric: String,
    pub value: f64,
}

impl fmt::Display for LogRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "epoch {} batch {} {} {}", self.epoch, self.batch, self.metric, self.value)
    }
}

/// Cosine similarity of two amplitude vectors; zero if either is all-zero.
pub fn amp_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Mean cosine similarity between each row's amplitudes and the amplitude
/// rates of its reconstruction after `n_alternations` hidden/visible
/// round trips (sampled except for the final visible step, which is taken
/// as rates).
pub fn reconstruction_cosine(
    params: &CapRbmParams,
    rows: &[&[Complex64]],
    n_alternations: usize,
    rng: &mut RngHandle,
) -> Result<f64> {
    if n_alternations == 0 {
        return Err(Error::Config("reconstruction needs at least one alternation".into()));
    }
    let data = stage_batch(params, rows)?;
    let mut v = data.clone();
    for step in 1..=n_alternations {
        let sums_h = batch_layer_sums(params, &v, LayerDir::VisibleToHidden);
        let h = batch_sample(params, &sums_h, LayerDir::VisibleToHidden, rng)?;
        let sums_v = batch_layer_sums(params, &h, LayerDir::HiddenToVisible);
        if step == n_alternations {
            let v_rate = batch_rate(params, &sums_v, LayerDir::HiddenToVisible)?;
            let mut total = 0.0;
            for i in 0..data.n() {
                total += amp_cosine(
                    data.amp.row(i).as_slice().expect("row-major staging"),
                    v_rate.amp.row(i).as_slice().expect("row-major staging"),
                );
            }
            return Ok(total / data.n() as f64);
        }
        v = batch_sample(params, &sums_v, LayerDir::HiddenToVisible, rng)?;
    }
    unreachable!("loop returns on the final alternation")
}

/// Fresh parameters sized to the dataset: complex couplings with small
/// random moduli and uniform phases, amplitude couplings at zero, hidden
/// biases at zero, and visible biases set so each unit's prior activation
/// matches its frequency in the data.
pub fn init_params(
    data: &ComplexDataset,
    n_hidden: usize,
    rng: &mut RngHandle,
) -> Result<CapRbmParams> {
    if n_hidden == 0 {
        return Err(Error::Config("model needs at least one hidden unit".into()));
    }
    if data.n_samples() == 0 {
        return Err(Error::Domain("cannot initialize from an empty dataset".into()));
    }
    let nv = data.n_units();
    let mut w = Array2::zeros((nv, n_hidden));
    for z in w.iter_mut() {
        *z = Complex64::from_polar(
            rng.uniform_in(0.0, INIT_COUPLING_SCALE),
            rng.uniform_in(0.0, std::f64::consts::TAU),
        );
    }
    let mut on_fraction = vec![0.0f64; nv];
    for i in 0..data.n_samples() {
        for (j, z) in data.sample(i).iter().enumerate() {
            if z.norm() > 0.0 {
                on_fraction[j] += 1.0;
            }
        }
    }
    let n = data.n_samples() as f64;
    let bias_v = Array1::from_iter(on_fraction.iter().map(|&c| {
        let p = (c / n).clamp(1e-3, 1.0 - 1e-3);
        ((1.0 - p) / p).ln()
    }));
    CapRbmParams::new(w, Array2::zeros((nv, n_hidden)), bias_v, Array1::zeros(n_hidden))
}

/// Runs the full training loop: per-epoch shuffling, mini-batch updates
/// with the configured estimator, and per-epoch metrics (one-alternation
/// reconstruction cosine and mean free energy) on a fixed monitoring subset
/// of up to 100 samples. `on_epoch` is called after each epoch's metrics,
/// e.g. to write checkpoints. Metric evaluation draws from dedicated RNG
/// substreams so it never perturbs the training sequence.
pub fn train<F>(
    params0: &CapRbmParams,
    data: &ComplexDataset,
    cfg: &TrainConfig,
    mut on_epoch: F,
) -> Result<(CapRbmParams, Vec<LogRecord>)>
where
    F: FnMut(usize, &CapRbmParams) -> Result<()>,
{
    cfg.validate(data.n_samples())?;
    if data.n_units() != params0.n_visible() {
        return Err(Error::Shape(format!(
            "dataset has {} units, model has {} visibles",
            data.n_units(),
            params0.n_visible()
        )));
    }
    let mut params = params0.clone();
    let mut rng = RngHandle::new(cfg.seed);
    let mut chains: Vec<PhasorState> = match cfg.algorithm {
        Algorithm::Pcd => (0..cfg.n_persistent_chains)
            .map(|_| PhasorState::random(params.n_visible(), &mut rng))
            .collect(),
        Algorithm::Cd1 => Vec::new(),
    };
    let monitor: Vec<&[Complex64]> =
        (0..data.n_samples().min(100)).map(|i| data.sample(i)).collect();
    let mut order: Vec<usize> = (0..data.n_samples()).collect();
    let mut log = Vec::new();
    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        let mut n_batches = 0;
        for chunk in order.chunks(cfg.batch_size) {
            let rows: Vec<&[Complex64]> = chunk.iter().map(|&i| data.sample(i)).collect();
            params = match cfg.algorithm {
                Algorithm::Cd1 => cd1_update(&params, &rows, cfg, &mut rng)?,
                Algorithm::Pcd => pcd_update(&params, &rows, cfg, &mut chains, &mut rng)?,
            };
            n_batches += 1;
        }
        let mut mrng = RngHandle::new(cfg.seed).substream(METRIC_STREAM + epoch as u64);
        let cosine = reconstruction_cosine(&params, &monitor, 1, &mut mrng)?;
        let mut fe = 0.0;
        for row in &monitor {
            fe += visible_free_energy(&params, row)?;
        }
        fe /= monitor.len() as f64;
        log.push(LogRecord { epoch, batch: n_batches, metric: "recon_cosine".into(), value: cosine });
        log.push(LogRecord { epoch, batch: n_batches, metric: "free_energy".into(), value: fe });
        on_epoch(epoch, &params)?;
    }
    Ok((params, log))
}
