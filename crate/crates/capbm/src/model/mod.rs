//! Model definition: states, parameters, energies, and conditionals.
//!
//! A state assigns each unit a phasor `z_j = |z_j| e^{i phi_j}` with binary
//! amplitude. The full machine's energy is
//!
//! ```text
//! E(z) = -1/2 z^H W z - 1/2 |z|^T J |z| + eps^T |z|
//! ```
//!
//! with `W = b .* exp(i theta)` Hermitian (`b` symmetric non-negative,
//! `theta` antisymmetric mod 2*pi, zero diagonals), `J` symmetric real with
//! zero diagonal, and `|z|` the amplitude vector. The restricted variant is
//! bipartite with visible and hidden layers:
//!
//! ```text
//! E(v, h) = -Re(v^H W h) - |v|^T J |h| + a^T |v| + b^T |h|
//! ```
//!
//! Conditioning a unit on the rest reduces its energy to
//! `-Re(conj(z_j) u_j) - |z_j| mu_j + |z_j| eps_j` where `u_j = a_j e^{i
//! alpha_j}` sums the complex couplings into the unit and `mu_j` the
//! amplitude couplings. The conditional then factors: the amplitude is
//! Bernoulli with success probability `sigmoid(mu_j - eps_j + ln I0(a_j))`
//! and the phase of an active unit is von Mises with mean `alpha_j` and
//! concentration `a_j`.

mod io;

pub use io::{load_checkpoint, save_checkpoint, Checkpoint};

use crate::error::{Error, Result};
use crate::math::{log_bessel_i0, sigmoid, softplus, Angle, RngHandle};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Tolerance for symmetry/antisymmetry validation at construction.
const SYMMETRY_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// states
// ---------------------------------------------------------------------------

/// Joint configuration of a set of phasor units: binary amplitudes plus a
/// canonical phase per unit. Phases of inactive units are retained (they
/// carry no probability weight but keep updates cheap and reproducible).
#[derive(Clone, Debug, PartialEq)]
pub struct PhasorState {
    amps: Vec<bool>,
    phases: Vec<Angle>,
}

impl PhasorState {
    pub fn new(amps: Vec<bool>, phases: Vec<Angle>) -> Result<Self> {
        if amps.len() != phases.len() {
            return Err(Error::Shape(format!(
                "amplitude count {} != phase count {}",
                amps.len(),
                phases.len()
            )));
        }
        Ok(PhasorState { amps, phases })
    }

    /// All units inactive, phases zero.
    pub fn all_off(n: usize) -> Self {
        PhasorState {
            amps: vec![false; n],
            phases: vec![Angle::ZERO; n],
        }
    }

    /// Independent fair-coin amplitudes and uniform phases.
    pub fn random(n: usize, rng: &mut RngHandle) -> Self {
        PhasorState {
            amps: (0..n).map(|_| rng.bernoulli(0.5)).collect(),
            phases: (0..n).map(|_| Angle::new(rng.uniform_in(0.0, TAU))).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, j: usize) -> bool {
        self.amps[j]
    }

    pub fn phase(&self, j: usize) -> Angle {
        self.phases[j]
    }

    pub fn set_amp(&mut self, j: usize, on: bool) {
        self.amps[j] = on;
    }

    pub fn set_phase(&mut self, j: usize, phase: Angle) {
        self.phases[j] = phase;
    }

    /// The phasor value of unit `j`: `e^{i phi_j}` if active, `0` if not.
    pub fn value(&self, j: usize) -> Complex64 {
        if self.amps[j] {
            Complex64::from_polar(1.0, self.phases[j].radians())
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.n()).map(|j| self.value(j)).collect()
    }

    /// Reads a complex vector as a phasor state. Every modulus must lie
    /// within `tol` of 0 or 1; inactive units get phase 0.
    pub fn from_complex(values: &[Complex64], tol: f64) -> Result<Self> {
        let mut amps = Vec::with_capacity(values.len());
        let mut phases = Vec::with_capacity(values.len());
        for (j, z) in values.iter().enumerate() {
            let m = z.norm();
            if (m - 1.0).abs() <= tol {
                amps.push(true);
                phases.push(Angle::new(z.arg()));
            } else if m.abs() <= tol {
                amps.push(false);
                phases.push(Angle::ZERO);
            } else {
                return Err(Error::Domain(format!(
                    "entry {j} has modulus {m}, not within {tol} of 0 or 1"
                )));
            }
        }
        Ok(PhasorState { amps, phases })
    }
}

// ---------------------------------------------------------------------------
// parameters
// ---------------------------------------------------------------------------

/// Ranges for randomly generated parameters (used by self-checks and tests).
#[derive(Clone, Copy, Debug)]
pub struct ParamScales {
    /// Coupling moduli are drawn uniformly from `[0, b_max]`.
    pub b_max: f64,
    /// Amplitude couplings are drawn uniformly from `[-j_max, j_max]`.
    pub j_max: f64,
    /// Amplitude biases are drawn uniformly from this interval.
    pub eps_range: (f64, f64),
}

impl Default for ParamScales {
    fn default() -> Self {
        ParamScales {
            b_max: 1.0,
            j_max: 0.5,
            eps_range: (-1.0, 1.0),
        }
    }
}

/// Parameters of the full (all-to-all) machine.
///
/// The complex coupling is stored in polar form: moduli `b` (symmetric,
/// non-negative) and phase offsets `theta` (antisymmetric mod 2*pi), both
/// with zero diagonals, so `W[j][k] = b[j][k] e^{i theta[j][k]}` is
/// Hermitian by construction.
#[derive(Clone, Debug)]
pub struct CapBmParams {
    pub(crate) b: Array2<f64>,
    pub(crate) theta: Array2<f64>,
    pub(crate) jamp: Array2<f64>,
    pub(crate) eps: Array1<f64>,
}

fn check_square(name: &str, m: &Array2<f64>, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Shape(format!(
            "{name} must be {n}x{n}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn check_finite_matrix(name: &str, m: &Array2<f64>) -> Result<()> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("matrix {name}")));
    }
    Ok(())
}

impl CapBmParams {
    /// Validates and canonicalizes raw matrices. `theta` entries may be any
    /// finite angles; they are wrapped into `[0, 2*pi)`.
    pub fn new(
        b: Array2<f64>,
        theta: Array2<f64>,
        jamp: Array2<f64>,
        eps: Array1<f64>,
    ) -> Result<Self> {
        let n = eps.len();
        check_square("b", &b, n)?;
        check_square("theta", &theta, n)?;
        check_square("J", &jamp, n)?;
        check_finite_matrix("b", &b)?;
        check_finite_matrix("theta", &theta)?;
        check_finite_matrix("J", &jamp)?;
        if eps.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("bias vector".into()));
        }

        let theta = theta.mapv(|t| Angle::new(t).radians());
        for j in 0..n {
            if b[(j, j)] != 0.0 || theta[(j, j)] != 0.0 || jamp[(j, j)] != 0.0 {
                return Err(Error::Domain(format!("unit {j} has a self-coupling")));
            }
            for k in 0..n {
                if b[(j, k)] < 0.0 {
                    return Err(Error::Domain(format!(
                        "coupling modulus b[{j}][{k}] = {} is negative",
                        b[(j, k)]
                    )));
                }
                if (b[(j, k)] - b[(k, j)]).abs() > SYMMETRY_TOL {
                    return Err(Error::Domain(format!(
                        "coupling moduli not symmetric at ({j}, {k})"
                    )));
                }
                if (jamp[(j, k)] - jamp[(k, j)]).abs() > SYMMETRY_TOL {
                    return Err(Error::Domain(format!(
                        "amplitude coupling not symmetric at ({j}, {k})"
                    )));
                }
                // Antisymmetry mod 2*pi: theta_jk + theta_kj = 0 (mod 2*pi).
                let s = (theta[(j, k)] + theta[(k, j)]).rem_euclid(TAU);
                if s.min(TAU - s) > SYMMETRY_TOL {
                    return Err(Error::Domain(format!(
                        "coupling phases not antisymmetric at ({j}, {k})"
                    )));
                }
            }
        }
        Ok(CapBmParams { b, theta, jamp, eps })
    }

    /// Random parameters drawn from `scales`; used by randomized checks.
    pub fn random(n: usize, scales: &ParamScales, rng: &mut RngHandle) -> Self {
        let mut b = Array2::zeros((n, n));
        let mut theta = Array2::zeros((n, n));
        let mut jamp = Array2::zeros((n, n));
        for j in 0..n {
            for k in (j + 1)..n {
                let bb = rng.uniform_in(0.0, scales.b_max);
                let tt = rng.uniform_in(0.0, TAU);
                let jj = rng.uniform_in(-scales.j_max, scales.j_max);
                b[(j, k)] = bb;
                b[(k, j)] = bb;
                theta[(j, k)] = tt;
                theta[(k, j)] = Angle::new(-tt).radians();
                jamp[(j, k)] = jj;
                jamp[(k, j)] = jj;
            }
        }
        let eps =
            Array1::from_iter((0..n).map(|_| rng.uniform_in(scales.eps_range.0, scales.eps_range.1)));
        CapBmParams { b, theta, jamp, eps }
    }

    pub fn n(&self) -> usize {
        self.eps.len()
    }

    pub fn b(&self) -> &Array2<f64> {
        &self.b
    }

    pub fn theta(&self) -> &Array2<f64> {
        &self.theta
    }

    pub fn jamp(&self) -> &Array2<f64> {
        &self.jamp
    }

    pub fn eps(&self) -> &Array1<f64> {
        &self.eps
    }

    /// Complex coupling `W[j][k] = b e^{i theta}`.
    pub fn w(&self, j: usize, k: usize) -> Complex64 {
        Complex64::from_polar(self.b[(j, k)], self.theta[(j, k)])
    }
}

/// Parameters of the restricted (bipartite) machine. The complex coupling
/// `w` is stored rectangularly (visible x hidden); its polar pieces are read
/// off per entry where the learning rules need them. `bias_v`/`bias_h` are
/// the amplitude penalties of the two layers.
#[derive(Clone, Debug)]
pub struct CapRbmParams {
    pub(crate) w: Array2<Complex64>,
    pub(crate) jamp: Array2<f64>,
    pub(crate) bias_v: Array1<f64>,
    pub(crate) bias_h: Array1<f64>,
}

impl CapRbmParams {
    pub fn new(
        w: Array2<Complex64>,
        jamp: Array2<f64>,
        bias_v: Array1<f64>,
        bias_h: Array1<f64>,
    ) -> Result<Self> {
        let (nv, nh) = (bias_v.len(), bias_h.len());
        if w.nrows() != nv || w.ncols() != nh || jamp.nrows() != nv || jamp.ncols() != nh {
            return Err(Error::Shape(format!(
                "couplings must be {nv}x{nh}, got w {}x{}, J {}x{}",
                w.nrows(),
                w.ncols(),
                jamp.nrows(),
                jamp.ncols()
            )));
        }
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix w".into()));
        }
        check_finite_matrix("J", &jamp)?;
        if bias_v.iter().chain(bias_h.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("bias vector".into()));
        }
        Ok(CapRbmParams { w, jamp, bias_v, bias_h })
    }

    /// Random parameters drawn from `scales`; used by randomized checks.
    pub fn random(nv: usize, nh: usize, scales: &ParamScales, rng: &mut RngHandle) -> Self {
        let mut w = Array2::zeros((nv, nh));
        let mut jamp = Array2::zeros((nv, nh));
        for j in 0..nv {
            for k in 0..nh {
                w[(j, k)] = Complex64::from_polar(
                    rng.uniform_in(0.0, scales.b_max),
                    rng.uniform_in(0.0, TAU),
                );
                jamp[(j, k)] = rng.uniform_in(-scales.j_max, scales.j_max);
            }
        }
        let bias_v = Array1::from_iter(
            (0..nv).map(|_| rng.uniform_in(scales.eps_range.0, scales.eps_range.1)),
        );
        let bias_h = Array1::from_iter(
            (0..nh).map(|_| rng.uniform_in(scales.eps_range.0, scales.eps_range.1)),
        );
        CapRbmParams { w, jamp, bias_v, bias_h }
    }

    pub fn n_visible(&self) -> usize {
        self.bias_v.len()
    }

    pub fn n_hidden(&self) -> usize {
        self.bias_h.len()
    }

    pub fn w(&self) -> &Array2<Complex64> {
        &self.w
    }

    pub fn jamp(&self) -> &Array2<f64> {
        &self.jamp
    }

    pub fn bias_v(&self) -> &Array1<f64> {
        &self.bias_v
    }

    pub fn bias_h(&self) -> &Array1<f64> {
        &self.bias_h
    }

    /// Embeds the bipartite machine into a full one over `nv + nh` units
    /// (visibles first). The joint energy is preserved exactly.
    pub fn embed(&self) -> CapBmParams {
        let (nv, nh) = (self.n_visible(), self.n_hidden());
        let n = nv + nh;
        let mut b = Array2::zeros((n, n));
        let mut theta = Array2::zeros((n, n));
        let mut jamp = Array2::zeros((n, n));
        for j in 0..nv {
            for k in 0..nh {
                let w = self.w[(j, k)];
                b[(j, nv + k)] = w.norm();
                b[(nv + k, j)] = w.norm();
                let t = Angle::new(w.arg());
                theta[(j, nv + k)] = t.radians();
                theta[(nv + k, j)] = (-t).radians();
                jamp[(j, nv + k)] = self.jamp[(j, k)];
                jamp[(nv + k, j)] = self.jamp[(j, k)];
            }
        }
        let mut eps = Array1::zeros(n);
        for j in 0..nv {
            eps[j] = self.bias_v[j];
        }
        for k in 0..nh {
            eps[nv + k] = self.bias_h[k];
        }
        CapBmParams { b, theta, jamp, eps }
    }
}

// ---------------------------------------------------------------------------
// energies
// ---------------------------------------------------------------------------

fn check_state_len(n_params: usize, n_state: usize) -> Result<()> {
    if n_params != n_state {
        return Err(Error::Shape(format!(
            "state has {n_state} units, parameters expect {n_params}"
        )));
    }
    Ok(())
}

/// Energy of a joint state of the full machine. Pair terms are accumulated
/// over `j < k`, which absorbs the 1/2 in the quadratic forms; only active
/// pairs contribute.
pub fn energy_capbm(params: &CapBmParams, state: &PhasorState) -> Result<f64> {
    check_state_len(params.n(), state.n())?;
    let n = params.n();
    let mut e = 0.0;
    for j in 0..n {
        if !state.amp(j) {
            continue;
        }
        e += params.eps[j];
        let phi_j = state.phase(j).radians();
        for k in (j + 1)..n {
            if !state.amp(k) {
                continue;
            }
            let phi_k = state.phase(k).radians();
            e -= params.b[(j, k)] * (params.theta[(j, k)] + phi_k - phi_j).cos();
            e -= params.jamp[(j, k)];
        }
    }
    Ok(e)
}

/// Energy of a joint (visible, hidden) state of the restricted machine.
pub fn energy_caprbm(params: &CapRbmParams, v: &PhasorState, h: &PhasorState) -> Result<f64> {
    check_state_len(params.n_visible(), v.n())?;
    check_state_len(params.n_hidden(), h.n())?;
    let mut e = 0.0;
    for j in 0..v.n() {
        if v.amp(j) {
            e += params.bias_v[j];
        }
    }
    for k in 0..h.n() {
        if h.amp(k) {
            e += params.bias_h[k];
        }
    }
    for j in 0..v.n() {
        if !v.amp(j) {
            continue;
        }
        let vj = v.value(j);
        for k in 0..h.n() {
            if !h.amp(k) {
                continue;
            }
            e -= (vj.conj() * params.w[(j, k)] * h.value(k)).re;
            e -= params.jamp[(j, k)];
        }
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// input sums and conditionals
// ---------------------------------------------------------------------------

/// Everything a unit needs to know about the rest of the network: the polar
/// decomposition `a e^{i alpha}` of its complex input sum and the real
/// amplitude-coupling sum `mu`.
#[derive(Clone, Copy, Debug)]
pub struct InputSums {
    /// Modulus of the complex input sum; the phase concentration.
    pub a: f64,
    /// Argument of the complex input sum; the preferred phase. Zero when
    /// `a == 0` (any direction would do; zero keeps results reproducible).
    pub alpha: Angle,
    /// Net amplitude-coupling input.
    pub mu: f64,
}

impl InputSums {
    pub fn from_complex(u: Complex64, mu: f64) -> Self {
        let a = u.norm();
        let alpha = if a == 0.0 { Angle::ZERO } else { Angle::new(u.arg()) };
        InputSums { a, alpha, mu }
    }
}

/// Input sums of unit `j` of the full machine given the rest of the state.
/// Inactive neighbors contribute nothing.
pub fn input_sums(params: &CapBmParams, state: &PhasorState, j: usize) -> Result<InputSums> {
    check_state_len(params.n(), state.n())?;
    let n = params.n();
    if j >= n {
        return Err(Error::Shape(format!("unit index {j} out of range for {n} units")));
    }
    let mut u = Complex64::new(0.0, 0.0);
    let mut mu = 0.0;
    for k in 0..n {
        if k == j || !state.amp(k) {
            continue;
        }
        u += params.w(j, k) * state.value(k);
        mu += params.jamp[(j, k)];
    }
    Ok(InputSums::from_complex(u, mu))
}

/// Which layer of a restricted machine is being computed from which.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerDir {
    /// Source is the visible layer, targets are hidden units (uses the
    /// conjugated coupling, `u_k = sum_j conj(W[j][k]) v_j`).
    VisibleToHidden,
    /// Source is the hidden layer, targets are visible units
    /// (`u_j = sum_k W[j][k] h_k`).
    HiddenToVisible,
}

/// Input sums for every unit of the target layer of a restricted machine.
/// `source` holds the phasor values of the opposite layer (moduli in
/// `[0, 1]`; amplitude sums use the moduli).
pub fn rbm_layer_sums(
    params: &CapRbmParams,
    source: &[Complex64],
    dir: LayerDir,
) -> Result<Vec<InputSums>> {
    let (nv, nh) = (params.n_visible(), params.n_hidden());
    let (n_source, n_target) = match dir {
        LayerDir::VisibleToHidden => (nv, nh),
        LayerDir::HiddenToVisible => (nh, nv),
    };
    if source.len() != n_source {
        return Err(Error::Shape(format!(
            "source layer has {} units, expected {n_source}",
            source.len()
        )));
    }

    let mut u = vec![Complex64::new(0.0, 0.0); n_target];
    let mut mu = vec![0.0f64; n_target];
    match dir {
        LayerDir::VisibleToHidden => {
            // Row-major accumulation: each active visible adds a row.
            for (j, &vj) in source.iter().enumerate() {
                let m = vj.norm();
                if m == 0.0 {
                    continue;
                }
                let w_row = params.w.row(j);
                let j_row = params.jamp.row(j);
                for k in 0..nh {
                    u[k] += w_row[k].conj() * vj;
                    mu[k] += j_row[k] * m;
                }
            }
        }
        LayerDir::HiddenToVisible => {
            for j in 0..nv {
                let w_row = params.w.row(j);
                let j_row = params.jamp.row(j);
                let mut uj = Complex64::new(0.0, 0.0);
                let mut muj = 0.0;
                for (k, &hk) in source.iter().enumerate() {
                    uj += w_row[k] * hk;
                    muj += j_row[k] * hk.norm();
                }
                u[j] = uj;
                mu[j] = muj;
            }
        }
    }
    Ok((0..n_target)
        .map(|t| InputSums::from_complex(u[t], mu[t]))
        .collect())
}

/// Amplitude bias of each unit in the target layer for `dir`.
pub(crate) fn target_bias(params: &CapRbmParams, dir: LayerDir) -> &Array1<f64> {
    match dir {
        LayerDir::VisibleToHidden => &params.bias_h,
        LayerDir::HiddenToVisible => &params.bias_v,
    }
}

/// Log-odds of a unit being active given its input sums and bias.
pub(crate) fn amp_logit(a: f64, mu: f64, eps: f64) -> f64 {
    mu - eps + log_bessel_i0(a).expect("input modulus is finite and non-negative")
}

/// Probability that a unit is active given the rest of the network:
/// `sigmoid(mu - eps + ln I0(a))`. The Bessel term is the gain from the
/// phase degree of freedom an active unit unlocks.
pub fn amp_prob(sums: &InputSums, eps: f64) -> Result<f64> {
    if !sums.a.is_finite() || sums.a < 0.0 {
        return Err(Error::Domain(format!(
            "input modulus must be finite and non-negative, got {}",
            sums.a
        )));
    }
    if !sums.mu.is_finite() || !eps.is_finite() {
        return Err(Error::Domain(format!(
            "non-finite conditional inputs: mu = {}, eps = {eps}",
            sums.mu
        )));
    }
    Ok(sigmoid(sums.mu - eps + log_bessel_i0(sums.a)?))
}

/// Parameters of the phase conditional of an active unit: a von Mises
/// distribution with mean `alpha` and concentration `a`. At zero
/// concentration it degenerates to uniform (and the reported mean is the
/// zero-input convention).
pub fn phase_conditional(sums: &InputSums) -> (Angle, f64) {
    (sums.alpha, sums.a)
}

/// Negative log of the (unnormalized) visible marginal of a restricted
/// machine: `a^T |v| - nh ln(2 pi) - sum_k softplus(mu_k - b_k + ln I0(a_k))`,
/// each hidden unit integrated out in closed form. Differences of this
/// quantity across visible vectors are exact log-probability ratios, which
/// makes it a useful training diagnostic.
pub fn visible_free_energy(params: &CapRbmParams, v: &[Complex64]) -> Result<f64> {
    let sums = rbm_layer_sums(params, v, LayerDir::VisibleToHidden)?;
    let mut f = 0.0;
    for (j, z) in v.iter().enumerate() {
        f += params.bias_v[j] * z.norm();
    }
    f -= params.n_hidden() as f64 * TAU.ln();
    for (k, s) in sums.iter().enumerate() {
        f -= softplus(amp_logit(s.a, s.mu, params.bias_h[k]));
    }
    Ok(f)
}

#[cfg(test)]
mod tests;
