//! Gibbs sampling and rate (expectation) computation.
//!
//! The full machine is sampled by sequential single-site sweeps: each update
//! draws a unit's amplitude from its Bernoulli conditional and, if the unit
//! comes up active, its phase from the von Mises conditional. The restricted
//! machine is sampled by block alternation: given one layer, all units of the
//! other layer are conditionally independent and sampled in one pass.
//!
//! Rates are conditional expectations rather than samples. A unit's expected
//! modulus is its activation probability `P`; its expected complex value is
//! `P * (I1/I0)(a) * e^{i alpha}`, the activation probability times the von
//! Mises mean resultant. The modulus of the expectation is therefore always
//! at most the expected modulus.

use crate::error::{Error, Result};
use crate::math::{bessel_ratio, sample_von_mises, RngHandle};
use crate::model::{
    amp_prob, input_sums, phase_conditional, rbm_layer_sums, target_bias, CapBmParams,
    CapRbmParams, InputSums, LayerDir, PhasorState,
};
use num_complex::Complex64;

/// A Gibbs chain over the full machine: current state, the chain's own
/// random stream, and how many full sweeps it has absorbed.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub state: PhasorState,
    pub rng: RngHandle,
    pub sweep_count: u64,
}

impl ChainState {
    pub fn new(state: PhasorState, rng: RngHandle) -> Self {
        ChainState { state, rng, sweep_count: 0 }
    }
}

/// Unit visiting order within a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepOrder {
    /// Ascending unit index; the reproducible default.
    Fixed,
    /// A fresh uniform permutation per sweep, drawn from the chain's RNG.
    RandomPermutation,
}

/// Amplitude handling during sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmplitudeMode {
    /// Amplitudes follow their Bernoulli conditionals.
    Stochastic,
    /// Compatibility mode for the fixed-modulus predecessor model: every
    /// amplitude is clamped to 1 and only phases are sampled.
    ClampedOn,
}

/// Per-unit expectations of a layer or network: `complex_mean[j] = E[z_j]`
/// and `amp_mean[j] = E[|z_j|]`, both conditional on whatever the caller
/// held fixed. `|complex_mean[j]| <= amp_mean[j]` always.
#[derive(Clone, Debug)]
pub struct Rate {
    pub complex_mean: Vec<Complex64>,
    pub amp_mean: Vec<f64>,
}

impl Rate {
    /// Degenerate rate representing a known state exactly.
    pub fn from_state(state: &PhasorState) -> Self {
        Rate {
            complex_mean: state.to_complex(),
            amp_mean: (0..state.n()).map(|j| if state.amp(j) { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.amp_mean.len()
    }
}

/// Expected complex value and expected modulus of one unit given its input
/// sums and amplitude bias.
pub fn unit_rate(sums: &InputSums, eps: f64) -> Result<(Complex64, f64)> {
    let p = amp_prob(sums, eps)?;
    let resultant = bessel_ratio(sums.a)?;
    Ok((Complex64::from_polar(p * resultant, sums.alpha.radians()), p))
}

/// Draws one unit's amplitude (unless clamped) and, if active, its phase; a
/// unit that lands inactive keeps its old phase, which carries no weight.
pub fn gibbs_update_unit(
    params: &CapBmParams,
    chain: &mut ChainState,
    j: usize,
    mode: AmplitudeMode,
) -> Result<()> {
    let sums = input_sums(params, &chain.state, j)?;
    let on = match mode {
        AmplitudeMode::Stochastic => {
            let p = amp_prob(&sums, params.eps()[j])?;
            chain.rng.uniform() < p
        }
        AmplitudeMode::ClampedOn => true,
    };
    chain.state.set_amp(j, on);
    if on {
        let (mean, kappa) = phase_conditional(&sums);
        let phase = sample_von_mises(mean, kappa, &mut chain.rng)?;
        chain.state.set_phase(j, phase);
    }
    Ok(())
}

/// Applies `gibbs_update_unit` to every unit exactly once.
pub fn gibbs_sweep(
    params: &CapBmParams,
    chain: &mut ChainState,
    order: SweepOrder,
    mode: AmplitudeMode,
) -> Result<()> {
    let n = params.n();
    match order {
        SweepOrder::Fixed => {
            for j in 0..n {
                gibbs_update_unit(params, chain, j, mode)?;
            }
        }
        SweepOrder::RandomPermutation => {
            let mut idx: Vec<usize> = (0..n).collect();
            chain.rng.shuffle(&mut idx);
            for j in idx {
                gibbs_update_unit(params, chain, j, mode)?;
            }
        }
    }
    chain.sweep_count += 1;
    Ok(())
}

/// Composes `n_sweeps` full sweeps.
pub fn run_chain(
    params: &CapBmParams,
    chain: &mut ChainState,
    n_sweeps: u64,
    order: SweepOrder,
    mode: AmplitudeMode,
) -> Result<()> {
    for _ in 0..n_sweeps {
        gibbs_sweep(params, chain, order, mode)?;
    }
    Ok(())
}

/// Samples every unit of the target layer of a restricted machine given the
/// opposite layer. Targets are conditionally independent; inactive draws get
/// phase zero.
pub fn rbm_sample_layer(
    params: &CapRbmParams,
    given: &PhasorState,
    dir: LayerDir,
    mode: AmplitudeMode,
    rng: &mut RngHandle,
) -> Result<PhasorState> {
    let sums = rbm_layer_sums(params, &given.to_complex(), dir)?;
    let bias = target_bias(params, dir);
    let mut out = PhasorState::all_off(sums.len());
    for (t, s) in sums.iter().enumerate() {
        let on = match mode {
            AmplitudeMode::Stochastic => rng.uniform() < amp_prob(s, bias[t])?,
            AmplitudeMode::ClampedOn => true,
        };
        out.set_amp(t, on);
        if on {
            let (mean, kappa) = phase_conditional(s);
            out.set_phase(t, sample_von_mises(mean, kappa, rng)?);
        }
    }
    Ok(out)
}

/// Expected activity of every unit of the target layer given the opposite
/// layer's values (samples or rates; moduli in `[0, 1]`).
pub fn rbm_layer_rate(params: &CapRbmParams, source: &[Complex64], dir: LayerDir) -> Result<Rate> {
    let sums = rbm_layer_sums(params, source, dir)?;
    let bias = target_bias(params, dir);
    let mut complex_mean = Vec::with_capacity(sums.len());
    let mut amp_mean = Vec::with_capacity(sums.len());
    for (t, s) in sums.iter().enumerate() {
        let (c, a) = unit_rate(s, bias[t])?;
        complex_mean.push(c);
        amp_mean.push(a);
    }
    Ok(Rate { complex_mean, amp_mean })
}

/// Runs `n_alternations` of block Gibbs from the visible configuration `v0`
/// (one alternation = hidden update then visible update) and returns the
/// final visible step as rates rather than samples, which is what display
/// and similarity metrics want. Zero alternations return `v0` itself as a
/// degenerate rate.
pub fn rbm_reconstruct(
    params: &CapRbmParams,
    v0: &PhasorState,
    n_alternations: u64,
    rng: &mut RngHandle,
) -> Result<Rate> {
    if v0.n() != params.n_visible() {
        return Err(Error::Shape(format!(
            "visible configuration has {} units, model expects {}",
            v0.n(),
            params.n_visible()
        )));
    }
    if n_alternations == 0 {
        return Ok(Rate::from_state(v0));
    }
    let mut v = v0.clone();
    for step in 1..=n_alternations {
        let h = rbm_sample_layer(params, &v, LayerDir::VisibleToHidden, AmplitudeMode::Stochastic, rng)?;
        if step == n_alternations {
            return rbm_layer_rate(params, &h.to_complex(), LayerDir::HiddenToVisible);
        }
        v = rbm_sample_layer(params, &h, LayerDir::HiddenToVisible, AmplitudeMode::Stochastic, rng)?;
    }
    unreachable!("loop returns on its final iteration")
}

#[cfg(test)]
mod tests;
