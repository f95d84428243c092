//! Brute-force verification oracles.
//!
//! Everything here recomputes probabilities by direct summation over a
//! discretized state space: each unit is either off or on at one of `K`
//! equally spaced phases. The off state carries measure weight `2 pi` and
//! each on-phase carries `2 pi / K`, so per-unit sums converge to the
//! continuous model's amplitude-sum-plus-phase-integral as `K` grows.
//!
//! The evaluators share only parameter types (read through their public
//! accessors) with the rest of the crate; energies are recomputed from the
//! quadratic form itself so that agreement with the analytic conditionals,
//! rates, and gradients is evidence rather than tautology.

mod suite;

pub use suite::{run_checks, CheckLevel, CheckResult};

use crate::error::{Error, Result};
use crate::learning::{polar_gradients, GradientStats, PolarGradients};
use crate::model::{CapBmParams, CapRbmParams, PhasorState};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Hard ceiling on enumerated joint states.
pub const MAX_ORACLE_STATES: u128 = 10_000_000;

/// Smallest allowed phase grid; grids must be powers of two.
const MIN_PHASE_BINS: usize = 16;

/// Compensated (Kahan) accumulator for long probability sums.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

fn validate_bins(k: usize) -> Result<()> {
    if k < MIN_PHASE_BINS || !k.is_power_of_two() {
        return Err(Error::Domain(format!(
            "phase grid must be a power of two of at least {MIN_PHASE_BINS}, got {k}"
        )));
    }
    Ok(())
}

fn checked_state_count(k: usize, n_units: usize) -> Result<u128> {
    let states = (k as u128 + 1)
        .checked_pow(n_units as u32)
        .unwrap_or(u128::MAX);
    if states > MAX_ORACLE_STATES {
        return Err(Error::TooManyStates { states, limit: MAX_ORACLE_STATES });
    }
    Ok(states)
}

/// Log-sum-exp over a slice, stable under large magnitudes.
fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut s = Kahan::default();
    for &x in xs {
        s.add((x - m).exp());
    }
    m + s.sum.ln()
}

/// Half the L1 distance between two distributions on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "distributions have different supports: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    let mut s = Kahan::default();
    for (a, b) in p.iter().zip(q) {
        s.add((a - b).abs());
    }
    Ok(0.5 * s.sum)
}

/// A full machine over a discretized state space.
#[derive(Debug)]
pub struct DiscretizedBm {
    params: CapBmParams,
    k: usize,
}

impl DiscretizedBm {
    pub fn new(params: CapBmParams, k: usize) -> Result<Self> {
        validate_bins(k)?;
        Ok(DiscretizedBm { params, k })
    }

    pub fn bins(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &CapBmParams {
        &self.params
    }

    fn n_units(&self) -> usize {
        self.params.n()
    }

    /// Complex value of one unit's digit: 0 is off, digit d >= 1 is on at
    /// phase `2 pi (d-1) / K`.
    fn digit_value(&self, digit: usize) -> Complex64 {
        if digit == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(1.0, TAU * (digit - 1) as f64 / self.k as f64)
        }
    }

    fn digit_log_weight(&self, digit: usize) -> f64 {
        if digit == 0 {
            TAU.ln()
        } else {
            (TAU / self.k as f64).ln()
        }
    }

    /// The energy, recomputed from the quadratic form: pairwise complex
    /// couplings and amplitude couplings each halved over the double sum,
    /// plus the linear amplitude penalty.
    fn energy(&self, z: &[Complex64]) -> f64 {
        let n = z.len();
        let mut pair = 0.0;
        let mut amp_pair = 0.0;
        let mut linear = 0.0;
        for j in 0..n {
            let aj = z[j].norm();
            linear += self.params.eps()[j] * aj;
            for k in 0..n {
                let w = Complex64::from_polar(
                    self.params.b()[(j, k)],
                    self.params.theta()[(j, k)],
                );
                pair += (z[j].conj() * w * z[k]).re;
                amp_pair += aj * self.params.jamp()[(j, k)] * z[k].norm();
            }
        }
        -0.5 * pair - 0.5 * amp_pair + linear
    }

    /// Exhaustive probability table over all `(K+1)^N` states.
    pub fn enumerate(&self) -> Result<BoltzmannTable> {
        let states = checked_state_count(self.k, self.n_units())? as usize;
        let n = self.n_units();
        let mut log_mass = vec![0.0f64; states];
        let mut digits = vec![0usize; n];
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for (index, lm) in log_mass.iter_mut().enumerate() {
            let mut logw = 0.0;
            for (j, &d) in digits.iter().enumerate() {
                z[j] = self.digit_value(d);
                logw += self.digit_log_weight(d);
            }
            *lm = logw - self.energy(&z);
            if index + 1 < states {
                for d in digits.iter_mut() {
                    if *d == self.k {
                        *d = 0;
                    } else {
                        *d += 1;
                        break;
                    }
                }
            }
        }
        let log_z = log_sum_exp(&log_mass);
        let mut probs = log_mass;
        for p in probs.iter_mut() {
            *p = (*p - log_z).exp();
        }
        let mut total = Kahan::default();
        for &p in &probs {
            total.add(p);
        }
        if (total.sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "enumerated probabilities sum to {} (should be 1)",
                total.sum
            )));
        }
        Ok(BoltzmannTable { k: self.k, n_units: n, probs, log_z })
    }

    /// Clamped-neighbor conditional activation probability of unit `j`:
    /// direct summation over its own `K+1` states with every other unit
    /// fixed at its value in `rest`.
    pub fn exact_marginal_amp(&self, rest: &PhasorState, j: usize) -> Result<f64> {
        let (off, on) = self.conditional_masses(rest, j)?;
        let on_total: f64 = on.iter().sum();
        Ok(on_total / (off + on_total))
    }

    /// Conditional phase histogram of unit `j` given it is on (normalized
    /// over the `K` bins), with every other unit fixed as in `rest`.
    pub fn exact_phase_histogram(&self, rest: &PhasorState, j: usize) -> Result<Vec<f64>> {
        let (_, on) = self.conditional_masses(rest, j)?;
        let total: f64 = on.iter().sum();
        if total <= 0.0 {
            return Err(Error::Domain("conditional on-mass vanished".into()));
        }
        Ok(on.into_iter().map(|m| m / total).collect())
    }

    /// Total variation between the oracle's conditional phase histogram and
    /// the analytic conditional density evaluated at the bin centers (both
    /// normalized over the bins, so no Bessel normalizer is involved).
    pub fn exact_phase_check(&self, rest: &PhasorState, j: usize) -> Result<f64> {
        let hist = self.exact_phase_histogram(rest, j)?;
        let sums = crate::model::input_sums(&self.params, rest, j)?;
        let mut density: Vec<f64> = (0..self.k)
            .map(|d| {
                let phi = TAU * d as f64 / self.k as f64;
                sums.a * (phi - sums.alpha.radians()).cos()
            })
            .collect();
        let m = density.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for x in density.iter_mut() {
            *x = (*x - m).exp();
            total += *x;
        }
        for x in density.iter_mut() {
            *x /= total;
        }
        total_variation(&hist, &density)
    }

    /// Unnormalized masses of unit `j`'s states given the others: the off
    /// mass and the `K` on-phase masses. Energies are evaluated on the full
    /// assembled state, so any common terms cancel in the ratios.
    fn conditional_masses(&self, rest: &PhasorState, j: usize) -> Result<(f64, Vec<f64>)> {
        let n = self.n_units();
        if rest.n() != n {
            return Err(Error::Shape(format!(
                "state has {} units, model has {n}",
                rest.n()
            )));
        }
        if j >= n {
            return Err(Error::Shape(format!("unit index {j} out of range for {n} units")));
        }
        let mut z: Vec<Complex64> = (0..n).map(|i| rest.value(i)).collect();
        z[j] = Complex64::new(0.0, 0.0);
        let e_off = self.energy(&z);
        let mut exponents = Vec::with_capacity(self.k);
        for d in 1..=self.k {
            z[j] = self.digit_value(d);
            exponents.push(-self.energy(&z));
        }
        // Shift by the off-state energy so the exponentials stay moderate.
        let off = 1.0; // 2 pi / 2 pi, after dividing all masses by 2 pi e^{-e_off}
        let on = exponents
            .into_iter()
            .map(|x| (x + e_off).exp() / self.k as f64)
            .collect();
        Ok((off, on))
    }
}

/// Exhaustive probability table in mixed-radix digit order: unit 0's digit
/// varies fastest, and each unit's digit is 0 for off or `1 + bin` for on.
#[derive(Debug)]
pub struct BoltzmannTable {
    k: usize,
    n_units: usize,
    probs: Vec<f64>,
    log_z: f64,
}

impl BoltzmannTable {
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    pub fn bins(&self) -> usize {
        self.k
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    /// Index of the cell containing `state`, with each on-phase rounded to
    /// the nearest grid point. Use this to histogram continuous samples on
    /// the oracle's grid.
    pub fn index_of_binned(&self, state: &PhasorState) -> Result<usize> {
        if state.n() != self.n_units {
            return Err(Error::Shape(format!(
                "state has {} units, table has {}",
                state.n(),
                self.n_units
            )));
        }
        let mut index = 0usize;
        let mut stride = 1usize;
        for j in 0..self.n_units {
            let digit = if state.amp(j) {
                let bin = (state.phase(j).radians() * self.k as f64 / TAU).round() as usize
                    % self.k;
                1 + bin
            } else {
                0
            };
            index += digit * stride;
            stride *= self.k + 1;
        }
        Ok(index)
    }

    /// Digits of a table index (unit 0 first).
    #[cfg_attr(not(test), allow(dead_code))]
    fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.n_units];
        for d in digits.iter_mut() {
            *d = index % (self.k + 1);
            index /= self.k + 1;
        }
        digits
    }

    /// Marginal activation probability of unit `j`.
    pub fn marginal_amp(&self, j: usize) -> Result<f64> {
        if j >= self.n_units {
            return Err(Error::Shape(format!(
                "unit index {j} out of range for {} units",
                self.n_units
            )));
        }
        let stride = (self.k + 1).pow(j as u32);
        let mut on = Kahan::default();
        for (i, &p) in self.probs.iter().enumerate() {
            if !(i / stride).is_multiple_of(self.k + 1) {
                on.add(p);
            }
        }
        Ok(on.sum)
    }

    /// Exact expected complex value of unit `j`.
    pub fn mean_value(&self, j: usize) -> Result<Complex64> {
        if j >= self.n_units {
            return Err(Error::Shape(format!(
                "unit index {j} out of range for {} units",
                self.n_units
            )));
        }
        let stride = (self.k + 1).pow(j as u32);
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for (i, &p) in self.probs.iter().enumerate() {
            let digit = (i / stride) % (self.k + 1);
            if digit != 0 {
                let phi = TAU * (digit - 1) as f64 / self.k as f64;
                re.add(p * phi.cos());
                im.add(p * phi.sin());
            }
        }
        Ok(Complex64::new(re.sum, im.sum))
    }
}

/// A restricted machine over the discretized state space. The hidden layer
/// is marginalized in closed (factorized) form, so only the visible grid is
/// enumerated; the guard therefore applies to `(K+1)^{n_visible}`.
#[derive(Debug)]
pub struct DiscretizedRbm {
    params: CapRbmParams,
    k: usize,
}

impl DiscretizedRbm {
    pub fn new(params: CapRbmParams, k: usize) -> Result<Self> {
        validate_bins(k)?;
        checked_state_count(k, params.n_visible())?;
        Ok(DiscretizedRbm { params, k })
    }

    pub fn bins(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &CapRbmParams {
        &self.params
    }

    /// Bipartite energy recomputed from its definition.
    fn energy(&self, v: &[Complex64], h: &[Complex64]) -> f64 {
        let p = &self.params;
        let mut cross = 0.0;
        let mut amp_cross = 0.0;
        let mut linear = 0.0;
        for (j, vj) in v.iter().enumerate() {
            let va = vj.norm();
            linear += p.bias_v()[j] * va;
            for (k, hk) in h.iter().enumerate() {
                cross += (vj.conj() * p.w()[(j, k)] * hk).re;
                amp_cross += va * p.jamp()[(j, k)] * hk.norm();
            }
        }
        for (k, hk) in h.iter().enumerate() {
            linear += p.bias_h()[k] * hk.norm();
        }
        -cross - amp_cross + linear
    }

    fn digit_value(&self, digit: usize) -> Complex64 {
        if digit == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(1.0, TAU * (digit - 1) as f64 / self.k as f64)
        }
    }

    /// Energy contributions of each hidden unit's digits on top of the
    /// all-off hidden state. The bipartite energy is additive over hidden
    /// units once the visibles are fixed, so these tables reconstruct every
    /// joint energy exactly.
    fn hidden_digit_energies(&self, v: &[Complex64]) -> (f64, Vec<Vec<f64>>) {
        let nh = self.params.n_hidden();
        let mut h = vec![Complex64::new(0.0, 0.0); nh];
        let e_base = self.energy(v, &h);
        let mut tables = Vec::with_capacity(nh);
        for k in 0..nh {
            let mut table = Vec::with_capacity(self.k);
            for d in 1..=self.k {
                h[k] = self.digit_value(d);
                table.push(self.energy(v, &h) - e_base);
            }
            h[k] = Complex64::new(0.0, 0.0);
            tables.push(table);
        }
        (e_base, tables)
    }

    fn log_weight_visible(&self, v: &[Complex64]) -> f64 {
        v.iter()
            .map(|z| if z.norm() > 0.0 { (TAU / self.k as f64).ln() } else { TAU.ln() })
            .sum()
    }

    /// Log unnormalized mass of a visible configuration with the hidden
    /// layer summed out: `log weight(v) - E(v, 0) + sum_k log Z_k`, where
    /// each `Z_k` sums the off state and the K on-phases of hidden unit k.
    fn log_mass_visible(&self, v: &[Complex64]) -> f64 {
        let (e_base, tables) = self.hidden_digit_energies(v);
        let mut lm = self.log_weight_visible(v) - e_base;
        let bin_weight = 1.0 / self.k as f64;
        for table in &tables {
            let m = table.iter().fold(0.0f64, |acc, &e| acc.max(-e));
            let mut s = (0.0 - m).exp(); // off state, relative energy 0
            for &e in table {
                s += bin_weight * (-e - m).exp();
            }
            lm += TAU.ln() + m + s.ln();
        }
        lm
    }

    /// Streaming log partition function over the visible grid.
    fn log_partition(&self) -> f64 {
        let nv = self.params.n_visible();
        let states = (self.k as u128 + 1).pow(nv as u32) as usize;
        let mut digits = vec![0usize; nv];
        let mut v = vec![Complex64::new(0.0, 0.0); nv];
        let mut max = f64::NEG_INFINITY;
        let mut sum = Kahan::default();
        for index in 0..states {
            for (j, &d) in digits.iter().enumerate() {
                v[j] = self.digit_value(d);
            }
            let lm = self.log_mass_visible(&v);
            if lm > max {
                let scale = (max - lm).exp();
                let rescaled = sum.sum * scale;
                sum = Kahan::default();
                sum.add(rescaled);
                sum.add(1.0);
                max = lm;
            } else {
                sum.add((lm - max).exp());
            }
            if index + 1 < states {
                for d in digits.iter_mut() {
                    if *d == self.k {
                        *d = 0;
                    } else {
                        *d += 1;
                        break;
                    }
                }
            }
        }
        max + sum.sum.ln()
    }

    /// Checks that a visible row lies on the discretization grid: every
    /// entry off or of unit modulus with a grid-aligned phase.
    fn check_grid_row(&self, row: &[Complex64]) -> Result<()> {
        if row.len() != self.params.n_visible() {
            return Err(Error::Shape(format!(
                "row has {} units, model has {} visibles",
                row.len(),
                self.params.n_visible()
            )));
        }
        for (j, z) in row.iter().enumerate() {
            let m = z.norm();
            if m < 1e-9 {
                continue;
            }
            if (m - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "unit {j} has modulus {m}, expected 0 or 1"
                )));
            }
            let phi = z.arg().rem_euclid(TAU);
            let d = (phi * self.k as f64 / TAU).round();
            if (phi - d * TAU / self.k as f64).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "unit {j} phase {phi} is off the {}-point grid",
                    self.k
                )));
            }
        }
        Ok(())
    }

    /// Mean exact log-likelihood of the rows under the discretized model.
    pub fn exact_loglik(&self, rows: &[&[Complex64]]) -> Result<f64> {
        if rows.is_empty() {
            return Err(Error::Domain("log-likelihood of an empty dataset".into()));
        }
        for row in rows {
            self.check_grid_row(row)?;
        }
        let log_z = self.log_partition();
        let mut total = Kahan::default();
        for row in rows {
            total.add(self.log_mass_visible(row) - log_z);
        }
        Ok(total.sum / rows.len() as f64)
    }

    /// Exact conditional expectations of each hidden unit given `v`:
    /// activation probability and expected complex value, by direct
    /// summation over the unit's digits.
    pub fn hidden_conditional(&self, v: &[Complex64]) -> Result<(Vec<f64>, Vec<Complex64>)> {
        if v.len() != self.params.n_visible() {
            return Err(Error::Shape(format!(
                "row has {} units, model has {} visibles",
                v.len(),
                self.params.n_visible()
            )));
        }
        let (_, tables) = self.hidden_digit_energies(v);
        let bin_weight = 1.0 / self.k as f64;
        let mut p_on = Vec::with_capacity(tables.len());
        let mut mean = Vec::with_capacity(tables.len());
        for table in &tables {
            let m = table.iter().fold(0.0f64, |acc, &e| acc.max(-e));
            let off = (0.0 - m).exp();
            let mut on_total = 0.0;
            let mut resultant = Complex64::new(0.0, 0.0);
            for (i, &e) in table.iter().enumerate() {
                let mass = bin_weight * (-e - m).exp();
                on_total += mass;
                let phi = TAU * i as f64 / self.k as f64;
                resultant += mass * Complex64::from_polar(1.0, phi);
            }
            p_on.push(on_total / (off + on_total));
            mean.push(resultant / (off + on_total));
        }
        Ok((p_on, mean))
    }

    /// Data-side expectations: visibles clamped to the rows, hidden units
    /// replaced by their exact conditional expectations.
    pub fn exact_data_stats(&self, rows: &[&[Complex64]]) -> Result<GradientStats> {
        if rows.is_empty() {
            return Err(Error::Domain("statistics of an empty dataset".into()));
        }
        let mut stats =
            GradientStats::zeros(self.params.n_visible(), self.params.n_hidden());
        for row in rows {
            self.check_grid_row(row)?;
            let (p_on, mean) = self.hidden_conditional(row)?;
            stats.accumulate_rates(row, &mean, &p_on)?;
        }
        Ok(stats)
    }

    /// Model-side expectations by enumeration of the visible grid, hidden
    /// units handled by their exact conditionals.
    pub fn exact_model_stats(&self) -> Result<GradientStats> {
        let (nv, nh) = (self.params.n_visible(), self.params.n_hidden());
        let log_z = self.log_partition();
        let states = (self.k as u128 + 1).pow(nv as u32) as usize;
        let mut digits = vec![0usize; nv];
        let mut v = vec![Complex64::new(0.0, 0.0); nv];
        let mut pair_complex = Array2::<Complex64>::zeros((nv, nh));
        let mut pair_amp = Array2::<f64>::zeros((nv, nh));
        let mut amp_v = Array1::<f64>::zeros(nv);
        let mut amp_h = Array1::<f64>::zeros(nh);
        for index in 0..states {
            for (j, &d) in digits.iter().enumerate() {
                v[j] = self.digit_value(d);
            }
            let weight = (self.log_mass_visible(&v) - log_z).exp();
            let (p_on, mean) = self.hidden_conditional(&v)?;
            for j in 0..nv {
                let va = v[j].norm();
                amp_v[j] += weight * va;
                for k in 0..nh {
                    pair_complex[(j, k)] += v[j] * mean[k].conj() * weight;
                    pair_amp[(j, k)] += weight * va * p_on[k];
                }
            }
            for k in 0..nh {
                amp_h[k] += weight * p_on[k];
            }
            if index + 1 < states {
                for d in digits.iter_mut() {
                    if *d == self.k {
                        *d = 0;
                    } else {
                        *d += 1;
                        break;
                    }
                }
            }
        }
        GradientStats::from_means(pair_complex, pair_amp, amp_v, amp_h)
    }

    /// Exact log-likelihood ascent directions: analytic formulas applied to
    /// exact data-side and model-side expectations.
    pub fn exact_gradient(&self, rows: &[&[Complex64]]) -> Result<PolarGradients> {
        let positive = self.exact_data_stats(rows)?;
        let negative = self.exact_model_stats()?;
        polar_gradients(&self.params, &positive, &negative)
    }
}

/// Centered finite differences of the exact mean log-likelihood with
/// respect to every polar coordinate: coupling moduli and angles, amplitude
/// couplings, and both bias vectors. The independent check for the analytic
/// gradient formulas.
pub fn fd_gradients(
    params: &CapRbmParams,
    rows: &[&[Complex64]],
    k: usize,
    step: f64,
) -> Result<PolarGradients> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {step}")));
    }
    let (nv, nh) = (params.n_visible(), params.n_hidden());
    let loglik = |p: CapRbmParams| -> Result<f64> { DiscretizedRbm::new(p, k)?.exact_loglik(rows) };
    let mut db = Array2::zeros((nv, nh));
    let mut dtheta = Array2::zeros((nv, nh));
    let mut dj = Array2::zeros((nv, nh));
    for j in 0..nv {
        for kk in 0..nh {
            let w = params.w()[(j, kk)];
            let (b, theta) = (w.norm(), w.arg());
            let centered = |plus: CapRbmParams, minus: CapRbmParams| -> Result<f64> {
                Ok((loglik(plus)? - loglik(minus)?) / (2.0 * step))
            };
            let with_w = |value: Complex64| -> CapRbmParams {
                let mut p = params.clone();
                p.w[(j, kk)] = value;
                p
            };
            db[(j, kk)] = centered(
                with_w(Complex64::from_polar(b + step, theta)),
                with_w(Complex64::from_polar(b - step, theta)),
            )?;
            dtheta[(j, kk)] = centered(
                with_w(Complex64::from_polar(b, theta + step)),
                with_w(Complex64::from_polar(b, theta - step)),
            )?;
            let with_j = |value: f64| -> CapRbmParams {
                let mut p = params.clone();
                p.jamp[(j, kk)] = value;
                p
            };
            dj[(j, kk)] = centered(
                with_j(params.jamp()[(j, kk)] + step),
                with_j(params.jamp()[(j, kk)] - step),
            )?;
        }
    }
    let mut d_bias_v = Array1::zeros(nv);
    for j in 0..nv {
        let with_bias = |value: f64| -> CapRbmParams {
            let mut p = params.clone();
            p.bias_v[j] = value;
            p
        };
        d_bias_v[j] = (loglik(with_bias(params.bias_v()[j] + step))?
            - loglik(with_bias(params.bias_v()[j] - step))?)
            / (2.0 * step);
    }
    let mut d_bias_h = Array1::zeros(nh);
    for kk in 0..nh {
        let with_bias = |value: f64| -> CapRbmParams {
            let mut p = params.clone();
            p.bias_h[kk] = value;
            p
        };
        d_bias_h[kk] = (loglik(with_bias(params.bias_h()[kk] + step))?
            - loglik(with_bias(params.bias_h()[kk] - step))?)
            / (2.0 * step);
    }
    Ok(PolarGradients { db, dtheta, dj, d_bias_v, d_bias_h })
}
