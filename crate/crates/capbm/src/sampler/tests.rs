use super::*;
use crate::math::{log_bessel_i0, Angle};
use crate::model::ParamScales;
use approx::assert_abs_diff_eq;
use ndarray::{array, Array1, Array2};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn single_unit(eps: f64) -> CapBmParams {
    CapBmParams::new(
        Array2::zeros((1, 1)),
        Array2::zeros((1, 1)),
        Array2::zeros((1, 1)),
        array![eps],
    )
    .unwrap()
}

fn pair_model() -> CapBmParams {
    CapBmParams::new(
        array![[0.0, 1.5], [1.5, 0.0]],
        array![[0.0, 0.8], [TAU - 0.8, 0.0]],
        array![[0.0, 0.4], [0.4, 0.0]],
        array![0.0, -0.3],
    )
    .unwrap()
}

// -- single-site updates ------------------------------------------------------

#[test]
fn saturated_bias_pins_the_amplitude() {
    for (eps, want_on) in [(-30.0, true), (30.0, false)] {
        let p = single_unit(eps);
        let mut chain = ChainState::new(PhasorState::all_off(1), RngHandle::new(5));
        let mut on_count = 0u32;
        for _ in 0..10_000 {
            gibbs_update_unit(&p, &mut chain, 0, AmplitudeMode::Stochastic).unwrap();
            on_count += chain.state.amp(0) as u32;
        }
        let freq = f64::from(on_count) / 10_000.0;
        if want_on {
            assert!(freq > 0.999, "freq = {freq}");
        } else {
            assert!(freq < 0.001, "freq = {freq}");
        }
    }
}

#[test]
fn isolated_unit_matches_sigmoid_frequency() {
    let eps = 0.7;
    let p = single_unit(eps);
    let mut chain = ChainState::new(PhasorState::all_off(1), RngHandle::new(7));
    let n = 100_000;
    let mut on_count = 0u64;
    for _ in 0..n {
        gibbs_sweep(&p, &mut chain, SweepOrder::Fixed, AmplitudeMode::Stochastic).unwrap();
        on_count += chain.state.amp(0) as u64;
    }
    // Updates are iid draws from sigmoid(-eps); 4-sigma band.
    let expect = 1.0 / (1.0 + eps.exp());
    let sd = (expect * (1.0 - expect) / n as f64).sqrt();
    assert!((on_count as f64 / n as f64 - expect).abs() < 4.0 * sd);
    assert_eq!(chain.sweep_count, n);
}

#[test]
fn update_touches_only_the_requested_unit() {
    let p = pair_model();
    let mut chain = ChainState::new(
        PhasorState::new(vec![true, true], vec![Angle::new(1.0), Angle::new(2.0)]).unwrap(),
        RngHandle::new(9),
    );
    gibbs_update_unit(&p, &mut chain, 1, AmplitudeMode::Stochastic).unwrap();
    assert!(chain.state.amp(0));
    assert_abs_diff_eq!(chain.state.phase(0).radians(), 1.0, epsilon = 0.0);
}

#[test]
fn inactive_draw_retains_previous_phase() {
    let p = single_unit(30.0); // unit strongly prefers off
    let mut chain = ChainState::new(
        PhasorState::new(vec![true], vec![Angle::new(2.5)]).unwrap(),
        RngHandle::new(11),
    );
    gibbs_update_unit(&p, &mut chain, 0, AmplitudeMode::Stochastic).unwrap();
    assert!(!chain.state.amp(0));
    assert_abs_diff_eq!(chain.state.phase(0).radians(), 2.5, epsilon = 0.0);
}

#[test]
fn clamped_mode_forces_every_amplitude_on() {
    // Bias +30 would otherwise turn the unit off with near certainty.
    let p = single_unit(30.0);
    let mut chain = ChainState::new(PhasorState::all_off(1), RngHandle::new(13));
    run_chain(&p, &mut chain, 50, SweepOrder::Fixed, AmplitudeMode::ClampedOn).unwrap();
    assert!(chain.state.amp(0));
    assert_eq!(chain.sweep_count, 50);
}

#[test]
fn frozen_neighbor_complex_mean_matches_unit_rate() {
    // Unit 0 held fixed; repeated updates of unit 1 are iid draws from its
    // conditional, so the empirical complex mean must match unit_rate.
    let p = pair_model();
    let state = PhasorState::new(vec![true, false], vec![Angle::new(1.0), Angle::ZERO]).unwrap();
    let sums = input_sums(&p, &state, 1).unwrap();
    let (expect_c, expect_a) = unit_rate(&sums, p.eps()[1]).unwrap();

    let mut chain = ChainState::new(state, RngHandle::new(17));
    let n = 100_000;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut on = 0u64;
    for _ in 0..n {
        gibbs_update_unit(&p, &mut chain, 1, AmplitudeMode::Stochastic).unwrap();
        acc += chain.state.value(1);
        on += chain.state.amp(1) as u64;
    }
    let mean = acc / n as f64;
    let band = 4.0 / (n as f64).sqrt();
    assert!((mean - expect_c).norm() < band, "mean {mean}, expected {expect_c}");
    assert!((on as f64 / n as f64 - expect_a).abs() < band);
}

#[test]
fn sweep_orders_agree_on_the_stationary_marginal() {
    let p = pair_model();
    let mut freqs = Vec::new();
    for order in [SweepOrder::Fixed, SweepOrder::RandomPermutation] {
        let mut chain = ChainState::new(PhasorState::all_off(2), RngHandle::new(23));
        run_chain(&p, &mut chain, 100, SweepOrder::Fixed, AmplitudeMode::Stochastic).unwrap();
        let n = 30_000;
        let mut on = 0u64;
        for _ in 0..n {
            gibbs_sweep(&p, &mut chain, order, AmplitudeMode::Stochastic).unwrap();
            on += chain.state.amp(0) as u64;
        }
        freqs.push(on as f64 / n as f64);
    }
    // Autocorrelation-inflated tolerance; both chains target the same law.
    assert!((freqs[0] - freqs[1]).abs() < 0.03, "freqs = {freqs:?}");
}

#[test]
fn chains_are_seed_deterministic() {
    let p = pair_model();
    let mut runs = Vec::new();
    for _ in 0..2 {
        let mut chain = ChainState::new(PhasorState::all_off(2), RngHandle::new(31));
        run_chain(&p, &mut chain, 100, SweepOrder::RandomPermutation, AmplitudeMode::Stochastic)
            .unwrap();
        runs.push(chain.state);
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn update_rejects_out_of_range_index() {
    let p = single_unit(0.0);
    let mut chain = ChainState::new(PhasorState::all_off(1), RngHandle::new(1));
    assert!(gibbs_update_unit(&p, &mut chain, 1, AmplitudeMode::Stochastic).is_err());
}

// -- rates ---------------------------------------------------------------------

#[test]
fn zero_concentration_rate_has_no_complex_part() {
    let sums = InputSums { a: 0.0, alpha: Angle::ZERO, mu: 0.5 };
    let (c, a) = unit_rate(&sums, 0.0).unwrap();
    assert_eq!(c, Complex64::new(0.0, 0.0));
    assert!(a > 0.5);
}

#[test]
fn rate_modulus_anchor_at_concentration_two() {
    // P(on) = 0.69508 and mean resultant 0.69777 multiply to 0.48506.
    let sums = InputSums { a: 2.0, alpha: Angle::new(1.1), mu: 0.0 };
    let (c, amp) = unit_rate(&sums, 0.0).unwrap();
    assert_abs_diff_eq!(c.norm(), 0.48506, epsilon = 1e-4);
    assert_abs_diff_eq!(amp, 0.69508, epsilon = 1e-5);
    assert_abs_diff_eq!(c.arg(), 1.1, epsilon = 1e-12);
}

#[test]
fn saturated_rate_approaches_unit_phasor() {
    let sums = InputSums { a: 1e4, alpha: Angle::new(0.3), mu: 50.0 };
    let (c, amp) = unit_rate(&sums, 0.0).unwrap();
    assert!((c - Complex64::from_polar(1.0, 0.3)).norm() < 1e-3);
    assert!(amp > 0.999);
}

proptest! {
    #[test]
    fn rate_bound_holds(a in 0.0f64..50.0, mu in -5.0f64..5.0, eps in -5.0f64..5.0,
                        alpha in 0.0f64..TAU) {
        let sums = InputSums { a, alpha: Angle::new(alpha), mu };
        let (c, amp) = unit_rate(&sums, eps).unwrap();
        prop_assert!(c.norm() <= amp + 1e-12);
        prop_assert!((0.0..=1.0).contains(&amp));
    }
}

// -- restricted-machine layer sampling -------------------------------------------

fn free_rbm(nv: usize, nh: usize) -> CapRbmParams {
    CapRbmParams::new(
        Array2::zeros((nv, nh)),
        Array2::zeros((nv, nh)),
        Array1::zeros(nv),
        Array1::zeros(nh),
    )
    .unwrap()
}

#[test]
fn uncoupled_layer_sampling_is_fair_and_uniform() {
    let p = free_rbm(2, 3);
    let given = PhasorState::all_off(2);
    let mut rng = RngHandle::new(37);
    let n = 30_000;
    let mut on = [0u64; 3];
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for _ in 0..n {
        let h = rbm_sample_layer(&p, &given, LayerDir::VisibleToHidden, AmplitudeMode::Stochastic, &mut rng)
            .unwrap();
        for k in 0..3 {
            on[k] += h.amp(k) as u64;
            acc[k] += h.value(k);
        }
    }
    for k in 0..3 {
        let freq = on[k] as f64 / n as f64;
        assert!((freq - 0.5).abs() < 4.0 * (0.25f64 / n as f64).sqrt(), "freq {freq}");
        // Uniform phases average out.
        assert!((acc[k] / n as f64).norm() < 4.0 / (n as f64).sqrt());
    }
}

#[test]
fn single_pair_hidden_phase_follows_von_mises() {
    // W = kappa (real) and a visible clamped at phase 0 make the hidden
    // phase von Mises(0, kappa); compare the empirical complex mean.
    let kappa = 1.7;
    let p = CapRbmParams::new(
        Array2::from_elem((1, 1), Complex64::new(kappa, 0.0)),
        Array2::zeros((1, 1)),
        Array1::zeros(1),
        // Strong negative bias keeps the hidden unit on essentially always,
        // isolating the phase law.
        array![-30.0],
    )
    .unwrap();
    let v = PhasorState::new(vec![true], vec![Angle::ZERO]).unwrap();
    let mut rng = RngHandle::new(41);
    let n = 100_000;
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        let h = rbm_sample_layer(&p, &v, LayerDir::VisibleToHidden, AmplitudeMode::Stochastic, &mut rng)
            .unwrap();
        assert!(h.amp(0));
        acc += h.value(0);
    }
    let mean = acc / n as f64;
    let expect = crate::math::bessel_ratio(kappa).unwrap();
    assert!((mean - Complex64::new(expect, 0.0)).norm() < 4.0 / (n as f64).sqrt());
}

#[test]
fn layer_rate_matches_empirical_layer_sampling() {
    let mut rng = RngHandle::new(43);
    let p = CapRbmParams::random(3, 2, &ParamScales::default(), &mut rng);
    let v = PhasorState::random(3, &mut rng);
    let rate = rbm_layer_rate(&p, &v.to_complex(), LayerDir::VisibleToHidden).unwrap();

    let n = 100_000;
    let mut acc = [Complex64::new(0.0, 0.0); 2];
    let mut on = [0u64; 2];
    for _ in 0..n {
        let h = rbm_sample_layer(&p, &v, LayerDir::VisibleToHidden, AmplitudeMode::Stochastic, &mut rng)
            .unwrap();
        for k in 0..2 {
            acc[k] += h.value(k);
            on[k] += h.amp(k) as u64;
        }
    }
    let band = 4.0 / (n as f64).sqrt();
    for k in 0..2 {
        assert!((acc[k] / n as f64 - rate.complex_mean[k]).norm() < band);
        assert!((on[k] as f64 / n as f64 - rate.amp_mean[k]).abs() < band);
        assert!(rate.complex_mean[k].norm() <= rate.amp_mean[k] + 1e-12);
    }
}

#[test]
fn reconstruct_zero_steps_returns_the_input() {
    let mut rng = RngHandle::new(47);
    let p = CapRbmParams::random(4, 3, &ParamScales::default(), &mut rng);
    let v = PhasorState::random(4, &mut rng);
    let rate = rbm_reconstruct(&p, &v, 0, &mut rng).unwrap();
    for j in 0..4 {
        assert_eq!(rate.complex_mean[j], v.value(j));
        assert_eq!(rate.amp_mean[j], if v.amp(j) { 1.0 } else { 0.0 });
    }
}

#[test]
fn reconstruct_is_seed_deterministic_and_bounded() {
    let mut setup = RngHandle::new(53);
    let p = CapRbmParams::random(5, 4, &ParamScales::default(), &mut setup);
    let v = PhasorState::random(5, &mut setup);
    let mut out = Vec::new();
    for _ in 0..2 {
        let mut rng = RngHandle::new(59);
        let rate = rbm_reconstruct(&p, &v, 7, &mut rng).unwrap();
        for j in 0..5 {
            assert!(rate.complex_mean[j].norm() <= rate.amp_mean[j] + 1e-12);
            assert!(rate.amp_mean[j] <= 1.0);
        }
        out.push(rate);
    }
    for j in 0..5 {
        assert_eq!(out[0].complex_mean[j], out[1].complex_mean[j]);
        assert_eq!(out[0].amp_mean[j], out[1].amp_mean[j]);
    }
}

#[test]
fn reconstruct_rejects_mismatched_visible_length() {
    let mut rng = RngHandle::new(61);
    let p = CapRbmParams::random(4, 3, &ParamScales::default(), &mut rng);
    let v = PhasorState::all_off(3);
    assert!(rbm_reconstruct(&p, &v, 1, &mut rng).is_err());
}

#[test]
fn clamped_mode_applies_to_layer_sampling() {
    let p = CapRbmParams::new(
        Array2::zeros((2, 2)),
        Array2::zeros((2, 2)),
        Array1::zeros(2),
        array![30.0, 30.0], // hidden strongly prefers off
    )
    .unwrap();
    let v = PhasorState::all_off(2);
    let mut rng = RngHandle::new(67);
    let h = rbm_sample_layer(&p, &v, LayerDir::VisibleToHidden, AmplitudeMode::ClampedOn, &mut rng)
        .unwrap();
    assert!(h.amp(0) && h.amp(1));
}

#[test]
fn amp_prob_gain_term_shows_up_in_sampling() {
    // A pure phase input (a = 2, mu = 0, eps = 0) activates with probability
    // I0(2)/(1 + I0(2)); check the Monte Carlo frequency.
    let p = CapRbmParams::new(
        Array2::from_elem((1, 1), Complex64::new(2.0, 0.0)),
        Array2::zeros((1, 1)),
        Array1::zeros(1),
        Array1::zeros(1),
    )
    .unwrap();
    let v = PhasorState::new(vec![true], vec![Angle::ZERO]).unwrap();
    let mut rng = RngHandle::new(71);
    let n = 100_000;
    let mut on = 0u64;
    for _ in 0..n {
        let h = rbm_sample_layer(&p, &v, LayerDir::VisibleToHidden, AmplitudeMode::Stochastic, &mut rng)
            .unwrap();
        on += h.amp(0) as u64;
    }
    let expect = 1.0 / (1.0 + (-log_bessel_i0(2.0).unwrap()).exp());
    assert_abs_diff_eq!(expect, 0.69508, epsilon = 1e-5);
    let sd = (expect * (1.0 - expect) / n as f64).sqrt();
    assert!((on as f64 / n as f64 - expect).abs() < 4.0 * sd);
}
