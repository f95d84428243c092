use super::*;
use crate::error::Error;
use approx::assert_abs_diff_eq;
use ndarray::array;
use proptest::prelude::*;
use tempfile::tempdir;

fn rng(seed: u64) -> RngHandle {
    RngHandle::new(seed)
}

fn random_state(n: usize, rng: &mut RngHandle) -> PhasorState {
    PhasorState::random(n, rng)
}

// -- states -----------------------------------------------------------------

#[test]
fn state_roundtrips_through_complex() {
    let mut r = rng(11);
    for _ in 0..20 {
        let s = random_state(7, &mut r);
        let z = s.to_complex();
        let back = PhasorState::from_complex(&z, 1e-12).unwrap();
        assert_eq!(s.n(), back.n());
        for j in 0..s.n() {
            assert_eq!(s.amp(j), back.amp(j));
            if s.amp(j) {
                assert!(s.phase(j).signed_diff(back.phase(j)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn from_complex_rejects_intermediate_moduli() {
    let z = [Complex64::new(0.5, 0.0)];
    assert!(matches!(PhasorState::from_complex(&z, 1e-6), Err(Error::Domain(_))));
}

#[test]
fn state_value_is_unit_phasor_or_zero() {
    let mut s = PhasorState::all_off(3);
    assert_eq!(s.value(1), Complex64::new(0.0, 0.0));
    s.set_amp(1, true);
    s.set_phase(1, Angle::new(2.0));
    let z = s.value(1);
    assert_abs_diff_eq!(z.norm(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(z.arg(), 2.0, epsilon = 1e-12);
}

#[test]
fn mismatched_state_lengths_rejected() {
    assert!(PhasorState::new(vec![true], vec![Angle::ZERO, Angle::ZERO]).is_err());
}

// -- parameter validation ----------------------------------------------------

fn tiny_params() -> CapBmParams {
    CapBmParams::new(
        array![[0.0, 0.7], [0.7, 0.0]],
        array![[0.0, 0.3], [-0.3, 0.0]],
        array![[0.0, 0.4], [0.4, 0.0]],
        array![0.1, -0.2],
    )
    .unwrap()
}

#[test]
fn construction_rejects_invalid_matrices() {
    let b = array![[0.0, 0.7], [0.7, 0.0]];
    let t = array![[0.0, 0.3], [-0.3, 0.0]];
    let j = array![[0.0, 0.4], [0.4, 0.0]];
    let e = array![0.1, -0.2];

    // negative modulus
    let mut bad = b.clone();
    bad[(0, 1)] = -0.1;
    bad[(1, 0)] = -0.1;
    assert!(CapBmParams::new(bad, t.clone(), j.clone(), e.clone()).is_err());

    // asymmetric moduli
    let mut bad = b.clone();
    bad[(0, 1)] = 0.8;
    assert!(CapBmParams::new(bad, t.clone(), j.clone(), e.clone()).is_err());

    // non-antisymmetric phases
    let mut bad = t.clone();
    bad[(1, 0)] = 0.3;
    assert!(CapBmParams::new(b.clone(), bad, j.clone(), e.clone()).is_err());

    // self-coupling
    let mut bad = j.clone();
    bad[(1, 1)] = 0.5;
    assert!(CapBmParams::new(b.clone(), t.clone(), bad, e.clone()).is_err());

    // non-finite entries
    let mut bad = b.clone();
    bad[(0, 1)] = f64::NAN;
    bad[(1, 0)] = f64::NAN;
    assert!(CapBmParams::new(bad, t.clone(), j.clone(), e.clone()).is_err());

    // shape mismatch
    assert!(CapBmParams::new(b, t, j, array![0.1, 0.2, 0.3]).is_err());
}

#[test]
fn phase_antisymmetry_accepted_modulo_full_turns() {
    // theta_10 = 2*pi - 0.3 is the wrapped form of -0.3.
    let p = CapBmParams::new(
        array![[0.0, 0.7], [0.7, 0.0]],
        array![[0.0, 0.3], [TAU - 0.3, 0.0]],
        Array2::zeros((2, 2)),
        array![0.0, 0.0],
    )
    .unwrap();
    assert_abs_diff_eq!(p.theta()[(1, 0)], TAU - 0.3, epsilon = 1e-12);
}

#[test]
fn rbm_construction_rejects_bad_shapes_and_values() {
    let w = Array2::from_elem((2, 3), Complex64::new(0.1, 0.0));
    let j = Array2::zeros((2, 3));
    assert!(CapRbmParams::new(w.clone(), Array2::zeros((3, 2)), Array1::zeros(2), Array1::zeros(3)).is_err());
    assert!(CapRbmParams::new(w.clone(), j.clone(), Array1::zeros(3), Array1::zeros(3)).is_err());
    let mut bad = w.clone();
    bad[(0, 0)] = Complex64::new(f64::INFINITY, 0.0);
    assert!(CapRbmParams::new(bad, j.clone(), Array1::zeros(2), Array1::zeros(3)).is_err());
    assert!(CapRbmParams::new(w, j, Array1::zeros(2), Array1::zeros(3)).is_ok());
}

// -- energies ----------------------------------------------------------------

#[test]
fn two_unit_energy_matches_hand_computation() {
    let p = tiny_params();
    let both = PhasorState::new(vec![true, true], vec![Angle::new(0.5), Angle::new(1.2)]).unwrap();
    // eps terms + pair: 0.1 - 0.2 - 0.4 - 0.7 cos(0.3 + 1.2 - 0.5)
    let expected = 0.1 - 0.2 - 0.4 - 0.7 * (1.0f64).cos();
    assert_abs_diff_eq!(energy_capbm(&p, &both).unwrap(), expected, epsilon = 1e-14);

    let only0 = PhasorState::new(vec![true, false], vec![Angle::new(0.5), Angle::ZERO]).unwrap();
    assert_abs_diff_eq!(energy_capbm(&p, &only0).unwrap(), 0.1, epsilon = 1e-14);
    let off = PhasorState::all_off(2);
    assert_abs_diff_eq!(energy_capbm(&p, &off).unwrap(), 0.0, epsilon = 1e-14);
}

#[test]
fn energy_matches_complex_quadratic_form() {
    let mut r = rng(21);
    for _ in 0..25 {
        let p = CapBmParams::random(6, &ParamScales::default(), &mut r);
        let s = random_state(6, &mut r);
        let z = s.to_complex();
        let mut e = 0.0;
        for j in 0..6 {
            e += p.eps()[j] * z[j].norm();
            for k in 0..6 {
                e -= 0.5 * (z[j].conj() * p.w(j, k) * z[k]).re;
                e -= 0.5 * z[j].norm() * p.jamp()[(j, k)] * z[k].norm();
            }
        }
        assert_abs_diff_eq!(energy_capbm(&p, &s).unwrap(), e, epsilon = 1e-10);
    }
}

#[test]
fn energy_invariant_under_global_phase_shift() {
    let mut r = rng(31);
    for _ in 0..10 {
        let p = CapBmParams::random(5, &ParamScales::default(), &mut r);
        let s = random_state(5, &mut r);
        let shift = r.uniform_in(0.0, TAU);
        let mut shifted = s.clone();
        for j in 0..5 {
            shifted.set_phase(j, s.phase(j) + Angle::new(shift));
        }
        assert_abs_diff_eq!(
            energy_capbm(&p, &s).unwrap(),
            energy_capbm(&p, &shifted).unwrap(),
            epsilon = 1e-10
        );
    }
}

#[test]
fn restricted_energy_matches_embedded_full_energy() {
    let mut r = rng(41);
    for _ in 0..25 {
        let p = CapRbmParams::random(4, 3, &ParamScales::default(), &mut r);
        let v = random_state(4, &mut r);
        let h = random_state(3, &mut r);
        let joint = PhasorState::new(
            (0..4).map(|j| v.amp(j)).chain((0..3).map(|k| h.amp(k))).collect(),
            (0..4).map(|j| v.phase(j)).chain((0..3).map(|k| h.phase(k))).collect(),
        )
        .unwrap();
        assert_abs_diff_eq!(
            energy_caprbm(&p, &v, &h).unwrap(),
            energy_capbm(&p.embed(), &joint).unwrap(),
            epsilon = 1e-10
        );
    }
}

#[test]
fn energy_rejects_mismatched_state() {
    let p = tiny_params();
    assert!(energy_capbm(&p, &PhasorState::all_off(3)).is_err());
}

// -- input sums and conditionals ----------------------------------------------

#[test]
fn input_sums_match_energy_differences() {
    // Turning unit j on at phase phi changes the energy by
    // -a_j cos(phi - alpha_j) - mu_j + eps_j.
    let mut r = rng(51);
    for _ in 0..30 {
        let p = CapBmParams::random(6, &ParamScales::default(), &mut r);
        let s = random_state(6, &mut r);
        let j = r.index(6);
        let sums = input_sums(&p, &s, j).unwrap();

        let mut on = s.clone();
        on.set_amp(j, true);
        let phi = Angle::new(r.uniform_in(0.0, TAU));
        on.set_phase(j, phi);
        let mut off = s.clone();
        off.set_amp(j, false);

        let de = energy_capbm(&p, &on).unwrap() - energy_capbm(&p, &off).unwrap();
        let predicted = -sums.a * phi.signed_diff(sums.alpha).cos() - sums.mu + p.eps()[j];
        assert_abs_diff_eq!(de, predicted, epsilon = 1e-9);
    }
}

#[test]
fn zero_input_sums_have_conventional_phase() {
    let s = InputSums::from_complex(Complex64::new(0.0, 0.0), 0.3);
    assert_eq!(s.a, 0.0);
    assert_eq!(s.alpha, Angle::ZERO);
    let (mean, kappa) = phase_conditional(&s);
    assert_eq!(mean, Angle::ZERO);
    assert_eq!(kappa, 0.0);
}

#[test]
fn input_sums_index_out_of_range_is_an_error() {
    let p = tiny_params();
    let s = PhasorState::all_off(2);
    assert!(input_sums(&p, &s, 2).is_err());
}

#[test]
fn isolated_unit_activation_is_plain_sigmoid() {
    let sums = InputSums { a: 0.0, alpha: Angle::ZERO, mu: 0.0 };
    assert_abs_diff_eq!(amp_prob(&sums, 0.0).unwrap(), 0.5, epsilon = 1e-15);
    // eps = ln 3 gives odds 1:3.
    assert_abs_diff_eq!(amp_prob(&sums, 3.0f64.ln()).unwrap(), 0.25, epsilon = 1e-12);
}

#[test]
fn phase_input_raises_activation_probability() {
    // With concentration 2 the phase integral contributes ln I0(2), so
    // P(on) = I0(2) / (1 + I0(2)) = 0.69508.
    let sums = InputSums { a: 2.0, alpha: Angle::ZERO, mu: 0.0 };
    assert_abs_diff_eq!(amp_prob(&sums, 0.0).unwrap(), 0.69508, epsilon = 1e-5);
}

#[test]
fn amp_prob_rejects_bad_inputs() {
    let sums = InputSums { a: -1.0, alpha: Angle::ZERO, mu: 0.0 };
    assert!(amp_prob(&sums, 0.0).is_err());
    let sums = InputSums { a: 1.0, alpha: Angle::ZERO, mu: f64::NAN };
    assert!(amp_prob(&sums, 0.0).is_err());
}

// -- restricted-machine layer sums ---------------------------------------------

#[test]
fn layer_sums_agree_with_embedded_per_unit_sums() {
    let mut r = rng(61);
    for _ in 0..20 {
        let p = CapRbmParams::random(4, 3, &ParamScales::default(), &mut r);
        let full = p.embed();
        let v = random_state(4, &mut r);
        let h = random_state(3, &mut r);
        let joint = PhasorState::new(
            (0..4).map(|j| v.amp(j)).chain((0..3).map(|k| h.amp(k))).collect(),
            (0..4).map(|j| v.phase(j)).chain((0..3).map(|k| h.phase(k))).collect(),
        )
        .unwrap();

        let to_hidden = rbm_layer_sums(&p, &v.to_complex(), LayerDir::VisibleToHidden).unwrap();
        for (k, got) in to_hidden.iter().enumerate() {
            let expect = input_sums(&full, &joint, 4 + k).unwrap();
            assert_abs_diff_eq!(got.a, expect.a, epsilon = 1e-10);
            assert_abs_diff_eq!(got.mu, expect.mu, epsilon = 1e-10);
            if expect.a > 1e-12 {
                assert!(got.alpha.signed_diff(expect.alpha).abs() < 1e-9);
            }
        }

        let to_visible = rbm_layer_sums(&p, &h.to_complex(), LayerDir::HiddenToVisible).unwrap();
        for (j, got) in to_visible.iter().enumerate() {
            let expect = input_sums(&full, &joint, j).unwrap();
            assert_abs_diff_eq!(got.a, expect.a, epsilon = 1e-10);
            assert_abs_diff_eq!(got.mu, expect.mu, epsilon = 1e-10);
            if expect.a > 1e-12 {
                assert!(got.alpha.signed_diff(expect.alpha).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn layer_sums_use_conjugate_coupling_toward_hidden() {
    // One visible at phase phi drives a hidden unit toward phi - arg(w);
    // one hidden at phase psi drives a visible unit toward arg(w) + psi.
    let w = Array2::from_elem((1, 1), Complex64::from_polar(0.9, 0.7));
    let p = CapRbmParams::new(w, Array2::zeros((1, 1)), Array1::zeros(1), Array1::zeros(1)).unwrap();

    let v = [Complex64::from_polar(1.0, 1.5)];
    let s = rbm_layer_sums(&p, &v, LayerDir::VisibleToHidden).unwrap();
    assert_abs_diff_eq!(s[0].a, 0.9, epsilon = 1e-12);
    assert_abs_diff_eq!(s[0].alpha.radians(), 1.5 - 0.7, epsilon = 1e-12);

    let h = [Complex64::from_polar(1.0, 0.4)];
    let s = rbm_layer_sums(&p, &h, LayerDir::HiddenToVisible).unwrap();
    assert_abs_diff_eq!(s[0].a, 0.9, epsilon = 1e-12);
    assert_abs_diff_eq!(s[0].alpha.radians(), 0.7 + 0.4, epsilon = 1e-12);
}

#[test]
fn layer_sums_reject_wrong_source_length() {
    let p = CapRbmParams::random(4, 3, &ParamScales::default(), &mut rng(1));
    let bad = vec![Complex64::new(0.0, 0.0); 3];
    assert!(rbm_layer_sums(&p, &bad, LayerDir::VisibleToHidden).is_err());
}

// -- visible free energy --------------------------------------------------------

#[test]
fn free_energy_of_uncoupled_machine_is_closed_form() {
    let nv = 3;
    let nh = 2;
    let p = CapRbmParams::new(
        Array2::zeros((nv, nh)),
        Array2::zeros((nv, nh)),
        array![0.2, -0.1, 0.4],
        array![0.3, -0.5],
    )
    .unwrap();
    let v = [
        Complex64::from_polar(1.0, 0.3),
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(1.0, 2.0),
    ];
    // Each hidden integrates to ln(2 pi) + softplus(-bias); I0(0) = 1.
    let expected = (0.2 + 0.4)
        - 2.0 * TAU.ln()
        - ((-0.3f64).exp().ln_1p() + (0.5f64).exp().ln_1p());
    assert_abs_diff_eq!(visible_free_energy(&p, &v).unwrap(), expected, epsilon = 1e-12);
}

#[test]
fn free_energy_differences_track_marginal_weight_ratios() {
    // For a single visible/hidden pair the marginal weight of v is
    // 2 pi e^{-a |v|} (1 + I0(|w||v|) e^{J |v| - b}); check F = -ln of that.
    let w = Array2::from_elem((1, 1), Complex64::from_polar(1.3, 0.4));
    let jm = Array2::from_elem((1, 1), 0.6);
    let p = CapRbmParams::new(w, jm, array![0.25], array![-0.15]).unwrap();

    for &m in &[0.0, 1.0] {
        let v = [Complex64::from_polar(m, 1.0)];
        let weight = TAU
            * (-0.25 * m)
            .exp()
            * (1.0 + crate::math::log_bessel_i0(1.3 * m).unwrap().exp() * (0.6 * m + 0.15).exp());
        assert_abs_diff_eq!(visible_free_energy(&p, &v).unwrap(), -weight.ln(), epsilon = 1e-10);
    }
}

// -- checkpoint io ----------------------------------------------------------------

fn bits_equal(a: &Array2<f64>, b: &Array2<f64>) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
}

#[test]
fn full_checkpoint_roundtrips_bit_exactly() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("model.capm");
    let p = CapBmParams::random(5, &ParamScales::default(), &mut rng(71));
    save_checkpoint(&path, &Checkpoint::Full(p.clone())).unwrap();
    let q = load_checkpoint(&path).unwrap().into_full().unwrap();
    assert!(bits_equal(p.b(), q.b()));
    assert!(bits_equal(p.theta(), q.theta()));
    assert!(bits_equal(p.jamp(), q.jamp()));
    assert!(p.eps().iter().zip(q.eps().iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn restricted_checkpoint_roundtrips_bit_exactly() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("model.capm");
    let p = CapRbmParams::random(4, 6, &ParamScales::default(), &mut rng(81));
    save_checkpoint(&path, &Checkpoint::Restricted(p.clone())).unwrap();
    let q = load_checkpoint(&path).unwrap().into_restricted().unwrap();
    assert!(p
        .w()
        .iter()
        .zip(q.w().iter())
        .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    assert!(bits_equal(p.jamp(), q.jamp()));
}

#[test]
fn corrupt_headers_are_rejected() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("model.capm");
    let p = CapRbmParams::random(3, 2, &ParamScales::default(), &mut rng(91));
    save_checkpoint(&path, &Checkpoint::Restricted(p)).unwrap();
    let good = std::fs::read(&path).unwrap();

    // Flipping any single header byte must be detected: magic, version,
    // kind, or a dimension (which then disagrees with the payload size).
    let header_len = 4 + 4 + 1 + 4 + 4;
    for i in 0..header_len {
        let mut bad = good.clone();
        bad[i] ^= 0x01;
        std::fs::write(&path, &bad).unwrap();
        assert!(load_checkpoint(&path).is_err(), "header byte {i} flip went undetected");
    }

    // Truncation and trailing bytes.
    std::fs::write(&path, &good[..good.len() - 3]).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::Truncated { .. })));
    let mut extra = good.clone();
    extra.push(0);
    std::fs::write(&path, &extra).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::TrailingData { .. })));

    // Specific header errors keep their types.
    let mut bad = good.clone();
    bad[0] = b'X';
    std::fs::write(&path, &bad).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::BadMagic { .. })));
    let mut bad = good.clone();
    bad[4] = 9;
    std::fs::write(&path, &bad).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::UnsupportedVersion { .. })));
    let mut bad = good;
    bad[8] = 7;
    std::fs::write(&path, &bad).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::Domain(_))));
}

#[test]
fn missing_file_reports_io_error() {
    let dir = tempdir().unwrap();
    assert!(matches!(
        load_checkpoint(&dir.path().join("absent.capm")),
        Err(Error::Io(_))
    ));
}

proptest! {
    #[test]
    fn embed_preserves_energy(seed in 0u64..1000) {
        let mut r = rng(seed);
        let p = CapRbmParams::random(3, 4, &ParamScales::default(), &mut r);
        let v = random_state(3, &mut r);
        let h = random_state(4, &mut r);
        let joint = PhasorState::new(
            (0..3).map(|j| v.amp(j)).chain((0..4).map(|k| h.amp(k))).collect(),
            (0..3).map(|j| v.phase(j)).chain((0..4).map(|k| h.phase(k))).collect(),
        ).unwrap();
        let direct = energy_caprbm(&p, &v, &h).unwrap();
        let embedded = energy_capbm(&p.embed(), &joint).unwrap();
        prop_assert!((direct - embedded).abs() < 1e-9);
    }
}
