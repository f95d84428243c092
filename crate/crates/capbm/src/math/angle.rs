//! Canonical angle representation.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Neg, Sub};

/// An angle stored canonically in `[0, 2*pi)`.
///
/// Every operation that yields an `Angle` re-wraps, so downstream code can
/// rely on the range invariant without defensive normalization.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps an arbitrary finite value in radians into `[0, 2*pi)`.
    ///
    /// # Panics
    /// Panics on NaN or infinite input; angles come from bounded arithmetic
    /// and a non-finite one is always a programming error upstream.
    pub fn new(radians: f64) -> Angle {
        assert!(
            radians.is_finite(),
            "angle must be finite, got {radians}"
        );
        let mut w = radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        // and passes -0.0 through; both must collapse to canonical 0.0.
        if w >= TAU || w == 0.0 {
            w = 0.0;
        }
        Angle(w)
    }

    /// The canonical value in `[0, 2*pi)`.
    pub fn radians(self) -> f64 {
        self.0
    }

    /// Signed shortest rotation from `other` to `self`, in `(-pi, pi]`.
    pub fn signed_diff(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).rem_euclid(TAU);
        if d > PI {
            d - TAU
        } else {
            d
        }
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle::new(self.0 - rhs.0)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wraps_into_range() {
        assert_eq!(Angle::new(0.0).radians(), 0.0);
        assert_eq!(Angle::new(TAU).radians(), 0.0);
        assert_eq!(Angle::new(-TAU).radians(), 0.0);
        assert!((Angle::new(TAU + 1.0).radians() - 1.0).abs() < 1e-12);
        assert!((Angle::new(-1.0).radians() - (TAU - 1.0)).abs() < 1e-12);
        // A tiny negative input must not round up to an out-of-range TAU.
        let w = Angle::new(-1e-18).radians();
        assert!((0.0..TAU).contains(&w));
        // -0.0 canonicalizes to +0.0.
        assert!(Angle::new(-0.0).radians().is_sign_positive());
    }

    #[test]
    #[should_panic(expected = "finite")]
    fn rejects_nan() {
        let _ = Angle::new(f64::NAN);
    }

    #[test]
    fn signed_diff_is_shortest_rotation() {
        let a = Angle::new(0.1);
        let b = Angle::new(TAU - 0.1);
        assert!((a.signed_diff(b) - 0.2).abs() < 1e-12);
        assert!((b.signed_diff(a) + 0.2).abs() < 1e-12);
        // Antipodal pair maps to +pi, the closed end of (-pi, pi].
        assert!((Angle::new(0.0).signed_diff(Angle::new(PI)) - PI).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn always_in_canonical_range(x in -1e9f64..1e9f64) {
            let w = Angle::new(x).radians();
            prop_assert!((0.0..TAU).contains(&w));
        }

        #[test]
        fn add_sub_round_trip(a in 0.0..TAU, b in 0.0..TAU) {
            let x = Angle::new(a);
            let y = Angle::new(b);
            let back = (x + y) - y;
            prop_assert!(back.signed_diff(x).abs() < 1e-9);
        }
    }
}
