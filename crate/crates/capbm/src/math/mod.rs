//! Numeric kernel: canonical angles, the project RNG, log-domain modified
//! Bessel functions, and exact von Mises sampling.

mod angle;
mod bessel;
mod rng;
mod von_mises;

pub use angle::Angle;
pub use bessel::{bessel_ratio, log_bessel_i0};
pub use rng::RngHandle;
pub use von_mises::sample_von_mises;

/// Numerically stable logistic function, exact in both saturation regimes.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable ln(1 + e^x).
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}
