//! Boltzmann machines over complex-valued units.
//!
//! Each unit carries a binary amplitude and a continuous phase, so a state is
//! a vector of phasors `z_j = |z_j| e^{i theta_j}` with `|z_j|` in {0, 1}.
//! Phase interactions are mediated by a Hermitian complex coupling matrix,
//! amplitude interactions by a symmetric real one. Conditionals factor into a
//! Bernoulli amplitude draw and a von Mises phase draw, which makes Gibbs
//! sampling and contrastive-divergence learning tractable.
//!
//! Module map:
//!
//! - [`math`]: angles, seedable RNG, log-domain Bessel `I0`/`I1`, von Mises
//!   sampling — the numeric kernel everything else builds on.
//! - [`model`]: parameter containers, energies, per-unit input sums and
//!   conditionals, checkpoint serialization.
//! - [`sampler`]: single-site Gibbs updates for the full machine and block
//!   alternation for the restricted (bipartite) variant.
//! - [`learning`]: sufficient statistics, polar-form gradients, CD-1 and
//!   persistent-chain training.
//! - [`oracle`]: brute-force discretized evaluators (exact enumeration,
//!   marginals, likelihoods) sharing no computation with the model path, plus
//!   the executable self-check suite.
//! - [`data`]: synthetic bars imagery, binary dataset container, band-wise
//!   amplitude normalization, phase-as-hue rendering.

pub mod data;
pub mod error;
pub mod learning;
pub mod math;
pub mod model;
pub mod oracle;
pub mod sampler;

pub use data::{BandPartition, BarsConfig, ComplexDataset};
pub use error::{Error, Result};
pub use math::{Angle, RngHandle};
pub use model::{CapBmParams, CapRbmParams, InputSums, LayerDir, PhasorState};
pub use sampler::{AmplitudeMode, ChainState, Rate, SweepOrder};
pub use learning::{Algorithm, GradientStats, TrainConfig};
