//! Optimal tradeoff between the information gained about an unknown coherent
//! state and the disturbance inflicted on it.
//!
//! * [`gaussian`]: Gaussian states, symplectic optics, heterodyne sampling and
//!   coherent-state fidelity in shot-noise units.
//! * [`schemes`]: noise budgets, the fidelity frontier and the feed-forward
//!   and teleportation schemes that reach it.
//! * [`montecarlo`]: seeded shot-level simulation of the feed-forward scheme.
//! * [`channels`]: lossy, erasure and additive-noise channel protocols.
//! * [`optimize`]: grid-bracketed golden-section maximization.

pub mod channels;
pub mod error;
pub mod gaussian;
pub mod montecarlo;
pub mod optimize;
pub mod schemes;

pub use channels::{
    additive_noise_decision, erasure_fidelity, erasure_optimize, lossy_amplifier_fidelity, lossy_hybrid_noise,
    lossy_hybrid_optimize, AdditiveNoiseSpec, ChannelSpec, ErasureChannelSpec, LossyChannelSpec, NoiseDecision,
    OptimizationResult, Strategy,
};
pub use error::{Error, Result};
pub use gaussian::{fidelity_vs_coherent, GaussianState, MeasurementOutcome, Quadrature, SymplecticTransform};
pub use montecarlo::{run_feedforward, run_scheme, summarize, EmpiricalSummary, Estimate, ShotBatch, Workers};
pub use schemes::{
    degraded_feedforward_point, feedforward_noises, feedforward_point, fidelities_from_budget, teleportation_point,
    tradeoff_bound, unity_gain_noise_bound, FeedForwardScheme, NoiseBudget, SchemeParameter, TeleportationScheme,
    TradeoffPoint,
};
