//! Gaussian phase-space algebra in shot-noise units.
//!
//! Quadratures obey `[x, p] = 2i`, so a vacuum quadrature has unit variance
//! and every coherent state has identity covariance. Phase-space vectors are
//! ordered `(x1, p1, x2, p2, ...)`.
//!
//! States are immutable values: every operation returns a new state. Random
//! sampling takes an explicit generator so callers control the stream.

mod fidelity;
mod measurement;
mod state;
mod symplectic;

pub use fidelity::{coherent_overlap, fidelity_vs_coherent};
pub use measurement::{
    heterodyne_condition, heterodyne_distribution, heterodyne_sample, homodyne_condition, HeterodyneConditioner,
    MeasurementOutcome,
};
pub use state::GaussianState;
pub use symplectic::SymplecticTransform;

use nalgebra::DMatrix;

/// Variance of a vacuum quadrature.
pub const VACUUM_VARIANCE: f64 = 1.0;

/// Tolerance on `cov + iΩ ⪰ 0` used when a state is constructed.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

/// Tolerance on `‖SΩSᵀ − Ω‖_F` for a valid symplectic matrix.
pub const SYMPLECTIC_TOL: f64 = 1e-12;

/// One of the two canonical quadratures of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    /// Offset of this quadrature within its mode's 2-vector.
    pub fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }

    /// Index of this quadrature of `mode` in a phase-space vector.
    pub fn index(self, mode: usize) -> usize {
        2 * mode + self.offset()
    }
}

/// Symplectic form for `n_modes` modes: block diagonal with `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}
