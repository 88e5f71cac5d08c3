use nalgebra::{Matrix2, Vector2};

use super::GaussianState;
use crate::error::{Error, Result};

/// Overlap `⟨α|ρ|α⟩` between a coherent state of mean `input` and a
/// single-mode Gaussian `output`.
///
/// In shot-noise units this is `2/√det(I + Σ) · exp(−½ δᵀ (I + Σ)⁻¹ δ)` with
/// `δ` the mean mismatch. At matched means and added noise `(n_x, n_p)` it
/// reduces to `2/√((2+n_x)(2+n_p))`.
pub fn fidelity_vs_coherent(input: (f64, f64), output: &GaussianState) -> Result<f64> {
    if output.n_modes() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            got: output.n_modes(),
        });
    }
    let sum = Matrix2::identity() + output.mode_cov(0)?;
    let det = sum.determinant();
    if det <= 0.0 {
        return Err(Error::Contract("degenerate covariance in fidelity".into()));
    }
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::Contract("degenerate covariance in fidelity".into()))?;
    let delta = output.mode_mean(0)? - Vector2::new(input.0, input.1);
    let penalty = (delta.transpose() * inv * delta)[0];
    Ok((2.0 / det.sqrt() * (-0.5 * penalty).exp()).clamp(0.0, 1.0))
}

/// `|⟨α|β⟩|²` for coherent states given by their quadrature means.
pub fn coherent_overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    let d2 = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
    (-d2 / 4.0).exp()
}
