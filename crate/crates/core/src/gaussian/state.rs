use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};

use super::{symplectic_form, Quadrature, SymplecticTransform, ADMISSIBILITY_TOL, VACUUM_VARIANCE};
use crate::error::{check_closed, Error, Result};

/// N-mode Gaussian state: mean vector and covariance matrix in shot-noise units.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state, symmetrizing `cov` and checking `cov + iΩ ⪰ 0`.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let state = Self::new_unchecked(mean, cov)?;
        state.check_admissible(ADMISSIBILITY_TOL)?;
        Ok(state)
    }

    /// Like [`GaussianState::new`] but skips the uncertainty-principle check.
    /// Dimensions are still validated and `cov` is still symmetrized.
    pub fn new_unchecked(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Dimension { expected: 2, got: dim });
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: cov.nrows().max(cov.ncols()),
            });
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Contract("non-finite moment".into()));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { mean, cov })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        let dim = 2 * n_modes.max(1);
        Self {
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim) * VACUUM_VARIANCE,
        }
    }

    /// Product of coherent states with the given `(x̄, p̄)` means.
    pub fn coherent(amplitudes: &[(f64, f64)]) -> Self {
        if amplitudes.is_empty() {
            return Self::vacuum(1);
        }
        let mean = DVector::from_iterator(2 * amplitudes.len(), amplitudes.iter().flat_map(|&(x, p)| [x, p]));
        let dim = mean.len();
        Self {
            mean,
            cov: DMatrix::identity(dim, dim) * VACUUM_VARIANCE,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.n_modes() {
            Ok(())
        } else {
            Err(Error::Mode {
                mode,
                n_modes: self.n_modes(),
            })
        }
    }

    pub fn mode_mean(&self, mode: usize) -> Result<Vector2<f64>> {
        self.check_mode(mode)?;
        Ok(Vector2::new(self.mean[2 * mode], self.mean[2 * mode + 1]))
    }

    pub fn mode_cov(&self, mode: usize) -> Result<Matrix2<f64>> {
        self.check_mode(mode)?;
        Ok(self.cov.fixed_view::<2, 2>(2 * mode, 2 * mode).into_owned())
    }

    /// Smallest eigenvalue of the Hermitian matrix `cov + iΩ`.
    ///
    /// Evaluated through the real symmetric embedding `[[cov, −Ω], [Ω, cov]]`,
    /// whose spectrum is that of `cov + iΩ` with each eigenvalue doubled.
    pub fn min_admissibility_eigenvalue(&self) -> f64 {
        let dim = self.mean.len();
        let omega = symplectic_form(self.n_modes());
        let mut big = DMatrix::zeros(2 * dim, 2 * dim);
        big.view_mut((0, 0), (dim, dim)).copy_from(&self.cov);
        big.view_mut((dim, dim), (dim, dim)).copy_from(&self.cov);
        big.view_mut((0, dim), (dim, dim)).copy_from(&(-&omega));
        big.view_mut((dim, 0), (dim, dim)).copy_from(&omega);
        SymmetricEigen::new(big).eigenvalues.min()
    }

    pub fn check_admissible(&self, tol: f64) -> Result<()> {
        let min_eigenvalue = self.min_admissibility_eigenvalue();
        if min_eigenvalue >= -tol {
            Ok(())
        } else {
            Err(Error::Inadmissible { min_eigenvalue })
        }
    }

    /// `self ⊗ other`, with `other`'s modes appended.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (a, b) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(a + b);
        mean.rows_mut(0, a).copy_from(&self.mean);
        mean.rows_mut(a, b).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(a + b, a + b);
        cov.view_mut((0, 0), (a, a)).copy_from(&self.cov);
        cov.view_mut((a, a), (b, b)).copy_from(&other.cov);
        GaussianState { mean, cov }
    }

    /// Reduced state of `modes`, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<GaussianState> {
        if modes.is_empty() {
            return Err(Error::Dimension { expected: 1, got: 0 });
        }
        for &m in modes {
            self.check_mode(m)?;
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        Ok(GaussianState {
            mean: self.mean.select_rows(&idx),
            cov: self.cov.select_rows(&idx).select_columns(&idx),
        })
    }

    /// Applies `transform` to `modes` (in the transform's port order).
    pub fn apply(&self, transform: &SymplecticTransform, modes: &[usize]) -> Result<GaussianState> {
        let full = transform.embed(self.n_modes(), modes)?;
        let s = full.matrix();
        Ok(GaussianState {
            mean: s * &self.mean + full.displacement_vector(),
            cov: s * &self.cov * s.transpose(),
        })
    }

    /// Variance of the linear combination `Σ c_i q_i` of phase-space coordinates.
    pub fn quadratic_form(&self, coeffs: &[f64]) -> Result<f64> {
        if coeffs.len() != self.mean.len() {
            return Err(Error::Dimension {
                expected: self.mean.len(),
                got: coeffs.len(),
            });
        }
        let c = DVector::from_column_slice(coeffs);
        Ok((c.transpose() * &self.cov * &c)[0])
    }

    /// Phase-insensitive single-mode map: mean scaled by `scale`, covariance
    /// rows/columns of the mode scaled by `scale`, then `noise·I` added.
    fn mode_channel(&self, mode: usize, scale: f64, noise: f64) -> Result<GaussianState> {
        self.check_mode(mode)?;
        let (i, j) = (2 * mode, 2 * mode + 1);
        let mut mean = self.mean.clone();
        mean[i] *= scale;
        mean[j] *= scale;
        let mut cov = self.cov.clone();
        for k in [i, j] {
            cov.row_mut(k).scale_mut(scale);
            cov.column_mut(k).scale_mut(scale);
        }
        cov[(i, i)] += noise;
        cov[(j, j)] += noise;
        Ok(GaussianState { mean, cov })
    }

    /// Pure loss of transmissivity `eta` on one mode.
    pub fn attenuate(&self, mode: usize, eta: f64) -> Result<GaussianState> {
        let eta = check_closed("eta", eta, 0.0, 1.0, "[0, 1]")?;
        self.mode_channel(mode, eta.sqrt(), (1.0 - eta) * VACUUM_VARIANCE)
    }

    /// Phase-insensitive amplifier of power gain `gain ≥ 1` on one mode.
    pub fn amplify(&self, mode: usize, gain: f64) -> Result<GaussianState> {
        let gain = check_closed("gain", gain, 1.0, f64::INFINITY, "[1, ∞)")?;
        self.mode_channel(mode, gain.sqrt(), (gain - 1.0) * VACUUM_VARIANCE)
    }

    /// Classical additive Gaussian noise of variance `chi` on each quadrature.
    pub fn add_classical_noise(&self, mode: usize, chi: f64) -> Result<GaussianState> {
        let chi = check_closed("chi", chi, 0.0, f64::INFINITY, "[0, ∞)")?;
        self.mode_channel(mode, 1.0, chi)
    }

    pub fn displace(&self, mode: usize, dx: f64, dp: f64) -> Result<GaussianState> {
        self.check_mode(mode)?;
        let mut mean = self.mean.clone();
        mean[2 * mode] += dx;
        mean[2 * mode + 1] += dp;
        Ok(GaussianState {
            mean,
            cov: self.cov.clone(),
        })
    }

    /// Mean and covariance of the classical pair `(Σ g_x·q, Σ g_p·q)` formed
    /// from the listed quadratures, each entry being `(mode, quadrature, [g_x, g_p])`.
    pub fn readout_moments(&self, terms: &[(usize, Quadrature, [f64; 2])]) -> Result<(Vector2<f64>, Matrix2<f64>)> {
        let mut rows = DMatrix::zeros(2, self.mean.len());
        for &(mode, quad, gain) in terms {
            self.check_mode(mode)?;
            let k = quad.index(mode);
            rows[(0, k)] += gain[0];
            rows[(1, k)] += gain[1];
        }
        let m = &rows * &self.mean;
        let c = &rows * &self.cov * rows.transpose();
        Ok((Vector2::new(m[0], m[1]), c.fixed_view::<2, 2>(0, 0).into_owned()))
    }

    /// Outcome-averaged state of `target` after classical feed-forward.
    ///
    /// Each entry `(mode, quadrature, [g_x, g_p])` means the ideal homodyne
    /// result of that quadrature is added, scaled by `g_x` and `g_p`, to the
    /// target's `x` and `p`. Because the measured quadratures commute with the
    /// target, the ensemble over outcomes equals the linear map on operators.
    pub fn feed_forward_average(
        &self,
        measured: &[(usize, Quadrature, [f64; 2])],
        target: usize,
    ) -> Result<GaussianState> {
        self.check_mode(target)?;
        let dim = self.mean.len();
        let mut rows = DMatrix::zeros(2, dim);
        rows[(0, 2 * target)] = 1.0;
        rows[(1, 2 * target + 1)] = 1.0;
        for (i, &(mode, quad, gain)) in measured.iter().enumerate() {
            self.check_mode(mode)?;
            if mode == target {
                return Err(Error::Contract(format!("feed-forward source {mode} is the target")));
            }
            if measured[..i].iter().any(|&(m, _, _)| m == mode) {
                return Err(Error::Contract(format!(
                    "both quadratures of mode {mode} cannot be measured ideally"
                )));
            }
            let k = quad.index(mode);
            rows[(0, k)] += gain[0];
            rows[(1, k)] += gain[1];
        }
        Ok(GaussianState {
            mean: &rows * &self.mean,
            cov: &rows * &self.cov * rows.transpose(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coherent_states() {
        let vac = GaussianState::coherent(&[(0.0, 0.0)]);
        assert_eq!(vac, GaussianState::vacuum(1));
        let c = GaussianState::coherent(&[(3.0, -2.0)]);
        assert_eq!(c.mean().as_slice(), &[3.0, -2.0]);
        assert_eq!(c.cov(), &DMatrix::<f64>::identity(2, 2));
        let two = GaussianState::coherent(&[(1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(two.n_modes(), 2);
        assert_eq!(two.cov(), &DMatrix::<f64>::identity(4, 4));
    }

    #[test]
    fn construction_checks() {
        let m = DVector::zeros(2);
        assert!(GaussianState::new(m.clone(), DMatrix::identity(2, 2)).is_ok());
        // squeezed below the uncertainty limit
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5]));
        assert!(matches!(
            GaussianState::new(m.clone(), bad.clone()),
            Err(Error::Inadmissible { .. })
        ));
        assert!(GaussianState::new_unchecked(m.clone(), bad).is_ok());
        // minimum-uncertainty squeezed state is fine
        let sq = DMatrix::from_diagonal(&DVector::from_vec(vec![0.25, 4.0]));
        assert!(GaussianState::new(m.clone(), sq).is_ok());
        assert!(GaussianState::new(DVector::zeros(3), DMatrix::identity(3, 3)).is_err());
        assert!(GaussianState::new(m, DMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn symmetrizes_covariance() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.1, 2.0]);
        let s = GaussianState::new(DVector::zeros(2), cov).unwrap();
        assert_eq!(s.cov()[(0, 1)], s.cov()[(1, 0)]);
        assert_abs_diff_eq!(s.cov()[(0, 1)], 0.2, epsilon = 1e-15);
    }

    #[test]
    fn attenuation_examples() {
        let c = GaussianState::coherent(&[(3.0, -2.0)]);
        assert_eq!(c.attenuate(0, 1.0).unwrap(), c);
        assert_eq!(c.attenuate(0, 0.0).unwrap(), GaussianState::vacuum(1));
        let a = GaussianState::coherent(&[(1.0, 0.0)]).attenuate(0, 0.31).unwrap();
        assert_abs_diff_eq!(a.mean()[0], 0.556_776_436_283_002_2, epsilon = 1e-12);
        assert_abs_diff_eq!(a.cov().clone(), DMatrix::identity(2, 2), epsilon = 1e-15);
        assert!(c.attenuate(1, 0.5).is_err());
        assert!(c.attenuate(0, 1.2).is_err());
    }

    #[test]
    fn loss_then_compensating_gain() {
        let eta = 0.31;
        let out = GaussianState::vacuum(1)
            .attenuate(0, eta)
            .unwrap()
            .amplify(0, 1.0 / eta)
            .unwrap();
        let added = out.cov()[(0, 0)] - 1.0;
        assert_abs_diff_eq!(added, 2.0 * (1.0 - eta) / eta, epsilon = 1e-12);
        assert_abs_diff_eq!(added, 4.451_612_903_225_806, epsilon = 1e-12);
        assert!(GaussianState::vacuum(1).amplify(0, 0.9).is_err());
        assert_eq!(
            GaussianState::vacuum(1).amplify(0, 1.0).unwrap(),
            GaussianState::vacuum(1)
        );
    }

    #[test]
    fn classical_noise() {
        let v = GaussianState::vacuum(1);
        assert_eq!(v.add_classical_noise(0, 0.0).unwrap(), v);
        assert_eq!(
            v.add_classical_noise(0, 2.0).unwrap().cov(),
            &(DMatrix::identity(2, 2) * 3.0)
        );
        assert!(v.add_classical_noise(0, -1.0).is_err());
    }

    #[test]
    fn displacement() {
        let v = GaussianState::vacuum(1);
        assert_eq!(v.displace(0, 0.0, 0.0).unwrap(), v);
        assert_eq!(
            v.displace(0, 3.0, -2.0).unwrap(),
            GaussianState::coherent(&[(3.0, -2.0)])
        );
        assert!(v.displace(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn displacement_through_loss() {
        let eta = 0.4;
        let s = GaussianState::coherent(&[(0.5, 1.0)]);
        let a = s.displace(0, 2.0, -1.0).unwrap().attenuate(0, eta).unwrap();
        let b = s
            .attenuate(0, eta)
            .unwrap()
            .displace(0, 2.0 * eta.sqrt(), -eta.sqrt())
            .unwrap();
        assert_abs_diff_eq!(a.mean().clone(), b.mean().clone(), epsilon = 1e-14);
        assert_abs_diff_eq!(a.cov().clone(), b.cov().clone(), epsilon = 1e-14);
    }

    #[test]
    fn two_mode_squeezed_vacuum_correlations() {
        let tms = SymplecticTransform::two_mode_squeezer(1.0).unwrap();
        let s = GaussianState::vacuum(2).apply(&tms, &[0, 1]).unwrap();
        let diff = s.quadratic_form(&[1.0, 0.0, -1.0, 0.0]).unwrap();
        let sum = s.quadratic_form(&[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(diff, 0.270_670_566_473_225_4, epsilon = 1e-12);
        assert_abs_diff_eq!(sum, 14.778_112_197_861_3, epsilon = 1e-11);
        assert!(s.check_admissible(ADMISSIBILITY_TOL).is_ok());
    }

    #[test]
    fn reduced_and_tensor() {
        let a = GaussianState::coherent(&[(1.0, 2.0)]);
        let b = GaussianState::coherent(&[(3.0, 4.0)])
            .add_classical_noise(0, 1.0)
            .unwrap();
        let ab = a.tensor(&b);
        assert_eq!(ab.reduced(&[1]).unwrap(), b);
        assert_eq!(ab.reduced(&[0]).unwrap(), a);
        assert!(ab.reduced(&[2]).is_err());
    }

    #[test]
    fn feed_forward_rejects_bad_sources() {
        let s = GaussianState::vacuum(3);
        assert!(s.feed_forward_average(&[(0, Quadrature::X, [1.0, 0.0])], 0).is_err());
        assert!(s
            .feed_forward_average(&[(1, Quadrature::X, [1.0, 0.0]), (1, Quadrature::P, [0.0, 1.0])], 0)
            .is_err());
        let out = s
            .feed_forward_average(&[(1, Quadrature::X, [1.0, 0.0]), (2, Quadrature::P, [0.0, 1.0])], 0)
            .unwrap();
        assert_eq!(out.cov(), &(DMatrix::identity(2, 2) * 2.0));
    }
}
