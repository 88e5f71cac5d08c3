use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{GaussianState, Quadrature};
use crate::error::{Error, Result};

/// Unscaled dual-homodyne readout: `x_a` from the amplitude arm, `p_b` from the phase arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub x_a: f64,
    pub p_b: f64,
}

impl MeasurementOutcome {
    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.x_a, self.p_b)
    }
}

/// Moments of a linear Gaussian observation `y = L q_mode + noise` and the
/// regression of the remaining modes on `y`.
#[derive(Debug, Clone)]
struct Observation {
    obs_mean: DVector<f64>,
    obs_cov: DMatrix<f64>,
    /// `Cov(rest, y) · Cov(y)⁻¹`
    gain: DMatrix<f64>,
    rest_mean: DVector<f64>,
    cond_cov: DMatrix<f64>,
}

impl Observation {
    fn new(state: &GaussianState, mode: usize, l: &DMatrix<f64>, noise: &DMatrix<f64>) -> Result<Self> {
        state.check_mode(mode)?;
        let dim = 2 * state.n_modes();
        let m_idx = [2 * mode, 2 * mode + 1];
        let r_idx: Vec<usize> = (0..dim).filter(|i| !m_idx.contains(i)).collect();
        let mean = state.mean();
        let cov = state.cov();

        let mu_m = mean.select_rows(&m_idx);
        let sigma_mm = cov.select_rows(&m_idx).select_columns(&m_idx);
        let obs_mean = l * mu_m;
        let obs_cov = l * sigma_mm * l.transpose() + noise;
        let inv = obs_cov
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Contract("singular measurement covariance".into()))?;

        let sigma_rm = cov.select_rows(&r_idx).select_columns(&m_idx);
        let c_ry = sigma_rm * l.transpose();
        let gain = &c_ry * inv;
        let cond_cov = cov.select_rows(&r_idx).select_columns(&r_idx) - &gain * c_ry.transpose();
        Ok(Self {
            obs_mean,
            obs_cov,
            gain,
            rest_mean: mean.select_rows(&r_idx),
            cond_cov,
        })
    }

    fn conditional_state(&self, y: &DVector<f64>) -> Option<GaussianState> {
        if self.rest_mean.is_empty() {
            return None;
        }
        let mean = &self.rest_mean + &self.gain * (y - &self.obs_mean);
        // Schur complement of an admissible state is admissible.
        GaussianState::new_unchecked(mean, self.cond_cov.clone()).ok()
    }
}

/// Precomputed heterodyne measurement of one mode.
///
/// The measured mode is split 50/50 with vacuum; the amplitude arm yields
/// `x_a = (x + x_v)/√2` and the phase arm `p_b = (p − p_v)/√2`. For a mode with
/// quadrature variances `(Vx, Vp)` and mean `(x̄, p̄)` the outcomes have means
/// `(x̄/√2, p̄/√2)` and variances `((Vx+1)/2, (Vp+1)/2)`.
///
/// The conditional covariance of the other modes does not depend on the
/// outcome, so it is computed once and reused for every shot.
#[derive(Debug, Clone)]
pub struct HeterodyneConditioner {
    obs: Observation,
    outcome_mean: Vector2<f64>,
    outcome_cov: Matrix2<f64>,
    outcome_chol: Matrix2<f64>,
}

impl HeterodyneConditioner {
    pub fn new(state: &GaussianState, mode: usize) -> Result<Self> {
        let l = DMatrix::identity(2, 2) * std::f64::consts::FRAC_1_SQRT_2;
        let noise = DMatrix::identity(2, 2) * 0.5;
        let obs = Observation::new(state, mode, &l, &noise)?;
        let outcome_mean = Vector2::new(obs.obs_mean[0], obs.obs_mean[1]);
        let outcome_cov = obs.obs_cov.fixed_view::<2, 2>(0, 0).into_owned();
        let outcome_chol = outcome_cov
            .cholesky()
            .ok_or_else(|| Error::Contract("heterodyne outcome covariance not positive definite".into()))?
            .l();
        Ok(Self {
            obs,
            outcome_mean,
            outcome_cov,
            outcome_chol,
        })
    }

    pub fn outcome_mean(&self) -> Vector2<f64> {
        self.outcome_mean
    }

    pub fn outcome_cov(&self) -> Matrix2<f64> {
        self.outcome_cov
    }

    /// Covariance of the unmeasured modes given any outcome.
    pub fn conditional_cov(&self) -> &DMatrix<f64> {
        &self.obs.cond_cov
    }

    pub fn sample_outcome<R: Rng + ?Sized>(&self, rng: &mut R) -> MeasurementOutcome {
        let z = Vector2::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let y = self.outcome_mean + self.outcome_chol * z;
        MeasurementOutcome { x_a: y[0], p_b: y[1] }
    }

    /// Mean of the unmeasured modes given `outcome`.
    pub fn conditional_mean(&self, outcome: &MeasurementOutcome) -> DVector<f64> {
        let y = DVector::from_column_slice(&[outcome.x_a, outcome.p_b]);
        &self.obs.rest_mean + &self.obs.gain * (y - &self.obs.obs_mean)
    }

    /// State of the unmeasured modes given `outcome`; `None` for a single-mode input.
    pub fn condition(&self, outcome: &MeasurementOutcome) -> Option<GaussianState> {
        self.obs
            .conditional_state(&DVector::from_column_slice(&[outcome.x_a, outcome.p_b]))
    }
}

/// Mean and covariance of the heterodyne outcome `(x_a, p_b)` on `mode`.
pub fn heterodyne_distribution(state: &GaussianState, mode: usize) -> Result<(Vector2<f64>, Matrix2<f64>)> {
    let c = HeterodyneConditioner::new(state, mode)?;
    Ok((c.outcome_mean(), c.outcome_cov()))
}

/// Draws one heterodyne outcome on `mode` and returns it with the conditional
/// state of the remaining modes (`None` when nothing remains).
pub fn heterodyne_sample<R: Rng + ?Sized>(
    state: &GaussianState,
    mode: usize,
    rng: &mut R,
) -> Result<(MeasurementOutcome, Option<GaussianState>)> {
    let c = HeterodyneConditioner::new(state, mode)?;
    let outcome = c.sample_outcome(rng);
    Ok((outcome, c.condition(&outcome)))
}

/// Conditional state of the remaining modes after heterodyne outcome `outcome` on `mode`.
pub fn heterodyne_condition(
    state: &GaussianState,
    mode: usize,
    outcome: &MeasurementOutcome,
) -> Result<Option<GaussianState>> {
    Ok(HeterodyneConditioner::new(state, mode)?.condition(outcome))
}

/// Conditional state of the remaining modes after an ideal homodyne
/// measurement of `quadrature` on `mode` returned `value`.
pub fn homodyne_condition(
    state: &GaussianState,
    mode: usize,
    quadrature: Quadrature,
    value: f64,
) -> Result<Option<GaussianState>> {
    let mut l = DMatrix::zeros(1, 2);
    l[(0, quadrature.offset())] = 1.0;
    let obs = Observation::new(state, mode, &l, &DMatrix::zeros(1, 1))?;
    Ok(obs.conditional_state(&DVector::from_element(1, value)))
}
