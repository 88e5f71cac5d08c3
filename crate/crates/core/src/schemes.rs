//! Noise budgets and fidelities of optimal measure-and-preserve schemes.
//!
//! A scheme takes an unknown coherent state and returns both a classical
//! estimate and a quantum output. At unity gain, an estimate carrying added
//! noise `var_m` and an output carrying added noise `var_n` have fidelities
//! `G = 2/(3 + var_m)` and `F = 2/(2 + var_n)`. The optimal frontier satisfies
//! `var_n = 2(var_m − √(var_m² − 1))`, equivalently `F = bound(G)`.
//!
//! Every closed form here is paired with a circuit-level simulation on
//! [`GaussianState`] so the two routes can be compared.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{check_closed, check_open, Error, Result};
use crate::gaussian::{fidelity_vs_coherent, GaussianState, Quadrature, SymplecticTransform};

const SLACK: f64 = 1e-12;

/// Gain and added noises (shot-noise units) of a phase-insensitive scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub gain: f64,
    /// Noise added to the quantum output.
    pub var_n: f64,
    /// Noise added to the classical estimate.
    pub var_m: f64,
}

impl NoiseBudget {
    /// Validates `var_m ≥ 1`, `var_n ≥ |1−g²|/g²` and `var_n·var_m ≥ 1`.
    pub fn new(gain: f64, var_n: f64, var_m: f64) -> Result<Self> {
        if !(gain > 0.0 && gain.is_finite()) {
            return Err(Error::Domain {
                name: "gain",
                value: gain,
                domain: "(0, ∞)",
            });
        }
        if var_m.is_nan() || var_m < 1.0 - SLACK {
            return Err(Error::Contract(format!(
                "estimation noise {var_m} below one shot-noise unit"
            )));
        }
        let g2 = gain * gain;
        if var_n.is_nan() || var_n < (1.0 - g2).abs() / g2 - SLACK {
            return Err(Error::Contract(format!(
                "output noise {var_n} below the gain-{gain} amplifier limit"
            )));
        }
        if var_n * var_m < 1.0 - SLACK {
            return Err(Error::Contract(format!("var_n·var_m = {} < 1", var_n * var_m)));
        }
        Ok(Self { gain, var_n, var_m })
    }

    pub fn unity(var_n: f64, var_m: f64) -> Result<Self> {
        Self::new(1.0, var_n, var_m)
    }

    pub fn product(&self) -> f64 {
        self.var_n * self.var_m
    }
}

/// Which knob produced a [`TradeoffPoint`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SchemeParameter {
    /// Tap transmittance of the feed-forward scheme.
    Transmittance(f64),
    /// Two-mode squeezing of the teleportation resource.
    Squeezing(f64),
}

impl SchemeParameter {
    pub fn value(&self) -> f64 {
        match *self {
            SchemeParameter::Transmittance(v) | SchemeParameter::Squeezing(v) => v,
        }
    }
}

/// One operating point on (or below) the tradeoff frontier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub parameter: SchemeParameter,
    pub budget: NoiseBudget,
    /// Estimation fidelity `G`.
    pub estimation_fidelity: f64,
    /// Transfer fidelity `F`.
    pub transfer_fidelity: f64,
}

impl TradeoffPoint {
    fn from_budget(parameter: SchemeParameter, budget: NoiseBudget) -> Result<Self> {
        let (g, f) = fidelities_from_budget(&budget)?;
        Ok(Self {
            parameter,
            budget,
            estimation_fidelity: g,
            transfer_fidelity: f,
        })
    }
}

/// Added noises of the ideal feed-forward scheme with tap transmittance `t`.
pub fn feedforward_noises(t: f64) -> Result<NoiseBudget> {
    let t = check_open("T", t, 0.0, 1.0, "(0, 1)")?;
    let r = 1.0 - t;
    NoiseBudget::unity(2.0 * (1.0 - t.sqrt()).powi(2) / r, (1.0 + t) / r)
}

/// `(G, F)` for a unity-gain budget.
pub fn fidelities_from_budget(budget: &NoiseBudget) -> Result<(f64, f64)> {
    if budget.gain != 1.0 {
        return Err(Error::Contract(format!(
            "fidelity maps need unity gain, got {}",
            budget.gain
        )));
    }
    Ok((2.0 / (3.0 + budget.var_m), 2.0 / (2.0 + budget.var_n)))
}

/// Largest transfer fidelity compatible with estimation fidelity `g`.
pub fn tradeoff_bound(g: f64) -> Result<f64> {
    let g = check_closed("G", g, f64::MIN_POSITIVE, 0.5, "(0, 1/2]")?;
    let q = 1.0 - g;
    Ok(g / (2.0 * (q - (q * (1.0 - 2.0 * g)).sqrt())))
}

/// Smallest output noise at unity gain for estimation noise `var_m`.
pub fn unity_gain_noise_bound(var_m: f64) -> Result<f64> {
    let v = check_closed("var_m", var_m, 1.0, f64::INFINITY, "[1, ∞)")?;
    Ok(2.0 / (v + (v * v - 1.0).sqrt()))
}

pub fn feedforward_point(t: f64) -> Result<TradeoffPoint> {
    TradeoffPoint::from_budget(SchemeParameter::Transmittance(t), feedforward_noises(t)?)
}

pub fn teleportation_point(r: f64) -> Result<TradeoffPoint> {
    TeleportationScheme::new(r)?.point()
}

pub fn degraded_feedforward_point(t: f64, detector_efficiency: f64, visibility: f64) -> Result<TradeoffPoint> {
    FeedForwardScheme::degraded(t, detector_efficiency, visibility)?.point()
}

/// Output of a circuit-level simulation.
#[derive(Debug, Clone)]
pub struct CircuitOutput {
    /// Quantum output, averaged over measurement outcomes.
    pub output: GaussianState,
    /// Coherent state prepared from the classical estimate, averaged over outcomes.
    pub guess: GaussianState,
}

impl CircuitOutput {
    fn new(output: GaussianState, estimate: (nalgebra::Vector2<f64>, Matrix2<f64>)) -> Result<Self> {
        let (mean, cov) = estimate;
        let cov = DMatrix::from_iterator(2, 2, (Matrix2::identity() + cov).iter().copied());
        let guess = GaussianState::new_unchecked(nalgebra::DVector::from_column_slice(mean.as_slice()), cov)?;
        Ok(Self { output, guess })
    }

    /// Gains of the output on `(x, p)` for a nonzero input amplitude.
    pub fn output_gain(&self, input: (f64, f64)) -> (f64, f64) {
        let m = self.output.mean();
        (m[0] / input.0, m[1] / input.1)
    }

    /// Added output noise per quadrature.
    pub fn output_noise(&self) -> (f64, f64) {
        let c = self.output.cov();
        (c[(0, 0)] - 1.0, c[(1, 1)] - 1.0)
    }

    /// Added estimation noise per quadrature (input shot noise removed).
    pub fn estimate_noise(&self) -> (f64, f64) {
        let c = self.guess.cov();
        (c[(0, 0)] - 2.0, c[(1, 1)] - 2.0)
    }

    pub fn estimation_fidelity(&self, input: (f64, f64)) -> Result<f64> {
        fidelity_vs_coherent(input, &self.guess)
    }

    pub fn transfer_fidelity(&self, input: (f64, f64)) -> Result<f64> {
        fidelity_vs_coherent(input, &self.output)
    }
}

/// Tap, dual-homodyne and displace scheme.
///
/// The signal enters port 2 of a beam splitter of transmittance `T` whose
/// port 1 holds vacuum. Port 1's output (reflected signal) is measured by
/// heterodyne after an optional loss `η = ηd·v²`; the outcome `(x_a, p_b)`
/// gives the estimate `κ·(x_a, p_b)` and displaces the transmitted signal by
/// `λ·(x_a, p_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedForwardScheme {
    pub transmittance: f64,
    /// Feed-forward gain, fixed by unity overall gain.
    pub lambda: f64,
    /// Estimate scale, fixed by an unbiased estimate.
    pub kappa: f64,
    pub detector_efficiency: f64,
    pub visibility: f64,
}

impl FeedForwardScheme {
    pub fn ideal(t: f64) -> Result<Self> {
        Self::degraded(t, 1.0, 1.0)
    }

    pub fn degraded(t: f64, detector_efficiency: f64, visibility: f64) -> Result<Self> {
        let t = check_open("T", t, 0.0, 1.0, "(0, 1)")?;
        let ed = check_closed(
            "detector_efficiency",
            detector_efficiency,
            f64::MIN_POSITIVE,
            1.0,
            "(0, 1]",
        )?;
        let v = check_closed("visibility", visibility, f64::MIN_POSITIVE, 1.0, "(0, 1]")?;
        let eta = ed * v * v;
        let reach = (eta * (1.0 - t)).sqrt();
        Ok(Self {
            transmittance: t,
            lambda: SQRT_2 * (1.0 - t.sqrt()) / reach,
            kappa: SQRT_2 / reach,
            detector_efficiency: ed,
            visibility: v,
        })
    }

    /// Transmissivity of the in-loop detection, `ηd·v²`.
    pub fn effective_efficiency(&self) -> f64 {
        self.detector_efficiency * self.visibility * self.visibility
    }

    /// Noise budget; equals [`feedforward_noises`] bit-for-bit when lossless.
    pub fn noise_budget(&self) -> Result<NoiseBudget> {
        let t = self.transmittance;
        let r = 1.0 - t;
        let eta = self.effective_efficiency();
        let var_n = 2.0 * (1.0 - t.sqrt()).powi(2) / r / eta;
        let var_m = (1.0 + t) / r + 2.0 * (1.0 - eta) / (eta * r);
        NoiseBudget::unity(var_n, var_m)
    }

    pub fn point(&self) -> Result<TradeoffPoint> {
        TradeoffPoint::from_budget(SchemeParameter::Transmittance(self.transmittance), self.noise_budget()?)
    }

    /// State after the tap (and detector loss), before measurement.
    /// Modes: 0 reflected arm, 1 transmitted signal, 2 heterodyne vacuum port.
    pub fn pre_measurement_state(&self, input: (f64, f64)) -> Result<GaussianState> {
        let bs = SymplecticTransform::beam_splitter(self.transmittance)?;
        Ok(GaussianState::vacuum(1)
            .tensor(&GaussianState::coherent(&[input]))
            .apply(&bs, &[0, 1])?
            .attenuate(0, self.effective_efficiency())?
            .tensor(&GaussianState::vacuum(1)))
    }

    /// Full-circuit simulation: dual homodyne realised as a balanced splitter
    /// with vacuum, `x` read on one port and `−p` on the other.
    pub fn simulate(&self, input: (f64, f64)) -> Result<CircuitOutput> {
        let split = self.pre_measurement_state(input)?;
        let het = SymplecticTransform::beam_splitter(0.5)?;
        let measured = split.apply(&het, &[0, 2])?;
        let (l, k) = (self.lambda, self.kappa);
        let output =
            measured.feed_forward_average(&[(0, Quadrature::X, [l, 0.0]), (2, Quadrature::P, [0.0, -l])], 1)?;
        let estimate = measured.readout_moments(&[(0, Quadrature::X, [k, 0.0]), (2, Quadrature::P, [0.0, -k])])?;
        CircuitOutput::new(output, estimate)
    }
}

/// Teleportation through a two-mode squeezed resource of squeezing `r`.
///
/// The Bell measurement outcomes double as the classical estimate; the
/// teleported mode is the quantum output. Tuning `r` sweeps the frontier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportationScheme {
    pub r: f64,
}

impl TeleportationScheme {
    pub fn new(r: f64) -> Result<Self> {
        let r = check_closed("r", r, 0.0, f64::INFINITY, "[0, ∞)")?;
        Ok(Self { r })
    }

    pub fn noise_budget(&self) -> Result<NoiseBudget> {
        NoiseBudget::unity(2.0 * (-2.0 * self.r).exp(), (2.0 * self.r).cosh())
    }

    pub fn point(&self) -> Result<TradeoffPoint> {
        TradeoffPoint::from_budget(SchemeParameter::Squeezing(self.r), self.noise_budget()?)
    }

    /// Modes: 0 input, 1 sender half of the resource, 2 receiver half.
    /// The Bell measurement reads `x` of port 2 and `p` of port 1 after a
    /// balanced splitter on (input, sender half).
    pub fn simulate(&self, input: (f64, f64)) -> Result<CircuitOutput> {
        let tms = SymplecticTransform::two_mode_squeezer(self.r)?;
        let bell = SymplecticTransform::beam_splitter(0.5)?;
        let state = GaussianState::coherent(&[input])
            .tensor(&GaussianState::vacuum(2).apply(&tms, &[0, 1])?)
            .apply(&bell, &[0, 1])?;
        // x(port 2) = (x_A − x_in)/√2, p(port 1) = (p_in + p_A)/√2
        let terms = [(1, Quadrature::X, [-SQRT_2, 0.0]), (0, Quadrature::P, [0.0, SQRT_2])];
        let output = state.feed_forward_average(&terms, 2)?;
        let estimate = state.readout_moments(&terms)?;
        CircuitOutput::new(output, estimate)
    }
}
