//! Channel protocols that split an unknown coherent state into a classical
//! and a quantum part before transmission.
//!
//! * Lossy channel of transmissivity `η`: the baseline re-amplifies at the
//!   receiver; the hybrid taps `1 − T` of the signal into a classical
//!   estimate and lets the receiver displace the attenuated remainder.
//! * Erasure channel delivering the quantum part with probability `p`: on a
//!   loss only the classical estimate survives, giving `F′ = pF + (1−p)G`.
//! * Deterministic additive noise `χ`: no mixture helps, it is either all
//!   classical or all quantum.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{check_closed, Result};
use crate::gaussian::{GaussianState, Quadrature, SymplecticTransform};
use crate::optimize::{bracketed_max, Maximum};
use crate::schemes::{feedforward_point, NoiseBudget};

/// Grid points in the pre-scan before golden-section refinement.
pub const PRESCAN_POINTS: usize = 1000;

/// Bracket width at which golden-section refinement stops.
pub const T_TOLERANCE: f64 = 1e-10;

/// How the signal is best routed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Measure everything, send only classical data (`T = 0`).
    Classical,
    /// Send the untouched state through the quantum channel (`T → 1`).
    Quantum,
    /// Partial estimation at an interior `T`.
    Hybrid,
    /// Pure strategies perform equally.
    Tie,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Classical => "classical",
            Strategy::Quantum => "quantum",
            Strategy::Hybrid => "hybrid",
            Strategy::Tie => "tie",
        })
    }
}

/// Best tap setting for a channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub t_star: f64,
    pub f_star: f64,
    /// Best fidelity reachable without partial estimation.
    pub baseline: f64,
    /// `f_star − baseline`
    pub improvement: f64,
    /// `improvement / baseline`
    pub relative_improvement: f64,
    pub strategy: Strategy,
    /// Best point found strictly inside `[0, 1)`, before comparing with the `T → 1` boundary.
    pub interior: Maximum,
}

impl OptimizationResult {
    fn new(t_star: f64, f_star: f64, baseline: f64, strategy: Strategy, interior: Maximum) -> Self {
        let improvement = f_star - baseline;
        Self {
            t_star,
            f_star,
            baseline,
            improvement,
            relative_improvement: improvement / baseline,
            strategy,
            interior,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossyChannelSpec {
    pub eta: f64,
}

impl LossyChannelSpec {
    pub fn new(eta: f64) -> Result<Self> {
        let eta = check_closed("eta", eta, f64::MIN_POSITIVE, 1.0, "(0, 1]")?;
        Ok(Self { eta })
    }

    /// Added noise of loss followed by a phase-insensitive amplifier of gain `1/η`.
    pub fn amplifier_noise(&self) -> f64 {
        2.0 * (1.0 - self.eta) / self.eta
    }

    /// Fidelity of loss plus receiver-side amplification; equals `η`.
    pub fn amplifier_fidelity(&self) -> f64 {
        2.0 / (2.0 + self.amplifier_noise())
    }

    /// Noise budget of the hybrid protocol with tap transmittance `t ∈ [0, 1)`.
    ///
    /// With the receiver's displacement gain `λ = √2(1 − √(ηT))/√(1−T)` the
    /// overall gain is one and the added output noise is
    /// `[√(η(1−T)) − √T(1−√(ηT))/√(1−T)]² + (1−η) + (1−√(ηT))²/(1−T)`,
    /// collapsing to `2(1−η)` at `T = η`.
    pub fn hybrid_noise(&self, t: f64) -> Result<NoiseBudget> {
        let t = check_closed("T", t, 0.0, 1.0 - f64::EPSILON, "[0, 1)")?;
        let eta = self.eta;
        let r = 1.0 - t;
        let s = (eta * t).sqrt();
        let cross = (eta * r).sqrt() - t.sqrt() * (1.0 - s) / r.sqrt();
        let var_n = cross * cross + (1.0 - eta) + (1.0 - s).powi(2) / r;
        NoiseBudget::unity(var_n, (1.0 + t) / r)
    }

    pub fn hybrid_fidelity(&self, t: f64) -> Result<f64> {
        Ok(2.0 / (2.0 + self.hybrid_noise(t)?.var_n))
    }

    /// Minimizes the hybrid output noise over `T`.
    pub fn optimize(&self) -> OptimizationResult {
        let baseline = self.amplifier_fidelity();
        if self.eta == 1.0 {
            // lossless: the untouched state is best, reached only as T → 1
            let interior = Maximum { x: 1.0, value: 1.0 };
            return OptimizationResult::new(1.0, 1.0, baseline, Strategy::Quantum, interior);
        }
        let f = |t: f64| self.hybrid_fidelity(t).unwrap_or(f64::NEG_INFINITY);
        let best = bracketed_max(f, 0.0, 1.0, PRESCAN_POINTS, T_TOLERANCE);
        let strategy = if best.x == 0.0 {
            Strategy::Classical
        } else {
            Strategy::Hybrid
        };
        OptimizationResult::new(best.x, best.value, baseline, strategy, best)
    }

    /// Circuit simulation of the hybrid protocol, averaged over outcomes.
    /// Modes: 0 tapped arm, 1 signal through the channel, 2 heterodyne vacuum port.
    pub fn simulate_hybrid(&self, t: f64, input: (f64, f64)) -> Result<GaussianState> {
        let t = check_closed("T", t, 0.0, 1.0 - f64::EPSILON, "[0, 1)")?;
        let lambda = SQRT_2 * (1.0 - (self.eta * t).sqrt()) / (1.0 - t).sqrt();
        let state = GaussianState::vacuum(1)
            .tensor(&GaussianState::coherent(&[input]))
            .apply(&SymplecticTransform::beam_splitter(t)?, &[0, 1])?
            .attenuate(1, self.eta)?
            .tensor(&GaussianState::vacuum(1))
            .apply(&SymplecticTransform::beam_splitter(0.5)?, &[0, 2])?;
        state.feed_forward_average(
            &[(0, Quadrature::X, [lambda, 0.0]), (2, Quadrature::P, [0.0, -lambda])],
            1,
        )
    }

    /// Circuit simulation of loss followed by a gain-`1/η` amplifier.
    pub fn simulate_amplifier(&self, input: (f64, f64)) -> Result<GaussianState> {
        GaussianState::coherent(&[input])
            .attenuate(0, self.eta)?
            .amplify(0, 1.0 / self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErasureChannelSpec {
    pub p: f64,
}

impl ErasureChannelSpec {
    pub fn new(p: f64) -> Result<Self> {
        let p = check_closed("p", p, 0.0, 1.0, "[0, 1]")?;
        Ok(Self { p })
    }

    /// `pF(T) + (1−p)G(T)` for `T ∈ [0, 1)`; at `T = 0` both fidelities are 1/2.
    pub fn fidelity(&self, t: f64) -> Result<f64> {
        let t = check_closed("T", t, 0.0, 1.0 - f64::EPSILON, "[0, 1)")?;
        let (g, f) = if t == 0.0 {
            (0.5, 0.5)
        } else {
            let pt = feedforward_point(t)?;
            (pt.estimation_fidelity, pt.transfer_fidelity)
        };
        Ok(self.p * f + (1.0 - self.p) * g)
    }

    /// Best tap: grid pre-scan and golden-section inside `[0, 1)`, then
    /// comparison with the `T → 1` supremum `p`.
    pub fn optimize(&self) -> OptimizationResult {
        let p = self.p;
        let baseline = p.max(0.5);
        let f = |t: f64| self.fidelity(t).unwrap_or(f64::NEG_INFINITY);
        let interior = bracketed_max(f, 0.0, 1.0, PRESCAN_POINTS, T_TOLERANCE);
        if p >= interior.value {
            OptimizationResult::new(1.0, p, baseline, Strategy::Quantum, interior)
        } else if interior.x == 0.0 {
            OptimizationResult::new(0.0, interior.value, baseline, Strategy::Classical, interior)
        } else {
            OptimizationResult::new(interior.x, interior.value, baseline, Strategy::Hybrid, interior)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdditiveNoiseSpec {
    pub chi: f64,
}

/// Outcome of the all-classical vs. all-quantum comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseDecision {
    pub strategy: Strategy,
    pub quantum_fidelity: f64,
    pub classical_fidelity: f64,
}

/// Threshold noise, in shot-noise units, above which classical transmission wins.
pub const ADDITIVE_NOISE_THRESHOLD: f64 = 2.0;

impl AdditiveNoiseSpec {
    pub fn new(chi: f64) -> Result<Self> {
        let chi = check_closed("chi", chi, 0.0, f64::INFINITY, "[0, ∞)")?;
        Ok(Self { chi })
    }

    pub fn decide(&self) -> NoiseDecision {
        let strategy = if self.chi > ADDITIVE_NOISE_THRESHOLD {
            Strategy::Classical
        } else if self.chi < ADDITIVE_NOISE_THRESHOLD {
            Strategy::Quantum
        } else {
            Strategy::Tie
        };
        NoiseDecision {
            strategy,
            quantum_fidelity: 2.0 / (2.0 + self.chi),
            classical_fidelity: 0.5,
        }
    }
}

/// A channel together with its protocol parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "snake_case")]
pub enum ChannelSpec {
    Lossy(LossyChannelSpec),
    Erasure(ErasureChannelSpec),
    AdditiveNoise(AdditiveNoiseSpec),
}

impl ChannelSpec {
    /// Fidelity of the best pure strategy.
    pub fn baseline_fidelity(&self) -> f64 {
        match self {
            ChannelSpec::Lossy(c) => c.amplifier_fidelity(),
            ChannelSpec::Erasure(c) => c.p.max(0.5),
            ChannelSpec::AdditiveNoise(c) => {
                let d = c.decide();
                d.quantum_fidelity.max(d.classical_fidelity)
            }
        }
    }
}

pub fn lossy_amplifier_fidelity(eta: f64) -> Result<f64> {
    Ok(LossyChannelSpec::new(eta)?.amplifier_fidelity())
}

pub fn lossy_hybrid_noise(eta: f64, t: f64) -> Result<NoiseBudget> {
    LossyChannelSpec::new(eta)?.hybrid_noise(t)
}

pub fn lossy_hybrid_optimize(eta: f64) -> Result<OptimizationResult> {
    Ok(LossyChannelSpec::new(eta)?.optimize())
}

pub fn erasure_fidelity(p: f64, t: f64) -> Result<f64> {
    ErasureChannelSpec::new(p)?.fidelity(t)
}

pub fn erasure_optimize(p: f64) -> Result<OptimizationResult> {
    Ok(ErasureChannelSpec::new(p)?.optimize())
}

pub fn additive_noise_decision(chi: f64) -> Result<NoiseDecision> {
    Ok(AdditiveNoiseSpec::new(chi)?.decide())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::fidelity_vs_coherent;
    use approx::assert_abs_diff_eq;

    #[test]
    fn amplifier_baseline() {
        assert_eq!(lossy_amplifier_fidelity(1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(lossy_amplifier_fidelity(0.31).unwrap(), 0.31, epsilon = 1e-15);
        assert_abs_diff_eq!(lossy_amplifier_fidelity(0.5).unwrap(), 0.5, epsilon = 1e-15);
        let c = LossyChannelSpec::new(0.5).unwrap();
        let out = c.simulate_amplifier((2.0, 1.0)).unwrap();
        assert_abs_diff_eq!(fidelity_vs_coherent((2.0, 1.0), &out).unwrap(), 0.5, epsilon = 1e-14);
        assert!(lossy_amplifier_fidelity(0.0).is_err());
        assert!(lossy_amplifier_fidelity(1.1).is_err());
    }

    #[test]
    fn hybrid_noise_values() {
        let b = lossy_hybrid_noise(0.31, 0.31).unwrap();
        assert_abs_diff_eq!(b.var_n, 1.38, epsilon = 1e-12);
        assert_abs_diff_eq!(2.0 / (2.0 + b.var_n), 0.591_715_976_331_361, epsilon = 1e-12);
        for eta in [0.1, 0.31, 0.9] {
            assert_abs_diff_eq!(lossy_hybrid_noise(eta, 0.0).unwrap().var_n, 2.0, epsilon = 1e-14);
        }
        // off-optimum values from an independent coefficient propagation
        assert_abs_diff_eq!(
            lossy_hybrid_noise(0.31, 0.1).unwrap().var_n,
            1.508_585_917_259_599_5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            lossy_hybrid_noise(0.5, 0.7).unwrap().var_n,
            1.111_893_622_533_845_4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(lossy_hybrid_noise(0.8, 0.2).unwrap().var_n, 0.9, epsilon = 1e-12);
        assert!(lossy_hybrid_noise(0.5, 1.0).is_err());
    }

    #[test]
    fn hybrid_lossless_reduces_to_feedforward() {
        for t in [0.1, 0.25, 0.5, 0.9] {
            let b = lossy_hybrid_noise(1.0, t).unwrap();
            let ff = crate::schemes::feedforward_noises(t).unwrap();
            assert_abs_diff_eq!(b.var_n, ff.var_n, epsilon = 1e-12);
            assert_abs_diff_eq!(b.var_m, ff.var_m, epsilon = 1e-12);
        }
    }

    #[test]
    fn hybrid_circuit_matches_formula() {
        for (eta, t) in [(0.31, 0.31), (0.31, 0.1), (0.5, 0.7), (0.9, 0.0), (0.2, 0.95)] {
            let c = LossyChannelSpec::new(eta).unwrap();
            let out = c.simulate_hybrid(t, (3.0, -2.0)).unwrap();
            assert_abs_diff_eq!(out.mean()[0], 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(out.mean()[1], -2.0, epsilon = 1e-12);
            let vn = c.hybrid_noise(t).unwrap().var_n;
            assert_abs_diff_eq!(out.cov()[(0, 0)] - 1.0, vn, epsilon = 1e-12);
            assert_abs_diff_eq!(out.cov()[(1, 1)] - 1.0, vn, epsilon = 1e-12);
            assert_abs_diff_eq!(out.cov()[(0, 1)], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lossy_optimum() {
        let r = lossy_hybrid_optimize(0.31).unwrap();
        assert_abs_diff_eq!(r.t_star, 0.31, epsilon = 1e-6);
        assert_abs_diff_eq!(r.f_star, 1.0 / (2.0 - 0.31), epsilon = 1e-9);
        assert_abs_diff_eq!(r.baseline, 0.31, epsilon = 1e-15);
        assert_abs_diff_eq!(r.improvement, 0.281_715_976_331_361, epsilon = 1e-9);
        assert_eq!(r.strategy, Strategy::Hybrid);
        let r = lossy_hybrid_optimize(1.0).unwrap();
        assert_eq!((r.t_star, r.f_star, r.strategy), (1.0, 1.0, Strategy::Quantum));
        let r = lossy_hybrid_optimize(0.5).unwrap();
        assert_abs_diff_eq!(r.f_star, 1.0 / 1.5, epsilon = 1e-9);
        assert!(r.f_star > r.baseline);
    }

    #[test]
    fn erasure_values() {
        let e = ErasureChannelSpec::new(0.5).unwrap();
        assert_abs_diff_eq!(e.fidelity(0.405).unwrap(), 0.595_619_401_942_521_7, epsilon = 1e-12);
        assert_eq!(e.fidelity(0.0).unwrap(), 0.5);
        let perfect = ErasureChannelSpec::new(1.0).unwrap();
        assert!(perfect.fidelity(1.0 - 1e-9).unwrap() > 1.0 - 1e-4);
        let none = ErasureChannelSpec::new(0.0).unwrap();
        for t in [0.0, 0.3, 0.8] {
            let g = if t == 0.0 { 0.5 } else { (1.0 - t) / (2.0 - t) };
            assert_abs_diff_eq!(none.fidelity(t).unwrap(), g, epsilon = 1e-15);
        }
        assert!(e.fidelity(1.0).is_err());
        assert!(ErasureChannelSpec::new(1.5).is_err());
    }

    #[test]
    fn erasure_optima() {
        let r = erasure_optimize(0.5).unwrap();
        assert_eq!(r.strategy, Strategy::Hybrid);
        // 10⁶-point grid oracle: argmax 0.404754, max 0.59561941676532
        assert_abs_diff_eq!(r.t_star, 0.404_754, epsilon = 2e-6);
        assert_abs_diff_eq!(r.f_star, 0.595_619_416_765_320_2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.improvement, 0.095_619_416_765_320_15, epsilon = 1e-12);

        let r = erasure_optimize(0.81).unwrap();
        assert_eq!(r.strategy, Strategy::Quantum);
        assert_eq!(r.f_star, 0.81);
        assert!(r.interior.value <= 0.81 + 1e-6);

        let r = erasure_optimize(0.0).unwrap();
        assert_eq!((r.t_star, r.f_star, r.strategy), (0.0, 0.5, Strategy::Classical));

        let r = erasure_optimize(0.9).unwrap();
        assert_eq!((r.strategy, r.f_star), (Strategy::Quantum, 0.9));
    }

    #[test]
    fn noise_decision() {
        assert_eq!(additive_noise_decision(0.0).unwrap().strategy, Strategy::Quantum);
        let d = additive_noise_decision(2.0).unwrap();
        assert_eq!(d.strategy, Strategy::Tie);
        assert_eq!(d.quantum_fidelity, d.classical_fidelity);
        let d = additive_noise_decision(3.0).unwrap();
        assert_eq!(d.strategy, Strategy::Classical);
        assert_abs_diff_eq!(d.quantum_fidelity, 0.4, epsilon = 1e-15);
        assert!(additive_noise_decision(-0.1).is_err());
    }

    #[test]
    fn channel_baselines() {
        assert_eq!(
            ChannelSpec::Erasure(ErasureChannelSpec::new(0.3).unwrap()).baseline_fidelity(),
            0.5
        );
        assert_eq!(
            ChannelSpec::AdditiveNoise(AdditiveNoiseSpec::new(0.0).unwrap()).baseline_fidelity(),
            1.0
        );
    }
}
