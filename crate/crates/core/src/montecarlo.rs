//! Shot-by-shot simulation of the feed-forward scheme.
//!
//! Shots are generated in fixed-size blocks. Block `b` draws from a ChaCha8
//! stream keyed by `(seed, b)`, so the raw record, and every statistic pooled
//! from it in block order, is identical for any number of workers.

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{HeterodyneConditioner, MeasurementOutcome};
use crate::schemes::FeedForwardScheme;

/// Shots per random stream.
pub const BLOCK_SHOTS: usize = 4096;

/// Environment variable holding the worker count for [`Workers::from_env`].
pub const WORKERS_ENV: &str = "CVTRADEOFF_WORKERS";

/// Number of worker threads for shot generation. Never affects results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workers {
    /// Rayon's global pool.
    Default,
    Fixed(usize),
}

impl Workers {
    /// Reads [`WORKERS_ENV`]; unset, empty, zero or unparsable means [`Workers::Default`].
    pub fn from_env() -> Self {
        match std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(n) if n > 0 => Workers::Fixed(n),
            _ => Workers::Default,
        }
    }
}

/// Raw per-shot record of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotBatch {
    pub scheme: FeedForwardScheme,
    pub input_amplitude: (f64, f64),
    pub seed: u64,
    /// Heterodyne readouts `(x_a, p_b)`.
    pub outcomes: Vec<MeasurementOutcome>,
    /// Sampled `(x, p)` of the quantum output.
    pub outputs: Vec<(f64, f64)>,
    /// Classical estimates `κ·(x_a, p_b)`.
    pub estimates: Vec<(f64, f64)>,
}

impl ShotBatch {
    pub fn n_shots(&self) -> usize {
        self.outcomes.len()
    }

    pub fn transmittance(&self) -> f64 {
        self.scheme.transmittance
    }
}

/// Shot generator with everything that is identical across shots precomputed.
struct ShotKernel {
    conditioner: HeterodyneConditioner,
    output_chol: Matrix2<f64>,
    lambda: f64,
    kappa: f64,
}

impl ShotKernel {
    fn new(scheme: &FeedForwardScheme, input: (f64, f64)) -> Result<Self> {
        // reflected arm (after detector loss) and transmitted signal
        let split = scheme.pre_measurement_state(input)?.reduced(&[0, 1])?;
        let conditioner = HeterodyneConditioner::new(&split, 0)?;
        let output_chol = conditioner
            .conditional_cov()
            .fixed_view::<2, 2>(0, 0)
            .into_owned()
            .cholesky()
            .ok_or_else(|| Error::Contract("conditional output covariance not positive definite".into()))?
            .l();
        Ok(Self {
            conditioner,
            output_chol,
            lambda: scheme.lambda,
            kappa: scheme.kappa,
        })
    }

    fn shot<R: Rng + ?Sized>(&self, rng: &mut R) -> (MeasurementOutcome, (f64, f64), (f64, f64)) {
        let outcome = self.conditioner.sample_outcome(rng);
        let cond = self.conditioner.conditional_mean(&outcome);
        let y = outcome.as_vector();
        let mean = Vector2::new(cond[0], cond[1]) + self.lambda * y;
        let z = Vector2::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let out = mean + self.output_chol * z;
        (outcome, (out[0], out[1]), (self.kappa * y[0], self.kappa * y[1]))
    }

    fn block(&self, seed: u64, index: usize, len: usize) -> Block {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let mut b = Block {
            outcomes: Vec::with_capacity(len),
            outputs: Vec::with_capacity(len),
            estimates: Vec::with_capacity(len),
        };
        for _ in 0..len {
            let (o, out, est) = self.shot(&mut rng);
            b.outcomes.push(o);
            b.outputs.push(out);
            b.estimates.push(est);
        }
        b
    }
}

struct Block {
    outcomes: Vec<MeasurementOutcome>,
    outputs: Vec<(f64, f64)>,
    estimates: Vec<(f64, f64)>,
}

/// Runs the ideal scheme with tap transmittance `t`.
pub fn run_feedforward(t: f64, input_amplitude: (f64, f64), n_shots: usize, seed: u64) -> Result<ShotBatch> {
    run_scheme(
        &FeedForwardScheme::ideal(t)?,
        input_amplitude,
        n_shots,
        seed,
        Workers::from_env(),
    )
}

/// Runs `scheme` for `n_shots` shots: tap the input, heterodyne the reflected
/// arm, displace the transmitted arm by `λ·(x_a, p_b)` and sample the output
/// from its exact conditional Gaussian.
pub fn run_scheme(
    scheme: &FeedForwardScheme,
    input_amplitude: (f64, f64),
    n_shots: usize,
    seed: u64,
    workers: Workers,
) -> Result<ShotBatch> {
    if n_shots == 0 {
        return Err(Error::Domain {
            name: "n_shots",
            value: 0.0,
            domain: "[1, ∞)",
        });
    }
    if !(input_amplitude.0.is_finite() && input_amplitude.1.is_finite()) {
        return Err(Error::Contract("input amplitude must be finite".into()));
    }
    let kernel = ShotKernel::new(scheme, input_amplitude)?;
    let n_blocks = n_shots.div_ceil(BLOCK_SHOTS);
    let len = |b: usize| BLOCK_SHOTS.min(n_shots - b * BLOCK_SHOTS);
    let generate = || -> Vec<Block> {
        (0..n_blocks)
            .into_par_iter()
            .map(|b| kernel.block(seed, b, len(b)))
            .collect()
    };
    let blocks = match workers {
        Workers::Default => generate(),
        Workers::Fixed(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Contract(format!("thread pool: {e}")))?
            .install(generate),
    };

    let mut batch = ShotBatch {
        scheme: *scheme,
        input_amplitude,
        seed,
        outcomes: Vec::with_capacity(n_shots),
        outputs: Vec::with_capacity(n_shots),
        estimates: Vec::with_capacity(n_shots),
    };
    for b in blocks {
        batch.outcomes.extend(b.outcomes);
        batch.outputs.extend(b.outputs);
        batch.estimates.extend(b.estimates);
    }
    Ok(batch)
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Pools two disjoint samples.
    pub fn merge(&self, other: &Moments) -> Moments {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        let w = other.count as f64 / n as f64;
        Moments {
            count: n,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * w,
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Mean of squares, `E[x²]`.
    pub fn mean_square(&self) -> f64 {
        self.m2 / self.count as f64 + self.mean * self.mean
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

/// An estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `|value − target| ≤ k·stderr`
    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// Ensemble statistics of a [`ShotBatch`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSummary {
    pub n_shots: usize,
    /// Output mean over input mean; `None` when that input component is zero.
    pub gain_x: Option<Estimate>,
    pub gain_p: Option<Estimate>,
    /// Added output noise per quadrature: sample variance minus one.
    pub var_n_x: Estimate,
    pub var_n_p: Estimate,
    /// Quadrature average of the added output noise.
    pub var_n_hat: Estimate,
    /// Added estimation noise: mean square error about the input minus one.
    pub var_m_hat: Estimate,
    pub f_hat: Estimate,
    pub g_hat: Estimate,
}

const MIN_SUMMARY_SHOTS: usize = 100;

/// Gains, added noises and fidelities inferred from ensemble variances.
pub fn summarize(batch: &ShotBatch) -> Result<EmpiricalSummary> {
    let n = batch.n_shots();
    if n < MIN_SUMMARY_SHOTS {
        return Err(Error::Domain {
            name: "n_shots",
            value: n as f64,
            domain: "[100, ∞)",
        });
    }
    let (ax, ap) = batch.input_amplitude;
    let out_x: Moments = batch.outputs.iter().map(|o| o.0).collect();
    let out_p: Moments = batch.outputs.iter().map(|o| o.1).collect();
    let err_x: Moments = batch.estimates.iter().map(|e| e.0 - ax).collect();
    let err_p: Moments = batch.estimates.iter().map(|e| e.1 - ap).collect();
    let nf = n as f64;

    let gain = |m: &Moments, a: f64| {
        (a != 0.0).then(|| Estimate {
            value: m.mean / a,
            stderr: (m.variance() / nf).sqrt() / a.abs(),
        })
    };
    let added = |m: &Moments| {
        let v = m.variance();
        Estimate {
            value: v - 1.0,
            stderr: v * (2.0 / (nf - 1.0)).sqrt(),
        }
    };
    let var_n_x = added(&out_x);
    let var_n_p = added(&out_p);
    let var_n_hat = Estimate {
        value: 0.5 * (var_n_x.value + var_n_p.value),
        stderr: 0.5 * var_n_x.stderr.hypot(var_n_p.stderr),
    };
    let mse = |m: &Moments| {
        let v = m.mean_square();
        (v, v * (2.0 / nf).sqrt())
    };
    let ((mx, sx), (mp, sp)) = (mse(&err_x), mse(&err_p));
    let var_m_hat = Estimate {
        value: 0.5 * (mx + mp) - 1.0,
        stderr: 0.5 * sx.hypot(sp),
    };

    let fid = |offset: f64, e: &Estimate| {
        let d = offset + e.value;
        Estimate {
            value: 2.0 / d,
            stderr: 2.0 / (d * d) * e.stderr,
        }
    };
    Ok(EmpiricalSummary {
        n_shots: n,
        gain_x: gain(&out_x, ax),
        gain_p: gain(&out_p, ap),
        var_n_x,
        var_n_p,
        f_hat: fid(2.0, &var_n_hat),
        g_hat: fid(3.0, &var_m_hat),
        var_n_hat,
        var_m_hat,
    })
}
