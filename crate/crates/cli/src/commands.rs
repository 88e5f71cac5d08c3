use cvtradeoff_core::montecarlo::{run_scheme, summarize, Workers};
use cvtradeoff_core::{
    feedforward_point, tradeoff_bound, AdditiveNoiseSpec, ErasureChannelSpec, FeedForwardScheme, LossyChannelSpec,
    OptimizationResult, TeleportationScheme, TradeoffPoint,
};

use crate::args::{Amplitude, Command, Degradation, Grid, Tap};
use crate::config::ConfigFile;
use crate::error::CliError;
use crate::output::{Cell, Table};

const DEFAULT_SHOTS: usize = 1_000_000;

/// Fully resolved work item.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Curve {
        grid: Vec<f64>,
        degraded: Option<Degradation>,
    },
    Scheme(FeedForwardScheme),
    Teleport(TeleportationScheme),
    Mc {
        scheme: FeedForwardScheme,
        amp: (f64, f64),
        shots: usize,
        seed: u64,
    },
    Lossy {
        spec: LossyChannelSpec,
        tap: TapChoice,
    },
    Erasure {
        spec: ErasureChannelSpec,
        tap: TapChoice,
    },
    NoiseDecision(AdditiveNoiseSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TapChoice {
    Optimize,
    At(f64),
}

/// Config keys each command accepts besides `command`, `format` and `out`.
pub fn allowed_keys(command: &str) -> &'static [&'static str] {
    match command {
        "curve" => &["grid", "degraded"],
        "scheme" => &["T", "degraded"],
        "teleport" => &["r"],
        "mc" => &["T", "amp", "shots", "seed", "degraded"],
        "lossy" => &["eta", "T", "optimize"],
        "erasure" => &["p", "T", "optimize"],
        "noise-decision" => &["chi"],
        _ => &[],
    }
}

fn required<T>(v: Option<T>, key: &str, command: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{command} needs `{key}` (flag --{key} or config entry)")))
}

fn scheme(t: f64, degraded: Option<Degradation>) -> Result<FeedForwardScheme, CliError> {
    Ok(match degraded {
        Some(d) => FeedForwardScheme::degraded(t, d.detector_efficiency, d.visibility)?,
        None => FeedForwardScheme::ideal(t)?,
    })
}

fn tap(t: &Tap, cfg: &ConfigFile, command: &str) -> Result<TapChoice, CliError> {
    let value = cfg.merge(t.t, "T")?;
    let optimize = cfg.merge_flag(t.optimize, "optimize")?;
    match (optimize, value) {
        (true, None) => Ok(TapChoice::Optimize),
        (false, Some(v)) => Ok(TapChoice::At(v)),
        _ => Err(CliError::Usage(format!(
            "{command} needs exactly one of --optimize and --T"
        ))),
    }
}

/// Merges flags over the config file and checks every parameter domain.
pub fn resolve(command: &Command, cfg: &ConfigFile) -> Result<Job, CliError> {
    let name = command.name();
    let allowed = allowed_keys(name);
    if let Some(k) = cfg
        .keys()
        .find(|k| !matches!(*k, "command" | "format" | "out") && !allowed.contains(k))
    {
        return Err(CliError::Usage(format!("config key `{k}` does not apply to {name}")));
    }
    let job = match command {
        Command::Curve(a) => {
            let grid: Grid = required(cfg.merge(a.grid.clone(), "grid")?, "grid", name)?;
            let degraded = cfg.merge(a.degraded, "degraded")?;
            if let Some(d) = degraded {
                // validates the degradation once for the whole sweep
                scheme(0.5, Some(d))?;
            }
            Job::Curve { grid: grid.0, degraded }
        }
        Command::Scheme(a) => {
            let t = required(cfg.merge(a.t, "T")?, "T", name)?;
            Job::Scheme(scheme(t, cfg.merge(a.degraded, "degraded")?)?)
        }
        Command::Teleport(a) => Job::Teleport(TeleportationScheme::new(required(cfg.merge(a.r, "r")?, "r", name)?)?),
        Command::Mc(a) => {
            let t = required(cfg.merge(a.t, "T")?, "T", name)?;
            let Amplitude(x, p) = required(cfg.merge(a.amp, "amp")?, "amp", name)?;
            let shots = cfg.merge(a.shots, "shots")?.unwrap_or(DEFAULT_SHOTS);
            let seed = required(cfg.merge(a.seed, "seed")?, "seed", name)?;
            Job::Mc {
                scheme: scheme(t, cfg.merge(a.degraded, "degraded")?)?,
                amp: (x, p),
                shots,
                seed,
            }
        }
        Command::Lossy(a) => Job::Lossy {
            spec: LossyChannelSpec::new(required(cfg.merge(a.eta, "eta")?, "eta", name)?)?,
            tap: tap(&a.tap, cfg, name)?,
        },
        Command::Erasure(a) => Job::Erasure {
            spec: ErasureChannelSpec::new(required(cfg.merge(a.p, "p")?, "p", name)?)?,
            tap: tap(&a.tap, cfg, name)?,
        },
        Command::NoiseDecision(a) => Job::NoiseDecision(AdditiveNoiseSpec::new(required(
            cfg.merge(a.chi, "chi")?,
            "chi",
            name,
        )?)?),
    };
    Ok(job)
}

const POINT_COLUMNS: [&str; 5] = ["var_m", "var_n", "G", "F", "F_bound"];

fn point_cells(p: &TradeoffPoint) -> Result<Vec<Cell>, CliError> {
    let bound = tradeoff_bound(p.estimation_fidelity)?;
    Ok(vec![
        p.budget.var_m.into(),
        p.budget.var_n.into(),
        p.estimation_fidelity.into(),
        p.transfer_fidelity.into(),
        bound.into(),
    ])
}

const OPTIMIZE_COLUMNS: [&str; 8] = [
    "T_star",
    "F_star",
    "baseline",
    "improvement",
    "relative_improvement",
    "strategy",
    "T_interior",
    "F_interior",
];

fn optimize_cells(r: &OptimizationResult) -> Vec<Cell> {
    vec![
        r.t_star.into(),
        r.f_star.into(),
        r.baseline.into(),
        r.improvement.into(),
        r.relative_improvement.into(),
        r.strategy.to_string().into(),
        r.interior.x.into(),
        r.interior.value.into(),
    ]
}

fn with<const N: usize>(head: &[&'static str], tail: [&'static str; N]) -> Vec<&'static str> {
    head.iter().copied().chain(tail).collect()
}

pub fn run(job: &Job) -> Result<Table, CliError> {
    Ok(match job {
        Job::Curve { grid, degraded } => {
            let mut cols = with(&["T"], POINT_COLUMNS);
            if degraded.is_some() {
                cols.extend(["G_degraded", "F_degraded"]);
            }
            let mut table = Table::new("curve", &cols);
            for &t in grid {
                let mut row = vec![t.into()];
                row.extend(point_cells(&feedforward_point(t)?)?);
                if let Some(d) = degraded {
                    let p = scheme(t, Some(*d))?.point()?;
                    row.extend([p.estimation_fidelity.into(), p.transfer_fidelity.into()]);
                }
                table.push(row);
            }
            table
        }
        Job::Scheme(s) => {
            let mut table = Table::new(
                "scheme",
                &with(
                    &["T", "detector_efficiency", "visibility", "lambda", "kappa"],
                    POINT_COLUMNS,
                ),
            );
            let mut row: Vec<Cell> = vec![
                s.transmittance.into(),
                s.detector_efficiency.into(),
                s.visibility.into(),
                s.lambda.into(),
                s.kappa.into(),
            ];
            row.extend(point_cells(&s.point()?)?);
            table.push(row);
            table
        }
        Job::Teleport(s) => {
            let mut table = Table::new("teleport", &with(&["r"], POINT_COLUMNS));
            let mut row = vec![s.r.into()];
            row.extend(point_cells(&s.point()?)?);
            table.push(row);
            table
        }
        Job::Mc {
            scheme,
            amp,
            shots,
            seed,
        } => mc(scheme, *amp, *shots, *seed)?,
        Job::Lossy { spec, tap } => match tap {
            TapChoice::Optimize => {
                let mut table = Table::new("lossy", &with(&["eta"], OPTIMIZE_COLUMNS));
                let mut row = vec![spec.eta.into()];
                row.extend(optimize_cells(&spec.optimize()));
                table.push(row);
                table
            }
            TapChoice::At(t) => {
                let b = spec.hybrid_noise(*t)?;
                let f = spec.hybrid_fidelity(*t)?;
                let base = spec.amplifier_fidelity();
                let mut table = Table::new("lossy", &["eta", "T", "var_n", "F", "baseline", "improvement"]);
                table.push(vec![
                    spec.eta.into(),
                    (*t).into(),
                    b.var_n.into(),
                    f.into(),
                    base.into(),
                    (f - base).into(),
                ]);
                table
            }
        },
        Job::Erasure { spec, tap } => match tap {
            TapChoice::Optimize => {
                let mut table = Table::new("erasure", &with(&["p"], OPTIMIZE_COLUMNS));
                let mut row = vec![spec.p.into()];
                row.extend(optimize_cells(&spec.optimize()));
                table.push(row);
                table
            }
            TapChoice::At(t) => {
                let f = spec.fidelity(*t)?;
                let base = spec.p.max(0.5);
                let mut table = Table::new("erasure", &["p", "T", "F", "baseline", "improvement"]);
                table.push(vec![
                    spec.p.into(),
                    (*t).into(),
                    f.into(),
                    base.into(),
                    (f - base).into(),
                ]);
                table
            }
        },
        Job::NoiseDecision(spec) => {
            let d = spec.decide();
            let mut table = Table::new(
                "noise-decision",
                &["chi", "strategy", "quantum_fidelity", "classical_fidelity"],
            );
            table.push(vec![
                spec.chi.into(),
                d.strategy.to_string().into(),
                d.quantum_fidelity.into(),
                d.classical_fidelity.into(),
            ]);
            table
        }
    })
}

fn mc(scheme: &FeedForwardScheme, amp: (f64, f64), shots: usize, seed: u64) -> Result<Table, CliError> {
    if shots < 100 {
        return Err(CliError::Usage(format!("mc needs at least 100 shots, got {shots}")));
    }
    let batch = run_scheme(scheme, amp, shots, seed, Workers::from_env())?;
    let s = summarize(&batch)?;
    let analytic = scheme.point()?;
    let columns = [
        "T",
        "detector_efficiency",
        "visibility",
        "amp_x",
        "amp_p",
        "n_shots",
        "seed",
        "gain_defined",
        "gain_x",
        "gain_x_stderr",
        "gain_p",
        "gain_p_stderr",
        "var_n_x",
        "var_n_x_stderr",
        "var_n_p",
        "var_n_p_stderr",
        "var_n_hat",
        "var_n_hat_stderr",
        "var_m_hat",
        "var_m_hat_stderr",
        "F_hat",
        "F_hat_stderr",
        "G_hat",
        "G_hat_stderr",
        "var_n",
        "var_m",
        "F",
        "G",
    ];
    let mut table = Table::new("mc", &columns);
    let gain_defined = s.gain_x.is_some() && s.gain_p.is_some();
    let mut row: Vec<Cell> = vec![
        scheme.transmittance.into(),
        scheme.detector_efficiency.into(),
        scheme.visibility.into(),
        amp.0.into(),
        amp.1.into(),
        (s.n_shots as u64).into(),
        seed.into(),
        gain_defined.into(),
    ];
    for g in [s.gain_x, s.gain_p] {
        row.extend([g.map(|e| e.value).into(), g.map(|e| e.stderr).into()]);
    }
    for e in [s.var_n_x, s.var_n_p, s.var_n_hat, s.var_m_hat, s.f_hat, s.g_hat] {
        row.extend([e.value.into(), e.stderr.into()]);
    }
    row.extend([
        analytic.budget.var_n.into(),
        analytic.budget.var_m.into(),
        analytic.transfer_fidelity.into(),
        analytic.estimation_fidelity.into(),
    ]);
    table.push(row);
    Ok(table)
}
