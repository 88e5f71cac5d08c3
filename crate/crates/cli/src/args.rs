use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cvtradeoff",
    version,
    about = "Estimation/transfer fidelity tradeoff for coherent states"
)]
pub struct Cli {
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output format; defaults to the `--out` extension, else csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tradeoff curve of the feed-forward scheme over a grid of tap transmittances.
    Curve(CurveArgs),
    /// Noise budget and fidelities of the feed-forward scheme at one tap setting.
    Scheme(SchemeArgs),
    /// Teleportation with a finite-squeezing resource.
    Teleport(TeleportArgs),
    /// Seeded shot-level simulation of the feed-forward scheme.
    Mc(McArgs),
    /// Lossy channel: partial estimation vs. amplification.
    Lossy(LossyArgs),
    /// Erasure channel: partial estimation vs. pure strategies.
    Erasure(ErasureArgs),
    /// Additive classical noise: send quantum or classical.
    NoiseDecision(NoiseArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curve(_) => "curve",
            Command::Scheme(_) => "scheme",
            Command::Teleport(_) => "teleport",
            Command::Mc(_) => "mc",
            Command::Lossy(_) => "lossy",
            Command::Erasure(_) => "erasure",
            Command::NoiseDecision(_) => "noise-decision",
        }
    }

    /// Command with no flags set, for runs driven entirely by a config file.
    pub fn empty(name: &str) -> Option<Command> {
        Some(match name {
            "curve" => Command::Curve(Default::default()),
            "scheme" => Command::Scheme(Default::default()),
            "teleport" => Command::Teleport(Default::default()),
            "mc" => Command::Mc(Default::default()),
            "lossy" => Command::Lossy(Default::default()),
            "erasure" => Command::Erasure(Default::default()),
            "noise-decision" => Command::NoiseDecision(Default::default()),
            _ => return None,
        })
    }
}

#[derive(Debug, Default, Args)]
pub struct CurveArgs {
    /// `start:stop:step` or a comma list, all inside (0, 1).
    #[arg(long)]
    pub grid: Option<Grid>,
    /// Detector efficiency and visibility, `ed,v`.
    #[arg(long)]
    pub degraded: Option<Degradation>,
}

#[derive(Debug, Default, Args)]
pub struct SchemeArgs {
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub degraded: Option<Degradation>,
}

#[derive(Debug, Default, Args)]
pub struct TeleportArgs {
    /// Squeezing parameter of the resource.
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct McArgs {
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Input amplitude `x,p`.
    #[arg(long, allow_hyphen_values = true)]
    pub amp: Option<Amplitude>,
    #[arg(long)]
    pub shots: Option<usize>,
    /// Required; there is no time-based default.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub degraded: Option<Degradation>,
}

#[derive(Debug, Default, Args)]
pub struct LossyArgs {
    /// Channel transmission.
    #[arg(long)]
    pub eta: Option<f64>,
    #[command(flatten)]
    pub tap: Tap,
}

#[derive(Debug, Default, Args)]
pub struct ErasureArgs {
    /// Probability that the quantum state arrives.
    #[arg(long)]
    pub p: Option<f64>,
    #[command(flatten)]
    pub tap: Tap,
}

#[derive(Debug, Default, Args)]
pub struct Tap {
    /// Search for the best tap transmittance.
    #[arg(long, conflicts_with = "t")]
    pub optimize: bool,
    /// Evaluate at this tap transmittance.
    #[arg(long = "T")]
    pub t: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct NoiseArgs {
    /// Added noise in shot-noise units.
    #[arg(long)]
    pub chi: Option<f64>,
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("{what}: `{}` is not a number", v.trim()))
        })
        .collect()
}

/// Tap transmittances to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

const MAX_GRID_POINTS: usize = 10_000_000;

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let points = if s.contains(':') {
            let parts = s
                .split(':')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>();
            let [start, stop, step] = parts
                .ok()
                .and_then(|p| <[f64; 3]>::try_from(p).ok())
                .ok_or_else(|| format!("grid `{s}`: expected start:stop:step"))?;
            if step.is_nan() || step <= 0.0 || stop.is_nan() || start.is_nan() || stop < start {
                return Err(format!("grid `{s}`: need step > 0 and stop ≥ start"));
            }
            let span = (stop - start) / step;
            let n = (span + 1e-9).floor() + 1.0;
            if n > MAX_GRID_POINTS as f64 {
                return Err(format!("grid `{s}`: more than {MAX_GRID_POINTS} points"));
            }
            (0..n as usize).map(|i| start + i as f64 * step).collect()
        } else {
            parse_list(s, "grid")?
        };
        if let Some(bad) = points.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(format!("grid `{s}`: {bad} is outside (0, 1)"));
        }
        Ok(Grid(points))
    }
}

/// Detector efficiency and mode-matching visibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degradation {
    pub detector_efficiency: f64,
    pub visibility: f64,
}

impl FromStr for Degradation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match parse_list(s, "degraded")?[..] {
            [detector_efficiency, visibility] => Ok(Degradation {
                detector_efficiency,
                visibility,
            }),
            _ => Err(format!("degraded `{s}`: expected `efficiency,visibility`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude(pub f64, pub f64);

impl FromStr for Amplitude {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match parse_list(s, "amp")?[..] {
            [x, p] if x.is_finite() && p.is_finite() => Ok(Amplitude(x, p)),
            _ => Err(format!("amp `{s}`: expected two finite numbers `x,p`")),
        }
    }
}
