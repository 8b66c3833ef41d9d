//! Run configuration: CLI flags, the JSON config file, and their merge.
//!
//! A config file can stand in for any flag; explicitly passed flags win on
//! conflict. All parameters live in one flat map so the same schema serves
//! every command.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "dho",
    about = "Damped harmonic oscillator quantization via an exponential time warp",
    version
)]
pub struct Cli {
    /// JSON run configuration; explicitly passed flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output file path (default depends on the command).
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    #[command(subcommand)]
    pub command: Option<CommandArg>,
}

#[derive(Subcommand, Debug)]
pub enum CommandArg {
    /// Energy levels over a range of times in either coordinate.
    Spectrum(SpectrumArgs),
    /// Eigenfunction samples on a position grid.
    Wavefunction(WavefunctionArgs),
    /// Adaptive ODE evolution of the transition amplitudes.
    Evolve(EvolveArgs),
    /// Closed-form transition amplitudes (initial mode 0 or 2).
    Closedform(ClosedformArgs),
    /// RCSJ qubit mapping: frequencies, spectra and critical resistance.
    Qubit(QubitArgs),
    /// Rebuild the data behind a built-in figure preset.
    Figure(FigureArgs),
}

impl CommandArg {
    pub fn name(&self) -> &'static str {
        match self {
            CommandArg::Spectrum(_) => "spectrum",
            CommandArg::Wavefunction(_) => "wavefunction",
            CommandArg::Evolve(_) => "evolve",
            CommandArg::Closedform(_) => "closedform",
            CommandArg::Qubit(_) => "qubit",
            CommandArg::Figure(_) => "figure",
        }
    }

    pub fn params(&self) -> Params {
        match self {
            CommandArg::Spectrum(a) => a.to_params(),
            CommandArg::Wavefunction(a) => a.to_params(),
            CommandArg::Evolve(a) => a.to_params(),
            CommandArg::Closedform(a) => a.to_params(),
            CommandArg::Qubit(a) => a.to_params(),
            CommandArg::Figure(a) => a.to_params(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateArg {
    T,
    Tau,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Phase,
    Flux,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitsArg {
    Reduced,
    Si,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Warp constant K (default 1/(2 alpha)).
    #[arg(long = "warp-k")]
    pub warp_k: Option<f64>,
    /// Highest quantum number to list.
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    #[arg(long, value_enum)]
    pub coordinate: Option<CoordinateArg>,
    /// Start of the time range.
    #[arg(long)]
    pub from: Option<f64>,
    /// End of the time range.
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of sample times.
    #[arg(long)]
    pub points: Option<usize>,
}

impl SpectrumArgs {
    fn to_params(&self) -> Params {
        Params {
            alpha: self.alpha,
            omega: self.omega,
            hbar: self.hbar,
            warp_k: self.warp_k,
            n_max: self.n_max,
            coordinate: self.coordinate,
            from: self.from,
            to: self.to,
            points: self.points,
            ..Params::default()
        }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct WavefunctionArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long = "warp-k")]
    pub warp_k: Option<f64>,
    /// Quantum number of the eigenfunction.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub coordinate: Option<CoordinateArg>,
    /// Time value in the chosen coordinate.
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long = "x-min")]
    pub x_min: Option<f64>,
    #[arg(long = "x-max")]
    pub x_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
}

impl WavefunctionArgs {
    fn to_params(&self) -> Params {
        Params {
            alpha: self.alpha,
            omega: self.omega,
            hbar: self.hbar,
            warp_k: self.warp_k,
            n: self.n,
            coordinate: self.coordinate,
            time: self.time,
            x_min: self.x_min,
            x_max: self.x_max,
            points: self.points,
            ..Params::default()
        }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct EvolveArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long = "warp-k")]
    pub warp_k: Option<f64>,
    /// Initial Fock mode n0.
    #[arg(long = "initial-n", visible_alias = "n")]
    pub initial_n: Option<usize>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Number of sample times over [0, t-end].
    #[arg(long)]
    pub points: Option<usize>,
    /// Truncation order M of the coefficient vector.
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
}

impl EvolveArgs {
    fn to_params(&self) -> Params {
        Params {
            alpha: self.alpha,
            omega: self.omega,
            hbar: self.hbar,
            warp_k: self.warp_k,
            initial_n: self.initial_n,
            t_end: self.t_end,
            points: self.points,
            modes: self.modes,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..Params::default()
        }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct ClosedformArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Initial Fock mode (0 or 2).
    #[arg(long = "initial-n", visible_alias = "n")]
    pub initial_n: Option<usize>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Highest mode index to report.
    #[arg(long = "m-max")]
    pub m_max: Option<usize>,
}

impl ClosedformArgs {
    fn to_params(&self) -> Params {
        Params {
            alpha: self.alpha,
            omega: self.omega,
            initial_n: self.initial_n,
            t_end: self.t_end,
            points: self.points,
            m_max: self.m_max,
            ..Params::default()
        }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct QubitArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, value_enum, visible_alias = "unit")]
    pub units: Option<UnitsArg>,
    #[arg(long)]
    pub capacitance: Option<f64>,
    #[arg(long)]
    pub resistance: Option<f64>,
    #[arg(long = "critical-current")]
    pub critical_current: Option<f64>,
    /// Bias current I (phase qubit).
    #[arg(long = "bias-current")]
    pub bias_current: Option<f64>,
    /// Loop inductance L (flux qubit).
    #[arg(long)]
    pub inductance: Option<f64>,
    /// Dimensionless external flux parameter (flux qubit).
    #[arg(long = "delta-x")]
    pub delta_x: Option<f64>,
    /// Highest level of the reported ladder.
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Time at which the ladder is evaluated.
    #[arg(long)]
    pub time: Option<f64>,
    /// Warp constant K (default 1/alpha_decay = CR).
    #[arg(long = "warp-k")]
    pub warp_k: Option<f64>,
}

impl QubitArgs {
    fn to_params(&self) -> Params {
        Params {
            kind: self.kind,
            units: self.units,
            capacitance: self.capacitance,
            resistance: self.resistance,
            critical_current: self.critical_current,
            bias_current: self.bias_current,
            inductance: self.inductance,
            delta_x: self.delta_x,
            n_max: self.n_max,
            time: self.time,
            warp_k: self.warp_k,
            ..Params::default()
        }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct FigureArgs {
    /// Preset name: fig1a, fig1b, fig2a, fig2b, fig2c, fig3a, fig3b, fig3c.
    pub name: Option<String>,
}

impl FigureArgs {
    fn to_params(&self) -> Params {
        Params {
            figure: self.name.clone(),
            ..Params::default()
        }
    }
}

/// The flat parameter map shared by all commands and the config file.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub alpha: Option<f64>,
    pub omega: Option<f64>,
    pub hbar: Option<f64>,
    pub warp_k: Option<f64>,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub initial_n: Option<usize>,
    pub coordinate: Option<CoordinateArg>,
    pub time: Option<f64>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub t_end: Option<f64>,
    pub m_max: Option<usize>,
    pub modes: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub kind: Option<KindArg>,
    pub units: Option<UnitsArg>,
    pub capacitance: Option<f64>,
    pub resistance: Option<f64>,
    pub critical_current: Option<f64>,
    pub bias_current: Option<f64>,
    pub inductance: Option<f64>,
    pub delta_x: Option<f64>,
    pub figure: Option<String>,
}

macro_rules! merge_fields {
    ($dst:expr, $src:expr, $($field:ident),+ $(,)?) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.clone(); } )+
    };
}

impl Params {
    /// Fill unset fields from `fallback` (flags win on conflict).
    pub fn merged_over(mut self, fallback: &Params) -> Params {
        merge_fields!(
            self, fallback, alpha, omega, hbar, warp_k, n, n_max, initial_n, coordinate, time,
            from, to, points, x_min, x_max, t_end, m_max, modes, rel_tol, abs_tol, kind, units,
            capacitance, resistance, critical_current, bias_current, inductance, delta_x, figure,
        );
        self
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<FormatArg>,
}

/// On-disk JSON run configuration.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub params: Params,
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::schema(format!(
                "invalid config {}: {e} (line {}, column {})",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }
}

/// A fully merged, still-unvalidated run: command name, flat parameters,
/// output path and format (`None` format = per-command default).
#[derive(Clone, Debug)]
pub struct ResolvedRun {
    pub command: String,
    pub params: Params,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Merge CLI arguments with the optional config file; flags win on conflict.
pub fn resolve(cli: &Cli) -> Result<ResolvedRun, CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let command = match (&cli.command, &config.command) {
        (Some(c), _) => c.name().to_string(),
        (None, Some(name)) => name.clone(),
        (None, None) => {
            return Err(CliError::schema(
                "no command given; pass a subcommand or a config file with a 'command' entry",
            ))
        }
    };
    let params = match &cli.command {
        Some(c) => c.params().merged_over(&config.params),
        None => config.params.clone(),
    };
    let output = cli.output.clone().or(config.output.path);
    let format = cli.format.or(config.output.format).map(Format::from);
    Ok(ResolvedRun {
        command,
        params,
        output,
        format,
    })
}
