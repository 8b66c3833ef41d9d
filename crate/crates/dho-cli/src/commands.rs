//! Command execution: validate merged parameters, run the owning module and
//! write deterministic output.

use std::path::PathBuf;

use serde::Serialize;

use dho_core::dynamics::{
    self, classify_regime, closed_form_n0, closed_form_n2, integrate, IntegrateOptions,
};
use dho_core::qubits::{self, QubitKind, RcsjParams, UnitSystem};
use dho_core::spectrum::{spectrum_rows, Coordinate};
use dho_core::timewarp::OscillatorParams;
use dho_core::wavefunction::sample_eigenfunction;

use crate::config::{CoordinateArg, KindArg, Params, ResolvedRun, UnitsArg};
use crate::error::CliError;
use crate::figures::FigureName;
use crate::output::{resolve_output_path, write_table, write_text, Cell, Format, Table};

/// What a finished run reports on standard output.
pub struct Summary {
    pub path: PathBuf,
    pub rows: usize,
    pub note: Option<String>,
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "wrote {} rows to {}", self.rows, self.path.display())?;
        if let Some(note) = &self.note {
            write!(f, "\n{note}")?;
        }
        Ok(())
    }
}

fn require<T: Copy>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::schema(format!("missing required parameter '{name}'")))
}

fn finite(value: f64, name: &str) -> Result<f64, CliError> {
    if !value.is_finite() {
        return Err(CliError::schema(format!(
            "parameter '{name}' must be finite, got {value}"
        )));
    }
    Ok(value)
}

fn oscillator_from(params: &Params) -> Result<OscillatorParams, CliError> {
    let alpha = finite(require(params.alpha, "alpha")?, "alpha")?;
    let omega = finite(require(params.omega, "omega")?, "omega")?;
    let hbar = finite(params.hbar.unwrap_or(1.0), "hbar")?;
    match params.warp_k {
        Some(k) => OscillatorParams::with_constants(alpha, omega, hbar, finite(k, "warp_k")?),
        None => {
            if hbar == 1.0 {
                OscillatorParams::new(alpha, omega)
            } else {
                if alpha <= 0.0 {
                    return Err(CliError::schema(
                        "the default warp constant K = 1/(2 alpha) needs alpha > 0",
                    ));
                }
                OscillatorParams::with_constants(alpha, omega, hbar, 1.0 / (2.0 * alpha))
            }
        }
    }
    .map_err(CliError::domain)
}

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 {
        return Err(CliError::schema(format!(
            "need at least 2 sample points, got {n}"
        )));
    }
    if !(b > a) {
        return Err(CliError::schema(format!(
            "range must be non-empty and increasing, got [{a}, {b}]"
        )));
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

pub fn execute(run: ResolvedRun) -> Result<Summary, CliError> {
    match run.command.as_str() {
        "spectrum" => spectrum_command(&run),
        "wavefunction" => wavefunction_command(&run),
        "evolve" => evolve_command(&run),
        "closedform" => closedform_command(&run),
        "qubit" => qubit_command(&run),
        "figure" => figure_command(&run),
        other => Err(CliError::schema(format!(
            "unknown command '{other}'; expected spectrum, wavefunction, evolve, closedform, \
             qubit or figure"
        ))),
    }
}

fn table_output(
    run: &ResolvedRun,
    table: Table,
    default_name: &str,
    note: Option<String>,
) -> Result<Summary, CliError> {
    let format = run.format.unwrap_or(Format::Csv);
    let name = match format {
        Format::Csv => format!("{default_name}.csv"),
        Format::Json => format!("{default_name}.json"),
    };
    let path = resolve_output_path(&run.output.clone().unwrap_or_else(|| PathBuf::from(name)));
    write_table(&path, &table, format)?;
    Ok(Summary {
        path,
        rows: table.rows.len(),
        note,
    })
}

fn spectrum_command(run: &ResolvedRun) -> Result<Summary, CliError> {
    let params = &run.params;
    let p = oscillator_from(params)?;
    let n_max = params.n_max.unwrap_or(5);
    let coordinate = match params.coordinate.unwrap_or(CoordinateArg::T) {
        CoordinateArg::T => Coordinate::T,
        CoordinateArg::Tau => Coordinate::Tau,
    };
    let default_from = match coordinate {
        Coordinate::T => 0.0,
        Coordinate::Tau => p.warp_constant(),
    };
    let from = params.from.unwrap_or(default_from);
    let to = params.to.unwrap_or(from + 10.0);
    let times = linspace(from, to, params.points.unwrap_or(201))?;
    let rows = spectrum_rows(&p, n_max, coordinate, &times).map_err(CliError::domain)?;
    let table = Table {
        columns: vec!["t_or_tau", "n", "energy"],
        rows: rows
            .iter()
            .map(|level| {
                vec![
                    Cell::Float(level.at),
                    Cell::Int(level.n as i64),
                    Cell::Float(level.value),
                ]
            })
            .collect(),
    };
    table_output(run, table, "spectrum", None)
}

fn wavefunction_command(run: &ResolvedRun) -> Result<Summary, CliError> {
    let params = &run.params;
    let p = oscillator_from(params)?;
    let n = params.n.unwrap_or(0);
    let coordinate = match params.coordinate.unwrap_or(CoordinateArg::T) {
        CoordinateArg::T => Coordinate::T,
        CoordinateArg::Tau => Coordinate::Tau,
    };
    let time = params.time.unwrap_or(match coordinate {
        Coordinate::T => 0.0,
        Coordinate::Tau => p.warp_constant(),
    });
    let grid = linspace(
        params.x_min.unwrap_or(-10.0),
        params.x_max.unwrap_or(10.0),
        params.points.unwrap_or(2001),
    )?;
    let sample =
        sample_eigenfunction(&p, n, coordinate, time, &grid).map_err(CliError::domain)?;
    let table = Table {
        columns: vec!["x", "re", "im", "prob"],
        rows: sample
            .x()
            .iter()
            .zip(sample.values())
            .map(|(&x, v)| {
                vec![
                    Cell::Float(x),
                    Cell::Float(v.re),
                    Cell::Float(v.im),
                    Cell::Float(v.norm_sqr()),
                ]
            })
            .collect(),
    };
    table_output(run, table, "wavefunction", None)
}

fn evolve_command(run: &ResolvedRun) -> Result<Summary, CliError> {
    let params = &run.params;
    let p = oscillator_from(params)?;
    let initial_n = params.initial_n.unwrap_or(0);
    let t_end = finite(params.t_end.unwrap_or(20.0), "t_end")?;
    let times = linspace(0.0, t_end, params.points.unwrap_or(2001))?;
    let opts = IntegrateOptions {
        truncation: params.modes.unwrap_or(dynamics::DEFAULT_TRUNCATION),
        rel_tol: params.rel_tol.unwrap_or(1e-9),
        abs_tol: params.abs_tol.unwrap_or(1e-12),
        ..Default::default()
    };
    let trajectory = integrate(&p, initial_n, &times, &opts).map_err(CliError::domain)?;
    let mut rows = Vec::with_capacity(trajectory.len() * (opts.truncation + 1));
    for state in &trajectory {
        for m in 0..=state.truncation() {
            let c = state.amplitude(m);
            rows.push(vec![
                Cell::Float(state.time()),
                Cell::Int(m as i64),
                Cell::Float(c.re),
                Cell::Float(c.im),
                Cell::Float(c.norm_sqr()),
            ]);
        }
    }
    let last = trajectory.last().expect("non-empty trajectory");
    let note = format!(
        "final norm {:.12}; tail estimate {:.3e}{}",
        last.norm_sq(),
        last.tail_estimate(),
        if last.tail_flagged() {
            " (tail flagged: truncation affects late samples)"
        } else {
            ""
        }
    );
    let table = Table {
        columns: vec!["t", "m", "re_c", "im_c", "prob"],
        rows,
    };
    table_output(run, table, "evolve", Some(note))
}

fn closedform_command(run: &ResolvedRun) -> Result<Summary, CliError> {
    let params = &run.params;
    let p = oscillator_from(params)?;
    let initial_n = params.initial_n.unwrap_or(0);
    let closed_form = match initial_n {
        0 => closed_form_n0,
        2 => closed_form_n2,
        other => {
            return Err(CliError::schema(format!(
                "closed forms exist for initial modes 0 and 2, got {other}"
            )))
        }
    };
    let t_end = finite(params.t_end.unwrap_or(15.0), "t_end")?;
    let times = linspace(0.0, t_end, params.points.unwrap_or(2001))?;
    let m_max = params.m_max.unwrap_or(20);
    let mut rows = Vec::new();
    for &t in &times {
        // Odd modes vanish identically and are omitted.
        for m in (0..=m_max).step_by(2) {
            let c = closed_form(&p, m, t).map_err(CliError::domain)?;
            rows.push(vec![
                Cell::Float(t),
                Cell::Int(m as i64),
                Cell::Float(c.re),
                Cell::Float(c.im),
                Cell::Float(c.norm_sqr()),
            ]);
        }
    }
    let note = format!("damping regime: {}", classify_regime(&p));
    let table = Table {
        columns: vec!["t", "m", "re_c", "im_c", "prob"],
        rows,
    };
    table_output(run, table, "closedform", Some(note))
}

#[derive(Serialize)]
struct QubitReport {
    kind: String,
    unit_system: String,
    omega_p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_f: Option<f64>,
    decay_rate: f64,
    displacement: f64,
    energy_offset: f64,
    small_angle_ok: bool,
    critical_resistance: f64,
    mapped_alpha: f64,
    mapped_regime: String,
    warp_constant: f64,
    energies: Vec<QubitLevel>,
}

#[derive(Serialize)]
struct QubitLevel {
    n: usize,
    t: f64,
    energy: f64,
}

fn qubit_command(run: &ResolvedRun) -> Result<Summary, CliError> {
    let params = &run.params;
    let kind = require(params.kind, "kind")?;
    let units = match params.units.unwrap_or(UnitsArg::Reduced) {
        UnitsArg::Reduced => UnitSystem::Reduced,
        UnitsArg::Si => UnitSystem::Si,
    };
    let capacitance = require(params.capacitance, "capacitance")?;
    let resistance = require(params.resistance, "resistance")?;
    let critical_current = require(params.critical_current, "critical_current")?;
    let q = match kind {
        KindArg::Phase => RcsjParams::phase(
            capacitance,
            resistance,
            critical_current,
            params.bias_current.unwrap_or(0.0),
            units,
        ),
        KindArg::Flux => RcsjParams::flux(
            capacitance,
            resistance,
            critical_current,
            require(params.inductance, "inductance")?,
            params.delta_x.unwrap_or(0.0),
            units,
        ),
    }
    .map_err(CliError::domain)?;

    let (map, core) = qubits::map_to_oscillator(&q).map_err(CliError::domain)?;
    let warp_constant = params.warp_k.unwrap_or(1.0 / map.decay_rate);
    let t = params.time.unwrap_or(0.0);
    let n_max = params.n_max.unwrap_or(3);
    let mut energies = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let energy = match q.kind() {
            QubitKind::Phase => qubits::energy_phase(&q, n, t, warp_constant),
            QubitKind::Flux => qubits::energy_flux(&q, n, t, warp_constant),
        }
        .map_err(CliError::domain)?;
        energies.push(QubitLevel { n, t, energy });
    }
    let critical_resistance = match q.kind() {
        QubitKind::Phase => qubits::critical_resistance_phase(&q),
        QubitKind::Flux => qubits::critical_resistance_flux(&q).map_err(CliError::domain)?,
    };
    let si_caveat = match units {
        UnitSystem::Si => {
            "\nnote: the constant offset mixes a squared frequency with a dimensionless \
             shift and is only dimensionally consistent in reduced units; in SI it \
             dominates the ladder and should be treated as bookkeeping"
        }
        UnitSystem::Reduced => "",
    };
    let report = QubitReport {
        kind: q.kind().to_string(),
        unit_system: match units {
            UnitSystem::Reduced => "reduced".into(),
            UnitSystem::Si => "si".into(),
        },
        omega_p: qubits::omega_p(&q),
        omega_f: match q.kind() {
            QubitKind::Flux => Some(qubits::omega_f(&q).map_err(CliError::domain)?),
            QubitKind::Phase => None,
        },
        decay_rate: map.decay_rate,
        displacement: map.displacement,
        energy_offset: map.energy_offset,
        small_angle_ok: map.small_angle_ok,
        critical_resistance,
        mapped_alpha: core.alpha(),
        mapped_regime: classify_regime(&core).to_string(),
        warp_constant,
        energies,
    };

    match run.format.unwrap_or(Format::Json) {
        Format::Json => {
            let path = resolve_output_path(
                &run.output.clone().unwrap_or_else(|| PathBuf::from("qubit.json")),
            );
            let mut text =
                serde_json::to_string_pretty(&report).expect("report serialization is infallible");
            text.push('\n');
            write_text(&path, &text)?;
            Ok(Summary {
                path,
                rows: report.energies.len(),
                note: Some(format!(
                    "omega_p {:.6e}; critical resistance {:.6e}; mapped regime {}{si_caveat}",
                    report.omega_p, report.critical_resistance, report.mapped_regime
                )),
            })
        }
        Format::Csv => {
            let table = Table {
                columns: vec!["n", "t", "energy"],
                rows: report
                    .energies
                    .iter()
                    .map(|level| {
                        vec![
                            Cell::Int(level.n as i64),
                            Cell::Float(level.t),
                            Cell::Float(level.energy),
                        ]
                    })
                    .collect(),
            };
            table_output(
                run,
                table,
                "qubit",
                Some(format!(
                    "omega_p {:.6e}; critical resistance {:.6e}; mapped regime {}{si_caveat}",
                    report.omega_p, report.critical_resistance, report.mapped_regime
                )),
            )
        }
    }
}

fn figure_command(run: &ResolvedRun) -> Result<Summary, CliError> {
    let name_str = run
        .params
        .figure
        .clone()
        .ok_or_else(|| CliError::schema("missing figure name"))?;
    let name: FigureName = name_str.parse().map_err(CliError::Schema)?;
    let table = crate::figures::figure_table(name)?;
    let default = PathBuf::from(format!("{name}.csv"));
    let path = resolve_output_path(&run.output.clone().unwrap_or(default));
    write_table(&path, &table, run.format.unwrap_or(Format::Csv))?;
    Ok(Summary {
        path,
        rows: table.rows.len(),
        note: None,
    })
}
