//! Built-in parameter presets reproducing the library's reference figures:
//! eigenfunction densities at two times (fig1a, fig1b) and closed-form
//! transition probabilities across the three damping regimes for ground-
//! and second-excited-state initial conditions (fig2a-c, fig3a-c).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use dho_core::dynamics::{closed_form_n0, closed_form_n2};
use dho_core::spectrum::Coordinate;
use dho_core::wavefunction::sample_eigenfunction;
use dho_core::OscillatorParams;

use crate::error::CliError;
use crate::output::{resolve_output_path, write_table, Cell, Format, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureName {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3a,
    Fig3b,
    Fig3c,
}

pub const ALL_FIGURES: [FigureName; 8] = [
    FigureName::Fig1a,
    FigureName::Fig1b,
    FigureName::Fig2a,
    FigureName::Fig2b,
    FigureName::Fig2c,
    FigureName::Fig3a,
    FigureName::Fig3b,
    FigureName::Fig3c,
];

impl FigureName {
    pub fn as_str(&self) -> &'static str {
        match self {
            FigureName::Fig1a => "fig1a",
            FigureName::Fig1b => "fig1b",
            FigureName::Fig2a => "fig2a",
            FigureName::Fig2b => "fig2b",
            FigureName::Fig2c => "fig2c",
            FigureName::Fig3a => "fig3a",
            FigureName::Fig3b => "fig3b",
            FigureName::Fig3c => "fig3c",
        }
    }
}

impl FromStr for FigureName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_FIGURES
            .iter()
            .find(|f| f.as_str() == s)
            .copied()
            .ok_or_else(|| {
                format!(
                    "unknown figure '{s}'; expected one of fig1a, fig1b, fig2a, fig2b, fig2c, \
                     fig3a, fig3b, fig3c"
                )
            })
    }
}

impl std::fmt::Display for FigureName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Wavefunction presets: omega = 1, alpha = 0.005, hbar = 1, K = 1/(2 alpha).
fn wavefunction_figure(t: f64, x_min: f64, x_max: f64) -> Result<Table, CliError> {
    let p = OscillatorParams::new(0.005, 1.0).map_err(CliError::domain)?;
    let grid = linspace(x_min, x_max, 4001);
    let mut rows = Vec::with_capacity(2 * grid.len());
    for n in [0usize, 1] {
        let sample =
            sample_eigenfunction(&p, n, Coordinate::T, t, &grid).map_err(CliError::domain)?;
        for (&x, value) in sample.x().iter().zip(sample.values()) {
            rows.push(vec![
                Cell::Int(n as i64),
                Cell::Float(x),
                Cell::Float(value.re),
                Cell::Float(value.im),
                Cell::Float(value.norm_sqr()),
            ]);
        }
    }
    Ok(Table {
        columns: vec!["n", "x", "re", "im", "prob"],
        rows,
    })
}

/// Closed-form transition-probability presets: omega = 1, m in {0, 2, 4, 6},
/// 2001 sample times over [0, 15].
fn amplitude_figure(alpha: f64, initial_n: usize) -> Result<Table, CliError> {
    let p = OscillatorParams::new(alpha, 1.0).map_err(CliError::domain)?;
    let closed_form = match initial_n {
        0 => closed_form_n0,
        2 => closed_form_n2,
        _ => unreachable!("presets only use n = 0 and n = 2"),
    };
    let times = linspace(0.0, 15.0, 2001);
    let mut rows = Vec::with_capacity(4 * times.len());
    for &t in &times {
        for m in [0usize, 2, 4, 6] {
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
    Ok(Table {
        columns: vec!["t", "m", "re_c", "im_c", "prob"],
        rows,
    })
}

/// The exact data behind one figure preset.
pub fn figure_table(name: FigureName) -> Result<Table, CliError> {
    match name {
        FigureName::Fig1a => wavefunction_figure(0.0, -30.0, 30.0),
        FigureName::Fig1b => wavefunction_figure(250.0, -10.0, 10.0),
        FigureName::Fig2a => amplitude_figure(0.75, 0),
        FigureName::Fig2b => amplitude_figure(1.0, 0),
        FigureName::Fig2c => amplitude_figure(2.0, 0),
        FigureName::Fig3a => amplitude_figure(0.75, 2),
        FigureName::Fig3b => amplitude_figure(1.0, 2),
        FigureName::Fig3c => amplitude_figure(2.0, 2),
    }
}

/// Render one preset to `<dir>/<name>.csv` and return the path written.
pub fn write_figure(name: FigureName, dir: Option<&Path>) -> Result<(PathBuf, usize), CliError> {
    let table = figure_table(name)?;
    let file = PathBuf::from(format!("{name}.csv"));
    let path = match dir {
        Some(d) => d.join(file),
        None => resolve_output_path(&file),
    };
    write_table(&path, &table, Format::Csv)?;
    Ok((path, table.rows.len()))
}
