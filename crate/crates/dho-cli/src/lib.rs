//! Command-line surface for the damped-oscillator time-warp library:
//! spectra, wavefunctions, amplitude evolution, closed forms, the RCSJ qubit
//! mapping and reproducible figure presets, exported as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;

pub use commands::{execute, Summary};
pub use config::{resolve, Cli};
pub use error::CliError;

/// Parse-free entry point used by the binary: merge config and flags, then
/// run the requested command.
pub fn run(cli: &Cli) -> Result<Summary, CliError> {
    let resolved = config::resolve(cli)?;
    commands::execute(resolved)
}
