//! One module per experiment subcommand. Each exposes its parameter
//! vocabulary with defaults and a `run(params, out) -> artifact list`.

pub mod classify;
pub mod dispersion;
pub mod entropy;
pub mod frozen;
pub mod moments;
pub mod plot;
pub mod toy;
pub mod wkb;

use std::path::Path;

use crate::config::Params;
use crate::CliError;

/// Default parameter values per subcommand; required parameters without a
/// sensible default (like the matrix to classify) are absent here and listed
/// only in the module's KNOWN set.
pub fn defaults(name: &str) -> Result<&'static [(&'static str, &'static str)], CliError> {
    Ok(match name {
        "classify" => classify::DEFAULTS,
        "moments" => moments::DEFAULTS,
        "wkb" => wkb::DEFAULTS,
        "toy-det" => toy::DET_DEFAULTS,
        "toy-sc" => toy::SC_DEFAULTS,
        "toy-mc" => toy::MC_DEFAULTS,
        "dispersion" => dispersion::DEFAULTS,
        "frozen" => frozen::DEFAULTS,
        "entropy" => entropy::DEFAULTS,
        other => {
            return Err(CliError::Config(format!("unknown subcommand {other:?}")));
        }
    })
}

pub fn run(name: &str, params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    match name {
        "classify" => classify::run(params, out),
        "moments" => moments::run(params, out),
        "wkb" => wkb::run(params, out),
        "toy-det" => toy::run_det(params, out),
        "toy-sc" => toy::run_sc(params, out),
        "toy-mc" => toy::run_mc(params, out),
        "dispersion" => dispersion::run(params, out),
        "frozen" => frozen::run(params, out),
        "entropy" => entropy::run(params, out),
        other => Err(CliError::Config(format!("unknown subcommand {other:?}"))),
    }
}

/// Uniform grid with n points from lo to hi inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}
