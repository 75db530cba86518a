//! frozen: decay of the collision-rate functional along collisionless free
//! flows, fitted against the predicted exponent for the kernel power gamma.

use std::path::Path;

use homoflow::frozen::{collision_rate_decay, PredictedDecay, VelocityProfile};

use crate::cmds::linspace;
use crate::config::Params;
use crate::output::{Csv, Report};
use crate::CliError;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("profile", "maxwellian"),
    ("sx", "0.7071067811865476"),
    ("sy", "0.7071067811865476"),
    ("sz", "0.7071067811865476"),
    ("radius", "1"),
    ("gamma", "0"),
    ("tau_max", "12"),
    ("n_tau", "25"),
];
const KNOWN: &[&str] = &[
    "profile", "sx", "sy", "sz", "radius", "gamma", "tau_max", "n_tau",
];

pub fn velocity_profile(params: &Params) -> Result<VelocityProfile, CliError> {
    Ok(match params.raw("profile")? {
        "maxwellian" => VelocityProfile::maxwellian(),
        "gaussian" => VelocityProfile::gaussian(
            params.f64("sx")?,
            params.f64("sy")?,
            params.f64("sz")?,
        )?,
        "bump" => VelocityProfile::bump(params.f64("radius")?)?,
        other => {
            return Err(CliError::Config(format!(
                "parameter \"profile\": expected maxwellian, gaussian, or bump, got {other:?}"
            )));
        }
    })
}

pub fn run(params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    params.check_known(KNOWN)?;
    let profile = velocity_profile(params)?;
    let gamma = params.f64("gamma")?;
    let tau_max = params.f64("tau_max")?;
    let n_tau = params.usize("n_tau")?;
    if !(tau_max > 0.0) || n_tau < 5 {
        return Err(CliError::Config(format!(
            "parameter \"tau_max\"/\"n_tau\": need tau_max > 0 and at least 5 grid points, \
             got {tau_max} and {n_tau}"
        )));
    }

    let grid = linspace(0.0, tau_max, n_tau);
    let decay = collision_rate_decay(&profile, gamma, &grid)?;

    // the logarithmic boundary case decays like tau e^{-tau}; its CSV slope
    // column carries the e-folding part
    let (predicted_slope, predicted_label) = match decay.predicted {
        PredictedDecay::Exponent(e) => (e, format!("exp({e} tau)")),
        PredictedDecay::Logarithmic => (-1.0, "tau exp(-tau)".to_string()),
    };

    let mut csv = Csv::new("frozen.csv", &["tau", "rate", "fitted_slope", "predicted_slope"]);
    for (n, tau) in decay.taus.iter().enumerate() {
        csv.number_row(&[*tau, decay.rates[n], decay.fitted_slope, predicted_slope]);
    }
    csv.write(out)?;

    let mut report = Report::default();
    report.push_f64("gamma", gamma);
    report.push_f64("fitted_slope", decay.fitted_slope);
    report.push("predicted_decay", predicted_label);
    report.push_f64("predicted_slope", predicted_slope);
    report.push("fit_points", decay.fit_points.to_string());
    report.print();

    Ok(vec!["frozen.csv".to_string()])
}
