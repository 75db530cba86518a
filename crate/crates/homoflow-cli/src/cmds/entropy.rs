//! entropy: per-particle entropy, energy, and the ideal-form residual for
//! Maxwellian families transported along the free flows.

use std::path::Path;

use homoflow::entropy::{report as entropy_report, Domain};
use homoflow::frozen::{
    cylindrical_free_flow, shear_free_flow, FreeFlowSolution, Regime, VelocityProfile,
};

use crate::config::Params;
use crate::output::{Csv, Report};
use crate::CliError;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("flow", "shear"),
    ("K", "1"),
    ("times", "1,2,5,10"),
    ("half", "8"),
    ("value_transport", "false"),
    ("profile", "maxwellian"),
    ("sx", "0.7071067811865476"),
    ("sy", "0.7071067811865476"),
    ("sz", "0.7071067811865476"),
    ("radius", "1"),
];
const KNOWN: &[&str] = &[
    "flow", "K", "times", "half", "value_transport", "profile", "sx", "sy", "sz", "radius",
];

pub fn run(params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    params.check_known(KNOWN)?;
    let flow = params.raw("flow")?.to_string();
    let profile = super::frozen::velocity_profile(params)?;
    let times = params.f64_list("times")?;
    let half = params.f64("half")?;
    let value_transport = params.bool("value_transport")?;
    let k = params.f64("K")?;

    let mut csv = Csv::new(
        "entropy.csv",
        &["t_or_tau", "s_per_particle", "rho", "eps", "C_G", "residual"],
    );
    let mut report = Report::default();
    report.push("flow", flow.clone());

    for &t in &times {
        let row = match flow.as_str() {
            "none" => {
                let p = profile.clone();
                let g = move |w: [f64; 3]| p.density(w);
                entropy_report(&g, &Domain::cube(half)?)?
            }
            "homogeneous" => {
                let sol = FreeFlowSolution {
                    regime: Regime::HomogeneousDilatation,
                    profile: profile.clone(),
                    gamma: 0.0,
                    k_shear: 0.0,
                };
                let g = move |w: [f64; 3]| sol.density(t, w).unwrap_or(0.0);
                entropy_report(&g, &Domain::cube(half)?)?
            }
            "cylindrical" => {
                let p = profile.clone();
                // value transport rescales amplitude so g follows
                // characteristics pointwise; mass then shrinks like e^{-2 tau}
                let amp = if value_transport { (-2.0 * t).exp() } else { 1.0 };
                let g = move |w: [f64; 3]| amp * cylindrical_free_flow(&p, t, w).unwrap_or(0.0);
                entropy_report(&g, &Domain::cube(half)?)?
            }
            "shear" => {
                if t < 1.0 {
                    return Err(CliError::Config(format!(
                        "parameter \"times\": the shear family starts at t = 1, got {t}"
                    )));
                }
                let p = profile.clone();
                let g = move |w: [f64; 3]| shear_free_flow(&p, k, t, w).unwrap_or(0.0);
                let domain = Domain::shear_window(half, half, -k * (t - 1.0))?;
                entropy_report(&g, &domain)?
            }
            other => {
                return Err(CliError::Config(format!(
                    "parameter \"flow\": expected none, homogeneous, cylindrical, or shear, \
                     got {other:?}"
                )));
            }
        };
        csv.number_row(&[t, row.s_per_particle, row.rho, row.eps, row.c_g, row.residual]);
    }
    csv.write(out)?;

    match flow.as_str() {
        "shear" => report.push(
            "note",
            "s/rho stays constant while eps grows quadratically in (t - 1)",
        ),
        "cylindrical" if value_transport => report.push(
            "note",
            "value transport: s/rho constant, mass decays like exp(-2 tau)",
        ),
        "cylindrical" => report.push(
            "note",
            "mass-conserving transport: s/rho drifts by -2 tau against the value-transported family",
        ),
        "homogeneous" => report.push("note", "density contracts toward w = 0 at fixed mass"),
        _ => {}
    }
    report.push("rows", times.len().to_string());
    report.print();

    Ok(vec!["entropy.csv".to_string()])
}
