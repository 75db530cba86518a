//! moments: long-time integration of the closed shear moment system with the
//! leading growth fitted and compared against the cycle-graph prediction.

use std::path::Path;

use homoflow::collision::{fit_growth, integrate_moments, MomentOde};
use homoflow::wkb;

use crate::cmds::linspace;
use crate::config::Params;
use crate::output::{Csv, Report};
use crate::CliError;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("K1", "1"),
    ("K2", "0"),
    ("K3", "1"),
    ("b", "1"),
    ("T", "150"),
    ("samples", "300"),
    ("t_start", "0.5"),
    ("fit_lo", "auto"),
    ("fit_hi", "auto"),
    ("rtol", "1e-9"),
    ("atol", "1e-12"),
    ("M0", "1 0 0 1 0 1"),
];
const KNOWN: &[&str] = &[
    "K1", "K2", "K3", "b", "T", "samples", "t_start", "fit_lo", "fit_hi", "rtol", "atol", "M0",
];

fn window_edge(params: &Params, key: &str, auto: f64) -> Result<f64, CliError> {
    match params.raw(key)? {
        "auto" => Ok(auto),
        _ => params.f64(key),
    }
}

pub fn run(params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    params.check_known(KNOWN)?;
    let (k1, k2, k3) = (params.f64("K1")?, params.f64("K2")?, params.f64("K3")?);
    let b = params.f64("b")?;
    let t_end = params.f64("T")?;
    let t_start = params.f64("t_start")?;
    let samples = params.usize("samples")?;
    if !(t_end > t_start && t_start > 0.0) || samples < 4 {
        return Err(CliError::Config(format!(
            "parameter \"T\"/\"t_start\"/\"samples\": need 0 < t_start < T and at least 4 samples, \
             got t_start = {t_start}, T = {t_end}, samples = {samples}"
        )));
    }
    let m0_list = params.f64_list("M0")?;
    let m0: [f64; 6] = m0_list.as_slice().try_into().map_err(|_| {
        CliError::Config(format!(
            "parameter \"M0\": six moments (M11 M12 M13 M22 M23 M33) expected, got {}",
            m0_list.len()
        ))
    })?;

    let ode = MomentOde::with_retained_k2(k1, k2, k3, b)?;
    let times = linspace(t_start, t_end, samples);
    let traj = integrate_moments(&ode, m0, &times, params.f64("rtol")?, params.f64("atol")?)?;

    let mut csv = Csv::new(
        "moments.csv",
        &["t", "S", "U11", "U12", "U13", "U22", "U23", "U33"],
    );
    for (n, t) in traj.times.iter().enumerate() {
        let u = &traj.unit[n];
        csv.number_row(&[*t, traj.log_scale[n], u[0], u[1], u[2], u[3], u[4], u[5]]);
    }
    csv.write(out)?;

    let fit_lo = window_edge(params, "fit_lo", (t_end / 3.0).max(t_start))?;
    let fit_hi = window_edge(params, "fit_hi", t_end)?;
    let fit = fit_growth(&traj, fit_lo, fit_hi)?;

    let graph = wkb::moment_graph(&ode)?;
    let dominant = graph.dominant_cycles()?;
    let lead = &dominant[0];
    let wkb_c1 = lead.omega.re * lead.amplitude;

    let mut report = Report::default();
    report.push_f64("c1", fit.c1);
    report.push_f64("c2", fit.c2);
    report.push_f64("c3", fit.c3);
    report.push_f64("fit_rms_residual", fit.rms_residual);
    report.push_f64("wkb_c1", wkb_c1);
    report.push_f64("c1_rel_gap", (fit.c1 - wkb_c1).abs() / wkb_c1.abs());
    report.push_f64("wkb_exponent", lead.exponent);
    report.push(
        "wkb_cycle",
        lead.nodes
            .iter()
            .map(|&i| graph.name(i).to_string())
            .collect::<Vec<_>>()
            .join(" -> "),
    );
    report.push_f64("subleading_rate", wkb::moment_subleading_rate(b));
    report.push_f64("fit_window_lo", fit_lo);
    report.push_f64("fit_window_hi", fit_hi);
    report.print();

    Ok(vec!["moments.csv".to_string()])
}
