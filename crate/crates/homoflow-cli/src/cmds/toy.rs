//! toy-det, toy-sc, toy-mc: the shear-collision toy model in its
//! deterministic (history equation and field), self-consistent, and particle
//! Monte Carlo forms.

use std::path::Path;

use homoflow::dispersion::solve_root;
use homoflow::mc::{self, McRun, RateMode};
use homoflow::toy::{
    solve_field, solve_lambda_volterra, solve_selfconsistent, InitialProfile, ToyMomentSeries,
};

use crate::config::Params;
use crate::output::{Csv, Report};
use crate::CliError;

const PROFILE_KEYS: &[&str] = &["profile", "mean", "sigma", "center", "halfwidth"];

/// Shared initial-profile vocabulary: a named preset or a tabulated CSV.
fn profile_from(params: &Params) -> Result<InitialProfile, CliError> {
    match params.raw("profile")? {
        "gaussian" => Ok(InitialProfile::gaussian(
            params.f64("mean")?,
            params.f64("sigma")?,
        )?),
        "bump" => Ok(InitialProfile::bump(
            params.f64("center")?,
            params.f64("halfwidth")?,
        )?),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!(
                    "parameter \"profile\": not a preset (gaussian, bump) and not a readable \
                     CSV: {path}: {e}"
                ))
            })?;
            let mut lines = text.lines().enumerate();
            match lines.next() {
                Some((_, header)) if header.trim() == "X,value" => {}
                _ => {
                    return Err(CliError::Config(format!(
                        "{path}: tabulated profile must start with the header \"X,value\""
                    )));
                }
            }
            let mut xs = Vec::new();
            let mut vals = Vec::new();
            for (lineno, line) in lines {
                if line.trim().is_empty() {
                    continue;
                }
                let cells: Vec<&str> = line.split(',').collect();
                let parsed: Option<(f64, f64)> = match cells.as_slice() {
                    [a, b] => a.trim().parse().ok().zip(b.trim().parse().ok()),
                    _ => None,
                };
                let Some((x, v)) = parsed else {
                    return Err(CliError::Config(format!(
                        "{path} line {}: expected two numbers, got {line:?}",
                        lineno + 1
                    )));
                };
                xs.push(x);
                vals.push(v);
            }
            Ok(InitialProfile::tabulated(xs, vals)?)
        }
    }
}

/// Rough envelope of where the initial profile lives on the X axis.
fn profile_span(profile: &InitialProfile) -> (f64, f64) {
    if let Some((mean, sigma)) = profile.gaussian_parameters() {
        (mean - 8.0 * sigma, mean + 8.0 * sigma)
    } else if let Some((lo, hi)) = profile.support() {
        (lo, hi)
    } else {
        (-8.0, 8.0)
    }
}

fn series_csv(name: &'static str, series: &ToyMomentSeries, out: &Path) -> Result<(), CliError> {
    let mut csv = Csv::new(name, &["t", "lambda", "log_lambda", "epsilon"]);
    for (n, t) in series.times.iter().enumerate() {
        csv.number_row(&[*t, series.lambda[n], series.log_lambda[n], series.epsilon[n]]);
    }
    csv.write(out)?;
    Ok(())
}

pub const DET_DEFAULTS: &[(&str, &str)] = &[
    ("beta", "2"),
    ("eps", "0.05"),
    ("T", "80"),
    ("n", "4000"),
    ("profile", "gaussian"),
    ("mean", "0"),
    ("sigma", "1"),
    ("center", "0"),
    ("halfwidth", "1"),
    ("field", "false"),
    ("x_min", "auto"),
    ("x_max", "auto"),
    ("nx", "500"),
    ("nt", "auto"),
];
const DET_KNOWN: &[&str] = &[
    "beta", "eps", "T", "n", "field", "x_min", "x_max", "nx", "nt", "profile", "mean", "sigma",
    "center", "halfwidth",
];

pub fn run_det(params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    params.check_known(DET_KNOWN)?;
    let beta = params.f64("beta")?;
    let eps = params.f64("eps")?;
    let t_end = params.f64("T")?;
    let n = params.usize("n")?;
    let profile = profile_from(params)?;

    let series = solve_lambda_volterra(beta, |_| eps, &profile, t_end, n)?;
    series_csv("volterra.csv", &series, out)?;
    let mut artifacts = vec!["volterra.csv".to_string()];

    let mut report = Report::default();
    let fitted = series.log_slope(0.5 * t_end, t_end)?;
    let root = solve_root(eps, 0.0, beta)?;
    report.push_f64("fitted_rate", fitted);
    report.push_f64("dispersion_rate", root.z0.re);
    report.push_f64(
        "rate_rel_gap",
        (fitted - root.z0.re).abs() / root.z0.re.abs(),
    );

    if params.bool("field")? {
        let (span_lo, span_hi) = profile_span(&profile);
        let x_min = match params.raw("x_min")? {
            "auto" => span_lo - 2.0,
            _ => params.f64("x_min")?,
        };
        let x_max = match params.raw("x_max")? {
            // collisions shift mass toward larger X roughly at unit speed
            "auto" => span_hi + t_end + 2.0,
            _ => params.f64("x_max")?,
        };
        let nx = params.usize("nx")?;
        let nt = match params.raw("nt")? {
            "auto" => {
                if nx < 2 || !(x_max > x_min) {
                    return Err(CliError::Config(format!(
                        "parameter \"nx\"/\"x_min\"/\"x_max\": need x_min < x_max and nx >= 2, \
                         got [{x_min}, {x_max}] with nx = {nx}"
                    )));
                }
                let dx = (x_max - x_min) / nx as f64;
                (t_end / dx.exp_m1()).ceil() as usize + 1
            }
            _ => params.usize("nt")?,
        };
        let field = solve_field(&profile, |_| eps, x_min, x_max, nx, t_end, nt)?;

        // long-format slices; cap the time resolution so files stay sane
        let stride = (field.ts.len() / 64).max(1);
        let mut csv = Csv::new("field.csv", &["t", "X", "phi"]);
        for (it, t) in field.ts.iter().enumerate() {
            if it % stride != 0 && it != field.ts.len() - 1 {
                continue;
            }
            for (ix, x) in field.xs.iter().enumerate() {
                csv.number_row(&[*t, *x, field.values[it][ix]]);
            }
        }
        csv.write(out)?;
        artifacts.push("field.csv".to_string());
        report.push("field_grid", format!("{} x {}", field.ts.len(), nx));
    }

    report.print();
    Ok(artifacts)
}

pub const SC_DEFAULTS: &[(&str, &str)] = &[
    ("a", "0.5"),
    ("T", "1e4"),
    ("n", "20000"),
    ("profile", "gaussian"),
    ("mean", "0"),
    ("sigma", "1"),
    ("center", "0"),
    ("halfwidth", "1"),
];
const SC_KNOWN: &[&str] = &["a", "T", "n", "profile", "mean", "sigma", "center", "halfwidth"];

pub fn run_sc(params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    params.check_known(SC_KNOWN)?;
    let a = params.f64("a")?;
    let t_end = params.f64("T")?;
    let n = params.usize("n")?;
    let profile = profile_from(params)?;

    let series = solve_selfconsistent(a, &profile, t_end, n)?;
    series_csv("selfconsistent.csv", &series, out)?;

    let last = series.times.len() - 1;
    let t_eps = series.times[last] * series.epsilon[last];
    let mut report = Report::default();
    report.push_f64("final_t_eps", t_eps);
    report.push_f64("target_t_eps", 1.0 - a);
    report.push_f64("t_eps_abs_gap", (t_eps - (1.0 - a)).abs());
    report.push_f64("lambda_loglog_slope", series.loglog_slope(t_end / 10.0, t_end)?);
    report.push_f64("predicted_loglog_slope", -(1.0 + a));
    report.print();

    Ok(vec!["selfconsistent.csv".to_string()])
}

pub const MC_DEFAULTS: &[(&str, &str)] = &[
    ("mode", "constant"),
    ("eps", "0.05"),
    ("a", "0.5"),
    ("n", "100000"),
    ("T", "10"),
    ("seed", "1"),
    ("records", "2,4,6,8,10"),
    ("betas", "1"),
    ("events", "false"),
    ("profile", "gaussian"),
    ("mean", "0"),
    ("sigma", "1"),
    ("center", "0"),
    ("halfwidth", "1"),
];
const MC_KNOWN: &[&str] = &[
    "mode", "eps", "a", "n", "T", "seed", "records", "betas", "events", "profile", "mean",
    "sigma", "center", "halfwidth",
];

pub fn run_mc(params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    params.check_known(MC_KNOWN)?;
    let mode = match params.raw("mode")? {
        "constant" => RateMode::Constant(params.f64("eps")?),
        "self-consistent" => RateMode::SelfConsistent { a: params.f64("a")? },
        other => {
            return Err(CliError::Config(format!(
                "parameter \"mode\": expected constant or self-consistent, got {other:?}"
            )));
        }
    };
    let profile = profile_from(params)?;
    let run = McRun {
        n_particles: params.usize("n")?,
        mode,
        t_end: params.f64("T")?,
        seed: params.u64("seed")?,
        record_times: params.f64_list("records")?,
        betas: params.f64_list("betas")?,
        log_events: params.bool("events")?,
    };
    let traj = mc::simulate(&run, &profile)?;

    std::fs::write(out.join("mc.csv"), mc::summary_csv(&traj))?;
    let mut artifacts = vec!["mc.csv".to_string()];

    let mut report = Report::default();
    if let Some(events) = &traj.events {
        let mut csv = Csv::new("events.csv", &["t", "x_before", "zeta_before", "x_after"]);
        for e in events {
            csv.number_row(&[e.t, e.x_before, e.zeta_before, e.x_after]);
        }
        csv.write(out)?;
        artifacts.push("events.csv".to_string());
        report.push("collisions", events.len().to_string());
    }

    let last = traj.rows.last().unwrap();
    report.push("particles", run.n_particles.to_string());
    report.push_f64("final_mass", last.mass);
    for (i, beta) in run.betas.iter().enumerate() {
        let (m, se) = last.moments[i];
        report.push(
            &format!("moment_{beta}"),
            format!("{} +- {}", crate::output::fmt(m), crate::output::fmt(se)),
        );
    }
    if let RateMode::SelfConsistent { a } = run.mode {
        let trace = mc::epsilon_trace_check(&traj, a)?;
        report.push_f64("fitted_t_eps", trace.fitted);
        report.push_f64("expected_t_eps", trace.expected);
    }
    report.print();

    Ok(artifacts)
}
