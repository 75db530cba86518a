//! dispersion: roots of 1 = eps Lambda(z, k) over a parameter grid, plus an
//! optional front report (drift and spread coefficients at k = 0).

use std::path::Path;

use homoflow::dispersion::{front_coefficients, solve_root};

use crate::config::Params;
use crate::output::{Csv, Report};
use crate::CliError;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("eps", "0.05"),
    ("beta", "2"),
    ("k", "0"),
    ("front", "false"),
];
const KNOWN: &[&str] = &["eps", "beta", "k", "front"];

pub fn run(params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    params.check_known(KNOWN)?;
    let eps_list = params.f64_list("eps")?;
    let beta_list = params.f64_list("beta")?;
    let k_list = params.f64_list("k")?;

    let mut csv = Csv::new(
        "dispersion.csv",
        &["epsilon", "beta", "k", "re_z0", "im_z0", "residual"],
    );
    let mut solved = 0usize;
    for &beta in &beta_list {
        for &eps in &eps_list {
            for &k in &k_list {
                let root = solve_root(eps, k, beta)?;
                csv.number_row(&[eps, beta, k, root.z0.re, root.z0.im, root.residual]);
                solved += 1;
            }
        }
    }
    csv.write(out)?;

    let mut report = Report::default();
    report.push("roots", solved.to_string());
    if params.bool("front")? {
        let (eps, beta) = (eps_list[0], beta_list[0]);
        let front = front_coefficients(eps, beta)?;
        report.push_f64("front_eps", eps);
        report.push_f64("front_beta", beta);
        report.push_f64("drift_a1", front.a1);
        report.push_f64("spread_a2", front.a2);
        report.push_f64("b_eps", front.b_eps);
    }
    report.print();

    Ok(vec!["dispersion.csv".to_string()])
}
