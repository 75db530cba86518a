//! classify: long-time template of the mean flow for a deformation matrix.

use std::path::Path;

use homoflow::flow::{classify_flow, DeformationMatrix, FlowClass, Template};

use crate::config::Params;
use crate::output::{fmt, Csv, Report};
use crate::CliError;

pub const DEFAULTS: &[(&str, &str)] = &[("rho0", "1")];
const KNOWN: &[&str] = &["A", "rho0"];

pub fn run(params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    params.check_known(KNOWN)?;
    let a = params.matrix3("A")?;
    let rho0 = params.f64("rho0")?;
    if !(rho0 > 0.0) {
        return Err(CliError::Config(format!(
            "parameter \"rho0\": density must be positive, got {rho0}"
        )));
    }

    let dm = DeformationMatrix::new(a);
    let cls = classify_flow(&dm)?;

    // constants laid out in the fixed CSV schema; absent ones stay zero
    let (label, k, k1, k2, k3) = match cls.class {
        FlowClass::HomogeneousDilatation => ("HomogeneousDilatation", 0.0, 0.0, 0.0, 0.0),
        FlowClass::CylindricalDilatation => ("CylindricalDilatation", 0.0, 0.0, 0.0, 0.0),
        FlowClass::CylindricalDilatationShear { k } => {
            ("CylindricalDilatationShear", k, 0.0, 0.0, 0.0)
        }
        FlowClass::PlanarShear { k } => ("PlanarShear", k, 0.0, 0.0, 0.0),
        FlowClass::SimpleShear { k } => ("SimpleShear", k, 0.0, 0.0, 0.0),
        FlowClass::SimpleShearDecayingPlanar { k2 } => {
            ("SimpleShearDecayingPlanar", 0.0, 0.0, k2, 0.0)
        }
        FlowClass::CombinedOrthogonalShear { k1, k2, k3 } => {
            ("CombinedOrthogonalShear", 0.0, k1, k2, k3)
        }
    };

    let mut report = Report::default();
    report.push("case_label", label);
    report.push(
        "template",
        match cls.template {
            Template::Affine { .. } => "affine N + R/t",
            Template::NilpotentExact { .. } => "exact nilpotent A - t A^2",
        },
    );
    report.push_f64("K", k);
    report.push_f64("K1", k1);
    report.push_f64("K2", k2);
    report.push_f64("K3", k3);
    report.push_f64("residual", cls.residual);
    report.push(
        "horizon",
        if dm.horizon.is_finite() {
            fmt(dm.horizon)
        } else {
            "inf".to_string()
        },
    );
    report.push_f64("density_t100_over_rho0", dm.density(rho0, 100.0)? / rho0);
    report.print();

    let mut csv = Csv::new("classify.csv", &["case_label", "K", "K1", "K2", "K3", "residual"]);
    csv.row(&[
        label.to_string(),
        fmt(k),
        fmt(k1),
        fmt(k2),
        fmt(k3),
        fmt(cls.residual),
    ]);
    csv.write(out)?;
    Ok(vec!["classify.csv".to_string()])
}
