//! wkb: growth-cycle analysis of a user-supplied affine coupling graph.
//!
//! The graph file has one coupling per line, "target source coeff [thick]",
//! where thick marks a coefficient that grows linearly in time. Node names
//! are arbitrary tokens, registered in order of first appearance.

use std::path::Path;

use homoflow::wkb::WkbGraph;

use crate::config::Params;
use crate::output::{fmt, Csv, Report};
use crate::CliError;

pub const DEFAULTS: &[(&str, &str)] = &[("t_eval", "1000")];
const KNOWN: &[&str] = &["graph", "t_eval"];

fn parse_graph(text: &str) -> Result<WkbGraph, CliError> {
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize, f64, bool)> = Vec::new();
    let mut index_of = |name: &str, names: &mut Vec<String>| -> usize {
        match names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        }
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 3 || tokens.len() > 4 {
            return Err(CliError::Config(format!(
                "graph line {}: expected \"target source coeff [thick]\", got {raw:?}",
                lineno + 1
            )));
        }
        let coeff: f64 = tokens[2].parse().map_err(|_| {
            CliError::Config(format!(
                "graph line {}: coefficient is not a number: {:?}",
                lineno + 1,
                tokens[2]
            ))
        })?;
        let thick = match tokens.get(3) {
            None => false,
            Some(&"thick") => true,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "graph line {}: trailing token must be \"thick\", got {other:?}",
                    lineno + 1
                )));
            }
        };
        let target = index_of(tokens[0], &mut names);
        let source = index_of(tokens[1], &mut names);
        edges.push((source, target, coeff, thick));
    }
    if edges.is_empty() {
        return Err(CliError::Config("graph file has no couplings".into()));
    }
    let mut g = WkbGraph::new(names);
    for (source, target, coeff, thick) in edges {
        let (constant, linear) = if thick { (0.0, coeff) } else { (coeff, 0.0) };
        g.add_coupling(source, target, constant, linear)?;
    }
    Ok(g)
}

pub fn run(params: &Params, out: &Path) -> Result<Vec<String>, CliError> {
    params.check_known(KNOWN)?;
    let path = Path::new(params.raw("graph")?);
    let t_eval = params.f64("t_eval")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read graph {}: {e}", path.display())))?;
    let g = parse_graph(&text)?;

    let cycles = g.simple_cycles()?;
    let dominant = g.dominant_cycles()?;
    let is_dominant = |nodes: &[usize]| dominant.iter().any(|d| d.nodes == nodes);

    let mut reports = Vec::new();
    let mut fully_secular = 0usize;
    for cycle in &cycles {
        match g.cycle_report(cycle) {
            Ok(r) => reports.push(r),
            Err(homoflow::Error::Unsupported(_)) => fully_secular += 1,
            Err(e) => return Err(e.into()),
        }
    }
    reports.sort_by(|a, b| {
        (b.exponent, b.amplitude)
            .partial_cmp(&(a.exponent, a.amplitude))
            .unwrap()
    });

    let mut csv = Csv::new(
        "wkb.csv",
        &[
            "cycle", "len", "thick", "c0", "exponent", "amplitude", "re_omega", "im_omega",
            "dominant",
        ],
    );
    for r in &reports {
        let label = r
            .nodes
            .iter()
            .map(|&i| g.name(i).to_string())
            .collect::<Vec<_>>()
            .join("-");
        csv.row(&[
            label,
            r.len.to_string(),
            r.thick.to_string(),
            fmt(r.c0),
            fmt(r.exponent),
            fmt(r.amplitude),
            fmt(r.omega.re),
            fmt(r.omega.im),
            (is_dominant(&r.nodes) as u8).to_string(),
        ]);
    }
    csv.write(out)?;

    let lead = &dominant[0];
    let mut report = Report::default();
    report.push("nodes", g.node_count().to_string());
    report.push("cycles", cycles.len().to_string());
    report.push("fully_secular_skipped", fully_secular.to_string());
    report.push(
        "dominant_cycle",
        lead.nodes
            .iter()
            .map(|&i| g.name(i).to_string())
            .collect::<Vec<_>>()
            .join(" -> "),
    );
    report.push_f64("exponent", lead.exponent);
    report.push_f64("amplitude", lead.amplitude);
    report.push_f64("re_omega", lead.omega.re);
    report.push_f64("predicted_s", lead.predict_s(t_eval));
    report.print();

    Ok(vec!["wkb.csv".to_string()])
}
