//! plot: gnuplot scripts over existing CSV artifacts. Scripts are
//! self-contained (terminal, output, fits, and guide lines all inside), and
//! column positions are resolved from the CSV header at generation time so a
//! reordered file still plots correctly.

use std::path::{Path, PathBuf};

use crate::output::{csv_header, require_column};
use crate::CliError;

/// First data row of a CSV, split into cells.
fn first_row(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let line = text.lines().nth(1).ok_or_else(|| {
        CliError::Config(format!("{}: no data rows to plot", path.display()))
    })?;
    line.split(',')
        .map(|c| {
            c.trim().parse().map_err(|_| {
                CliError::Config(format!("{}: non-numeric cell {c:?}", path.display()))
            })
        })
        .collect()
}

/// Rows of a CSV as numbers.
fn all_rows(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split(',')
                .map(|c| {
                    c.trim().parse().map_err(|_| {
                        CliError::Config(format!("{}: non-numeric cell {c:?}", path.display()))
                    })
                })
                .collect()
        })
        .collect()
}

pub fn emit_plot_script(kind: &str, csv: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let header = csv_header(csv)?;
    let col = |name: &str| -> Result<usize, CliError> {
        // gnuplot columns are 1-based
        Ok(require_column(csv, &header, name)? + 1)
    };
    let file = csv.display();

    let body = match kind {
        "moments" => {
            let (t, s) = (col("t")?, col("S")?);
            format!(
                "set title 'log moment scale and fitted growth law'\n\
                 set xlabel 't'\n\
                 set ylabel 'S(t)'\n\
                 c1 = 1; c2 = -1; c3 = 0\n\
                 f(x) = c1*x**(5.0/3.0) + c2*x + c3\n\
                 fit f(x) '{file}' using {t}:{s} via c1, c2, c3\n\
                 plot '{file}' using {t}:{s} with lines title 'integrated S(t)', \\\n\
                 \x20    f(x) with lines dashtype 2 title sprintf('c1 t^{{5/3}} + c2 t + c3, c1 = %.4f', c1)\n"
            )
        }
        "rate-convergence" => {
            let (t, eps) = (col("t")?, col("epsilon")?);
            format!(
                "set title 'self-consistent rate: t * epsilon(t)'\n\
                 set xlabel 't'\n\
                 set ylabel 't * epsilon'\n\
                 set logscale x\n\
                 stats '{file}' using {t} nooutput\n\
                 c = 1\n\
                 fit [STATS_max/10:STATS_max] c '{file}' using {t}:(${t}*${eps}) via c\n\
                 plot '{file}' using {t}:(${t}*${eps}) with lines title 't * epsilon(t)', \\\n\
                 \x20    c with lines dashtype 2 title sprintf('late-time level %.4f', c)\n"
            )
        }
        "front" => {
            let (t, x, phi) = (col("t")?, col("X")?, col("phi")?);
            format!(
                "set title 'collision trace profile at the final time vs Gaussian fit'\n\
                 set xlabel 'X'\n\
                 set ylabel 'phi'\n\
                 stats '{file}' using {t} nooutput\n\
                 T = STATS_max\n\
                 a = 1; mu = 0; s2 = 1\n\
                 fit a*exp(-(x-mu)**2/(2*s2)) '{file}' using \\\n\
                 \x20   (${t}==T ? ${x} : 1/0):{phi} via a, mu, s2\n\
                 plot '{file}' using (${t}==T ? ${x} : 1/0):{phi} with points title sprintf('phi(T = %g, X)', T), \\\n\
                 \x20    a*exp(-(x-mu)**2/(2*s2)) with lines dashtype 2 title 'Gaussian fit'\n"
            )
        }
        "rate-decay" => {
            let (tau, rate) = (col("tau")?, col("rate")?);
            let row = first_row(csv)?;
            let fitted = row[col("fitted_slope")? - 1];
            let predicted = row[col("predicted_slope")? - 1];
            format!(
                "set title 'collision rate decay along the free flow'\n\
                 set xlabel 'tau'\n\
                 set ylabel 'log rate'\n\
                 b0 = 0\n\
                 fit b0 + ({fitted})*x '{file}' using {tau}:(log(${rate})) via b0\n\
                 plot '{file}' using {tau}:(log(${rate})) with points title 'log rate', \\\n\
                 \x20    b0 + ({fitted})*x with lines title 'fitted slope {fitted:.4}', \\\n\
                 \x20    b0 + ({predicted})*x with lines dashtype 2 title 'predicted slope {predicted:.4}'\n"
            )
        }
        "dispersion" => {
            let (eps, beta_col, k, re) = (col("epsilon")?, col("beta")?, col("k")?, col("re_z0")?);
            let rows = all_rows(csv)?;
            let anchor = rows
                .iter()
                .filter(|r| r[k - 1] == 0.0)
                .min_by(|a, b| a[eps - 1].partial_cmp(&b[eps - 1]).unwrap())
                .ok_or_else(|| {
                    CliError::Config(format!("{file}: no k = 0 rows; nothing to anchor the guide"))
                })?;
            let beta = anchor[beta_col - 1];
            let guide_c = anchor[re - 1] / anchor[eps - 1].powf(1.0 / beta);
            format!(
                "set title 'growth rate vs epsilon (beta = {beta})'\n\
                 set xlabel 'epsilon'\n\
                 set ylabel 'Re z0'\n\
                 set logscale xy\n\
                 plot '{file}' using (${k}==0 ? ${eps} : 1/0):{re} with points title 'Re z0(epsilon)', \\\n\
                 \x20    {guide_c:.6e}*x**(1.0/{beta}) with lines dashtype 2 title 'slope 1/{beta} guide'\n"
            )
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown plot kind {other:?} (known: moments, rate-convergence, front, \
                 rate-decay, dispersion)"
            )));
        }
    };

    let script_path = out.unwrap_or_else(|| {
        csv.parent()
            .unwrap_or(Path::new("."))
            .join(format!("{kind}.gp"))
    });
    let png = script_path.with_extension("png");
    let text = format!(
        "# generated by homoflow plot {kind}; render with: gnuplot <this file>\n\
         set terminal pngcairo size 960,640\n\
         set output '{}'\n\
         set datafile separator ','\n\
         set key left top\n\
         {body}",
        png.display()
    );
    std::fs::write(&script_path, text)?;
    println!("wrote {}", script_path.display());
    Ok(())
}
