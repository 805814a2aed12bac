//! Gnuplot scripts for the result tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::table::ResultTable;
use crate::error::{Error, Result};

fn header(out: &mut String, csv_name: &str) {
    let _ = writeln!(out, "# usage: gnuplot <this script>, run next to {csv_name}");
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set datafile commentschars '#'");
    let _ = writeln!(out, "set key autotitle columnhead");
    let _ = writeln!(out, "set terminal pngcairo size 900,600");
    let _ = writeln!(out, "set grid");
    let _ = writeln!(out, "data = '{csv_name}'");
}

fn col(table: &ResultTable, name: &str) -> usize {
    table.column_index(name).map_or(0, |i| i + 1)
}

/// Builds the script text for `table`, reading data from `csv_name`.
pub fn plot_script(table: &ResultTable, csv_name: &str) -> Result<String> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let stem = &table.name;
    let mut out = String::new();
    header(&mut out, csv_name);
    match stem.as_str() {
        "radius_decay" => {
            let t = col(table, "t");
            let _ = writeln!(out, "\nset output '{stem}_sigma.png'");
            let _ = writeln!(out, "set logscale xy");
            let _ = writeln!(out, "set xlabel 't'");
            let _ = writeln!(out, "set ylabel 'strip half-width'");
            let _ = writeln!(
                out,
                "plot data using {t}:{} with linespoints title 'sigma_est', \\\n     data using {t}:{} with lines title 'c/t schedule'",
                col(table, "sigma_est"),
                col(table, "sigma_schedule")
            );
            let _ = writeln!(out, "unset logscale");
            for name in ["mass", "energy", "A_sigma0", "sigma_fit_residual", "saturated_flag"] {
                let _ = writeln!(out, "\nset output '{stem}_{name}.png'");
                let _ = writeln!(out, "set ylabel '{name}'");
                let _ = writeln!(out, "plot data using {t}:{} with lines", col(table, name));
            }
        }
        "conservation" => {
            let s = col(table, "sigma");
            let _ = writeln!(out, "\nset output '{stem}_drift.png'");
            let _ = writeln!(out, "set logscale xy");
            let _ = writeln!(out, "set xlabel 'sigma'");
            let _ = writeln!(out, "set ylabel 'sup A_sigma - A_sigma(0)'");
            let _ = writeln!(out, "guide(x) = x * {}", guide_scale(table));
            let _ = writeln!(
                out,
                "plot data using {s}:{} with linespoints title 'D(sigma)', \\\n     guide(x) with lines dashtype 2 title 'slope 1'",
                col(table, "sup_drift_A")
            );
            for name in ["delta", "mass_drift", "energy_drift"] {
                let _ = writeln!(out, "\nset output '{stem}_{name}.png'");
                let _ = writeln!(out, "set ylabel '{name}'");
                let _ = writeln!(out, "plot data using {s}:{} with linespoints", col(table, name));
            }
        }
        _ => {
            let n = col(table, "n");
            let _ = writeln!(out, "\nset xlabel 'n'");
            let _ = writeln!(out, "set logscale x 2");
            for name in ["max_ratio", "median_ratio"] {
                let _ = writeln!(out, "\nset output '{stem}_{name}.png'");
                let _ = writeln!(out, "set ylabel '{name}'");
                let _ = writeln!(
                    out,
                    "plot for [id in '{}'] data using {n}:(strcol({}) eq id ? ${} : NaN) with linespoints title id",
                    estimate_ids(table).join(" "),
                    col(table, "estimate_id"),
                    col(table, name)
                );
            }
        }
    }
    Ok(out)
}

fn guide_scale(table: &ResultTable) -> String {
    let sigma = table.column("sigma");
    let drift = table.column("sup_drift_A");
    let anchor = sigma
        .iter()
        .zip(&drift)
        .filter(|(s, d)| **s > 0.0 && **d > 0.0)
        .map(|(s, d)| d / s)
        .next_back();
    format!("{:.16e}", anchor.unwrap_or(1.0))
}

fn estimate_ids(table: &ResultTable) -> Vec<String> {
    let Some(i) = table.column_index("estimate_id") else { return Vec::new() };
    let mut ids: Vec<String> = Vec::new();
    for row in &table.rows {
        if let super::table::Cell::Text(s) = &row[i] {
            if !ids.contains(s) {
                ids.push(s.clone());
            }
        }
    }
    ids
}

/// Writes the script for `table` to `out_path`, pointing at `csv_name`.
pub fn emit_plot_script(table: &ResultTable, csv_name: &str, out_path: &Path) -> Result<()> {
    let script = plot_script(table, csv_name)?;
    fs::write(out_path, script)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::table::Cell;
    use super::*;

    #[test]
    fn radius_script_is_log_log() {
        let mut t = ResultTable::new(
            "radius_decay",
            &["t", "mass", "energy", "A_sigma0", "sigma_est", "sigma_fit_residual", "sigma_schedule", "saturated_flag"],
        );
        t.push(vec![
            Cell::Float(0.0),
            Cell::Float(2.0),
            Cell::Float(1.0),
            Cell::Float(3.0),
            Cell::Float(1.5),
            Cell::Float(0.0),
            Cell::Saturated,
            Cell::Int(0),
        ]);
        let s = plot_script(&t, "radius_decay.csv").unwrap();
        assert!(s.contains("set datafile separator ','"));
        assert!(s.contains("set logscale xy"));
        assert!(s.contains("data = 'radius_decay.csv'"));
        assert!(s.contains("using 1:5"));
        assert!(s.contains("using 1:7"));
    }

    #[test]
    fn conservation_script_has_guide_line() {
        let mut t = ResultTable::new("conservation", &["sigma", "delta", "sup_drift_A", "mass_drift", "energy_drift"]);
        for (s, d) in [(1e-3, 2e-6), (1e-2, 2e-5)] {
            t.push(vec![Cell::Float(s), Cell::Float(0.1), Cell::Float(d), Cell::Float(0.0), Cell::Float(0.0)]);
        }
        let s = plot_script(&t, "conservation.csv").unwrap();
        assert!(s.contains("slope 1"));
        assert!(s.contains("guide(x) = x * 2.0000000000000000e-3"));
    }

    #[test]
    fn empty_table_is_an_error() {
        let t = ResultTable::new("conservation", &["sigma"]);
        assert!(matches!(plot_script(&t, "x.csv"), Err(Error::EmptyTable)));
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_plot_script(&t, "x.csv", &dir.path().join("x.gp")).is_err());
    }
}
