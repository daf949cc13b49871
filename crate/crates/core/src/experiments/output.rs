//! CSV emission for sweeps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::kde::{branch_stats, LOWER_BRANCH, UPPER_BRANCH};
use super::speed::Speed;
use super::sweep::{Axis, CellRecord, SweepResult};
use crate::dynamics::Contagion;
use crate::error::Result;

/// Real number with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_speed(s: Speed) -> String {
    s.steps().map(|t| t.to_string()).unwrap_or_default()
}

/// A matrix with an axis header row: the first row is `y\x` followed by the
/// x values, and every following row starts with its y value.
pub fn matrix_csv(x: &Axis, y: &Axis, values: &[Vec<f64>]) -> String {
    let mut out = format!("{}\\{}", y.name, x.name);
    for v in &x.values {
        write!(out, ",{}", fmt_real(*v)).unwrap();
    }
    out.push('\n');
    for (yv, row) in y.values.iter().zip(values) {
        out.push_str(&fmt_real(*yv));
        for v in row {
            write!(out, ",{}", fmt_real(*v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// One row per trial of a cell. Unreached speed thresholds are left empty.
pub fn cell_csv(cell: &CellRecord) -> String {
    let mut out = String::from("trial,final_a,final_b,steps,stop,speed_a,speed_b\n");
    for t in &cell.trials {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            t.trial,
            t.final_a,
            t.final_b,
            t.steps_run,
            t.stop_reason.as_str(),
            fmt_speed(t.speed_a),
            fmt_speed(t.speed_b)
        )
        .unwrap();
    }
    out
}

/// Branch summary of every cell and contagion. Modes are written as
/// `location:mass` pairs separated by `;`.
pub fn branches_csv(sweep: &SweepResult) -> Result<String> {
    let mut out = format!(
        "# lower_branch={},upper_branch={}\nrow,col,contagion,lower_fraction,upper_fraction,bandwidth,modes\n",
        fmt_real(LOWER_BRANCH),
        fmt_real(UPPER_BRANCH)
    );
    if sweep.trials_per_cell < 2 {
        return Ok(out);
    }
    for cell in &sweep.cells {
        for (name, contagion) in [("a", Contagion::A), ("b", Contagion::B)] {
            let stats = branch_stats(&cell.finals(contagion), sweep.n)?;
            let modes: Vec<String> = stats
                .modes
                .iter()
                .map(|m| format!("{}:{}", fmt_real(m.location), fmt_real(m.mass)))
                .collect();
            writeln!(
                out,
                "{},{},{name},{},{},{},{}",
                cell.row,
                cell.col,
                fmt_real(stats.lower_fraction),
                fmt_real(stats.upper_fraction),
                fmt_real(stats.bandwidth),
                modes.join(";")
            )
            .unwrap();
        }
    }
    Ok(out)
}

/// Writes the four statistic matrices, the branch summary and optionally one
/// `cell_<row>_<col>.csv` per cell into `dir`, every name prefixed with
/// `prefix`. Returns the written paths.
pub fn write_sweep(
    dir: &Path,
    prefix: &str,
    sweep: &SweepResult,
    emit_cells: bool,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(format!("{prefix}{name}"));
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put(
        "mean_final_a.csv".into(),
        matrix_csv(&sweep.x, &sweep.y, &sweep.mean_final_a),
    )?;
    put(
        "mean_final_b.csv".into(),
        matrix_csv(&sweep.x, &sweep.y, &sweep.mean_final_b),
    )?;
    put(
        "std_final_a.csv".into(),
        matrix_csv(&sweep.x, &sweep.y, &sweep.std_final_a),
    )?;
    put(
        "std_final_b.csv".into(),
        matrix_csv(&sweep.x, &sweep.y, &sweep.std_final_b),
    )?;
    put("branches.csv".into(), branches_csv(sweep)?)?;
    if emit_cells {
        for cell in &sweep.cells {
            put(
                format!("cell_{}_{}.csv", cell.row, cell.col),
                cell_csv(cell),
            )?;
        }
    }
    Ok(written)
}
