//! Deterministic artifact writers: CSV trajectories, netlist text and JSON
//! reports. All floats are printed with 17 significant digits so a reader
//! recovers the exact double, and every file is written to a temporary
//! sibling then renamed, so a crashed run never leaves a partial file.

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::gauge::GaugeSolution;
use crate::linalg::{CMatrix, RVector};
use crate::quantum::StateVector;

/// 17-significant-digit decimal rendering; round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `contents` to `path` atomically: write a temporary sibling file,
/// then rename it over the destination.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = Path::new(&tmp);
    fs::write(tmp_path, contents)?;
    fs::rename(tmp_path, path)?;
    Ok(())
}

fn push_matrix_headers(header: &mut String, tag: &str, dim: usize) {
    for j in 1..=dim {
        for k in 1..=dim {
            header.push_str(&format!(",re_{tag}_{j}_{k},im_{tag}_{j}_{k}"));
        }
    }
}

fn push_matrix_row(line: &mut String, m: &CMatrix) {
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            let z = m[(j, k)];
            line.push(',');
            line.push_str(&fmt_f64(z.re));
            line.push(',');
            line.push_str(&fmt_f64(z.im));
        }
    }
}

/// Gauge trajectory: per node `t`, then row-major `[re, im]` of ω, then of ω̇.
pub fn omega_csv(solution: &GaugeSolution) -> String {
    let dim = solution.dim();
    let mut out = String::from("t");
    push_matrix_headers(&mut out, "w", dim);
    push_matrix_headers(&mut out, "wdot", dim);
    out.push('\n');
    let grid = solution.grid();
    for i in 0..grid.num_nodes() {
        let mut line = fmt_f64(grid.node(i));
        push_matrix_row(&mut line, solution.omega_at(i));
        push_matrix_row(&mut line, solution.omega_dot_at(i));
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Sampled matrix trajectory (used for the mapped generator): per node `t`,
/// then row-major `[re, im]` entries.
pub fn matrix_csv(grid_times: &[f64], samples: &[CMatrix], tag: &str) -> String {
    let dim = samples.first().map_or(0, CMatrix::nrows);
    let mut out = String::from("t");
    push_matrix_headers(&mut out, tag, dim);
    out.push('\n');
    for (t, m) in grid_times.iter().zip(samples) {
        let mut line = fmt_f64(*t);
        push_matrix_row(&mut line, m);
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// State trajectory: per node `t`, then `re_psi_k,im_psi_k` per component.
pub fn psi_csv(path: &[StateVector]) -> String {
    let dim = path.first().map_or(0, |s| s.data.len());
    let mut out = String::from("t");
    for k in 1..=dim {
        out.push_str(&format!(",re_psi_{k},im_psi_{k}"));
    }
    out.push('\n');
    for state in path {
        let mut line = fmt_f64(state.time);
        for z in state.data.iter() {
            line.push(',');
            line.push_str(&fmt_f64(z.re));
            line.push(',');
            line.push_str(&fmt_f64(z.im));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Inspection dump of a realified system in long form: one row per matrix
/// entry, `matrix,row,col,value` with 1-based indices. The `aq`/`bq` blocks
/// appear only when the decoupled form exists.
pub fn real_system_csv(sys: &crate::realify::RealSystem) -> String {
    let mut out = String::from("matrix,row,col,value\n");
    let mut block = |name: &str, m: &crate::linalg::RMatrix| {
        for j in 0..m.nrows() {
            for k in 0..m.ncols() {
                out.push_str(&format!("{name},{},{},{}\n", j + 1, k + 1, fmt_f64(m[(j, k)])));
            }
        }
    };
    block("h1", sys.h1());
    block("h2", sys.h2());
    if let Some(aq) = sys.aq() {
        block("aq", aq);
    }
    if let Some(bq) = sys.bq() {
        block("bq", bq);
    }
    out
}

/// Port-voltage trajectory with the fixed header
/// `t,v1,...,vn,vdot1,...,vdotn`.
pub fn voltages_csv(grid_times: &[f64], path: &[(RVector, RVector)]) -> String {
    let dim = path.first().map_or(0, |(v, _)| v.len());
    let mut out = String::from("t");
    for k in 1..=dim {
        out.push_str(&format!(",v{k}"));
    }
    for k in 1..=dim {
        out.push_str(&format!(",vdot{k}"));
    }
    out.push('\n');
    for (t, (v, vdot)) in grid_times.iter().zip(path) {
        let mut line = fmt_f64(*t);
        for x in v.iter() {
            line.push(',');
            line.push_str(&fmt_f64(*x));
        }
        for x in vdot.iter() {
            line.push(',');
            line.push_str(&fmt_f64(*x));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}
