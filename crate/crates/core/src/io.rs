//! CSV series and JSON sidecars.
//!
//! Every float is written as `{:.16e}` (17 significant digits), which
//! round-trips `f64` exactly. Data files carry no timestamps, so rerunning a
//! command reproduces them byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inclusion::Trajectory;
use crate::lab::Series;

pub const TRAJECTORY_COLUMNS: [&str; 5] = ["t", "dist_L2", "dist_H01", "dist_Hm1", "energy"];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header line plus one row per entry, comma separated.
pub fn csv_string(columns: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Parses a CSV written by [`csv_string`], checking the header.
pub fn parse_csv(text: &str, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let found: Vec<&str> = header.split(',').map(str::trim).collect();
    if found != columns {
        return Err(Error::Parse(format!("expected header {columns:?}, found {found:?}")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let row = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 2))))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Parse(format!(
                    "line {}: {} fields, expected {}",
                    i + 2,
                    row.len(),
                    columns.len()
                )));
            }
            Ok(row)
        })
        .collect()
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let rows = (0..traj.len()).map(|i| {
        vec![traj.times[i], traj.dist_l2[i], traj.dist_h01[i], traj.dist_hm1[i], traj.energies[i]]
    });
    csv_string(&TRAJECTORY_COLUMNS, rows)
}

/// Interior nodal values of one stored state.
pub fn snapshot_csv(x: &[f64], u: &[f64]) -> String {
    csv_string(&["x", "u"], x.iter().zip(u).map(|(a, b)| vec![*a, *b]))
}

pub fn series_csv(series: &Series) -> String {
    let cols: Vec<&str> = series.columns.iter().map(String::as_str).collect();
    csv_string(&cols, series.rows.iter().cloned())
}

pub fn snapshot_file_name(index: usize) -> String {
    format!("snapshot_{index:05}.csv")
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn json_string(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    write_text(path, &json_string(value)?)
}

/// Writes `trajectory.csv` and, if asked, one snapshot file per stored
/// state. Returns the snapshot file names.
pub fn write_trajectory(dir: &Path, traj: &Trajectory, x: &[f64], snapshots: bool) -> Result<Vec<String>> {
    write_text(&dir.join("trajectory.csv"), &trajectory_csv(traj))?;
    let mut names = Vec::new();
    if snapshots {
        for (i, u) in traj.states.iter().enumerate() {
            let name = snapshot_file_name(i);
            write_text(&dir.join(&name), &snapshot_csv(x, u))?;
            names.push(name);
        }
    }
    Ok(names)
}

/// Reads back what [`write_trajectory`] wrote. States are filled from the
/// snapshot files when present and left empty otherwise.
pub fn read_trajectory(dir: &Path, reference: crate::equilibria::Equilibrium) -> Result<Trajectory> {
    let text = fs::read_to_string(dir.join("trajectory.csv"))?;
    let rows = parse_csv(&text, &TRAJECTORY_COLUMNS)?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let mut states = Vec::new();
    for i in 0..rows.len() {
        let path = dir.join(snapshot_file_name(i));
        if !path.exists() {
            break;
        }
        let snap = parse_csv(&fs::read_to_string(path)?, &["x", "u"])?;
        states.push(snap.iter().map(|r| r[1]).collect());
    }
    if !states.is_empty() && states.len() != rows.len() {
        return Err(Error::Parse(format!("{} snapshots for {} rows", states.len(), rows.len())));
    }
    Ok(Trajectory {
        reference,
        times: col(0),
        states,
        dist_l2: col(1),
        dist_h01: col(2),
        dist_hm1: col(3),
        energies: col(4),
    })
}
