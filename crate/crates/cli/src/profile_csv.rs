//! Wave profiles as CSV.
//!
//! ```text
//! # theta=-5.5101168804651004e-16
//! # L=3.0000000000000000e1
//! # h=5.0000000000000003e-2
//! # left=e2;1.0000000000000000e0;0.0000000000000000e0
//! # right=e3;0.0000000000000000e0;1.0000000000000000e0
//! # residual_norm=2.7977620220553945e-13
//! # iterations=5
//! x,u1,u2,theta_meta
//! -3.0000000000000000e1,1.0000000000000000e0,0.0000000000000000e0,-5.5101168804651004e-16
//! ...
//! ```
//!
//! Every number is written with 17 significant digits, which round-trips an
//! `f64` exactly. The last column repeats `theta` so a bare table still
//! carries the speed.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nbarrier_core::{Equilibrium, EquilibriumLabel, WaveProfile};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProfileCsvError {
    #[error("profile file not found: {}", .0.display())]
    NotFound(PathBuf),
    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed header in {}: {reason}", path.display())]
    MalformedHeader { path: PathBuf, reason: String },
    #[error("malformed metadata `{key}` in {}: {reason}", path.display())]
    MalformedMetadata { path: PathBuf, key: String, reason: String },
    #[error("malformed row {line} in {}: {reason}", path.display())]
    MalformedRow { path: PathBuf, line: u64, reason: String },
    /// `row` counts data rows from 0.
    #[error("grid is not strictly increasing at data row {row} in {}", path.display())]
    NonMonotoneGrid { path: PathBuf, row: usize },
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn state_field(e: &Equilibrium) -> String {
    let mut s = e.label.as_str().to_string();
    for &x in &e.state {
        s.push(';');
        s.push_str(&num(x));
    }
    s
}

/// Writes `profile` to `path`, creating or truncating the file.
pub fn write_profile_csv(profile: &WaveProfile, path: &Path) -> Result<(), ProfileCsvError> {
    let io_err = |source| ProfileCsvError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    let preamble = [
        ("theta", num(profile.theta)),
        ("L", num(profile.half_length())),
        ("h", num(profile.spacing())),
        ("left", state_field(&profile.left)),
        ("right", state_field(&profile.right)),
        ("residual_norm", num(profile.residual_norm)),
        ("iterations", profile.iterations.to_string()),
    ];
    for (key, value) in preamble {
        writeln!(out, "# {key}={value}").map_err(io_err)?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header = vec!["x".to_string()];
        header.extend((1..=profile.species()).map(|i| format!("u{i}")));
        header.push("theta_meta".to_string());
        w.write_record(&header).map_err(|e| io_err(e.into()))?;
        let theta = num(profile.theta);
        for j in 0..profile.nodes() {
            let mut row = vec![num(profile.grid[j])];
            row.extend(profile.values.iter().map(|s| num(s[j])));
            row.push(theta.clone());
            w.write_record(&row).map_err(|e| io_err(e.into()))?;
        }
        w.flush().map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

#[derive(Default)]
struct Metadata {
    theta: Option<f64>,
    left: Option<Equilibrium>,
    right: Option<Equilibrium>,
    residual_norm: Option<f64>,
    iterations: Option<usize>,
}

/// Reads a profile written by [`write_profile_csv`].
pub fn read_profile_csv(path: &Path) -> Result<WaveProfile, ProfileCsvError> {
    let file = File::open(path).map_err(|source| match source.kind() {
        io::ErrorKind::NotFound => ProfileCsvError::NotFound(path.to_path_buf()),
        _ => ProfileCsvError::Io {
            path: path.to_path_buf(),
            source,
        },
    })?;
    let io_err = |source| ProfileCsvError::Io {
        path: path.to_path_buf(),
        source,
    };
    let meta_err = |key: &str, reason: String| ProfileCsvError::MalformedMetadata {
        path: path.to_path_buf(),
        key: key.to_string(),
        reason,
    };

    let mut reader = BufReader::new(file);
    let mut meta = Metadata::default();
    let mut preamble_lines = 0u64;
    let mut body = String::new();
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line).map_err(io_err)? == 0 {
            break;
        }
        let Some(entry) = line.strip_prefix('#') else {
            body.push_str(&line);
            break;
        };
        preamble_lines += 1;
        let entry = entry.trim();
        let Some((key, value)) = entry.split_once('=') else {
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let float = |v: &str| v.parse::<f64>().map_err(|e| meta_err(key, e.to_string()));
        match key {
            "theta" => meta.theta = Some(float(value)?),
            "residual_norm" => meta.residual_norm = Some(float(value)?),
            "iterations" => meta.iterations = Some(value.parse().map_err(|e: std::num::ParseIntError| meta_err(key, e.to_string()))?),
            "left" | "right" => {
                let mut parts = value.split(';');
                let label = parts.next().unwrap_or_default();
                let label = EquilibriumLabel::parse(label).ok_or_else(|| meta_err(key, format!("unknown label `{label}`")))?;
                let state = parts.map(float).collect::<Result<Vec<_>, _>>()?;
                let e = Equilibrium::new(state, label);
                if key == "left" {
                    meta.left = Some(e);
                } else {
                    meta.right = Some(e);
                }
            }
            // L and h are implied by the grid
            _ => {}
        }
    }
    reader.read_to_string(&mut body).map_err(io_err)?;

    let mut rows = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header_err = |reason: String| ProfileCsvError::MalformedHeader {
        path: path.to_path_buf(),
        reason,
    };
    let header = rows.headers().map_err(|e| header_err(e.to_string()))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.len() < 3 || names[0] != "x" || names[names.len() - 1] != "theta_meta" {
        return Err(header_err(format!("expected `x,u1,...,un,theta_meta`, found `{}`", names.join(","))));
    }
    let n = names.len() - 2;
    for (i, name) in names[1..=n].iter().enumerate() {
        if *name != format!("u{}", i + 1) {
            return Err(header_err(format!("column {} should be `u{}`, found `{name}`", i + 2, i + 1)));
        }
    }

    let mut grid = Vec::new();
    let mut values = vec![Vec::new(); n];
    let mut theta_col = None;
    for (row, record) in rows.records().enumerate() {
        // header is line 1 of the body
        let line = preamble_lines + row as u64 + 2;
        let row_err = |reason: String| ProfileCsvError::MalformedRow {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let record = record.map_err(|e| row_err(e.to_string()))?;
        let parsed = record
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|e| row_err(format!("`{f}`: {e}"))))
            .collect::<Result<Vec<f64>, _>>()?;
        if parsed.iter().any(|v| !v.is_finite()) {
            return Err(row_err("non-finite value".into()));
        }
        if let Some(&prev) = grid.last() {
            // values are finite here, so this is the negation of `>`
            if parsed[0] <= prev {
                return Err(ProfileCsvError::NonMonotoneGrid {
                    path: path.to_path_buf(),
                    row,
                });
            }
        }
        grid.push(parsed[0]);
        for i in 0..n {
            values[i].push(parsed[i + 1]);
        }
        let t = parsed[n + 1];
        match theta_col {
            None => theta_col = Some(t),
            Some(prev) if prev != t => return Err(row_err("theta_meta differs between rows".into())),
            _ => {}
        }
    }
    if grid.len() < 3 {
        return Err(header_err(format!("{} data rows, need at least 3", grid.len())));
    }
    let theta = match (meta.theta, theta_col) {
        (Some(a), Some(b)) if a != b => return Err(meta_err("theta", "disagrees with the theta_meta column".into())),
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => unreachable!("at least one data row"),
    };
    let endpoint = |j: usize, label| Equilibrium::new(values.iter().map(|s| s[j]).collect(), label);
    let last = grid.len() - 1;
    let left = meta.left.unwrap_or_else(|| endpoint(0, EquilibriumLabel::Custom));
    let right = meta.right.unwrap_or_else(|| endpoint(last, EquilibriumLabel::Custom));
    for (key, e) in [("left", &left), ("right", &right)] {
        if e.state.len() != n {
            return Err(meta_err(key, format!("{} components for {n} species", e.state.len())));
        }
    }
    Ok(WaveProfile {
        grid,
        values,
        theta,
        left,
        right,
        residual_norm: meta.residual_norm.unwrap_or(f64::NAN),
        iterations: meta.iterations.unwrap_or(0),
    })
}
