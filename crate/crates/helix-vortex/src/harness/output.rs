//! CSV and manifest writers.
//!
//! Every float is written with 17 significant digits so that files
//! round-trip bitwise and runs can be compared byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::Result;
use crate::vortex_sim::Snapshot;

/// Formats a float with 17 significant digits, enough to reconstruct the
/// exact bit pattern.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a CSV file with the given header and pre-formatted rows.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * 64 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        let _ = writeln!(text, "{}", row.join(","));
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub const DIAGNOSTICS_HEADER: &str =
    "t,mass,E_pair,E_star,M1,M2,Mstar,p1,p2,ps1,ps2,D1,D2,mass_out";

/// Writes the diagnostics series, one row per recorded time.
pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            [
                r.t,
                r.mass,
                r.e_pair,
                r.e_star,
                r.m1,
                r.m2,
                r.m_star,
                r.p.x1,
                r.p.x2,
                r.p_star.x1,
                r.p_star.x2,
                r.d1,
                r.d2,
                r.mass_out_sqrt_eps,
            ]
            .iter()
            .map(|&v| fmt_float(v))
            .collect()
        })
        .collect();
    write_csv(path, DIAGNOSTICS_HEADER, &rows)
}

/// Writes one particle snapshot as `t,x1,x2,gamma` rows.
pub fn write_particles(path: &Path, snapshot: &Snapshot) -> Result<()> {
    let rows: Vec<Vec<String>> = snapshot
        .field
        .positions
        .iter()
        .zip(&snapshot.field.circulations)
        .map(|(x, &g)| {
            vec![fmt_float(snapshot.t), fmt_float(x.x1), fmt_float(x.x2), fmt_float(g)]
        })
        .collect();
    write_csv(path, "t,x1,x2,gamma", &rows)
}
