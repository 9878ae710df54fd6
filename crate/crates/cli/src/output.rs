//! Trajectory CSV, report files and atomic writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use so3_track::analysis::{format_real, ConvergenceReport};
use so3_track::integrator::TrajectoryRecord;
use tempfile::NamedTempFile;

use crate::error::CliError;

pub const CSV_HEADER: &str = "t,Rr11,Rr12,Rr13,Rr21,Rr22,Rr23,Rr31,Rr32,Rr33,\
R111,R112,R113,R121,R122,R123,R131,R132,R133,theta,d_R,d_F,W,omega1_norm,regularized";

pub fn trajectory_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 480 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format_real(r.t));
        for x in r.rr.to_row_array().into_iter().chain(r.r1.to_row_array()) {
            out.push(',');
            out.push_str(&format_real(x));
        }
        let d_r = r.d_r.unwrap_or(f64::NAN);
        for x in [r.theta, d_r, r.d_f, r.w, r.omega1_norm] {
            out.push(',');
            out.push_str(&format_real(x));
        }
        let _ = writeln!(out, ",{}", u8::from(r.regularized));
    }
    out
}

pub fn report_text(report: &ConvergenceReport) -> String {
    report.to_key_value()
}

/// Writes `contents` to a temporary file beside `path` and renames it into
/// place, so `path` either holds the full contents or is left untouched.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(parent).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use so3_track::so3::Rotation;

    #[test]
    fn header_has_25_columns() {
        assert_eq!(CSV_HEADER.split(',').count(), 25);
    }

    #[test]
    fn row_layout() {
        let r = TrajectoryRecord {
            t: 0.5,
            rr: Rotation::identity(),
            r1: Rotation::identity(),
            theta: 0.0,
            d_r: None,
            d_f: 0.0,
            w: 0.0,
            omega1_norm: 1.0,
            regularized: true,
        };
        let text = trajectory_csv(&[r]);
        let row = text.lines().nth(1).unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 25);
        assert_eq!(cells[0], "5.0000000000000000e-1");
        assert_eq!(cells[1], "1.0000000000000000e0");
        assert_eq!(cells[20], "nan");
        assert_eq!(cells[24], "1");
        for c in &cells[..24] {
            assert!(c.parse::<f64>().is_ok(), "{c}");
        }
    }

    #[test]
    fn atomic_write_into_missing_directory_fails_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("missing").join("out.csv");
        assert!(matches!(write_atomic(&target, "x"), Err(CliError::Io { .. })));
        assert!(!target.exists());
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out.txt");
        write_atomic(&target, "first").unwrap();
        write_atomic(&target, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&target).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
