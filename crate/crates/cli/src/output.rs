//! Artifact writers shared by every run mode: a metadata file that
//! round-trips through the config parser, versioned comma-separated
//! tables, and a key = value summary.
//!
//! All numbers are written with Rust's shortest round-trip float
//! formatting, so identical runs produce byte-identical files and the
//! values parse back to the exact binary doubles that were computed.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use stokeswim_core::RunConfig;

/// Schema tag and column row for each table. The tag line starts with
/// `#` so plotting tools that honor comment characters skip it; golden
/// tests pin both strings, and the version bumps whenever a column is
/// added, removed, or changes meaning.
pub const PIVOT_SCHEMA: &str = "# stokeswim pivot-trajectory v1";
pub const PIVOT_HEADER: &str = "t_s,beta_rad,beta_dot_rad_per_s,f_tail1_z_n,f_tail2_z_n,\
tail_torque_y_n_m,head_drag_torque_y_n_m,righting_torque_y_n_m,thrust_number,torque_number";

pub const FREE_SCHEMA: &str = "# stokeswim free-trajectory v1";
pub const FREE_HEADER: &str = "t_s,x_m,y_m,z_m,vx_m_per_s,vy_m_per_s,vz_m_per_s,qw,qx,qy,qz,\
wx_rad_per_s,wy_rad_per_s,wz_rad_per_s,f_tail1_z_n,f_tail2_z_n,tail_torque_y_n_m,tilt_rad";

pub const GRID_SCHEMA: &str = "# stokeswim design-grid v1";
pub const GRID_HEADER: &str =
    "wavelength_over_length,radius_over_wavelength,thrust_number,torque_number";

pub const SPACING_SCHEMA: &str = "# stokeswim spacing-sweep v1";
pub const SPACING_HEADER: &str =
    "spacing_over_radius,counter_thrust_number,co_thrust_number,torque_number";

pub const CALIBRATION_SCHEMA: &str = "# stokeswim calibration v1";
pub const CALIBRATION_HEADER: &str = "rate_rad_per_s,down_thrust_tail1_n,down_thrust_tail2_n";

pub const SUMMARY_SCHEMA: &str = "# stokeswim summary v1";

/// Shortest decimal that parses back to exactly `v`.
pub fn float(v: f64) -> String {
    format!("{v:?}")
}

/// Resolved configuration plus the code version. Comment lines keep
/// the file parseable by the config reader, so a metadata file can be
/// fed straight back in via `--config`.
pub fn write_metadata(dir: &Path, config: &RunConfig) -> io::Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "# stokeswim {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "# resolved run configuration; parses back to these exact settings"
    );
    s.push_str(&config.echo());
    fs::write(dir.join("metadata.txt"), s)
}

/// One table: schema tag, header row, then all-numeric rows.
pub fn write_table(
    dir: &Path,
    name: &str,
    schema: &str,
    header: &str,
    rows: &[Vec<f64>],
) -> io::Result<()> {
    let mut s = String::with_capacity(rows.len() * 64 + 256);
    let _ = writeln!(s, "{schema}");
    let _ = writeln!(s, "{header}");
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{v:?}");
        }
        s.push('\n');
    }
    fs::write(dir.join(name), s)
}

/// Key = value summary lines in the order given.
pub fn write_summary(dir: &Path, entries: &[(&str, String)]) -> io::Result<()> {
    let mut s = String::from(SUMMARY_SCHEMA);
    s.push('\n');
    for (key, value) in entries {
        let _ = writeln!(s, "{key} = {value}");
    }
    fs::write(dir.join("summary.txt"), s)
}
