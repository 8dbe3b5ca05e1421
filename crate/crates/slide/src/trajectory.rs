//! Trajectory CSV: one row per completed step.

use std::fs::{self, File};
use std::io::{self, Read, Write};
use std::path::Path;

use planar_slide_core::sysid::ObservedStep;
use planar_slide_core::{AppliedImpulse, SliderState, TrajectoryRecord};
use thiserror::Error;

pub const COLUMNS: [&str; 23] = [
    "t",
    "q_x",
    "q_y",
    "theta_z",
    "v_x",
    "v_y",
    "w_z",
    "p_t",
    "p_o",
    "p_r",
    "sigma",
    "p_n",
    "a_x",
    "a_y",
    "in_hull",
    "in_patch",
    "p_x",
    "p_y",
    "p_xtau",
    "p_ytau",
    "p_ztau",
    "newton_iters",
    "residual_norm",
];

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("header does not match the trajectory schema (expected {expected:?}, got {found:?})")]
    Header {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("line {line}, column `{column}`: cannot parse {value:?}")]
    Value {
        line: u64,
        column: &'static str,
        value: String,
    },
}

/// 17 significant digits: enough to round-trip every f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn record_fields(r: &TrajectoryRecord) -> [String; 23] {
    let s = &r.state;
    let p = &r.impulse;
    let a = &r.applied;
    [
        num(s.t),
        num(s.q_x),
        num(s.q_y),
        num(s.theta_z),
        num(s.v_x),
        num(s.v_y),
        num(s.w_z),
        num(p.along_x),
        num(p.along_y),
        num(p.about_z),
        num(p.slip_speed),
        num(p.normal),
        num(r.ecp.x),
        num(r.ecp.y),
        flag(r.ecp.in_hull).into(),
        flag(r.ecp.in_patch).into(),
        num(a.linear[0]),
        num(a.linear[1]),
        num(a.angular[0]),
        num(a.angular[1]),
        num(a.angular[2]),
        r.diagnostics.newton_iters.to_string(),
        num(r.diagnostics.residual_norm),
    ]
}

pub fn write_csv<W: Write>(out: W, records: &[TrajectoryRecord]) -> Result<(), TrajectoryError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(record_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(
    path: impl AsRef<Path>,
    records: &[TrajectoryRecord],
) -> Result<(), TrajectoryError> {
    write_csv(File::create(path)?, records)
}

/// One parsed CSV row. Only the columns needed downstream are kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub state: SliderState,
    pub normal: f64,
    pub applied: AppliedImpulse,
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>, TrajectoryError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header != COLUMNS {
        return Err(TrajectoryError::Header {
            expected: COLUMNS.iter().map(|c| c.to_string()).collect(),
            found: header,
        });
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let get = |col: usize| -> Result<f64, TrajectoryError> {
            let raw = rec.get(col).unwrap_or("");
            raw.trim().parse().map_err(|_| TrajectoryError::Value {
                line,
                column: COLUMNS[col],
                value: raw.to_string(),
            })
        };
        rows.push(Row {
            state: SliderState {
                t: get(0)?,
                q_x: get(1)?,
                q_y: get(2)?,
                theta_z: get(3)?,
                v_x: get(4)?,
                v_y: get(5)?,
                w_z: get(6)?,
            },
            normal: get(11)?,
            applied: AppliedImpulse {
                linear: [get(16)?, get(17)?, 0.0],
                angular: [get(18)?, get(19)?, get(20)?],
            },
        });
    }
    Ok(rows)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<Row>, TrajectoryError> {
    read_csv(File::open(path)?)
}

/// Steps between consecutive rows. The loads of a row are the ones applied
/// during the step that ended at that row.
pub fn observed_steps(rows: &[Row]) -> Vec<ObservedStep> {
    rows.windows(2)
        .map(|w| ObservedStep {
            before: w[0].state,
            after: w[1].state,
            applied: w[1].applied,
            normal: w[1].normal,
        })
        .collect()
}

/// One `t value` file per column (except `t`) in `dir`, named `<column>.dat`.
pub fn write_plot_data(dir: impl AsRef<Path>, records: &[TrajectoryRecord]) -> io::Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let rows: Vec<[String; 23]> = records.iter().map(record_fields).collect();
    for (col, name) in COLUMNS.iter().enumerate().skip(1) {
        let mut f = io::BufWriter::new(File::create(dir.join(format!("{name}.dat")))?);
        writeln!(f, "# t {name}")?;
        for r in &rows {
            writeln!(f, "{} {}", r[0], r[col])?;
        }
        f.flush()?;
    }
    Ok(())
}
