//! Result files: structured trajectory, per-day CSV, JSON summary, SVG charts
//! and sweep tables. Every report is derived from a [`RealizedTrajectory`]
//! alone, so re-emitting from a saved results file reproduces it byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::horizon::{
    line_risk_stats, realized_metrics, GroupStats, LineRiskStats, RealizedSummary, RealizedTrajectory, SweepRow,
};

pub const RESULTS_FILE: &str = "results.json";
pub const DAYS_FILE: &str = "days.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const RISK_SVG: &str = "risk.svg";
pub const LOAD_SVG: &str = "load.svg";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_JSON: &str = "sweep.json";

pub const DAYS_HEADER: [&str; 11] = [
    "day",
    "load_served_MW",
    "load_served_pct",
    "risk_no_shutoff",
    "risk_with_shutoff",
    "vulnerability",
    "deenergizations",
    "reenergizations",
    "miles_restored",
    "gap",
    "wall_time",
];

pub const SWEEP_HEADER: [&str; 21] = [
    "axis",
    "value",
    "objective",
    "load_served_pct",
    "load_served_MW",
    "risk_no_shutoff",
    "risk_with_shutoff",
    "risk_reduction_pct",
    "vulnerability",
    "deenergizations",
    "reenergizations",
    "miles_restored",
    "energized_avg",
    "energized_min",
    "energized_max",
    "deenergized_avg",
    "deenergized_min",
    "deenergized_max",
    "max_gap",
    "wall_time",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmitFlags {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        EmitFlags {
            csv: true,
            json: true,
            svg: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub summary: RealizedSummary,
    pub line_risk: LineRiskStats,
}

/// Writes `bytes` to a sibling temporary file, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DataError> {
    let name = path
        .file_name()
        .ok_or_else(|| DataError::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes).map_err(|e| DataError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        DataError::io(path, e)
    })
}

fn ensure_dir(dir: &Path) -> Result<(), DataError> {
    fs::create_dir_all(dir).map_err(|e| DataError::io(dir, e))
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report types serialize");
    out.push(b'\n');
    out
}

/// Plain decimal text: shortest round-trip form, `.` separator, no grouping.
fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

pub fn days_csv(traj: &RealizedTrajectory) -> String {
    let mut out = DAYS_HEADER.join(",");
    out.push('\n');
    for d in &traj.days {
        let fields = [
            d.day.to_string(),
            num(d.load_served_mw),
            num(d.load_served_pct),
            num(d.risk_no_shutoff),
            num(d.risk_with_shutoff),
            num(d.vulnerability),
            d.deenergizations.to_string(),
            d.reenergizations.to_string(),
            num(d.miles_restored),
            num(d.solve.gap),
            num(d.solve.wall_time),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn summary_report(traj: &RealizedTrajectory) -> SummaryReport {
    SummaryReport {
        summary: realized_metrics(traj),
        line_risk: line_risk_stats(traj),
    }
}

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    dashed: bool,
    values: Vec<f64>,
}

/// Static line chart over study days.
fn line_chart(title: &str, y_label: &str, days: &[usize], series: &[Series]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 60.0;
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let y_max = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::max);
    let y_max = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
    let (d0, d1) = (
        days.first().copied().unwrap_or(0) as f64,
        days.last().copied().unwrap_or(0) as f64,
    );
    let span = if d1 > d0 { d1 - d0 } else { 1.0 };
    let px = |day: f64| {
        LEFT + if d1 > d0 {
            (day - d0) / span * plot_w
        } else {
            plot_w / 2.0
        }
    };
    let py = |v: f64| TOP + plot_h - v / y_max * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        TOP + plot_h
    );
    for i in 0..=4 {
        let v = y_max * i as f64 / 4.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            tick(v)
        );
    }
    let stride = days.len().div_ceil(12).max(1);
    for d in days.iter().step_by(stride) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{d}</text>"#,
            px(*d as f64),
            TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">day</text>"#,
        LEFT + plot_w / 2.0,
        H - 14.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let points: Vec<String> = days
            .iter()
            .zip(&ser.values)
            .map(|(d, v)| format!("{:.2},{:.2}", px(*d as f64), py(*v)))
            .collect();
        let dash = if ser.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="2"{dash} points="{}"/>"#,
            ser.color,
            points.join(" ")
        );
        for p in &points {
            let (x, y) = p.split_once(',').expect("formatted above");
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{}"/>"#, ser.color);
        }
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let lx = LEFT + plot_w - 200.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"{dash}/>"#,
            lx + 24.0,
            ser.color
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v >= 100.0 {
        format!("{v:.0}")
    } else if v >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn risk_svg(traj: &RealizedTrajectory) -> String {
    let days: Vec<usize> = traj.days.iter().map(|d| d.day).collect();
    line_chart(
        "Wildfire risk with and without shutoffs",
        "total line risk",
        &days,
        &[
            Series {
                label: "no shutoff",
                color: "#444444",
                dashed: true,
                values: traj.days.iter().map(|d| d.risk_no_shutoff).collect(),
            },
            Series {
                label: "with shutoff",
                color: "#d62728",
                dashed: false,
                values: traj.days.iter().map(|d| d.risk_with_shutoff).collect(),
            },
        ],
    )
}

pub fn load_svg(traj: &RealizedTrajectory) -> String {
    let days: Vec<usize> = traj.days.iter().map(|d| d.day).collect();
    line_chart(
        "Total system load served",
        "MW",
        &days,
        &[
            Series {
                label: "no shutoff",
                color: "#444444",
                dashed: true,
                values: traj.days.iter().map(|d| d.load_no_shutoff_mw).collect(),
            },
            Series {
                label: "with shutoff",
                color: "#1f77b4",
                dashed: false,
                values: traj.days.iter().map(|d| d.load_served_mw).collect(),
            },
        ],
    )
}

/// Writes the results file and the selected reports into `out`. Returns the
/// paths written.
pub fn emit_reports(traj: &RealizedTrajectory, out: &Path, flags: EmitFlags) -> Result<Vec<PathBuf>, DataError> {
    ensure_dir(out)?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<(), DataError> {
        let path = out.join(name);
        write_atomic(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    put(RESULTS_FILE, &json(traj))?;
    emit_views(traj, flags, &mut put)?;
    Ok(written)
}

fn emit_views(
    traj: &RealizedTrajectory,
    flags: EmitFlags,
    put: &mut dyn FnMut(&str, &[u8]) -> Result<(), DataError>,
) -> Result<(), DataError> {
    if flags.csv {
        put(DAYS_FILE, days_csv(traj).as_bytes())?;
    }
    if flags.json {
        put(SUMMARY_FILE, &json(&summary_report(traj)))?;
    }
    if flags.svg {
        put(RISK_SVG, risk_svg(traj).as_bytes())?;
        put(LOAD_SVG, load_svg(traj).as_bytes())?;
    }
    Ok(())
}

pub fn load_results(path: &Path) -> Result<RealizedTrajectory, DataError> {
    let text = fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| DataError::parse(path, e))
}

/// Regenerates the reports of a saved results file into `out` (the results
/// file itself is not rewritten).
pub fn reemit_reports(results: &Path, out: &Path, flags: EmitFlags) -> Result<Vec<PathBuf>, DataError> {
    let traj = load_results(results)?;
    ensure_dir(out)?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<(), DataError> {
        let path = out.join(name);
        write_atomic(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    emit_views(&traj, flags, &mut put)?;
    Ok(written)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = SWEEP_HEADER.join(",");
    out.push('\n');
    let stats = |g: Option<GroupStats>| match g {
        Some(g) => [num(g.avg), num(g.min), num(g.max)],
        None => [String::new(), String::new(), String::new()],
    };
    for row in rows {
        let mut fields = vec![row.axis.to_string(), num(row.value)];
        match &row.summary {
            Some(s) => fields.extend([
                num(s.objective),
                num(s.load_served_pct),
                num(s.total_load_served_mw),
                num(s.total_risk_no_shutoff),
                num(s.total_risk_with_shutoff),
                num(s.risk_reduction_pct),
                num(s.total_vulnerability),
                s.deenergizations.to_string(),
                s.reenergizations.to_string(),
                num(s.miles_restored),
            ]),
            None => fields.extend(std::iter::repeat_n(String::new(), 10)),
        }
        let lr = row.line_risk.unwrap_or(LineRiskStats {
            energized: None,
            deenergized: None,
        });
        fields.extend(stats(lr.energized));
        fields.extend(stats(lr.deenergized));
        match &row.summary {
            Some(s) => fields.extend([num(s.max_gap), num(s.total_wall_time)]),
            None => fields.extend([String::new(), String::new()]),
        }
        fields.push(csv_text(row.error.as_deref().unwrap_or("")));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
    } else {
        s.to_string()
    }
}

pub fn emit_sweep(rows: &[SweepRow], out: &Path, flags: EmitFlags) -> Result<Vec<PathBuf>, DataError> {
    ensure_dir(out)?;
    let mut written = Vec::new();
    let path = out.join(SWEEP_CSV);
    write_atomic(&path, sweep_csv(rows).as_bytes())?;
    written.push(path);
    if flags.json {
        let path = out.join(SWEEP_JSON);
        write_atomic(&path, &json(&rows))?;
        written.push(path);
    }
    Ok(written)
}
