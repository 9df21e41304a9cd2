//! Wildfire risk rasters, per-line risk sampling and forecast tables.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::grid::Network;

/// Lead time of the published daily index forecasts, in days.
pub const DEFAULT_MAX_LEAD: usize = 7;

/// A north-up risk grid. `values` is row-major with row 0 the northernmost row;
/// the origin is the lower-left (south-west) corner.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRaster {
    pub origin_lat: f64,
    pub origin_lon: f64,
    pub cell_size: f64,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl RiskRaster {
    pub fn new(
        origin_lat: f64,
        origin_lon: f64,
        cell_size: f64,
        rows: usize,
        cols: usize,
        values: Vec<f64>,
    ) -> Result<Self, DataError> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(DataError::Risk(format!("cell size must be positive, got {cell_size}")));
        }
        if rows == 0 || cols == 0 || rows * cols != values.len() {
            return Err(DataError::Risk(format!(
                "raster is {rows}x{cols} but holds {} values",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(DataError::Risk(format!(
                "raster value {v} is not a non-negative number"
            )));
        }
        Ok(RiskRaster {
            origin_lat,
            origin_lon,
            cell_size,
            rows,
            cols,
            values,
        })
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Cell holding `(lat, lon)`, or `None` outside the extent. Points on the
    /// north or east edge belong to the last row/column.
    pub fn cell_of(&self, lat: f64, lon: f64) -> Option<(usize, usize)> {
        let u = (lon - self.origin_lon) / self.cell_size;
        let v = (lat - self.origin_lat) / self.cell_size;
        let col = grid_index(u, self.cols)?;
        let from_bottom = grid_index(v, self.rows)?;
        Some((self.rows - 1 - from_bottom, col))
    }

    /// Parses the plain-text grid format: a six-line header (`ncols`, `nrows`,
    /// `xllcorner`, `yllcorner`, `cellsize`, `nodata`) followed by row-major
    /// values, northernmost row first. No-data cells carry zero risk.
    pub fn parse_ascii(text: &str, origin: &Path) -> Result<Self, DataError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut header = [None::<f64>; 6];
        const KEYS: [&str; 6] = ["ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata"];
        for _ in 0..6 {
            let line = lines
                .next()
                .ok_or_else(|| DataError::parse(origin, "truncated raster header"))?;
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default().to_ascii_lowercase();
            let key = if key == "nodata_value" {
                "nodata".to_string()
            } else {
                key
            };
            let slot = KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| DataError::parse(origin, format!("unexpected header key `{key}`")))?;
            let value: f64 = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| DataError::parse(origin, format!("bad value for `{key}`")))?;
            header[slot] = Some(value);
        }
        let get = |i: usize| header[i].ok_or_else(|| DataError::parse(origin, format!("missing `{}`", KEYS[i])));
        let (ncols, nrows) = (get(0)?, get(1)?);
        if ncols.fract() != 0.0 || nrows.fract() != 0.0 || ncols < 1.0 || nrows < 1.0 {
            return Err(DataError::parse(origin, "ncols/nrows must be positive integers"));
        }
        let nodata = get(5)?;
        let mut values = Vec::with_capacity((ncols * nrows) as usize);
        for (i, tok) in lines.flat_map(|l| l.split_whitespace()).enumerate() {
            let v: f64 = tok
                .parse()
                .map_err(|_| DataError::parse(origin, format!("bad raster value `{tok}` at index {i}")))?;
            values.push(if v == nodata { 0.0 } else { v });
        }
        RiskRaster::new(get(3)?, get(2)?, get(4)?, nrows as usize, ncols as usize, values)
    }

    pub fn load_ascii(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
        Self::parse_ascii(&text, path)
    }

    pub fn to_ascii(&self) -> String {
        let mut out = format!(
            "ncols {}\nnrows {}\nxllcorner {}\nyllcorner {}\ncellsize {}\nnodata -9999\n",
            self.cols, self.rows, self.origin_lon, self.origin_lat, self.cell_size
        );
        for row in self.values.chunks(self.cols) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn grid_index(coord: f64, count: usize) -> Option<usize> {
    if !(coord >= 0.0 && coord <= count as f64) {
        return None;
    }
    Some((coord.floor() as usize).min(count - 1))
}

/// Highest raster value over every cell the polyline passes through.
///
/// Each segment is split at every crossing of a cell boundary; the cell of
/// each piece (and of every vertex) is visited, so the result does not depend
/// on how finely the polyline is subdivided.
pub fn sample_line_risk(polyline: &[[f64; 2]], raster: &RiskRaster) -> Result<f64, DataError> {
    if polyline.is_empty() {
        return Err(DataError::Risk("polyline is empty".into()));
    }
    let mut best: Option<f64> = None;
    let mut visit = |lat: f64, lon: f64| {
        if let Some((r, c)) = raster.cell_of(lat, lon) {
            let v = raster.value(r, c);
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    };
    for p in polyline {
        visit(p[0], p[1]);
    }
    let cs = raster.cell_size;
    for seg in polyline.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let (u0, u1) = ((a[1] - raster.origin_lon) / cs, (b[1] - raster.origin_lon) / cs);
        let (v0, v1) = ((a[0] - raster.origin_lat) / cs, (b[0] - raster.origin_lat) / cs);
        let mut cuts = vec![0.0, 1.0];
        push_crossings(u0, u1, &mut cuts);
        push_crossings(v0, v1, &mut cuts);
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                let t = 0.5 * (w[0] + w[1]);
                visit(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]));
            }
        }
    }
    best.ok_or_else(|| DataError::Risk("polyline lies entirely outside the raster extent".into()))
}

fn push_crossings(c0: f64, c1: f64, cuts: &mut Vec<f64>) {
    if c0 == c1 {
        return;
    }
    let (lo, hi) = if c0 < c1 { (c0, c1) } else { (c1, c0) };
    let mut k = lo.floor() + 1.0;
    while k < hi {
        cuts.push((k - c0) / (c1 - c0));
        k += 1.0;
    }
}

/// Samples every line of `net` against `raster`. Lines without a polyline
/// cannot be sampled and produce an error naming the line.
pub fn line_risks_from_raster(net: &Network, raster: &RiskRaster) -> Result<Vec<f64>, DataError> {
    net.lines
        .iter()
        .map(|line| {
            if line.polyline.is_empty() {
                return Err(DataError::Risk(format!(
                    "line `{}` has no polyline; supply its risk directly",
                    line.id
                )));
            }
            sample_line_risk(&line.polyline, raster).map_err(|e| DataError::Risk(format!("line `{}`: {e}", line.id)))
        })
        .collect()
}

/// One row of the risk CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastEntry {
    pub issue_day: usize,
    pub target_day: usize,
    pub line_id: String,
    pub risk: f64,
}

/// Daily risk forecasts per line. The realized risk of a day is the entry
/// issued on that same day.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskForecastSet {
    line_ids: Vec<String>,
    num_days: usize,
    max_lead: usize,
    issue_days: BTreeSet<usize>,
    // [issue][lead][line]; NaN where no forecast exists.
    values: Vec<f64>,
}

impl RiskForecastSet {
    /// Builds a complete forecast set. Every issue day that appears must carry
    /// a value for every line and every lead up to the largest lead present,
    /// truncated at the last study day.
    pub fn from_entries(
        line_ids: Vec<String>,
        num_days: usize,
        entries: impl IntoIterator<Item = ForecastEntry>,
    ) -> Result<Self, DataError> {
        let entries: Vec<ForecastEntry> = entries.into_iter().collect();
        if num_days == 0 {
            return Err(DataError::Risk("study window has no days".into()));
        }
        let lookup: std::collections::HashMap<&str, usize> =
            line_ids.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if lookup.len() != line_ids.len() {
            return Err(DataError::Risk("duplicate line ids".into()));
        }
        let mut max_lead = 0;
        let mut issue_days = BTreeSet::new();
        for e in &entries {
            if e.target_day < e.issue_day {
                return Err(DataError::Risk(format!(
                    "target day {} precedes issue day {} for line `{}`",
                    e.target_day, e.issue_day, e.line_id
                )));
            }
            if e.target_day >= num_days {
                return Err(DataError::Risk(format!(
                    "target day {} outside the {num_days}-day study window",
                    e.target_day
                )));
            }
            if !lookup.contains_key(e.line_id.as_str()) {
                return Err(DataError::Risk(format!("unknown line id `{}`", e.line_id)));
            }
            if !(e.risk.is_finite() && e.risk >= 0.0) {
                return Err(DataError::Risk(format!(
                    "risk {} for ({}, {}, {}) is not a non-negative number",
                    e.risk, e.issue_day, e.target_day, e.line_id
                )));
            }
            max_lead = max_lead.max(e.target_day - e.issue_day);
            issue_days.insert(e.issue_day);
        }
        if issue_days.is_empty() {
            return Err(DataError::Risk("no forecast entries".into()));
        }
        let n_lines = line_ids.len();
        let mut values = vec![f64::NAN; num_days * (max_lead + 1) * n_lines];
        let slot = |i: usize, lead: usize, l: usize| (i * (max_lead + 1) + lead) * n_lines + l;
        for e in &entries {
            let k = slot(e.issue_day, e.target_day - e.issue_day, lookup[e.line_id.as_str()]);
            if !values[k].is_nan() {
                return Err(DataError::Risk(format!(
                    "duplicate entry ({}, {}, {})",
                    e.issue_day, e.target_day, e.line_id
                )));
            }
            values[k] = e.risk;
        }
        for &issue in &issue_days {
            for target in issue..=(issue + max_lead).min(num_days - 1) {
                for (l, id) in line_ids.iter().enumerate() {
                    if values[slot(issue, target - issue, l)].is_nan() {
                        return Err(DataError::Risk(format!(
                            "missing forecast for issue day {issue}, target day {target}, line `{id}`"
                        )));
                    }
                }
            }
        }
        Ok(RiskForecastSet {
            line_ids,
            num_days,
            max_lead,
            issue_days,
            values,
        })
    }

    /// Forecasts that exactly equal the realized values: `realized[day][line]`.
    pub fn perfect_foresight(line_ids: Vec<String>, realized: &[Vec<f64>], max_lead: usize) -> Result<Self, DataError> {
        let num_days = realized.len();
        let mut entries = Vec::new();
        for issue in 0..num_days {
            for target in issue..=(issue + max_lead).min(num_days.saturating_sub(1)) {
                for (l, id) in line_ids.iter().enumerate() {
                    let risk = *realized[target]
                        .get(l)
                        .ok_or_else(|| DataError::Risk(format!("day {target} has no value for line `{id}`")))?;
                    entries.push(ForecastEntry {
                        issue_day: issue,
                        target_day: target,
                        line_id: id.clone(),
                        risk,
                    });
                }
            }
        }
        Self::from_entries(line_ids, num_days, entries)
    }

    pub fn line_ids(&self) -> &[String] {
        &self.line_ids
    }

    pub fn num_days(&self) -> usize {
        self.num_days
    }

    pub fn max_lead(&self) -> usize {
        self.max_lead
    }

    pub fn issue_days(&self) -> impl Iterator<Item = usize> + '_ {
        self.issue_days.iter().copied()
    }

    pub fn get(&self, issue: usize, target: usize, line: usize) -> Option<f64> {
        if target < issue || target - issue > self.max_lead || target >= self.num_days {
            return None;
        }
        let k = (issue * (self.max_lead + 1) + target - issue) * self.line_ids.len() + line;
        self.values.get(k).copied().filter(|v| !v.is_nan())
    }

    /// Same-day (realized) risk of every line on `day`.
    pub fn realized(&self, day: usize) -> Option<Vec<f64>> {
        (0..self.line_ids.len()).map(|l| self.get(day, day, l)).collect()
    }

    pub fn entry_count(&self) -> usize {
        self.values.iter().filter(|v| !v.is_nan()).count()
    }

    pub fn entries(&self) -> Vec<ForecastEntry> {
        let mut out = Vec::with_capacity(self.entry_count());
        for &issue in &self.issue_days {
            for target in issue..=(issue + self.max_lead).min(self.num_days - 1) {
                for (l, id) in self.line_ids.iter().enumerate() {
                    if let Some(risk) = self.get(issue, target, l) {
                        out.push(ForecastEntry {
                            issue_day: issue,
                            target_day: target,
                            line_id: id.clone(),
                            risk,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| DataError::parse(path, e))?;
        for e in self.entries() {
            w.serialize(&e).map_err(|e| DataError::parse(path, e))?;
        }
        w.flush().map_err(|e| DataError::io(path, e))
    }
}

const RISK_HEADER: [&str; 4] = ["issue_day", "target_day", "line_id", "risk"];

/// Reads the risk CSV (`issue_day,target_day,line_id,risk`) for `net`. Line
/// order of the result follows the network.
pub fn load_forecasts(path: impl AsRef<Path>, net: &Network) -> Result<RiskForecastSet, DataError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| DataError::parse(path, e))?;
    let header = reader.headers().map_err(|e| DataError::parse(path, e))?.clone();
    if header.iter().ne(RISK_HEADER.iter().copied()) {
        return Err(DataError::parse(
            path,
            format!("expected header `{}`", RISK_HEADER.join(",")),
        ));
    }
    let mut entries = Vec::new();
    for (i, rec) in reader.deserialize::<ForecastEntry>().enumerate() {
        entries.push(rec.map_err(|e| DataError::parse(path, format!("row {}: {e}", i + 2)))?);
    }
    let ids = net.lines.iter().map(|l| l.id.clone()).collect();
    RiskForecastSet::from_entries(ids, net.num_days, entries)
}

/// Builds forecasts by sampling one raster per `(issue_day, target_day)`.
pub fn forecasts_from_rasters(
    net: &Network,
    rasters: &[(usize, usize, RiskRaster)],
) -> Result<RiskForecastSet, DataError> {
    let mut entries = Vec::new();
    for (issue, target, raster) in rasters {
        let risks = line_risks_from_raster(net, raster)?;
        for (line, risk) in net.lines.iter().zip(risks) {
            entries.push(ForecastEntry {
                issue_day: *issue,
                target_day: *target,
                line_id: line.id.clone(),
                risk,
            });
        }
    }
    let ids = net.lines.iter().map(|l| l.id.clone()).collect();
    RiskForecastSet::from_entries(ids, net.num_days, entries)
}

#[derive(Debug, Deserialize)]
struct ManifestRow {
    issue_day: usize,
    target_day: usize,
    path: PathBuf,
}

/// Loads risk from rasters. `path` is either a manifest CSV
/// (`issue_day,target_day,path`, paths relative to the manifest) or a single
/// grid file, which is then taken as the risk of every day at every lead.
pub fn load_raster_forecasts(path: impl AsRef<Path>, net: &Network) -> Result<RiskForecastSet, DataError> {
    let path = path.as_ref();
    let is_manifest = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let mut rasters = Vec::new();
    if is_manifest {
        let dir = path.parent().unwrap_or(Path::new("."));
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| DataError::parse(path, e))?;
        for (i, row) in reader.deserialize::<ManifestRow>().enumerate() {
            let row = row.map_err(|e| DataError::parse(path, format!("row {}: {e}", i + 2)))?;
            rasters.push((
                row.issue_day,
                row.target_day,
                RiskRaster::load_ascii(dir.join(&row.path))?,
            ));
        }
    } else {
        let raster = RiskRaster::load_ascii(path)?;
        for issue in 0..net.num_days {
            for target in issue..=(issue + DEFAULT_MAX_LEAD).min(net.num_days - 1) {
                rasters.push((issue, target, raster.clone()));
            }
        }
    }
    forecasts_from_rasters(net, &rasters)
}

/// Per-period line risks for one rolling-horizon solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskWindow {
    /// Study day of the first period.
    pub first_day: usize,
    /// `rows[k][line]` is the risk for day `first_day + k`. Row 0 is realized.
    pub rows: Vec<Vec<f64>>,
    /// True when the requested horizon exceeded the forecast lead.
    pub clamped: bool,
}

impl RiskWindow {
    pub fn periods(&self) -> usize {
        self.rows.len()
    }

    pub fn days(&self) -> std::ops::Range<usize> {
        self.first_day..self.first_day + self.rows.len()
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().map(|r| total_system_risk(r)).sum()
    }
}

/// Risk matrix for days `issue_day ..= min(issue_day + horizon, last_day)`.
/// The first row holds realized values, the rest forecasts issued on
/// `issue_day`. Horizons beyond the available lead are clamped with a warning.
pub fn forecast_window(
    fs: &RiskForecastSet,
    issue_day: usize,
    horizon: usize,
    net: &Network,
) -> Result<RiskWindow, DataError> {
    if fs.line_ids.len() != net.lines.len() || fs.line_ids.iter().zip(&net.lines).any(|(a, b)| *a != b.id) {
        return Err(DataError::Risk("forecast lines do not match the network".into()));
    }
    if issue_day >= fs.num_days || !fs.issue_days.contains(&issue_day) {
        return Err(DataError::Risk(format!("no forecasts issued on day {issue_day}")));
    }
    // Only a cut that loses study days counts as clamping.
    let clamped = horizon > fs.max_lead && issue_day + fs.max_lead < fs.num_days - 1;
    if clamped {
        warn!("horizon {horizon} exceeds forecast lead {}; clamping", fs.max_lead);
    }
    let last = (issue_day + horizon.min(fs.max_lead)).min(fs.num_days - 1);
    let rows = (issue_day..=last)
        .map(|target| {
            (0..fs.line_ids.len())
                .map(|l| fs.get(issue_day, target, l).expect("completeness checked at load"))
                .collect()
        })
        .collect();
    Ok(RiskWindow {
        first_day: issue_day,
        rows,
        clamped,
    })
}

/// Sum of the risk of every line.
pub fn total_system_risk(row: &[f64]) -> f64 {
    row.iter().sum()
}
