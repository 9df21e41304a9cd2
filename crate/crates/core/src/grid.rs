//! Grid data model, scenario files and per-day operating snapshots.
//!
//! Power quantities are stored in MW exactly as they appear in scenario files;
//! conversion to per-unit on `base_mva` happens when the optimization model is
//! built.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DataError;

/// Polyline endpoints must sit on their bus coordinates within this many degrees.
pub const ENDPOINT_TOLERANCE_DEG: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    #[serde(default)]
    pub is_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    /// Series susceptance in per-unit, negative for an inductive branch
    /// (`b = -1/x`). DC flow is `-b * (theta_from - theta_to)`.
    pub susceptance_b: f64,
    /// MW.
    pub thermal_limit: f64,
    pub length_miles: f64,
    /// Ordered `[lat, lon]` vertices from `from_bus` to `to_bus`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub polyline: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    /// Available capacity per study day, MW.
    pub pmax_profile: Vec<f64>,
    pub base_pmax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Load {
    pub id: String,
    pub bus: String,
    /// Demand per study day, MW.
    pub demand_profile: Vec<f64>,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

/// A validated grid. Construct through [`Network::new`], [`load_network`] or
/// [`parse_network`]; all of them enforce the structural invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub num_days: usize,
    pub base_mva: f64,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    pub loads: Vec<Load>,
}

impl Network {
    pub fn new(
        num_days: usize,
        base_mva: f64,
        buses: Vec<Bus>,
        lines: Vec<Line>,
        generators: Vec<Generator>,
        loads: Vec<Load>,
    ) -> Result<Self, DataError> {
        let net = Network {
            num_days,
            base_mva,
            buses,
            lines,
            generators,
            loads,
        };
        net.validate()?;
        Ok(net)
    }

    /// Checks every structural invariant, naming the first violation found.
    pub fn validate(&self) -> Result<(), DataError> {
        let fail = |msg: String| Err(DataError::Validation(msg));

        if self.num_days == 0 {
            return fail("num_days must be at least 1".into());
        }
        if !(self.base_mva.is_finite() && self.base_mva > 0.0) {
            return fail(format!("base_mva must be positive, got {}", self.base_mva));
        }
        if self.buses.is_empty() {
            return fail("network has no buses".into());
        }

        let mut coords = HashMap::new();
        for bus in &self.buses {
            if !(bus.lat.is_finite() && bus.lon.is_finite()) {
                return fail(format!("bus `{}` has non-finite coordinates", bus.id));
            }
            if coords.insert(bus.id.as_str(), (bus.lat, bus.lon)).is_some() {
                return fail(format!("duplicate bus id `{}`", bus.id));
            }
        }
        let refs: Vec<&str> = self
            .buses
            .iter()
            .filter(|b| b.is_reference)
            .map(|b| b.id.as_str())
            .collect();
        if refs.len() != 1 {
            return fail(format!(
                "exactly one reference bus required, found {} ({})",
                refs.len(),
                refs.join(", ")
            ));
        }

        let mut seen = HashSet::new();
        for line in &self.lines {
            if !seen.insert(line.id.as_str()) {
                return fail(format!("duplicate line id `{}`", line.id));
            }
            let from = coords.get(line.from_bus.as_str()).ok_or_else(|| {
                DataError::Validation(format!("line `{}` references unknown bus `{}`", line.id, line.from_bus))
            })?;
            let to = coords.get(line.to_bus.as_str()).ok_or_else(|| {
                DataError::Validation(format!("line `{}` references unknown bus `{}`", line.id, line.to_bus))
            })?;
            if line.from_bus == line.to_bus {
                return fail(format!("line `{}` connects bus `{}` to itself", line.id, line.from_bus));
            }
            if !(line.susceptance_b.is_finite() && line.susceptance_b != 0.0) {
                return fail(format!("line `{}` needs a finite non-zero susceptance", line.id));
            }
            if !(line.thermal_limit.is_finite() && line.thermal_limit > 0.0) {
                return fail(format!("line `{}` thermal_limit must be positive", line.id));
            }
            if !(line.length_miles.is_finite() && line.length_miles > 0.0) {
                return fail(format!("line `{}` length_miles must be positive", line.id));
            }
            if !line.polyline.is_empty() {
                if line.polyline.len() < 2 {
                    return fail(format!("line `{}` polyline needs at least two vertices", line.id));
                }
                if line.polyline.iter().flatten().any(|v| !v.is_finite()) {
                    return fail(format!("line `{}` polyline has non-finite vertices", line.id));
                }
                let first = line.polyline[0];
                let last = line.polyline[line.polyline.len() - 1];
                if !near(first, *from) || !near(last, *to) {
                    return fail(format!(
                        "line `{}` polyline endpoints do not match buses `{}` and `{}`",
                        line.id, line.from_bus, line.to_bus
                    ));
                }
            }
        }

        seen.clear();
        for gen in &self.generators {
            if !seen.insert(gen.id.as_str()) {
                return fail(format!("duplicate generator id `{}`", gen.id));
            }
            if !coords.contains_key(gen.bus.as_str()) {
                return fail(format!("generator `{}` references unknown bus `{}`", gen.id, gen.bus));
            }
            if gen.pmax_profile.len() != self.num_days {
                return fail(format!(
                    "generator `{}` pmax_profile has {} values, expected {}",
                    gen.id,
                    gen.pmax_profile.len(),
                    self.num_days
                ));
            }
            if gen.pmax_profile.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return fail(format!("generator `{}` has a negative or non-finite pmax", gen.id));
            }
            if !(gen.base_pmax.is_finite() && gen.base_pmax >= 0.0) {
                return fail(format!("generator `{}` base_pmax must be non-negative", gen.id));
            }
        }

        seen.clear();
        for load in &self.loads {
            if !seen.insert(load.id.as_str()) {
                return fail(format!("duplicate load id `{}`", load.id));
            }
            if !coords.contains_key(load.bus.as_str()) {
                return fail(format!("load `{}` references unknown bus `{}`", load.id, load.bus));
            }
            if load.demand_profile.len() != self.num_days {
                return fail(format!(
                    "load `{}` demand_profile has {} values, expected {}",
                    load.id,
                    load.demand_profile.len(),
                    self.num_days
                ));
            }
            if load.demand_profile.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return fail(format!("load `{}` has a negative or non-finite demand", load.id));
            }
            if !(load.weight.is_finite() && load.weight > 0.0) {
                return fail(format!("load `{}` weight must be positive", load.id));
            }
        }
        Ok(())
    }

    pub fn bus_index(&self) -> HashMap<&str, usize> {
        self.buses.iter().enumerate().map(|(i, b)| (b.id.as_str(), i)).collect()
    }

    pub fn line_position(&self, id: &str) -> Option<usize> {
        self.lines.iter().position(|l| l.id == id)
    }

    pub fn reference_bus(&self) -> usize {
        self.buses
            .iter()
            .position(|b| b.is_reference)
            .expect("validated network has a reference bus")
    }

    /// Total demand on `day` in MW, unweighted.
    pub fn total_demand(&self, day: usize) -> f64 {
        self.loads.iter().map(|l| l.demand_profile[day]).sum()
    }

    pub fn total_line_miles(&self) -> f64 {
        self.lines.iter().map(|l| l.length_miles).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }
}

fn near(a: [f64; 2], b: (f64, f64)) -> bool {
    (a[0] - b.0).abs() <= ENDPOINT_TOLERANCE_DEG && (a[1] - b.1).abs() <= ENDPOINT_TOLERANCE_DEG
}

/// Parses and validates a scenario document. `origin` only labels errors.
pub fn parse_network(text: &str, origin: &Path) -> Result<Network, DataError> {
    let net: Network = serde_json::from_str(text).map_err(|e| DataError::parse(origin, e))?;
    net.validate()?;
    Ok(net)
}

pub fn load_network(path: impl AsRef<Path>) -> Result<Network, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    parse_network(&text, path)
}

pub fn save_network(net: &Network, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    std::fs::write(path, net.to_json()).map_err(|e| DataError::io(path, e))
}

/// Multiplies every demand and every generator capacity profile value by
/// `factor`. Nameplate `base_pmax` and all other fields are left untouched.
pub fn scale_loads(net: &Network, factor: f64) -> Result<Network, DataError> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(DataError::InvalidArgument(format!(
            "scale factor must be positive, got {factor}"
        )));
    }
    let mut out = net.clone();
    for load in &mut out.loads {
        load.demand_profile.iter_mut().for_each(|v| *v *= factor);
    }
    for gen in &mut out.generators {
        gen.pmax_profile.iter_mut().for_each(|v| *v *= factor);
    }
    Ok(out)
}

/// Hourly series used to pick one representative operating hour per day.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HourlyProfiles {
    /// Load id -> hourly demand, MW.
    pub demand: BTreeMap<String, Vec<f64>>,
    /// Generator id -> hourly available capacity, MW (renewables).
    #[serde(default)]
    pub renewable_caps: BTreeMap<String, Vec<f64>>,
}

impl HourlyProfiles {
    fn hour_count(&self) -> Result<usize, DataError> {
        let mut lens = self
            .demand
            .iter()
            .chain(self.renewable_caps.iter())
            .map(|(id, s)| (id, s.len()));
        let (_, n) = lens
            .next()
            .ok_or_else(|| DataError::InvalidArgument("no hourly series supplied".into()))?;
        if let Some((id, m)) = lens.find(|(_, m)| *m != n) {
            return Err(DataError::InvalidArgument(format!(
                "series `{id}` has {m} hours, expected {n}"
            )));
        }
        if n == 0 || n % 24 != 0 {
            return Err(DataError::InvalidArgument(format!(
                "hour count {n} is not a positive multiple of 24"
            )));
        }
        Ok(n)
    }
}

/// For each day, the absolute hour index (into the hourly series) with the
/// largest total system demand. Ties go to the earliest hour.
pub fn select_peak_snapshots(profiles: &HourlyProfiles) -> Result<Vec<usize>, DataError> {
    let hours = profiles.hour_count()?;
    let mut system = vec![0.0_f64; hours];
    for series in profiles.demand.values() {
        for (acc, v) in system.iter_mut().zip(series) {
            *acc += v;
        }
    }
    Ok(system
        .chunks(24)
        .enumerate()
        .map(|(day, block)| {
            let mut best = 0;
            for (h, v) in block.iter().enumerate() {
                if *v > block[best] {
                    best = h;
                }
            }
            day * 24 + best
        })
        .collect())
}

/// Rebuilds the per-day profiles of `net` by sampling the hourly series at the
/// given hours. Generators without a renewable series keep `base_pmax`.
pub fn apply_snapshots(net: &Network, profiles: &HourlyProfiles, hours: &[usize]) -> Result<Network, DataError> {
    let total = profiles.hour_count()?;
    if let Some(h) = hours.iter().find(|h| **h >= total) {
        return Err(DataError::InvalidArgument(format!("snapshot hour {h} out of range")));
    }
    let mut out = net.clone();
    out.num_days = hours.len();
    for load in &mut out.loads {
        let series = profiles
            .demand
            .get(&load.id)
            .ok_or_else(|| DataError::InvalidArgument(format!("no hourly demand for load `{}`", load.id)))?;
        load.demand_profile = hours.iter().map(|h| series[*h]).collect();
    }
    for gen in &mut out.generators {
        gen.pmax_profile = match profiles.renewable_caps.get(&gen.id) {
            Some(series) => hours.iter().map(|h| series[*h]).collect(),
            None => vec![gen.base_pmax; hours.len()],
        };
    }
    out.validate()?;
    Ok(out)
}
