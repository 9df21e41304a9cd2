//! Deterministic synthetic scenarios.
//!
//! [`three_area_network`] builds a 73-bus, 120-line grid from three copies of
//! the 24-bus reliability test system topology, an extra tie bus and six
//! inter-area lines, placed on a map so lines can be sampled against risk
//! rasters. [`risk_rasters`] paints a moving fire-weather pattern over it and
//! [`noisy_forecasts`] derives forecasts whose error grows with lead time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::DataError;
use crate::grid::{Bus, Generator, Line, Load, Network};
use crate::risk::{line_risks_from_raster, ForecastEntry, RiskForecastSet, RiskRaster};

const MILES_PER_DEG_LAT: f64 = 69.0;

/// (from, to, reactance p.u., rating MW) for the 38 branches of one area.
const AREA_BRANCHES: [(usize, usize, f64, f64); 38] = [
    (1, 2, 0.0139, 175.0),
    (1, 3, 0.2112, 175.0),
    (1, 5, 0.0845, 175.0),
    (2, 4, 0.1267, 175.0),
    (2, 6, 0.1920, 175.0),
    (3, 9, 0.1190, 175.0),
    (3, 24, 0.0839, 400.0),
    (4, 9, 0.1037, 175.0),
    (5, 10, 0.0883, 175.0),
    (6, 10, 0.0605, 175.0),
    (7, 8, 0.0614, 175.0),
    (8, 9, 0.1651, 175.0),
    (8, 10, 0.1651, 175.0),
    (9, 11, 0.0839, 400.0),
    (9, 12, 0.0839, 400.0),
    (10, 11, 0.0839, 400.0),
    (10, 12, 0.0839, 400.0),
    (11, 13, 0.0476, 500.0),
    (11, 14, 0.0418, 500.0),
    (12, 13, 0.0476, 500.0),
    (12, 23, 0.0966, 500.0),
    (13, 23, 0.0865, 500.0),
    (14, 16, 0.0389, 500.0),
    (15, 16, 0.0173, 500.0),
    (15, 21, 0.0490, 500.0),
    (15, 21, 0.0490, 500.0),
    (15, 24, 0.0519, 500.0),
    (16, 17, 0.0259, 500.0),
    (16, 19, 0.0231, 500.0),
    (17, 18, 0.0144, 500.0),
    (17, 22, 0.1053, 500.0),
    (18, 21, 0.0259, 500.0),
    (18, 21, 0.0259, 500.0),
    (19, 20, 0.0396, 500.0),
    (19, 20, 0.0396, 500.0),
    (20, 23, 0.0216, 500.0),
    (20, 23, 0.0216, 500.0),
    (21, 22, 0.0678, 500.0),
];

/// Peak demand (MW) by bus of one area.
const AREA_LOADS: [(usize, f64); 17] = [
    (1, 108.0),
    (2, 97.0),
    (3, 180.0),
    (4, 74.0),
    (5, 71.0),
    (6, 136.0),
    (7, 125.0),
    (8, 171.0),
    (9, 175.0),
    (10, 195.0),
    (13, 265.0),
    (14, 194.0),
    (15, 317.0),
    (16, 100.0),
    (18, 333.0),
    (19, 181.0),
    (20, 128.0),
];

/// Installed capacity (MW) by bus of one area.
const AREA_GENS: [(usize, f64); 10] = [
    (1, 192.0),
    (2, 192.0),
    (7, 300.0),
    (13, 591.0),
    (15, 215.0),
    (16, 155.0),
    (18, 400.0),
    (21, 400.0),
    (22, 300.0),
    (23, 660.0),
];

/// Approximate one-line-diagram position (x east, y north, unit square) of
/// each bus in an area.
const AREA_LAYOUT: [(f64, f64); 24] = [
    (0.10, 0.05),
    (0.35, 0.05),
    (0.10, 0.35),
    (0.35, 0.25),
    (0.55, 0.15),
    (0.80, 0.20),
    (0.95, 0.05),
    (0.90, 0.30),
    (0.35, 0.45),
    (0.65, 0.45),
    (0.40, 0.60),
    (0.65, 0.60),
    (0.85, 0.70),
    (0.30, 0.70),
    (0.05, 0.80),
    (0.25, 0.85),
    (0.20, 0.95),
    (0.35, 1.00),
    (0.50, 0.85),
    (0.70, 0.90),
    (0.05, 0.97),
    (0.05, 1.10),
    (0.90, 0.95),
    (0.05, 0.55),
];

/// Inter-area ties: ((area, bus), (area, bus)), with area 3 bus 25 the extra
/// tie bus.
const TIES: [((usize, usize), (usize, usize), f64); 6] = [
    ((1, 7), (2, 3), 0.1610),
    ((1, 13), (2, 15), 0.0750),
    ((1, 23), (2, 17), 0.0750),
    ((2, 23), (3, 18), 0.0750),
    ((1, 21), (3, 25), 0.0970),
    ((3, 25), (3, 21), 0.0970),
];

const AREA_ORIGINS: [(f64, f64); 3] = [(38.0, -122.5), (38.0, -121.2), (39.3, -121.85)];
const AREA_SPAN_DEG: f64 = 1.0;

fn bus_id(area: usize, bus: usize) -> String {
    format!("{}{:02}", area, bus)
}

fn miles(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dlat = (b[0] - a[0]) * MILES_PER_DEG_LAT;
    let dlon = (b[1] - a[1]) * MILES_PER_DEG_LAT * (0.5 * (a[0] + b[0])).to_radians().cos();
    (dlat * dlat + dlon * dlon).sqrt()
}

/// The 73-bus, 120-line grid with `num_days` of daily peak profiles.
pub fn three_area_network(num_days: usize, seed: u64) -> Result<Network, DataError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buses = Vec::new();
    for (a, origin) in AREA_ORIGINS.iter().enumerate() {
        let area = a + 1;
        for (i, (x, y)) in AREA_LAYOUT.iter().enumerate() {
            let jitter: (f64, f64) = (rng.random_range(-0.02..0.02), rng.random_range(-0.02..0.02));
            buses.push(Bus {
                id: bus_id(area, i + 1),
                name: format!("area {area} bus {}", i + 1),
                lat: origin.0 + (y + jitter.1) * AREA_SPAN_DEG,
                lon: origin.1 + (x + jitter.0) * AREA_SPAN_DEG,
                is_reference: area == 1 && i == 12,
            });
        }
    }
    let tie_pos = [AREA_ORIGINS[2].0 - 0.05, AREA_ORIGINS[2].1 - 0.25];
    buses.push(Bus {
        id: bus_id(3, 25),
        name: "tie bus".into(),
        lat: tie_pos[0],
        lon: tie_pos[1],
        is_reference: false,
    });
    let position = |id: &str| {
        let b = buses.iter().find(|b| b.id == id).expect("bus exists");
        [b.lat, b.lon]
    };

    let mut lines = Vec::new();
    let mut add_line = |id: String, from: String, to: String, x: f64, rating: f64, rng: &mut ChaCha8Rng| {
        let (a, b) = (position(&from), position(&to));
        let bend = rng.random_range(-0.15..0.15);
        // offset the midpoint perpendicular to the chord
        let mid = [
            0.5 * (a[0] + b[0]) + bend * (b[1] - a[1]),
            0.5 * (a[1] + b[1]) - bend * (b[0] - a[0]),
        ];
        let length = (miles(a, mid) + miles(mid, b)).max(1.0);
        lines.push(Line {
            id,
            from_bus: from,
            to_bus: to,
            susceptance_b: -1.0 / x,
            thermal_limit: rating,
            length_miles: (length * 10.0).round() / 10.0,
            polyline: vec![a, mid, b],
        });
    };
    for area in 1..=3 {
        let mut seen = std::collections::HashMap::new();
        for (f, t, x, rating) in AREA_BRANCHES {
            let n = seen.entry((f, t)).or_insert(0);
            *n += 1;
            let suffix = if *n > 1 { "b" } else { "" };
            add_line(
                format!("{}-{}{suffix}", bus_id(area, f), bus_id(area, t)),
                bus_id(area, f),
                bus_id(area, t),
                x,
                rating,
                &mut rng,
            );
        }
    }
    for ((fa, fb), (ta, tb), x) in TIES {
        let (from, to) = (bus_id(fa, fb), bus_id(ta, tb));
        add_line(format!("{from}-{to}"), from, to, x, 500.0, &mut rng);
    }

    let daily: Vec<f64> = (0..num_days)
        .map(|d| {
            let season = 0.9 + 0.1 * (std::f64::consts::PI * d as f64 / num_days.max(1) as f64).sin();
            season * rng.random_range(0.93..1.0)
        })
        .collect();
    let mut loads = Vec::new();
    let mut generators = Vec::new();
    for area in 1..=3 {
        for (bus, peak) in AREA_LOADS {
            loads.push(Load {
                id: format!("d{}", bus_id(area, bus)),
                bus: bus_id(area, bus),
                demand_profile: daily.iter().map(|f| (peak * f * 100.0).round() / 100.0).collect(),
                weight: 1.0,
            });
        }
        for (bus, cap) in AREA_GENS {
            generators.push(Generator {
                id: format!("g{}", bus_id(area, bus)),
                bus: bus_id(area, bus),
                pmax_profile: vec![cap; num_days],
                base_pmax: cap,
            });
        }
    }
    Network::new(num_days, 100.0, buses, lines, generators, loads)
}

/// One raster per study day covering every bus with a margin. Risk is a low
/// background plus a fire-weather front that builds, drifts east and decays.
pub fn risk_rasters(net: &Network, seed: u64) -> Result<Vec<RiskRaster>, DataError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let cell = 0.05;
    let lat0 = net.buses.iter().map(|b| b.lat).fold(f64::INFINITY, f64::min) - 0.3;
    let lat1 = net.buses.iter().map(|b| b.lat).fold(f64::NEG_INFINITY, f64::max) + 0.3;
    let lon0 = net.buses.iter().map(|b| b.lon).fold(f64::INFINITY, f64::min) - 0.3;
    let lon1 = net.buses.iter().map(|b| b.lon).fold(f64::NEG_INFINITY, f64::max) + 0.3;
    let rows = ((lat1 - lat0) / cell).ceil() as usize;
    let cols = ((lon1 - lon0) / cell).ceil() as usize;
    let background: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(5.0..45.0)).collect();

    let days = net.num_days;
    let mut out = Vec::with_capacity(days);
    for d in 0..days {
        let phase = d as f64 / days.max(2).saturating_sub(1) as f64;
        // peaks mid-study
        let intensity = 210.0 * (std::f64::consts::PI * phase).sin().powi(2) + rng.random_range(0.0..20.0);
        let center = [
            lat0 + 0.35 * (lat1 - lat0),
            lon0 + (0.15 + 0.45 * phase) * (lon1 - lon0),
        ];
        let spread = 0.35;
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let lat = lat0 + (rows - r) as f64 * cell - 0.5 * cell;
            for c in 0..cols {
                let lon = lon0 + (c as f64 + 0.5) * cell;
                let dist2 = ((lat - center[0]).powi(2) + (lon - center[1]).powi(2)) / (spread * spread);
                let v = background[r * cols + c] + intensity * (-dist2).exp();
                values.push((v * 10.0).round() / 10.0);
            }
        }
        out.push(RiskRaster::new(lat0, lon0, cell, rows, cols, values)?);
    }
    Ok(out)
}

/// Forecasts issued every day for targets up to `max_lead` days ahead: the
/// realized value scaled by `1 + e`, `e` uniform in `±noise * lead`. Lead-0
/// entries are exact.
pub fn noisy_forecasts(
    line_ids: Vec<String>,
    realized: &[Vec<f64>],
    max_lead: usize,
    noise: f64,
    seed: u64,
) -> Result<RiskForecastSet, DataError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf0ca57);
    let days = realized.len();
    let mut entries = Vec::new();
    for issue in 0..days {
        for target in issue..=(issue + max_lead).min(days.saturating_sub(1)) {
            let lead = (target - issue) as f64;
            for (l, id) in line_ids.iter().enumerate() {
                let spread = noise * lead;
                let e = if spread > 0.0 {
                    rng.random_range(-spread..spread)
                } else {
                    0.0
                };
                entries.push(ForecastEntry {
                    issue_day: issue,
                    target_day: target,
                    line_id: id.clone(),
                    risk: (realized[target][l] * (1.0 + e)).max(0.0),
                });
            }
        }
    }
    RiskForecastSet::from_entries(line_ids, days, entries)
}

pub struct SyntheticScenario {
    pub network: Network,
    pub rasters: Vec<RiskRaster>,
    pub forecasts: RiskForecastSet,
}

/// Network, daily rasters and 7-day forecasts with 5% error per day of lead.
pub fn scenario(num_days: usize, seed: u64) -> Result<SyntheticScenario, DataError> {
    let network = three_area_network(num_days, seed)?;
    let rasters = risk_rasters(&network, seed)?;
    let realized = rasters
        .iter()
        .map(|r| line_risks_from_raster(&network, r))
        .collect::<Result<Vec<_>, _>>()?;
    let ids = network.lines.iter().map(|l| l.id.clone()).collect();
    let forecasts = noisy_forecasts(ids, &realized, crate::risk::DEFAULT_MAX_LEAD, 0.05, seed)?;
    Ok(SyntheticScenario {
        network,
        rasters,
        forecasts,
    })
}
