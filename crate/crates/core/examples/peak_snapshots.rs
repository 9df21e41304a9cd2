//! Collapse hourly demand into one operating point per day by picking each
//! day's system peak hour.

use std::collections::BTreeMap;

use gridshutoff::grid::{apply_snapshots, load_network, select_peak_snapshots, HourlyProfiles};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = load_network(concat!(env!("CARGO_MANIFEST_DIR"), "/data/tiny.json"))?;
    let days = 3;
    let mut demand = BTreeMap::new();
    for (k, load) in net.loads.iter().enumerate() {
        // afternoon peak that drifts later each day
        let series: Vec<f64> = (0..24 * days)
            .map(|h| {
                let (day, hour) = ((h / 24) as f64, (h % 24) as f64);
                let peak = 15.0 + day + k as f64;
                load.demand_profile[0] * (0.6 + 0.4 * (-(hour - peak).powi(2) / 8.0).exp())
            })
            .collect();
        demand.insert(load.id.clone(), series);
    }
    let profiles = HourlyProfiles {
        demand,
        renewable_caps: BTreeMap::new(),
    };

    let hours = select_peak_snapshots(&profiles)?;
    let daily = apply_snapshots(&net, &profiles, &hours)?;
    for (day, hour) in hours.iter().enumerate() {
        let total: f64 = daily.loads.iter().map(|l| l.demand_profile[day]).sum();
        println!("day {day}: peak at hour {:2} ({:.0} MW)", hour % 24, total);
    }
    Ok(())
}
