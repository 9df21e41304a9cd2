//! Load a network file, check it, and derive a stressed copy.
//!
//! cargo run --example load_network [path/to/network.json]

use gridshutoff::grid::{load_network, scale_loads};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/tiny.json").to_string());
    let net = load_network(&path)?;
    println!(
        "{}: {} buses, {} lines, {} generators, {} loads over {} days",
        path,
        net.buses.len(),
        net.lines.len(),
        net.generators.len(),
        net.loads.len(),
        net.num_days
    );
    for line in &net.lines {
        println!(
            "  {:>4} {}-{}  b={:6.2}  limit {:5.0} MW  {:5.1} mi",
            line.id, line.from_bus, line.to_bus, line.susceptance_b, line.thermal_limit, line.length_miles
        );
    }

    let hot = scale_loads(&net, 1.2)?;
    for day in 0..net.num_days {
        let before: f64 = net.loads.iter().map(|l| l.demand_profile[day]).sum();
        let after: f64 = hot.loads.iter().map(|l| l.demand_profile[day]).sum();
        println!("day {day}: demand {before:7.1} MW -> {after:7.1} MW at 120%");
    }
    Ok(())
}
