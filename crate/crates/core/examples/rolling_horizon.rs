//! Full rolling-horizon run on the sample case with reports written to a
//! directory (default `rolling-out`).

use std::path::PathBuf;

use gridshutoff::grid::load_network;
use gridshutoff::horizon::{realized_metrics, run_rolling_horizon, RunConfig};
use gridshutoff::report::{emit_reports, EmitFlags};
use gridshutoff::risk::load_forecasts;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "rolling-out".into()));
    let net = load_network(format!("{dir}/tiny.json"))?;
    let fs = load_forecasts(format!("{dir}/tiny.csv"), &net)?;

    let mut config = RunConfig::for_network(&net);
    config.horizon = 2;
    config.params.risk_threshold = 40.0;
    let traj = run_rolling_horizon(&net, &fs, &config)?;
    for d in &traj.days {
        println!(
            "day {}: served {:5.1}%  risk {:6.1} of {:6.1}  {} off {} on",
            d.day, d.load_served_pct, d.risk_with_shutoff, d.risk_no_shutoff, d.deenergizations, d.reenergizations
        );
    }
    let s = realized_metrics(&traj);
    println!(
        "risk reduced {:.1}% at {:.1}% load served",
        s.risk_reduction_pct, s.load_served_pct
    );

    for path in emit_reports(&traj, &out, EmitFlags::default())? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
