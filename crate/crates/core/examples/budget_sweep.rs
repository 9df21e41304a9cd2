//! Re-run the sample case across restoration budgets and tabulate the
//! trade-off. Runs in parallel; set GRIDSHUTOFF_THREADS to cap workers.

use gridshutoff::grid::load_network;
use gridshutoff::horizon::{sweep, RunConfig, SweepAxis};
use gridshutoff::report::sweep_csv;
use gridshutoff::risk::load_forecasts;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let net = load_network(format!("{dir}/tiny.json"))?;
    let fs = load_forecasts(format!("{dir}/tiny.csv"), &net)?;
    let mut base = RunConfig::for_network(&net);
    base.horizon = 2;
    base.params.risk_threshold = 40.0;

    let rows = sweep(&net, &fs, &base, SweepAxis::Budget, &[0.0, 10.0, 20.0, 40.0])?;
    for r in &rows {
        match (&r.summary, &r.error) {
            (Some(s), _) => println!(
                "budget {:4}: load {:5.1}%  risk cut {:5.1}%  {} restorations",
                r.value, s.load_served_pct, s.risk_reduction_pct, s.reenergizations
            ),
            (None, e) => println!("budget {:4}: failed ({})", r.value, e.as_deref().unwrap_or("?")),
        }
    }
    print!("\n{}", sweep_csv(&rows));
    Ok(())
}
