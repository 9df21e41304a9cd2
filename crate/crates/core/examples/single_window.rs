//! One multi-day shutoff and restoration plan, solved with full lookahead and
//! printed day by day.

use gridshutoff::grid::load_network;
use gridshutoff::milp::BranchOptions;
use gridshutoff::model::{solve_window, MopsarParams};
use gridshutoff::risk::{forecast_window, load_forecasts};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let net = load_network(format!("{dir}/tiny.json"))?;
    let fs = load_forecasts(format!("{dir}/tiny.csv"), &net)?;
    let window = forecast_window(&fs, 0, 3, &net)?;
    let params = MopsarParams {
        risk_threshold: 40.0,
        ..MopsarParams::default()
    };
    let initial = vec![true; net.lines.len()];
    let (plan, sol) = solve_window(&net, &window, &initial, &params, &BranchOptions::with_gap(params.gap))?;

    println!(
        "{:?}, objective {:.5}, gap {:.1e}",
        sol.status, plan.components.objective, sol.gap
    );
    for (k, day) in plan.days.iter().enumerate() {
        let off: Vec<&str> = net
            .lines
            .iter()
            .zip(&plan.status[k])
            .filter(|(_, on)| !**on)
            .map(|(l, _)| l.id.as_str())
            .collect();
        let restored: Vec<&str> = net
            .lines
            .iter()
            .zip(&plan.restored[k])
            .filter(|(_, r)| **r)
            .map(|(l, _)| l.id.as_str())
            .collect();
        let served: Vec<String> = plan.served[k].iter().map(|x| format!("{:.0}%", 100.0 * x)).collect();
        println!("day {day}: off {off:?}, restored {restored:?}, served {served:?}");
    }
    Ok(())
}
