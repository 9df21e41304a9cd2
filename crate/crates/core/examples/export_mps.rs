//! Write the first rolling window of the sample case as free MPS, for use with
//! an external solver.
//!
//! cargo run --example export_mps > window.mps

use gridshutoff::grid::load_network;
use gridshutoff::milp::export_mps;
use gridshutoff::model::{build_mopsar, MopsarParams};
use gridshutoff::risk::{forecast_window, load_forecasts};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let net = load_network(format!("{dir}/tiny.json"))?;
    let fs = load_forecasts(format!("{dir}/tiny.csv"), &net)?;
    let window = forecast_window(&fs, 0, 2, &net)?;
    let model = build_mopsar(&net, &window, &vec![true; net.lines.len()], &MopsarParams::default())?;
    eprintln!(
        "{} variables, {} rows",
        model.problem.num_vars(),
        model.problem.num_constraints()
    );
    print!("{}", String::from_utf8(export_mps(&model.problem))?);
    Ok(())
}
