//! Walk the issue days of a forecast file and show the window each rolling
//! solve would see.

use gridshutoff::grid::load_network;
use gridshutoff::risk::{forecast_window, load_forecasts};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let net = load_network(format!("{dir}/tiny.json"))?;
    let fs = load_forecasts(format!("{dir}/tiny.csv"), &net)?;
    println!("{} entries, max lead {} days", fs.entry_count(), fs.max_lead());

    let horizon = 2;
    for issue in fs.issue_days() {
        let w = forecast_window(&fs, issue, horizon, &net)?;
        println!("issued day {issue}: days {:?}, total risk {:.1}", w.days(), w.total());
        for (day, row) in w.days().zip(&w.rows) {
            let cells: Vec<String> = row.iter().map(|r| format!("{r:5.1}")).collect();
            println!("  day {day}: {}", cells.join(" "));
        }
    }
    Ok(())
}
