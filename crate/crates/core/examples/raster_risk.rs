//! Sample a gridded risk map along each line's route. A line takes the
//! largest value of any cell its polyline passes through.

use gridshutoff::grid::load_network;
use gridshutoff::risk::{line_risks_from_raster, RiskRaster};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let net = load_network(format!("{dir}/tiny.json"))?;
    let raster = RiskRaster::load_ascii(format!("{dir}/tiny.asc"))?;
    println!(
        "raster {}x{} cells of {} deg from ({}, {})",
        raster.rows, raster.cols, raster.cell_size, raster.origin_lat, raster.origin_lon
    );
    for (line, risk) in net.lines.iter().zip(line_risks_from_raster(&net, &raster)?) {
        println!("  {:>3}: {risk:6.1}", line.id);
    }
    Ok(())
}
