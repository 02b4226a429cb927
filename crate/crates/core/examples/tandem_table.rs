//! Three M/M/1 queues in series with loads 0.1, 0.5 and 0.9, heaviest last.
//!
//!     cargo run --release --example tandem_table

use aoi_lab::scenarios::{reproduce_tandem_table, slowest_last, write_table_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let loads = [0.1, 0.5, 0.9];
    let rows = reproduce_tandem_table(&loads, &[slowest_last(&loads)], 20, 100_000, aoi_lab::DEFAULT_SEED)?;
    write_table_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
