//! The 128-bit latency table and the size sweep, as CSV on stdout.

use qarith::report::{latency_rows_to_string, latency_table, rows_to_string, sizes_table, Format};

fn main() -> qarith::Result<()> {
    print!("{}", latency_rows_to_string(&latency_table(100)?, Format::Csv)?);
    println!();
    print!("{}", rows_to_string(&sizes_table(&[8, 16, 32], 100)?, Format::Csv)?);
    Ok(())
}
