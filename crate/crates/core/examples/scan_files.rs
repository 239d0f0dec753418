//! Drives the command-line scans from code and round-trips the result
//! through CSV and JSON.

use clap::Parser;
use xychain::cli::{compute, Cli};
use xychain::scan::ScanResult;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cli = Cli::try_parse_from([
        "xychain", "chsh-scan", "--gamma", "0.5", "--h-min", "0", "--h-max", "2", "--h-steps", "5", "--r", "1", "--r", "3",
    ])?;
    let result = compute(&cli.command)?;

    let mut csv = Vec::new();
    result.write_csv(&mut csv)?;
    print!("{}", String::from_utf8(csv.clone())?);

    let mut json = Vec::new();
    result.write_json(&mut json)?;
    let from_csv = ScanResult::read_csv(&csv[..])?;
    let from_json = ScanResult::read_json(&json[..])?;
    println!("\nCSV and JSON decode to the same table: {}", from_csv == from_json);
    Ok(())
}
