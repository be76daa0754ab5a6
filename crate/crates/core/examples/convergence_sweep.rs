//! Convergence sweep dt = 0.01 / 2^k, k = 0..5, printed as CSV.
//!
//! `cargo run --release --example convergence_sweep -- ef-dvd`

use efdvd::runner::{run_sweep, write_csv, RunConfig};
use efdvd::Variant;

fn main() -> efdvd::Result<()> {
    let variant: Variant = std::env::args().nth(1).as_deref().unwrap_or("dvd").parse()?;
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let report = run_sweep(&RunConfig::benchmark(variant), jobs)?;
    eprint!("{report}");
    write_csv(&report, std::io::stdout().lock(), false)
}
