//! Breather benchmark at dt = 0.01 for every scheme.

use efdvd::runner::{run_single, RunConfig};
use efdvd::Variant;

fn main() -> efdvd::Result<()> {
    for variant in Variant::ALL {
        let report = run_single(&RunConfig::benchmark(variant))?;
        print!("{report}");
    }
    Ok(())
}
