//! Local conservation laws and global invariants along a computed trajectory:
//! the DVD schemes keep both charge and energy, the AVF schemes only energy.

use efdvd::breather::{sample, BreatherParams};
use efdvd::diagnostics::{global_charge, global_energy};
use efdvd::runner::{trajectory, RunConfig};
use efdvd::{global_invariants, local_cl_residuals, SchemeKind, SolverConfig, Variant};

fn main() -> efdvd::Result<()> {
    let grid = RunConfig::benchmark(Variant::Dvd).grid;
    let z0 = sample(BreatherParams::benchmark(), &grid, 0.0)?;
    println!("charge {:.6}, energy {:.6}", global_charge(&z0, grid.dx), global_energy(&z0, grid.dx));
    println!("{:>7} {:>10} {:>10} {:>10} {:>10}", "scheme", "err1", "err2", "errM", "errH");
    for variant in Variant::ALL {
        let scheme = SchemeKind::new(variant, 25.0);
        let levels = trajectory(&scheme, &grid, &z0, &SolverConfig::default())?;
        let local = local_cl_residuals(&levels, &grid, &scheme)?;
        let global = global_invariants(&levels, &grid)?;
        println!("{variant:>7} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e}", local.err1, local.err2, global.err_m, global.err_h);
    }
    Ok(())
}
