//! One implicit step of each scheme on the breather benchmark grid, with the
//! Newton history and a finite-difference audit of the Jacobian.

use efdvd::breather::{sample, BreatherParams};
use efdvd::newton::{jacobian_fd_check, relative_residual, step};
use efdvd::runner::RunConfig;
use efdvd::{ComplexField, GridSpec, SchemeKind, SolverConfig, StepPair, Variant};

fn main() -> efdvd::Result<()> {
    let grid = RunConfig::benchmark(Variant::Dvd).grid;
    let z0 = sample(BreatherParams::benchmark(), &grid, 0.0)?;
    for variant in Variant::ALL {
        let scheme = SchemeKind::new(variant, 25.0);
        let (z1, stats) = step(&scheme, &z0, &grid, &SolverConfig::default())?;
        let pair = StepPair::new(z0.clone(), z1, grid.dt, grid.dx)?;
        println!(
            "{variant:>7}: {} residual evaluations, relative residual {:.2e}, updates {:?}",
            stats.iterations,
            relative_residual(&scheme, &pair)?,
            stats.increments.iter().map(|d| format!("{d:.1e}")).collect::<Vec<_>>()
        );
    }

    // The dense finite-difference audit only makes sense on a small grid.
    let small = GridSpec::new(0.0, 1.0, 9, 0.05, 1)?;
    let z: Vec<_> = small.x().iter().map(|&x| num_complex::Complex64::new(x.cos(), 0.5 * x.sin())).collect();
    let z = ComplexField::from_complex(&z)?;
    for variant in Variant::ALL {
        let scheme = SchemeKind::new(variant, 10.0);
        let (z1, _) = step(&scheme, &z, &small, &SolverConfig::default())?;
        let gap = jacobian_fd_check(&scheme, &StepPair::new(z.clone(), z1, small.dt, small.dx)?)?;
        println!("{variant:>7}: jacobian vs finite differences {gap:.1e}");
    }
    Ok(())
}
