//! Exponential-fitting weight across `theta = omega dt` and its exactness
//! defect on `{1, cos wt, sin wt}`.

use efdvd::fitting::{alpha, check_fitting_exactness, FitParams};

fn main() -> efdvd::Result<()> {
    println!("{:>10} {:>22} {:>12}", "omega*dt", "alpha", "defect");
    for theta in [0.0, 1e-6, 1e-4, 0.01, 0.25, 1.0, 2.0, 3.0] {
        let params = FitParams::new(theta, 1.0)?;
        let defect = (0..=10).map(|i| check_fitting_exactness(params, 0.1 * i as f64)).try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))?;
        println!("{theta:>10.1e} {:>22.17} {defect:>12.2e}", alpha(params)?);
    }
    match FitParams::new(25.0, 0.2) {
        Err(e) => println!("omega = 25, dt = 0.2: {e}"),
        Ok(_) => unreachable!("omega dt = 5 is past the first pole"),
    }
    Ok(())
}
