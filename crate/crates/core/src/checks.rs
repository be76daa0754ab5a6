//! Seeded property suite over the algebraic identities the schemes rely on.
//!
//! Every check returns the worst discrepancy it saw next to its tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::breather::{sample, BreatherParams};
use crate::diagnostics::{charge_flux_density, charge_multiplier, energy_flux_density, energy_multiplier};
use crate::dvd::rho;
use crate::error::Result;
use crate::fitting::{alpha, check_fitting_exactness, FitParams};
use crate::grid::{ComplexField, GridSpec};
use crate::newton::{jacobian_fd_check, SolverConfig};
use crate::runner::trajectory;
use crate::schemes::{avf_gradient_check, dvd_cross_check, residual_avf, residual_dvd, Residual, SchemeKind, StepPair, Variant};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:<34} worst {:.3e}  tol {:.1e}", self.name, self.worst, self.tolerance)
    }
}

/// Independent level pair with entries in `[-1, 1]`, `dt` in `[0.05, 0.5]`
/// and `dx` in `[0.2, 1]`.
pub fn random_step_pair<R: Rng>(rng: &mut R, len: usize) -> StepPair {
    let mut level = || {
        let u = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ComplexField::new(u, v).expect("finite")
    };
    let (zn, znp1) = (level(), level());
    StepPair::new(zn, znp1, rng.gen_range(0.05..0.5), rng.gen_range(0.2..1.0)).expect("valid pair")
}

fn max_gap(lhs: &[f64], mult: &(Vec<f64>, Vec<f64>), r: &Residual) -> f64 {
    (0..lhs.len()).map(|m| (lhs[m] - mult.0[m] * r.row1[m] - mult.1[m] * r.row2[m]).abs()).fold(0.0, f64::max)
}

/// Charge law minus its multiplier times the DVD residual, `alpha` in {1, 0.7}.
pub fn charge_identity(seed: u64, pairs: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let pair = random_step_pair(&mut rng, 16);
        for a in [1.0, 0.7] {
            let lhs = charge_flux_density(&pair, a)?.divergence(pair.dt, pair.dx);
            worst = worst.max(max_gap(&lhs, &charge_multiplier(&pair), &residual_dvd(&pair, a)?));
        }
    }
    Ok(CheckOutcome { name: "charge characteristic form", worst, tolerance: 1e-12 })
}

/// Energy law minus its multiplier times each of the four residuals.
pub fn energy_identity(seed: u64, pairs: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let pair = random_step_pair(&mut rng, 16);
        let lhs = energy_flux_density(&pair)?.divergence(pair.dt, pair.dx);
        let mult = energy_multiplier(&pair);
        for a in [1.0, 0.7] {
            worst = worst.max(max_gap(&lhs, &mult, &residual_dvd(&pair, a)?));
            worst = worst.max(max_gap(&lhs, &mult, &residual_avf(&pair, a)?));
        }
    }
    Ok(CheckOutcome { name: "energy characteristic form", worst, tolerance: 1e-11 })
}

/// Closed-form DVD residual against the generic discrete variational derivative.
pub fn dvd_oracle(seed: u64, pairs: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        worst = worst.max(dvd_cross_check(&random_step_pair(&mut rng, 16))?);
    }
    Ok(CheckOutcome { name: "dvd closed form vs generic", worst, tolerance: 1e-11 })
}

/// Closed-form AVF residual against Gauss quadrature of the line integral.
pub fn avf_oracle(seed: u64, pairs: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        worst = worst.max(avf_gradient_check(&random_step_pair(&mut rng, 16))?);
    }
    Ok(CheckOutcome { name: "avf closed form vs quadrature", worst, tolerance: 1e-12 })
}

/// Relative defect of `rho(s1 - s2) + c.c. = |s1|^k - |s2|^k`, `k = 2..6`.
pub fn rho_gradient(seed: u64, pairs: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let mut draw = || Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (s1, s2) = (draw(), draw());
        for k in 2..=6 {
            let r = rho(k, s1, s2)?;
            let lhs = 2.0 * (r * (s1 - s2)).re;
            let (p1, p2) = (s1.norm().powi(k as i32), s2.norm().powi(k as i32));
            worst = worst.max((lhs - (p1 - p2)).abs() / p1.max(p2).max(f64::MIN_POSITIVE));
        }
    }
    Ok(CheckOutcome { name: "rho discrete gradient", worst, tolerance: 1e-12 })
}

/// Fitted relation on `t = 0, 0.1, ..., 1` times `omega dt` in {0.01, 0.1, 0.25, 1, 3}.
pub fn fitting_exactness() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for theta in [0.01, 0.1, 0.25, 1.0, 3.0] {
        let params = FitParams::new(1.0, theta)?;
        for i in 0..=10 {
            worst = worst.max(check_fitting_exactness(params, 0.1 * i as f64)?);
        }
    }
    Ok(CheckOutcome { name: "fitting exactness lattice", worst, tolerance: 1e-13 })
}

/// `|alpha - 1|` for `omega dt` down to `1e-8` and at zero.
pub fn fitting_classic_limit() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for theta in [0.0, 1e-12, 1e-8] {
        worst = worst.max((alpha(FitParams::new(theta, 1.0)?)? - 1.0).abs());
    }
    Ok(CheckOutcome { name: "fitting weight classic limit", worst, tolerance: 1e-15 })
}

/// Analytic against finite-difference Jacobian, four schemes, 8 unknowns.
pub fn jacobian_agreement(seed: u64, pairs: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let pair = random_step_pair(&mut rng, 8);
        let omega = rng.gen_range(0.1..3.0) / pair.dt;
        for variant in Variant::ALL {
            worst = worst.max(jacobian_fd_check(&SchemeKind::new(variant, omega), &pair)?);
        }
    }
    Ok(CheckOutcome { name: "jacobian vs finite differences", worst, tolerance: 1e-6 })
}

/// Fitted against classic trajectories at `omega dt = 1e-6`, ten steps of the
/// benchmark at `dt = 0.01 / 32`.
pub fn classic_limit_trajectories() -> Result<CheckOutcome> {
    let dt = 0.01 / 32.0;
    let grid = GridSpec::from_spacing(-PI / 7.0, PI / 7.0, 2.0 * PI / 7000.0, 10.0 * dt, dt)?;
    let z0 = sample(BreatherParams::benchmark(), &grid, 0.0)?;
    let solver = SolverConfig::default();
    let omega = 1e-6 / dt;
    let mut worst = 0.0f64;
    for (fitted, classic) in [(Variant::EfDvd, Variant::Dvd), (Variant::EfAvf, Variant::Avf)] {
        let a = trajectory(&SchemeKind::new(fitted, omega), &grid, &z0, &solver)?;
        let b = trajectory(&SchemeKind::new(classic, omega), &grid, &z0, &solver)?;
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max(x.max_abs_diff(y));
        }
    }
    Ok(CheckOutcome { name: "fitted schemes classic limit", worst, tolerance: 1e-8 })
}

/// The whole suite with the standard sample sizes.
pub fn property_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        charge_identity(seed, 100)?,
        energy_identity(seed.wrapping_add(1), 100)?,
        dvd_oracle(seed.wrapping_add(2), 100)?,
        avf_oracle(seed.wrapping_add(3), 100)?,
        rho_gradient(seed.wrapping_add(4), 1000)?,
        fitting_exactness()?,
        fitting_classic_limit()?,
        jacobian_agreement(seed.wrapping_add(5), 10)?,
        classic_limit_trajectories()?,
    ])
}
