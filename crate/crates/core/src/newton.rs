//! Newton iteration for one implicit step of any of the four schemes.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::linalg::solve_block_cyclic;
use crate::schemes::{jacobian, residual_scale, SchemeKind, StepPair};

/// Threshold for [`jacobian_fd_check`] when the solver runs in checking mode.
pub const JACOBIAN_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMode {
    Analytic,
    /// Analytic Jacobian, compared against finite differences on the first
    /// iteration of every step. Dense, so only meant for small grids.
    FiniteDifferenceCheck,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop threshold on the relative residual `|R|_inf / max(1, scale)`,
    /// where `scale` is the size of the largest term in the residual.
    pub tol_residual: f64,
    /// Also required before stopping: the last update's max-norm is at most
    /// `tol_increment * max(1, |z_{n+1}|_inf)`. With quadratic convergence
    /// this leaves the iterate at roundoff, which the conservation laws need.
    pub tol_increment: f64,
    /// Maximum number of residual evaluations per step.
    pub max_iters: usize,
    pub jacobian_mode: JacobianMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol_residual: 1e-12, tol_increment: 1e-10, max_iters: 25, jacobian_mode: JacobianMode::Analytic }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_residual > 0.0 && self.tol_residual.is_finite()) {
            return Err(Error::Config(format!("solver tolerance must be positive, got {}", self.tol_residual)));
        }
        if !(self.tol_increment > 0.0 && self.tol_increment.is_finite()) {
            return Err(Error::Config(format!("increment tolerance must be positive, got {}", self.tol_increment)));
        }
        if self.max_iters < 1 {
            return Err(Error::Config("solver needs max_iters >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonStats {
    /// Residual evaluations, including the one on the initial guess.
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub converged: bool,
    /// Max-norm of each Newton update, in order.
    pub increments: Vec<f64>,
}

/// Relative residual used as the stopping measure.
pub fn relative_residual(scheme: &SchemeKind, pair: &StepPair) -> Result<f64> {
    let a = scheme.weight(pair.dt)?;
    Ok(scheme.residual(pair)?.max_norm() / residual_scale(pair, a).max(1.0))
}

/// Advances `zn` by one step of `grid.dt`, starting Newton from `zn`.
pub fn step(
    scheme: &SchemeKind,
    zn: &ComplexField,
    grid: &GridSpec,
    cfg: &SolverConfig,
) -> Result<(ComplexField, NewtonStats)> {
    cfg.validate()?;
    zn.validate()?;
    if zn.len() != grid.unknowns() {
        return Err(Error::LengthMismatch { expected: grid.unknowns(), actual: zn.len() });
    }
    let a = scheme.weight(grid.dt)?;
    let mut pair = StepPair::new(zn.clone(), zn.clone(), grid.dt, grid.dx)?;
    let mut stats = NewtonStats { iterations: 0, final_residual_norm: f64::INFINITY, converged: false, increments: vec![] };

    for it in 1..=cfg.max_iters {
        let residual = scheme.residual(&pair)?;
        stats.iterations = it;
        stats.final_residual_norm = residual.max_norm() / residual_scale(&pair, a).max(1.0);
        let settled = stats.increments.last().is_none_or(|&d| {
            d <= cfg.tol_increment * pair.znp1.u.iter().chain(&pair.znp1.v).fold(1.0f64, |m, x| m.max(x.abs()))
        });
        if stats.final_residual_norm <= cfg.tol_residual && settled {
            stats.converged = true;
            return Ok((pair.znp1, stats));
        }
        if it == cfg.max_iters {
            break;
        }
        if cfg.jacobian_mode == JacobianMode::FiniteDifferenceCheck && it == 1 {
            let gap = jacobian_fd_check(scheme, &pair)?;
            if gap > JACOBIAN_CHECK_TOL {
                return Err(Error::JacobianMismatch(gap));
            }
        }
        let jac = jacobian(scheme.variant, &pair, a)?;
        let diag: Vec<Matrix2<f64>> = jac.diag.iter().map(|b| Matrix2::new(b[0][0], b[0][1], b[1][0], b[1][1])).collect();
        let coupling = Matrix2::new(0.0, jac.coupling, jac.coupling, 0.0);
        let rhs: Vec<Vector2<f64>> =
            residual.row1.iter().zip(&residual.row2).map(|(r1, r2)| Vector2::new(-r1, -r2)).collect();
        let update = solve_block_cyclic(&diag, &coupling, &coupling, &rhs)?;
        let mut largest = 0.0f64;
        for (m, d) in update.iter().enumerate() {
            pair.znp1.u[m] += d[0];
            pair.znp1.v[m] += d[1];
            largest = largest.max(d.amax());
        }
        if !largest.is_finite() {
            break;
        }
        stats.increments.push(largest);
    }
    Err(Error::NonConvergence(stats))
}

/// Relative max-norm gap between the analytic Jacobian and a central
/// finite-difference Jacobian of the residual in `(u_{n+1}, v_{n+1})`.
pub fn jacobian_fd_check(scheme: &SchemeKind, pair: &StepPair) -> Result<f64> {
    pair.validate()?;
    let a = scheme.weight(pair.dt)?;
    let analytic = jacobian(scheme.variant, pair, a)?.to_dense();
    let len = pair.len();
    let mut worst = 0.0f64;
    let mut probe = pair.clone();
    for j in 0..2 * len {
        let (m, comp) = (j / 2, j % 2);
        let base = if comp == 0 { pair.znp1.u[m] } else { pair.znp1.v[m] };
        let h = 1e-7 * (1.0 + base.abs());
        let mut eval = |x: f64| -> Result<Vec<f64>> {
            if comp == 0 {
                probe.znp1.u[m] = x;
            } else {
                probe.znp1.v[m] = x;
            }
            let r = scheme.residual(&probe)?;
            Ok(r.row1.iter().zip(&r.row2).flat_map(|(a, b)| [*a, *b]).collect())
        };
        let plus = eval(base + h)?;
        let minus = eval(base - h)?;
        eval(base)?;
        for i in 0..2 * len {
            let fd = (plus[i] - minus[i]) / (2.0 * h);
            worst = worst.max((fd - analytic[(i, j)]).abs());
        }
    }
    Ok(worst / analytic.amax().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::Variant;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pair(rng: &mut ChaCha8Rng, len: usize) -> StepPair {
        let mut level = || {
            ComplexField::new(
                (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
            .unwrap()
        };
        let (zn, z1) = (level(), level());
        StepPair::new(zn, z1, 0.1, 0.5).unwrap()
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let grid = GridSpec::new(0.0, 1.0, 9, 0.1, 1).unwrap();
        for variant in Variant::ALL {
            let (z, stats) =
                step(&SchemeKind::new(variant, 2.0), &ComplexField::zeros(8), &grid, &SolverConfig::default()).unwrap();
            assert_eq!(z, ComplexField::zeros(8));
            assert_eq!(stats.iterations, 1);
            assert!(stats.converged);
        }
    }

    #[test]
    fn plane_wave_rotates_by_the_cayley_factor() {
        // For constant data the DVD step reduces to
        // i a (w - c)/dt + |c|^2 (w + c)/2 = 0 with |w| = |c|, so
        // w = c (i a/dt - |c|^2/2) / (i a/dt + |c|^2/2).
        let grid = GridSpec::new(0.0, 2.0, 11, 0.05, 1).unwrap();
        let c = Complex64::new(1.3, 0.4);
        let zn = ComplexField::from_complex(&[c; 10]).unwrap();
        for (variant, omega) in [(Variant::Dvd, 0.0), (Variant::EfDvd, 20.0)] {
            let kind = SchemeKind::new(variant, omega);
            let a = kind.weight(grid.dt).unwrap();
            let k = Complex64::i() * a / grid.dt;
            let w = c * (k - c.norm_sqr() / 2.0) / (k + c.norm_sqr() / 2.0);
            let (z1, _) = step(&kind, &zn, &grid, &SolverConfig::default()).unwrap();
            for m in 0..10 {
                assert!((z1.at(m) - w).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pair = random_pair(&mut rng, 8);
        for variant in Variant::ALL {
            let gap = jacobian_fd_check(&SchemeKind::new(variant, 3.0), &pair).unwrap();
            assert!(gap <= 1e-6, "{variant}: {gap:e}");
        }
        let z = ComplexField::zeros(8);
        let zero = StepPair::new(z.clone(), z, 0.1, 0.5).unwrap();
        assert!(jacobian_fd_check(&SchemeKind::new(Variant::Dvd, 0.0), &zero).unwrap() < 1e-8);
    }

    #[test]
    fn fitted_jacobian_tends_to_classic() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let pair = random_pair(&mut rng, 8);
        let omega = 1e-6 / pair.dt;
        for (fitted, classic) in [(Variant::EfDvd, Variant::Dvd), (Variant::EfAvf, Variant::Avf)] {
            let jf = jacobian(fitted, &pair, SchemeKind::new(fitted, omega).weight(pair.dt).unwrap()).unwrap();
            let jc = jacobian(classic, &pair, 1.0).unwrap();
            assert!((jf.to_dense() - jc.to_dense()).amax() <= 1e-9);
        }
    }

    #[test]
    fn solved_step_satisfies_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let grid = GridSpec::new(0.0, 4.0, 17, 0.01, 1).unwrap();
        let zn = random_pair(&mut rng, 16).zn;
        for variant in Variant::ALL {
            let kind = SchemeKind::new(variant, 5.0);
            let cfg = SolverConfig { jacobian_mode: JacobianMode::FiniteDifferenceCheck, ..SolverConfig::default() };
            let (z1, stats) = step(&kind, &zn, &grid, &cfg).unwrap();
            let pair = StepPair::new(zn.clone(), z1, grid.dt, grid.dx).unwrap();
            assert!(relative_residual(&kind, &pair).unwrap() <= 1e-12);
            assert!(stats.converged && stats.iterations <= 8);
            assert!(*stats.increments.last().unwrap() <= 1e-10 * pair.znp1.u.iter().fold(1.0f64, |m, x| m.max(x.abs())) * 10.0);
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let grid = GridSpec::new(0.0, 4.0, 17, 0.01, 1).unwrap();
        let zn = random_pair(&mut rng, 16).zn;
        let cfg = SolverConfig { max_iters: 2, ..SolverConfig::default() };
        match step(&SchemeKind::new(Variant::Dvd, 0.0), &zn, &grid, &cfg) {
            Err(Error::NonConvergence(stats)) => {
                assert_eq!(stats.iterations, 2);
                assert!(!stats.converged);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let grid = GridSpec::new(0.0, 4.0, 33, 0.01, 1).unwrap();
        let zn = random_pair(&mut rng, 32).zn;
        let kind = SchemeKind::new(Variant::EfAvf, 10.0);
        let first = step(&kind, &zn, &grid, &SolverConfig::default()).unwrap();
        let second = step(&kind, &zn, &grid, &SolverConfig::default()).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn rejects_bad_config() {
        let grid = GridSpec::new(0.0, 1.0, 5, 0.1, 1).unwrap();
        let z = ComplexField::zeros(4);
        let kind = SchemeKind::new(Variant::Dvd, 0.0);
        assert!(step(&kind, &z, &grid, &SolverConfig { max_iters: 0, ..Default::default() }).is_err());
        assert!(step(&kind, &z, &grid, &SolverConfig { tol_residual: 0.0, ..Default::default() }).is_err());
        assert!(step(&kind, &z, &grid, &SolverConfig { tol_increment: f64::NAN, ..Default::default() }).is_err());
        assert!(step(&kind, &ComplexField::zeros(3), &grid, &SolverConfig::default()).is_err());
    }
}
