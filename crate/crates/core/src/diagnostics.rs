//! Discrete conservation laws of charge and energy and the global invariants.
//!
//! Each law is a discrete divergence `d_t G + d_x F` evaluated on a pair of
//! consecutive levels. On the DVD family both laws equal a multiplier times
//! the scheme residual, so they vanish (up to the Newton tolerance) along
//! computed trajectories; the energy law also holds for the AVF family.

use crate::error::{ensure_same_len, Error, Result};
use crate::grid::{next, prev, ComplexField, GridSpec};
use crate::schemes::{SchemeKind, StepPair, Variant};

/// Flux on the pair and density on each of its two levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxDensity {
    pub flux: Vec<f64>,
    pub density_n: Vec<f64>,
    pub density_np1: Vec<f64>,
}

impl FluxDensity {
    /// `d_t G + d_x^+ F` at every node.
    pub fn divergence(&self, dt: f64, dx: f64) -> Vec<f64> {
        let len = self.flux.len();
        (0..len)
            .map(|m| {
                (self.density_np1[m] - self.density_n[m]) / dt + (self.flux[next(m, len)] - self.flux[m]) / dx
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalClReport {
    pub err1: f64,
    pub err2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GlobalInvariantReport {
    pub err_m: f64,
    pub err_h: f64,
}

/// Weight on the charge density: the fitting weight for EF-DVD, 1 otherwise.
pub fn charge_weight(scheme: &SchemeKind, dt: f64) -> Result<f64> {
    match scheme.variant {
        Variant::EfDvd => scheme.weight(dt),
        _ => Ok(1.0),
    }
}

fn time_mean(pair: &StepPair) -> (Vec<f64>, Vec<f64>) {
    let avg = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
    (avg(&pair.zn.u, &pair.znp1.u), avg(&pair.zn.v, &pair.znp1.v))
}

/// Charge flux `2 (mu_x U_{m-1}) (d- V) - 2 (d- U) (mu_x V_{m-1})` with
/// `U, V` the time means, and density `weight * (u^2 + v^2)` per level.
pub fn charge_flux_density(pair: &StepPair, weight: f64) -> Result<FluxDensity> {
    pair.validate()?;
    if !weight.is_finite() {
        return Err(Error::domain("charge weight must be finite"));
    }
    let (mu_u, mu_v) = time_mean(pair);
    let len = pair.len();
    let dx = pair.dx;
    let flux = (0..len)
        .map(|m| {
            let q = prev(m, len);
            let avg_u = 0.5 * (mu_u[m] + mu_u[q]);
            let avg_v = 0.5 * (mu_v[m] + mu_v[q]);
            2.0 * avg_u * (mu_v[m] - mu_v[q]) / dx - 2.0 * (mu_u[m] - mu_u[q]) / dx * avg_v
        })
        .collect();
    let density = |z: &ComplexField| z.u.iter().zip(&z.v).map(|(u, v)| weight * (u * u + v * v)).collect();
    Ok(FluxDensity { flux, density_n: density(&pair.zn), density_np1: density(&pair.znp1) })
}

/// Energy flux `-2 (d- U)(d_t mu_x u_{m-1}) - 2 (d- V)(d_t mu_x v_{m-1})` and
/// the local energy density per level.
pub fn energy_flux_density(pair: &StepPair) -> Result<FluxDensity> {
    pair.validate()?;
    let (mu_u, mu_v) = time_mean(pair);
    let len = pair.len();
    let (dx, dt) = (pair.dx, pair.dt);
    let (zn, z1) = (&pair.zn, &pair.znp1);
    let flux = (0..len)
        .map(|m| {
            let q = prev(m, len);
            let dt_avg_u = ((z1.u[m] + z1.u[q]) - (zn.u[m] + zn.u[q])) / (2.0 * dt);
            let dt_avg_v = ((z1.v[m] + z1.v[q]) - (zn.v[m] + zn.v[q])) / (2.0 * dt);
            -2.0 * (mu_u[m] - mu_u[q]) / dx * dt_avg_u - 2.0 * (mu_v[m] - mu_v[q]) / dx * dt_avg_v
        })
        .collect();
    Ok(FluxDensity { flux, density_n: energy_density(zn, dx), density_np1: energy_density(z1, dx) })
}

/// `((d+u)^2 + (d-u)^2 + (d+v)^2 + (d-v)^2) / 2 - (u^2 + v^2)^2 / 2` per node.
pub fn energy_density(z: &ComplexField, dx: f64) -> Vec<f64> {
    let len = z.len();
    (0..len)
        .map(|m| {
            let (p, q) = (next(m, len), prev(m, len));
            let sq = |x: f64| x * x;
            let grad = sq((z.u[p] - z.u[m]) / dx)
                + sq((z.u[m] - z.u[q]) / dx)
                + sq((z.v[p] - z.v[m]) / dx)
                + sq((z.v[m] - z.v[q]) / dx);
            0.5 * grad - 0.5 * sq(z.u[m] * z.u[m] + z.v[m] * z.v[m])
        })
        .collect()
}

/// Multiplier `(2 mu_t u, -2 mu_t v)` of the charge law.
pub fn charge_multiplier(pair: &StepPair) -> (Vec<f64>, Vec<f64>) {
    let (mu_u, mu_v) = time_mean(pair);
    (mu_u.iter().map(|x| 2.0 * x).collect(), mu_v.iter().map(|x| -2.0 * x).collect())
}

/// Multiplier `(-2 d_t v, -2 d_t u)` of the energy law.
pub fn energy_multiplier(pair: &StepPair) -> (Vec<f64>, Vec<f64>) {
    let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x0, x1)| -2.0 * (x1 - x0) / pair.dt).collect();
    (d(&pair.zn.v, &pair.znp1.v), d(&pair.zn.u, &pair.znp1.u))
}

pub fn global_charge(z: &ComplexField, dx: f64) -> f64 {
    dx * z.u.iter().zip(&z.v).map(|(u, v)| u * u + v * v).sum::<f64>()
}

pub fn global_energy(z: &ComplexField, dx: f64) -> f64 {
    dx * energy_density(z, dx).iter().sum::<f64>()
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Running maxima of the local and global conservation errors, fed one
/// level pair at a time.
#[derive(Debug, Clone)]
pub struct DiagnosticsAccumulator {
    dx: f64,
    dt: f64,
    charge_weight: f64,
    charge0: f64,
    energy0: f64,
    last: ComplexField,
    local: LocalClReport,
    global: GlobalInvariantReport,
}

impl DiagnosticsAccumulator {
    pub fn new(scheme: &SchemeKind, grid: &GridSpec, initial: &ComplexField) -> Result<Self> {
        initial.validate()?;
        ensure_same_len(grid.unknowns(), initial.len())?;
        Ok(Self {
            dx: grid.dx,
            dt: grid.dt,
            charge_weight: charge_weight(scheme, grid.dt)?,
            charge0: global_charge(initial, grid.dx),
            energy0: global_energy(initial, grid.dx),
            last: initial.clone(),
            local: LocalClReport::default(),
            global: GlobalInvariantReport::default(),
        })
    }

    /// Accounts for the pair (previous level, `next`).
    pub fn push(&mut self, next: &ComplexField) -> Result<()> {
        let pair = StepPair::new(std::mem::replace(&mut self.last, next.clone()), next.clone(), self.dt, self.dx)?;
        let charge = charge_flux_density(&pair, self.charge_weight)?.divergence(self.dt, self.dx);
        let energy = energy_flux_density(&pair)?.divergence(self.dt, self.dx);
        self.local.err1 = self.local.err1.max(max_abs(&charge));
        self.local.err2 = self.local.err2.max(max_abs(&energy));
        self.global.err_m = self.global.err_m.max((global_charge(next, self.dx) - self.charge0).abs());
        self.global.err_h = self.global.err_h.max((global_energy(next, self.dx) - self.energy0).abs());
        Ok(())
    }

    pub fn local(&self) -> LocalClReport {
        self.local
    }

    pub fn global(&self) -> GlobalInvariantReport {
        self.global
    }
}

fn accumulate(trajectory: &[ComplexField], grid: &GridSpec, scheme: &SchemeKind) -> Result<DiagnosticsAccumulator> {
    let (first, rest) = trajectory.split_first().ok_or_else(|| Error::domain("empty trajectory"))?;
    let mut acc = DiagnosticsAccumulator::new(scheme, grid, first)?;
    for level in rest {
        acc.push(level)?;
    }
    Ok(acc)
}

/// Largest local conservation-law residuals over all nodes and level pairs.
pub fn local_cl_residuals(trajectory: &[ComplexField], grid: &GridSpec, scheme: &SchemeKind) -> Result<LocalClReport> {
    Ok(accumulate(trajectory, grid, scheme)?.local())
}

/// Largest drift of the global charge and energy from the first level.
pub fn global_invariants(trajectory: &[ComplexField], grid: &GridSpec) -> Result<GlobalInvariantReport> {
    let (first, rest) = trajectory.split_first().ok_or_else(|| Error::domain("empty trajectory"))?;
    first.validate()?;
    let (m0, h0) = (global_charge(first, grid.dx), global_energy(first, grid.dx));
    let mut report = GlobalInvariantReport::default();
    for z in rest {
        z.validate()?;
        report.err_m = report.err_m.max((global_charge(z, grid.dx) - m0).abs());
        report.err_h = report.err_h.max((global_energy(z, grid.dx) - h0).abs());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvd::{semidiscrete_energy, HamiltonianSpec};
    use crate::schemes::{residual_avf, residual_dvd};
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
        StepPair::new(zn, z1, rng.gen_range(0.05..0.5), rng.gen_range(0.2..1.0)).unwrap()
    }

    fn dot(c: &(Vec<f64>, Vec<f64>), r: &crate::schemes::Residual) -> Vec<f64> {
        (0..r.row1.len()).map(|m| c.0[m] * r.row1[m] + c.1[m] * r.row2[m]).collect()
    }

    #[test]
    fn zero_and_constant_fields() {
        let z = ComplexField::zeros(6);
        let pair = StepPair::new(z.clone(), z, 0.1, 0.1).unwrap();
        let c = charge_flux_density(&pair, 1.0).unwrap();
        let e = energy_flux_density(&pair).unwrap();
        for fd in [c, e] {
            assert!(fd.flux.iter().chain(&fd.density_n).chain(&fd.density_np1).all(|&x| x == 0.0));
        }

        let level = ComplexField::new(vec![0.4; 6], vec![-0.9; 6]).unwrap();
        let pair = StepPair::new(level.clone(), level, 0.1, 0.1).unwrap();
        let c = charge_flux_density(&pair, 0.8).unwrap();
        assert!(c.flux.iter().all(|&x| x == 0.0));
        assert!(c.density_n.iter().all(|&g| (g - 0.8 * (0.16 + 0.81)).abs() < 1e-15));
    }

    #[test]
    fn charge_law_is_multiplier_times_dvd_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for a in [1.0, 0.7, 0.35] {
            for _ in 0..20 {
                let pair = random_pair(&mut rng, 16);
                let lhs = charge_flux_density(&pair, a).unwrap().divergence(pair.dt, pair.dx);
                let rhs = dot(&charge_multiplier(&pair), &residual_dvd(&pair, a).unwrap());
                for (l, r) in lhs.iter().zip(&rhs) {
                    assert!((l - r).abs() <= 1e-12, "{l} vs {r}");
                }
            }
        }
    }

    #[test]
    fn energy_law_is_multiplier_times_every_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..20 {
            let pair = random_pair(&mut rng, 16);
            let lhs = energy_flux_density(&pair).unwrap().divergence(pair.dt, pair.dx);
            let mult = energy_multiplier(&pair);
            for a in [1.0, 0.7] {
                for r in [residual_dvd(&pair, a).unwrap(), residual_avf(&pair, a).unwrap()] {
                    for (l, x) in lhs.iter().zip(dot(&mult, &r)) {
                        assert!((l - x).abs() <= 1e-11, "{l} vs {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn energy_density_sums_to_semidiscrete_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let pair = random_pair(&mut rng, 12);
        let want = semidiscrete_energy(&HamiltonianSpec::nls(), &pair.zn, pair.dx).unwrap();
        assert!((global_energy(&pair.zn, pair.dx) - want).abs() <= 1e-13 * want.abs().max(1.0));
    }

    #[test]
    fn local_laws_telescope_to_global_changes() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let pair = random_pair(&mut rng, 10);
        let a = 0.85;
        let charge: f64 = charge_flux_density(&pair, a).unwrap().divergence(pair.dt, pair.dx).iter().sum::<f64>() * pair.dx;
        let dm = a * (global_charge(&pair.znp1, pair.dx) - global_charge(&pair.zn, pair.dx)) / pair.dt;
        assert!((charge - dm).abs() <= 1e-12 * dm.abs().max(1.0));
        let energy: f64 = energy_flux_density(&pair).unwrap().divergence(pair.dt, pair.dx).iter().sum::<f64>() * pair.dx;
        let dh = (global_energy(&pair.znp1, pair.dx) - global_energy(&pair.zn, pair.dx)) / pair.dt;
        assert!((energy - dh).abs() <= 1e-12 * dh.abs().max(1.0));
    }

    #[test]
    fn trajectory_reports() {
        let grid = GridSpec::new(0.0, 1.0, 6, 0.3, 3).unwrap();
        let scheme = SchemeKind::new(Variant::Dvd, 0.0);
        let zeros = vec![ComplexField::zeros(5); 4];
        assert_eq!(local_cl_residuals(&zeros, &grid, &scheme).unwrap(), LocalClReport::default());
        assert_eq!(global_invariants(&zeros, &grid).unwrap(), GlobalInvariantReport::default());

        let level = ComplexField::new(vec![0.2, 0.1, -0.3, 0.5, 0.0], vec![0.4, -0.2, 0.1, 0.0, 0.3]).unwrap();
        let frozen = vec![level; 4];
        assert_eq!(global_invariants(&frozen, &grid).unwrap(), GlobalInvariantReport::default());

        assert!(local_cl_residuals(&[], &grid, &scheme).is_err());
        assert!(global_invariants(&[], &grid).is_err());
    }
}
