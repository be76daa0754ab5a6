//! Single runs and convergence sweeps on the breather benchmark.

mod config;
mod report;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

pub use config::{eval_number, parse_settings, Settings};
pub use report::{write_csv, write_plot_data, CSV_HEADER};

use crate::breather::{order_estimate_with_floor, sample, sol_err, BreatherParams, OrderEntry};
use crate::diagnostics::{DiagnosticsAccumulator, GlobalInvariantReport, LocalClReport};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::newton::{step, SolverConfig};
use crate::schemes::{SchemeKind, Variant};

/// Name of the built-in benchmark preset.
pub const PRESET_BREATHER: &str = "breather-paper";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    /// Grid of a single run; sweeps replace its `dt`.
    pub grid: GridSpec,
    pub breather: BreatherParams,
    pub solver: SolverConfig,
    pub sweep: Option<Vec<f64>>,
    pub output_path: PathBuf,
}

/// `dt / 2^k` for `k = 0..=max_k`.
pub fn halving_steps(dt: f64, max_k: u32) -> Vec<f64> {
    (0..=max_k).map(|k| dt / 2f64.powi(k as i32)).collect()
}

impl RunConfig {
    /// Breather with `beta = 1.4`, `omega = 25` on `[-pi/7, pi/7]`, `dx = 2 pi / 7000`,
    /// `T = 0.5`, `dt = 0.01`, sweep over `0.01 / 2^k`, `k = 0..5`.
    pub fn benchmark(variant: Variant) -> Self {
        let breather = BreatherParams::benchmark();
        let grid = GridSpec::from_spacing(-PI / 7.0, PI / 7.0, 2.0 * PI / 7000.0, 0.5, 0.01)
            .expect("benchmark grid is valid");
        Self {
            scheme: SchemeKind::new(variant, breather.omega),
            grid,
            breather,
            solver: SolverConfig::default(),
            sweep: Some(halving_steps(0.01, 5)),
            output_path: PathBuf::from("results"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let config_err = |e: Error| Error::Config(e.to_string());
        self.solver.validate()?;
        BreatherParams::new(self.breather.beta, self.breather.omega).map_err(config_err)?;
        for &dt in self.sweep_dts().iter() {
            self.grid_for(dt)?;
            self.scheme.weight(dt).map_err(config_err)?;
        }
        Ok(())
    }

    /// Step sizes of a sweep, or the single `grid.dt`.
    pub fn sweep_dts(&self) -> Vec<f64> {
        self.sweep.clone().unwrap_or_else(|| vec![self.grid.dt])
    }

    /// The run grid with its step replaced by `dt`.
    pub fn grid_for(&self, dt: f64) -> Result<GridSpec> {
        let g = &self.grid;
        GridSpec::from_spacing(g.a, g.b, g.dx, g.t_final, dt).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    /// Newton failed on the step into level `step`.
    Failed { step: usize, reason: String },
}

impl RowStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RowStatus::Ok)
    }
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::Failed { step, .. } => write!(f, "failed@{step}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub dt: f64,
    pub dx: f64,
    /// NaN when the run did not reach the final time.
    pub sol_err: f64,
    pub order: Option<OrderEntry>,
    pub local: LocalClReport,
    pub global: GlobalInvariantReport,
    pub newton_iters: usize,
    pub wall_seconds: f64,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scheme: SchemeKind,
    pub breather: BreatherParams,
    /// Ordered by decreasing `dt`.
    pub rows: Vec<RunRow>,
}

impl RunReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.status.is_ok())
    }

    pub fn sol_errs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.sol_err).collect()
    }
}

/// Integrates `initial` over every step of `grid`, returning all levels.
pub fn trajectory(
    scheme: &SchemeKind,
    grid: &GridSpec,
    initial: &ComplexField,
    solver: &SolverConfig,
) -> Result<Vec<ComplexField>> {
    let mut levels = Vec::with_capacity(grid.steps + 1);
    levels.push(initial.clone());
    for _ in 0..grid.steps {
        let (next, _) = step(scheme, levels.last().expect("nonempty"), grid, solver)?;
        levels.push(next);
    }
    Ok(levels)
}

fn run_row(config: &RunConfig, grid: &GridSpec) -> Result<RunRow> {
    let started = Instant::now();
    let mut z = sample(config.breather, grid, 0.0)?;
    let mut acc = DiagnosticsAccumulator::new(&config.scheme, grid, &z)?;
    let mut newton_iters = 0;
    let mut status = RowStatus::Ok;
    for n in 1..=grid.steps {
        match step(&config.scheme, &z, grid, &config.solver) {
            Ok((next, stats)) => {
                newton_iters += stats.iterations;
                acc.push(&next)?;
                z = next;
            }
            Err(e @ (Error::NonConvergence(_) | Error::SingularJacobian(_))) => {
                if let Error::NonConvergence(stats) = &e {
                    newton_iters += stats.iterations;
                }
                status = RowStatus::Failed { step: n, reason: e.to_string() };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let sol_err = if status.is_ok() {
        let exact = sample(config.breather, grid, grid.time(grid.steps))?;
        sol_err(&z, &exact.u, &exact.v)?
    } else {
        f64::NAN
    };
    Ok(RunRow {
        dt: grid.dt,
        dx: grid.dx,
        sol_err,
        order: None,
        local: acc.local(),
        global: acc.global(),
        newton_iters,
        wall_seconds: started.elapsed().as_secs_f64(),
        status,
    })
}

/// Integrates the breather from `t = 0` to `T` on `config.grid`.
///
/// Newton failure is not an error: the row is marked failed with the step
/// index and keeps the diagnostics gathered up to that step.
pub fn run_single(config: &RunConfig) -> Result<RunReport> {
    config.solver.validate()?;
    config.scheme.weight(config.grid.dt).map_err(|e| Error::Config(e.to_string()))?;
    let row = run_row(config, &config.grid)?;
    Ok(RunReport { scheme: config.scheme, breather: config.breather, rows: vec![row] })
}

/// Runs every step size in the sweep, at most `jobs` at a time, and fills in
/// the order column.
pub fn run_sweep(config: &RunConfig, jobs: usize) -> Result<RunReport> {
    config.validate()?;
    let mut dts = config.sweep_dts();
    dts.sort_by(|a, b| b.total_cmp(a));
    let grids = dts.iter().map(|&dt| config.grid_for(dt)).collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut rows = pool.install(|| grids.par_iter().map(|g| run_row(config, g)).collect::<Result<Vec<_>>>())?;
    fill_orders(&mut rows);
    Ok(RunReport { scheme: config.scheme, breather: config.breather, rows })
}

/// Order estimates between consecutive successful rows, flagged against the
/// smallest error of the sweep.
fn fill_orders(rows: &mut [RunRow]) {
    let valid = |r: &RunRow| r.status.is_ok() && r.sol_err > 0.0 && r.sol_err.is_finite();
    let floor = rows.iter().filter(|r| valid(r)).map(|r| r.sol_err).fold(f64::INFINITY, f64::min);
    for k in 1..rows.len() {
        if valid(&rows[k - 1]) && valid(&rows[k]) {
            let pair = [rows[k - 1].sol_err, rows[k].sol_err];
            rows[k].order = order_estimate_with_floor(&pair, floor).ok().map(|o| o[0]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(variant: Variant) -> RunConfig {
        let mut cfg = RunConfig::benchmark(variant);
        cfg.grid = GridSpec::from_spacing(-PI / 7.0, PI / 7.0, 2.0 * PI / 700.0, 0.02, 0.01).unwrap();
        cfg.sweep = Some(halving_steps(0.01, 2));
        cfg
    }

    #[test]
    fn zero_time_run_is_exact() {
        let mut cfg = small(Variant::EfDvd);
        cfg.grid = GridSpec::from_spacing(cfg.grid.a, cfg.grid.b, cfg.grid.dx, 0.0, 0.01).unwrap();
        let row = &run_single(&cfg).unwrap().rows[0];
        assert_eq!(row.sol_err, 0.0);
        assert_eq!((row.local, row.global), (LocalClReport::default(), GlobalInvariantReport::default()));
        assert_eq!(row.newton_iters, 0);
    }

    #[test]
    fn sweep_rows_sorted_and_deterministic() {
        let mut cfg = small(Variant::Dvd);
        cfg.sweep = Some(vec![0.0025, 0.01, 0.005]);
        let a = run_sweep(&cfg, 3).unwrap();
        let b = run_sweep(&cfg, 1).unwrap();
        let dts: Vec<f64> = a.rows.iter().map(|r| r.dt).collect();
        assert_eq!(dts, [0.01, 0.005, 0.0025]);
        assert!(a.rows[0].order.is_none() && a.rows[1].order.is_some());
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!((x.sol_err, x.local, x.global, x.newton_iters), (y.sol_err, y.local, y.global, y.newton_iters));
        }
    }

    #[test]
    fn newton_failure_marks_row() {
        let mut cfg = small(Variant::Avf);
        cfg.solver.max_iters = 1;
        let report = run_single(&cfg).unwrap();
        let row = &report.rows[0];
        assert!(matches!(row.status, RowStatus::Failed { step: 1, .. }));
        assert!(row.sol_err.is_nan());
        assert_eq!(row.status.to_string(), "failed@1");
        assert!(!report.all_ok());
    }

    #[test]
    fn fitting_pole_is_a_config_error() {
        let mut cfg = small(Variant::EfAvf);
        cfg.sweep = Some(vec![0.2]);
        assert!(matches!(run_sweep(&cfg, 1), Err(Error::Config(_))));
    }

    #[test]
    fn trajectory_from_zero_stays_zero() {
        let grid = GridSpec::new(0.0, 1.0, 9, 0.1, 4).unwrap();
        let z0 = ComplexField::zeros(8);
        let levels = trajectory(&SchemeKind::new(Variant::EfDvd, 3.0), &grid, &z0, &SolverConfig::default()).unwrap();
        assert_eq!(levels.len(), 5);
        assert!(levels.iter().all(|z| z == &z0));
    }
}
