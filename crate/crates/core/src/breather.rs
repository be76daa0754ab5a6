//! Exact breather solution of the cubic NLS equation and error metrics.

use num_complex::Complex64;

use crate::error::{ensure_same_len, Error, Result};
use crate::grid::{ComplexField, GridSpec};

/// An order estimate is flagged as floor-limited when the coarser of its two
/// errors is within this factor of the spatial error floor.
pub const FLOOR_BAND: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreatherParams {
    pub beta: f64,
    pub omega: f64,
}

impl BreatherParams {
    pub fn new(beta: f64, omega: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < std::f64::consts::SQRT_2) {
            return Err(Error::domain(format!("breather needs 0 < beta < sqrt(2), got {beta}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("breather needs omega > 0, got {omega}")));
        }
        Ok(Self { beta, omega })
    }

    /// `beta = 1.4`, `omega = 25`.
    pub fn benchmark() -> Self {
        Self { beta: 1.4, omega: 25.0 }
    }
}

/// Breather value `z(x, t)`.
pub fn breather(params: BreatherParams, x: f64, t: f64) -> Result<Complex64> {
    let BreatherParams { beta, omega } = BreatherParams::new(params.beta, params.omega)?;
    let root = (2.0 - beta * beta).sqrt();
    let theta = omega * beta * root * t;
    let denom = 2.0 * theta.cosh() - (4.0 - 2.0 * beta * beta).sqrt() * (omega.sqrt() * beta * x).cos();
    if denom.abs() < 1e-12 {
        return Err(Error::BreatherSingularity { x, t });
    }
    let numer = Complex64::new(2.0 * beta * beta * theta.cosh(), 2.0 * beta * root * theta.sinh());
    Ok((numer / denom - 1.0) * omega.sqrt() * Complex64::from_polar(1.0, omega * t))
}

/// Breather sampled on the periodic unknowns of `grid` at time `t`.
pub fn sample(params: BreatherParams, grid: &GridSpec, t: f64) -> Result<ComplexField> {
    let values = grid.x().into_iter().map(|x| breather(params, x, t)).collect::<Result<Vec<_>>>()?;
    ComplexField::from_complex(&values)
}

/// Relative discrete l2 error of `numeric` against `(exact_u, exact_v)`.
pub fn sol_err(numeric: &ComplexField, exact_u: &[f64], exact_v: &[f64]) -> Result<f64> {
    numeric.validate()?;
    ensure_same_len(numeric.len(), exact_u.len())?;
    ensure_same_len(numeric.len(), exact_v.len())?;
    let sq_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let sq = |a: &[f64]| a.iter().map(|x| x * x).sum::<f64>();
    let denom = sq(exact_u) + sq(exact_v);
    if denom == 0.0 {
        return Err(Error::domain("relative error undefined for a zero exact solution"));
    }
    Ok(((sq_diff(&numeric.u, exact_u) + sq_diff(&numeric.v, exact_v)) / denom).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEntry {
    pub order: f64,
    pub floor_limited: bool,
}

/// `log2(err[k-1] / err[k])` for `k = 1..`, with floor detection against the
/// smallest error in the sequence.
pub fn order_estimate(errs: &[f64]) -> Result<Vec<OrderEntry>> {
    let floor = errs.iter().copied().fold(f64::INFINITY, f64::min);
    order_estimate_with_floor(errs, floor)
}

/// As [`order_estimate`] with an explicit spatial error floor.
pub fn order_estimate_with_floor(errs: &[f64], floor: f64) -> Result<Vec<OrderEntry>> {
    if errs.len() < 2 {
        return Err(Error::domain("order estimate needs at least two errors"));
    }
    if let Some(bad) = errs.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::domain(format!("errors must be positive and finite, got {bad}")));
    }
    Ok(errs
        .windows(2)
        .map(|w| OrderEntry { order: (w[0] / w[1]).log2(), floor_limited: w[0] <= FLOOR_BAND * floor })
        .collect())
}
