//! Uniform periodic grid and the discrete difference/average operators.
//!
//! Nodes are `x_m = a + (m-1) dx` for `m = 1..=M`. Under periodicity node `M`
//! is the image of node 1, so every stored array has `M - 1` entries and all
//! neighbour lookups wrap modulo `M - 1`.

use crate::error::{ensure_finite, ensure_same_len, Error, Result};

/// Uniform space-time grid with periodic wrap in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    /// Number of nodes including the periodic image.
    pub nodes: usize,
    pub dx: f64,
    pub t_final: f64,
    pub steps: usize,
    pub dt: f64,
}

impl GridSpec {
    /// Grid from node and step counts.
    pub fn new(a: f64, b: f64, nodes: usize, t_final: f64, steps: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && t_final.is_finite()) {
            return Err(Error::domain("grid bounds must be finite"));
        }
        if b <= a {
            return Err(Error::domain(format!("grid requires b > a (a = {a}, b = {b})")));
        }
        if nodes < 3 {
            return Err(Error::domain(format!("grid requires at least 3 nodes, got {nodes}")));
        }
        if steps < 1 || t_final <= 0.0 {
            return Err(Error::domain("grid requires T > 0 and at least one step"));
        }
        Ok(Self {
            a,
            b,
            nodes,
            dx: (b - a) / (nodes - 1) as f64,
            t_final,
            steps,
            dt: t_final / steps as f64,
        })
    }

    /// Grid from target spacings. `(b - a) / dx` and `T / dt` must be integers
    /// up to a relative slack of `1e-9`. `T = 0` yields a zero-step grid that
    /// keeps the requested `dt`.
    pub fn from_spacing(a: f64, b: f64, dx: f64, t_final: f64, dt: f64) -> Result<Self> {
        if !(dx > 0.0 && dt > 0.0) || !dx.is_finite() || !dt.is_finite() {
            return Err(Error::domain(format!("spacings must be positive (dx = {dx}, dt = {dt})")));
        }
        if b <= a {
            return Err(Error::domain(format!("grid requires b > a (a = {a}, b = {b})")));
        }
        let cells = whole_count((b - a) / dx, "(b - a) / dx")?;
        if t_final < 0.0 || !t_final.is_finite() {
            return Err(Error::domain(format!("final time must be >= 0, got {t_final}")));
        }
        if t_final == 0.0 {
            let mut grid = Self::new(a, b, cells + 1, 1.0, 1)?;
            grid.t_final = 0.0;
            grid.steps = 0;
            grid.dt = dt;
            return Ok(grid);
        }
        let steps = whole_count(t_final / dt, "T / dt")?;
        Self::new(a, b, cells + 1, t_final, steps)
    }

    /// Number of independent periodic unknowns, `M - 1`.
    pub fn unknowns(&self) -> usize {
        self.nodes - 1
    }

    /// Coordinates of the stored nodes `x_1 .. x_{M-1}`.
    pub fn x(&self) -> Vec<f64> {
        (0..self.unknowns()).map(|i| self.a + i as f64 * self.dx).collect()
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }
}

fn whole_count(ratio: f64, what: &str) -> Result<usize> {
    let rounded = ratio.round();
    if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::domain(format!("{what} = {ratio} is not a positive integer")));
    }
    Ok(rounded as usize)
}

/// One time level `z = u + i v` over the periodic unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl ComplexField {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        ensure_same_len(u.len(), v.len())?;
        ensure_finite(&u, "field u")?;
        ensure_finite(&v, "field v")?;
        Ok(Self { u, v })
    }

    pub fn zeros(len: usize) -> Self {
        Self { u: vec![0.0; len], v: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn at(&self, m: usize) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.u[m], self.v[m])
    }

    pub fn from_complex(values: &[num_complex::Complex64]) -> Result<Self> {
        Self::new(values.iter().map(|z| z.re).collect(), values.iter().map(|z| z.im).collect())
    }

    pub fn to_complex(&self) -> Vec<num_complex::Complex64> {
        (0..self.len()).map(|m| self.at(m)).collect()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        ensure_same_len(self.u.len(), self.v.len())?;
        ensure_finite(&self.u, "field u")?;
        ensure_finite(&self.v, "field v")
    }

    /// Max-norm distance to another level.
    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[inline]
pub(crate) fn next(m: usize, len: usize) -> usize {
    if m + 1 == len {
        0
    } else {
        m + 1
    }
}

#[inline]
pub(crate) fn prev(m: usize, len: usize) -> usize {
    if m == 0 {
        len - 1
    } else {
        m - 1
    }
}

fn check_operand(field: &[f64], dx: Option<f64>) -> Result<()> {
    if field.len() < 2 {
        return Err(Error::domain(format!("periodic operator needs length >= 2, got {}", field.len())));
    }
    if let Some(dx) = dx {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::domain(format!("spacing must be positive, got {dx}")));
        }
    }
    ensure_finite(field, "operator input")
}

/// Forward difference `(f[m+1] - f[m]) / dx`, cyclic.
pub fn delta_plus(field: &[f64], dx: f64) -> Result<Vec<f64>> {
    check_operand(field, Some(dx))?;
    Ok(delta_plus_unchecked(field, dx))
}

/// Backward difference `(f[m] - f[m-1]) / dx`, cyclic.
pub fn delta_minus(field: &[f64], dx: f64) -> Result<Vec<f64>> {
    check_operand(field, Some(dx))?;
    Ok(delta_minus_unchecked(field, dx))
}

/// Second difference `(f[m+1] - 2 f[m] + f[m-1]) / dx^2`, cyclic.
pub fn delta_2(field: &[f64], dx: f64) -> Result<Vec<f64>> {
    check_operand(field, Some(dx))?;
    Ok(delta_2_unchecked(field, dx))
}

/// Spatial average `(f[m+1] + f[m]) / 2`, cyclic.
pub fn mu_space(field: &[f64]) -> Result<Vec<f64>> {
    check_operand(field, None)?;
    let len = field.len();
    Ok((0..len).map(|m| 0.5 * (field[next(m, len)] + field[m])).collect())
}

/// Time average of two levels.
pub fn mu_time(level_n: &ComplexField, level_np1: &ComplexField) -> Result<ComplexField> {
    level_n.validate()?;
    level_np1.validate()?;
    ensure_same_len(level_n.len(), level_np1.len())?;
    Ok(mu_time_unchecked(level_n, level_np1))
}

pub(crate) fn delta_plus_unchecked(field: &[f64], dx: f64) -> Vec<f64> {
    let len = field.len();
    (0..len).map(|m| (field[next(m, len)] - field[m]) / dx).collect()
}

pub(crate) fn delta_minus_unchecked(field: &[f64], dx: f64) -> Vec<f64> {
    let len = field.len();
    (0..len).map(|m| (field[m] - field[prev(m, len)]) / dx).collect()
}

pub(crate) fn delta_2_unchecked(field: &[f64], dx: f64) -> Vec<f64> {
    let len = field.len();
    let dx2 = dx * dx;
    (0..len)
        .map(|m| (field[next(m, len)] - 2.0 * field[m] + field[prev(m, len)]) / dx2)
        .collect()
}

pub(crate) fn mu_time_unchecked(level_n: &ComplexField, level_np1: &ComplexField) -> ComplexField {
    let avg = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| 0.5 * (y + x)).collect();
    ComplexField { u: avg(&level_n.u, &level_np1.u), v: avg(&level_n.v, &level_np1.v) }
}
