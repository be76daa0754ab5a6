//! Residual operators of the four NLS schemes in real two-row form.
//!
//! With `z = u + i v`, the DVD family reads
//!
//! ```text
//! row1 =  a d_t u + d2 mu_t v + mu_t(u^2 + v^2) mu_t v
//! row2 = -a d_t v + d2 mu_t u + mu_t(u^2 + v^2) mu_t u
//! ```
//!
//! and the AVF family replaces the nonlinear terms by the line average of
//! `(u^2 + v^2) (v, u)` between the two levels, which in closed form is
//! `mu_t(v^2) mu_t v + 2/3 (mu_t u)^2 mu_t v + 1/3 mu_t(u^2 v)` for row 1 and
//! the `u <-> v` mirror for row 2. The weight `a` is 1 for the classic schemes
//! and the fitting weight for the exponentially fitted ones.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dvd::{discrete_variational_derivative, HamiltonianSpec};
use crate::error::{ensure_same_len, Error, Result};
use crate::fitting::{alpha, FitParams};
use crate::grid::{next, prev, ComplexField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Dvd,
    EfDvd,
    Avf,
    EfAvf,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Dvd, Variant::EfDvd, Variant::Avf, Variant::EfAvf];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Dvd => "dvd",
            Variant::EfDvd => "ef-dvd",
            Variant::Avf => "avf",
            Variant::EfAvf => "ef-avf",
        }
    }

    pub fn is_fitted(&self) -> bool {
        matches!(self, Variant::EfDvd | Variant::EfAvf)
    }

    pub fn is_dvd_family(&self) -> bool {
        matches!(self, Variant::Dvd | Variant::EfDvd)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "dvd" => Ok(Variant::Dvd),
            "ef-dvd" | "efdvd" => Ok(Variant::EfDvd),
            "avf" => Ok(Variant::Avf),
            "ef-avf" | "efavf" => Ok(Variant::EfAvf),
            other => Err(Error::Config(format!("unknown scheme '{other}' (expected dvd, ef-dvd, avf, ef-avf)"))),
        }
    }
}

/// Scheme selection plus the fitting frequency used by the fitted variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeKind {
    pub variant: Variant,
    pub omega: f64,
}

impl SchemeKind {
    pub fn new(variant: Variant, omega: f64) -> Self {
        Self { variant, omega }
    }

    /// Time-difference weight for step `dt`: 1 for classic variants.
    pub fn weight(&self, dt: f64) -> Result<f64> {
        if self.variant.is_fitted() {
            alpha(FitParams::new(self.omega, dt)?)
        } else {
            Ok(1.0)
        }
    }

    pub fn residual(&self, pair: &StepPair) -> Result<Residual> {
        let a = self.weight(pair.dt)?;
        if self.variant.is_dvd_family() {
            residual_dvd(pair, a)
        } else {
            residual_avf(pair, a)
        }
    }
}

/// Two consecutive levels and the steps between them.
#[derive(Debug, Clone)]
pub struct StepPair {
    pub zn: ComplexField,
    pub znp1: ComplexField,
    pub dt: f64,
    pub dx: f64,
}

impl StepPair {
    pub fn new(zn: ComplexField, znp1: ComplexField, dt: f64, dx: f64) -> Result<Self> {
        let pair = Self { zn, znp1, dt, dx };
        pair.validate()?;
        Ok(pair)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.zn.validate()?;
        self.znp1.validate()?;
        ensure_same_len(self.zn.len(), self.znp1.len())?;
        if self.zn.len() < 2 {
            return Err(Error::domain("step pair needs at least two periodic unknowns"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite() && self.dx > 0.0 && self.dx.is_finite()) {
            return Err(Error::domain(format!("steps must be positive (dt = {}, dx = {})", self.dt, self.dx)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.zn.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zn.is_empty()
    }
}

/// The two residual rows, each of length `M - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub row1: Vec<f64>,
    pub row2: Vec<f64>,
}

impl Residual {
    pub fn max_norm(&self) -> f64 {
        self.row1.iter().chain(&self.row2).fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Residual) -> f64 {
        self.row1
            .iter()
            .zip(&other.row1)
            .chain(self.row2.iter().zip(&other.row2))
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

fn check_weight(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("time weight must be positive, got {a}")))
    }
}

/// Per-node quantities shared by residuals and Jacobians.
struct Local {
    u0: f64,
    v0: f64,
    u1: f64,
    v1: f64,
    mu_u: f64,
    mu_v: f64,
    lap_mu_u: f64,
    lap_mu_v: f64,
}

fn locals(pair: &StepPair) -> impl Iterator<Item = Local> + '_ {
    let len = pair.len();
    let (zn, z1) = (&pair.zn, &pair.znp1);
    let mu = |w0: &[f64], w1: &[f64], k: usize| 0.5 * (w0[k] + w1[k]);
    let inv_dx2 = 1.0 / (pair.dx * pair.dx);
    (0..len).map(move |m| {
        let (p, q) = (next(m, len), prev(m, len));
        let mu_u = mu(&zn.u, &z1.u, m);
        let mu_v = mu(&zn.v, &z1.v, m);
        Local {
            u0: zn.u[m],
            v0: zn.v[m],
            u1: z1.u[m],
            v1: z1.v[m],
            mu_u,
            mu_v,
            lap_mu_u: (mu(&zn.u, &z1.u, p) - 2.0 * mu_u + mu(&zn.u, &z1.u, q)) * inv_dx2,
            lap_mu_v: (mu(&zn.v, &z1.v, p) - 2.0 * mu_v + mu(&zn.v, &z1.v, q)) * inv_dx2,
        }
    })
}

fn dvd_nonlinear(l: &Local) -> (f64, f64) {
    let s = 0.5 * ((l.u0 * l.u0 + l.v0 * l.v0) + (l.u1 * l.u1 + l.v1 * l.v1));
    (s * l.mu_v, s * l.mu_u)
}

fn avf_nonlinear(l: &Local) -> (f64, f64) {
    let mu_u2 = 0.5 * (l.u0 * l.u0 + l.u1 * l.u1);
    let mu_v2 = 0.5 * (l.v0 * l.v0 + l.v1 * l.v1);
    let n1 = mu_v2 * l.mu_v
        + 2.0 / 3.0 * l.mu_u * l.mu_u * l.mu_v
        + 1.0 / 3.0 * 0.5 * (l.u0 * l.u0 * l.v0 + l.u1 * l.u1 * l.v1);
    let n2 = mu_u2 * l.mu_u
        + 2.0 / 3.0 * l.mu_v * l.mu_v * l.mu_u
        + 1.0 / 3.0 * 0.5 * (l.v0 * l.v0 * l.u0 + l.v1 * l.v1 * l.u1);
    (n1, n2)
}

fn assemble(pair: &StepPair, a: f64, nonlinear: fn(&Local) -> (f64, f64)) -> Residual {
    let len = pair.len();
    let mut row1 = Vec::with_capacity(len);
    let mut row2 = Vec::with_capacity(len);
    for l in locals(pair) {
        let (n1, n2) = nonlinear(&l);
        row1.push(a * (l.u1 - l.u0) / pair.dt + l.lap_mu_v + n1);
        row2.push(-a * (l.v1 - l.v0) / pair.dt + l.lap_mu_u + n2);
    }
    Residual { row1, row2 }
}

/// DVD residual with time weight `a` (`a = 1` is the classic scheme).
pub fn residual_dvd(pair: &StepPair, a: f64) -> Result<Residual> {
    pair.validate()?;
    check_weight(a)?;
    Ok(assemble(pair, a, dvd_nonlinear))
}

/// AVF residual with time weight `a` (`a = 1` is the classic scheme).
pub fn residual_avf(pair: &StepPair, a: f64) -> Result<Residual> {
    pair.validate()?;
    check_weight(a)?;
    Ok(assemble(pair, a, avf_nonlinear))
}

/// Size of the individual terms entering the residual (time difference,
/// each stencil entry of the second difference, nonlinear part), maximised
/// over the grid. Used to turn absolute residuals into relative ones.
pub fn residual_scale(pair: &StepPair, a: f64) -> f64 {
    let len = pair.len();
    let inv_dx2 = 1.0 / (pair.dx * pair.dx);
    let mu_u: Vec<f64> = pair.zn.u.iter().zip(&pair.znp1.u).map(|(x, y)| 0.5 * (x + y).abs()).collect();
    let mu_v: Vec<f64> = pair.zn.v.iter().zip(&pair.znp1.v).map(|(x, y)| 0.5 * (x + y).abs()).collect();
    locals(pair)
        .enumerate()
        .map(|(m, l)| {
            let (p, q) = (next(m, len), prev(m, len));
            let (n1, n2) = dvd_nonlinear(&l);
            let s1 = a * (l.u1.abs() + l.u0.abs()) / pair.dt + (mu_v[p] + 2.0 * mu_v[m] + mu_v[q]) * inv_dx2 + n1.abs();
            let s2 = a * (l.v1.abs() + l.v0.abs()) / pair.dt + (mu_u[p] + 2.0 * mu_u[m] + mu_u[q]) * inv_dx2 + n2.abs();
            s1.max(s2)
        })
        .fold(0.0, f64::max)
}

/// Jacobian of a residual with respect to `(u_{n+1}, v_{n+1})`: per-node 2x2
/// diagonal blocks plus the constant coupling `1 / (2 dx^2)` between the
/// first row and `v` (second row and `u`) at both neighbours.
#[derive(Debug, Clone)]
pub struct SchemeJacobian {
    pub diag: Vec<[[f64; 2]; 2]>,
    pub coupling: f64,
}

impl SchemeJacobian {
    /// Dense copy, unknowns ordered `(u_0, v_0, u_1, v_1, ...)`.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let len = self.diag.len();
        let mut out = nalgebra::DMatrix::zeros(2 * len, 2 * len);
        for (m, block) in self.diag.iter().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    out[(2 * m + r, 2 * m + c)] += block[r][c];
                }
            }
            for nb in [next(m, len), prev(m, len)] {
                out[(2 * m, 2 * nb + 1)] += self.coupling;
                out[(2 * m + 1, 2 * nb)] += self.coupling;
            }
        }
        out
    }
}

pub fn jacobian(variant: Variant, pair: &StepPair, a: f64) -> Result<SchemeJacobian> {
    pair.validate()?;
    check_weight(a)?;
    let coupling = 0.5 / (pair.dx * pair.dx);
    let time = a / pair.dt;
    let diag = locals(pair)
        .map(|l| {
            if variant.is_dvd_family() {
                let s = 0.5 * ((l.u0 * l.u0 + l.v0 * l.v0) + (l.u1 * l.u1 + l.v1 * l.v1));
                [
                    [time + l.u1 * l.mu_v, -2.0 * coupling + 0.5 * s + l.v1 * l.mu_v],
                    [-2.0 * coupling + 0.5 * s + l.u1 * l.mu_u, -time + l.v1 * l.mu_u],
                ]
            } else {
                let mu_u2 = 0.5 * (l.u0 * l.u0 + l.u1 * l.u1);
                let mu_v2 = 0.5 * (l.v0 * l.v0 + l.v1 * l.v1);
                let cross = 2.0 / 3.0 * l.mu_u * l.mu_v + l.u1 * l.v1 / 3.0;
                [
                    [
                        time + cross,
                        -2.0 * coupling + l.v1 * l.mu_v + 0.5 * mu_v2 + l.mu_u * l.mu_u / 3.0 + l.u1 * l.u1 / 6.0,
                    ],
                    [
                        -2.0 * coupling + l.u1 * l.mu_u + 0.5 * mu_u2 + l.mu_v * l.mu_v / 3.0 + l.v1 * l.v1 / 6.0,
                        -time + cross,
                    ],
                ]
            }
        })
        .collect();
    Ok(SchemeJacobian { diag, coupling })
}

/// Largest gap between the closed-form AVF nonlinearity and the line integral
/// of `(u^2 + v^2) (v, u)` from `z_n` to `z_{n+1}` by two-point Gauss-Legendre
/// quadrature (exact for cubic integrands).
pub fn avf_gradient_check(pair: &StepPair) -> Result<f64> {
    pair.validate()?;
    let nodes = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    Ok(locals(pair)
        .map(|l| {
            let (n1, n2) = avf_nonlinear(&l);
            let (mut q1, mut q2) = (0.0, 0.0);
            for xi in nodes {
                let u = xi * l.u1 + (1.0 - xi) * l.u0;
                let v = xi * l.v1 + (1.0 - xi) * l.v0;
                let r2 = u * u + v * v;
                q1 += 0.5 * r2 * v;
                q2 += 0.5 * r2 * u;
            }
            (n1 - q1).abs().max((n2 - q2).abs())
        })
        .fold(0.0, f64::max))
}

/// Relative gap between [`residual_dvd`] with unit weight and the residual of
/// `i d_t z - F(z_{n+1}, z_n)`, where `F` is the generic discrete variational
/// derivative of the NLS density. Normalised by `max(1, residual_scale)`.
pub fn dvd_cross_check(pair: &StepPair) -> Result<f64> {
    let closed = residual_dvd(pair, 1.0)?;
    let dvd = discrete_variational_derivative(&HamiltonianSpec::nls(), &pair.znp1, &pair.zn, pair.dx)?;
    let mut generic = Residual { row1: Vec::with_capacity(pair.len()), row2: Vec::with_capacity(pair.len()) };
    for (m, f) in dvd.iter().enumerate() {
        let dz = (pair.znp1.at(m) - pair.zn.at(m)) / pair.dt;
        let e = Complex64::i() * dz - f;
        generic.row1.push(e.im);
        generic.row2.push(e.re);
    }
    Ok(closed.max_abs_diff(&generic) / residual_scale(pair, 1.0).max(1.0))
}
