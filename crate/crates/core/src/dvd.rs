//! Discrete variational derivative for product-form Hamiltonian densities.
//!
//! The local density at node `m` is
//!
//! ```text
//! H_m = sum_l c_l |f_l(Z_m)|^p_l |g+_l(d+ Z_m)|^q+_l |g-_l(d- Z_m)|^q-_l
//! ```
//!
//! and the two-level derivative is built from divided differences of the
//! factors so that `H(a) - H(b)` telescopes exactly against `a - b` after
//! summation by parts on a periodic grid.

use num_complex::Complex64;

use crate::error::{ensure_same_len, Error, Result};
use crate::grid::{next, prev, ComplexField};

/// An analytic scalar function paired with its derivative.
#[derive(Clone, Copy)]
pub struct AnalyticFn {
    pub value: fn(Complex64) -> Complex64,
    pub derivative: fn(Complex64) -> Complex64,
}

impl AnalyticFn {
    pub const IDENTITY: AnalyticFn = AnalyticFn { value: |z| z, derivative: |_| Complex64::new(1.0, 0.0) };

    /// `(f(a) - f(b)) / (a - b)`, or `f'(a)` when the arguments coincide.
    pub fn divided_difference(&self, a: Complex64, b: Complex64) -> Complex64 {
        if a == b {
            (self.derivative)(a)
        } else {
            ((self.value)(a) - (self.value)(b)) / (a - b)
        }
    }
}

impl std::fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("AnalyticFn")
    }
}

/// One factor `|func(s)|^exponent` of a density term, or the constant one.
#[derive(Debug, Clone, Copy)]
pub enum Factor {
    One,
    Power { func: AnalyticFn, exponent: u32 },
}

impl Factor {
    pub fn power(func: AnalyticFn, exponent: u32) -> Self {
        Factor::Power { func, exponent }
    }

    /// Value of the factor at argument `s`.
    pub fn magnitude(&self, s: Complex64) -> f64 {
        match self {
            Factor::One => 1.0,
            Factor::Power { func, exponent } => (func.value)(s).norm().powi(*exponent as i32),
        }
    }

    fn mean(&self, s1: Complex64, s2: Complex64) -> f64 {
        match self {
            Factor::One => 1.0,
            _ => 0.5 * (self.magnitude(s1) + self.magnitude(s2)),
        }
    }

    /// Coefficient of `s1 - s2` in the discrete-gradient split of
    /// `|func(s1)|^k - |func(s2)|^k`; zero for the constant factor.
    fn gradient(&self, s1: Complex64, s2: Complex64) -> Complex64 {
        match self {
            Factor::One => Complex64::new(0.0, 0.0),
            Factor::Power { func, exponent } => {
                let (f1, f2) = ((func.value)(s1), (func.value)(s2));
                func.divided_difference(s1, s2) * rho_unchecked(*exponent, f1, f2)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DensityTerm {
    pub coeff: f64,
    pub f: Factor,
    pub g_plus: Factor,
    pub g_minus: Factor,
}

impl DensityTerm {
    fn value(&self, z: Complex64, dplus: Complex64, dminus: Complex64) -> f64 {
        self.coeff * self.f.magnitude(z) * self.g_plus.magnitude(dplus) * self.g_minus.magnitude(dminus)
    }
}

#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    terms: Vec<DensityTerm>,
}

impl HamiltonianSpec {
    pub fn new(terms: Vec<DensityTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("hamiltonian needs at least one density term"));
        }
        for (i, term) in terms.iter().enumerate() {
            if !term.coeff.is_finite() {
                return Err(Error::domain(format!("term {i}: non-finite coefficient")));
            }
            for factor in [&term.f, &term.g_plus, &term.g_minus] {
                if let Factor::Power { exponent, .. } = factor {
                    if *exponent < 2 {
                        return Err(Error::domain(format!("term {i}: exponent {exponent} < 2")));
                    }
                }
            }
        }
        Ok(Self { terms })
    }

    /// `(|d+ Z|^2 + |d- Z|^2) / 2 - |Z|^4 / 2`, the cubic NLS density.
    pub fn nls() -> Self {
        let id = AnalyticFn::IDENTITY;
        Self {
            terms: vec![
                DensityTerm { coeff: 0.5, f: Factor::One, g_plus: Factor::power(id, 2), g_minus: Factor::One },
                DensityTerm { coeff: 0.5, f: Factor::One, g_plus: Factor::One, g_minus: Factor::power(id, 2) },
                DensityTerm { coeff: -0.5, f: Factor::power(id, 4), g_plus: Factor::One, g_minus: Factor::One },
            ],
        }
    }

    pub fn terms(&self) -> &[DensityTerm] {
        &self.terms
    }

    /// Local density evaluated on independent node, forward and backward
    /// difference arguments.
    pub fn local_density(&self, z: Complex64, dplus: Complex64, dminus: Complex64) -> f64 {
        self.terms.iter().map(|t| t.value(z, dplus, dminus)).sum()
    }
}

/// Two-point factor making `rho (s1 - s2) + conj(rho) (s1* - s2*) = |s1|^k - |s2|^k`.
///
/// Even `k`: `(s1* + s2*)/2 * sum_{j=0}^{k/2-1} |s1|^(k-2-2j) |s2|^(2j)`.
/// Odd `k`: `(s1* + s2*)/2 * (sum_{j=0}^{k-1} |s1|^(k-1-j) |s2|^j) / (|s1| + |s2|)`,
/// i.e. `(r1^k - r2^k) / (r1^2 - r2^2)` written without cancellation. The odd
/// sum runs over every power of `|s2|`; skipping the odd powers breaks the
/// identity above.
pub fn rho(k: u32, s1: Complex64, s2: Complex64) -> Result<Complex64> {
    if k < 2 {
        return Err(Error::domain(format!("rho requires k >= 2, got {k}")));
    }
    if !(s1.is_finite() && s2.is_finite()) {
        return Err(Error::domain("rho arguments must be finite"));
    }
    Ok(rho_unchecked(k, s1, s2))
}

fn rho_unchecked(k: u32, s1: Complex64, s2: Complex64) -> Complex64 {
    let (r1, r2) = (s1.norm(), s2.norm());
    let mean_conj = 0.5 * (s1.conj() + s2.conj());
    let weight = if k.is_multiple_of(2) {
        let (q1, q2) = (r1 * r1, r2 * r2);
        geometric_sum(q1, q2, k / 2)
    } else {
        let denom = r1 + r2;
        if denom == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        geometric_sum(r1, r2, k) / denom
    };
    mean_conj * weight
}

/// `sum_{j=0}^{n-1} x^(n-1-j) y^j`.
fn geometric_sum(x: f64, y: f64, n: u32) -> f64 {
    (0..n).map(|j| x.powi((n - 1 - j) as i32) * y.powi(j as i32)).sum()
}

#[derive(Clone, Copy)]
struct NodeArgs {
    z: Complex64,
    dplus: Complex64,
    dminus: Complex64,
}

fn node_args(field: &ComplexField, dx: f64, m: usize) -> NodeArgs {
    let len = field.len();
    let z = field.at(m);
    NodeArgs { z, dplus: (field.at(next(m, len)) - z) / dx, dminus: (z - field.at(prev(m, len))) / dx }
}

fn validate_pair(a: &ComplexField, b: &ComplexField, dx: f64) -> Result<()> {
    a.validate()?;
    b.validate()?;
    ensure_same_len(a.len(), b.len())?;
    if a.len() < 2 {
        return Err(Error::domain("fields need at least two periodic unknowns"));
    }
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(Error::domain(format!("spacing must be positive, got {dx}")));
    }
    Ok(())
}

fn check_index(len: usize, m: usize) -> Result<()> {
    if m < len {
        Ok(())
    } else {
        Err(Error::domain(format!("node index {m} out of range for {len} unknowns")))
    }
}

fn op_node(spec: &HamiltonianSpec, a: NodeArgs, b: NodeArgs) -> Complex64 {
    spec.terms
        .iter()
        .filter(|t| !matches!(t.f, Factor::One))
        .map(|t| {
            let qq = 0.5
                * (t.g_plus.magnitude(a.dplus) * t.g_minus.magnitude(a.dminus)
                    + t.g_plus.magnitude(b.dplus) * t.g_minus.magnitude(b.dminus));
            t.coeff * qq * t.f.gradient(a.z, b.z)
        })
        .sum()
}

fn op_dplus(spec: &HamiltonianSpec, a: NodeArgs, b: NodeArgs) -> Complex64 {
    spec.terms
        .iter()
        .filter(|t| !matches!(t.g_plus, Factor::One))
        .map(|t| {
            t.coeff * t.f.mean(a.z, b.z) * t.g_minus.mean(a.dminus, b.dminus) * t.g_plus.gradient(a.dplus, b.dplus)
        })
        .sum()
}

fn op_dminus(spec: &HamiltonianSpec, a: NodeArgs, b: NodeArgs) -> Complex64 {
    spec.terms
        .iter()
        .filter(|t| !matches!(t.g_minus, Factor::One))
        .map(|t| {
            t.coeff * t.f.mean(a.z, b.z) * t.g_plus.mean(a.dplus, b.dplus) * t.g_minus.gradient(a.dminus, b.dminus)
        })
        .sum()
}

/// Two-level derivative of the density with respect to the node value `Z_m`
/// (coefficient of `a_m - b_m`).
pub fn partial_h(spec: &HamiltonianSpec, a: &ComplexField, b: &ComplexField, dx: f64, m: usize) -> Result<Complex64> {
    validate_pair(a, b, dx)?;
    check_index(a.len(), m)?;
    Ok(op_node(spec, node_args(a, dx, m), node_args(b, dx, m)))
}

/// Two-level derivative with respect to the forward difference `d+ Z_m`.
pub fn partial_h_dplus(
    spec: &HamiltonianSpec,
    a: &ComplexField,
    b: &ComplexField,
    dx: f64,
    m: usize,
) -> Result<Complex64> {
    validate_pair(a, b, dx)?;
    check_index(a.len(), m)?;
    Ok(op_dplus(spec, node_args(a, dx, m), node_args(b, dx, m)))
}

/// Two-level derivative with respect to the backward difference `d- Z_m`.
/// Both the divided difference and `rho` take backward-difference arguments.
pub fn partial_h_dminus(
    spec: &HamiltonianSpec,
    a: &ComplexField,
    b: &ComplexField,
    dx: f64,
    m: usize,
) -> Result<Complex64> {
    validate_pair(a, b, dx)?;
    check_index(a.len(), m)?;
    Ok(op_dminus(spec, node_args(a, dx, m), node_args(b, dx, m)))
}

/// Discrete variational derivative with respect to the conjugate variable,
/// `conj(dH/d(a,b)) - d-[conj(dH/d d+(a,b))] - d+[conj(dH/d d-(a,b))]`.
pub fn discrete_variational_derivative(
    spec: &HamiltonianSpec,
    a: &ComplexField,
    b: &ComplexField,
    dx: f64,
) -> Result<Vec<Complex64>> {
    validate_pair(a, b, dx)?;
    let len = a.len();
    let args_a: Vec<NodeArgs> = (0..len).map(|m| node_args(a, dx, m)).collect();
    let args_b: Vec<NodeArgs> = (0..len).map(|m| node_args(b, dx, m)).collect();
    let mut node = Vec::with_capacity(len);
    let mut fwd = Vec::with_capacity(len);
    let mut bwd = Vec::with_capacity(len);
    for (pa, pb) in args_a.iter().zip(&args_b) {
        node.push(op_node(spec, *pa, *pb).conj());
        fwd.push(op_dplus(spec, *pa, *pb).conj());
        bwd.push(op_dminus(spec, *pa, *pb).conj());
    }
    Ok((0..len)
        .map(|m| {
            let back_of_fwd = (fwd[m] - fwd[prev(m, len)]) / dx;
            let fwd_of_bwd = (bwd[next(m, len)] - bwd[m]) / dx;
            node[m] - back_of_fwd - fwd_of_bwd
        })
        .collect())
}

/// `dx * sum_m H_m(Z)`.
pub fn semidiscrete_energy(spec: &HamiltonianSpec, z: &ComplexField, dx: f64) -> Result<f64> {
    validate_pair(z, z, dx)?;
    let total: f64 = (0..z.len())
        .map(|m| {
            let args = node_args(z, dx, m);
            spec.local_density(args.z, args.dplus, args.dminus)
        })
        .sum();
    Ok(dx * total)
}
