//! Discrete variational derivative of a user-defined density, checked
//! against the exact energy difference it is built to reproduce.

use efdvd::dvd::{discrete_variational_derivative, semidiscrete_energy, AnalyticFn, DensityTerm, Factor, HamiltonianSpec};
use efdvd::ComplexField;
use num_complex::Complex64;

fn main() -> efdvd::Result<()> {
    // H = |d+ Z|^2 / 2 + |d- Z|^2 / 2 + |sin Z|^2 |d+ Z|^2 / 10 - |Z|^6 / 3
    let sine = AnalyticFn { value: |z| z.sin(), derivative: |z| z.cos() };
    let id = AnalyticFn::IDENTITY;
    let spec = HamiltonianSpec::new(vec![
        DensityTerm { coeff: 0.5, f: Factor::One, g_plus: Factor::power(id, 2), g_minus: Factor::One },
        DensityTerm { coeff: 0.5, f: Factor::One, g_plus: Factor::One, g_minus: Factor::power(id, 2) },
        DensityTerm { coeff: 0.1, f: Factor::power(sine, 2), g_plus: Factor::power(id, 2), g_minus: Factor::One },
        DensityTerm { coeff: -1.0 / 3.0, f: Factor::power(id, 6), g_plus: Factor::One, g_minus: Factor::One },
    ])?;

    let n = 24;
    let dx = 2.0 * std::f64::consts::PI / n as f64;
    let field = |shift: f64| {
        let z: Vec<Complex64> = (0..n)
            .map(|m| {
                let x = m as f64 * dx;
                Complex64::new(0.6 * (x + shift).cos(), 0.4 * (2.0 * x).sin() + 0.1 * shift)
            })
            .collect();
        ComplexField::from_complex(&z)
    };
    let (a, b) = (field(0.3)?, field(0.0)?);

    let dvd = discrete_variational_derivative(&spec, &a, &b, dx)?;
    let paired: f64 = dx * (0..n).map(|m| 2.0 * (dvd[m] * (a.at(m) - b.at(m)).conj()).re).sum::<f64>();
    let diff = semidiscrete_energy(&spec, &a, dx)? - semidiscrete_energy(&spec, &b, dx)?;
    println!("H(a) - H(b)            = {diff:.15e}");
    println!("2 dx Re <dvd, a - b>   = {paired:.15e}");
    println!("gap                    = {:.2e}", (diff - paired).abs());
    Ok(())
}
