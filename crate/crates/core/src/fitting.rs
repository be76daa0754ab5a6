//! Exponential-fitting weight for the two-level time difference.
//!
//! The weighted relation `alpha (y(t+dt) - y(t)) = dt/2 (y'(t+dt) + y'(t))`
//! is exact on `span{1, cos wt, sin wt}` when
//! `alpha = w dt (1 + cos w dt) / (2 sin w dt)`.

use crate::error::{Error, Result};

/// Below this value of `w dt` the closed form is replaced by its Taylor series.
pub const SERIES_CROSSOVER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub omega: f64,
    pub dt: f64,
}

impl FitParams {
    pub fn new(omega: f64, dt: f64) -> Result<Self> {
        let params = Self { omega, dt };
        params.validate()?;
        Ok(params)
    }

    pub fn theta(&self) -> f64 {
        self.omega * self.dt
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.dt.is_finite()) {
            return Err(Error::domain("fitting parameters must be finite"));
        }
        if self.omega < 0.0 {
            return Err(Error::domain(format!("fitting frequency must be >= 0, got {}", self.omega)));
        }
        if self.dt <= 0.0 {
            return Err(Error::domain(format!("step size must be > 0, got {}", self.dt)));
        }
        let theta = self.theta();
        if theta >= std::f64::consts::PI {
            return Err(Error::FittingPole(theta));
        }
        Ok(())
    }
}

/// Fitting weight for the given frequency and step.
pub fn alpha(params: FitParams) -> Result<f64> {
    params.validate()?;
    Ok(alpha_of_theta(params.theta()))
}

/// Weight as a function of `theta = w dt`; even in `theta`, no domain check.
pub(crate) fn alpha_of_theta(theta: f64) -> f64 {
    let theta = theta.abs();
    if theta < SERIES_CROSSOVER {
        let t2 = theta * theta;
        1.0 - t2 / 12.0 - t2 * t2 / 720.0
    } else {
        theta * (1.0 + theta.cos()) / (2.0 * theta.sin())
    }
}

/// Largest violation of the fitted relation over the basis `{1, cos wt, sin wt}`
/// at time `t`.
pub fn check_fitting_exactness(params: FitParams, t: f64) -> Result<f64> {
    let a = alpha(params)?;
    let FitParams { omega: w, dt } = params;
    let t1 = t + dt;
    let defect = |y0: f64, y1: f64, dy0: f64, dy1: f64| (a * (y1 - y0) - 0.5 * dt * (dy1 + dy0)).abs();

    let constant = defect(1.0, 1.0, 0.0, 0.0);
    let cosine = defect((w * t).cos(), (w * t1).cos(), -w * (w * t).sin(), -w * (w * t1).sin());
    let sine = defect((w * t).sin(), (w * t1).sin(), w * (w * t).cos(), w * (w * t1).cos());
    Ok(constant.max(cosine).max(sine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classic_limit() {
        assert_eq!(alpha(FitParams::new(0.0, 0.3).unwrap()).unwrap(), 1.0);
        let tiny = alpha(FitParams::new(1e-6, 1e-2).unwrap()).unwrap();
        assert!((tiny - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn quarter_period() {
        let a = alpha(FitParams::new(PI / 2.0, 1.0).unwrap()).unwrap();
        assert!((a - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn benchmark_coarsest_step() {
        // alpha = (theta/2) cot(theta/2) at theta = 1/4, summed from the
        // Bernoulli series of x cot x to far below double precision.
        let x: f64 = 0.125;
        let x2 = x * x;
        let series = 1.0 - x2 / 3.0 - x2.powi(2) / 45.0 - 2.0 * x2.powi(3) / 945.0 - x2.powi(4) / 4725.0
            - 2.0 * x2.powi(5) / 93555.0;
        let a = alpha(FitParams::new(25.0, 0.01).unwrap()).unwrap();
        assert!((a - series).abs() < 1e-15);
        assert!((a - 0.994786).abs() < 5e-7);
    }

    #[test]
    fn crossover_is_continuous() {
        let below = alpha_of_theta(SERIES_CROSSOVER * (1.0 - 1e-12));
        let above = alpha_of_theta(SERIES_CROSSOVER);
        assert!((below - above).abs() <= 1e-14 * above);
    }

    #[test]
    fn even_in_theta() {
        for theta in [1e-6, 5e-5, 0.3, 1.7] {
            assert_eq!(alpha_of_theta(theta), alpha_of_theta(-theta));
        }
    }

    #[test]
    fn strictly_decreasing_before_pole() {
        let samples: Vec<f64> =
            (1..=1000).map(|i| alpha_of_theta(PI * i as f64 / 1001.0)).collect();
        assert!(samples.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(FitParams::new(PI, 1.0), Err(Error::FittingPole(_))));
        assert!(matches!(FitParams::new(400.0, 0.01), Err(Error::FittingPole(_))));
        assert!(FitParams::new(-1.0, 0.1).is_err());
        assert!(FitParams::new(1.0, -0.1).is_err());
        assert!(FitParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn exact_on_fitting_space() {
        let dt = 0.01;
        for theta in [0.01, 0.1, 0.25, 1.0, 3.0] {
            let params = FitParams::new(theta / dt, dt).unwrap();
            for i in 0..=10 {
                let r = check_fitting_exactness(params, i as f64 / 10.0).unwrap();
                assert!(r <= 1e-13 * theta.max(1.0), "theta {theta}: residual {r:e}");
            }
        }
        let r = check_fitting_exactness(FitParams::new(25.0, 0.01).unwrap(), 0.3).unwrap();
        assert!(r <= 1e-13);
    }

    #[test]
    fn unfitted_weight_is_trapezoidal_on_constants() {
        let params = FitParams::new(0.0, 0.2).unwrap();
        assert_eq!(check_fitting_exactness(params, 0.7).unwrap(), 0.0);
    }
}
