//! Real quadrature on finite and half-infinite intervals.
//!
//! Thin layer over the tanh-sinh rule of the `quadrature` crate. Long or
//! half-infinite ranges are split into panels so that each call stays well
//! inside the fixed evaluation budget of that rule.

use crate::error::{Error, Result};

/// Integrates `f` over `[a, b]`, splitting into `panels` equal pieces.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, tol: f64) -> Result<f64> {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut total = 0.0;
    let mut err = 0.0;
    for i in 0..panels {
        let lo = a + w * i as f64;
        let hi = if i + 1 == panels { b } else { lo + w };
        let out = quadrature::integrate(&f, lo, hi, tol / panels as f64);
        total += out.integral;
        err += out.error_estimate;
    }
    if !total.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integral on [{a}, {b}]")));
    }
    if err > 1e3 * tol.max(1e-12 * total.abs()) {
        return Err(Error::Quadrature(format!(
            "error estimate {err:e} above tolerance {tol:e} on [{a}, {b}]"
        )));
    }
    Ok(total)
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_panels(f, a, b, 1, tol)
}

/// Integrates `f` over `[a, ∞)` using the map `x = a + scale·u/(1-u)`.
/// `scale` should be of the order of the width of the integrand's bulk.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: f64) -> Result<f64> {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - u;
        let x = a + scale * u / one_minus;
        f(x) * scale / (one_minus * one_minus)
    };
    integrate_panels(g, 0.0, 1.0, 4, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_half_line() {
        let v = integrate_to_inf(|x| (-x * x).exp(), 0.0, 1.0, 1e-13).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x: f64| x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(v, -1.0, max_relative = 1e-10);
    }

    #[test]
    fn panels_sum_consistently() {
        let a = integrate_panels(|x: f64| x.sin(), 0.0, 30.0, 12, 1e-12).unwrap();
        assert_relative_eq!(a, 1.0 - 30f64.cos(), max_relative = 1e-11);
    }
}
