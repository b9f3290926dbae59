//! Numerical inverse Laplace transform on a hyperbolic Bromwich contour.
//!
//! The contour is `s(u) = μ(1 + sin(iu − α))`, u ∈ ℝ: it crosses the positive
//! real axis at μ(1 − sin α) and opens to the left with asymptotic angle
//! π/2 + α. The trapezoid rule in u converges geometrically; for n nodes the
//! step h and the scale μt are chosen to balance discretisation against
//! truncation error. F is assumed real on the real axis, so only the upper
//! half of the contour is sampled.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

const ALPHA: f64 = 0.35;
/// Half-width of the analyticity strip in u. With α the contour family stays
/// inside |arg s| < π/2 + α + STRIP.
const STRIP: f64 = 0.35;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvLaplaceConfig {
    /// Nodes on the upper half of the contour.
    pub method_order: usize,
    /// Multiplier on the contour scale μ. Values above 1 push the contour
    /// right (useful when F has singularities with positive real part).
    pub scale_hint: f64,
    /// Required agreement between the order-n and order-5n/4 results.
    pub rel_tol: f64,
}

impl Default for InvLaplaceConfig {
    fn default() -> Self {
        Self { method_order: 48, scale_hint: 1.0, rel_tol: 1e-8 }
    }
}

impl InvLaplaceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.method_order < 16 {
            return Err(invalid(format!("method_order must be at least 16, got {}", self.method_order)));
        }
        if !(self.scale_hint > 0.0 && self.scale_hint.is_finite()) {
            return Err(invalid("scale_hint must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol must be positive"));
        }
        Ok(())
    }
}

/// Returns (h, μt) for an n-node rule.
fn contour_parameters(n: usize) -> (f64, f64) {
    let sa = ALPHA.sin();
    let exponent = |h: f64| (2.0 * PI * STRIP / h) * (1.0 - 1.0 / (sa * (h * n as f64).cosh()));
    let (lo, hi) = (0.2 / n as f64, 8.0 / n as f64);
    let steps = 4000;
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..=steps {
        let h = lo + (hi - lo) * i as f64 / steps as f64;
        let e = exponent(h);
        if e > best.1 {
            best = (h, e);
        }
    }
    let h = best.0;
    let a = 2.0 * PI * STRIP / (h * sa * (h * n as f64).cosh());
    (h, a)
}

/// One n-node trapezoid sum. Returns (estimate, scale of the summed terms).
fn trapezoid<F>(f: &F, t: f64, n: usize, scale_hint: f64) -> Result<(f64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let (h, a) = contour_parameters(n);
    let mu = scale_hint * a / t;
    let mut total = 0.0;
    let mut mass = 0.0;
    for k in 0..=n {
        let u = k as f64 * h;
        let z = Complex64::new(-ALPHA, u); // iu − α
        let s = mu * (1.0 + z.sin());
        let ds = Complex64::i() * mu * z.cos();
        let g = (s * t).exp() * f(s)? * ds;
        if !(g.re.is_finite() && g.im.is_finite()) {
            return Err(Error::Overflow(format!("inverse Laplace integrand at s = {s}")));
        }
        let w = if k == 0 { 0.5 } else { 1.0 };
        total += w * g.im;
        mass += w * g.norm();
    }
    Ok((total * h / PI, mass * h / PI))
}

/// f(t) from its transform F(s) where F may fail.
pub fn try_inverse_laplace<F>(f: F, t: f64, cfg: &InvLaplaceConfig) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    cfg.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("inverse Laplace needs finite t > 0, got {t}")));
    }
    let n = cfg.method_order;
    let (coarse, _) = trapezoid(&f, t, n, cfg.scale_hint)?;
    let (fine, mass) = trapezoid(&f, t, n + n / 4, cfg.scale_hint)?;
    let diff = (fine - coarse).abs();
    if diff > cfg.rel_tol * fine.abs() + 1e-12 * mass {
        return Err(Error::NonConvergence {
            what: "inverse Laplace transform".into(),
            estimate: fine,
            discrepancy: diff,
        });
    }
    Ok(fine)
}

/// f(t) from its transform F(s), for F analytic to the right of and decaying
/// along a left-opening contour.
pub fn inverse_laplace<F>(f: F, t: f64, cfg: &InvLaplaceConfig) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    try_inverse_laplace(|s| Ok(f(s)), t, cfg)
}
