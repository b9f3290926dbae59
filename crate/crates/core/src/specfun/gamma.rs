//! Gamma function family: log-gamma for real and complex arguments,
//! reciprocal gamma, and the Pochhammer symbol.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Coefficients B_{2k} / (2k (2k-1)) of the Stirling series.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Below this modulus the argument is shifted upward before Stirling is applied.
const STIRLING_MIN: f64 = 10.0;

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `sin(pi x)` with exact argument reduction, so that zeros at integers are exact.
pub fn sin_pi(x: f64) -> f64 {
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r <= -1.0 {
        r += 2.0;
    }
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

fn stirling_tail(inv: f64) -> f64 {
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

fn ln_gamma_large(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_tail(1.0 / x)
}

/// log Γ(x) for x ≥ 0.5.
fn ln_gamma_pos(x: f64) -> f64 {
    if x >= STIRLING_MIN {
        return ln_gamma_large(x);
    }
    let mut w = x;
    let mut prod = 1.0;
    while w < STIRLING_MIN {
        prod *= w;
        w += 1.0;
    }
    ln_gamma_large(w) - prod.ln()
}

/// Returns `(ln|Γ(x)|, sign Γ(x))`.
pub fn ln_gamma_sign(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() {
        return Err(invalid("log-gamma of NaN"));
    }
    if is_pole(x) {
        return Err(Error::Pole(x));
    }
    if x == f64::INFINITY {
        return Ok((f64::INFINITY, 1.0));
    }
    if x < 0.5 {
        let s = sin_pi(x);
        let lg = PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x);
        Ok((lg, s.signum()))
    } else {
        Ok((ln_gamma_pos(x), 1.0))
    }
}

/// ln|Γ(x)| for real x.
pub fn ln_gamma(x: f64) -> Result<f64> {
    ln_gamma_sign(x).map(|(l, _)| l)
}

/// Γ(x) for real x. Overflow yields an infinite value of the right sign.
pub fn gamma(x: f64) -> Result<f64> {
    let (l, s) = ln_gamma_sign(x)?;
    Ok(s * l.exp())
}

/// 1/Γ(x); entire, so it returns 0 at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    match ln_gamma_sign(x) {
        Ok((l, s)) => s * (-l).exp(),
        Err(_) if x.is_nan() => f64::NAN,
        Err(_) => 0.0,
    }
}

fn ln_gamma_large_c(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + acc * inv
}

fn needs_shift(w: Complex64) -> bool {
    w.re < 0.0 || w.norm() < STIRLING_MIN
}

/// Principal branch of log Γ(z): analytic off the non-positive real axis and
/// real on the positive axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if z.re.is_nan() || z.im.is_nan() {
        return Err(invalid("log-gamma of NaN"));
    }
    if z.im == 0.0 && is_pole(z.re) {
        return Err(Error::Pole(z.re));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while needs_shift(w) {
        shift += w.ln();
        w += 1.0;
    }
    Ok(ln_gamma_large_c(w) - shift)
}

/// log Γ(z) correct modulo 2πi, for Re z > 0. Cheaper than [`log_gamma`]
/// because the shift factors are multiplied before a single logarithm is taken.
pub(crate) fn log_gamma_mod_2pi(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while needs_shift(w) {
        prod *= w;
        w += 1.0;
    }
    ln_gamma_large_c(w) - prod.ln()
}

/// `(ln|(x)_n|, sign)` with `(x)_n = Γ(x+n)/Γ(x)`.
pub fn ln_pochhammer(x: f64, n: f64) -> Result<(f64, f64)> {
    let (a, sa) = ln_gamma_sign(x + n)?;
    let (b, sb) = ln_gamma_sign(x)?;
    Ok((a - b, sa * sb))
}

/// Pochhammer symbol `(x)_n = Γ(x+n)/Γ(x)` for real `n`.
///
/// Small integer `n` uses the exact finite product; everything else goes
/// through log-gamma so that large arguments do not overflow prematurely.
pub fn pochhammer(x: f64, n: f64) -> Result<f64> {
    if x.is_nan() || n.is_nan() {
        return Err(invalid("pochhammer of NaN"));
    }
    if is_pole(x) {
        return Err(Error::Pole(x));
    }
    if is_pole(x + n) {
        return Err(Error::Pole(x + n));
    }
    if n == 0.0 {
        return Ok(1.0);
    }
    if n == n.floor() && n.abs() <= 32.0 {
        let k = n.abs() as usize;
        let v = if n > 0.0 {
            (0..k).map(|i| x + i as f64).product::<f64>()
        } else {
            1.0 / (1..=k).map(|i| x - i as f64).product::<f64>()
        };
        if v.is_finite() {
            return Ok(v);
        }
    }
    let (l, s) = ln_pochhammer(x, n)?;
    let v = s * l.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("pochhammer({x}, {n})")))
    }
}
