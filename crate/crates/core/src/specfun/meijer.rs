//! Meijer G-function of the class G^{2,L}_{L,2}[x | 1-m_1, ..., 1-m_L ; 0, 1/2].
//!
//! Evaluated from its Mellin–Barnes definition
//!
//! ```text
//! G(x) = 1/(2πi) ∫ Γ(-σ) Γ(1/2-σ) Π_l Γ(m_l+σ) x^σ dσ
//! ```
//!
//! on the vertical line Re σ = c, -min m_l < c < 0, which separates the
//! right poles (σ = 0, 1/2, 1, ...) from the left poles (σ = -m_l - k).
//! The integrand is analytic in a strip around the line, so the trapezoid
//! rule converges geometrically; the step is halved until two successive
//! levels agree. The gamma products do not depend on x and are cached per
//! contour, which makes repeated evaluation (as inside a Laplace inversion)
//! cost one complex exponential per node.

use std::f64::consts::PI;
use std::sync::RwLock;

use num_complex::Complex64;

use super::gamma::{log_gamma_mod_2pi, ln_gamma};
use crate::error::{invalid, Error, Result};

/// Contour-shift ladder, as fractions of the gap `(−m_min, 0)`.
const THETA_LADDER: [f64; 7] = [0.15, 0.25, 0.35, 0.5, 0.65, 0.75, 0.85];

/// Integrand values below this fraction of the running L1 mass end the walk.
const TAIL_TOL: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq)]
pub struct MellinBarnesConfig {
    /// Nodes across the initial (coarsest) trapezoid level.
    pub node_count: usize,
    /// Real part of the integration line. `None` picks it from x.
    pub contour_shift: Option<f64>,
    /// Largest |Im σ| the integrand may be followed to.
    pub truncation_height: f64,
    /// Number of step halvings allowed after the first level.
    pub max_refinements: u32,
    /// Relative agreement required between successive levels.
    pub rel_tol: f64,
}

impl Default for MellinBarnesConfig {
    fn default() -> Self {
        Self {
            node_count: 64,
            contour_shift: None,
            truncation_height: 200.0,
            max_refinements: 6,
            rel_tol: 1e-9,
        }
    }
}

impl MellinBarnesConfig {
    fn validate(&self) -> Result<()> {
        if self.node_count < 32 {
            return Err(invalid(format!("node_count must be at least 32, got {}", self.node_count)));
        }
        if !(self.truncation_height > 0.0) {
            return Err(invalid("truncation_height must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol must be positive"));
        }
        Ok(())
    }
}

/// One integration line with its lazily filled cache of log gamma products.
#[derive(Debug)]
struct Contour {
    c: f64,
    /// Step of the finest level; coarser levels use multiples of it.
    h_fine: f64,
    /// Stride (in fine steps) of the coarsest level.
    stride0: usize,
    /// log[Γ(-σ)Γ(1/2-σ)ΠΓ(m+σ)] at σ = c + i k h_fine, k ≥ 0. NaN = not yet computed.
    cache: RwLock<Vec<Complex64>>,
}

/// Evaluator for G^{2,L}_{L,2}[x | 1-m_1..1-m_L ; 0, 1/2] with fixed shapes.
#[derive(Debug)]
pub struct MeijerG2L {
    shapes: Vec<f64>,
    m_min: f64,
    cfg: MellinBarnesConfig,
    contours: Vec<Contour>,
    /// log(√π Π Γ(m_l)), the x → 0 limit.
    ln_limit_at_zero: f64,
}

impl MeijerG2L {
    /// Builds the evaluator from the shapes `m_l` (top parameters are `1 - m_l`).
    pub fn new(shapes: &[f64], cfg: MellinBarnesConfig) -> Result<Self> {
        cfg.validate()?;
        if shapes.is_empty() {
            return Err(invalid("Meijer G needs at least one top parameter"));
        }
        if shapes.iter().any(|m| !m.is_finite()) {
            return Err(invalid("non-finite shape"));
        }
        let m_min = shapes.iter().cloned().fold(f64::INFINITY, f64::min);
        if m_min <= 0.0 {
            return Err(Error::ContourPlacement(format!(
                "pole families overlap: need every m_l > 0 (1 - a_l > 0), smallest is {m_min}"
            )));
        }
        let thetas: Vec<f64> = match cfg.contour_shift {
            Some(c) => {
                if !(c > -m_min && c < 0.0) {
                    return Err(Error::ContourPlacement(format!(
                        "shift {c} is not strictly inside the pole gap ({}, 0)",
                        -m_min
                    )));
                }
                vec![-c / m_min]
            }
            None => THETA_LADDER.to_vec(),
        };
        let fine_factor = 1usize << cfg.max_refinements;
        let contours = thetas
            .into_iter()
            .map(|theta| {
                let d = theta.min(1.0 - theta) * m_min;
                let h0 = (d / 2.0).min(16.0 / cfg.node_count as f64);
                Contour {
                    c: -theta * m_min,
                    h_fine: h0 / fine_factor as f64,
                    stride0: fine_factor,
                    cache: RwLock::new(Vec::new()),
                }
            })
            .collect();
        let mut ln_limit = 0.5 * PI.ln();
        for &m in shapes {
            ln_limit += ln_gamma(m)?;
        }
        Ok(Self {
            shapes: shapes.to_vec(),
            m_min,
            cfg,
            contours,
            ln_limit_at_zero: ln_limit,
        })
    }

    pub fn shapes(&self) -> &[f64] {
        &self.shapes
    }

    /// Smallest shape; the contour lies in (−min m_l, 0).
    pub fn min_shape(&self) -> f64 {
        self.m_min
    }

    /// Value at x = 0: √π Π Γ(m_l).
    pub fn limit_at_zero(&self) -> f64 {
        self.ln_limit_at_zero.exp()
    }

    /// G at a positive real argument.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(invalid(format!("Meijer G argument must be ≥ 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(self.limit_at_zero());
        }
        Ok(self.eval_log(Complex64::new(x.ln(), 0.0))?.re)
    }

    /// G at x = exp(ln_x). The imaginary part of `ln_x` is the argument of x and
    /// is not reduced modulo 2π; the integral converges for |arg x| < (L+2)π/2.
    pub fn eval_log(&self, ln_x: Complex64) -> Result<Complex64> {
        let l = self.shapes.len() as f64;
        let kappa = (l + 2.0) * PI / 2.0 - ln_x.im.abs();
        if kappa <= 0.05 {
            return Err(Error::ContourPlacement(format!(
                "|arg x| = {} is outside the convergence sector |arg x| < {}",
                ln_x.im.abs(),
                (l + 2.0) * PI / 2.0
            )));
        }
        let contour = self.pick_contour(ln_x.re);
        self.integrate(contour, ln_x, kappa)
    }

    fn pick_contour(&self, ln_abs_x: f64) -> &Contour {
        if self.contours.len() == 1 {
            return &self.contours[0];
        }
        let theta = 0.5 + 0.35 * (ln_abs_x / 8.0).tanh();
        let idx = THETA_LADDER
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - theta).abs().total_cmp(&(b.1 - theta).abs()))
            .map(|(i, _)| i)
            .unwrap_or(3);
        &self.contours[idx]
    }

    fn log_gamma_product(&self, sigma: Complex64) -> Complex64 {
        let mut acc = log_gamma_mod_2pi(-sigma) + log_gamma_mod_2pi(0.5 - sigma);
        for &m in &self.shapes {
            acc += log_gamma_mod_2pi(m + sigma);
        }
        acc
    }

    /// log gamma product at fine index k (any sign), using conjugate symmetry.
    fn node(&self, ct: &Contour, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        {
            let cache = ct.cache.read().unwrap_or_else(|e| e.into_inner());
            if let Some(v) = cache.get(idx) {
                if !v.re.is_nan() {
                    return if k < 0 { v.conj() } else { *v };
                }
            }
        }
        let v = self.log_gamma_product(Complex64::new(ct.c, idx as f64 * ct.h_fine));
        {
            let mut cache = ct.cache.write().unwrap_or_else(|e| e.into_inner());
            if cache.len() <= idx {
                cache.resize(idx + 1, Complex64::new(f64::NAN, 0.0));
            }
            cache[idx] = v;
        }
        if k < 0 {
            v.conj()
        } else {
            v
        }
    }

    fn integrand(&self, ct: &Contour, k: i64, ln_x: Complex64) -> Complex64 {
        let sigma = Complex64::new(ct.c, k as f64 * ct.h_fine);
        (self.node(ct, k) + sigma * ln_x).exp()
    }

    /// Walks outward from t = 0 on the coarsest level until the integrand is
    /// negligible and past its envelope peak. Returns (sum, L1 sum, last index).
    fn walk(&self, ct: &Contour, ln_x: Complex64, dir: i64, t_peak: f64) -> Result<(Complex64, f64, i64)> {
        let stride = ct.stride0 as i64;
        let h0 = ct.h_fine * ct.stride0 as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut quiet = 0;
        let mut j = 1i64;
        loop {
            let t = j as f64 * h0;
            if t > self.cfg.truncation_height {
                return Err(Error::NonConvergence {
                    what: "Mellin-Barnes integrand has not decayed by the truncation height".into(),
                    estimate: sum.re,
                    discrepancy: abs_sum,
                });
            }
            let w = self.integrand(ct, dir * j * stride, ln_x);
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::Overflow(format!("Mellin-Barnes integrand at t = {}", dir as f64 * t)));
            }
            sum += w;
            abs_sum += w.norm();
            if t > t_peak && w.norm() <= TAIL_TOL * abs_sum {
                quiet += 1;
                if quiet >= 3 {
                    return Ok((sum, abs_sum, j * stride));
                }
            } else {
                quiet = 0;
            }
            j += 1;
        }
    }

    fn integrate(&self, ct: &Contour, ln_x: Complex64, kappa: f64) -> Result<Complex64> {
        // Envelope |Φ| ~ |t|^p e^{-κ|t|} with p from Stirling.
        let l = self.shapes.len() as f64;
        let p = self.shapes.iter().sum::<f64>() + (l - 2.0) * ct.c - l / 2.0 - 0.5;
        let t_peak = (p / kappa).max(0.0) + 1.0;

        let w0 = self.integrand(ct, 0, ln_x);
        let (up, up_abs, k_hi) = self.walk(ct, ln_x, 1, t_peak)?;
        let (dn, dn_abs, k_lo) = self.walk(ct, ln_x, -1, t_peak)?;
        let l1 = w0.norm() + up_abs + dn_abs;

        let mut stride = ct.stride0 as i64;
        let mut h = ct.h_fine * stride as f64;
        let mut estimate = (w0 + up + dn) * h;
        let mut l1_est = l1 * h;
        let mut last_diff = f64::INFINITY;
        for _ in 0..self.cfg.max_refinements {
            let half = stride / 2;
            let mut add = Complex64::new(0.0, 0.0);
            let mut k = -k_lo + half;
            while k < k_hi {
                add += self.integrand(ct, k, ln_x);
                k += stride;
            }
            stride = half;
            h *= 0.5;
            let next = estimate * 0.5 + add * h;
            last_diff = (next - estimate).norm();
            estimate = next;
            if last_diff <= self.cfg.rel_tol * estimate.norm() + 1e-15 * l1_est {
                return Ok(estimate / (2.0 * PI));
            }
            l1_est = l1_est.max(estimate.norm());
        }
        Err(Error::NonConvergence {
            what: "Mellin-Barnes trapezoid refinement".into(),
            estimate: estimate.re / (2.0 * PI),
            discrepancy: last_diff / (2.0 * PI),
        })
    }
}

/// G^{2,L}_{L,2}[x | a_1..a_L ; 0, 1/2] for top parameters `a_l = 1 - m_l`.
pub fn meijer_g_2l_l2(a: &[f64], x: f64) -> Result<f64> {
    let shapes: Vec<f64> = a.iter().map(|a| 1.0 - a).collect();
    MeijerG2L::new(&shapes, MellinBarnesConfig::default())?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_k, gamma::gamma, quad};
    use approx::assert_relative_eq;

    fn g(shapes: &[f64], x: f64) -> f64 {
        MeijerG2L::new(shapes, MellinBarnesConfig::default()).unwrap().eval(x).unwrap()
    }

    #[test]
    fn matches_high_precision_contour_integrals() {
        let cases: [(&[f64], f64, f64); 9] = [
            (&[1.0], 0.25, 0.805_329_719_804_182_45),
            (&[2.5], 3.0, 0.040_906_042_775_772_797),
            (&[1.0, 1.0], 1.0, 0.590_817_950_301_838_68),
            (&[0.5, 2.5], 0.37, 1.952_276_937_117_029_3),
            (&[1.5, 1.0], 10.0, 0.090_668_781_838_861_254),
            (&[1.0, 2.0, 3.0], 0.8, 0.487_234_167_271_684_16),
            (&[0.7, 1.3, 2.2], 5.0, 0.328_748_659_946_488_07),
            (&[1.0, 2.0], 1e4, 8.851_724_792_383_508e-5),
            (&[2.0, 1.0], 0.01, 1.416_542_279_554_239_5),
        ];
        for (m, x, want) in cases {
            assert_relative_eq!(g(m, x), want, max_relative = 1e-10);
        }
    }

    #[test]
    fn complex_arguments() {
        let cases: [(&[f64], Complex64, Complex64); 3] = [
            (&[1.0], Complex64::new(0.3, 0.9), Complex64::new(0.388_825_357_108_673_7, -0.322_567_025_697_489_6)),
            (&[1.0, 2.0], Complex64::new(-2.0, 1.5), Complex64::new(-0.065_408_464_555_257_96, -0.292_186_741_273_231_9)),
            (&[1.0, 2.0], Complex64::new(-5.0, -0.5), Complex64::new(-0.160_606_503_643_341_75, 0.117_316_582_164_325_8)),
        ];
        for (m, x, want) in cases {
            let e = MeijerG2L::new(m, MellinBarnesConfig::default()).unwrap();
            let got = e.eval_log(x.ln()).unwrap();
            assert!((got - want).norm() <= 1e-10 * want.norm(), "{got} vs {want}");
        }
    }

    #[test]
    fn single_shape_is_laplace_transform_of_nakagami() {
        // L=1, m=1: G(s²/4) = √π E[e^{-sX}] with f_X(x) = 2x e^{-x²}.
        let s = 1.0;
        let mx = quad::integrate_to_inf(|x| 2.0 * x * (-s * x - x * x).exp(), 0.0, 1.0, 1e-14).unwrap();
        assert_relative_eq!(g(&[1.0], s * s / 4.0), PI.sqrt() * mx, max_relative = 1e-10);
    }

    #[test]
    fn bessel_laplace_correspondence() {
        // G^{2,2}_{2,2}[s²/4 | 1-m1, 1-m2] = √π Γ(m1)Γ(m2) ∫ e^{-sx} f(x) dx,
        // with f the product-Nakagami density in Bessel-K form.
        let (m1, m2) = (1.5, 2.5);
        let x_arg = 0.8f64;
        let s = 2.0 * x_arg.sqrt();
        let nu = m1 - m2;
        let pdf = |x: f64| 4.0 * x.powf(m1 + m2 - 1.0) * bessel_k(nu, 2.0 * x).unwrap() / (gamma(m1).unwrap() * gamma(m2).unwrap());
        let lt = quad::integrate_to_inf(|x| (-s * x).exp() * pdf(x), 0.0, 1.0, 1e-14).unwrap();
        let want = PI.sqrt() * gamma(m1).unwrap() * gamma(m2).unwrap() * lt;
        assert_relative_eq!(g(&[m1, m2], x_arg), want, max_relative = 1e-9);
    }

    #[test]
    fn limit_at_zero_is_gamma_product() {
        let e = MeijerG2L::new(&[0.7, 2.0], MellinBarnesConfig::default()).unwrap();
        let lim = PI.sqrt() * gamma(0.7).unwrap() * gamma(2.0).unwrap();
        assert_relative_eq!(e.eval(0.0).unwrap(), lim, max_relative = 1e-14);
        assert_relative_eq!(e.eval(1e-12).unwrap(), lim, max_relative = 1e-5);
        assert_eq!(e.min_shape(), 0.7);
    }

    #[test]
    fn contour_checks() {
        let bad = MellinBarnesConfig { contour_shift: Some(-1.2), ..Default::default() };
        assert!(matches!(MeijerG2L::new(&[1.0, 2.0], bad), Err(Error::ContourPlacement(_))));
        let bad = MellinBarnesConfig { contour_shift: Some(0.1), ..Default::default() };
        assert!(matches!(MeijerG2L::new(&[1.0], bad), Err(Error::ContourPlacement(_))));
        assert!(matches!(meijer_g_2l_l2(&[1.0], 1.0), Err(Error::ContourPlacement(_))));
        let few = MellinBarnesConfig { node_count: 16, ..Default::default() };
        assert!(matches!(MeijerG2L::new(&[1.0], few), Err(Error::InvalidParameter(_))));
        let e = MeijerG2L::new(&[1.0], MellinBarnesConfig::default()).unwrap();
        assert!(matches!(e.eval_log(Complex64::new(0.0, 4.8)), Err(Error::ContourPlacement(_))));
    }

    #[test]
    fn fixed_shift_agrees_with_adaptive_choice() {
        let fixed = MellinBarnesConfig { contour_shift: Some(-0.4), ..Default::default() };
        let a = MeijerG2L::new(&[1.0, 1.0], fixed).unwrap().eval(1.0).unwrap();
        assert_relative_eq!(a, 0.590_817_950_301_838_68, max_relative = 1e-10);
        assert_relative_eq!(meijer_g_2l_l2(&[0.0, 0.0], 1.0).unwrap(), a, max_relative = 1e-10);
    }
}
