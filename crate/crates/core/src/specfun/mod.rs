//! Special-function kernels: gamma family, Bessel K, the Meijer G class
//! G^{2,L}_{L,2}[x | 1-m_1..1-m_L ; 0, 1/2], the Gaussian Q-function,
//! numerical inverse Laplace transform and real quadrature helpers.

mod bessel;
mod gamma;
mod laplace;
mod meijer;
pub mod quad;

pub use bessel::bessel_k;
pub use gamma::{gamma, ln_gamma, ln_gamma_sign, ln_pochhammer, log_gamma, pochhammer, rgamma, sin_pi};
pub use laplace::{inverse_laplace, try_inverse_laplace, InvLaplaceConfig};
pub use meijer::{meijer_g_2l_l2, MeijerG2L, MellinBarnesConfig};

/// Standard normal upper tail probability Q(x) = P(Z > x).
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}
