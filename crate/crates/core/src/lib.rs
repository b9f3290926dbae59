//! Distribution and link-metric engine for cascaded Nakagami-m channels.
//!
//! The central random variable is the sum of products
//! `H = Σ_n Π_l X_{l,n}` of independent Nakagami-m amplitudes. The crate
//! evaluates its MGF in closed form (Meijer G), its PDF/CDF by numerical
//! Laplace inversion, a power-series expansion for two-hop links, and
//! high-SNR asymptotics. On top of that sit the link metrics of a
//! reflecting-surface channel (outage, symbol error rate, diversity),
//! two moment-matching baselines and a seeded Monte-Carlo simulator.

pub mod baselines;
pub mod error;
pub mod irs;
pub mod nakagami;
pub mod simkit;
pub mod specfun;
pub mod sumprod;

pub use error::{Error, Result};
