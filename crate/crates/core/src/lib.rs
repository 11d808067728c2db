//! Quasi-Hermiticity domains of the self-dual tridiagonal chain `H^(N)`.
//!
//! The chain has diagonal `-(N-1), -(N-3), ..., N-1` and antisymmetric
//! off-diagonal couplings `g_1, ..., g_J, ..., g_1` (`J = N/2` rounded
//! down). Its spectrum is real on a domain `D` of coupling space whose
//! boundary is a horizon of exceptional points.
//!
//! - [`chain_model`]: matrix, secular polynomial in `s = E^2`, `gamma` variables.
//! - [`criteria`]: closed-form membership in `D` for `J <= 5`.
//! - [`oracle`]: numerical roots, realness and confluence patterns.
//! - [`landmarks`]: spikes, perturbation ansatz, the `N = 6` DEP curve.
//! - [`tracer`]: boundary search, slice scans, sampled cross-checks.
//!
//! The numerical core is generic over `f32`/`f64`; the aliases below fix
//! the scalar to `f64` (or `f32`).

pub mod chain_model;
pub mod criteria;
pub mod error;
pub mod landmarks;
pub mod oracle;
mod poly;
mod scalar;
pub mod tolerance;
pub mod tracer;
pub mod verdict;

pub use chain_model::{ChainSpec, GammaVector, SecularForm};
pub use criteria::{AuxQuantities, CriticalPoints};
pub use error::{Error, Result};
pub use landmarks::{AnsatzPoint, DepSolution};
pub use oracle::{ConfluenceSignature, SpectrumReport};
pub use scalar::Scalar;
pub use tolerance::ToleranceConfig;
pub use verdict::{Region, Verdict};

pub type ChainSpec64 = ChainSpec<f64>;
pub type ChainSpec32 = ChainSpec<f32>;
pub type SecularForm64 = SecularForm<f64>;
pub type SecularForm32 = SecularForm<f32>;
pub type SpectrumReport64 = SpectrumReport<f64>;
pub type Verdict64 = Verdict<f64>;
pub type AuxQuantities64 = AuxQuantities<f64>;
pub type CriticalPoints64 = CriticalPoints<f64>;
pub type DepSolution64 = DepSolution<f64>;
pub type AnsatzPoint64 = AnsatzPoint<f64>;

/// Version string embedded in tool output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
