//! Self-avoiding walk on the complete graph `K_n`.
//!
//! The susceptibility of the walk is a polynomial in the step weight `z`
//! and equals `z^{n-1} e^{1/z} Γ(n, 1/z)`. This crate evaluates it exactly
//! (both as a sum and through the incomplete gamma function) and
//! asymptotically across the subcritical, critical and supercritical
//! regimes. It also provides the walk-length distribution, its moments, its
//! limit laws and exact samplers.

pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod limit_laws;
mod numeric;
pub mod oracle;
pub mod report;
pub mod sampling;
pub mod scaling;
pub mod specfun;

pub use error::{Error, Result};
pub use exact::SawModel;
pub use scaling::Scaling;
pub use specfun::LogValue;
