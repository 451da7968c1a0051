//! Evaluation of when hybrid-SIC hybrid NOMA fails to beat plain OMA.
//!
//! An opportunistic uplink user piggybacks on a legacy user's time slot at
//! reduced power (hybrid NOMA), with the decode order in the shared slot
//! chosen dynamically (hybrid SIC).  The central quantity is the
//! probability that the resulting two-slot rate does *not* exceed what the
//! user would have achieved with its own slot at full power — if that
//! probability is small, the hybrid scheme delivers more rate for less
//! energy.
//!
//! The crate evaluates that probability by three independent routes that
//! cross-check one another, plus its limiting behaviour:
//!
//! * [`mc`] — seeded, chunk-parallel Monte Carlo over ordered Rayleigh
//!   gains, with exact reproducibility regardless of worker count;
//! * [`closed_form`] — the exact table-based expressions, evaluated in
//!   double-double arithmetic so deep-tail values survive cancellation;
//! * [`quadrature`] — adaptive Gauss-Kronrod integration of the joint
//!   order-statistic density over the analytically split failure regions,
//!   entirely independent of the closed-form algebra;
//! * [`asymptotic`] — high-SNR approximations, probability floors and
//!   decay-exponent fits.

pub mod asymptotic;
pub mod closed_form;
pub mod config;
pub mod constants;
mod dd;
pub mod estimate;
pub mod mc;
pub mod model;
pub mod quadrature;

pub use config::{ChannelRealization, ConfigError, SchemeKind, SystemConfig};
pub use estimate::{Method, ProbabilityEstimate};
pub use model::{Region, SicStage};
