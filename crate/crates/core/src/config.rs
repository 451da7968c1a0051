//! Scenario configuration and the basic domain types.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Everything that defines one evaluation scenario.
///
/// `M` users share a TDMA frame; the opportunistic user `U_n` additionally
/// transmits in legacy user `U_m`'s slot at reduced power `beta * rho_n`.
/// Powers are linear SNRs (noise normalized to 1); `r_m` is the legacy
/// target rate in bits per channel use.  The slot duration multiplies both
/// sides of every rate comparison and cancels, so it is fixed at 1 and not
/// configurable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Total number of users `M` (>= 2).
    pub users: usize,
    /// Order index of the legacy user (1-based, by ascending channel gain).
    pub m: usize,
    /// Order index of the opportunistic user (1-based, != m).
    pub n: usize,
    /// Power-reducing coefficient, open interval (0, 1/2).
    pub beta: f64,
    /// Opportunistic-user transmit SNR (linear).
    pub rho_n: f64,
    /// Legacy-user transmit SNR (linear).
    pub rho_m: f64,
    /// Legacy target rate `R_m` in BPCU.
    pub r_m: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("user count must be at least 2, got {0}")]
    TooFewUsers(usize),
    #[error("order index {index} out of range 1..={users}")]
    IndexOutOfRange { index: usize, users: usize },
    #[error("legacy and opportunistic indices must differ (both {0})")]
    EqualIndices(usize),
    #[error("beta must lie strictly inside (0, 1/2), got {0}")]
    BetaOutOfRange(f64),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

impl SystemConfig {
    /// Validates every invariant; the only way to obtain a `SystemConfig`
    /// from outside the crate.
    pub fn new(
        users: usize,
        m: usize,
        n: usize,
        beta: f64,
        rho_n: f64,
        rho_m: f64,
        r_m: f64,
    ) -> Result<Self, ConfigError> {
        if users < 2 {
            return Err(ConfigError::TooFewUsers(users));
        }
        for index in [m, n] {
            if index < 1 || index > users {
                return Err(ConfigError::IndexOutOfRange { index, users });
            }
        }
        if m == n {
            return Err(ConfigError::EqualIndices(m));
        }
        // beta = 1/2 would collapse omega_3 and degenerate the region split.
        if !(beta > 0.0 && beta < 0.5) || !beta.is_finite() {
            return Err(ConfigError::BetaOutOfRange(beta));
        }
        for (name, value) in [("rho_n", rho_n), ("rho_m", rho_m), ("r_m", r_m)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        Ok(Self { users, m, n, beta, rho_n, rho_m, r_m })
    }

    /// `rho_n / rho_m`, the power ratio that selects the table column.
    pub fn eta(&self) -> f64 {
        self.rho_n / self.rho_m
    }

    /// Energy spent per frame by the hybrid schemes relative to OMA
    /// (`2 * beta`, always < 1 for a valid config).
    pub fn energy_ratio(&self) -> f64 {
        2.0 * self.beta
    }
}

/// Which multiple-access scheme a probability refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    Oma,
    FsicHybrid,
    HsicHybrid,
}

impl SchemeKind {
    pub fn label(self) -> &'static str {
        match self {
            SchemeKind::Oma => "oma",
            SchemeKind::FsicHybrid => "fsic",
            SchemeKind::HsicHybrid => "hsic",
        }
    }
}

/// One draw of the `M` ordered squared channel magnitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    gains: Vec<f64>,
}

impl ChannelRealization {
    /// Wraps a gain vector, checking it is nondecreasing and nonnegative.
    pub fn new(gains: Vec<f64>) -> Result<Self, ChannelError> {
        if gains.is_empty() {
            return Err(ChannelError::Empty);
        }
        let mut prev = 0.0;
        for &g in &gains {
            if !(g >= prev) {
                return Err(ChannelError::NotOrdered);
            }
            prev = g;
        }
        Ok(Self { gains })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Gain of the i-th weakest user (1-based, as in the ordering).
    pub fn gain(&self, order_index: usize) -> f64 {
        self.gains[order_index - 1]
    }

    /// The `(|h_m|^2, |h_n|^2)` pair a config cares about.
    pub fn pair(&self, cfg: &SystemConfig) -> (f64, f64) {
        (self.gain(cfg.m), self.gain(cfg.n))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChannelError {
    #[error("gain vector is empty")]
    Empty,
    #[error("gains must be nonnegative and nondecreasing")]
    NotOrdered,
}
