//! Per-realization rate computations, SIC-stage selection, and the event
//! indicators behind the outage-style probabilities.
//!
//! All comparisons between two-slot hybrid rates and the OMA baseline are
//! carried out in the linear (product) domain: `log(a) + log(b) <= log(c)`
//! iff `a * b <= c`, so the logarithm base never matters and boundary ties
//! resolve exactly when the inputs are exactly representable.  Reported
//! rates are converted to bits per channel use at the boundary.

use crate::config::{SchemeKind, SystemConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Decode position of the opportunistic user in the shared slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SicStage {
    /// Decoded first, treating the legacy signal as interference.
    First,
    /// Decoded second, after the legacy signal has been removed.
    Second,
}

impl SicStage {
    pub fn as_number(self) -> u8 {
        match self {
            SicStage::First => 1,
            SicStage::Second => 2,
        }
    }
}

/// Rates achieved by one realization under a hybrid scheme, in BPCU.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateBreakdown {
    /// Rate in the shared (m-th) slot.
    pub noma_slot_rate: f64,
    /// Rate in the opportunistic user's own (n-th) slot, at reduced power.
    pub oma_slot_rate: f64,
    /// Single-slot OMA rate at full power, the comparison baseline.
    pub oma_baseline_rate: f64,
    /// Decode stage in the shared slot (always `First` under FSIC).
    pub sic_stage: SicStage,
}

/// One of the four disjoint regions that partition the HSIC failure event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    P11,
    P12,
    P21,
    P22,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::P11, Region::P12, Region::P21, Region::P22];

    pub fn label(self) -> &'static str {
        match self {
            Region::P11 => "p11",
            Region::P12 => "p12",
            Region::P21 => "p21",
            Region::P22 => "p22",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("the hybrid-vs-OMA comparison is undefined for scheme {0:?}")]
    NotHybrid(SchemeKind),
}

/// `eps_m = 2^r - 1`, computed through expm1 so small target rates keep
/// full precision.
pub(crate) fn eps_from_rate(r_m: f64) -> f64 {
    (r_m * std::f64::consts::LN_2).exp_m1()
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Maximum interference power the legacy user tolerates while still meeting
/// its target rate, `max(0, rho_m |h_m|^2 / (2^{R_m}-1) - 1)`.
pub fn interference_threshold(rho_m: f64, h_m_sq: f64, r_m: f64) -> f64 {
    debug_assert!(rho_m > 0.0 && h_m_sq >= 0.0 && r_m > 0.0);
    (rho_m * h_m_sq / eps_from_rate(r_m) - 1.0).max(0.0)
}

/// Achievable rate of the opportunistic user in the shared slot under
/// hybrid SIC, together with the chosen decode stage.
///
/// The received power `beta rho_n |h_n|^2` is compared against the
/// tolerance threshold: at or below it the user is decoded interference-free
/// at the second stage, above it it must be decoded first.
pub fn hsic_noma_rate(cfg: &SystemConfig, h_m_sq: f64, h_n_sq: f64) -> (f64, SicStage) {
    let u = cfg.beta * cfg.rho_n * h_n_sq;
    let tau = interference_threshold(cfg.rho_m, h_m_sq, cfg.r_m);
    if u <= tau {
        (log2_1p(u), SicStage::Second)
    } else {
        (log2_1p(u / (cfg.rho_m * h_m_sq + 1.0)), SicStage::First)
    }
}

/// Shared-slot rate under fixed SIC: always decoded first.
pub fn fsic_noma_rate(cfg: &SystemConfig, h_m_sq: f64, h_n_sq: f64) -> f64 {
    let u = cfg.beta * cfg.rho_n * h_n_sq;
    log2_1p(u / (cfg.rho_m * h_m_sq + 1.0))
}

/// Full-power single-slot OMA rate of the opportunistic user.
pub fn oma_baseline_rate(cfg: &SystemConfig, h_n_sq: f64) -> f64 {
    log2_1p(cfg.rho_n * h_n_sq)
}

/// Rates of one realization under the given hybrid scheme.
pub fn rate_breakdown(
    scheme: SchemeKind,
    cfg: &SystemConfig,
    h_m_sq: f64,
    h_n_sq: f64,
) -> Result<RateBreakdown, ModelError> {
    let (noma_slot_rate, sic_stage) = match scheme {
        SchemeKind::HsicHybrid => hsic_noma_rate(cfg, h_m_sq, h_n_sq),
        SchemeKind::FsicHybrid => (fsic_noma_rate(cfg, h_m_sq, h_n_sq), SicStage::First),
        SchemeKind::Oma => return Err(ModelError::NotHybrid(scheme)),
    };
    Ok(RateBreakdown {
        noma_slot_rate,
        oma_slot_rate: log2_1p(cfg.beta * cfg.rho_n * h_n_sq),
        oma_baseline_rate: oma_baseline_rate(cfg, h_n_sq),
        sic_stage,
    })
}

/// True iff the two-slot hybrid rate does not exceed the OMA baseline, i.e.
/// the realization contributes to the failure probability.  Ties count as
/// failures, matching the inclusive inequality of the event definition.
pub fn hybrid_vs_oma_indicator(
    scheme: SchemeKind,
    cfg: &SystemConfig,
    h_m_sq: f64,
    h_n_sq: f64,
) -> Result<bool, ModelError> {
    match scheme {
        SchemeKind::HsicHybrid => Ok(hsic_indicator(cfg, h_m_sq, h_n_sq)),
        SchemeKind::FsicHybrid => Ok(fsic_indicator(cfg, h_m_sq, h_n_sq)),
        SchemeKind::Oma => Err(ModelError::NotHybrid(scheme)),
    }
}

#[inline]
pub(crate) fn hsic_indicator(cfg: &SystemConfig, h_m_sq: f64, h_n_sq: f64) -> bool {
    let u = cfg.beta * cfg.rho_n * h_n_sq;
    let tau = interference_threshold(cfg.rho_m, h_m_sq, cfg.r_m);
    let noma_lin = if u <= tau { 1.0 + u } else { 1.0 + u / (cfg.rho_m * h_m_sq + 1.0) };
    noma_lin * (1.0 + u) <= 1.0 + cfg.rho_n * h_n_sq
}

#[inline]
pub(crate) fn fsic_indicator(cfg: &SystemConfig, h_m_sq: f64, h_n_sq: f64) -> bool {
    let u = cfg.beta * cfg.rho_n * h_n_sq;
    let noma_lin = 1.0 + u / (cfg.rho_m * h_m_sq + 1.0);
    noma_lin * (1.0 + u) <= 1.0 + cfg.rho_n * h_n_sq
}

/// Verifies that admitting the opportunistic user leaves the legacy user's
/// outage behaviour untouched: whenever OMA alone would meet the target
/// rate, the stage selected by HSIC still lets the legacy user decode at
/// `R_m` or better.
///
/// The stage-2 condition is evaluated in exactly the same algebraic
/// arrangement as the admission threshold, so boundary ties agree with the
/// stage selection by construction.
pub fn legacy_transparency_check(cfg: &SystemConfig, h_m_sq: f64, h_n_sq: f64) -> bool {
    let eps = eps_from_rate(cfg.r_m);
    let oma_succeeds = cfg.rho_m * h_m_sq >= eps;
    if !oma_succeeds {
        return true;
    }
    let u = cfg.beta * cfg.rho_n * h_n_sq;
    let tau = interference_threshold(cfg.rho_m, h_m_sq, cfg.r_m);
    if u > tau {
        // Stage 1: U_n is decoded and removed first, U_m sees no interference.
        true
    } else {
        // Stage 2: U_m decodes with U_n's signal still present; its SINR
        // meets eps_m iff rho_m|h_m|^2/eps - 1 >= u, the admission test.
        cfg.rho_m * h_m_sq / eps - 1.0 >= u
    }
}

/// Threshold below which the tolerance is zero: `alpha_m = eps_m / rho_m`.
pub(crate) fn alpha_m(cfg: &SystemConfig) -> f64 {
    eps_from_rate(cfg.r_m) / cfg.rho_m
}

/// Stage-2 boundary curve `Phi(x) = (x/alpha_m - 1) / (beta rho_n)`.
pub(crate) fn phi_curve(cfg: &SystemConfig, x: f64) -> f64 {
    (x / alpha_m(cfg) - 1.0) / (cfg.beta * cfg.rho_n)
}

/// Stage-1 failure boundary `Psi(x) = ((1-beta)(rho_m x + 1) - beta) / (beta^2 rho_n)`.
pub(crate) fn psi_curve(cfg: &SystemConfig, x: f64) -> f64 {
    ((1.0 - cfg.beta) * (cfg.rho_m * x + 1.0) - cfg.beta) / (cfg.beta * cfg.beta * cfg.rho_n)
}

/// Classifies a realization into the four-region partition of the HSIC
/// failure event; `None` means the event does not occur.
///
/// With `x = |h_m|^2`, `y = |h_n|^2`, `omega_2 = (1-beta)/beta * alpha_m`
/// and `omega_3 = (1-2 beta)/(beta^2 rho_n)`:
///
/// * `P11`: `y <= Phi(x)` and `alpha_m < x < omega_2`
/// * `P12`: `y <= omega_3` and `x > omega_2`
/// * `P21`: `Phi(x) < y <= Psi(x)` and `x > alpha_m`
/// * `P22`: `y <= Psi(x)` and `x < alpha_m`
pub fn lemma1_region(cfg: &SystemConfig, h_m_sq: f64, h_n_sq: f64) -> Option<Region> {
    let (x, y) = (h_m_sq, h_n_sq);
    let alpha = alpha_m(cfg);
    let omega2 = (1.0 - cfg.beta) / cfg.beta * alpha;
    let omega3 = (1.0 - 2.0 * cfg.beta) / (cfg.beta * cfg.beta * cfg.rho_n);
    let phi = phi_curve(cfg, x);
    let psi = psi_curve(cfg, x);
    if y <= phi && alpha < x && x < omega2 {
        Some(Region::P11)
    } else if y <= omega3 && x > omega2 {
        Some(Region::P12)
    } else if y <= psi && y > phi && x > alpha {
        Some(Region::P21)
    } else if y <= psi && x < alpha {
        Some(Region::P22)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg(users: usize, m: usize, n: usize, beta: f64, rho_n: f64, rho_m: f64, r_m: f64) -> SystemConfig {
        SystemConfig::new(users, m, n, beta, rho_n, rho_m, r_m).unwrap()
    }

    #[test]
    fn threshold_examples() {
        // 100 * 0.5 / (2^1 - 1) - 1
        assert_relative_eq!(interference_threshold(100.0, 0.5, 1.0), 49.0, max_relative = 1e-12);
        // received power below the target: clamped to zero
        assert_eq!(interference_threshold(1.0, 0.01, 1.0), 0.0);
        // boundary rho_m |h_m|^2 = eps_m gives exactly zero
        let eps = eps_from_rate(0.7);
        assert_eq!(interference_threshold(10.0, eps / 10.0, 0.7), 0.0);
    }

    #[test]
    fn hsic_rate_examples() {
        let c = cfg(5, 1, 5, 1.0 / 3.0, 500.0, 100.0, 1.0);
        // beta rho_n y = 10 <= tau = 49: stage 2, log2(11)
        let (r, stage) = hsic_noma_rate(&c, 0.5, 0.06);
        assert_eq!(stage, SicStage::Second);
        assert_relative_eq!(r, 3.459431618637297, max_relative = 1e-12);
        // beta rho_n y = 83.3 > 49: stage 1
        let (r, stage) = hsic_noma_rate(&c, 0.5, 0.5);
        assert_eq!(stage, SicStage::First);
        assert_relative_eq!(r, 1.3972481858353156, max_relative = 1e-12);
        // zero gain: zero rate, stage 2 (0 <= tau always)
        let (r, stage) = hsic_noma_rate(&c, 0.5, 0.0);
        assert_eq!(r, 0.0);
        assert_eq!(stage, SicStage::Second);
    }

    #[test]
    fn fsic_rate_examples() {
        let c = cfg(5, 1, 5, 1.0 / 3.0, 500.0, 100.0, 1.0);
        assert_relative_eq!(
            fsic_noma_rate(&c, 0.5, 0.06),
            0.25831199559139067,
            max_relative = 1e-12
        );
        assert_eq!(fsic_noma_rate(&c, 0.5, 0.0), 0.0);
        // no interference: reduces to log2(1 + beta rho_n y) = log2(2)
        let c = cfg(5, 1, 5, 1.0 / 3.0, 3.0, 100.0, 1.0);
        assert_relative_eq!(fsic_noma_rate(&c, 0.0, 1.0), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn indicator_rejects_oma() {
        let c = cfg(5, 1, 5, 0.3, 10.0, 2.0, 0.2);
        assert_eq!(
            hybrid_vs_oma_indicator(SchemeKind::Oma, &c, 0.5, 0.5),
            Err(ModelError::NotHybrid(SchemeKind::Oma))
        );
    }

    #[test]
    fn indicator_true_at_vanishing_beta() {
        let c = cfg(5, 1, 5, 1e-9, 100.0, 20.0, 0.2);
        assert!(hybrid_vs_oma_indicator(SchemeKind::HsicHybrid, &c, 1.0, 2.0).unwrap());
        assert!(hybrid_vs_oma_indicator(SchemeKind::FsicHybrid, &c, 1.0, 2.0).unwrap());
    }

    #[test]
    fn indicator_inclusive_at_stage2_equality() {
        // Dyadic parameters make the tie exact: beta=1/4, rho_n=4,
        // y = (1-2 beta)/(beta^2 rho_n) = 2, so (1+u)^2 = 9 = 1 + rho_n y.
        let c = cfg(2, 2, 1, 0.25, 4.0, 64.0, 1.0);
        let y = (1.0 - 2.0 * c.beta) / (c.beta * c.beta * c.rho_n);
        assert_eq!(y, 2.0);
        // tau = 64/1 - 1 = 63 >= u = 2: stage 2 applies
        assert!(hybrid_vs_oma_indicator(SchemeKind::HsicHybrid, &c, 1.0, y).unwrap());
    }

    #[test]
    fn indicator_hand_computed_case() {
        // tau = 20/(2^0.2-1) - 1 = 133.5, u = 16.67 <= tau: stage 2;
        // (1+u)^2 = 312.1 > 51 = 1 + rho_n y, so the hybrid rate wins.
        let c = cfg(5, 1, 5, 1.0 / 3.0, 100.0, 20.0, 0.2);
        assert!(!hybrid_vs_oma_indicator(SchemeKind::HsicHybrid, &c, 1.0, 0.5).unwrap());
    }

    #[test]
    fn base_invariance_of_indicator() {
        // The product-domain indicator must agree with a log-domain
        // evaluation in nats for inputs away from exact ties.
        let c = cfg(5, 2, 5, 0.3, 31.6, 10.0, 0.7);
        let mut disagreements = 0;
        for i in 1..200 {
            for j in 1..200 {
                let x = i as f64 * 0.017;
                let y = x + j as f64 * 0.013;
                let via_product = hsic_indicator(&c, x, y);
                let b = rate_breakdown(SchemeKind::HsicHybrid, &c, x, y).unwrap();
                let nats = |r: f64| r * std::f64::consts::LN_2;
                let via_log = nats(b.noma_slot_rate) + nats(b.oma_slot_rate)
                    <= nats(b.oma_baseline_rate);
                if via_product != via_log {
                    disagreements += 1;
                }
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn region_examples() {
        let c = cfg(5, 2, 5, 1.0 / 3.0, 100.0, 20.0, 0.2);
        let alpha = alpha_m(&c);
        // x below alpha_m with y below Psi: P22
        let x = alpha * 0.5;
        assert_eq!(lemma1_region(&c, x, psi_curve(&c, x) * 0.9), Some(Region::P22));
        // x above omega_2 with y below omega_3: P12
        let omega2 = (1.0 - c.beta) / c.beta * alpha;
        let omega3 = (1.0 - 2.0 * c.beta) / (c.beta * c.beta * c.rho_n);
        assert_eq!(lemma1_region(&c, omega2 * 3.0, omega3 * 0.5), Some(Region::P12));
        // above both curves: outside the event
        let x = alpha * 2.0;
        let y = psi_curve(&c, x).max(phi_curve(&c, x)) * 1.5;
        assert_eq!(lemma1_region(&c, x, y), None);
    }

    #[test]
    fn transparency_boundary_cases() {
        let c = cfg(5, 1, 5, 1.0 / 3.0, 100.0, 20.0, 0.2);
        // stage 1 (u > tau): always transparent
        assert!(legacy_transparency_check(&c, 0.1, 50.0));
        // stage-2 boundary: y chosen so u equals tau exactly up to rounding
        let tau = interference_threshold(c.rho_m, 1.0, c.r_m);
        let y = tau / (c.beta * c.rho_n);
        assert!(legacy_transparency_check(&c, 1.0, y));
    }

    proptest! {
        /// Lemma 1 is an exact partition of the failure event: the region
        /// classifier and the rate-comparison indicator must agree.
        #[test]
        fn region_matches_indicator(
            x in 0.0f64..8.0,
            dy in 0.0f64..8.0,
            beta in 0.01f64..0.49,
            rho_n in 0.5f64..3000.0,
            ratio in 0.1f64..15.0,
            r_m in 0.05f64..2.5,
        ) {
            let c = cfg(5, 2, 5, beta, rho_n, rho_n / ratio, r_m);
            let y = x + dy;
            let in_region = lemma1_region(&c, x, y).is_some();
            let indicated = hsic_indicator(&c, x, y);
            prop_assert_eq!(in_region, indicated);
        }

        /// HSIC picks the better admissible stage, so its shared-slot rate
        /// dominates FSIC's and failure under HSIC implies failure under FSIC.
        #[test]
        fn hsic_dominates_fsic(
            x in 0.0f64..8.0,
            dy in 0.0f64..8.0,
            beta in 0.01f64..0.49,
            rho_n in 0.5f64..3000.0,
            ratio in 0.1f64..15.0,
            r_m in 0.05f64..2.5,
        ) {
            let c = cfg(5, 2, 5, beta, rho_n, rho_n / ratio, r_m);
            let y = x + dy;
            let (hsic, _) = hsic_noma_rate(&c, x, y);
            let fsic = fsic_noma_rate(&c, x, y);
            prop_assert!(hsic >= fsic);
            if hsic_indicator(&c, x, y) {
                prop_assert!(fsic_indicator(&c, x, y));
            }
        }

        /// Admission never hurts the legacy user.
        #[test]
        fn transparency_holds(
            x in 0.0f64..8.0,
            y in 0.0f64..8.0,
            beta in 0.01f64..0.49,
            rho_n in 0.5f64..3000.0,
            ratio in 0.1f64..15.0,
            r_m in 0.05f64..2.5,
        ) {
            let c = cfg(5, 2, 5, beta, rho_n, rho_n / ratio, r_m);
            prop_assert!(legacy_transparency_check(&c, x, y));
        }
    }
}
