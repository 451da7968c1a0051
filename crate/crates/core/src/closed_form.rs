//! Exact closed-form evaluation of the HSIC failure probability.
//!
//! The probability splits into `P_1 + P_{2,1} + P_{2,2}`, with each part
//! selected from a table keyed by the pairing order (`m` vs `n`), the size
//! of the legacy SINR target `eps_m` against `beta/(1-beta)`, and where the
//! power ratio falls among the column breakpoints.  Every table entry is an
//! alternating double sum of exponential differences; exponents are always
//! combined before exponentiation (`e^{c} * e^{-rx}` never appears as two
//! factors) and the assembly runs in double-double arithmetic so that
//! deep-tail values survive the cancellation between O(1) addends.

use crate::config::SystemConfig;
use crate::constants::{
    binomial, classify_regime, derive_constants, DerivedConstants, RegimeClass, Table,
};
use crate::dd::{Dd, LN2};
use crate::estimate::{Method, ProbabilityEstimate};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    #[error("closed form for {expected} called with m={m}, n={n}")]
    Domain { expected: &'static str, m: usize, n: usize },
    #[error("configuration sits within 1e-9 of the {constant} pole; use quadrature instead")]
    SingularRegime { constant: &'static str },
    #[error("assembled probability {raw} outside [-1e-9, 1+1e-9]; table transcription bug")]
    RangeViolation { raw: f64 },
}

/// Closed-form value split into the three table rows.
#[derive(Clone, Copy, Debug)]
pub struct ClosedFormBreakdown {
    pub p1: f64,
    pub p21: f64,
    pub p22: f64,
    /// Sum of the three parts, clipped to `[0, 1]` after the range check.
    pub total: f64,
    pub regime: RegimeClass,
}

impl ClosedFormBreakdown {
    pub fn estimate(&self) -> ProbabilityEstimate {
        ProbabilityEstimate::exact(self.total, Method::ClosedForm)
    }
}

// ---------------------------------------------------------------------------
// double-double scenario constants
// ---------------------------------------------------------------------------

/// All scenario constants lifted to double-double precision.
pub(crate) struct DdScenario {
    pub users: usize,
    pub m: usize,
    pub n: usize,
    pub alpha: Dd,
    pub w1: Dd,
    pub w2: Dd,
    pub w3: Dd,
    pub w4: Dd,
    pub w5: Dd,
    /// `1 / (beta rho_n)`
    pub inv_brn: Dd,
    /// `1 / (beta rho_n alpha_m)`
    pub inv_brn_alpha: Dd,
    /// `(1 - beta) rho_m / (beta^2 rho_n)`
    pub slope_a: Dd,
}

impl DdScenario {
    pub fn new(cfg: &SystemConfig) -> Self {
        let beta = Dd::from_f64(cfg.beta);
        let rho_n = Dd::from_f64(cfg.rho_n);
        let rho_m = Dd::from_f64(cfg.rho_m);
        let one = Dd::ONE;
        let eps = (Dd::from_f64(cfg.r_m) * LN2).expm1();
        let alpha = eps / rho_m;
        let inv_alpha = rho_m / eps;
        let beta_rho_n = beta * rho_n;
        let b2rn = beta * beta * rho_n;
        let one_minus = one - beta;
        DdScenario {
            users: cfg.users,
            m: cfg.m,
            n: cfg.n,
            alpha,
            w1: (inv_alpha - beta_rho_n).recip(),
            w2: one_minus / beta * alpha,
            w3: (one - beta.scale_pow2(2.0)) / b2rn,
            w4: (one - beta.scale_pow2(2.0)) / (b2rn - one_minus * rho_m),
            w5: one_minus / (beta * inv_alpha - one_minus * rho_m),
            inv_brn: beta_rho_n.recip(),
            inv_brn_alpha: (beta_rho_n * alpha).recip(),
            slope_a: one_minus * rho_m / b2rn,
        }
    }
}

/// `e^a - e^b` without cancellation: `-e^a expm1(b - a)`.
pub(crate) fn exp_diff(a: Dd, b: Dd) -> Dd {
    if a.hi == f64::NEG_INFINITY {
        return b.exp().neg();
    }
    if b.hi == f64::NEG_INFINITY {
        return a.exp();
    }
    (a.exp() * (b - a).expm1()).neg()
}

/// `(e^{shift - xz} - e^{shift - yz}) / z`.
pub(crate) fn phi_dd(x: Dd, y: Dd, z: Dd, shift: Dd) -> Dd {
    exp_diff(shift - x * z, shift - y * z) / z
}

/// `e^{shift - xz} / z`.
pub(crate) fn exp_over(x: Dd, z: Dd, shift: Dd) -> Dd {
    (shift - x * z).exp() / z
}

pub(crate) fn neg_pow(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

// ---------------------------------------------------------------------------
// table terms
// ---------------------------------------------------------------------------

/// The seven m<n table entries, indexed T[0] = T_1 .. T[6] = T_7.
fn t_terms(sc: &DdScenario, k: &DerivedConstants) -> [Dd; 7] {
    let (users, m, n) = (sc.users, sc.m, sc.n);
    let zero = Dd::ZERO;
    let mut t = [Dd::ZERO; 7];
    for p in 0..=(n - m - 1) {
        let cp = binomial(n - m - 1, p) * neg_pow(n - m - 1 - p);
        let mmp = (users - m - p) as f64;
        for l in 0..=(m - 1) {
            let cl = binomial(m - 1, l) * neg_pow(l);
            let pre = Dd::from_f64(k.joint_coeff * cp * cl) / Dd::from_f64(mmp);
            let lpp = (l + p + 1) as f64;
            let z1 = Dd::from_f64((users - m + l + 1) as f64);
            let r = sc.inv_brn_alpha.mul_f64(mmp).add_f64(lpp);
            let a = sc.slope_a.mul_f64(mmp).add_f64(lpp);
            let up = sc.inv_brn.mul_f64(mmp); // +(M-m-p)/(beta rho_n)
            let dn = sc.w3.mul_f64(-mmp); // -(M-m-p) omega_3
            let lppd = Dd::from_f64(lpp);

            t[0] += pre
                * (phi_dd(sc.w1, sc.w3, z1, zero)
                    - phi_dd(sc.w1, sc.w2, r, up)
                    - phi_dd(sc.w2, sc.w3, lppd, dn));
            t[1] += pre
                * (phi_dd(sc.alpha, sc.w1, z1, zero) - exp_over(sc.alpha, a, dn)
                    + exp_over(sc.w1, r, up));
            t[2] += pre * (exp_over(sc.alpha, z1, zero) - exp_over(sc.alpha, a, dn));
            t[3] += pre * (phi_dd(sc.alpha, sc.w4, z1, zero) - phi_dd(sc.alpha, sc.w4, a, dn));
            t[4] += pre
                * (phi_dd(sc.alpha, sc.w1, z1, zero) - phi_dd(sc.alpha, sc.w5, a, dn)
                    + phi_dd(sc.w1, sc.w5, r, up));
            t[5] += pre * (phi_dd(zero, sc.alpha, z1, zero) - phi_dd(zero, sc.alpha, a, dn));
            t[6] += pre * (phi_dd(zero, sc.w4, z1, zero) - phi_dd(zero, sc.w4, a, dn));
        }
    }
    t
}

/// The ten m>n table entries, indexed Q[0] = Q_1 .. Q[9] = Q_10.
fn q_terms(sc: &DdScenario, k: &DerivedConstants) -> [Dd; 10] {
    let (users, m, n) = (sc.users, sc.m, sc.n);
    let zero = Dd::ZERO;
    let mut q = [Dd::ZERO; 10];
    for p in 0..=(m - n - 1) {
        let cp = binomial(m - n - 1, p) * neg_pow(m - n - 1 - p);
        let z2f = (users - n - p) as f64;
        let z2 = Dd::from_f64(z2f);
        for l in 0..=(n - 1) {
            let cl = binomial(n - 1, l) * neg_pow(l);
            let lpp = (l + p + 1) as f64;
            let pre = Dd::from_f64(k.joint_coeff * cp * cl) / Dd::from_f64(lpp);
            let z1 = Dd::from_f64((users - n + l + 1) as f64);
            let t = sc.inv_brn_alpha.mul_f64(lpp).add_f64(z2f);
            let s = sc.slope_a.mul_f64(lpp).add_f64(z2f);
            let up = sc.inv_brn.mul_f64(lpp); // +(l+p+1)/(beta rho_n)
            let dn = sc.w3.mul_f64(-lpp); // -(l+p+1) omega_3

            // Q_1 includes the mass above omega_3 that the shared strip
            // leaves out; without it the m>n floor limit cannot emerge.
            q[0] += pre
                * (phi_dd(sc.alpha, sc.w3, z2, zero)
                    - phi_dd(sc.alpha, sc.w1, t, up)
                    - phi_dd(sc.w1, sc.w3, z1, zero)
                    + exp_diff((sc.w3 * z2).neg(), (sc.w3 * z1).neg()) / z2);
            q[1] += pre
                * (exp_diff((sc.alpha * z2).neg(), dn - sc.w2 * z2) / z2
                    - phi_dd(sc.alpha, sc.w2, t, up));
            q[2] += pre * (phi_dd(sc.alpha, sc.w1, t, up) - phi_dd(sc.alpha, sc.w1, z1, zero));
            q[3] += pre * (exp_over(sc.alpha, t, up) - exp_over(sc.alpha, z1, zero));
            q[4] += pre
                * (exp_over(sc.alpha, t, up)
                    - exp_over(sc.w4, s, dn)
                    - phi_dd(sc.alpha, sc.w4, z1, zero));
            q[5] += pre * (exp_over(sc.alpha, t, up) - exp_over(sc.alpha, s, dn));
            q[6] += pre
                * (phi_dd(sc.alpha, sc.w5, t, up)
                    - phi_dd(sc.alpha, sc.w4, z1, zero)
                    - phi_dd(sc.w4, sc.w5, s, dn));
            q[7] += pre * (phi_dd(sc.alpha, sc.w5, t, up) - phi_dd(sc.alpha, sc.w5, s, dn));
            q[8] += pre * (phi_dd(zero, sc.alpha, z2, zero) - phi_dd(zero, sc.alpha, z1, zero));
            q[9] += pre
                * (phi_dd(zero, sc.alpha, z2, zero)
                    - phi_dd(zero, sc.w4, z1, zero)
                    - phi_dd(sc.w4, sc.alpha, s, dn));
        }
    }
    q
}

// ---------------------------------------------------------------------------
// table dispatch
// ---------------------------------------------------------------------------

/// 1-based term indices per column: `(P_1, P_{2,1}, P_{2,2})`, 0 = zero entry.
fn column_layout(table: Table, column: usize) -> (usize, usize, usize) {
    match table {
        Table::I => (
            [1, 0, 0, 0, 0][column - 1],
            [2, 2, 3, 4, 0][column - 1],
            [6, 6, 6, 6, 7][column - 1],
        ),
        Table::II => (
            [1, 0, 0, 0][column - 1],
            [5, 5, 4, 0][column - 1],
            [6, 6, 6, 7][column - 1],
        ),
        Table::III => (
            [1, 2, 2, 2, 2][column - 1],
            [3, 3, 4, 5, 6][column - 1],
            [9, 9, 9, 9, 10][column - 1],
        ),
        Table::IV => (
            [1, 2, 2, 2][column - 1],
            [3, 3, 7, 8][column - 1],
            [9, 9, 9, 10][column - 1],
        ),
    }
}

/// Singular constants each column actually touches.
fn column_poles(table: Table, column: usize) -> (bool, bool, bool) {
    // (omega1, omega4, omega5)
    match table {
        Table::I => ([true, true, false, false, false][column - 1], column >= 4, false),
        Table::II => (column <= 2, column >= 3, column <= 2),
        Table::III => (column <= 2, column >= 4, false),
        Table::IV => (column <= 2, column >= 3, column >= 3),
    }
}

fn assemble(cfg: &SystemConfig, regime: RegimeClass) -> Result<ClosedFormBreakdown, ClosedFormError> {
    let k = derive_constants(cfg);
    let sc = DdScenario::new(cfg);
    let pick = |terms: &[Dd], idx: usize| -> Dd {
        if idx == 0 {
            Dd::ZERO
        } else {
            terms[idx - 1]
        }
    };
    let (i1, i21, i22) = column_layout(regime.table, regime.column);
    let (p1, p21, p22) = if cfg.m < cfg.n {
        let t = t_terms(&sc, &k);
        (pick(&t, i1), pick(&t, i21), pick(&t, i22))
    } else {
        let q = q_terms(&sc, &k);
        (pick(&q, i1), pick(&q, i21), pick(&q, i22))
    };
    let raw = (p1 + p21 + p22).to_f64();
    if !raw.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&raw) {
        return Err(ClosedFormError::RangeViolation { raw });
    }
    Ok(ClosedFormBreakdown {
        p1: p1.to_f64(),
        p21: p21.to_f64(),
        p22: p22.to_f64(),
        total: raw.clamp(0.0, 1.0),
        regime,
    })
}

fn guard_singular(cfg: &SystemConfig, regime: RegimeClass) -> Result<(), ClosedFormError> {
    let k = derive_constants(cfg);
    let (need1, need4, need5) = column_poles(regime.table, regime.column);
    if need1 && k.singular.omega1 {
        return Err(ClosedFormError::SingularRegime { constant: "omega_1" });
    }
    if need4 && k.singular.omega4 {
        return Err(ClosedFormError::SingularRegime { constant: "omega_4" });
    }
    if need5 && k.singular.omega5 {
        return Err(ClosedFormError::SingularRegime { constant: "omega_5" });
    }
    Ok(())
}

/// Exact failure probability; dispatches on the pairing order.
pub fn ptilde_closed(cfg: &SystemConfig) -> Result<ClosedFormBreakdown, ClosedFormError> {
    let regime = classify_regime(cfg, &derive_constants(cfg));
    guard_singular(cfg, regime)?;
    assemble(cfg, regime)
}

/// Theorem path for `m < n` only.
pub fn ptilde_closed_m_lt_n(cfg: &SystemConfig) -> Result<ClosedFormBreakdown, ClosedFormError> {
    if cfg.m >= cfg.n {
        return Err(ClosedFormError::Domain { expected: "m < n", m: cfg.m, n: cfg.n });
    }
    ptilde_closed(cfg)
}

/// Theorem path for `m > n` only.
pub fn ptilde_closed_m_gt_n(cfg: &SystemConfig) -> Result<ClosedFormBreakdown, ClosedFormError> {
    if cfg.m <= cfg.n {
        return Err(ClosedFormError::Domain { expected: "m > n", m: cfg.m, n: cfg.n });
    }
    ptilde_closed(cfg)
}

/// Evaluates the formulas of a specific column of the config's table,
/// bypassing both the breakpoint classification and the singular guard.
///
/// Intended for cross-checks: the probability is continuous across every
/// column boundary, so adjacent columns evaluated at the boundary itself
/// must agree.
pub fn ptilde_closed_in_column(
    cfg: &SystemConfig,
    column: usize,
) -> Result<ClosedFormBreakdown, ClosedFormError> {
    let mut regime = classify_regime(cfg, &derive_constants(cfg));
    assert!(
        column >= 1 && column <= regime.table.column_count(),
        "column {column} out of range for table {:?}",
        regime.table
    );
    regime.column = column;
    assemble(cfg, regime)
}
