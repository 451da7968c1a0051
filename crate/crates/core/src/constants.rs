//! Derived constants of the closed-form analysis and the regime classifier
//! that selects which table and column governs a configuration.

use crate::config::SystemConfig;
use crate::model::eps_from_rate;
use serde::{Deserialize, Serialize};

/// Relative belt around zero denominators inside which a constant is
/// flagged singular and the closed form defers to quadrature.
const SINGULAR_REL_TOL: f64 = 1e-9;

/// Marks constants whose denominators sit within [`SINGULAR_REL_TOL`] of
/// zero.  Not an error by itself: a column that never touches the flagged
/// constant still evaluates normally.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularFlags {
    pub omega1: bool,
    pub omega4: bool,
    pub omega5: bool,
}

impl SingularFlags {
    pub fn any(self) -> bool {
        self.omega1 || self.omega4 || self.omega5
    }
}

/// Every scalar constant appearing in the closed-form tables.
///
/// `omega_1`, `omega_4`, `omega_5` change sign across regime boundaries and
/// may be infinite exactly on them; the accompanying flags report when they
/// are too close to a pole to be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// `2^{R_m} - 1`, the legacy SINR target.
    pub eps_m: f64,
    /// `eps_m / rho_m`, gain threshold below which the tolerance is zero.
    pub alpha_m: f64,
    /// `1 / (alpha_m^{-1} - beta rho_n)`.
    pub omega1: f64,
    /// `(1 - beta)/beta * alpha_m`.
    pub omega2: f64,
    /// `(1 - 2 beta) / (beta^2 rho_n)`.
    pub omega3: f64,
    /// `(1 - 2 beta) / (beta^2 rho_n - (1 - beta) rho_m)`.
    pub omega4: f64,
    /// `(1 - beta) / (beta alpha_m^{-1} - (1 - beta) rho_m)`.
    pub omega5: f64,
    /// `(1 - 2 beta) / ((1 - beta) beta eps_m)`.
    pub kappa1: f64,
    /// `(1 - 2 beta) / (beta^2 eps_m) + (1 - beta) / beta^2`.
    pub kappa2: f64,
    /// `kappa1 + 1/beta`.
    pub kappa3: f64,
    /// `rho_n / rho_m`.
    pub eta: f64,
    /// Joint order-statistic constant `M! / ((i-1)!(j-i-1)!(M-j)!)` for the
    /// ordered index pair `(i, j) = (min(m,n), max(m,n))`.
    pub joint_coeff: f64,
    /// Marginal constant for the n-th order statistic, `M!/((n-1)!(M-n)!)`.
    pub marginal_coeff_n: f64,
    pub singular: SingularFlags,
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Populates every closed-form constant for a configuration.
pub fn derive_constants(cfg: &SystemConfig) -> DerivedConstants {
    let beta = cfg.beta;
    let eps_m = eps_from_rate(cfg.r_m);
    let alpha_m = eps_m / cfg.rho_m;
    let inv_alpha = cfg.rho_m / eps_m;

    let d1 = inv_alpha - beta * cfg.rho_n;
    let d4 = beta * beta * cfg.rho_n - (1.0 - beta) * cfg.rho_m;
    let d5 = beta * inv_alpha - (1.0 - beta) * cfg.rho_m;
    let singular = SingularFlags {
        omega1: d1.abs() <= SINGULAR_REL_TOL * inv_alpha.max(beta * cfg.rho_n),
        omega4: d4.abs()
            <= SINGULAR_REL_TOL * (beta * beta * cfg.rho_n).max((1.0 - beta) * cfg.rho_m),
        omega5: d5.abs()
            <= SINGULAR_REL_TOL * (beta * inv_alpha).max((1.0 - beta) * cfg.rho_m),
    };

    let kappa1 = (1.0 - 2.0 * beta) / ((1.0 - beta) * beta * eps_m);
    let (i, j) = (cfg.m.min(cfg.n), cfg.m.max(cfg.n));
    DerivedConstants {
        eps_m,
        alpha_m,
        omega1: 1.0 / d1,
        omega2: (1.0 - beta) / beta * alpha_m,
        omega3: (1.0 - 2.0 * beta) / (beta * beta * cfg.rho_n),
        omega4: (1.0 - 2.0 * beta) / d4,
        omega5: (1.0 - beta) / d5,
        kappa1,
        kappa2: (1.0 - 2.0 * beta) / (beta * beta * eps_m) + (1.0 - beta) / (beta * beta),
        kappa3: kappa1 + 1.0 / beta,
        eta: cfg.eta(),
        joint_coeff: factorial(cfg.users)
            / (factorial(i - 1) * factorial(j - i - 1) * factorial(cfg.users - j)),
        marginal_coeff_n: factorial(cfg.users)
            / (factorial(cfg.n - 1) * factorial(cfg.users - cfg.n)),
        singular,
    }
}

/// Which of the four closed-form tables applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Table {
    I,
    II,
    III,
    IV,
}

impl Table {
    pub fn label(self) -> &'static str {
        match self {
            Table::I => "I",
            Table::II => "II",
            Table::III => "III",
            Table::IV => "IV",
        }
    }

    /// Number of power-ratio columns in this table.
    pub fn column_count(self) -> usize {
        match self {
            Table::I | Table::III => 5,
            Table::II | Table::IV => 4,
        }
    }
}

/// Table and column governing one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeClass {
    pub table: Table,
    /// 1-based column index; boundaries belong to the left column per the
    /// inclusive `<=` column headers.
    pub column: usize,
    /// True when `eps_m > beta / (1 - beta)`.
    pub eps_branch: bool,
}

/// The ordered column breakpoints of a table for the given constants.
pub fn column_breakpoints(cfg: &SystemConfig, k: &DerivedConstants) -> Vec<f64> {
    if k.eps_m > cfg.beta / (1.0 - cfg.beta) {
        vec![
            k.kappa1,
            1.0 / (cfg.beta * k.eps_m),
            (1.0 - cfg.beta) / (cfg.beta * cfg.beta),
            k.kappa2,
        ]
    } else {
        vec![k.kappa1, k.kappa3, k.kappa2]
    }
}

/// Picks the table by the sign of `n - m` and the `eps_m` branch, and the
/// column by where `rho_n / rho_m` falls among the breakpoints.  The
/// `eps_m = beta/(1-beta)` tie goes to the `<=` branch (tables II/IV).
pub fn classify_regime(cfg: &SystemConfig, k: &DerivedConstants) -> RegimeClass {
    let eps_branch = k.eps_m > cfg.beta / (1.0 - cfg.beta);
    let table = match (cfg.m < cfg.n, eps_branch) {
        (true, true) => Table::I,
        (true, false) => Table::II,
        (false, true) => Table::III,
        (false, false) => Table::IV,
    };
    let mut column = 1;
    for b in column_breakpoints(cfg, k) {
        if k.eta <= b {
            break;
        }
        column += 1;
    }
    RegimeClass { table, column, eps_branch }
}

/// `phi(x, y, z) = (e^{-xz} - e^{-yz}) / z`, evaluated stably.
///
/// Small `|z|` returns the limit `y - x`; otherwise the factored form
/// `e^{-xz} (1 - e^{-(y-x)z}) / z` avoids cancellation when `xz` is large.
/// `y = +inf` is permitted and yields `e^{-xz} / z`.
pub fn phi_kernel(x: f64, y: f64, z: f64) -> f64 {
    if z.abs() < 1e-12 {
        return y - x;
    }
    let lead = (-x * z).exp();
    -lead * (-(y - x) * z).exp_m1() / z
}
