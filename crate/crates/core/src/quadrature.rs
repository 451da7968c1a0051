//! Independent numerical ground truth: the failure probability and its
//! region masses by adaptive 2-D quadrature of the exact joint
//! order-statistic density.
//!
//! Nothing here touches the closed-form tables.  Regions come from the same
//! predicates as the per-realization classifier (`Phi`/`Psi` curves and the
//! threshold strips), split analytically at the pairwise curve crossings so
//! each panel has smooth bounds.  The outer gain is integrated in CDF
//! coordinates `u = 1 - e^{-x}` (the infinite tail lands on `u = 1` with no
//! truncation); the inner gain stays in its own coordinate with every
//! density factor computed from a cancellation-free primitive, so deep-tail
//! panels keep full relative accuracy.

use crate::config::SystemConfig;
use crate::constants::{derive_constants, factorial};
use crate::estimate::ProbabilityEstimate;
use crate::model::{phi_curve, psi_curve, Region};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("order-statistic indices must satisfy 1 <= i < j <= M, got i={i}, j={j}, M={users}")]
    BadIndices { users: usize, i: usize, j: usize },
    #[error("joint density requires x <= y, got x={x}, y={y}")]
    UnorderedPoint { x: f64, y: f64 },
    #[error("relative tolerance must lie in [1e-12, 1e-3], got {0}")]
    InvalidTolerance(f64),
    #[error("integration budget exhausted before reaching the tolerance (region {region})")]
    NonConvergence { region: &'static str },
}

/// Joint density of the (i-th, j-th) order statistics of `users` iid unit
/// exponentials at the point `(x, y)`, `x <= y`.
pub fn joint_order_stat_pdf(
    users: usize,
    i: usize,
    j: usize,
    x: f64,
    y: f64,
) -> Result<f64, QuadratureError> {
    if i < 1 || j <= i || j > users {
        return Err(QuadratureError::BadIndices { users, i, j });
    }
    if x > y || x < 0.0 {
        return Err(QuadratureError::UnorderedPoint { x, y });
    }
    let c = factorial(users)
        / (factorial(i - 1) * factorial(j - i - 1) * factorial(users - j));
    let fx = -(-x).exp_m1(); // F(x)
    let dff = (-x).exp() - (-y).exp(); // F(y) - F(x)
    let sy = (-y).exp(); // 1 - F(y)
    Ok(c * fx.powi(i as i32 - 1)
        * dff.powi((j - i - 1) as i32)
        * sy.powi((users - j) as i32)
        * (-x).exp()
        * (-y).exp())
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15
// ---------------------------------------------------------------------------

const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (idx, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += wk * pair;
        if idx % 2 == 1 {
            gauss += WG[idx / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Globally adaptive GK15: repeatedly bisect the segment with the largest
/// error estimate until the summed error meets the tolerance.
fn adaptive_gk15<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_splits: u32,
) -> Result<(f64, f64), ()> {
    adaptive_gk15_seeded(f, &[a, b], rel_tol, max_splits)
}

/// Like [`adaptive_gk15`] but with initial segments graded geometrically
/// from the left edge.  Integrands here decay in the outer gain at a rate
/// set by the region's curve slopes, which can be arbitrarily steep; a
/// single coarse first pass would place every node past the mass and accept
/// zero.  The ladder guarantees some node lands inside any decay scale down
/// to 2^-44 of the panel width.
fn adaptive_gk15_left_graded<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_splits: u32,
) -> Result<(f64, f64), ()> {
    if a >= b {
        return Ok((0.0, 0.0));
    }
    let width = b - a;
    let mut edges = vec![a];
    for k in (0..=44).rev() {
        let edge = a + width * 0.5f64.powi(k);
        if edge > *edges.last().unwrap() && edge < b {
            edges.push(edge);
        }
    }
    edges.push(b);
    adaptive_gk15_seeded(f, &edges, rel_tol, max_splits)
}

fn adaptive_gk15_seeded<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    edges: &[f64],
    rel_tol: f64,
    max_splits: u32,
) -> Result<(f64, f64), ()> {
    let (a, b) = (edges[0], *edges.last().unwrap());
    if a >= b {
        return Ok((0.0, 0.0));
    }
    let mut segs: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64 + edges.len());
    for w in edges.windows(2) {
        let (v, e) = gk15(f, w[0], w[1]);
        segs.push((e, w[0], w[1], v));
    }
    for _ in 0..max_splits {
        let total_v: f64 = segs.iter().map(|s| s.3).sum();
        let total_e: f64 = segs.iter().map(|s| s.0).sum();
        if total_e <= rel_tol * total_v.abs() + 1e-300 {
            return Ok((total_v, total_e));
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
            .map(|(i, _)| i)
            .unwrap();
        let (_, sa, sb, _) = segs.swap_remove(worst);
        let sm = 0.5 * (sa + sb);
        let (v1, e1) = gk15(f, sa, sm);
        let (v2, e2) = gk15(f, sm, sb);
        segs.push((e1, sa, sm, v1));
        segs.push((e2, sm, sb, v2));
    }
    let total_v: f64 = segs.iter().map(|s| s.3).sum();
    let total_e: f64 = segs.iter().map(|s| s.0).sum();
    if total_e <= rel_tol * total_v.abs() + 1e-300 {
        Ok((total_v, total_e))
    } else {
        Err(())
    }
}

// ---------------------------------------------------------------------------
// Region geometry
// ---------------------------------------------------------------------------

/// A bound on the inner variable, as a function of the outer `x = |h_m|^2`.
#[derive(Clone, Copy, Debug)]
enum Curve {
    Zero,
    Const(f64),
    Diagonal,
    Phi,
    Psi,
}

impl Curve {
    fn eval(self, cfg: &SystemConfig, x: f64) -> f64 {
        match self {
            Curve::Zero => 0.0,
            Curve::Const(c) => c,
            Curve::Diagonal => x,
            Curve::Phi => phi_curve(cfg, x),
            Curve::Psi => psi_curve(cfg, x),
        }
    }
}

/// An x-interval on which the effective lower and upper inner bounds are
/// each a single smooth curve.
#[derive(Clone, Debug)]
struct Panel {
    x_lo: f64,
    x_hi: f64, // may be +inf
    lower: Vec<Curve>,
    upper: Vec<Curve>,
}

/// Integration limits for one Lemma-1 region in the `(|h_m|^2, |h_n|^2)`
/// plane, split into smooth panels.
#[derive(Clone, Debug)]
pub struct RegionSpec {
    pub region: Region,
    cfg: SystemConfig,
    panels: Vec<Panel>,
}

impl RegionSpec {
    pub fn new(cfg: &SystemConfig, region: Region) -> Self {
        let k = derive_constants(cfg);
        let alpha = k.alpha_m;

        // raw region bounds before the ordering constraint
        let (x_lo, x_hi, lower, upper): (f64, f64, Vec<Curve>, Vec<Curve>) = match region {
            Region::P11 => (alpha, k.omega2, vec![], vec![Curve::Phi]),
            Region::P12 => (k.omega2, f64::INFINITY, vec![], vec![Curve::Const(k.omega3)]),
            Region::P21 => (alpha, f64::INFINITY, vec![Curve::Phi], vec![Curve::Psi]),
            Region::P22 => (0.0, alpha, vec![], vec![Curve::Psi]),
        };
        let mut lower = lower;
        let mut upper = upper;
        lower.push(Curve::Zero);
        // ordering of the m-th and n-th order statistics
        if cfg.m < cfg.n {
            lower.push(Curve::Diagonal);
        } else {
            upper.push(Curve::Diagonal);
        }

        // split at every pairwise curve crossing so min/max stay smooth
        let mut cuts: Vec<f64> = Vec::new();
        for w in [k.omega1, k.omega2, k.omega3, k.omega4, k.omega5, alpha] {
            if w.is_finite() && w > x_lo && w < x_hi {
                cuts.push(w);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * a.abs());

        let mut edges = vec![x_lo];
        edges.extend(cuts);
        edges.push(x_hi);
        let panels = edges
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| Panel { x_lo: w[0], x_hi: w[1], lower: lower.clone(), upper: upper.clone() })
            .collect();
        RegionSpec { region, cfg: *cfg, panels }
    }

    /// Effective inner-variable limits at `x`, or `None` when the section is
    /// empty.  Always respects the order-statistic support.
    pub fn y_bounds(&self, x: f64) -> Option<(f64, f64)> {
        for p in &self.panels {
            if x >= p.x_lo && x <= p.x_hi {
                let lo = p
                    .lower
                    .iter()
                    .map(|c| c.eval(&self.cfg, x))
                    .fold(f64::NEG_INFINITY, f64::max);
                let hi = p
                    .upper
                    .iter()
                    .map(|c| c.eval(&self.cfg, x))
                    .fold(f64::INFINITY, f64::min);
                return (hi > lo).then_some((lo, hi));
            }
        }
        None
    }

    pub fn x_support(&self) -> (f64, f64) {
        (
            self.panels.first().map_or(0.0, |p| p.x_lo),
            self.panels.last().map_or(0.0, |p| p.x_hi),
        )
    }
}

// ---------------------------------------------------------------------------
// Integration in CDF coordinates
// ---------------------------------------------------------------------------

/// F(t) for t possibly negative (clamped) or infinite.
fn cdf(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t.is_infinite() {
        1.0
    } else {
        -(-t).exp_m1()
    }
}

fn inv_cdf(u: f64) -> f64 {
    -(-u).ln_1p() // -ln(1 - u)
}

struct UvDensity {
    users: usize,
    i: usize,
    j: usize,
    coeff: f64,
    /// true when the outer variable is the i-th (smaller) order statistic
    outer_is_lower: bool,
}

impl UvDensity {
    fn for_cfg(cfg: &SystemConfig) -> Self {
        let (i, j) = (cfg.m.min(cfg.n), cfg.m.max(cfg.n));
        UvDensity {
            users: cfg.users,
            i,
            j,
            coeff: factorial(cfg.users)
                / (factorial(i - 1) * factorial(j - i - 1) * factorial(cfg.users - j)),
            outer_is_lower: cfg.m < cfg.n,
        }
    }

}

const INNER_SPLITS: u32 = 64;
const OUTER_SPLITS: u32 = 4000;

/// `F(b) - F(a)` for `b >= a >= 0`, stable far into the tail.
fn cdf_gap(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let d = b - a;
    if a > 690.0 || d > 690.0 {
        return (-a).exp() - (-b).exp();
    }
    // e^{-a} - e^{-b} = -e^{-a} expm1(-(b-a))
    -((-a).exp()) * (-d).exp_m1()
}

fn integrate_panel(
    cfg: &SystemConfig,
    panel: &Panel,
    density: &UvDensity,
    rel_tol: f64,
) -> Result<(f64, f64), ()> {
    // Both integrals run in plain gain space, so node placement keeps full
    // relative precision at every scale (CDF coordinates go blind next to
    // u = 1, where an ulp spans a whole deep-tail panel).  Every density
    // factor is evaluated from a cancellation-free primitive: F via expm1,
    // CDF gaps via `cdf_gap`, survival weights as plain exponentials.  The
    // integrand decays at least like e^{-x} in each variable, so truncating
    // spans at 900 discards a relative e^{-900}.
    let x_lo = panel.x_lo;
    let x_hi = panel.x_hi.min(panel.x_lo + 900.0);
    if x_hi <= x_lo {
        return Ok((0.0, 0.0));
    }
    // skip panels whose section is empty (bounds never cross inside a panel)
    let x_mid = 0.5 * (x_lo + x_hi);
    let lo_mid = panel.lower.iter().map(|c| c.eval(cfg, x_mid)).fold(f64::NEG_INFINITY, f64::max);
    let hi_mid = panel.upper.iter().map(|c| c.eval(cfg, x_mid)).fold(f64::INFINITY, f64::min);
    if hi_mid <= lo_mid {
        return Ok((0.0, 0.0));
    }

    let (i, j, users) = (density.i as i32, density.j as i32, density.users as i32);
    let outer = |x: f64| -> f64 {
        let weight = (-x).exp(); // the outer f(x) factor
        let raw_lo = panel.lower.iter().map(|c| c.eval(cfg, x)).fold(f64::NEG_INFINITY, f64::max);
        let raw_hi = panel.upper.iter().map(|c| c.eval(cfg, x)).fold(f64::INFINITY, f64::min);
        let inner: Box<dyn Fn(f64) -> f64> = if density.outer_is_lower {
            let scale = density.coeff * weight * (-(-x).exp_m1()).powi(i - 1);
            Box::new(move |y: f64| {
                scale * cdf_gap(x, y).powi(j - i - 1) * (-(users - j + 1) as f64 * y).exp()
            })
        } else {
            let scale = density.coeff * weight * (-x * (users - j) as f64).exp();
            Box::new(move |y: f64| {
                scale
                    * (-(-y).exp_m1()).powi(i - 1)
                    * cdf_gap(y, x).powi(j - i - 1)
                    * (-y).exp()
            })
        };
        let (y_lo, y_hi) = if density.outer_is_lower {
            (raw_lo.max(x), raw_hi)
        } else {
            (raw_lo.max(0.0), raw_hi.min(x))
        };
        let y_hi = y_hi.min(y_lo + 900.0);
        if y_hi <= y_lo {
            return 0.0;
        }
        adaptive_gk15(&*inner, y_lo, y_hi, rel_tol * 0.02, INNER_SPLITS)
            .map(|(value, _)| value)
            .unwrap_or_else(|_| {
                if std::env::var_os("HNOMA_QUAD_DEBUG").is_some() {
                    eprintln!("inner fail at x={x:.12e}, y in [{y_lo:.12e},{y_hi:.12e}]");
                }
                f64::NAN
            })
    };
    let (value, err) = adaptive_gk15_left_graded(&outer, x_lo, x_hi, rel_tol, OUTER_SPLITS)?;
    if value.is_nan() {
        return Err(());
    }
    Ok((value, err))
}

/// Mass of one Lemma-1 region by adaptive quadrature.  The returned
/// estimate carries the integrator's error bound as `stderr`.
pub fn integrate_region(
    cfg: &SystemConfig,
    region: Region,
    rel_tol: f64,
) -> Result<ProbabilityEstimate, QuadratureError> {
    if !(1e-12..=1e-3).contains(&rel_tol) {
        return Err(QuadratureError::InvalidTolerance(rel_tol));
    }
    let spec = RegionSpec::new(cfg, region);
    let density = UvDensity::for_cfg(cfg);
    let mut value = 0.0;
    let mut error = 0.0;
    for panel in &spec.panels {
        let (v, e) = integrate_panel(cfg, panel, &density, rel_tol)
            .map_err(|_| QuadratureError::NonConvergence { region: region.label() })?;
        value += v;
        error += e;
    }
    Ok(ProbabilityEstimate::quadrature(value.max(0.0), error))
}

/// The full failure probability as the sum of the four region masses;
/// ground truth for the closed-form and asymptotic paths.
pub fn ptilde_quadrature(
    cfg: &SystemConfig,
    rel_tol: f64,
) -> Result<ProbabilityEstimate, QuadratureError> {
    let mut value = 0.0;
    let mut error = 0.0;
    for region in Region::ALL {
        let e = integrate_region(cfg, region, rel_tol)?;
        value += e.value;
        error += e.stderr;
    }
    Ok(ProbabilityEstimate::quadrature(value.min(1.0), error))
}

/// Integral of the joint order-statistic density over its whole support;
/// equals 1 up to integration error.
pub fn joint_pdf_normalization(
    users: usize,
    i: usize,
    j: usize,
) -> Result<f64, QuadratureError> {
    if i < 1 || j <= i || j > users {
        return Err(QuadratureError::BadIndices { users, i, j });
    }
    let coeff =
        factorial(users) / (factorial(i - 1) * factorial(j - i - 1) * factorial(users - j));
    let outer = |u: f64| -> f64 {
        adaptive_gk15(
            &|v: f64| {
                coeff
                    * u.powi(i as i32 - 1)
                    * (v - u).powi((j - i - 1) as i32)
                    * (1.0 - v).powi((users - j) as i32)
            },
            u,
            1.0,
            1e-12,
            INNER_SPLITS,
        )
        .map(|(value, _)| value)
        .unwrap_or(f64::NAN)
    };
    adaptive_gk15(&outer, 0.0, 1.0, 1e-11, OUTER_SPLITS)
        .map(|(v, _)| v)
        .map_err(|_| QuadratureError::NonConvergence { region: "normalization" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;
    use approx::assert_relative_eq;

    fn db(snr: f64) -> f64 {
        10f64.powf(snr / 10.0)
    }

    #[test]
    fn pdf_rejects_bad_arguments() {
        assert!(joint_order_stat_pdf(5, 3, 3, 0.1, 0.2).is_err());
        assert!(joint_order_stat_pdf(5, 0, 2, 0.1, 0.2).is_err());
        assert!(joint_order_stat_pdf(5, 1, 6, 0.1, 0.2).is_err());
        assert!(joint_order_stat_pdf(5, 1, 2, 0.3, 0.2).is_err());
    }

    #[test]
    fn pdf_two_user_case() {
        // M=2: f(x,y) = 2 e^{-x} e^{-y} on x <= y
        for (x, y) in [(0.0, 0.0), (0.3, 0.9), (1.5, 4.0)] {
            let expect = 2.0 * (-x - y as f64).exp();
            assert_relative_eq!(
                joint_order_stat_pdf(2, 1, 2, x, y).unwrap(),
                expect,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn pdf_normalizes_up_to_eight_users() {
        for users in 2..=8usize {
            for i in 1..users {
                for j in (i + 1)..=users {
                    let integral = joint_pdf_normalization(users, i, j).unwrap();
                    assert!(
                        (integral - 1.0).abs() <= 1e-9,
                        "normalization defect {} for (M,i,j)=({users},{i},{j})",
                        (integral - 1.0).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn marginal_recovered_from_joint() {
        // integrating out the lower coordinate must recover the j-th
        // order-statistic marginal
        let (users, i, j) = (6usize, 2usize, 5usize);
        let coeff = factorial(users)
            / (factorial(i - 1) * factorial(j - i - 1) * factorial(users - j));
        for y in [0.2, 0.9, 2.1] {
            let fy = cdf(y);
            let (joint_int, _) = adaptive_gk15(
                &|u: f64| coeff * u.powi(i as i32 - 1) * (fy - u).powi((j - i - 1) as i32),
                0.0,
                fy,
                1e-12,
                256,
            )
            .unwrap();
            let joint_marginal =
                joint_int * (1.0 - fy).powi((users - j) as i32) * (-y as f64).exp();
            let marginal = factorial(users) / (factorial(j - 1) * factorial(users - j))
                * fy.powi(j as i32 - 1)
                * (1.0 - fy).powi((users - j) as i32)
                * (-y as f64).exp();
            assert_relative_eq!(joint_marginal, marginal, max_relative = 1e-8);
        }
    }

    #[test]
    fn region_masses_match_reference() {
        // frozen 40-digit reference values for this configuration
        let cfg = SystemConfig::new(5, 2, 5, 1.0 / 3.0, db(20.0), db(20.0) / 5.0, 0.2).unwrap();
        let expect = [
            (Region::P11, 1.104551366423999e-9),
            (Region::P12, 4.2444448961154554e-9),
            (Region::P21, 8.861564262787229e-8),
            (Region::P22, 1.536411999996288e-8),
        ];
        for (region, reference) in expect {
            let est = integrate_region(&cfg, region, 1e-10).unwrap();
            assert_relative_eq!(est.value, reference, max_relative = 1e-8);
        }
        let total = ptilde_quadrature(&cfg, 1e-10).unwrap();
        assert_relative_eq!(total.value, 1.0932875889037462e-7, max_relative = 1e-8);
    }

    #[test]
    fn p11_empty_above_kappa1() {
        // m < n with eta > kappa1: the P11 region has no area
        let cfg = SystemConfig::new(5, 2, 5, 1.0 / 3.0, db(15.0), db(15.0) / 2.0, 1.0).unwrap();
        let k = derive_constants(&cfg);
        assert!(k.eta > k.kappa1);
        let est = integrate_region(&cfg, Region::P11, 1e-9).unwrap();
        assert!(est.value <= 1e-12, "P11 = {}", est.value);
    }

    #[test]
    fn p22_collapses_with_target_rate() {
        let cfg = SystemConfig::new(5, 2, 5, 1.0 / 3.0, db(15.0), db(15.0) / 5.0, 1e-6).unwrap();
        let est = integrate_region(&cfg, Region::P22, 1e-9).unwrap();
        assert!(est.value < 1e-10, "P22 = {}", est.value);
    }

    #[test]
    fn almost_sure_event_at_vanishing_beta() {
        let cfg = SystemConfig::new(5, 2, 5, 1e-6, db(15.0), db(15.0) / 5.0, 0.2).unwrap();
        let est = ptilde_quadrature(&cfg, 1e-9).unwrap();
        assert_relative_eq!(est.value, 1.0, max_relative = 1e-7);
    }

    #[test]
    fn finite_at_omega4_pole() {
        // eta exactly (1-beta)/beta^2: omega4 blows up but the probability
        // is continuous and the integrator never uses omega4 as a pole
        let beta = 1.0 / 3.0;
        let ratio = (1.0 - beta) / (beta * beta);
        let rho_n = db(15.0);
        let cfg = SystemConfig::new(5, 2, 5, beta, rho_n, rho_n / ratio, 1.0).unwrap();
        let est = ptilde_quadrature(&cfg, 1e-9).unwrap();
        assert!(est.value.is_finite() && (0.0..=1.0).contains(&est.value));
    }

    #[test]
    fn region_sum_within_unity() {
        let cfg = SystemConfig::new(4, 1, 3, 0.2, db(10.0), db(10.0) / 3.0, 0.5).unwrap();
        let sum: f64 = Region::ALL
            .iter()
            .map(|&r| integrate_region(&cfg, r, 1e-9).unwrap().value)
            .sum();
        assert!(sum <= 1.0 + 1e-9);
    }

    #[test]
    fn bounds_respect_order_support() {
        let cfg = SystemConfig::new(5, 2, 5, 1.0 / 3.0, db(15.0), db(15.0) / 5.0, 0.2).unwrap();
        let spec = RegionSpec::new(&cfg, Region::P21);
        let (lo, hi) = spec.x_support();
        let step = if hi.is_finite() { (hi - lo) / 37.0 } else { 0.5 };
        for k in 1..37 {
            let x = lo + step * k as f64;
            if let Some((y_lo, _)) = spec.y_bounds(x) {
                // m < n: inner variable lies above the outer one
                assert!(y_lo >= x.min(1e308), "lower bound {y_lo} below x={x}");
            }
        }
        // m > n: inner variable lies below the outer one
        let cfg = SystemConfig::new(5, 5, 2, 1.0 / 3.0, db(15.0), db(15.0) / 5.0, 0.2).unwrap();
        let spec = RegionSpec::new(&cfg, Region::P21);
        for k in 1..37 {
            let x = 0.01 + 0.3 * k as f64;
            if let Some((_, y_hi)) = spec.y_bounds(x) {
                assert!(y_hi <= x, "upper bound {y_hi} above x={x}");
            }
        }
    }

    #[test]
    fn tolerance_validation() {
        let cfg = SystemConfig::new(5, 2, 5, 0.3, 10.0, 2.0, 0.2).unwrap();
        assert!(matches!(
            integrate_region(&cfg, Region::P11, 1e-2),
            Err(QuadratureError::InvalidTolerance(_))
        ));
        assert!(matches!(
            integrate_region(&cfg, Region::P11, 1e-13),
            Err(QuadratureError::InvalidTolerance(_))
        ));
    }
}
