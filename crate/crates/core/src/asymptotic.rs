//! High-SNR limiting behaviour: the joint-limit approximations of the
//! closed-form tables, the fixed-`rho_n` floors, the fixed-`rho_m`
//! opportunistic-power limits, and decay-exponent fitting.
//!
//! The joint-limit coefficients depend on the scenario only through
//! `(M, m, n, beta, eps_m, eta)`; the probability approximations attach the
//! `rho_m^{-n}` / `rho_m^{-m}` prefactors afterwards.  Two of the limit
//! constants never get a definition in the source analysis; they are
//! reconstructed as the scaled limits `varpi_2 = rho_m omega_2` and
//! `varpi_5 = rho_m omega_5`, which makes every expression dimensionless
//! and reproduces the exact tables term by term.

use crate::closed_form::{neg_pow, phi_dd, DdScenario};
use crate::config::SystemConfig;
use crate::constants::{binomial, classify_regime, derive_constants, Table};
use crate::dd::{Dd, LN2};
use crate::estimate::{Method, ProbabilityEstimate};
use thiserror::Error;

/// The `varpi` constants of the joint limit plus the leading m>n
/// coefficient; all functions of `(beta, eps_m, eta)` only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticConstants {
    pub varpi1: f64,
    pub varpi2: f64,
    pub varpi3: f64,
    pub varpi4: f64,
    pub varpi5: f64,
    pub varpi6: f64,
    pub varpi7: f64,
    /// `c_hat_n varpi_3^n / n`, the `rho_m^{-n}` coefficient of `P_1` for m>n.
    pub s_tilde: f64,
}

struct Varpis {
    eta: Dd,
    eps: Dd,
    beta: Dd,
    v: [Dd; 7],
}

fn varpis(cfg: &SystemConfig) -> Varpis {
    let beta = Dd::from_f64(cfg.beta);
    let one = Dd::ONE;
    let eps = (Dd::from_f64(cfg.r_m) * LN2).expm1();
    let eta = Dd::from_f64(cfg.rho_n) / Dd::from_f64(cfg.rho_m);
    let omb = one - beta;
    let tmb = one - beta.scale_pow2(2.0); // 1 - 2 beta
    let b2eta = beta * beta * eta;
    let v1 = (eps.recip() - beta * eta).recip();
    let v2 = omb * eps / beta;
    let v3 = tmb / b2eta;
    let v4 = tmb / (b2eta - omb);
    let v5 = omb * eps / (beta - omb * eps);
    let v6 = (omb * eps + tmb) / b2eta;
    let v7 = (v5 / eps - one) / (beta * eta);
    Varpis { eta, eps, beta, v: [v1, v2, v3, v4, v5, v6, v7] }
}

pub fn asymptotic_constants(cfg: &SystemConfig) -> AsymptoticConstants {
    let vp = varpis(cfg);
    let k = derive_constants(cfg);
    let s_tilde = Dd::from_f64(k.marginal_coeff_n) * vp.v[2].powi(cfg.n as u32)
        / Dd::from_f64(cfg.n as f64);
    AsymptoticConstants {
        varpi1: vp.v[0].to_f64(),
        varpi2: vp.v[1].to_f64(),
        varpi3: vp.v[2].to_f64(),
        varpi4: vp.v[3].to_f64(),
        varpi5: vp.v[4].to_f64(),
        varpi6: vp.v[5].to_f64(),
        varpi7: vp.v[6].to_f64(),
        s_tilde: s_tilde.to_f64(),
    }
}

/// Joint-limit table coefficients; everything in here is invariant under a
/// common scaling of the two transmit powers.
#[derive(Clone, Debug, PartialEq)]
pub enum JointLimitTerms {
    /// `T~_1 .. T~_7` for m < n.
    MLessN { t: [f64; 7] },
    /// `S~` and `Q~_1 .. Q~_10` for m > n.
    MGreaterN { s: f64, q: [f64; 10] },
}

fn t_tilde(cfg: &SystemConfig) -> [Dd; 7] {
    let vp = varpis(cfg);
    let k = derive_constants(cfg);
    let (users, m, n) = (cfg.users, cfg.m, cfg.n);
    let [v1, _, v3, v4, _, v6, v7] = vp.v;
    let (eps, eta, beta) = (vp.eps, vp.eta, vp.beta);
    let one = Dd::ONE;
    let omb = one - beta;
    let tmb = one - beta.scale_pow2(2.0);
    let beta_eta = beta * eta;
    let b2eta = beta * beta * eta;
    let cmn = k.joint_coeff;

    let mut t = [Dd::ZERO; 7];
    for p in 0..=(n - m - 1) {
        let bp = Dd::from_f64(cmn * binomial(n - m - 1, p) * neg_pow(p))
            / Dd::from_f64((m + p) as f64);
        let mp = (m + p) as u32;
        let pow_diff = |a: Dd, b: Dd, e: u32| (a.powi(e) - b.powi(e)) / Dd::from_f64(e as f64);

        // binomial inner sums shared across the entries
        let mut s_beta_31 = Dd::ZERO; // (beta eta)^{m+p-q} (v3^{n-q}-v1^{n-q})/(n-q)
        let mut s_beta_71 = Dd::ZERO; // (beta eta)^{m+p-q} (v7^{n-q}-v1^{n-q})/(n-q)
        let mut s_alt_46 = Dd::ZERO; // alternating, v4 vs v6
        let mut s_alt_76 = Dd::ZERO; // alternating, v7 vs v6
        let mut s_alt_63 = Dd::ZERO; // alternating, v6 vs v3
        let mut s_alt_43 = Dd::ZERO; // alternating, v4 vs v3
        for q in 0..=(m + p) {
            let ch = Dd::from_f64(binomial(m + p, q));
            let nq = (n - q) as u32;
            let bpow = beta_eta.powi((m + p - q) as u32);
            s_beta_31 += ch * bpow * pow_diff(v3, v1, nq);
            s_beta_71 += ch * bpow * pow_diff(v7, v1, nq);
            let alt = ch
                .mul_f64(neg_pow(q))
                .mul(tmb.powi(q as u32))
                .mul(b2eta.powi((m + p - q) as u32))
                .div(omb.powi(mp));
            s_alt_46 += alt * pow_diff(v4, v6, nq);
            s_alt_76 += alt * pow_diff(v7, v6, nq);
            s_alt_63 += alt * pow_diff(v6, v3, nq);
            s_alt_43 += alt * pow_diff(v4, v3, nq);
        }
        let eps_mp = eps.powi(mp);
        let mid = eps_mp * pow_diff(v6, eps, (n - m - p) as u32);

        t[0] += bp * (pow_diff(v3, v1, n as u32) - eps_mp * s_beta_31);
        t[3] += bp * (pow_diff(v4, eps, n as u32) - mid - s_alt_46);
        t[4] += bp * (pow_diff(v1, eps, n as u32) - mid + eps_mp * s_beta_71 - s_alt_76);
        t[5] += bp * (eps.powi(n as u32) / Dd::from_f64(n as f64) + mid - s_alt_63);
        t[6] += bp * (v4.powi(n as u32) / Dd::from_f64(n as f64) - s_alt_43);
    }
    // T~2 / T~3 keep the exact double-sum shape; their composites r and a
    // depend on the powers only through eta.
    for p in 0..=(n - m - 1) {
        let cp = binomial(n - m - 1, p) * neg_pow(n - m - 1 - p);
        let mmp = (users - m - p) as f64;
        for l in 0..=(m - 1) {
            let cl = binomial(m - 1, l) * neg_pow(l);
            let pre = Dd::from_f64(cmn * cp * cl) / Dd::from_f64(mmp);
            let lpp = (l + p + 1) as f64;
            let r = (beta * eps * eta).recip().mul_f64(mmp).add_f64(lpp);
            let a = (omb / (beta * beta * eta)).mul_f64(mmp).add_f64(lpp);
            t[1] += pre * (r.recip() - a.recip());
            t[2] += pre * (Dd::from_f64((users - m + l + 1) as f64).recip() - a.recip());
        }
    }
    t
}

fn q_tilde(cfg: &SystemConfig) -> (Dd, [Dd; 10]) {
    let vp = varpis(cfg);
    let k = derive_constants(cfg);
    let (users, m, n) = (cfg.users, cfg.m, cfg.n);
    let [v1, v2, v3, v4, v5, _, _] = vp.v;
    let (eps, eta, beta) = (vp.eps, vp.eta, vp.beta);
    let one = Dd::ONE;
    let omb = one - beta;
    let tmb = one - beta.scale_pow2(2.0);
    let beta_eta = beta * eta;
    let b2eta = beta * beta * eta;

    let s_tilde =
        Dd::from_f64(k.marginal_coeff_n) * v3.powi(n as u32) / Dd::from_f64(n as f64);

    let mut q = [Dd::ZERO; 10];
    for p in 0..=(m - n - 1) {
        let bp = Dd::from_f64(k.joint_coeff * binomial(m - n - 1, p) * neg_pow(p))
            / Dd::from_f64((n + p) as f64);
        let np = (n + p) as u32;
        let pow_diff = |a: Dd, b: Dd, e: u32| (a.powi(e) - b.powi(e)) / Dd::from_f64(e as f64);

        let mut s_inv_1e = Dd::ZERO; // (-1)^q (v1^{m-q}-eps^{m-q}) / ((beta eta)^{n+p} eps^{n+p-q} (m-q))
        let mut s_inv_2e = Dd::ZERO; // same with v2
        let mut s_inv_5e = Dd::ZERO; // same with v5
        let mut s_pos_54 = Dd::ZERO; // (1-2b)^q (1-b)^{n+p-q} (v5^{m-q}-v4^{m-q}) / ((b^2 eta)^{n+p}(m-q))
        let mut s_pos_5e = Dd::ZERO; // same, v5 vs eps
        let mut s_pos_e4 = Dd::ZERO; // same, eps vs v4
        for qi in 0..=(n + p) {
            let ch = Dd::from_f64(binomial(n + p, qi));
            let mq = (m - qi) as u32;
            let inv = ch.mul_f64(neg_pow(qi))
                / (beta_eta.powi(np) * eps.powi((n + p - qi) as u32));
            s_inv_1e += inv * pow_diff(v1, eps, mq);
            s_inv_2e += inv * pow_diff(v2, eps, mq);
            s_inv_5e += inv * pow_diff(v5, eps, mq);
            let pos = ch * tmb.powi(qi as u32) * omb.powi((n + p - qi) as u32)
                / b2eta.powi(np);
            s_pos_54 += pos * pow_diff(v5, v4, mq);
            s_pos_5e += pos * pow_diff(v5, eps, mq);
            s_pos_e4 += pos * pow_diff(eps, v4, mq);
        }

        q[0] += bp
            * (pow_diff(v3, v1, m as u32)
                - v3.powi(m as u32) / Dd::from_f64((m - n - p) as f64)
                + s_inv_1e);
        q[1] += bp
            * (s_inv_2e
                - v3.powi(np) * v2.powi((m - n - p) as u32) / Dd::from_f64((m - n - p) as f64));
        q[2] += bp * (pow_diff(v1, eps, m as u32) - s_inv_1e);
        q[6] += bp * (pow_diff(v4, eps, m as u32) + s_pos_54 - s_inv_5e);
        q[7] += bp * (s_pos_5e - s_inv_5e);
        q[8] += bp * eps.powi(m as u32) / Dd::from_f64(m as f64);
        q[9] += bp * (v4.powi(m as u32) / Dd::from_f64(m as f64) + s_pos_e4);
    }
    // Q~4 / Q~5 / Q~6 keep the exact double-sum shape.
    for p in 0..=(m - n - 1) {
        let cp = binomial(m - n - 1, p) * neg_pow(m - n - 1 - p);
        let z2 = (users - n - p) as f64;
        for l in 0..=(n - 1) {
            let cl = binomial(n - 1, l) * neg_pow(l);
            let lpp = (l + p + 1) as f64;
            let pre = Dd::from_f64(k.joint_coeff * cp * cl) / Dd::from_f64(lpp);
            let t = (beta * eps * eta).recip().mul_f64(lpp).add_f64(z2);
            let s = (omb / (beta * beta * eta)).mul_f64(lpp).add_f64(z2);
            q[3] += pre * (t.recip() - Dd::from_f64((users - n + l + 1) as f64).recip());
            let diff = t.recip() - s.recip();
            q[4] += pre * diff;
            q[5] += pre * diff;
        }
    }
    (s_tilde, q)
}

/// The scale-invariant coefficient set behind [`ptilde_joint_limit`].
pub fn joint_limit_terms(cfg: &SystemConfig) -> JointLimitTerms {
    if cfg.m < cfg.n {
        let t = t_tilde(cfg);
        JointLimitTerms::MLessN { t: t.map(Dd::to_f64) }
    } else {
        let (s, q) = q_tilde(cfg);
        JointLimitTerms::MGreaterN { s: s.to_f64(), q: q.map(Dd::to_f64) }
    }
}

/// Joint high-SNR approximation (`rho_n, rho_m -> inf` at fixed ratio),
/// assembled from the approximation rows of the tables.
///
/// Entries carrying no power prefactor are the non-vanishing floors; the
/// rest decay as `rho_m^{-n}` or `rho_m^{-m}`.
pub fn ptilde_joint_limit(cfg: &SystemConfig) -> ProbabilityEstimate {
    let regime = classify_regime(cfg, &derive_constants(cfg));
    let col = regime.column;
    let rho_m = Dd::from_f64(cfg.rho_m);
    let dec_n = rho_m.powi(cfg.n as u32).recip();
    let value = if cfg.m < cfg.n {
        let t = t_tilde(cfg);
        let (p1, p21, p22) = match regime.table {
            Table::I => (
                if col == 1 { t[0] * dec_n } else { Dd::ZERO },
                [t[1], t[1], t[2], t[3] * dec_n, Dd::ZERO][col - 1],
                [t[5], t[5], t[5], t[5], t[6]][col - 1] * dec_n,
            ),
            _ => (
                if col == 1 { t[0] * dec_n } else { Dd::ZERO },
                [t[4] * dec_n, t[4] * dec_n, t[3] * dec_n, Dd::ZERO][col - 1],
                [t[5], t[5], t[5], t[6]][col - 1] * dec_n,
            ),
        };
        (p1 + p21 + p22).to_f64()
    } else {
        let (s, q) = q_tilde(cfg);
        let dec_m = rho_m.powi(cfg.m as u32).recip();
        let p1 = s * dec_n + (if col == 1 { q[0] } else { q[1] }) * dec_m;
        let (p21, p22) = match regime.table {
            Table::III => (
                [q[2] * dec_m, q[2] * dec_m, q[3], q[4], q[5]][col - 1],
                [q[8], q[8], q[8], q[8], q[9]][col - 1] * dec_m,
            ),
            _ => (
                [q[2] * dec_m, q[2] * dec_m, q[6] * dec_m, q[7] * dec_m][col - 1],
                [q[8], q[8], q[8], q[9]][col - 1] * dec_m,
            ),
        };
        (p1 + p21 + p22).to_f64()
    };
    ProbabilityEstimate::exact(value.clamp(0.0, 1.0), Method::Asymptotic)
}

/// Non-zero limit of the failure probability as `rho_m -> inf` with `rho_n`
/// held at its configured value.
pub fn ptilde_floor_rho_m_inf(cfg: &SystemConfig) -> ProbabilityEstimate {
    let sc = DdScenario::new(cfg);
    let k = derive_constants(cfg);
    let (users, m, n) = (cfg.users, cfg.m, cfg.n);
    let zero = Dd::ZERO;
    let mut total = Dd::ZERO;
    if m < n {
        for p in 0..=(n - m - 1) {
            let cp = binomial(n - m - 1, p) * neg_pow(n - m - 1 - p);
            let mmp = (users - m - p) as f64;
            for l in 0..=(m - 1) {
                let cl = binomial(m - 1, l) * neg_pow(l);
                let pre = Dd::from_f64(k.joint_coeff * cp * cl) / Dd::from_f64(mmp);
                let z1 = Dd::from_f64((users - m + l + 1) as f64);
                let lpp = Dd::from_f64((l + p + 1) as f64);
                let dn = sc.w3.mul_f64(-mmp);
                total += pre * (phi_dd(zero, sc.w3, z1, zero) - phi_dd(zero, sc.w3, lpp, dn));
            }
        }
    } else {
        for p in 0..=(m - n - 1) {
            let cp = binomial(m - n - 1, p) * neg_pow(m - n - 1 - p);
            let z2 = (users - n - p) as f64;
            for l in 0..=(n - 1) {
                let cl = binomial(n - 1, l) * neg_pow(l);
                let lpp = (l + p + 1) as f64;
                let z1 = (users - n + l + 1) as f64;
                let pre = Dd::from_f64(k.joint_coeff * cp * cl) / Dd::from_f64(lpp);
                let gap = Dd::from_ratio(1.0, z2) - Dd::from_ratio(1.0, z1);
                let tail = (sc.w3.mul_f64(-z1)).expm1().neg();
                total += pre * gap * tail;
            }
        }
    }
    ProbabilityEstimate::exact(total.to_f64().clamp(0.0, 1.0), Method::Asymptotic)
}

/// Decay law as `rho_n -> inf` with `rho_m` held at its configured value.
pub fn ptilde_rho_n_inf(cfg: &SystemConfig) -> ProbabilityEstimate {
    let k = derive_constants(cfg);
    let beta = Dd::from_f64(cfg.beta);
    let one = Dd::ONE;
    let tmb = one - beta.scale_pow2(2.0);
    let rho_n = Dd::from_f64(cfg.rho_n);
    let (users, m, n) = (cfg.users, cfg.m, cfg.n);
    let value = if m < n {
        // proportional to ((1-2 beta)/beta^2)^n / rho_n^n
        let mut sum = Dd::ZERO;
        for p in 0..=(n - m - 1) {
            sum += Dd::from_f64(binomial(n - m - 1, p) * neg_pow(p) / (n - m - p) as f64)
                .mul(
                    Dd::from_ratio(1.0, (m + p) as f64) - Dd::from_ratio(1.0, n as f64),
                );
        }
        Dd::from_f64(k.joint_coeff)
            * sum
            * (tmb / (beta * beta)).powi(n as u32)
            * rho_n.powi(n as u32).recip()
    } else {
        let lead = Dd::from_f64(k.marginal_coeff_n / n as f64)
            * (tmb / (beta * beta)).powi(n as u32)
            * rho_n.powi(n as u32).recip();
        if !classify_regime(cfg, &k).eps_branch {
            lead
        } else {
            let sc = DdScenario::new(cfg);
            let rho_m = Dd::from_f64(cfg.rho_m);
            let mut outer = Dd::ZERO;
            for s in 0..=(m - n - 1) {
                let base = (users - m + 1 + s) as f64;
                let pre = Dd::from_f64(binomial(m - n - 1, s) * neg_pow(s) / n as f64)
                    * (sc.alpha.mul_f64(-base)).exp();
                let mut inner = Dd::ZERO;
                for i in 1..=n {
                    let coeff = Dd::from_f64(binomial(n, i))
                        * ((one - beta).powi(i as u32)
                            * rho_m.powi(i as u32)
                            * tmb.powi((n - i) as u32)
                            / beta.powi(2 * n as u32)
                            - sc.alpha.powi(i as u32).recip().mul_f64(neg_pow(n - i))
                                / beta.powi(n as u32));
                    let mut geom = sc.alpha.powi(i as u32) / Dd::from_f64(base);
                    let mut fall = 1.0;
                    for qq in 1..=i {
                        fall *= (i - qq + 1) as f64;
                        geom += sc
                            .alpha
                            .powi((i - qq) as u32)
                            .mul_f64(fall)
                            .div(Dd::from_f64(base).powi(qq as u32 + 1));
                    }
                    inner += coeff * geom;
                }
                inner += ((tmb / (beta * beta)).powi(n as u32)
                    - (beta.recip().neg()).powi(n as u32))
                .div(Dd::from_f64(base));
                outer += pre * inner;
            }
            outer * Dd::from_f64(k.joint_coeff) * rho_n.powi(n as u32).recip() + lead
        }
    };
    ProbabilityEstimate::exact(value.to_f64().clamp(0.0, 1.0), Method::Asymptotic)
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("probability at point {index} is not positive ({value})")]
    NonPositiveProbability { index: usize, value: f64 },
    #[error("SNR values must be strictly increasing")]
    NotIncreasing,
}

/// Least-squares slope of `log10(P)` against `log10(rho)` for points given
/// as `(SNR in dB, probability)`.  In a vanishing regime the slope estimates
/// minus the diversity order.
pub fn decay_exponent_fit(points: &[(f64, f64)]) -> Result<f64, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    for (index, &(_, p)) in points.iter().enumerate() {
        if !(p > 0.0) {
            return Err(FitError::NonPositiveProbability { index, value: p });
        }
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(FitError::NotIncreasing);
    }
    let n = points.len() as f64;
    let xs = points.iter().map(|&(snr, _)| snr / 10.0);
    let ys = points.iter().map(|&(_, p)| p.log10());
    let x_mean = xs.clone().sum::<f64>() / n;
    let y_mean = ys.clone().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.zip(ys) {
        num += (x - x_mean) * (y - y_mean);
        den += (x - x_mean) * (x - x_mean);
    }
    Ok(num / den)
}
