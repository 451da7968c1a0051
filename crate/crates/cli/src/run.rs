//! Evaluation engines behind the CLI subcommands.

use crate::output::SweepRow;
use anyhow::bail;
use hybrid_noma::asymptotic::ptilde_joint_limit;
use hybrid_noma::closed_form::{ptilde_closed, ClosedFormError};
use hybrid_noma::constants::{classify_regime, derive_constants};
use hybrid_noma::mc::{mc_probability, SamplerSpec};
use hybrid_noma::quadrature::ptilde_quadrature;
use hybrid_noma::{Method, ProbabilityEstimate, SchemeKind, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Below this SNR the joint-limit approximation is flagged as extrapolated.
const EXTRAPOLATION_FLOOR_DB: f64 = 25.0;

#[derive(Clone, Debug)]
pub struct ComputeOptions {
    pub methods: Vec<Method>,
    pub schemes: Vec<SchemeKind>,
    pub samples: u64,
    pub seed: u64,
    pub quad_tol: f64,
}

fn regime_labels(cfg: &SystemConfig) -> (String, u32) {
    let regime = classify_regime(cfg, &derive_constants(cfg));
    (regime.table.label().to_string(), regime.column as u32)
}

/// Evaluate one grid point: a row per requested (scheme, method) pair.
/// FSIC has no closed form here, so only its Monte Carlo rows appear.
pub fn rows_for_point(
    cfg: &SystemConfig,
    axis: &str,
    axis_value: f64,
    opts: &ComputeOptions,
) -> Vec<SweepRow> {
    let (table, column) = regime_labels(cfg);
    let snr_db = 10.0 * cfg.rho_n.log10();
    let mut rows = Vec::new();
    let mut push = |scheme: SchemeKind, method: Method, est: Option<ProbabilityEstimate>, flags: String| {
        rows.push(SweepRow {
            axis: axis.to_string(),
            axis_value,
            scheme: scheme.label().to_string(),
            method: method.label().to_string(),
            probability: est.map(|e| e.value),
            stderr: est.map(|e| e.stderr),
            regime_table: table.clone(),
            regime_column: Some(column),
            flags,
        });
    };
    for &scheme in &opts.schemes {
        for &method in &opts.methods {
            match (scheme, method) {
                (_, Method::MonteCarlo) => {
                    let spec = SamplerSpec::with_defaults(opts.seed, opts.samples)
                        .expect("samples >= 1 enforced by flag parsing");
                    let est = mc_probability(cfg, scheme, &spec).expect("hybrid scheme");
                    push(scheme, method, Some(est), String::new());
                }
                (SchemeKind::HsicHybrid, Method::ClosedForm) => match ptilde_closed(cfg) {
                    Ok(b) => push(scheme, method, Some(b.estimate()), String::new()),
                    Err(e @ ClosedFormError::SingularRegime { .. }) => {
                        push(scheme, method, None, flag_for(&e))
                    }
                    Err(e) => push(scheme, method, None, flag_for(&e)),
                },
                (SchemeKind::HsicHybrid, Method::Quadrature) => {
                    match ptilde_quadrature(cfg, opts.quad_tol) {
                        Ok(est) => push(scheme, method, Some(est), String::new()),
                        Err(_) => push(scheme, method, None, "nonconvergence".into()),
                    }
                }
                (SchemeKind::HsicHybrid, Method::Asymptotic) => {
                    let est = ptilde_joint_limit(cfg);
                    let flags = if snr_db < EXTRAPOLATION_FLOOR_DB {
                        "extrapolated".to_string()
                    } else {
                        String::new()
                    };
                    push(scheme, method, Some(est), flags);
                }
                // no closed form / quadrature / asymptotics for FSIC
                (SchemeKind::FsicHybrid | SchemeKind::Oma, _) => {}
            }
        }
    }
    rows
}

fn flag_for(err: &ClosedFormError) -> String {
    match err {
        ClosedFormError::SingularRegime { .. } => "singular".into(),
        ClosedFormError::RangeViolation { .. } => "range_violation".into(),
        ClosedFormError::Domain { .. } => "domain".into(),
    }
}

// ---------------------------------------------------------------------------
// sweeps
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepAxis {
    /// rho_n in dB (rho_m follows the fixed ratio)
    SnrDb,
    /// power-reducing coefficient
    Beta,
    /// legacy target rate R_m
    Rm,
    /// rho_n / rho_m at fixed rho_n
    RhoRatio,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Beta => "beta",
            SweepAxis::Rm => "r_m",
            SweepAxis::RhoRatio => "rho_ratio",
        }
    }
}

/// Inclusive linear grid.
pub fn grid(start: f64, stop: f64, steps: usize) -> anyhow::Result<Vec<f64>> {
    if steps < 2 {
        bail!("need at least 2 steps, got {steps}");
    }
    if !(start < stop) {
        bail!("start must be below stop ({start} >= {stop})");
    }
    let h = (stop - start) / (steps - 1) as f64;
    Ok((0..steps).map(|i| start + h * i as f64).collect())
}

/// Apply one axis value to a template; errors mean the grid left the valid
/// configuration space.
pub fn apply_axis(
    template: &SystemConfig,
    axis: SweepAxis,
    value: f64,
) -> anyhow::Result<SystemConfig> {
    let ratio = template.eta();
    let cfg = match axis {
        SweepAxis::SnrDb => {
            let rho_n = crate::scenario::db_to_linear(value);
            SystemConfig::new(
                template.users,
                template.m,
                template.n,
                template.beta,
                rho_n,
                rho_n / ratio,
                template.r_m,
            )
        }
        SweepAxis::Beta => SystemConfig::new(
            template.users,
            template.m,
            template.n,
            value,
            template.rho_n,
            template.rho_m,
            template.r_m,
        ),
        SweepAxis::Rm => SystemConfig::new(
            template.users,
            template.m,
            template.n,
            template.beta,
            template.rho_n,
            template.rho_m,
            value,
        ),
        SweepAxis::RhoRatio => {
            if !(value > 0.0) {
                bail!("ratio grid value {value} not positive");
            }
            SystemConfig::new(
                template.users,
                template.m,
                template.n,
                template.beta,
                template.rho_n,
                template.rho_n / value,
                template.r_m,
            )
        }
    };
    Ok(cfg?)
}

/// One row per (grid point, scheme, method), written in axis order.
pub fn run_sweep(
    template: &SystemConfig,
    axis: SweepAxis,
    values: &[f64],
    opts: &ComputeOptions,
) -> anyhow::Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &value in values {
        let cfg = apply_axis(template, axis, value)?;
        rows.extend(rows_for_point(&cfg, axis.label(), value, opts));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ValidateRecord {
    pub index: u32,
    pub users: usize,
    pub m: usize,
    pub n: usize,
    pub beta: f64,
    pub r_m: f64,
    pub snr_db: f64,
    pub ratio: f64,
    pub regime_table: String,
    pub regime_column: u32,
    pub closed: f64,
    pub quadrature: f64,
    pub monte_carlo: f64,
    pub mc_stderr: f64,
    pub rel_closed_quad: f64,
    pub sigma_closed_mc: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidateReport {
    pub seed: u64,
    pub samples: u64,
    pub tol_rel: f64,
    pub sigma: f64,
    pub passed: u32,
    pub failed: u32,
    pub records: Vec<ValidateRecord>,
}

impl ValidateReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Draw a config from the validation space (resampling singular regimes),
/// then check the three-way agreement at the given tolerances.
pub fn run_validate(
    n_configs: u32,
    seed: u64,
    samples: u64,
    tol_rel: f64,
    sigma: f64,
) -> anyhow::Result<ValidateReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n_configs as usize);
    let mut index = 0;
    while index < n_configs {
        let users = [3usize, 4, 5, 6][rng.random_range(0..4)];
        let m = rng.random_range(1..=users);
        let n = rng.random_range(1..=users);
        if m == n {
            continue;
        }
        let beta = rng.random_range(0.05..0.45);
        let r_m = rng.random_range(0.1..2.0);
        let snr_db = rng.random_range(5.0..45.0);
        let ratio = rng.random_range(0.5..12.0);
        let rho_n = crate::scenario::db_to_linear(snr_db);
        let cfg = SystemConfig::new(users, m, n, beta, rho_n, rho_n / ratio, r_m)?;
        let closed = match ptilde_closed(&cfg) {
            Ok(b) => b,
            Err(ClosedFormError::SingularRegime { .. }) => continue,
            Err(e) => bail!("closed form failed on {cfg:?}: {e}"),
        };
        let quad = ptilde_quadrature(&cfg, 1e-9)?;
        let spec = SamplerSpec::with_defaults(seed.wrapping_add(1000 + index as u64), samples)?;
        let mc = mc_probability(&cfg, SchemeKind::HsicHybrid, &spec)?;
        let deep_tail = quad.value <= 1e-280 && closed.total <= 1e-280;
        let rel = if deep_tail {
            0.0
        } else {
            (closed.total - quad.value).abs() / quad.value.max(1e-280)
        };
        let sig = (mc.value - closed.total).abs() / mc.stderr.max(1e-12);
        let pass = rel <= tol_rel && sig <= sigma;
        records.push(ValidateRecord {
            index,
            users,
            m,
            n,
            beta,
            r_m,
            snr_db,
            ratio,
            regime_table: closed.regime.table.label().to_string(),
            regime_column: closed.regime.column as u32,
            closed: closed.total,
            quadrature: quad.value,
            monte_carlo: mc.value,
            mc_stderr: mc.stderr,
            rel_closed_quad: rel,
            sigma_closed_mc: sig,
            pass,
        });
        index += 1;
    }
    let passed = records.iter().filter(|r| r.pass).count() as u32;
    Ok(ValidateReport {
        seed,
        samples,
        tol_rel,
        sigma,
        passed,
        failed: n_configs - passed,
        records,
    })
}
