//! Scenario assembly from CLI flags and optional TOML config files.
//!
//! Flags override file values; the SNR convention is `SNR = rho_n` in dB
//! with unit noise power, and `rho_m` always derives from `--ratio`.

use anyhow::{bail, Context};
use hybrid_noma::{Method, SchemeKind, SystemConfig};
use serde::Deserialize;
use std::path::Path;

/// Partial scenario as read from a TOML file; all keys optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileScenario {
    pub users: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub rm: Option<f64>,
    pub snr_db: Option<f64>,
    pub ratio: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub methods: Option<String>,
    pub schemes: Option<String>,
}

impl FileScenario {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Flag-level scenario values shared by `eval` and `sweep`.
#[derive(Debug, Clone, clap::Args)]
pub struct ScenarioArgs {
    /// Total user count M
    #[arg(long)]
    pub users: Option<usize>,
    /// Legacy user order index (1-based)
    #[arg(long)]
    pub m: Option<usize>,
    /// Opportunistic user order index (1-based)
    #[arg(long)]
    pub n: Option<usize>,
    /// Power-reducing coefficient, in (0, 0.5)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Legacy target rate R_m in BPCU
    #[arg(long)]
    pub rm: Option<f64>,
    /// Opportunistic-user SNR in dB (rho_n; noise normalized to 1)
    #[arg(long)]
    pub snr_db: Option<f64>,
    /// Power ratio rho_n / rho_m
    #[arg(long)]
    pub ratio: Option<f64>,
    /// TOML scenario file; flags override its values
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl ScenarioArgs {
    /// Merge file + flags into a validated config plus the raw snr/ratio.
    pub fn resolve(&self) -> anyhow::Result<(SystemConfig, FileScenario)> {
        let file = match &self.config {
            Some(path) => FileScenario::load(path)?,
            None => FileScenario::default(),
        };
        let users = self.users.or(file.users).unwrap_or(5);
        let m = self.m.or(file.m).context("missing --m (legacy user index)")?;
        let n = self.n.or(file.n).context("missing --n (opportunistic user index)")?;
        let beta = self.beta.or(file.beta).context("missing --beta")?;
        let rm = self.rm.or(file.rm).context("missing --rm (target rate)")?;
        let snr_db = self.snr_db.or(file.snr_db).context("missing --snr-db")?;
        let ratio = self.ratio.or(file.ratio).context("missing --ratio (rho_n/rho_m)")?;
        if !(ratio > 0.0) {
            bail!("--ratio must be positive, got {ratio}");
        }
        let rho_n = db_to_linear(snr_db);
        let cfg = SystemConfig::new(users, m, n, beta, rho_n, rho_n / ratio, rm)?;
        Ok((cfg, file))
    }
}

pub fn parse_methods(spec: &str) -> anyhow::Result<Vec<Method>> {
    let mut out = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let method = match token {
            "mc" | "monte-carlo" | "monte_carlo" => Method::MonteCarlo,
            "closed" | "closed-form" | "closed_form" => Method::ClosedForm,
            "quad" | "quadrature" => Method::Quadrature,
            "asym" | "asymptotic" => Method::Asymptotic,
            other => bail!("unknown method '{other}' (expected mc, closed, quad or asym)"),
        };
        if !out.contains(&method) {
            out.push(method);
        }
    }
    if out.is_empty() {
        bail!("no methods selected");
    }
    Ok(out)
}

pub fn parse_schemes(spec: &str) -> anyhow::Result<Vec<SchemeKind>> {
    let mut out = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let scheme = match token {
            "hsic" => SchemeKind::HsicHybrid,
            "fsic" => SchemeKind::FsicHybrid,
            other => bail!("unknown scheme '{other}' (expected hsic or fsic)"),
        };
        if !out.contains(&scheme) {
            out.push(scheme);
        }
    }
    if out.is_empty() {
        bail!("no schemes selected");
    }
    Ok(out)
}

/// Default seed: `HYBRID_NOMA_SEED` when set, else a fixed constant.
pub fn default_seed() -> u64 {
    std::env::var("HYBRID_NOMA_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0x5EED_CA57)
}
