//! Probability estimates tagged with their provenance.

use serde::{Deserialize, Serialize};

/// How a probability value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    MonteCarlo,
    ClosedForm,
    Quadrature,
    Asymptotic,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::MonteCarlo => "monte_carlo",
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::Asymptotic => "asymptotic",
        }
    }
}

/// A point probability with its uncertainty.
///
/// `stderr` is the binomial standard error for Monte Carlo estimates and the
/// integrator's error bound for quadrature; exact methods carry 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub method: Method,
}

impl ProbabilityEstimate {
    pub fn monte_carlo(hits: u64, n_samples: u64) -> Self {
        let n = n_samples as f64;
        let value = hits as f64 / n;
        // The plug-in formula reports zero uncertainty at the degenerate
        // outcomes; use the one-sided 3/N bound there so deep-tail (and
        // near-certain) estimates stay honest.
        let stderr = if hits == 0 || hits == n_samples {
            3.0 / n
        } else {
            (value * (1.0 - value) / n).sqrt()
        };
        Self { value, stderr, n_samples, method: Method::MonteCarlo }
    }

    pub fn exact(value: f64, method: Method) -> Self {
        Self { value, stderr: 0.0, n_samples: 0, method }
    }

    pub fn quadrature(value: f64, error_bound: f64) -> Self {
        Self { value, stderr: error_bound, n_samples: 0, method: Method::Quadrature }
    }

    /// True when `other` lies within `k` standard errors of this estimate
    /// (errors of both sides combined).
    pub fn agrees_with(&self, other: f64, k: f64) -> bool {
        (self.value - other).abs() <= k * self.stderr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_stderr() {
        let e = ProbabilityEstimate::monte_carlo(250, 1000);
        assert_eq!(e.value, 0.25);
        let expected = (0.25_f64 * 0.75 / 1000.0).sqrt();
        assert!((e.stderr - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_hit_surrogate() {
        let e = ProbabilityEstimate::monte_carlo(0, 1_000_000);
        assert_eq!(ProbabilityEstimate::monte_carlo(1_000_000, 1_000_000).stderr, 3.0 / 1.0e6);
        assert_eq!(e.value, 0.0);
        assert_eq!(e.stderr, 3.0 / 1.0e6);
    }
}
