//! Report types serialized by the commands.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use optsample_core::leastsq::SpectralCertificate;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Serialized as null when infinite (singular Gram).
    pub stability_k: Option<f64>,
}

impl From<SpectralCertificate> for CertificateJson {
    fn from(c: SpectralCertificate) -> Self {
        Self {
            lambda_min: c.lambda_min,
            lambda_max: c.lambda_max,
            stability_k: c.stability_k.is_finite().then_some(c.stability_k),
        }
    }
}

/// One verifiable claim about a run: the named inequality held with the
/// given margin (bound minus attained value, oriented so positive = held).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GuaranteeCheck {
    pub name: String,
    pub holds: bool,
    pub margin: f64,
}

impl GuaranteeCheck {
    /// Check `value <= bound` (margin = bound - value).
    pub fn upper(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            holds: value <= bound + 1e-9,
            margin: bound - value,
        }
    }

    /// Check `value >= bound` (margin = value - bound).
    pub fn lower(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            holds: value >= bound - 1e-9,
            margin: value - bound,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateFit {
    /// Log-log least squares over the grid.
    Fitted {
        slope: f64,
        intercept: f64,
        r_squared: f64,
    },
    /// All errors at solver precision; no meaningful rate.
    Exact,
}

/// Fit the slope of log(error) against log(n); errors at rounding level are
/// reported as exact.
pub fn fit_rate(ns: &[f64], errors: &[f64]) -> RateFit {
    if errors.iter().all(|e| *e < 1e-12) {
        return RateFit::Exact;
    }
    let pairs: Vec<(f64, f64)> = ns
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(n, e)| (n.ln(), e.ln()))
        .collect();
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = pairs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = pairs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = pairs.iter().map(|(_, y)| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    RateFit::Fitted {
        slope,
        intercept: my - slope * mx,
        r_squared: if syy > 0.0 {
            sxy * sxy / (sxx * syy)
        } else {
            1.0
        },
    }
}

/// Report of one recovery run (or one method inside a benchmark).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub method: String,
    pub parameters: serde_json::Value,
    /// Estimated `L_p` errors keyed by the exponent ("2", "inf", ...).
    pub errors: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    pub guarantees: Vec<GuaranteeCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_fit: Option<RateFit>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub seed: u64,
    pub n: usize,
    pub target: serde_json::Value,
    pub reports: Vec<RecoveryReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatesReport {
    pub seed: u64,
    pub n_grid: Vec<usize>,
    pub target: serde_json::Value,
    pub reports: Vec<RecoveryReport>,
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
