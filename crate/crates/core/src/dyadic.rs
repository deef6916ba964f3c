//! Divergence heuristic for improper integrals sampled over dyadic windows
//! `[2^k r₀, 2^{k+1} r₀]`.
//!
//! No finite computation decides whether `∫^∞ f` converges, so the test is
//! deliberately conservative and has an explicit inconclusive outcome:
//!
//! * three consecutive window ratios below [`GEOMETRIC_RATIO`] → converges;
//! * the last three windows non-decreasing → diverges;
//! * otherwise the increments are fitted to `Δ_k ∝ (log₂ r_k)^{-p}` over the
//!   second half of the windows; `p ≤ 1.4` → diverges, `p ≥ 1.75` →
//!   converges, anything in between is inconclusive.

use serde::Serialize;
use std::fmt;

pub const GEOMETRIC_RATIO: f64 = 0.9;
pub const MIN_WINDOWS: usize = 4;
const DIVERGENT_POWER: f64 = 1.4;
const CONVERGENT_POWER: f64 = 1.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converges => "converges",
            Verdict::Diverges => "diverges",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicReport {
    pub r0: f64,
    /// Integral over window `k`.
    pub increments: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Fitted decay power, when the ratio tests were not decisive.
    pub power: Option<f64>,
    pub verdict: Verdict,
}

/// Window edges `2^k r₀` for every complete window inside `[r₀, r_max]`.
pub fn window_edges(r0: f64, r_max: f64) -> Vec<f64> {
    let mut edges = vec![r0];
    let mut r = r0;
    while 2.0 * r <= r_max * (1.0 + 1e-12) {
        r *= 2.0;
        edges.push(r);
    }
    edges
}

/// Classifies the window increments of a nonnegative integrand.
pub fn classify(r0: f64, increments: Vec<f64>) -> DyadicReport {
    let ratios: Vec<f64> = increments.windows(2).map(|w| w[1] / w[0]).collect();
    let mut report = DyadicReport {
        r0,
        increments,
        ratios,
        power: None,
        verdict: Verdict::Inconclusive,
    };
    if report.increments.len() < MIN_WINDOWS || report.increments.iter().any(|d| !d.is_finite()) {
        return report;
    }
    let tail = &report.ratios[report.ratios.len() - 3..];
    if tail.iter().all(|&q| q < GEOMETRIC_RATIO) {
        report.verdict = Verdict::Converges;
        return report;
    }
    if tail.iter().all(|&q| q >= 1.0) {
        report.verdict = Verdict::Diverges;
        return report;
    }
    report.power = fit_power(r0, &report.increments);
    report.verdict = match report.power {
        Some(p) if p <= DIVERGENT_POWER => Verdict::Diverges,
        Some(p) if p >= CONVERGENT_POWER => Verdict::Converges,
        _ => Verdict::Inconclusive,
    };
    report
}

// Least-squares slope of ln Δ_k against ln log₂(r_mid), negated.
fn fit_power(r0: f64, increments: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = increments
        .iter()
        .enumerate()
        .skip(increments.len() / 2)
        .filter_map(|(k, &d)| {
            let lg = (r0 * 2f64.powf(k as f64 + 0.5)).log2();
            (lg > 1.0 && d > 0.0).then(|| (lg.ln(), d.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}
