use serde::{Deserialize, Serialize};

use std::time::Instant;

use super::checks::{growth_ratios, GROWTH_Q};
use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::quadrature::QuadConfig;
use crate::specialfn::Dimension;
use crate::testfunctions::{loglog_profile, moser_profile, Gauge, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthMode {
    /// `(avg |u|^q)^(1/q)` against `q^(1-1/n) (int |grad u|^n)^(1/n)`.
    Trudinger,
    /// `(avg (|u| X2^(1/n))^q)^(1/q)` against `q^(1-1/n) I_n[u]^(1/n)`.
    LerayTrudinger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Largest ratio over the family and the `q` grid.
    pub constant: f64,
    /// Largest ratio over the family at each `q`.
    pub per_q: Vec<f64>,
    /// `(family index, q)` where the constant is attained.
    pub argmax: Option<(usize, f64)>,
    /// `(max - min) / max` of `per_q`.
    pub relative_range: f64,
}

/// Empirical constant `c(n)` of the `q^(1-1/n)` growth law over a family.
pub fn growth_fit(family: &[TestFunction], q_grid: &[f64], mode: GrowthMode, cfg: &QuadConfig) -> Result<GrowthFit> {
    if q_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidFamily("q grid must be increasing".into()));
    }
    let members: Vec<(usize, &TestFunction)> = family.iter().enumerate().filter(|(_, f)| !f.is_zero()).collect();
    if let Some((_, f)) = members.first() {
        let n = f.dim().as_f64();
        if let Some(&q) = q_grid.iter().find(|&&q| !(n + 1.0..=120.0).contains(&q)) {
            return Err(Error::domain("q", q, "[n + 1, 120]"));
        }
    }
    let mut per_q = vec![0.0f64; q_grid.len()];
    let mut argmax = None;
    let mut constant = 0.0f64;
    for (idx, f) in members {
        if f.gauge() != Gauge::U {
            return Err(Error::GaugeMismatch {
                expected: "u",
                found: f.gauge().name(),
            });
        }
        let ratios = growth_ratios(f, q_grid, mode == GrowthMode::LerayTrudinger, cfg)?;
        for (k, r) in ratios.into_iter().enumerate() {
            let r = if r.is_nan() { f64::INFINITY } else { r };
            per_q[k] = per_q[k].max(r);
            if r > constant {
                constant = r;
                argmax = Some((idx, q_grid[k]));
            }
        }
    }
    let max = per_q.iter().copied().fold(0.0, f64::max);
    let min = per_q.iter().copied().fold(f64::INFINITY, f64::min);
    let relative_range = if max > 0.0 { (max - min) / max } else { 0.0 };
    Ok(GrowthFit {
        constant,
        per_q,
        argmax,
        relative_range,
    })
}

/// Transition widths of the standard growth sweep.
pub const GROWTH_WIDTHS: [f64; 10] = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];

/// Concentrating families whose members realize the extremal growth at
/// different `q`: plateaus `S((t - t0)/L)` for the plain inequality and
/// `X1^(-1+1/n+delta) S((tau - tau0)/L)` for the logarithmic one.
pub fn growth_family(mode: GrowthMode, dim: Dimension) -> Vec<TestFunction> {
    GROWTH_WIDTHS
        .iter()
        .map(|&width| match mode {
            GrowthMode::Trudinger => TestFunction::radial(
                dim,
                moser_profile(1.0, width),
                Gauge::U,
                format!("kind=moser;width={width}"),
            ),
            GrowthMode::LerayTrudinger => {
                let delta = 0.1 / width.max(1.0);
                TestFunction::radial(
                    dim,
                    loglog_profile(dim, 1.0, width, delta),
                    Gauge::U,
                    format!("kind=loglog;width={width};delta={delta}"),
                )
            }
        })
        .collect()
}

impl GrowthMode {
    pub fn check_id(self) -> &'static str {
        match self {
            GrowthMode::Trudinger => "trudinger_growth",
            GrowthMode::LerayTrudinger => "lt_growth",
        }
    }
}

/// Family-level growth check: the largest ratio over [`growth_family`] at
/// each `q` of [`GROWTH_Q`] (those `>= n + 1`), judged by the ratio rule.
pub fn growth_check(mode: GrowthMode, dim: Dimension, cfg: &QuadConfig) -> Result<CheckReport> {
    let start = Instant::now();
    let id = mode.check_id();
    let family = growth_family(mode, dim);
    let label = format!(
        "family={};widths={}",
        if mode == GrowthMode::Trudinger { "moser" } else { "loglog" },
        GROWTH_WIDTHS.map(|w| w.to_string()).join("+")
    );
    let n = dim.as_f64();
    let qs: Vec<f64> = GROWTH_Q.iter().copied().filter(|&q| q >= n + 1.0).collect();
    let mut report = match growth_fit(&family, &qs, mode, cfg) {
        Ok(fit) => CheckReport::ratio(id, dim.get(), &label, &fit.per_q),
        Err(Error::Convergence { .. } | Error::NonFinite { .. }) => CheckReport::inconclusive(id, dim.get(), &label),
        Err(e) => return Err(e),
    };
    report.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}
