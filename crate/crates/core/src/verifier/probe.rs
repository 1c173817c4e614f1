use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{leray_functional, moser_functional};
use crate::quadrature::QuadConfig;
use crate::specialfn::{structural_constants, Dimension};
use crate::testfunctions::{make_family, FamilyKind, FamilyParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Diverging,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub dim: usize,
    pub family: FamilyKind,
    pub beta: f64,
    pub alpha: f64,
    pub eps_grid: Vec<f64>,
    /// Moser functional of `u_eps / I_n[u_eps]^(1/n)` along the grid.
    #[serde(with = "super::nonfinite::vec")]
    pub values: Vec<f64>,
    /// `I_n[u_eps]` along the grid.
    #[serde(with = "super::nonfinite::vec")]
    pub energies: Vec<f64>,
    pub overflow: Vec<bool>,
    pub verdict: Verdict,
    pub note: String,
}

const GROWTH_FACTOR: f64 = 10.0;
const PLATEAU: f64 = 0.05;

const WORDING_NOTE: &str = "raising the X2 exponent above 1/n only weakens the inequality since X2 <= 1; \
    the known failure regime is an exponent below 1/n, which is what divergence here refers to";

/// Follows the Moser functional along a degenerating family normalized to
/// `I_n = 1`.
///
/// Verdict: diverging if the capped integrand is reached or the values grow
/// by a factor 10 from the first to the last grid point; bounded if the last
/// three values agree within 5%; otherwise inconclusive. At or above the
/// proven threshold with `beta >= 1/n` the verdict is inconclusive unless the
/// values diverge.
pub fn sharpness_probe(
    dim: Dimension,
    beta: f64,
    alpha: f64,
    eps_grid: &[f64],
    family: FamilyKind,
    cfg: &QuadConfig,
) -> Result<ProbeReport> {
    if !(alpha > 0.0) {
        return Err(Error::domain("alpha", alpha, "(0, inf)"));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) || eps_grid.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidFamily(
            "eps grid must be strictly decreasing in (0, 1)".into(),
        ));
    }
    if !matches!(family, FamilyKind::HardyEps | FamilyKind::Loglog | FamilyKind::Moser) {
        return Err(Error::InvalidFamily(format!("{family} is not a degenerating family")));
    }
    let n = dim.as_f64();
    let mut values = Vec::with_capacity(eps_grid.len());
    let mut energies = Vec::with_capacity(eps_grid.len());
    let mut overflow = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let u = make_family(&FamilyParams::new(family, eps, 1.0), dim)?;
        let i = leray_functional(&u, cfg)?.value;
        if !(i > 0.0) {
            return Err(Error::Admissibility(format!("I_n = {i:e} is not positive at eps = {eps}")));
        }
        let m = moser_functional(&u.scaled(i.powf(-1.0 / n)), alpha, beta, cfg)?;
        values.push(m.value);
        energies.push(i);
        overflow.push(m.overflow);
    }

    let threshold = structural_constants(dim).moser_threshold;
    let open_regime = alpha >= threshold && beta >= 1.0 / n;
    let mut note = WORDING_NOTE.to_string();
    let verdict = if values.is_empty() {
        Verdict::Inconclusive
    } else if overflow.iter().any(|&o| o) || values[values.len() - 1] >= GROWTH_FACTOR * values[0] {
        Verdict::Diverging
    } else if open_regime {
        note.push_str("; alpha is at or above the proven threshold, where boundedness is open");
        Verdict::Inconclusive
    } else if values.len() >= 3 && {
        let tail = &values[values.len() - 3..];
        let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
        max <= (1.0 + PLATEAU) * min
    } {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    };
    Ok(ProbeReport {
        dim: dim.get(),
        family,
        beta,
        alpha,
        eps_grid: eps_grid.to_vec(),
        values,
        energies,
        overflow,
        verdict,
        note,
    })
}
