//! Radial, spherical and Monte-Carlo integration on the unit ball.
//!
//! Radial integrals are computed in the coordinate
//!
//! ```text
//! tau = ln(1 - ln r) = -ln X1(r),    t = -ln r = e^tau - 1
//! ```
//!
//! In this variable powers of `X1` become exponentials, powers of `X2` become
//! powers of `1 + tau`, and the Lebesgue factor `r^(n-1) dr` turns into the
//! double exponential `exp(-n t + tau) dtau`. Logarithmic endpoint behaviour
//! at the origin therefore becomes ordinary exponential decay.

mod kronrod;
pub mod montecarlo;
pub mod sphere;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfn::Dimension;

pub use montecarlo::{mc_integrate, mc_integrate_many, mc_oracle, McShape};
pub use sphere::{integrate_sphere, SphereGrid, SpherePoint};

/// Radial weight `r^r_power * X1(r)^x1_power * X2(r)^x2_power`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightSpec {
    pub r_power: f64,
    pub x1_power: f64,
    pub x2_power: f64,
}

impl WeightSpec {
    pub const UNIT: WeightSpec = WeightSpec {
        r_power: 0.0,
        x1_power: 0.0,
        x2_power: 0.0,
    };

    pub fn new(r_power: f64, x1_power: f64, x2_power: f64) -> Self {
        WeightSpec {
            r_power,
            x1_power,
            x2_power,
        }
    }

    /// Logarithm of `weight(r) * r^(n-1) dr/dtau`, i.e. of the full radial
    /// measure expressed in `tau`.
    pub(crate) fn log_measure(&self, p: &RadialPoint, n: f64) -> f64 {
        self.log_measure_with(p, n - 1.0)
    }

    pub(crate) fn log_measure_with(&self, p: &RadialPoint, jacobian_power: f64) -> f64 {
        let decay = jacobian_power + 1.0 + self.r_power;
        let exp_part = if decay == 0.0 {
            0.0
        } else if p.t.is_infinite() {
            if decay > 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            -decay * p.t
        };
        let x2_part = if self.x2_power == 0.0 {
            0.0
        } else {
            -self.x2_power * p.tau.ln_1p()
        };
        exp_part + (1.0 - self.x1_power) * p.tau + x2_part
    }

    /// Evaluates the weight itself at radius `r`.
    pub fn eval(&self, r: f64) -> f64 {
        let p = RadialPoint::from_radius(r);
        let mut w = 1.0;
        if self.r_power != 0.0 {
            w *= r.powf(self.r_power);
        }
        if self.x1_power != 0.0 {
            w *= p.x1().powf(self.x1_power);
        }
        if self.x2_power != 0.0 {
            w *= p.x2().powf(self.x2_power);
        }
        w
    }
}

/// Integral estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub(crate) fn zero() -> Self {
        QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain("rel_tol", self.rel_tol, "(0, inf)"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::domain("abs_tol", self.abs_tol, "(0, inf)"));
        }
        Ok(())
    }
}

/// A radius in the unit ball, stored through its logarithmic depth.
///
/// `t = -ln r` may be infinite for very deep points; `tau = ln(1 + t)` is
/// always finite, so everything derived from `X1` and `X2` stays exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub tau: f64,
    pub t: f64,
}

impl RadialPoint {
    pub fn from_tau(tau: f64) -> Self {
        RadialPoint {
            tau,
            t: tau.exp_m1(),
        }
    }

    pub fn from_log_depth(t: f64) -> Self {
        RadialPoint { tau: t.ln_1p(), t }
    }

    pub fn from_radius(r: f64) -> Self {
        if r <= 0.0 {
            return RadialPoint {
                tau: f64::INFINITY,
                t: f64::INFINITY,
            };
        }
        let t = if r > 0.5 { -(r - 1.0).ln_1p() } else { -r.ln() };
        RadialPoint::from_log_depth(t.max(0.0))
    }

    pub fn r(&self) -> f64 {
        (-self.t).exp()
    }

    pub fn x1(&self) -> f64 {
        (-self.tau).exp()
    }

    pub fn x2(&self) -> f64 {
        1.0 / (1.0 + self.tau)
    }

    /// `ln t`, finite even when `t` itself overflows.
    pub(crate) fn ln_t(&self) -> f64 {
        if self.t.is_finite() {
            self.t.ln()
        } else {
            self.tau + (-(-self.tau).exp_m1()).ln()
        }
    }
}

/// Converts a radius to the integration coordinate.
pub fn tau_of_radius(r: f64) -> f64 {
    RadialPoint::from_radius(r).tau
}

const BASE_BREAKS: [f64; 24] = [
    0.0, 0.125, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0,
    96.0, 128.0, 192.0, 256.0, 384.0, 512.0, 700.0,
];

/// Distance past the deepest knot over which tails are resolved numerically.
const TAIL_MARGIN: f64 = 64.0;

/// Integrates `g(tau)` over `[lo, hi]` (with `hi` possibly infinite).
///
/// `knots` are interior points where the integrand is not smooth. For an
/// infinite upper end the integrand is resolved up to
/// `max(700, last knot + 64)`, and the remainder is added analytically when
/// the integrand is exactly exponential there.
pub(crate) fn integrate_tau<G>(mut g: G, lo: f64, hi: f64, knots: &[f64], cfg: &QuadConfig) -> Result<QuadResult>
where
    G: FnMut(&RadialPoint) -> Result<f64>,
{
    cfg.validate()?;
    let deepest = knots
        .iter()
        .copied()
        .filter(|k| k.is_finite())
        .fold(lo, f64::max);
    let end = if hi.is_finite() {
        hi
    } else {
        (deepest + TAIL_MARGIN).max(BASE_BREAKS[BASE_BREAKS.len() - 1])
    };
    if end <= lo {
        return Ok(QuadResult::zero());
    }
    let mut breaks: Vec<f64> = BASE_BREAKS
        .iter()
        .copied()
        .chain(knots.iter().copied())
        .chain([deepest + 16.0, deepest + 32.0])
        .filter(|x| *x > lo && *x < end)
        .collect();
    breaks.push(lo);
    breaks.push(end);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));

    let mut eval = |tau: f64| -> Result<f64> {
        let p = RadialPoint::from_tau(tau);
        let v = g(&p)?;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                location: format!("r = {:e} (tau = {tau})", p.r()),
            });
        }
        Ok(v)
    };

    let (tail, tail_error) = if hi.is_finite() {
        (0.0, 0.0)
    } else {
        exponential_tail(&mut eval, end, cfg)?
    };
    let mut res = kronrod::adaptive(&mut eval, &breaks, cfg, (tail, tail_error))?;
    res.value += tail;
    res.evaluations += 3;
    Ok(res)
}

/// Estimates `int_end^inf g`, assuming the integrand is exactly exponential
/// past the last knot.
fn exponential_tail<F>(eval: &mut F, end: f64, cfg: &QuadConfig) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let h = TAIL_MARGIN / 2.0;
    let g3 = eval(end)?;
    if g3 == 0.0 {
        return Ok((0.0, 0.0));
    }
    let g1 = eval(end - 2.0 * h)?;
    let g2 = eval(end - h)?;
    let same_sign = g1.signum() == g3.signum() && g2.signum() == g3.signum();
    if same_sign {
        let k1 = (g1 / g2).ln() / h;
        let k2 = (g2 / g3).ln() / h;
        if k1 > 0.0 && k2 > 0.0 && (k1 - k2).abs() <= 1e-6 * k2 {
            let tail = g3 / k2;
            let err = tail.abs() * ((k1 - k2).abs() / k2 + 1e-12);
            return Ok((tail, err));
        }
    }
    if g3.abs() * end < cfg.abs_tol {
        return Ok((0.0, g3.abs() * end));
    }
    Err(Error::Convergence {
        reason: format!("integrand does not decay past tau = {end} (value {g3:e})"),
        best: QuadResult {
            value: f64::NAN,
            error_estimate: f64::INFINITY,
            evaluations: 3,
        },
    })
}

/// `int_0^1 integrand(r) r^(n-1) weight(r) dr`.
pub fn integrate_radial<F>(integrand: F, weight: WeightSpec, dim: Dimension, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_radial_range(integrand, weight, dim.as_f64() - 1.0, (0.0, 1.0), &[], cfg)
}

/// `int_{r_lo}^{r_hi} integrand(r) r^jacobian_power weight(r) dr`.
///
/// `knots` are radii where the integrand has a kink or a jump in a low-order
/// derivative.
pub fn integrate_radial_range<F>(
    integrand: F,
    weight: WeightSpec,
    jacobian_power: f64,
    (r_lo, r_hi): (f64, f64),
    knots: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if !(0.0..=1.0).contains(&r_lo) || !(0.0..=1.0).contains(&r_hi) || r_lo > r_hi {
        return Err(Error::domain("radial range", r_lo, "0 <= r_lo <= r_hi <= 1"));
    }
    let lo = tau_of_radius(r_hi);
    let hi = tau_of_radius(r_lo);
    let tau_knots: Vec<f64> = knots.iter().map(|&r| tau_of_radius(r)).collect();
    integrate_tau(
        |p| {
            let lw = weight.log_measure_with(p, jacobian_power);
            if lw == f64::NEG_INFINITY {
                return Ok(0.0);
            }
            let f = integrand(p.r());
            if f == 0.0 {
                return Ok(0.0);
            }
            Ok(f * lw.exp())
        },
        lo,
        hi,
        &tau_knots,
        cfg,
    )
}
