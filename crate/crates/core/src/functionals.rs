//! Scalar functionals of test functions: the Hardy-Leray difference `I_n`,
//! the classical Hardy difference, the weighted energies, weighted `L^q`
//! norms, the FT difference and the exponential Moser functional.
//!
//! Every functional is a linear combination of [`Term`]s, each of which is
//! the integral of a homogeneous density of the field jet against a radial
//! weight. The same term list drives the deterministic quadrature and the
//! Monte-Carlo cross-check.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_tau, mc_integrate_many, tau_of_radius, McShape, QuadConfig, QuadResult, WeightSpec};
use crate::specialfn::Dimension;
use crate::testfunctions::{FieldJet, Gauge, RadialProfile, TestFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub quad_error: f64,
    /// Raw sub-integrals, before their coefficients are applied.
    pub components: BTreeMap<String, f64>,
}

impl FunctionalValue {
    pub fn component(&self, name: &str) -> f64 {
        self.components.get(name).copied().unwrap_or(f64::NAN)
    }
}

/// Pointwise density of a field jet; homogeneous of the given degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    /// `(dt^2 + |grad_theta|^2)^(p/2)`, i.e. `(r |grad f|)^p`.
    Grad(f64),
    /// `|f|^p`.
    Abs(f64),
    /// `|f|^(n-2) (dt^2 + |grad_theta|^2)`.
    MixedGrad(f64),
    /// `f` itself.
    Value,
}

impl Density {
    pub fn degree(self) -> f64 {
        match self {
            Density::Grad(p) | Density::Abs(p) | Density::MixedGrad(p) => p,
            Density::Value => 1.0,
        }
    }

    /// Sign and logarithm of the mantissa part, so that tiny mantissas
    /// paired with huge scales neither underflow nor overflow.
    fn log_mantissa(self, j: &FieldJet) -> Option<(f64, f64)> {
        let log_grad_sq = || j.log_gradient_sq();
        let log_abs = |p: f64| (j.value != 0.0).then(|| p * j.value.abs().ln());
        match self {
            Density::Grad(p) => log_grad_sq().map(|g| (1.0, 0.5 * p * g)),
            Density::Abs(p) => log_abs(p).map(|v| (1.0, v)),
            Density::MixedGrad(n) => {
                let g = log_grad_sq()?;
                if n == 2.0 {
                    Some((1.0, g))
                } else {
                    log_abs(n - 2.0).map(|v| (1.0, v + g))
                }
            }
            Density::Value => log_abs(1.0).map(|v| (j.value.signum(), v)),
        }
    }

    /// Density times `e^(degree scale + log_weight)`.
    fn eval(self, j: &FieldJet, log_weight: f64) -> f64 {
        match self.log_mantissa(j) {
            None => 0.0,
            Some((sign, lm)) => sign * (lm + self.degree() * j.scale + log_weight).exp(),
        }
    }
}

/// One sub-integral `coefficient * int density(f) weight dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub name: &'static str,
    pub coefficient: f64,
    pub weight: WeightSpec,
    pub density: Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyKind {
    /// `int |grad v|^n X1^(1-n)`.
    GradNX1,
    /// `int |x|^(2-n) |v|^(n-2) |grad v|^2 X1^-1`.
    MixedLink2,
    /// `int |x|^(2-n) |grad g|^2 X1^-1`.
    FtWeight,
}

impl EnergyKind {
    pub fn name(self) -> &'static str {
        match self {
            EnergyKind::GradNX1 => "grad_n_x1",
            EnergyKind::MixedLink2 => "mixed_link2",
            EnergyKind::FtWeight => "ft_weight",
        }
    }

    pub fn gauge(self) -> Gauge {
        match self {
            EnergyKind::GradNX1 | EnergyKind::MixedLink2 => Gauge::V,
            EnergyKind::FtWeight => Gauge::W,
        }
    }
}

impl FromStr for EnergyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grad_n_x1" => Ok(EnergyKind::GradNX1),
            "mixed_link2" => Ok(EnergyKind::MixedLink2),
            "ft_weight" => Ok(EnergyKind::FtWeight),
            other => Err(Error::Parse(format!("unknown energy kind '{other}'"))),
        }
    }
}

/// The functionals that are linear combinations of terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Leray,
    Hardy,
    Energy(EnergyKind),
    Ft,
    /// `int (|u| X2^beta)^q`, before normalization and the `1/q` power.
    LqPower { q: f64, beta: f64 },
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::Leray => f.write_str("leray"),
            Functional::Hardy => f.write_str("hardy"),
            Functional::Energy(k) => write!(f, "energy:{}", k.name()),
            Functional::Ft => f.write_str("ft"),
            Functional::LqPower { q, beta } => write!(f, "lq_power:q={q}:beta={beta}"),
        }
    }
}

impl Functional {
    /// Gauge the field must carry, if any.
    pub fn gauge(self) -> Option<Gauge> {
        match self {
            Functional::Leray | Functional::Hardy | Functional::LqPower { .. } => Some(Gauge::U),
            Functional::Energy(k) => Some(k.gauge()),
            Functional::Ft => None,
        }
    }

    pub fn terms(self, dim: Dimension) -> Vec<Term> {
        let n = dim.as_f64();
        match self {
            Functional::Leray => vec![
                Term {
                    name: "gradient",
                    coefficient: 1.0,
                    weight: WeightSpec::new(-n, 0.0, 0.0),
                    density: Density::Grad(n),
                },
                Term {
                    name: "hardy",
                    coefficient: -((n - 1.0) / n).powf(n),
                    weight: WeightSpec::new(-n, n, 0.0),
                    density: Density::Abs(n),
                },
            ],
            Functional::Hardy => vec![
                Term {
                    name: "gradient",
                    coefficient: 1.0,
                    weight: WeightSpec::new(-2.0, 0.0, 0.0),
                    density: Density::Grad(2.0),
                },
                Term {
                    name: "hardy",
                    coefficient: -((n - 2.0) / n).powi(2),
                    weight: WeightSpec::new(-2.0, 0.0, 0.0),
                    density: Density::Abs(2.0),
                },
            ],
            Functional::Energy(EnergyKind::GradNX1) => vec![Term {
                name: "energy",
                coefficient: 1.0,
                weight: WeightSpec::new(-n, 1.0 - n, 0.0),
                density: Density::Grad(n),
            }],
            Functional::Energy(EnergyKind::MixedLink2) => vec![Term {
                name: "energy",
                coefficient: 1.0,
                weight: WeightSpec::new(-n, -1.0, 0.0),
                density: Density::MixedGrad(n),
            }],
            Functional::Energy(EnergyKind::FtWeight) => vec![Term {
                name: "energy",
                coefficient: 1.0,
                weight: WeightSpec::new(-n, -1.0, 0.0),
                density: Density::Grad(2.0),
            }],
            Functional::Ft => vec![
                Term {
                    name: "gradient",
                    coefficient: 1.0,
                    weight: WeightSpec::new(-2.0, 0.0, 0.0),
                    density: Density::Grad(2.0),
                },
                Term {
                    name: "hardy",
                    coefficient: -((n - 2.0) / 2.0).powi(2),
                    weight: WeightSpec::new(-2.0, 0.0, 0.0),
                    density: Density::Abs(2.0),
                },
                Term {
                    name: "log_remainder",
                    coefficient: -0.25,
                    weight: WeightSpec::new(-2.0, 2.0, 0.0),
                    density: Density::Abs(2.0),
                },
            ],
            Functional::LqPower { q, beta } => vec![Term {
                name: "lq_power",
                coefficient: 1.0,
                weight: WeightSpec::new(0.0, 0.0, q * beta),
                density: Density::Abs(q),
            }],
        }
    }

    fn validate(self, f: &TestFunction) -> Result<()> {
        if let Some(g) = self.gauge() {
            if f.gauge() != g {
                return Err(Error::GaugeMismatch {
                    expected: g.name(),
                    found: f.gauge().name(),
                });
            }
        }
        match self {
            Functional::Hardy if f.dim().get() < 3 => Err(Error::UnsupportedDimension {
                n: f.dim().get(),
                context: "the classical Hardy difference (n >= 3)",
            }),
            Functional::Ft if !(f.inner_cut() > 0.0) && !f.is_zero() => Err(Error::Admissibility(
                "the FT difference needs a field vanishing near the origin".into(),
            )),
            Functional::LqPower { q, .. } if !(q >= 1.0) => Err(Error::domain("q", q, "[1, inf)")),
            _ => Ok(()),
        }
    }
}

fn tau_range(f: &TestFunction) -> (f64, f64) {
    let lo = tau_of_radius(f.outer_cut().min(1.0));
    let inner = f.inner_cut();
    let hi = if inner > 0.0 && inner < 1.0 {
        tau_of_radius(inner)
    } else {
        f64::INFINITY
    };
    (lo, hi)
}

/// `int_B density(f) weight dx` by tensor quadrature (log-depth times sphere
/// grid). For radial fields this is exactly `n omega_n` times the radial
/// integral.
pub fn integrate_term(f: &TestFunction, term: &Term, cfg: &QuadConfig) -> Result<QuadResult> {
    if f.is_zero() || f.outer_cut() <= 0.0 {
        return Ok(QuadResult::zero());
    }
    if !f.is_radial() {
        f.dim().require_nonradial("nonradial ball integrals (n in {2, 3})")?;
    }
    let n = f.dim().as_f64();
    let (lo, hi) = tau_range(f);
    integrate_tau(
        |p| {
            let lw = term.weight.log_measure(p, n);
            if lw == f64::NEG_INFINITY {
                return Ok(0.0);
            }
            f.shell_sum(p, |j| term.density.eval(j, lw))
        },
        lo,
        hi,
        &f.knots(),
        cfg,
    )
}

/// Monte-Carlo estimate of the same integral as [`integrate_term`].
pub fn mc_term(f: &TestFunction, term: &Term, samples: usize, seed: u64) -> Result<QuadResult> {
    Ok(mc_terms(f, std::slice::from_ref(term), samples, seed)?.remove(0))
}

/// Monte-Carlo estimates of several terms from shared samples.
pub fn mc_terms(f: &TestFunction, terms: &[Term], samples: usize, seed: u64) -> Result<Vec<QuadResult>> {
    Ok(mc_terms_shared(&[(f, terms)], samples, seed)?.remove(0))
}

/// Monte-Carlo estimates of terms on several pointwise transforms of one
/// field (see [`TestFunction::shares_synthesis`]), sharing the samples and
/// the synthesis at each sample.
pub fn mc_terms_shared(fields: &[(&TestFunction, &[Term])], samples: usize, seed: u64) -> Result<Vec<Vec<QuadResult>>> {
    let Some(&(first, _)) = fields.first() else {
        return Ok(Vec::new());
    };
    if let Some((f, _)) = fields.iter().find(|(f, _)| !first.shares_synthesis(f)) {
        return Err(Error::Admissibility(format!(
            "'{}' is not a pointwise transform of '{}'",
            f.descriptor(),
            first.descriptor()
        )));
    }
    let dim = first.dim();
    let n = dim.as_f64();
    let outer = first.outer_cut();
    let inner = first.inner_cut();
    let shapes: Vec<McShape> = fields
        .iter()
        .flat_map(|(_, terms)| terms.iter().map(|t| McShape::from_weight(&t.weight, dim)))
        .collect();
    let flat = mc_integrate_many(
        |p, s, out| {
            let r = p.r();
            if r >= outer || (inner > 0.0 && r <= inner) {
                return;
            }
            let base = first.synthesis_jet(p, s);
            let mut k = 0;
            for (f, terms) in fields {
                let jet = f.finish_jet(base, p);
                for term in terms.iter() {
                    let lw = term.weight.log_measure(p, n) - p.tau;
                    if lw != f64::NEG_INFINITY {
                        out[k] = term.density.eval(&jet, lw);
                    }
                    k += 1;
                }
            }
        },
        shapes.len(),
        dim,
        &shapes,
        samples,
        seed,
    )?;
    let mut it = flat.into_iter();
    Ok(fields.iter().map(|(_, terms)| it.by_ref().take(terms.len()).collect()).collect())
}

/// `int_B f(x) weight(|x|) dx`.
pub fn integrate_ball(f: &TestFunction, weight: WeightSpec, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_term(
        f,
        &Term {
            name: "ball",
            coefficient: 1.0,
            weight,
            density: Density::Value,
        },
        cfg,
    )
}

/// Evaluates a functional term by term.
pub fn evaluate(f: &TestFunction, functional: Functional, cfg: &QuadConfig) -> Result<FunctionalValue> {
    functional.validate(f)?;
    let mut out = FunctionalValue {
        value: 0.0,
        quad_error: 0.0,
        components: BTreeMap::new(),
    };
    for term in functional.terms(f.dim()) {
        let r = integrate_term(f, &term, cfg)?;
        out.value += term.coefficient * r.value;
        out.quad_error += term.coefficient.abs() * r.error_estimate;
        out.components.insert(term.name.to_string(), r.value);
    }
    Ok(out)
}

/// Per-term Monte-Carlo estimates, keyed like [`FunctionalValue::components`].
pub fn mc_components(
    f: &TestFunction,
    functional: Functional,
    samples: usize,
    seed: u64,
) -> Result<BTreeMap<String, QuadResult>> {
    functional.validate(f)?;
    let terms = functional.terms(f.dim());
    let results = mc_terms(f, &terms, samples, seed)?;
    Ok(terms.iter().map(|t| t.name.to_string()).zip(results).collect())
}

/// `I_n[u] = int |grad u|^n - ((n-1)/n)^n int |u|^n |x|^-n X1^n`.
pub fn leray_functional(u: &TestFunction, cfg: &QuadConfig) -> Result<FunctionalValue> {
    evaluate(u, Functional::Leray, cfg)
}

/// `int |grad u|^2 - ((n-2)/n)^2 int |u|^2 / |x|^2`, for `n >= 3`.
pub fn hardy_difference(u: &TestFunction, cfg: &QuadConfig) -> Result<FunctionalValue> {
    evaluate(u, Functional::Hardy, cfg)
}

pub fn weighted_energy(f: &TestFunction, kind: EnergyKind, cfg: &QuadConfig) -> Result<FunctionalValue> {
    evaluate(f, Functional::Energy(kind), cfg)
}

/// `int |grad f|^2 - ((n-2)/2)^2 int f^2/|x|^2 - 1/4 int f^2/|x|^2 X1^2` for
/// `f` vanishing near the origin.
pub fn ft_difference(f: &TestFunction, cfg: &QuadConfig) -> Result<FunctionalValue> {
    evaluate(f, Functional::Ft, cfg)
}

/// `(avg_B (|u| X2^beta)^q)^(1/q)` with the average taken over the unit ball.
pub fn weighted_lq_norm(u: &TestFunction, q: f64, beta: f64, cfg: &QuadConfig) -> Result<f64> {
    let v = evaluate(u, Functional::LqPower { q, beta }, cfg)?;
    Ok((v.value / u.dim().unit_ball_volume()).max(0.0).powf(1.0 / q))
}

/// Integrands of the Moser functional are capped at this log-value.
pub const MOSER_LOG_CAP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoserValue {
    pub value: f64,
    pub quad_error: f64,
    /// Set when the capped integrand was reached somewhere; the value is
    /// then a lower bound.
    pub overflow: bool,
}

/// `avg_B exp(alpha (|u| X2^beta)^(n/(n-1)))`.
pub fn moser_functional(u: &TestFunction, alpha: f64, beta: f64, cfg: &QuadConfig) -> Result<MoserValue> {
    if !(alpha > 0.0) {
        return Err(Error::domain("alpha", alpha, "(0, inf)"));
    }
    if u.gauge() != Gauge::U {
        return Err(Error::GaugeMismatch {
            expected: "u",
            found: u.gauge().name(),
        });
    }
    let dim = u.dim();
    let n = dim.as_f64();
    let omega = dim.unit_ball_volume();
    if u.is_zero() {
        return Ok(MoserValue {
            value: 1.0,
            quad_error: 0.0,
            overflow: false,
        });
    }
    if !u.is_radial() {
        dim.require_nonradial("nonradial ball integrals (n in {2, 3})")?;
    }
    let gamma = n / (n - 1.0);
    let ln_alpha = alpha.ln();
    let overflow = Cell::new(false);
    let density = |j: &FieldJet, p: &crate::quadrature::RadialPoint, lm: f64| -> f64 {
        let a = j.value.abs();
        if a == 0.0 {
            return 0.0;
        }
        let x2_part = if beta == 0.0 { 0.0 } else { beta * p.tau.ln_1p() };
        let ln_phi = ln_alpha + gamma * (a.ln() + j.scale - x2_part);
        if lm == f64::NEG_INFINITY {
            // only the comparison of phi with n t matters this deep
            if ln_phi > n.ln() + p.ln_t() {
                overflow.set(true);
                return MOSER_LOG_CAP.exp();
            }
            return 0.0;
        }
        let phi = ln_phi.exp();
        let e = phi + lm;
        if !(e <= MOSER_LOG_CAP) {
            overflow.set(true);
            return MOSER_LOG_CAP.exp();
        }
        if phi > 40.0 {
            e.exp()
        } else {
            phi.exp_m1() * lm.exp()
        }
    };
    let (lo, hi) = tau_range(u);
    let res = integrate_tau(
        |p| {
            let lm = WeightSpec::UNIT.log_measure(p, n);
            u.shell_sum(p, |j| density(j, p, lm))
        },
        lo,
        hi,
        &u.knots(),
        cfg,
    );
    match res {
        Ok(r) => Ok(MoserValue {
            value: 1.0 + r.value / omega,
            quad_error: r.error_estimate / omega,
            overflow: overflow.get(),
        }),
        Err(Error::Convergence { best, .. }) if overflow.get() => Ok(MoserValue {
            value: if best.value.is_finite() {
                1.0 + best.value / omega
            } else {
                MOSER_LOG_CAP.exp()
            },
            quad_error: f64::INFINITY,
            overflow: true,
        }),
        Err(e) => Err(e),
    }
}

/// `int_0^1 t g'(t)^2 X1(t)^-1 dt` for a radial profile `g`.
pub fn profile_log_energy(g: &RadialProfile, cfg: &QuadConfig) -> Result<QuadResult> {
    if g.is_zero() {
        return Ok(QuadResult::zero());
    }
    // dt = X1 dtau = -r g'(r): the density is dt^2 r^-2 against r dr X1^-1
    let weight = WeightSpec::new(-2.0, -1.0, 0.0);
    let lo = tau_of_radius(g.outer_cut.min(1.0));
    let hi = if g.inner_cut > 0.0 {
        tau_of_radius(g.inner_cut)
    } else {
        f64::INFINITY
    };
    integrate_tau(
        |p| {
            let j = g.jet(p);
            if j.dtau == 0.0 {
                return Ok(0.0);
            }
            let lw = weight.log_measure_with(p, 1.0);
            Ok((2.0 * (j.dtau.abs().ln() - p.tau + j.scale) + lw).exp())
        },
        lo,
        hi,
        &g.knots(),
        cfg,
    )
}
