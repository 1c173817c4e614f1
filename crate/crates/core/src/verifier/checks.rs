use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::functionals::{
    evaluate, integrate_term, leray_functional, profile_log_energy, weighted_energy, weighted_lq_norm, Density,
    EnergyKind, Functional, Term,
};
use crate::quadrature::{integrate_radial, QuadConfig, RadialPoint, WeightSpec};
use crate::specialfn::{gamma_unchecked, structural_constants, vec_gap, Dimension, VecVariant};
use crate::testfunctions::{Gauge, TestFunction};

/// Every check id understood by [`check`].
pub const CHECK_IDS: [&str; 20] = [
    "hardy_n3",
    "leray_nonneg",
    "link",
    "link2",
    "link_eq_n2",
    "link2_eq_n2",
    "ft_identity",
    "onedim",
    "key_radial",
    "gamma_bound",
    "lq_presum",
    "holder_mean",
    "step1",
    "step2",
    "scalar_pow_super",
    "scalar_pow_sub",
    "vec",
    "vec_old",
    "trudinger_growth",
    "lt_growth",
];

pub const KEY_RADIAL_Q: [f64; 5] = [2.0, 5.0, 10.0, 20.0, 40.0];
pub const GROWTH_Q: [f64; 6] = [4.0, 8.0, 16.0, 32.0, 64.0, 120.0];
pub const DILATIONS: [f64; 4] = [1.0, 0.5, 0.25, 0.125];
pub const ONEDIM_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckClass {
    Inequality,
    Identity,
    Ratio,
}

pub fn check_class(check_id: &str) -> CheckClass {
    match check_id {
        "link_eq_n2" | "link2_eq_n2" | "ft_identity" => CheckClass::Identity,
        "step1" | "step2" | "trudinger_growth" | "lt_growth" => CheckClass::Ratio,
        _ => CheckClass::Inequality,
    }
}

/// Identities: relative tolerance. Inequalities: absolute slack on top of the
/// fixed `1e-8` relative slack. Ratio checks have their own 5% rule.
pub fn default_tolerance(check_id: &str) -> f64 {
    match check_class(check_id) {
        CheckClass::Identity => 1e-6,
        CheckClass::Inequality => 1e-12,
        CheckClass::Ratio => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckContext {
    /// Overrides [`default_tolerance`].
    pub tol: Option<f64>,
    pub seed: u64,
    pub cfg: QuadConfig,
    /// Random draws for the scalar and vector inequalities.
    pub random_pairs: usize,
}

impl Default for CheckContext {
    fn default() -> Self {
        CheckContext {
            tol: None,
            seed: 0,
            cfg: QuadConfig::default(),
            random_pairs: 1_000_000,
        }
    }
}

impl CheckContext {
    fn tol(&self, check_id: &str) -> f64 {
        self.tol.unwrap_or_else(|| default_tolerance(check_id))
    }
}

/// Runs one check on one field (in the `u` gauge; `ft_identity` reads the
/// field as the function `g` of the identity).
///
/// Quadrature failures give an inconclusive report; inadmissible inputs and
/// unknown ids are errors.
pub fn check(check_id: &str, f: &TestFunction, ctx: &CheckContext) -> Result<CheckReport> {
    let start = Instant::now();
    let dim = f.dim().get();
    let mut report = match run(check_id, f, ctx) {
        Ok(r) => r,
        Err(Error::Convergence { .. } | Error::NonFinite { .. }) => {
            CheckReport::inconclusive(check_id, dim, f.descriptor())
        }
        Err(e) => return Err(e),
    };
    report.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn require_u(f: &TestFunction) -> Result<()> {
    if f.gauge() == Gauge::U {
        Ok(())
    } else {
        Err(Error::GaugeMismatch {
            expected: "u",
            found: f.gauge().name(),
        })
    }
}

fn require_radial(f: &TestFunction, check_id: &str) -> Result<()> {
    if f.is_radial() {
        Ok(())
    } else {
        Err(Error::Admissibility(format!("{check_id} applies to radial fields")))
    }
}

fn require_n2(f: &TestFunction, check_id: &'static str) -> Result<()> {
    if f.dim().get() == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension {
            n: f.dim().get(),
            context: check_id,
        })
    }
}

fn run(id: &str, f: &TestFunction, ctx: &CheckContext) -> Result<CheckReport> {
    let dim = f.dim();
    let n = dim.as_f64();
    let desc = f.descriptor();
    let tol = ctx.tol(id);
    let cfg = &ctx.cfg;
    let consts = structural_constants(dim);
    match id {
        "leray_nonneg" => {
            require_u(f)?;
            let i = leray_functional(f, cfg)?;
            Ok(CheckReport::inequality(id, dim.get(), desc, 0.0, i.value, i.component("gradient"), tol))
        }
        "hardy_n3" => {
            require_u(f)?;
            let h = evaluate(f, Functional::Hardy, cfg)?;
            Ok(CheckReport::inequality(id, dim.get(), desc, 0.0, h.value, h.component("gradient"), tol))
        }
        "link" | "link2" | "link_eq_n2" | "link2_eq_n2" => {
            require_u(f)?;
            let (kind, c) = if id.starts_with("link2") {
                (EnergyKind::MixedLink2, consts.kappa_n)
            } else {
                (EnergyKind::GradNX1, consts.lambda_n)
            };
            let v = f.change_gauge(Gauge::V)?;
            let e = weighted_energy(&v, kind, cfg)?.value;
            let i = leray_functional(f, cfg)?;
            if id.ends_with("_eq_n2") {
                require_n2(f, if kind == EnergyKind::GradNX1 { "link_eq_n2" } else { "link2_eq_n2" })?;
                Ok(CheckReport::identity(id, dim.get(), desc, e, i.value, tol))
            } else {
                let scale = e.max(c * i.component("gradient"));
                Ok(CheckReport::inequality(id, dim.get(), desc, e, c * i.value, scale, tol))
            }
        }
        "ft_identity" => {
            let g = if f.gauge() == Gauge::W { f.clone() } else { f.relabel(Gauge::W) };
            let zeta = g.change_gauge(Gauge::Zeta)?;
            let lhs = evaluate(&zeta, Functional::Ft, cfg)?.value;
            let rhs = weighted_energy(&g, EnergyKind::FtWeight, cfg)?.value;
            Ok(CheckReport::identity(id, dim.get(), desc, lhs, rhs, tol))
        }
        "onedim" => {
            require_u(f)?;
            let g = f.change_gauge(Gauge::V)?.change_gauge(Gauge::W)?.spherical_mean();
            let lhs = onedim_sup(&g);
            let rhs = profile_log_energy(&g, cfg)?.value.max(0.0).sqrt();
            Ok(CheckReport::inequality(id, dim.get(), desc, lhs, rhs, 0.0, tol))
        }
        "key_radial" => {
            require_u(f)?;
            require_radial(f, id)?;
            let w = f.change_gauge(Gauge::V)?.change_gauge(Gauge::W)?;
            let energy = weighted_energy(&w, EnergyKind::FtWeight, cfg)?.value / consts.omega_n;
            worst_over_q(id, dim.get(), desc, &KEY_RADIAL_Q, tol, |q| {
                let lhs = weighted_lq_norm(f, q, 1.0 / n, cfg)?;
                let a = q * (n - 1.0) / n;
                let rhs = (n / q).exp() / n * gamma_unchecked(1.0 + a).powf(1.0 / q) * energy.max(0.0).powf(1.0 / n);
                Ok((lhs, rhs))
            })
        }
        "gamma_bound" => {
            let qs: Vec<f64> = (2..=100).map(f64::from).collect();
            worst_over_q(id, dim.get(), "weight=X1^-q(1-1/n)", &qs, tol, |q| {
                let a = q * (n - 1.0) / n;
                let lhs = n * integrate_radial(|_| 1.0, WeightSpec::new(0.0, -a, 0.0), dim, cfg)?.value;
                let rhs = n.exp() * n.powf(-a) * gamma_unchecked(1.0 + a);
                Ok((lhs, rhs))
            })
        }
        "lq_presum" => {
            require_u(f)?;
            require_radial(f, id)?;
            let i = leray_functional(f, cfg)?.value;
            let s = i.max(0.0).powf(1.0 / n).max(1.0);
            let c = (consts.kappa_n / (4.0 * consts.omega_n * n.powf(n - 2.0))).powf(1.0 / n);
            worst_over_q(id, dim.get(), desc, &KEY_RADIAL_Q, tol, |q| {
                let lhs = weighted_lq_norm(f, q, 1.0 / n, cfg)? / s;
                let a = q * (n - 1.0) / n;
                let rhs = (n / q).exp() * c * gamma_unchecked(1.0 + a).powf(1.0 / q);
                Ok((lhs, rhs))
            })
        }
        "holder_mean" => {
            require_u(f)?;
            let v = f.change_gauge(Gauge::V)?;
            let w = v.change_gauge(Gauge::W)?;
            let v0 = v.spherical_mean();
            let w0 = w.spherical_mean();
            let outer = f.outer_cut();
            let mut worst = f64::NEG_INFINITY;
            let mut scale: f64 = 0.0;
            for k in 1..=400 {
                let r = outer * k as f64 / 401.0;
                let a = v0.eval(r).abs();
                let b = w0.eval(r).max(0.0).powf(2.0 / n);
                worst = worst.max(a - b);
                scale = scale.max(a);
            }
            Ok(CheckReport::inequality(id, dim.get(), desc, worst, 0.0, scale, tol))
        }
        "step1" | "step2" => {
            require_u(f)?;
            let mut ratios = Vec::with_capacity(DILATIONS.len());
            for rho in DILATIONS {
                let u = f.dilated(rho)?;
                let v = u.change_gauge(Gauge::V)?;
                let (lhs, rhs) = if id == "step1" {
                    let w0 = v.change_gauge(Gauge::W)?.radial_part();
                    (
                        weighted_energy(&w0, EnergyKind::FtWeight, cfg)?.value,
                        weighted_energy(&v, EnergyKind::MixedLink2, cfg)?.value,
                    )
                } else {
                    let rest = u.without_radial_part()?;
                    let grad = Term {
                        name: "gradient",
                        coefficient: 1.0,
                        weight: WeightSpec::new(-n, 0.0, 0.0),
                        density: Density::Grad(n),
                    };
                    (
                        integrate_term(&rest, &grad, cfg)?.value,
                        weighted_energy(&v, EnergyKind::GradNX1, cfg)?.value,
                    )
                };
                ratios.push(lhs / rhs);
            }
            Ok(CheckReport::ratio(id, dim.get(), desc, &ratios))
        }
        "trudinger_growth" | "lt_growth" => {
            require_u(f)?;
            let qs: Vec<f64> = GROWTH_Q.iter().copied().filter(|&q| q >= n + 1.0).collect();
            let ratios = growth_ratios(f, &qs, id == "lt_growth", cfg)?;
            Ok(CheckReport::ratio(id, dim.get(), desc, &ratios))
        }
        "scalar_pow_super" | "scalar_pow_sub" | "vec" | "vec_old" => {
            let (label, gap) = random_min_gap(id, dim, ctx.seed, ctx.random_pairs)?;
            Ok(CheckReport::inequality(id, dim.get(), &label, 0.0, gap, 0.0, tol))
        }
        other => Err(Error::Parse(format!("unknown check id '{other}'"))),
    }
}

/// Evaluates an inequality at several `q` and reports the one with the
/// smallest relative margin.
fn worst_over_q<F>(id: &str, dim: usize, desc: &str, qs: &[f64], tol: f64, mut eval: F) -> Result<CheckReport>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let mut worst: Option<(f64, CheckReport)> = None;
    for &q in qs {
        let (lhs, rhs) = eval(q)?;
        let label = format!("{desc};q={q}");
        let r = CheckReport::inequality(id, dim, &label, lhs, rhs, 0.0, tol);
        let rel = r.relative_margin();
        let replace = match &worst {
            None => true,
            Some((w, best)) => {
                (r.status != best.status && r.status != super::Status::Pass) || (r.status == best.status && rel < *w)
            }
        };
        if replace {
            worst = Some((rel, r));
        }
    }
    Ok(worst.map(|(_, r)| r).unwrap_or_else(|| CheckReport::inconclusive(id, dim, desc)))
}

/// `sup_r |g(r)| X2(r)^(1/2)` over a grid that is uniform in `r` on one half
/// and uniform in `tau = ln(1 - ln r)` on the other, including `r = 0`.
fn onedim_sup(g: &crate::testfunctions::RadialProfile) -> f64 {
    let half = ONEDIM_GRID_POINTS / 2;
    let tau_max = g.knots().last().copied().unwrap_or(0.0).max(40.0) + 20.0;
    let mut sup: f64 = 0.0;
    let mut visit = |p: RadialPoint| {
        let v = g.jet(&p).actual_value().abs();
        if v > 0.0 {
            sup = sup.max(v * p.x2().sqrt());
        }
    };
    for k in 0..half {
        visit(RadialPoint::from_radius(k as f64 / (half - 1) as f64));
    }
    for k in 0..(ONEDIM_GRID_POINTS - half) {
        visit(RadialPoint::from_tau(tau_max * k as f64 / (ONEDIM_GRID_POINTS - half - 1) as f64));
    }
    sup
}

/// `norm(q) / (q^(1-1/n) energy^(1/n))` along a `q` grid: the plain `L^q` norm
/// against `int |grad u|^n`, or with `X2^(1/n)` against `I_n[u]`.
pub(crate) fn growth_ratios(u: &TestFunction, qs: &[f64], leray: bool, cfg: &QuadConfig) -> Result<Vec<f64>> {
    let n = u.dim().as_f64();
    let i = leray_functional(u, cfg)?;
    let energy = if leray { i.value } else { i.component("gradient") };
    let beta = if leray { 1.0 / n } else { 0.0 };
    qs.iter()
        .map(|&q| {
            let norm = weighted_lq_norm(u, q, beta, cfg)?;
            Ok(norm / (q.powf(1.0 - 1.0 / n) * energy.powf(1.0 / n)))
        })
        .collect()
}

fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.random_range(-3.0..3.0))
}

fn random_vector(rng: &mut ChaCha8Rng, len: usize, norm: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s > 1e-12 {
            return v.into_iter().map(|x| x * norm / s).collect();
        }
    }
}

/// Smallest normalized gap of a pointwise inequality over random draws.
///
/// Scalars: `kappa, lambda` log-uniform in `[1e-3, 1e3]`, `q` uniform in
/// `[1, 8]`, gaps divided by `(kappa + lambda)^q`. Vectors: `n_exp = n`,
/// ambient dimension cycling through 2..=6, gaps divided by
/// `(|a| + |b|)^n`.
pub(crate) fn random_min_gap(id: &str, dim: Dimension, seed: u64, draws: usize) -> Result<(String, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (dim.get() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut min = f64::INFINITY;
    let n_exp = dim.get();
    for k in 0..draws {
        let gap = match id {
            "scalar_pow_super" | "scalar_pow_sub" => {
                let (a, b) = (log_uniform(&mut rng), log_uniform(&mut rng));
                let q = rng.random_range(1.0..8.0);
                let s = (a + b).powf(q);
                let g = if id == "scalar_pow_super" {
                    s - a.powf(q) - b.powf(q)
                } else {
                    a.powf(q) + b.powf(q) - 2f64.powf(1.0 - q) * s
                };
                g / s
            }
            _ => {
                let len = 2 + k % 5;
                let sa = log_uniform(&mut rng);
                let a = random_vector(&mut rng, len, sa);
                let sb = log_uniform(&mut rng);
                let b = random_vector(&mut rng, len, sb);
                let variant = if id == "vec" {
                    VecVariant::Improved
                } else {
                    VecVariant::Classic
                };
                let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                vec_gap(&a, &b, n_exp, variant)? / (na + nb).powi(n_exp as i32)
            }
        };
        min = min.min(gap);
    }
    Ok((format!("random_draws={draws};seed={seed}"), min))
}
