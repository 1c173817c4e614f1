//! Stratified Monte-Carlo integration over the unit ball.
//!
//! The radial variable is sampled in the depth `t = -ln r` from a defensive
//! mixture: the uniform-ball law `n e^(-n t)`, an exponential matched to the
//! weight's own decay, a Gamma law matched to growing `X1` powers, and a
//! polynomial tail `gamma (1+t)^(-1-gamma)` that keeps the variance finite
//! for integrands with logarithmic mass near the origin. Each component is
//! stratified in its uniform variate, and the estimator is the usual
//! stratified mean of `f / p_mix`, so it is unbiased and its standard error
//! is computed from within-stratum variances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use super::{QuadResult, RadialPoint, SpherePoint, WeightSpec};
use crate::error::{Error, Result};
use crate::specialfn::{ln_gamma_unchecked, Dimension};

const TAIL_INDEX: f64 = 0.2;
const SAMPLES_PER_STRATUM: usize = 8;
const STRATA_PER_CHUNK: usize = 512;

/// Shape hints for the radial proposal: the integrand behaves like
/// `e^(-decay t) (1+t)^(-x1_power)` in the depth variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McShape {
    pub decay: f64,
    pub x1_power: f64,
}

impl McShape {
    pub fn from_weight(weight: &WeightSpec, dim: Dimension) -> Self {
        McShape {
            decay: dim.as_f64() + weight.r_power,
            x1_power: weight.x1_power,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Component {
    Exponential { rate: f64, ln_rate: f64 },
    PowerTail,
    Gamma { rate: f64, shape: f64, ln_norm: f64 },
}

impl Component {
    /// Log-density at depth `p.t`; `p.tau = ln(1 + t)`.
    fn ln_pdf(&self, p: &RadialPoint) -> f64 {
        match *self {
            Component::Exponential { rate, ln_rate } => ln_rate - rate * p.t,
            Component::PowerTail => TAIL_INDEX.ln() - (1.0 + TAIL_INDEX) * p.tau,
            Component::Gamma { rate, shape, ln_norm } => {
                ln_norm + (shape - 1.0) * (rate.ln() + p.tau) - rate * (1.0 + p.t)
            }
        }
    }

    /// Maps a uniform variate in (0, 1] to a depth. `None` for the Gamma law,
    /// which is sampled directly.
    fn quantile(&self, u: f64) -> Option<f64> {
        match *self {
            Component::Exponential { rate, .. } => Some(-u.ln() / rate),
            Component::PowerTail => Some(u.powf(-1.0 / TAIL_INDEX) - 1.0),
            Component::Gamma { .. } => None,
        }
    }
}

fn components(shapes: &[McShape], n: f64) -> Vec<Component> {
    let exponential = |rate: f64| Component::Exponential { rate, ln_rate: rate.ln() };
    let mut out = vec![exponential(n), Component::PowerTail];
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    for shape in shapes {
        if shape.decay > 0.0
            && !out.iter().any(|c| matches!(c, Component::Exponential { rate, .. } if same(*rate, shape.decay)))
        {
            out.push(exponential(shape.decay));
        }
        if shape.decay > 0.0 && shape.x1_power < 0.0 {
            let k = 1.0 - shape.x1_power;
            let g = Component::Gamma {
                rate: shape.decay,
                shape: k,
                ln_norm: shape.decay.ln() - ln_gamma_unchecked(k),
            };
            let dup = out.iter().any(|c| {
                matches!(c, Component::Gamma { rate, shape: k, .. } if same(*rate, shape.decay) && same(*k, 1.0 - shape.x1_power))
            });
            if !dup {
                out.push(g);
            }
        }
    }
    out
}

fn random_direction(dim: Dimension, rng: &mut ChaCha8Rng) -> SpherePoint {
    let azimuth = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    match dim.get() {
        2 => SpherePoint::circle(azimuth),
        _ => {
            let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
            SpherePoint::new(z.clamp(-1.0, 1.0).acos(), azimuth)
        }
    }
}

struct Cell {
    mass: f64,
    mean: Vec<f64>,
    var_of_mean: Vec<f64>,
}

/// Integrates `g` over the ball, where `g(p, s)` is the integrand with
/// respect to `dt dsigma` (that is, it already contains the factor
/// `r^n` from `dx = r^n dt dsigma`).
///
/// Directions are uniform; for `n >= 4` the direction argument is a dummy and
/// `g` must be radial.
pub fn mc_integrate<G>(g: G, dim: Dimension, shape: McShape, samples: usize, seed: u64) -> Result<QuadResult>
where
    G: Fn(&RadialPoint, &SpherePoint) -> f64 + Sync,
{
    let mut out = mc_integrate_many(|p, s, v: &mut [f64]| v[0] = g(p, s), 1, dim, &[shape], samples, seed)?;
    Ok(out.remove(0))
}

/// Several integrals from one set of samples: `g` writes `outputs` values
/// per sample. The proposal mixes the components suited to every shape.
pub fn mc_integrate_many<G>(
    g: G,
    outputs: usize,
    dim: Dimension,
    shapes: &[McShape],
    samples: usize,
    seed: u64,
) -> Result<Vec<QuadResult>>
where
    G: Fn(&RadialPoint, &SpherePoint, &mut [f64]) + Sync,
{
    if samples < 1000 {
        return Err(Error::domain("samples", samples as f64, "[1000, inf)"));
    }
    let n = dim.as_f64();
    let area = dim.sphere_area();
    let comps = components(shapes, n);
    let k = comps.len();
    let ln_c = -(k as f64).ln();

    // (component, first stratum, strata in chunk, strata in component, budget)
    let mut jobs = Vec::new();
    let per = samples / k;
    for (ci, comp) in comps.iter().enumerate() {
        let budget = if ci == 0 { samples - per * (k - 1) } else { per };
        let strata = match comp {
            Component::Gamma { .. } => 1,
            _ => (budget / SAMPLES_PER_STRATUM).max(1),
        };
        let mut first = 0;
        while first < strata {
            let count = STRATA_PER_CHUNK.min(strata - first);
            jobs.push((ci, first, count, strata, budget));
            first += count;
        }
    }

    let cells: Vec<Result<Vec<Cell>>> = jobs
        .par_iter()
        .enumerate()
        .map(|(chunk, &(ci, first, count, strata, budget))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let comp = comps[ci];
            let per_stratum = (budget / strata).max(2);
            let gamma = match comp {
                Component::Gamma { shape, .. } => {
                    Some(Gamma::new(shape, 1.0).expect("Gamma shape exceeds one"))
                }
                _ => None,
            };
            let mut vals = vec![0.0; outputs];
            let mut out = Vec::with_capacity(count);
            for h in first..first + count {
                let mut sum = vec![0.0; outputs];
                let mut sum_sq = vec![0.0; outputs];
                for _ in 0..per_stratum {
                    let v = 1.0 - rng.random::<f64>();
                    let t = match (comp.quantile((h as f64 + v) / strata as f64), &gamma) {
                        (Some(t), _) => t,
                        (None, Some(dist)) => {
                            let Component::Gamma { rate, .. } = comp else { unreachable!() };
                            dist.sample(&mut rng) / rate - 1.0
                        }
                        (None, None) => unreachable!(),
                    };
                    let dir = random_direction(dim, &mut rng);
                    if t < 0.0 {
                        continue;
                    }
                    let p = RadialPoint::from_log_depth(t);
                    vals.iter_mut().for_each(|x| *x = 0.0);
                    g(&p, &dir, &mut vals);
                    if vals.iter().all(|&x| x == 0.0) {
                        continue;
                    }
                    let scale = area * (-log_sum_exp(comps.iter().map(|c| ln_c + c.ln_pdf(&p)))).exp();
                    for (j, &gv) in vals.iter().enumerate() {
                        if gv == 0.0 {
                            continue;
                        }
                        let x = gv * scale;
                        if !x.is_finite() {
                            return Err(Error::NonFinite {
                                location: format!("Monte-Carlo sample at depth t = {t:e}"),
                            });
                        }
                        sum[j] += x;
                        sum_sq[j] += x * x;
                    }
                }
                let m = per_stratum as f64;
                let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
                let var_of_mean = (0..outputs)
                    .map(|j| ((sum_sq[j] - sum[j] * mean[j]) / (m - 1.0)).max(0.0) / m)
                    .collect();
                out.push(Cell {
                    mass: 1.0 / (k as f64 * strata as f64),
                    mean,
                    var_of_mean,
                });
            }
            Ok(out)
        })
        .collect();

    let mut value = vec![0.0; outputs];
    let mut variance = vec![0.0; outputs];
    for chunk in cells {
        for c in chunk? {
            for j in 0..outputs {
                value[j] += c.mass * c.mean[j];
                variance[j] += c.mass * c.mass * c.var_of_mean[j];
            }
        }
    }
    Ok(value
        .into_iter()
        .zip(variance)
        .map(|(value, v)| QuadResult {
            value,
            error_estimate: v.sqrt(),
            evaluations: samples,
        })
        .collect())
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Monte-Carlo estimate of `int_B f(x) weight(|x|) dx`.
///
/// `f` receives the radial point and direction of each sample; for `n >= 4`
/// it must be radial.
pub fn mc_oracle<F>(f: F, weight: WeightSpec, dim: Dimension, samples: usize, seed: u64) -> Result<QuadResult>
where
    F: Fn(&RadialPoint, &SpherePoint) -> f64 + Sync,
{
    let n = dim.as_f64();
    mc_integrate(
        |p, s| {
            let lw = weight.log_measure(p, n) - p.tau;
            if lw == f64::NEG_INFINITY {
                return 0.0;
            }
            let v = f(p, s);
            if v == 0.0 {
                0.0
            } else {
                v * lw.exp()
            }
        },
        dim,
        McShape::from_weight(&weight, dim),
        samples,
        seed,
    )
}
