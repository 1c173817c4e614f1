use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::checks::{check, CheckContext};
use super::growth::{growth_check, GrowthMode};
use super::report::CheckReport;
use crate::error::Error;
use crate::specialfn::Dimension;
use crate::testfunctions::{make_family, FamilyKind, FamilyParams, ModeSpec, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Core,
    Radial,
    Nonradial,
    Scalars,
    Growth,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Core,
        Suite::Radial,
        Suite::Nonradial,
        Suite::Scalars,
        Suite::Growth,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Radial => "radial",
            Suite::Nonradial => "nonradial",
            Suite::Scalars => "scalars",
            Suite::Growth => "growth",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

pub const RADIAL_MEMBERS_PER_KIND: usize = 4;
pub const HARMONIC_MIX_MEMBERS: usize = 6;
pub const FT_NONRADIAL_MEMBERS: usize = 4;

fn rng_for(seed: u64, dim: Dimension, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (dim.get() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(stream);
    rng
}

fn amplitude(rng: &mut ChaCha8Rng) -> f64 {
    let a = rng.random_range(0.5..2.0);
    if rng.random_bool(0.5) {
        a
    } else {
        -a
    }
}

fn random_modes(rng: &mut ChaCha8Rng, dim: Dimension, count: usize, with_mean: bool) -> Vec<ModeSpec> {
    let mut modes = Vec::with_capacity(count);
    if with_mean {
        modes.push(ModeSpec {
            degree: 0,
            index: 0,
            amplitude: 1.0,
        });
    }
    while modes.len() < count {
        let degree = rng.random_range(1..=4usize);
        let l = degree as i64;
        let index = match dim.get() {
            2 => rng.random_range(0..2i64),
            _ => rng.random_range(-l..=l),
        };
        if modes.iter().any(|m| m.degree == degree && m.index == index) {
            continue;
        }
        let amp = (rng.random_range(0.1f64..1.0) * 1000.0).round() / 1000.0;
        modes.push(ModeSpec {
            degree,
            index,
            amplitude: amp,
        });
    }
    modes
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn build(params: FamilyParams, dim: Dimension) -> TestFunction {
    make_family(&params, dim).expect("suite draws are admissible")
}

/// Radial members: bumps, `hardy_eps` and radial FT-admissible fields.
pub fn radial_members(dim: Dimension, seed: u64) -> Vec<TestFunction> {
    let mut rng = rng_for(seed, dim, 1);
    let mut out = Vec::new();
    for (kind, lo, hi) in [
        (FamilyKind::Bump, 0.05, 0.95),
        (FamilyKind::HardyEps, 0.1, 0.9),
        (FamilyKind::FtAdmissible, 0.05, 0.95),
    ] {
        for _ in 0..RADIAL_MEMBERS_PER_KIND {
            let eps = round3(rng.random_range(lo..hi));
            let a = round3(amplitude(&mut rng));
            out.push(build(FamilyParams::new(kind, eps, a), dim));
        }
    }
    out
}

/// Nonradial members for `n` in {2, 3}: harmonic mixtures and FT-admissible
/// fields carrying several modes.
pub fn nonradial_members(dim: Dimension, seed: u64) -> Vec<TestFunction> {
    if !dim.supports_nonradial() {
        return Vec::new();
    }
    let mut rng = rng_for(seed, dim, 2);
    let mut out = Vec::new();
    for _ in 0..HARMONIC_MIX_MEMBERS {
        let eps = round3(rng.random_range(0.1..0.9));
        let a = round3(amplitude(&mut rng));
        let count = rng.random_range(2..=4usize);
        let modes = random_modes(&mut rng, dim, count, true);
        out.push(build(FamilyParams::new(FamilyKind::HarmonicMix, eps, a).with_modes(modes), dim));
    }
    out.extend(ft_members(dim, FT_NONRADIAL_MEMBERS, seed, true));
    out
}

/// `count` FT-admissible fields (fields vanishing near the origin), radial or
/// with random angular modes.
pub fn ft_members(dim: Dimension, count: usize, seed: u64, nonradial: bool) -> Vec<TestFunction> {
    if nonradial && !dim.supports_nonradial() {
        return Vec::new();
    }
    let mut rng = rng_for(seed, dim, if nonradial { 4 } else { 3 });
    (0..count)
        .map(|_| {
            let eps = round3(rng.random_range(0.05..0.95));
            let a = round3(amplitude(&mut rng));
            let mut p = FamilyParams::new(FamilyKind::FtAdmissible, eps, a);
            if nonradial {
                let k = rng.random_range(2..=3usize);
                p = p.with_modes(random_modes(&mut rng, dim, k, true));
            }
            build(p, dim)
        })
        .collect()
}

enum Job {
    Field(&'static str, TestFunction),
    Growth(GrowthMode, Dimension),
}

impl Job {
    fn run(&self, ctx: &CheckContext) -> CheckReport {
        match self {
            Job::Field(id, f) => check(id, f, ctx).unwrap_or_else(|e| {
                CheckReport::failed(id, f.dim().get(), &format!("{};error={e}", f.descriptor()))
            }),
            Job::Growth(mode, dim) => growth_check(*mode, *dim, &ctx.cfg)
                .unwrap_or_else(|e| CheckReport::failed(mode.check_id(), dim.get(), &format!("error={e}"))),
        }
    }
}

fn core_jobs(dim: Dimension, members: &[TestFunction], jobs: &mut Vec<Job>) {
    let n = dim.get();
    for f in members {
        jobs.push(Job::Field("leray_nonneg", f.clone()));
        if n >= 3 {
            jobs.push(Job::Field("hardy_n3", f.clone()));
        }
        jobs.push(Job::Field("link", f.clone()));
        jobs.push(Job::Field("link2", f.clone()));
        if n == 2 {
            jobs.push(Job::Field("link_eq_n2", f.clone()));
            jobs.push(Job::Field("link2_eq_n2", f.clone()));
        }
        jobs.push(Job::Field("onedim", f.clone()));
        if f.inner_cut() > 0.0 {
            jobs.push(Job::Field("ft_identity", f.clone()));
        }
    }
}

fn jobs_for(suite: Suite, dim: Dimension, seed: u64) -> Vec<Job> {
    let mut jobs = Vec::new();
    let radial = || radial_members(dim, seed);
    let nonradial = || nonradial_members(dim, seed);
    match suite {
        Suite::Core => {
            let mut members = radial();
            members.extend(nonradial());
            core_jobs(dim, &members, &mut jobs);
        }
        Suite::Radial => {
            for f in radial() {
                jobs.push(Job::Field("key_radial", f.clone()));
                jobs.push(Job::Field("lq_presum", f));
            }
            jobs.push(Job::Field("gamma_bound", TestFunction::zero(dim)));
        }
        Suite::Nonradial => {
            for f in nonradial() {
                for id in ["holder_mean", "step1", "step2"] {
                    jobs.push(Job::Field(id, f.clone()));
                }
            }
        }
        Suite::Scalars => {
            for id in ["scalar_pow_super", "scalar_pow_sub", "vec", "vec_old"] {
                jobs.push(Job::Field(id, TestFunction::zero(dim)));
            }
        }
        Suite::Growth => {
            jobs.push(Job::Growth(GrowthMode::Trudinger, dim));
            jobs.push(Job::Growth(GrowthMode::LerayTrudinger, dim));
        }
        Suite::All => {
            for s in [Suite::Core, Suite::Radial, Suite::Nonradial, Suite::Scalars, Suite::Growth] {
                jobs.extend(jobs_for(s, dim, seed));
            }
        }
    }
    jobs
}

/// Runs the fixed check matrix of `suite` over `dims` with default settings.
pub fn run_suite(suite: Suite, dims: &[Dimension], seed: u64) -> Vec<CheckReport> {
    run_suite_with(
        suite,
        dims,
        &CheckContext {
            seed,
            ..CheckContext::default()
        },
    )
}

/// Runs the check matrix in parallel; reports come back in job order and a
/// check that errors is recorded as a failure.
pub fn run_suite_with(suite: Suite, dims: &[Dimension], ctx: &CheckContext) -> Vec<CheckReport> {
    let jobs: Vec<_> = dims.iter().flat_map(|&d| jobs_for(suite, d, ctx.seed)).collect();
    jobs.par_iter().map(|job| job.run(ctx)).collect()
}

