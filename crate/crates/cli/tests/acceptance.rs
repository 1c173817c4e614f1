//! Acceptance criteria, run in order inside one test so that runtimes are
//! measured without other tests competing for the CPU. Each criterion prints
//! one `PASS`/`FAIL` line.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use ltlab_core::functionals::{integrate_term, mc_terms_shared, Term};
use ltlab_core::quadrature::{mc_integrate_many, McShape, RadialPoint, SpherePoint};
use ltlab_core::verifier::{
    check, ft_members, growth_family, nonradial_members, radial_members, run_suite, CheckContext, KEY_RADIAL_Q,
};
use ltlab_core::{
    integrate_radial, sharpness_probe, structural_constants, x1, x1_derivative, x2, Dimension, EnergyKind, FamilyKind,
    Functional, Gauge, GrowthMode, QuadConfig, Status, Suite, TestFunction, Verdict, WeightSpec,
};

const SEED: u64 = 7;
const MC_SAMPLES: usize = 1_000_000;

fn dim(n: usize) -> Dimension {
    Dimension::new(n).unwrap()
}

struct Outcome {
    id: usize,
    passed: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

impl Outcome {
    fn ok(&self) -> bool {
        self.passed && self.limit.is_none_or(|l| self.elapsed <= l)
    }

    fn line(&self) -> String {
        let limit = self.limit.map_or(String::new(), |l| format!(" (limit {:.1}s)", l.as_secs_f64()));
        format!(
            "criterion {:>2}: {} in {:.2}s{limit}: {}",
            self.id,
            if self.ok() { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

fn timed(id: usize, limit: Option<f64>, body: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = body();
    let out = Outcome {
        id,
        passed,
        detail,
        elapsed: start.elapsed(),
        limit: limit.map(Duration::from_secs_f64),
    };
    println!("{}", out.line());
    out
}

fn c1_closed_form() -> (bool, String) {
    let cfg = QuadConfig::default();
    let d = dim(2);
    let quad = 2.0 * integrate_radial(|_| 1.0, WeightSpec::new(0.0, -1.0, 0.0), d, &cfg).unwrap().value;
    let antiderivative = |t: f64| if t == 0.0 { 0.0 } else { t * t / 2.0 * (1.0 - t.ln()) + t * t / 4.0 };
    let exact = 2.0 * (antiderivative(1.0) - antiderivative(0.0));
    // n int_0^inf e^(-n s) (1+s)^a ds with n = 2, a = 1
    let gamma_path = d.as_f64() * (1.0 / 2.0 + 1.0 / 4.0);
    let rel = ((quad - 1.5) / 1.5).abs();
    let ok = rel < 1e-10 && exact == 1.5 && gamma_path == 1.5;
    (ok, format!("2 int t/X1 = {quad:.15} (rel err {rel:.1e})"))
}

fn c2_weight_identities() -> (bool, String) {
    const N: usize = 100_000;
    let mut worst_id: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    let mut worst_exact: f64 = 0.0;
    let h = 1e-3;
    for k in 1..=N {
        let t = k as f64 / N as f64;
        let a = x1(t).unwrap();
        let b = x2(t).unwrap();
        worst_id = worst_id.max((-a.ln() - (1.0 - b) / b).abs());
        // five-point stencil in s = ln t, then d/dt = (1/t) d/ds
        let g = |s: f64| x1(s.exp().min(1.0)).unwrap().ln();
        let s = t.ln();
        let ds = if s + 2.0 * h <= 0.0 {
            (g(s - 2.0 * h) - 8.0 * g(s - h) + 8.0 * g(s + h) - g(s + 2.0 * h)) / (12.0 * h)
        } else {
            (-25.0 * g(s) + 48.0 * g(s - h) - 36.0 * g(s - 2.0 * h) + 16.0 * g(s - 3.0 * h) - 3.0 * g(s - 4.0 * h))
                / (-12.0 * h)
        };
        let target = a / t;
        worst_fd = worst_fd.max((ds / t - target).abs() / target.max(1.0));
        worst_exact = worst_exact.max((x1_derivative(t).unwrap() / a - target).abs() / target.max(1.0));
    }
    let ok = worst_id < 1e-12 && worst_fd < 1e-10 && worst_exact < 1e-14;
    (
        ok,
        format!("max |-ln X1 - (1-X2)/X2| = {worst_id:.1e}, max rel |(ln X1)' - X1/t| = {worst_fd:.1e} (fd), {worst_exact:.1e} (analytic)"),
    )
}

fn c3_vectorial() -> (bool, String) {
    let ctx = CheckContext {
        seed: SEED,
        random_pairs: 1_000_000,
        ..CheckContext::default()
    };
    let mut worst = f64::INFINITY;
    for n in 2..=6 {
        for id in ["vec", "vec_old"] {
            let r = check(id, &TestFunction::zero(dim(n)), &ctx).unwrap();
            worst = worst.min(r.rhs);
        }
    }
    (worst >= -1e-12, format!("min relative gap over 2 x 5 x 1e6 pairs = {worst:.3e}"))
}

fn ft_fields() -> Vec<TestFunction> {
    let mut out = Vec::new();
    for n in [2, 3, 4] {
        out.extend(ft_members(dim(n), 20, SEED, false));
    }
    for n in [2, 3] {
        out.extend(ft_members(dim(n), 20, SEED, true));
    }
    out
}

fn c4_ft_identity(fields: &[TestFunction]) -> (bool, String) {
    let ctx = CheckContext {
        seed: SEED,
        ..CheckContext::default()
    };
    let mut worst: f64 = 0.0;
    for f in fields {
        let r = check("ft_identity", f, &ctx).unwrap();
        worst = worst.max((r.lhs - r.rhs).abs() / r.rhs.abs());
    }
    (worst < 1e-6 && fields.len() == 100, format!("{} fields, max rel diff {worst:.2e}", fields.len()))
}

fn c5_equalities_n2() -> (bool, String) {
    let ctx = CheckContext {
        seed: SEED,
        ..CheckContext::default()
    };
    let mut fields = radial_members(dim(2), SEED);
    fields.extend(nonradial_members(dim(2), SEED));
    let mut worst: f64 = 0.0;
    for f in &fields {
        for id in ["link_eq_n2", "link2_eq_n2"] {
            let r = check(id, f, &ctx).unwrap();
            worst = worst.max((r.lhs - r.rhs).abs() / r.rhs.abs());
        }
    }
    (worst < 1e-6 && fields.len() >= 20, format!("{} fields, max rel diff {worst:.2e}", fields.len()))
}

const EXPLICIT_IDS: [&str; 13] = [
    "link",
    "link2",
    "onedim",
    "key_radial",
    "gamma_bound",
    "lq_presum",
    "holder_mean",
    "hardy_n3",
    "leray_nonneg",
    "scalar_pow_super",
    "scalar_pow_sub",
    "vec",
    "vec_old",
];

/// Inequality reports pass iff `margin >= -(1e-8 S + 1e-12)` with `S` the
/// magnitude of the compared quantities; the gap checks are normalized, so
/// for them `S = 1`.
fn c6_explicit_constants() -> (bool, String) {
    let reports = run_suite(Suite::All, &[dim(2), dim(3), dim(4)], SEED);
    let selected: Vec<_> = reports.iter().filter(|r| EXPLICIT_IDS.contains(&r.check_id.as_str())).collect();
    let bad: Vec<_> = selected.iter().filter(|r| r.status != Status::Pass).collect();
    let worst = selected.iter().map(|r| r.margin / r.tolerance).fold(f64::INFINITY, f64::min);
    for r in &bad {
        println!("    failing: {} n={} {} margin={:e}", r.check_id, r.dim, r.family, r.margin);
    }
    (
        bad.is_empty() && !selected.is_empty(),
        format!("{} explicit-constant reports, {} failures, min margin/tolerance {worst:.2e}", selected.len(), bad.len()),
    )
}

fn c7_moser_threshold() -> (bool, String) {
    let t = structural_constants(dim(2)).moser_threshold;
    let eps = [0.1, 0.03, 0.01, 0.003, 0.001];
    let p = sharpness_probe(dim(2), 0.5, 0.5 * 4.0 * PI, &eps, FamilyKind::HardyEps, &QuadConfig::default()).unwrap();
    let ok = (t - 4.0 * PI).abs() <= 1e-12 && p.verdict == Verdict::Bounded;
    (ok, format!("threshold - 4 pi = {:.1e}, verdict {} with values {:?}", t - 4.0 * PI, p.verdict, p.values))
}

fn c8_sharpness() -> (bool, String) {
    let eps = [0.1, 0.03, 0.01, 0.003, 0.001];
    let p = sharpness_probe(dim(2), 0.25, 1.0, &eps, FamilyKind::Loglog, &QuadConfig::default()).unwrap();
    (p.verdict == Verdict::Diverging, format!("verdict {}, overflow {:?}", p.verdict, p.overflow))
}

fn c9_growth() -> (bool, String) {
    let qs = [4.0, 8.0, 16.0, 32.0, 64.0, 120.0];
    let cfg = QuadConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        for mode in [GrowthMode::Trudinger, GrowthMode::LerayTrudinger] {
            let family = growth_family(mode, dim(n));
            let fit = ltlab_core::growth_fit(&family, &qs, mode, &cfg).unwrap();
            ok &= fit.constant.is_finite() && fit.constant > 0.0 && fit.relative_range < 0.5;
            parts.push(format!("n={n} {}: c={:.4} range={:.0}%", mode.check_id(), fit.constant, 100.0 * fit.relative_range));
        }
    }
    (ok, parts.join(", "))
}

type Group = Vec<(TestFunction, Vec<Term>)>;

/// The integrals behind criteria 4-6, grouped by the field whose gauge
/// forms they are taken on.
fn oracle_groups() -> (Vec<Group>, Vec<TestFunction>) {
    let ft_pair = |f: &TestFunction, group: &mut Group| {
        let g = f.relabel(Gauge::W);
        let zeta = g.change_gauge(Gauge::Zeta).unwrap();
        group.push((zeta.clone(), Functional::Ft.terms(zeta.dim())));
        group.push((g.clone(), Functional::Energy(EnergyKind::FtWeight).terms(g.dim())));
    };
    let mut groups = Vec::new();
    let mut spherical_means = Vec::new();
    for n in [2, 3, 4] {
        let d = dim(n);
        let nf = d.as_f64();
        let mut members = radial_members(d, SEED);
        members.extend(nonradial_members(d, SEED));
        for u in &members {
            let mut group = Vec::new();
            let mut terms = Functional::Leray.terms(d);
            if n >= 3 {
                terms.extend(Functional::Hardy.terms(d));
            }
            if u.is_radial() {
                for q in KEY_RADIAL_Q {
                    terms.extend(Functional::LqPower { q, beta: 1.0 / nf }.terms(d));
                }
            }
            group.push((u.clone(), terms));
            let v = u.change_gauge(Gauge::V).unwrap();
            let mut vt = Functional::Energy(EnergyKind::GradNX1).terms(d);
            vt.extend(Functional::Energy(EnergyKind::MixedLink2).terms(d));
            group.push((v.clone(), vt));
            let w = v.change_gauge(Gauge::W).unwrap();
            if u.is_radial() {
                group.push((w, Functional::Energy(EnergyKind::FtWeight).terms(d)));
            } else {
                spherical_means.push(w);
            }
            if u.inner_cut() > 0.0 {
                ft_pair(u, &mut group);
            }
            groups.push(group);
        }
    }
    for f in ft_fields() {
        let mut group = Vec::new();
        ft_pair(&f, &mut group);
        groups.push(group);
    }
    (groups.into_iter().flat_map(split_by_synthesis).collect(), spherical_means)
}

fn split_by_synthesis(group: Group) -> Vec<Group> {
    let mut out: Vec<Group> = Vec::new();
    for (f, terms) in group {
        match out.iter_mut().find(|g| g[0].0.shares_synthesis(&f)) {
            Some(g) => g.push((f, terms)),
            None => out.push(vec![(f, terms)]),
        }
    }
    out
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// A direction drawn from the bits of a sample, independent of it in law.
fn second_direction(d: Dimension, p: &RadialPoint, s: &SpherePoint) -> SpherePoint {
    let h1 = splitmix(p.t.to_bits() ^ s.azimuth.to_bits().rotate_left(17));
    let h2 = splitmix(h1);
    let unit = |h: u64| (h >> 11) as f64 / (1u64 << 53) as f64;
    let azimuth = 2.0 * PI * unit(h1);
    if d.get() == 2 {
        SpherePoint::circle(azimuth)
    } else {
        SpherePoint::new((2.0 * unit(h2) - 1.0).acos(), azimuth)
    }
}

/// `int_B |x|^-n (r |grad w0|)^2 X1^-1 dx` for the spherical mean `w0` of
/// `w`, estimated without evaluating `w0`: with two independent directions
/// `E[dt w(s) dt w(s')] = (dt w0)^2`.
fn mc_mean_energy(w: &TestFunction, seed: u64) -> ltlab_core::QuadResult {
    let d = w.dim();
    let dt = |p: &RadialPoint, s: &SpherePoint| {
        let j = w.jet(p, s);
        if j.dtau == 0.0 {
            0.0
        } else {
            j.dtau * (j.scale - p.tau).exp()
        }
    };
    let shape = McShape::from_weight(&WeightSpec::new(-d.as_f64(), -1.0, 0.0), d);
    let mut out = mc_integrate_many(
        |p, s, out| {
            let a = dt(p, s);
            if a != 0.0 {
                out[0] = a * dt(p, &second_direction(d, p, s)) * (1.0 + p.t);
            }
        },
        1,
        d,
        &[shape],
        MC_SAMPLES,
        seed,
    )
    .unwrap();
    out.remove(0)
}

fn agree(quad: f64, mc: f64, stderr: f64) -> (bool, f64) {
    let allowed = (3.0 * stderr).max(1e-3 * quad.abs());
    let dev = (quad - mc).abs();
    (dev <= allowed, dev / allowed)
}

fn c10_oracle() -> (bool, String) {
    let cfg = QuadConfig::default();
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    let mut tally = |ok: bool, ratio: f64, what: String| {
        count += 1;
        worst = worst.max(ratio);
        if !ok {
            bad += 1;
            println!("    mismatch: {what}");
        }
    };
    let (groups, spherical_means) = oracle_groups();
    for (k, group) in groups.iter().enumerate() {
        let refs: Vec<(&TestFunction, &[Term])> = group.iter().map(|(f, t)| (f, t.as_slice())).collect();
        let mc = mc_terms_shared(&refs, MC_SAMPLES, SEED.wrapping_add(k as u64)).unwrap();
        for ((f, terms), results) in group.iter().zip(&mc) {
            for (term, m) in terms.iter().zip(results) {
                let q = integrate_term(f, term, &cfg).unwrap().value;
                let (ok, ratio) = agree(q, m.value, m.error_estimate);
                tally(ok, ratio, format!("n={} {} {} {}: quad {q:e} mc {:e} +/- {:e}", f.dim(), f.gauge().name(), term.name, f.descriptor(), m.value, m.error_estimate));
            }
        }
    }
    for (k, w) in spherical_means.iter().enumerate() {
        let w0 = TestFunction::radial(w.dim(), w.spherical_mean(), Gauge::W, w.descriptor());
        let term = Functional::Energy(EnergyKind::FtWeight).terms(w.dim()).remove(0);
        let q = integrate_term(&w0, &term, &cfg).unwrap().value;
        let m = mc_mean_energy(w, SEED.wrapping_add(1000 + k as u64));
        let (ok, ratio) = agree(q, m.value, m.error_estimate);
        tally(ok, ratio, format!("n={} spherical mean {}: quad {q:e} mc {:e} +/- {:e}", w.dim(), w.descriptor(), m.value, m.error_estimate));
    }
    // gamma_bound: n int_0^1 r^(n-1) X1^(-a) dr for q = 2..100
    for n in [2, 3, 4] {
        let d = dim(n);
        let nf = d.as_f64();
        let exps: Vec<f64> = (2..=100).map(|q| f64::from(q) * (nf - 1.0) / nf).collect();
        let shapes: Vec<McShape> = exps.iter().map(|&a| McShape { decay: nf, x1_power: -a }).collect();
        let mc = mc_integrate_many(
            |p, _, out| {
                for (o, a) in out.iter_mut().zip(&exps) {
                    *o = (-nf * p.t + a * p.tau).exp();
                }
            },
            exps.len(),
            d,
            &shapes,
            MC_SAMPLES,
            SEED,
        )
        .unwrap();
        for (a, m) in exps.iter().zip(&mc) {
            let q = integrate_radial(|_| 1.0, WeightSpec::new(0.0, -a, 0.0), d, &cfg).unwrap().value;
            let area = d.sphere_area();
            let (ok, ratio) = agree(q, m.value / area, m.error_estimate / area);
            tally(ok, ratio, format!("n={n} gamma_bound a={a}: quad {q:e} mc {:e}", m.value / area));
        }
    }
    (bad == 0, format!("{count} integrals at {MC_SAMPLES} samples, {bad} mismatches, worst deviation/allowed {worst:.2}"))
}

fn c11_determinism() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_ltlab"))
            .args(["verify", "--suite", "all", "--seed", "7", "--out"])
            .arg(&path)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        (status.code(), std::fs::read_to_string(path).unwrap())
    };
    let strip = |csv: &str| -> Vec<String> {
        csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string()).collect()
    };
    let (c1, a) = run("a.csv");
    let (c2, b) = run("b.csv");
    let rows = a.lines().count().saturating_sub(1);
    let same = strip(&a) == strip(&b) && a.starts_with("check_id,") && a.lines().next().unwrap().ends_with(",runtime_ms");
    (same && rows > 0, format!("{rows} rows, identical modulo runtime_ms: {same}, exit codes {c1:?} {c2:?}"))
}

#[test]
fn acceptance() {
    let ft = ft_fields();
    let outcomes = [
        timed(1, Some(0.1), c1_closed_form),
        timed(2, Some(1.0), c2_weight_identities),
        timed(3, Some(30.0), c3_vectorial),
        timed(4, Some(60.0), || c4_ft_identity(&ft)),
        timed(5, Some(30.0), c5_equalities_n2),
        timed(6, Some(300.0), c6_explicit_constants),
        timed(7, None, c7_moser_threshold),
        timed(8, Some(60.0), c8_sharpness),
        timed(9, Some(120.0), c9_growth),
        timed(10, Some(300.0), c10_oracle),
        timed(11, None, c11_determinism),
    ];
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.ok()).map(|o| o.id).collect();
    println!("acceptance: {} of {} criteria pass", outcomes.len() - failed.len(), outcomes.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
