//! Scalar fields on the unit ball built from radial profiles and spherical
//! harmonics, and the gauge transforms between `u`, `v`, `w` and `zeta`.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::harmonics::{harmonic, validate_index, HarmonicJet, HarmonicTable};
use super::profile::{Expr, RadialProfile, ScaledJet};
use crate::error::{Error, Result};
use crate::quadrature::{RadialPoint, SphereGrid, SpherePoint};
use crate::specialfn::Dimension;

/// Which of the substituted functions a field represents:
/// `v = X1^(1-1/n) u`, `w = |v|^(n/2)`, `zeta = |x|^(1-n/2) X1^(-1/2) w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    U,
    V,
    W,
    Zeta,
}

impl Gauge {
    pub fn name(self) -> &'static str {
        match self {
            Gauge::U => "u",
            Gauge::V => "v",
            Gauge::W => "w",
            Gauge::Zeta => "zeta",
        }
    }
}

impl std::fmt::Display for Gauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" => Ok(Gauge::U),
            "v" => Ok(Gauge::V),
            "w" => Ok(Gauge::W),
            "zeta" => Ok(Gauge::Zeta),
            other => Err(Error::Parse(format!("unknown gauge '{other}'"))),
        }
    }
}

/// One term `profile(r) h_(degree, index)(theta)` of a harmonic synthesis.
#[derive(Debug, Clone)]
pub struct Mode {
    pub degree: usize,
    pub index: i64,
    pub profile: RadialProfile,
}

/// Pointwise operation applied after synthesis. Only needed for nonradial
/// fields in the nonlinear gauges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointwiseOp {
    Weight { r_pow: f64, x1_pow: f64 },
    AbsPow(f64),
    Scale(f64),
}

/// Field value, log-depth derivative and tangential gradient at a point, all
/// multiplied by `e^scale`. With `dt = X1 dtau` the Euclidean gradient
/// satisfies `|grad f|^2 = r^-2 (dt^2 + |grad|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub scale: f64,
    pub value: f64,
    pub dtau: f64,
    pub grad: [f64; 2],
    /// Log-depth of the point.
    pub tau: f64,
}

impl FieldJet {
    pub const ZERO: FieldJet = FieldJet {
        scale: 0.0,
        value: 0.0,
        dtau: 0.0,
        grad: [0.0, 0.0],
        tau: 0.0,
    };

    pub fn is_zero(&self) -> bool {
        self.value == 0.0 && self.dtau == 0.0 && self.grad == [0.0, 0.0]
    }

    /// `ln(dt^2 + |grad|^2)` of the mantissa part (the scale enters
    /// squared), or `None` when the gradient vanishes.
    pub fn log_gradient_sq(&self) -> Option<f64> {
        let parts = [
            (self.dtau != 0.0).then(|| self.dtau.abs().ln() - self.tau),
            (self.grad[0] != 0.0).then(|| self.grad[0].abs().ln()),
            (self.grad[1] != 0.0).then(|| self.grad[1].abs().ln()),
        ];
        let m = parts.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return None;
        }
        let s: f64 = parts.iter().flatten().map(|l| (2.0 * (l - m)).exp()).sum();
        Some(2.0 * m + s.ln())
    }

    /// `dt^2 + |grad|^2` (mantissa part; the scale enters squared).
    pub fn gradient_sq(&self) -> f64 {
        self.log_gradient_sq().map_or(0.0, f64::exp)
    }

    pub fn actual_value(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.value * self.scale.exp()
        }
    }

    fn apply(self, op: &PointwiseOp, p: &RadialPoint) -> FieldJet {
        if self.is_zero() {
            return FieldJet::ZERO;
        }
        match *op {
            PointwiseOp::Weight { r_pow, x1_pow } => {
                let j = ScaledJet {
                    scale: self.scale,
                    value: self.value,
                    dtau: self.dtau,
                }
                .weighted(p, r_pow, x1_pow);
                FieldJet {
                    scale: j.scale,
                    value: j.value,
                    dtau: j.dtau,
                    ..self
                }
            }
            PointwiseOp::AbsPow(q) => {
                let a = self.value.abs();
                let factor = if a == 0.0 {
                    0.0
                } else {
                    q * a.powf(q - 1.0) * self.value.signum()
                };
                FieldJet {
                    scale: q * self.scale,
                    value: a.powf(q),
                    dtau: factor * self.dtau,
                    grad: [factor * self.grad[0], factor * self.grad[1]],
                    tau: self.tau,
                }
            }
            PointwiseOp::Scale(c) => FieldJet {
                value: c * self.value,
                dtau: c * self.dtau,
                grad: [c * self.grad[0], c * self.grad[1]],
                ..self
            },
        }
    }
}

/// A scalar field on the unit ball.
#[derive(Debug, Clone)]
pub struct TestFunction {
    dim: Dimension,
    modes: Vec<Mode>,
    pointwise: Vec<PointwiseOp>,
    gauge: Gauge,
    descriptor: String,
    table: OnceLock<Arc<HarmonicTable>>,
}

impl TestFunction {
    pub fn new(dim: Dimension, modes: Vec<Mode>, gauge: Gauge, descriptor: impl Into<String>) -> Result<Self> {
        for m in &modes {
            if m.degree > 0 || m.index != 0 {
                validate_index(dim, m.degree, m.index)?;
            }
            if !(m.profile.outer_cut <= 1.0) {
                return Err(Error::Admissibility(format!(
                    "outer cut {} exceeds the unit ball",
                    m.profile.outer_cut
                )));
            }
        }
        Ok(TestFunction {
            dim,
            modes,
            pointwise: Vec::new(),
            gauge,
            descriptor: descriptor.into(),
            table: OnceLock::new(),
        })
    }

    pub fn radial(dim: Dimension, profile: RadialProfile, gauge: Gauge, descriptor: impl Into<String>) -> Self {
        TestFunction::new(
            dim,
            vec![Mode {
                degree: 0,
                index: 0,
                profile,
            }],
            gauge,
            descriptor,
        )
        .expect("radial modes are valid in every dimension")
    }

    pub fn zero(dim: Dimension) -> Self {
        TestFunction::radial(dim, RadialProfile::zero(), Gauge::U, "kind=zero")
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn with_descriptor(mut self, descriptor: impl Into<String>) -> Self {
        self.descriptor = descriptor.into();
        self
    }

    pub fn is_radial(&self) -> bool {
        self.modes.iter().all(|m| m.degree == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.profile.is_zero())
            || self.pointwise.contains(&PointwiseOp::Scale(0.0))
    }

    pub fn inner_cut(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.profile.inner_cut)
            .fold(f64::INFINITY, f64::min)
            .min(1.0)
    }

    pub fn outer_cut(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.profile.outer_cut)
            .fold(0.0, f64::max)
    }

    /// Log-depth knots of all profiles.
    pub fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.modes.iter().flat_map(|m| m.profile.knots()).collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    /// Same field with a different gauge label.
    pub fn relabel(&self, gauge: Gauge) -> TestFunction {
        TestFunction {
            gauge,
            ..self.clone()
        }
    }

    fn table(&self) -> Result<Arc<HarmonicTable>> {
        if let Some(t) = self.table.get() {
            return Ok(t.clone());
        }
        let grid = SphereGrid::standard(self.dim)?;
        let idx: Vec<(usize, i64)> = self.modes.iter().map(|m| (m.degree, m.index)).collect();
        let t = Arc::new(HarmonicTable::new(self.dim, &idx, &grid));
        Ok(self.table.get_or_init(|| t).clone())
    }

    /// Profile jets of all modes brought to a common scale.
    fn mode_jets(&self, p: &RadialPoint) -> Option<(f64, Vec<(f64, f64)>)> {
        let jets: Vec<ScaledJet> = self.modes.iter().map(|m| m.profile.jet(p)).collect();
        let scale = jets
            .iter()
            .filter(|j| !j.is_zero())
            .map(|j| j.scale)
            .fold(f64::NEG_INFINITY, f64::max);
        if scale == f64::NEG_INFINITY {
            return None;
        }
        Some((
            scale,
            jets.iter()
                .map(|j| {
                    if j.is_zero() {
                        (0.0, 0.0)
                    } else {
                        let k = (j.scale - scale).exp();
                        (j.value * k, j.dtau * k)
                    }
                })
                .collect(),
        ))
    }

    fn synthesize(&self, p: &RadialPoint, scale: f64, mj: &[(f64, f64)], h: impl Fn(usize) -> HarmonicJet) -> FieldJet {
        self.finish_jet(Self::combine(p, scale, mj, h), p)
    }

    fn combine(p: &RadialPoint, scale: f64, mj: &[(f64, f64)], h: impl Fn(usize) -> HarmonicJet) -> FieldJet {
        let mut j = FieldJet {
            scale,
            tau: p.tau,
            ..FieldJet::ZERO
        };
        for (k, &(v, d)) in mj.iter().enumerate() {
            if v == 0.0 && d == 0.0 {
                continue;
            }
            let hk = h(k);
            j.value += v * hk.value;
            j.dtau += d * hk.value;
            j.grad[0] += v * hk.grad[0];
            j.grad[1] += v * hk.grad[1];
        }
        j
    }

    /// Applies the pointwise transforms to a jet of the underlying synthesis.
    pub(crate) fn finish_jet(&self, base: FieldJet, p: &RadialPoint) -> FieldJet {
        self.pointwise.iter().fold(base, |acc, op| acc.apply(op, p))
    }

    /// Jet of the harmonic synthesis before any pointwise transform.
    pub(crate) fn synthesis_jet(&self, p: &RadialPoint, s: &SpherePoint) -> FieldJet {
        let Some((scale, mj)) = self.mode_jets(p) else {
            return FieldJet::ZERO;
        };
        if self.is_radial() {
            return Self::combine(p, scale, &mj, |_| HarmonicJet {
                value: 1.0,
                grad: [0.0, 0.0],
            });
        }
        Self::combine(p, scale, &mj, |k| {
            harmonic(self.dim, self.modes[k].degree, self.modes[k].index, s)
        })
    }

    /// Whether `other` is a pointwise transform (gauge change, relabeling or
    /// scaling) of the same synthesis.
    pub fn shares_synthesis(&self, other: &TestFunction) -> bool {
        self.dim == other.dim && format!("{:?}", self.modes) == format!("{:?}", other.modes)
    }

    /// Field jet at a radial point and direction.
    pub fn jet(&self, p: &RadialPoint, s: &SpherePoint) -> FieldJet {
        self.finish_jet(self.synthesis_jet(p, s), p)
    }

    /// Value at a radius and direction.
    pub fn eval_polar(&self, r: f64, s: &SpherePoint) -> f64 {
        self.jet(&RadialPoint::from_radius(r), s).actual_value()
    }

    /// Value at a Cartesian point of `R^n` (for `n >= 4` the field must be
    /// radial).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r >= 1.0 {
            return 0.0;
        }
        let s = match x.len() {
            2 => SpherePoint::circle(x[1].atan2(x[0])),
            3 if r > 0.0 => SpherePoint::new((x[2] / r).clamp(-1.0, 1.0).acos(), x[1].atan2(x[0])),
            _ => SpherePoint::new(0.0, 0.0),
        };
        self.eval_polar(r, &s)
    }

    /// `sum_k w_k density(jet(r, theta_k))` over the standard sphere grid; for
    /// radial fields `|S^(n-1)| density(jet(r))`.
    pub(crate) fn shell_sum(&self, p: &RadialPoint, mut density: impl FnMut(&FieldJet) -> f64) -> Result<f64> {
        let Some((scale, mj)) = self.mode_jets(p) else {
            return Ok(self.dim.sphere_area() * density(&FieldJet::ZERO));
        };
        if self.is_radial() {
            let j = self.synthesize(p, scale, &mj, |_| HarmonicJet {
                value: 1.0,
                grad: [0.0, 0.0],
            });
            return Ok(self.dim.sphere_area() * density(&j));
        }
        let grid = SphereGrid::standard(self.dim)?;
        let table = self.table()?;
        let mut sum = 0.0;
        for (i, w) in grid.weights.iter().enumerate() {
            let j = self.synthesize(p, scale, &mj, |k| table.rows[k][i]);
            sum += w * density(&j);
        }
        Ok(sum)
    }

    /// Jet of the spherical mean at `p`.
    pub(crate) fn spherical_mean_jet(&self, p: &RadialPoint) -> ScaledJet {
        if self.is_radial() {
            let j = self.jet(p, &SpherePoint::new(0.0, 0.0));
            return ScaledJet {
                scale: j.scale,
                value: j.value,
                dtau: j.dtau,
            };
        }
        let Some((scale, mj)) = self.mode_jets(p) else {
            return ScaledJet::ZERO;
        };
        let (Ok(grid), Ok(table)) = (SphereGrid::standard(self.dim), self.table()) else {
            return ScaledJet::ZERO;
        };
        let area = self.dim.sphere_area();
        let mut out_scale = None;
        let (mut v, mut d) = (0.0, 0.0);
        for (i, w) in grid.weights.iter().enumerate() {
            let j = self.synthesize(p, scale, &mj, |k| table.rows[k][i]);
            if j.is_zero() {
                continue;
            }
            // every point of the shell shares the scale
            out_scale.get_or_insert(j.scale);
            v += w * j.value;
            d += w * j.dtau;
        }
        match out_scale {
            None => ScaledJet::ZERO,
            Some(s) => ScaledJet {
                scale: s,
                value: v / area,
                dtau: d / area,
            },
        }
    }

    /// Spherical mean as a radial profile. Exact (the `(0, 0)` component)
    /// when the field is a plain synthesis; otherwise evaluated by sphere
    /// quadrature.
    pub fn spherical_mean(&self) -> RadialProfile {
        let inner = self.inner_cut();
        let outer = self.outer_cut();
        if self.pointwise.is_empty() {
            let parts: Vec<Expr> = self
                .modes
                .iter()
                .filter(|m| m.degree == 0)
                .map(|m| m.profile.expr.clone())
                .collect();
            let expr = match parts.len() {
                0 => Expr::Zero,
                1 => parts.into_iter().next().expect("one part"),
                _ => Expr::Sum(parts),
            };
            if self.modes.iter().filter(|m| m.degree == 0).count() == 1 {
                let m = self.modes.iter().find(|m| m.degree == 0).expect("one radial mode");
                return m.profile.clone();
            }
            return RadialProfile::new(expr, if inner.is_finite() { inner } else { 0.0 }, outer);
        }
        RadialProfile::new(
            Expr::SphericalMean(Arc::new(self.clone())),
            if inner.is_finite() { inner } else { 0.0 },
            outer,
        )
    }

    /// The spherical mean as a radial field in the same gauge.
    pub fn radial_part(&self) -> TestFunction {
        TestFunction::radial(self.dim, self.spherical_mean(), self.gauge, self.descriptor.clone())
    }

    /// The field minus its spherical mean (the `(0, 0)` modes dropped).
    pub fn without_radial_part(&self) -> Result<TestFunction> {
        if !self.pointwise.is_empty() {
            return Err(Error::Admissibility(
                "harmonic components of a pointwise-composed field are not available".into(),
            ));
        }
        let modes: Vec<Mode> = self.modes.iter().filter(|m| m.degree > 0).cloned().collect();
        if modes.is_empty() {
            let mut z = TestFunction::zero(self.dim);
            z.gauge = self.gauge;
            return Ok(z);
        }
        TestFunction::new(self.dim, modes, self.gauge, self.descriptor.clone())
    }

    /// `c` times the field.
    pub fn scaled(&self, c: f64) -> TestFunction {
        let mut out = self.clone();
        if out.pointwise.is_empty() {
            for m in &mut out.modes {
                m.profile = m.profile.map(|e| e.scaled(c));
            }
        } else {
            out.pointwise.push(PointwiseOp::Scale(c));
        }
        out.table = OnceLock::new();
        out
    }

    /// `x -> f(x / rho)`, `0 < rho <= 1`.
    pub fn dilated(&self, rho: f64) -> Result<TestFunction> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::domain("rho", rho, "(0, 1]"));
        }
        if !self.pointwise.is_empty() {
            return Err(Error::Admissibility(
                "dilation applies to synthesized fields only".into(),
            ));
        }
        let mut out = self.clone();
        for m in &mut out.modes {
            m.profile = RadialProfile::new(
                Expr::Dilate(rho, Box::new(m.profile.expr.clone())),
                m.profile.inner_cut * rho,
                m.profile.outer_cut * rho,
            );
        }
        out.descriptor = format!("{};rho={rho}", self.descriptor);
        Ok(out)
    }

    fn radial_weight(&self, r_pow: f64, x1_pow: f64) -> TestFunction {
        let mut out = self.clone();
        if out.pointwise.is_empty() {
            for m in &mut out.modes {
                m.profile = m.profile.map(|e| e.weighted(r_pow, x1_pow));
            }
        } else {
            out.pointwise.push(PointwiseOp::Weight { r_pow, x1_pow });
        }
        out
    }

    fn abs_pow(&self, q: f64) -> TestFunction {
        let mut out = self.clone();
        if out.is_radial() && out.pointwise.is_empty() {
            for m in &mut out.modes {
                m.profile = m.profile.map(|e| Expr::AbsPow(q, Box::new(e)));
            }
            if out.modes.len() > 1 {
                let parts = out.modes.iter().map(|m| m.profile.expr.clone()).collect();
                let inner = out.inner_cut();
                let outer = out.outer_cut();
                out.modes = vec![Mode {
                    degree: 0,
                    index: 0,
                    profile: RadialProfile::new(Expr::Sum(parts), inner, outer),
                }];
            }
        } else {
            out.pointwise.push(PointwiseOp::AbsPow(q));
        }
        out.table = OnceLock::new();
        out
    }

    fn step(&self, to: Gauge) -> Result<TestFunction> {
        let n = self.dim.as_f64();
        let next = match (self.gauge, to) {
            (Gauge::U, Gauge::V) => self.radial_weight(0.0, 1.0 - 1.0 / n),
            (Gauge::V, Gauge::U) => self.radial_weight(0.0, 1.0 / n - 1.0),
            (Gauge::V, Gauge::W) => self.abs_pow(n / 2.0),
            (Gauge::W, Gauge::Zeta) => {
                if self.dim.get() >= 3 && self.inner_cut() <= 0.0 {
                    return Err(Error::SingularGauge { n: self.dim.get() });
                }
                self.radial_weight(1.0 - n / 2.0, -0.5)
            }
            (Gauge::Zeta, Gauge::W) => self.radial_weight(n / 2.0 - 1.0, 0.5),
            (from, to) => {
                return Err(Error::GaugePath {
                    from: from.name(),
                    to: to.name(),
                })
            }
        };
        Ok(TestFunction { gauge: to, ..next })
    }

    /// Applies the pointwise gauge transforms needed to reach `target`.
    pub fn change_gauge(&self, target: Gauge) -> Result<TestFunction> {
        let mut cur = self.clone();
        while cur.gauge != target {
            let next = match (cur.gauge, target) {
                (Gauge::U, _) => Gauge::V,
                (Gauge::V, Gauge::U) => Gauge::U,
                (Gauge::V, _) => Gauge::W,
                (Gauge::W, Gauge::Zeta) => Gauge::Zeta,
                (Gauge::Zeta, _) => Gauge::W,
                (Gauge::W, _) => {
                    return Err(Error::GaugePath {
                        from: self.gauge.name(),
                        to: target.name(),
                    })
                }
            };
            cur = cur.step(next).map_err(|e| match e {
                Error::GaugePath { .. } => Error::GaugePath {
                    from: self.gauge.name(),
                    to: target.name(),
                },
                other => other,
            })?;
        }
        Ok(cur)
    }
}
