//! Radial profiles as small expression trees evaluated in the depth variable.
//!
//! Values are carried as [`ScaledJet`]s: a mantissa and its `t`-derivative
//! together with a common logarithmic scale, so that products of large and
//! small weights (for instance `X1^(-1+1/n)` against `X1^n`) never overflow
//! even at depths where `r` itself underflows.

use std::sync::Arc;

use super::field::TestFunction;
use crate::quadrature::{tau_of_radius, RadialPoint};

/// Quintic smoothstep `6x^5 - 15x^4 + 10x^3` clamped to `[0, 1]`.
pub fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

pub fn smoothstep_derivative(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    30.0 * x * x * (1.0 - x) * (1.0 - x)
}

/// `e^scale * (value, dtau)`: a function value and its derivative with
/// respect to the log-depth `tau = ln(1 - ln r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledJet {
    pub scale: f64,
    pub value: f64,
    pub dtau: f64,
}

impl ScaledJet {
    pub const ZERO: ScaledJet = ScaledJet {
        scale: 0.0,
        value: 0.0,
        dtau: 0.0,
    };

    pub fn plain(value: f64, dtau: f64) -> Self {
        ScaledJet {
            scale: 0.0,
            value,
            dtau,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0.0 && self.dtau == 0.0
    }

    pub fn actual_value(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.value * self.scale.exp()
        }
    }

    /// Derivative with respect to the depth `t = -ln r`.
    pub fn actual_dt(&self, p: &RadialPoint) -> f64 {
        if self.dtau == 0.0 {
            0.0
        } else {
            self.dtau * (self.scale - p.tau).exp()
        }
    }

    pub(crate) fn chain(self, k: f64) -> ScaledJet {
        ScaledJet {
            dtau: self.dtau * k,
            ..self
        }
    }

    pub(crate) fn mul(self, o: ScaledJet) -> ScaledJet {
        if self.is_zero() || o.is_zero() {
            return ScaledJet::ZERO;
        }
        ScaledJet {
            scale: self.scale + o.scale,
            value: self.value * o.value,
            dtau: self.dtau * o.value + self.value * o.dtau,
        }
    }

    pub(crate) fn add(self, o: ScaledJet) -> ScaledJet {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let m = self.scale.max(o.scale);
        let a = (self.scale - m).exp();
        let b = (o.scale - m).exp();
        ScaledJet {
            scale: m,
            value: self.value * a + o.value * b,
            dtau: self.dtau * a + o.dtau * b,
        }
    }

    pub(crate) fn times(self, c: f64) -> ScaledJet {
        if c == 0.0 {
            return ScaledJet::ZERO;
        }
        ScaledJet {
            scale: self.scale,
            value: self.value * c,
            dtau: self.dtau * c,
        }
    }

    /// `|f|^p` with the derivative `p |f|^(p-1) sign(f) f'`.
    pub(crate) fn abs_pow(self, p: f64) -> ScaledJet {
        if self.is_zero() {
            return ScaledJet::ZERO;
        }
        let a = self.value.abs();
        let dtau = if a == 0.0 {
            if p > 1.0 {
                0.0
            } else {
                self.dtau.abs()
            }
        } else {
            p * a.powf(p - 1.0) * self.value.signum() * self.dtau
        };
        ScaledJet {
            scale: p * self.scale,
            value: a.powf(p),
            dtau,
        }
    }

    /// Multiplies by `r^a X1^b`.
    pub(crate) fn weighted(self, p: &RadialPoint, r_pow: f64, x1_pow: f64) -> ScaledJet {
        if self.is_zero() {
            return ScaledJet::ZERO;
        }
        let mut scale = self.scale;
        if r_pow != 0.0 {
            scale -= r_pow * p.t;
        }
        if x1_pow != 0.0 {
            scale -= x1_pow * p.tau;
        }
        let rate = if r_pow == 0.0 {
            -x1_pow
        } else {
            -r_pow * p.tau.exp() - x1_pow
        };
        ScaledJet {
            scale,
            value: self.value,
            dtau: self.dtau + rate * self.value,
        }
    }

    /// Rescales the mantissa to unit size when it drifts far from it.
    pub(crate) fn normalized(self) -> ScaledJet {
        let m = self.value.abs().max(self.dtau.abs());
        if m == 0.0 || (1e-100..1e100).contains(&m) {
            return self;
        }
        let l = m.ln();
        let k = (-l).exp();
        ScaledJet {
            scale: self.scale + l,
            value: self.value * k,
            dtau: self.dtau * k,
        }
    }
}

/// Coordinate in which a smoothstep window is linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    /// The radius `r`.
    Radius,
    /// The depth `t = -ln r`.
    Depth,
    /// The log-depth `tau = ln(1 + t)`.
    LogDepth,
}

impl Coord {
    fn value(self, p: &RadialPoint) -> f64 {
        match self {
            Coord::Radius => p.r(),
            Coord::Depth => p.t,
            Coord::LogDepth => p.tau,
        }
    }

    /// `d coordinate / dtau`.
    fn rate(self, p: &RadialPoint) -> f64 {
        match self {
            Coord::Radius => -(p.tau - p.t).exp(),
            Coord::Depth => p.tau.exp(),
            Coord::LogDepth => 1.0,
        }
    }

    fn to_tau(self, x: f64) -> f64 {
        match self {
            Coord::Radius => tau_of_radius(x.clamp(0.0, 1.0)),
            Coord::Depth => x.max(0.0).ln_1p(),
            Coord::LogDepth => x.max(0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Expr {
    Zero,
    Const(f64),
    /// `S((x - lo) / (hi - lo))`, or `1 - S(...)` when `rising` is false.
    Window {
        coord: Coord,
        lo: f64,
        hi: f64,
        rising: bool,
    },
    /// `r^p X1^a`.
    Weight { r_pow: f64, x1_pow: f64 },
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
    Scale(f64, Box<Expr>),
    AbsPow(f64, Box<Expr>),
    /// `x -> f(x / rho)` for `0 < rho <= 1`.
    Dilate(f64, Box<Expr>),
    /// Spherical mean of a field, evaluated by sphere quadrature.
    SphericalMean(Arc<TestFunction>),
}

impl Expr {
    pub fn window(coord: Coord, lo: f64, hi: f64, rising: bool) -> Expr {
        Expr::Window {
            coord,
            lo,
            hi,
            rising,
        }
    }

    pub fn weight(r_pow: f64, x1_pow: f64) -> Expr {
        Expr::Weight { r_pow, x1_pow }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Expr::Zero => true,
            Expr::Const(c) => *c == 0.0,
            Expr::Product(fs) => fs.iter().any(Expr::is_zero),
            Expr::Sum(fs) => fs.iter().all(Expr::is_zero),
            Expr::Scale(c, f) => *c == 0.0 || f.is_zero(),
            Expr::AbsPow(_, f) | Expr::Dilate(_, f) => f.is_zero(),
            _ => false,
        }
    }

    pub fn scaled(self, c: f64) -> Expr {
        if c == 1.0 {
            return self;
        }
        match self {
            Expr::Scale(d, f) => Expr::Scale(c * d, f),
            other => Expr::Scale(c, Box::new(other)),
        }
    }

    /// Multiplies by `r^r_pow X1^x1_pow`, merging with an existing weight
    /// factor so that inverse weights cancel exactly.
    pub fn weighted(self, r_pow: f64, x1_pow: f64) -> Expr {
        if r_pow == 0.0 && x1_pow == 0.0 {
            return self;
        }
        match self {
            Expr::Weight {
                r_pow: a,
                x1_pow: b,
            } => collapse_weight(a + r_pow, b + x1_pow),
            Expr::Scale(c, f) => Expr::Scale(c, Box::new(f.weighted(r_pow, x1_pow))),
            Expr::Product(mut fs) => {
                if let Some(pos) = fs.iter().position(|f| matches!(f, Expr::Weight { .. })) {
                    let w = fs.remove(pos);
                    let merged = w.weighted(r_pow, x1_pow);
                    if !matches!(merged, Expr::Const(_)) {
                        fs.insert(pos, merged);
                    }
                } else {
                    fs.insert(0, Expr::weight(r_pow, x1_pow));
                }
                if fs.len() == 1 {
                    fs.pop().expect("one factor")
                } else {
                    Expr::Product(fs)
                }
            }
            Expr::Zero => Expr::Zero,
            other => Expr::Product(vec![Expr::weight(r_pow, x1_pow), other]),
        }
    }

    pub fn eval(&self, p: &RadialPoint) -> ScaledJet {
        match self {
            Expr::Zero => ScaledJet::ZERO,
            Expr::Const(c) => ScaledJet::plain(*c, 0.0),
            Expr::Window {
                coord,
                lo,
                hi,
                rising,
            } => {
                let x = coord.value(p);
                let w = hi - lo;
                let s = (x - lo) / w;
                let (v, d) = if s <= 0.0 {
                    (0.0, 0.0)
                } else if s >= 1.0 {
                    (1.0, 0.0)
                } else {
                    (smoothstep(s), smoothstep_derivative(s) / w * coord.rate(p))
                };
                if *rising {
                    ScaledJet::plain(v, d)
                } else {
                    ScaledJet::plain(1.0 - v, -d)
                }
            }
            Expr::Weight { r_pow, x1_pow } => {
                if *r_pow > 0.0 && p.t.is_infinite() {
                    return ScaledJet::ZERO;
                }
                ScaledJet::plain(1.0, 0.0).weighted(p, *r_pow, *x1_pow)
            }
            Expr::Product(fs) => {
                let mut acc = ScaledJet::plain(1.0, 0.0);
                // windows first: a vanishing factor short-circuits weights
                // that may be unbounded at the same point
                let mut order: Vec<&Expr> = fs.iter().filter(|f| !matches!(f, Expr::Weight { .. })).collect();
                order.extend(fs.iter().filter(|f| matches!(f, Expr::Weight { .. })));
                for f in order {
                    let j = f.eval(p);
                    if j.is_zero() {
                        return ScaledJet::ZERO;
                    }
                    acc = acc.mul(j).normalized();
                }
                acc
            }
            Expr::Sum(fs) => fs
                .iter()
                .fold(ScaledJet::ZERO, |acc, f| acc.add(f.eval(p)))
                .normalized(),
            Expr::Scale(c, f) => f.eval(p).times(*c),
            Expr::AbsPow(q, f) => f.eval(p).abs_pow(*q),
            Expr::Dilate(rho, f) => {
                let t = p.t + rho.ln();
                if t < 0.0 {
                    return ScaledJet::ZERO;
                }
                let q = RadialPoint::from_log_depth(t);
                f.eval(&q).chain((p.tau - q.tau).exp())
            }
            Expr::SphericalMean(field) => field.spherical_mean_jet(p),
        }
    }

    /// Log-depths at which the expression has a kink in its second
    /// derivative or a cutoff.
    pub fn knots(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_knots(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_knots(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Window { coord, lo, hi, .. } => {
                out.push(coord.to_tau(*lo));
                out.push(coord.to_tau(*hi));
            }
            Expr::Product(fs) | Expr::Sum(fs) => fs.iter().for_each(|f| f.collect_knots(out)),
            Expr::Scale(_, f) | Expr::AbsPow(_, f) => f.collect_knots(out),
            Expr::Dilate(rho, f) => {
                let mut inner = Vec::new();
                f.collect_knots(&mut inner);
                out.extend(inner.into_iter().map(|tau| (tau.exp_m1() - rho.ln()).ln_1p()));
            }
            Expr::SphericalMean(field) => out.extend(field.knots()),
            _ => {}
        }
    }
}

fn collapse_weight(r_pow: f64, x1_pow: f64) -> Expr {
    if r_pow == 0.0 && x1_pow == 0.0 {
        Expr::Const(1.0)
    } else {
        Expr::weight(r_pow, x1_pow)
    }
}

/// A radial profile with its support data.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub expr: Expr,
    /// The profile vanishes on `[0, inner_cut]` (0 when it does not).
    pub inner_cut: f64,
    /// The profile vanishes on `[outer_cut, 1]`.
    pub outer_cut: f64,
}

impl RadialProfile {
    pub fn new(expr: Expr, inner_cut: f64, outer_cut: f64) -> Self {
        RadialProfile {
            expr,
            inner_cut,
            outer_cut,
        }
    }

    pub fn zero() -> Self {
        RadialProfile::new(Expr::Zero, 0.0, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    pub fn jet(&self, p: &RadialPoint) -> ScaledJet {
        let r = p.r();
        if r >= self.outer_cut || (self.inner_cut > 0.0 && r <= self.inner_cut) {
            return ScaledJet::ZERO;
        }
        self.expr.eval(p)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.jet(&RadialPoint::from_radius(r)).actual_value()
    }

    /// `d/dr` of the profile.
    pub fn deriv(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let p = RadialPoint::from_radius(r);
        -self.jet(&p).actual_dt(&p) / r
    }

    /// Knots in log-depth, including the cut points.
    pub fn knots(&self) -> Vec<f64> {
        let mut k = self.expr.knots();
        if self.outer_cut < 1.0 {
            k.push(tau_of_radius(self.outer_cut));
        }
        if self.inner_cut > 0.0 {
            k.push(tau_of_radius(self.inner_cut));
        }
        k.retain(|x| x.is_finite());
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    pub(crate) fn map(&self, f: impl FnOnce(Expr) -> Expr) -> RadialProfile {
        RadialProfile {
            expr: f(self.expr.clone()),
            ..self.clone()
        }
    }
}
