//! Logarithmic weights, structural constants, the Gamma function and the two
//! vectorial inequalities used to linearise `n`-energies.
//!
//! The weights are defined on `[0, 1]`:
//!
//! ```text
//! X1(t) = 1 / (1 - ln t),   X1(0) = 0
//! X2(t) = X1(X1(t))
//! ```
//!
//! Both are increasing, equal to 1 at `t = 1` and vanish (logarithmically,
//! respectively doubly logarithmically) at the origin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this argument `X1` is reported as exactly zero.
const X1_CLAMP: f64 = 1e-300;

/// Ambient dimension `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension {
                n,
                context: "the ambient space (n >= 2 required)",
            });
        }
        Ok(Dimension(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Lebesgue measure of the unit ball.
    pub fn unit_ball_volume(self) -> f64 {
        let n = self.as_f64();
        PI.powf(n / 2.0) / gamma_unchecked(n / 2.0 + 1.0)
    }

    /// Surface measure of the unit sphere, `n * omega_n`.
    pub fn sphere_area(self) -> f64 {
        self.as_f64() * self.unit_ball_volume()
    }

    /// Spherical-harmonic synthesis is implemented for circles and 2-spheres only.
    pub fn supports_nonradial(self) -> bool {
        matches!(self.0, 2 | 3)
    }

    pub(crate) fn require_nonradial(self, context: &'static str) -> Result<()> {
        if self.supports_nonradial() {
            Ok(())
        } else {
            Err(Error::UnsupportedDimension { n: self.0, context })
        }
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dimension-dependent constants of the lower Hardy-Leray estimates and the
/// radial Moser summation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralConstants {
    /// `2^(n-1) - 1`
    pub lambda_n: f64,
    /// `lambda_n * (2n / (n-1))^(n-2)`
    pub kappa_n: f64,
    /// Volume of the unit ball.
    pub omega_n: f64,
    /// Supremum of admissible exponential coefficients in the radial case,
    /// `(4 omega_n n^(n-2) / kappa_n)^(1/(n-1))`.
    pub moser_threshold: f64,
}

pub fn structural_constants(dim: Dimension) -> StructuralConstants {
    let n = dim.as_f64();
    let lambda_n = lambda(dim.get());
    let kappa_n = lambda_n * (2.0 * n / (n - 1.0)).powi(dim.get() as i32 - 2);
    let omega_n = dim.unit_ball_volume();
    let moser_threshold =
        (4.0 * omega_n * n.powi(dim.get() as i32 - 2) / kappa_n).powf(1.0 / (n - 1.0));
    StructuralConstants {
        lambda_n,
        kappa_n,
        omega_n,
        moser_threshold,
    }
}

fn lambda(n: usize) -> f64 {
    2f64.powi(n as i32 - 1) - 1.0
}

/// `X1(t) = (1 - ln t)^(-1)` on `[0, 1]`, with `X1(0) = 0`.
pub fn x1(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("t", t, "[0, 1]"));
    }
    if t < X1_CLAMP {
        return Ok(0.0);
    }
    // ln t = ln1p(t - 1); t - 1 is exact for t in [1/2, 1].
    let minus_log = if t > 0.5 { -(t - 1.0).ln_1p() } else { -t.ln() };
    Ok(1.0 / (1.0 + minus_log))
}

/// `X2(t) = X1(X1(t))`.
pub fn x2(t: f64) -> Result<f64> {
    x1(x1(t)?)
}

/// `d/dt X1(t) = X1(t)^2 / t` on `(0, 1]`.
pub fn x1_derivative(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain("t", t, "(0, 1]"));
    }
    let w = x1(t)?;
    Ok(w * w / t)
}

// Lanczos approximation, g = 7, 9 terms.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler Gamma function for `x > 0`.
///
/// Integer arguments up to 171 are evaluated as exact factorial products; the
/// rest use the Lanczos approximation with reflection below 1/2.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("x", x, "(0, inf)"));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let series = lanczos_series(z);
    let w = z + LANCZOS_G + 0.5;
    // split the power so that w^(z + 1/2) does not overflow before e^-w applies
    let half = w.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-w).exp()) * series
}

fn lanczos_series(z: f64) -> f64 {
    LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (z + (i + 1) as f64))
}

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("x", x, "(0, inf)"));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x <= 171.0 {
        return gamma_unchecked(x).ln();
    }
    let z = x - 1.0;
    let w = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * w.ln() - w + lanczos_series(z).ln()
}

/// Which pointwise lower bound for `|b - a|^n - |a|^n` to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VecVariant {
    /// `|b-a|^n - |a|^n >= |a|^(n-2)|b|^2 / (lambda_n 2^(n-2)) - n |a|^(n-2) a.b`
    Improved,
    /// `|b-a|^n - |a|^n >= |b|^n / lambda_n - n |a|^(n-2) a.b`
    Classic,
}

/// Gap between the two sides of a vectorial inequality; nonnegative whenever
/// the inequality holds.
pub fn vec_gap(a: &[f64], b: &[f64], n_exp: usize, variant: VecVariant) -> Result<f64> {
    if n_exp < 2 {
        return Err(Error::domain("n_exp", n_exp as f64, "integers >= 2"));
    }
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::domain(
            "vector length",
            b.len() as f64,
            "equal, nonzero lengths",
        ));
    }
    let n = n_exp as i32;
    let norm_a = norm(a);
    let norm_b = norm(b);
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (y - x) * (y - x))
        .sum::<f64>()
        .sqrt();
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let a_pow = norm_a.powi(n - 2);
    let lam = lambda(n_exp);
    let linear = n as f64 * a_pow * dot;
    let gap = match variant {
        VecVariant::Improved => {
            let c = 1.0 / (lam * 2f64.powi(n - 2));
            diff.powi(n) - norm_a.powi(n) - c * a_pow * norm_b * norm_b + linear
        }
        VecVariant::Classic => diff.powi(n) - norm_a.powi(n) - norm_b.powi(n) / lam + linear,
    };
    Ok(gap)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn x1_reference_values() {
        assert_eq!(x1(1.0).unwrap(), 1.0);
        assert_relative_eq!(x1((-1f64).exp()).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(x1(0.0).unwrap(), 0.0);
        assert_eq!(x1(1e-301).unwrap(), 0.0);
    }

    #[test]
    fn x2_reference_values() {
        assert_eq!(x2(1.0).unwrap(), 1.0);
        assert_relative_eq!(
            x2((-1f64).exp()).unwrap(),
            1.0 / (1.0 + 2f64.ln()),
            max_relative = 1e-15
        );
        assert_relative_eq!(x2((-1f64).exp()).unwrap(), 0.590616, epsilon = 1e-6);
        assert_eq!(x2(0.0).unwrap(), 0.0);
    }

    #[test]
    fn weights_reject_out_of_range() {
        assert!(x1(-1e-12).is_err());
        assert!(x1(1.0 + 1e-12).is_err());
        assert!(x2(f64::NAN).is_err());
        assert!(x1_derivative(0.0).is_err());
        assert!(x1_derivative(-0.5).is_err());
    }

    #[test]
    fn x1_derivative_reference_values() {
        assert_eq!(x1_derivative(1.0).unwrap(), 1.0);
        assert_relative_eq!(
            x1_derivative((-1f64).exp()).unwrap(),
            0.25 * E,
            max_relative = 1e-14
        );
    }

    #[test]
    fn x1_derivative_matches_central_differences() {
        let (t, h) = (0.3, 1e-6);
        let fd = (x1(t + h).unwrap() - x1(t - h).unwrap()) / (2.0 * h);
        let exact = x1_derivative(t).unwrap();
        assert!(((fd - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn structural_constants_n2() {
        let c = structural_constants(Dimension::new(2).unwrap());
        assert_eq!(c.lambda_n, 1.0);
        assert_eq!(c.kappa_n, 1.0);
        assert!((c.moser_threshold - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn structural_constants_n3() {
        let c = structural_constants(Dimension::new(3).unwrap());
        assert_eq!(c.lambda_n, 3.0);
        assert_eq!(c.kappa_n, 9.0);
        let omega3 = 4.0 * PI / 3.0;
        assert_relative_eq!(c.omega_n, omega3, max_relative = 1e-15);
        assert_relative_eq!(
            c.moser_threshold,
            (12.0 * omega3 / 9.0).sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn dimension_rejects_one() {
        assert!(Dimension::new(1).is_err());
        assert!(Dimension::new(0).is_err());
    }

    #[test]
    fn gamma_reference_values() {
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_relative_eq!(gamma_fn(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(
            gamma_fn(1.0 / 3.0).unwrap(),
            2.678_938_534_707_747_6,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gamma_fn(0.25).unwrap(),
            3.625_609_908_221_908,
            max_relative = 1e-14
        );
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-2.5).is_err());
    }

    #[test]
    fn gamma_half_integers_against_double_factorial() {
        // Gamma(k + 1/2) = (2k-1)!! / 2^k * sqrt(pi)
        let mut ratio = PI.sqrt();
        for k in 1..150u32 {
            ratio *= (2 * k - 1) as f64 / 2.0;
            let x = k as f64 + 0.5;
            let g = gamma_fn(x).unwrap();
            assert!(
                ((g - ratio) / ratio).abs() < 1e-13,
                "k = {k}: {g} vs {ratio}"
            );
        }
    }

    #[test]
    fn ln_gamma_consistent_with_gamma() {
        for &x in &[0.1, 0.7, 3.3, 17.5, 99.9, 170.2] {
            let lg = ln_gamma(x).unwrap();
            assert!((lg - gamma_fn(x).unwrap().ln()).abs() < 1e-12 * lg.abs().max(1.0));
        }
        // beyond the f64 range of Gamma itself
        let big = ln_gamma(300.0).unwrap();
        let stirling = 299.5 * 300f64.ln() - 300.0 + 0.5 * (2.0 * PI).ln() + 1.0 / 3600.0;
        assert!((big - stirling).abs() < 1e-9);
    }

    #[test]
    fn vec_gap_trivial_cases() {
        let a = [0.3, -1.2, 0.7];
        let zero = [0.0; 3];
        for variant in [VecVariant::Improved, VecVariant::Classic] {
            for n in 2..=6 {
                assert!(vec_gap(&a, &zero, n, variant).unwrap().abs() < 1e-14);
            }
        }
        assert!(vec_gap(&a, &a, 2, VecVariant::Improved).unwrap().abs() < 1e-14);
        assert!(vec_gap(&a, &a, 1, VecVariant::Improved).is_err());
        assert!(vec_gap(&a, &a[..2], 3, VecVariant::Classic).is_err());
    }

    #[test]
    fn vec_gap_variants_coincide_for_n2() {
        let a = [0.4, 1.5];
        let b = [-2.0, 0.25];
        let i = vec_gap(&a, &b, 2, VecVariant::Improved).unwrap();
        let c = vec_gap(&a, &b, 2, VecVariant::Classic).unwrap();
        assert_eq!(i, c);
        assert!(i.abs() < 1e-14);
    }
}
