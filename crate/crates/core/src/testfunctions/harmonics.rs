//! Real spherical harmonics on the circle and on the 2-sphere, normalized so
//! that their mean square over the sphere is one (hence `h_0 = 1`).
//!
//! Indexing: on the circle, `(l, 0)` is `sqrt(2) cos(l phi)` and `(l, 1)` is
//! `sqrt(2) sin(l phi)` (with `(0, 0) = 1`). On the 2-sphere, `(l, m)` with
//! `-l <= m <= l` is `p_l^|m|(cos theta)` times `1`, `sqrt(2) cos(m phi)` or
//! `sqrt(2) sin(|m| phi)` for `m = 0`, `m > 0`, `m < 0` respectively.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::quadrature::{SphereGrid, SpherePoint};
use crate::specialfn::Dimension;

pub const MAX_DEGREE: usize = 20;

/// Value and tangential gradient of a harmonic. On the circle the gradient is
/// `[d/dphi, 0]`; on the sphere it is `[d/dtheta, (1/sin theta) d/dphi]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HarmonicJet {
    pub value: f64,
    pub grad: [f64; 2],
}

/// Laplace-Beltrami eigenvalue `l (l + n - 2)` of degree-`l` harmonics.
pub fn harmonic_eigenvalue(l: usize, dim: Dimension) -> f64 {
    let l = l as f64;
    l * (l + dim.as_f64() - 2.0)
}

pub(crate) fn validate_index(dim: Dimension, l: usize, m: i64) -> Result<()> {
    dim.require_nonradial("spherical-harmonic synthesis (n in {2, 3})")?;
    let ok = match dim.get() {
        2 => (l == 0 && m == 0) || (l > 0 && (m == 0 || m == 1)),
        _ => l <= MAX_DEGREE && m.unsigned_abs() as usize <= l,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidFamily(format!(
            "no harmonic ({l}, {m}) in dimension {dim}"
        )))
    }
}

/// Evaluates the harmonic `(l, m)` at a direction.
pub fn harmonic(dim: Dimension, l: usize, m: i64, s: &SpherePoint) -> HarmonicJet {
    match dim.get() {
        2 => circle_harmonic(l, m, s.azimuth),
        _ => sphere_harmonic(l, m, s.polar, s.azimuth),
    }
}

fn circle_harmonic(l: usize, m: i64, phi: f64) -> HarmonicJet {
    if l == 0 {
        return HarmonicJet {
            value: 1.0,
            grad: [0.0, 0.0],
        };
    }
    let lf = l as f64;
    let (s, c) = (lf * phi).sin_cos();
    if m == 0 {
        HarmonicJet {
            value: SQRT_2 * c,
            grad: [-SQRT_2 * lf * s, 0.0],
        }
    } else {
        HarmonicJet {
            value: SQRT_2 * s,
            grad: [SQRT_2 * lf * c, 0.0],
        }
    }
}

/// `p_l^m(cos theta)` and its theta-derivative, mean-square normalized over
/// the sphere, for `0 <= m <= l`.
pub(crate) fn legendre_normalized(l: usize, m: usize, theta: f64) -> (f64, f64) {
    let (sn, x) = theta.sin_cos();
    let mut pmm = 1.0;
    for k in 1..=m {
        let kf = k as f64;
        pmm *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * sn;
    }
    if l == m {
        let d = if m == 0 { 0.0 } else { m as f64 * x / sn * pmm };
        return (pmm, if sn == 0.0 { 0.0 } else { d });
    }
    let mf = m as f64;
    let mut prev = pmm;
    let mut cur = (2.0 * mf + 3.0).sqrt() * x * pmm;
    for k in (m + 2)..=l {
        let kf = k as f64;
        let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
        let b = (((kf - 1.0).powi(2) - mf * mf) / (4.0 * (kf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
    }
    let lf = l as f64;
    if sn == 0.0 {
        return (cur, 0.0);
    }
    let c = ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf * lf - mf * mf)).sqrt();
    let d = (lf * x * cur - c * prev) / sn;
    (cur, d)
}

fn sphere_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> HarmonicJet {
    let am = m.unsigned_abs() as usize;
    let (p, dp) = legendre_normalized(l, am, theta);
    if m == 0 {
        return HarmonicJet {
            value: p,
            grad: [dp, 0.0],
        };
    }
    let mf = am as f64;
    let (s, c) = (mf * phi).sin_cos();
    let (trig, dtrig) = if m > 0 {
        (SQRT_2 * c, -SQRT_2 * mf * s)
    } else {
        (SQRT_2 * s, SQRT_2 * mf * c)
    };
    let sn = theta.sin();
    let azimuthal = if sn == 0.0 { 0.0 } else { p * dtrig / sn };
    HarmonicJet {
        value: p * trig,
        grad: [dp * trig, azimuthal],
    }
}

/// Harmonic values tabulated on a quadrature grid, one row per mode.
#[derive(Debug, Clone)]
pub(crate) struct HarmonicTable {
    pub rows: Vec<Vec<HarmonicJet>>,
}

impl HarmonicTable {
    pub fn new(dim: Dimension, modes: &[(usize, i64)], grid: &SphereGrid) -> Self {
        HarmonicTable {
            rows: modes
                .iter()
                .map(|&(l, m)| grid.points.iter().map(|s| harmonic(dim, l, m, s)).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_sphere;

    fn all_modes(dim: Dimension, lmax: usize) -> Vec<(usize, i64)> {
        let mut v = vec![(0, 0)];
        for l in 1..=lmax {
            match dim.get() {
                2 => v.extend([(l, 0), (l, 1)]),
                _ => v.extend((-(l as i64)..=l as i64).map(|m| (l, m))),
            }
        }
        v
    }

    #[test]
    fn eigenvalues() {
        let d2 = Dimension::new(2).unwrap();
        let d3 = Dimension::new(3).unwrap();
        assert_eq!(harmonic_eigenvalue(0, d3), 0.0);
        assert_eq!(harmonic_eigenvalue(1, d3), 2.0);
        assert_eq!(harmonic_eigenvalue(2, d2), 4.0);
    }

    #[test]
    fn orthonormal_in_mean() {
        for n in [2, 3] {
            let dim = Dimension::new(n).unwrap();
            let modes = all_modes(dim, if n == 2 { 20 } else { 6 });
            let area = dim.sphere_area();
            for &(l1, m1) in &modes {
                for &(l2, m2) in &modes {
                    let r = integrate_sphere(
                        |s| harmonic(dim, l1, m1, s).value * harmonic(dim, l2, m2, s).value,
                        dim,
                    )
                    .unwrap();
                    let expect = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                    assert!((r.value / area - expect).abs() < 1e-10, "{n}: {l1},{m1} {l2},{m2}");
                }
            }
        }
    }

    #[test]
    fn nonconstant_harmonics_have_zero_mean() {
        let dim = Dimension::new(3).unwrap();
        for &(l, m) in &[(1, 0), (3, -2), (20, 20), (20, -7), (12, 0)] {
            let r = integrate_sphere(|s| harmonic(dim, l, m, s).value, dim).unwrap();
            assert!(r.value.abs() < 1e-12, "({l},{m}): {}", r.value);
        }
    }

    #[test]
    fn degree_twenty_normalization() {
        let dim = Dimension::new(3).unwrap();
        for m in [-20, -11, 0, 5, 20] {
            let r = integrate_sphere(|s| harmonic(dim, 20, m, s).value.powi(2), dim).unwrap();
            assert!((r.value / (4.0 * std::f64::consts::PI) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let dim = Dimension::new(3).unwrap();
        let h = 1e-6;
        for &(l, m) in &[(1, 1), (2, -1), (5, 3), (7, 0), (9, -9)] {
            let (th, ph) = (0.9, 2.1);
            let g = harmonic(dim, l, m, &SpherePoint::new(th, ph));
            let dth = (harmonic(dim, l, m, &SpherePoint::new(th + h, ph)).value
                - harmonic(dim, l, m, &SpherePoint::new(th - h, ph)).value)
                / (2.0 * h);
            let dph = (harmonic(dim, l, m, &SpherePoint::new(th, ph + h)).value
                - harmonic(dim, l, m, &SpherePoint::new(th, ph - h)).value)
                / (2.0 * h);
            assert!((g.grad[0] - dth).abs() < 1e-6 * (1.0 + dth.abs()), "({l},{m}) theta");
            assert!((g.grad[1] - dph / th.sin()).abs() < 1e-6 * (1.0 + dph.abs()), "({l},{m}) phi");
        }
    }

    #[test]
    fn dirichlet_energy_equals_eigenvalue() {
        // mean of |grad h|^2 over the sphere is l (l + n - 2)
        for n in [2, 3] {
            let dim = Dimension::new(n).unwrap();
            for &(l, m) in &[(1, 0), (2, 1), (4, if n == 2 { 0 } else { -3 })] {
                let r = integrate_sphere(
                    |s| {
                        let g = harmonic(dim, l, m, s).grad;
                        g[0] * g[0] + g[1] * g[1]
                    },
                    dim,
                )
                .unwrap();
                let mean = r.value / dim.sphere_area();
                assert!((mean - harmonic_eigenvalue(l, dim)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn invalid_indices() {
        let d2 = Dimension::new(2).unwrap();
        let d3 = Dimension::new(3).unwrap();
        let d4 = Dimension::new(4).unwrap();
        assert!(validate_index(d2, 0, 1).is_err());
        assert!(validate_index(d2, 3, 2).is_err());
        assert!(validate_index(d3, 2, 3).is_err());
        assert!(validate_index(d3, 21, 0).is_err());
        assert!(validate_index(d4, 1, 0).is_err());
        assert!(validate_index(d3, 20, -20).is_ok());
    }
}
