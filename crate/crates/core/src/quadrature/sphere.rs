//! Product quadrature on the circle and on the 2-sphere.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use super::QuadResult;
use crate::error::{Error, Result};
use crate::specialfn::Dimension;

/// A direction on `S^(n-1)` for `n` in {2, 3}. On the circle only `azimuth`
/// is meaningful and `polar` is fixed at `pi/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub polar: f64,
    pub azimuth: f64,
}

impl SpherePoint {
    pub fn circle(azimuth: f64) -> Self {
        SpherePoint {
            polar: 0.5 * PI,
            azimuth,
        }
    }

    pub fn new(polar: f64, azimuth: f64) -> Self {
        SpherePoint { polar, azimuth }
    }
}

#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub dim: Dimension,
    pub points: Vec<SpherePoint>,
    /// Surface weights; they sum to the area of the sphere.
    pub weights: Vec<f64>,
}

pub(crate) const CIRCLE_POINTS: usize = 64;
pub(crate) const POLAR_POINTS: usize = 24;
pub(crate) const AZIMUTH_POINTS: usize = 48;

impl SphereGrid {
    pub fn circle(points: usize) -> Self {
        let h = 2.0 * PI / points as f64;
        SphereGrid {
            dim: Dimension::new(2).expect("2 is a dimension"),
            points: (0..points).map(|k| SpherePoint::circle(k as f64 * h)).collect(),
            weights: vec![h; points],
        }
    }

    /// Gauss-Legendre in `cos(polar)` times the trapezoid rule in azimuth.
    pub fn sphere(polar: usize, azimuth: usize) -> Self {
        let (x, w) = gauss_legendre(polar);
        let h = 2.0 * PI / azimuth as f64;
        let mut points = Vec::with_capacity(polar * azimuth);
        let mut weights = Vec::with_capacity(polar * azimuth);
        for (xi, wi) in x.iter().zip(&w) {
            let theta = xi.acos();
            for k in 0..azimuth {
                points.push(SpherePoint::new(theta, k as f64 * h));
                weights.push(wi * h);
            }
        }
        SphereGrid {
            dim: Dimension::new(3).expect("3 is a dimension"),
            points,
            weights,
        }
    }

    /// Shared default-resolution grid.
    pub fn standard(dim: Dimension) -> Result<Arc<SphereGrid>> {
        static CIRCLE: OnceLock<Arc<SphereGrid>> = OnceLock::new();
        static SPHERE: OnceLock<Arc<SphereGrid>> = OnceLock::new();
        match dim.get() {
            2 => Ok(CIRCLE
                .get_or_init(|| Arc::new(SphereGrid::circle(CIRCLE_POINTS)))
                .clone()),
            3 => Ok(SPHERE
                .get_or_init(|| Arc::new(SphereGrid::sphere(POLAR_POINTS, AZIMUTH_POINTS)))
                .clone()),
            n => Err(Error::UnsupportedDimension {
                n,
                context: "sphere quadrature (n in {2, 3})",
            }),
        }
    }

    fn coarse(dim: Dimension) -> SphereGrid {
        match dim.get() {
            2 => SphereGrid::circle(CIRCLE_POINTS / 2),
            _ => SphereGrid::sphere(POLAR_POINTS / 2, AZIMUTH_POINTS / 2),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&SpherePoint) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// Integral over the unit sphere with respect to surface measure. The error
/// estimate is the difference to the half-resolution grid.
pub fn integrate_sphere(f: impl Fn(&SpherePoint) -> f64, dim: Dimension) -> Result<QuadResult> {
    let grid = SphereGrid::standard(dim)?;
    let value = grid.integrate(&f);
    let coarse = SphereGrid::coarse(dim);
    let rough = coarse.integrate(&f);
    Ok(QuadResult {
        value,
        error_estimate: (value - rough).abs(),
        evaluations: grid.len() + coarse.len(),
    })
}

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
pub(crate) fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_length() {
        let d = Dimension::new(2).unwrap();
        let r = integrate_sphere(|_| 1.0, d).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn sphere_area_and_moments() {
        let d = Dimension::new(3).unwrap();
        let area = integrate_sphere(|_| 1.0, d).unwrap();
        assert!((area.value - 4.0 * PI).abs() < 1e-12);
        // int z^2 = 4 pi / 3, int x^4 = 4 pi / 5
        let z2 = integrate_sphere(|p| p.polar.cos().powi(2), d).unwrap();
        assert!((z2.value - 4.0 * PI / 3.0).abs() < 1e-12);
        let x4 = integrate_sphere(|p| (p.polar.sin() * p.azimuth.cos()).powi(4), d).unwrap();
        assert!((x4.value - 4.0 * PI / 5.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn higher_dimensions_are_rejected() {
        let d = Dimension::new(4).unwrap();
        assert!(matches!(
            integrate_sphere(|_| 1.0, d),
            Err(Error::UnsupportedDimension { n: 4, .. })
        ));
    }
}
