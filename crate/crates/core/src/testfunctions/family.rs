//! Parameterized test-function families and their text descriptors.
//!
//! A descriptor is a `;`-separated list of `key=value` pairs, for example
//! `kind=harmonic_mix;eps=0.2;amplitude=1;modes=0:0:1+2:-1:0.5`. Each mode
//! is `degree:index:amplitude`; on the circle the index may also be written
//! `cos` or `sin`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::field::{Gauge, Mode, TestFunction};
use super::profile::{Coord, Expr, RadialProfile};
use crate::error::{Error, Result};
use crate::specialfn::Dimension;

/// Every family vanishes for `r >= OUTER_CUT`.
pub const OUTER_CUT: f64 = 0.9;
/// Inner cut of the `ft_admissible` family.
pub const FT_INNER_CUT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `A (1 - S(r / 0.9))^(1 + 4 eps)`.
    Bump,
    /// `A X1^(1/n - 1 + eps) (1 - S((r - 1/2) / 0.4))`.
    HardyEps,
    /// `sum_k a_k A r^l_k (1 - S(r / 0.9)) h_k`.
    HarmonicMix,
    /// `A S((r - 0.1) / (0.05 + 0.3 eps)) (1 - S((r - 1/2) / 0.4))`, vanishing
    /// on `[0, 0.1]`, optionally times harmonics.
    FtAdmissible,
    /// `A S((t - t0) / L)` in the depth `t = -ln r`, `t0 = -ln 0.9`,
    /// `L = 1 / eps`: a plateau of height `A` around the origin.
    Moser,
    /// `A X1^(-1 + 1/n + eps/10) S((tau - tau0) / L)` in `tau = ln(1 + t)`,
    /// `L = 1 / eps`: a slowly decaying `v`-gauge plateau.
    Loglog,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 6] = [
        FamilyKind::Bump,
        FamilyKind::HardyEps,
        FamilyKind::HarmonicMix,
        FamilyKind::FtAdmissible,
        FamilyKind::Moser,
        FamilyKind::Loglog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Bump => "bump",
            FamilyKind::HardyEps => "hardy_eps",
            FamilyKind::HarmonicMix => "harmonic_mix",
            FamilyKind::FtAdmissible => "ft_admissible",
            FamilyKind::Moser => "moser",
            FamilyKind::Loglog => "loglog",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub degree: usize,
    pub index: i64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub kind: FamilyKind,
    pub eps: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub modes: Vec<ModeSpec>,
}

impl FamilyParams {
    pub fn new(kind: FamilyKind, eps: f64, amplitude: f64) -> Self {
        FamilyParams {
            kind,
            eps,
            amplitude,
            modes: Vec::new(),
        }
    }

    pub fn with_modes(mut self, modes: Vec<ModeSpec>) -> Self {
        self.modes = modes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidFamily(format!("eps = {} is outside (0, 1)", self.eps)));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidFamily("amplitude must be finite".into()));
        }
        if self.modes.iter().any(|m| !m.amplitude.is_finite()) {
            return Err(Error::InvalidFamily("mode amplitudes must be finite".into()));
        }
        Ok(())
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kind={};eps={};amplitude={}", self.kind, self.eps, self.amplitude)?;
        if !self.modes.is_empty() {
            let modes: Vec<String> = self
                .modes
                .iter()
                .map(|m| format!("{}:{}:{}", m.degree, m.index, m.amplitude))
                .collect();
            write!(f, ";modes={}", modes.join("+"))?;
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid value '{v}' for '{key}'")))
}

fn parse_mode(s: &str) -> Result<ModeSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("mode '{s}' is not degree:index:amplitude")));
    }
    let index = match parts[1].trim() {
        "cos" => 0,
        "sin" => 1,
        other => parse_num("mode index", other)?,
    };
    Ok(ModeSpec {
        degree: parse_num("mode degree", parts[0])?,
        index,
        amplitude: parse_num("mode amplitude", parts[2])?,
    })
}

impl FromStr for FamilyParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut p = FamilyParams::new(FamilyKind::Bump, 0.2, 1.0);
        for item in s.split(';').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, found '{item}'")))?;
            match k.trim() {
                "kind" => kind = Some(v.trim().parse()?),
                "eps" => p.eps = parse_num(k, v)?,
                "amplitude" => p.amplitude = parse_num(k, v)?,
                "modes" => {
                    p.modes = v
                        .split('+')
                        .filter(|m| !m.trim().is_empty())
                        .map(parse_mode)
                        .collect::<Result<_>>()?
                }
                other => return Err(Error::Parse(format!("unknown family key '{other}'"))),
            }
        }
        p.kind = kind.ok_or_else(|| Error::Parse("family descriptor needs kind=".into()))?;
        p.validate()?;
        Ok(p)
    }
}

fn outer_window() -> Expr {
    Expr::window(Coord::Radius, 0.5, OUTER_CUT, false)
}

fn bump_shape(power: f64) -> Expr {
    let w = Expr::window(Coord::Radius, 0.0, OUTER_CUT, false);
    if power == 1.0 {
        w
    } else {
        Expr::AbsPow(power, Box::new(w))
    }
}

/// `A S((t - t0) / width)` with `t0 = -ln 0.9`.
pub fn moser_profile(amplitude: f64, width: f64) -> RadialProfile {
    let t0 = -OUTER_CUT.ln();
    RadialProfile::new(
        Expr::window(Coord::Depth, t0, t0 + width, true).scaled(amplitude),
        0.0,
        OUTER_CUT,
    )
}

/// `A X1^(-1 + 1/n + delta) S((tau - tau0) / width)` with `tau0 = ln(1 - ln 0.9)`.
pub fn loglog_profile(dim: Dimension, amplitude: f64, width: f64, delta: f64) -> RadialProfile {
    let tau0 = (-OUTER_CUT.ln()).ln_1p();
    let n = dim.as_f64();
    RadialProfile::new(
        Expr::Product(vec![
            Expr::window(Coord::LogDepth, tau0, tau0 + width, true),
            Expr::weight(0.0, -1.0 + 1.0 / n + delta),
        ])
        .scaled(amplitude),
        0.0,
        OUTER_CUT,
    )
}

fn default_modes(dim: Dimension) -> Vec<ModeSpec> {
    let second = if dim.get() == 2 { 0 } else { 1 };
    vec![
        ModeSpec {
            degree: 0,
            index: 0,
            amplitude: 1.0,
        },
        ModeSpec {
            degree: 1,
            index: second,
            amplitude: 0.5,
        },
        ModeSpec {
            degree: 2,
            index: 0,
            amplitude: 0.25,
        },
    ]
}

/// Builds the family member described by `params` in the `u` gauge.
pub fn make_family(params: &FamilyParams, dim: Dimension) -> Result<TestFunction> {
    params.validate()?;
    let n = dim.as_f64();
    let a = params.amplitude;
    let eps = params.eps;
    let descriptor = params.to_string();
    if !params.modes.is_empty() && !matches!(params.kind, FamilyKind::HarmonicMix | FamilyKind::FtAdmissible) {
        return Err(Error::InvalidFamily(format!("{} takes no modes", params.kind)));
    }
    let radial = |profile| Ok(TestFunction::radial(dim, profile, Gauge::U, descriptor.clone()));
    match params.kind {
        FamilyKind::Bump => radial(RadialProfile::new(
            bump_shape(1.0 + 4.0 * eps).scaled(a),
            0.0,
            OUTER_CUT,
        )),
        FamilyKind::HardyEps => radial(RadialProfile::new(
            Expr::Product(vec![outer_window(), Expr::weight(0.0, 1.0 / n - 1.0 + eps)]).scaled(a),
            0.0,
            OUTER_CUT,
        )),
        FamilyKind::Moser => radial(moser_profile(a, 1.0 / eps)),
        FamilyKind::Loglog => radial(loglog_profile(dim, a, 1.0 / eps, eps / 10.0)),
        FamilyKind::HarmonicMix => {
            dim.require_nonradial("harmonic_mix (n in {2, 3})")?;
            let specs = if params.modes.is_empty() {
                default_modes(dim)
            } else {
                params.modes.clone()
            };
            let modes = specs
                .iter()
                .map(|m| Mode {
                    degree: m.degree,
                    index: m.index,
                    profile: RadialProfile::new(
                        bump_shape(1.0).weighted(m.degree as f64, 0.0).scaled(a * m.amplitude),
                        0.0,
                        OUTER_CUT,
                    ),
                })
                .collect();
            TestFunction::new(dim, modes, Gauge::U, descriptor)
        }
        FamilyKind::FtAdmissible => {
            let shape = Expr::Product(vec![
                Expr::window(Coord::Radius, FT_INNER_CUT, FT_INNER_CUT + 0.05 + 0.3 * eps, true),
                outer_window(),
            ]);
            let specs = if params.modes.is_empty() {
                vec![ModeSpec {
                    degree: 0,
                    index: 0,
                    amplitude: 1.0,
                }]
            } else {
                dim.require_nonradial("ft_admissible with modes (n in {2, 3})")?;
                params.modes.clone()
            };
            let modes = specs
                .iter()
                .map(|m| Mode {
                    degree: m.degree,
                    index: m.index,
                    profile: RadialProfile::new(shape.clone().scaled(a * m.amplitude), FT_INNER_CUT, OUTER_CUT),
                })
                .collect();
            TestFunction::new(dim, modes, Gauge::U, descriptor)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::SpherePoint;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn bump_support() {
        let f = make_family(&FamilyParams::new(FamilyKind::Bump, 0.2, 1.0), dim(3)).unwrap();
        assert_eq!(f.modes().len(), 1);
        assert_eq!(f.eval(&[0.95, 0.0, 0.0]), 0.0);
        assert_eq!(f.eval(&[0.0, 0.0, 0.9]), 0.0);
        assert!((f.eval(&[0.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hardy_eps_value() {
        let f = make_family(&FamilyParams::new(FamilyKind::HardyEps, 0.1, 1.0), dim(2)).unwrap();
        let r = (-1f64).exp();
        let expect = 0.5f64.powf(0.1 - 0.5);
        assert!((f.eval(&[r, 0.0]) - expect).abs() < 1e-13);
        assert!((expect - 1.3195).abs() < 1e-4);
    }

    #[test]
    fn harmonic_mix_synthesis() {
        let p = FamilyParams::new(FamilyKind::HarmonicMix, 0.2, 1.0).with_modes(vec![ModeSpec {
            degree: 1,
            index: 0,
            amplitude: 1.0,
        }]);
        let f = make_family(&p, dim(2)).unwrap();
        let profile = 0.5 * (1.0 - crate::testfunctions::smoothstep(0.5 / 0.9));
        let v = f.eval_polar(0.5, &SpherePoint::circle(0.0));
        assert!((v - profile * std::f64::consts::SQRT_2).abs() < 1e-14);
        assert!(make_family(&p, dim(4)).is_err());
    }

    #[test]
    fn ft_admissible_vanishes_near_origin() {
        let f = make_family(&FamilyParams::new(FamilyKind::FtAdmissible, 0.5, 2.0), dim(3)).unwrap();
        assert!((f.inner_cut() - 0.1).abs() < 1e-15);
        assert_eq!(f.eval(&[0.05, 0.0, 0.0]), 0.0);
        assert!(f.eval(&[0.3, 0.0, 0.0]) > 0.0);
    }

    #[test]
    fn descriptor_round_trip() {
        let p = FamilyParams::new(FamilyKind::HarmonicMix, 0.25, -1.5).with_modes(vec![
            ModeSpec {
                degree: 0,
                index: 0,
                amplitude: 1.0,
            },
            ModeSpec {
                degree: 3,
                index: -2,
                amplitude: 0.125,
            },
        ]);
        let q: FamilyParams = p.to_string().parse().unwrap();
        assert_eq!(p, q);
        let c: FamilyParams = "kind=harmonic_mix;eps=0.5;amplitude=1;modes=1:sin:2".parse().unwrap();
        assert_eq!(c.modes[0].index, 1);
    }

    #[test]
    fn invalid_descriptors() {
        assert!("kind=bump;eps=1.5".parse::<FamilyParams>().is_err());
        assert!("eps=0.5".parse::<FamilyParams>().is_err());
        assert!("kind=cube".parse::<FamilyParams>().is_err());
        assert!("kind=bump;colour=red".parse::<FamilyParams>().is_err());
    }
}
