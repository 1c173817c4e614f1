//! Admissible test functions on the unit ball: radial profiles, harmonic
//! synthesis, gauge transforms and parameterized families.

mod family;
mod field;
mod harmonics;
mod profile;

pub use family::{
    loglog_profile, make_family, moser_profile, FamilyKind, FamilyParams, ModeSpec, FT_INNER_CUT, OUTER_CUT,
};
pub use field::{FieldJet, Gauge, Mode, PointwiseOp, TestFunction};
pub use harmonics::{harmonic, harmonic_eigenvalue, HarmonicJet, MAX_DEGREE};
pub use profile::{smoothstep, smoothstep_derivative, Coord, Expr, RadialProfile, ScaledJet};

/// Gauge-transforms `f`; free-function form of [`TestFunction::change_gauge`].
pub fn change_gauge(f: &TestFunction, target: Gauge) -> crate::Result<TestFunction> {
    f.change_gauge(target)
}

/// Spherical mean of `f`; free-function form of [`TestFunction::spherical_mean`].
pub fn spherical_mean(f: &TestFunction) -> RadialProfile {
    f.spherical_mean()
}
