//! Numerical toolkit for the optimal Leray-Trudinger inequality on the unit
//! ball: logarithmic weights, singular-endpoint quadrature, test-function
//! families with their gauge transforms, the functionals the inequality is
//! built from, and a verifier that checks each stated identity and estimate.

pub mod error;
pub mod functionals;
pub mod quadrature;
pub mod specialfn;
pub mod testfunctions;
pub mod verifier;

pub use error::{Error, Result};
pub use functionals::{
    evaluate, ft_difference, hardy_difference, integrate_ball, leray_functional, moser_functional, weighted_energy,
    weighted_lq_norm, EnergyKind, Functional, FunctionalValue, MoserValue,
};
pub use quadrature::{
    integrate_radial, integrate_sphere, mc_oracle, QuadConfig, QuadResult, RadialPoint, SpherePoint, WeightSpec,
};
pub use specialfn::{
    gamma_fn, structural_constants, vec_gap, x1, x1_derivative, x2, Dimension, StructuralConstants, VecVariant,
};
pub use testfunctions::{
    change_gauge, make_family, spherical_mean, FamilyKind, FamilyParams, Gauge, ModeSpec, RadialProfile, TestFunction,
};
pub use verifier::{
    check, growth_fit, run_suite, sharpness_probe, CheckReport, GrowthFit, GrowthMode, ProbeReport, Status, Suite,
    Verdict,
};
