//! Checks of every stated identity and estimate, suite orchestration, the
//! sharpness probe and the growth-rate estimator.

mod checks;
mod growth;
mod nonfinite;
mod probe;
mod report;
mod suite;

pub use checks::{
    check, check_class, default_tolerance, CheckClass, CheckContext, CHECK_IDS, DILATIONS, GROWTH_Q, KEY_RADIAL_Q,
    ONEDIM_GRID_POINTS,
};
pub use growth::{growth_check, growth_family, growth_fit, GrowthFit, GrowthMode, GROWTH_WIDTHS};
pub use probe::{sharpness_probe, ProbeReport, Verdict};
pub use report::{CheckReport, Status, INEQUALITY_REL_SLACK, RATIO_SLACK};
pub use suite::{ft_members, nonradial_members, radial_members, run_suite, run_suite_with, Suite};
