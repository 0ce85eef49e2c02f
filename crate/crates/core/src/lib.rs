pub mod bivariate;
pub mod dependence;
pub mod error;
pub mod estimation;
pub mod family;
pub mod optimize;
pub mod partial;
pub mod quadrature;
mod roots;
pub mod sampling;
pub mod special;
pub mod trivariate;

pub use bivariate::{Bivariate, BivariateCopula, TailSide};
pub use dependence::{
    cond_corr_profile, expected_conditional_measure, kendall_tau, partial_correlation,
    partial_correlation_demo, spearman_rho, summarize, tail_coefficient, DependenceSummary,
    Measure, Method, PartialCorrelationRow,
};
pub use estimation::{
    estimator_experiment, fit_joint, fit_stepwise, run_scenario, separation_statement, simulate,
    summarize_differences, CoordinateSummary, ExperimentReport, FitMode, FitResult, MLModel,
    Replicate, Scenario, ScenarioReport,
};
pub use error::{CopulaError, Result};
pub use family::{frank_tau, frank_tau_to_theta, validate, Family, FamilySpec};
pub use partial::{
    associativity_check, conditional_copula, kl_divergence, l2_projection_bruteforce,
    l2_projection_fgm, partial_cdf, partial_pdf, ConditionalFamily, MixingLaw, Mode, PartialCopula,
};
pub use optimize::{NelderMead, Optimum};
pub use quadrature::{gauss_rule, QuadratureRule};
pub use sampling::{
    cpit, empirical_copula, quadratic_design, sample_trivariate, EmpiricalCopula, SampleSet,
};
pub use trivariate::{Given, TrivariateCopula};

pub use nalgebra;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/partial-copulas.md")]
    pub struct PartialCopulas;
    #[doc = include_str!("../../../book/src/dependence-measures.md")]
    pub struct DependenceMeasures;
    #[doc = include_str!("../../../book/src/projections.md")]
    pub struct Projections;
    #[doc = include_str!("../../../book/src/partial-correlation.md")]
    pub struct PartialCorrelation;
    #[doc = include_str!("../../../book/src/sampling.md")]
    pub struct Sampling;
    #[doc = include_str!("../../../book/src/estimation.md")]
    pub struct Estimation;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
