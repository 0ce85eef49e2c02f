//! Joint and stepwise maximum likelihood for a Gaussian location model with
//! an FGM copula on the conditional probability integral transforms.

use std::cell::Cell;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bivariate::{Bivariate, BivariateCopula};
use crate::error::{CopulaError, Result};
use crate::optimize::NelderMead;
use crate::partial::ConditionalFamily;
use crate::roots::solve_increasing;
use crate::sampling::{open_uniform, rng, SampleSet, GENERATOR_ID};
use crate::special::norm_quantile;

pub const PARAM_NAMES: [&str; 3] = ["theta1", "theta2", "theta3"];

/// `Yᵢ | Z = z ~ N(θᵢ z, 1)` for `i = 1, 2`, and an FGM(θ₃) copula for the
/// pair of conditional probability integral transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLModel {
    pub bounds: [(f64, f64); 3],
}

impl Default for MLModel {
    fn default() -> Self {
        MLModel {
            bounds: [(-10.0, 10.0), (-10.0, 10.0), (-1.0, 1.0)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    Joint,
    Stepwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub estimates: [f64; 3],
    /// Mean full log-likelihood at the estimates.
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    pub mode: FitMode,
}

struct Design<'a> {
    y1: &'a [f64],
    y2: &'a [f64],
    z: &'a [f64],
}

impl<'a> Design<'a> {
    fn from(data: &'a SampleSet) -> Result<Self> {
        let d = Design {
            y1: data.require("y1")?,
            y2: data.require("y2")?,
            z: data.require("z")?,
        };
        if d.z.is_empty() {
            return Err(CopulaError::InvalidInput("no observations".into()));
        }
        Ok(d)
    }

    fn n(&self) -> f64 {
        self.z.len() as f64
    }
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// 1 − 2Φ(r), the FGM score of a residual
fn fgm_score(r: f64) -> f64 {
    -libm::erf(r * FRAC_1_SQRT_2)
}

impl MLModel {
    /// Mean log-likelihood of `(θ₁, θ₂, θ₃)` on data with columns `y1`, `y2`,
    /// `z`.
    pub fn mean_loglik(&self, data: &SampleSet, theta: &[f64; 3]) -> Result<f64> {
        Ok(loglik(&Design::from(data)?, theta))
    }

    fn check_bounds(&self, theta: &[f64; 3]) -> Result<()> {
        for (k, (&t, &(lo, hi))) in theta.iter().zip(&self.bounds).enumerate() {
            if t <= lo || t >= hi {
                return Err(CopulaError::ParameterAtBound {
                    name: PARAM_NAMES[k],
                    value: t.clamp(lo, hi),
                });
            }
        }
        Ok(())
    }
}

fn loglik(d: &Design, theta: &[f64; 3]) -> f64 {
    let mut total = 0.0;
    for i in 0..d.z.len() {
        let r1 = d.y1[i] - theta[0] * d.z[i];
        let r2 = d.y2[i] - theta[1] * d.z[i];
        let c = 1.0 + theta[2] * fgm_score(r1) * fgm_score(r2);
        total += -0.5 * (r1 * r1 + r2 * r2) - 2.0 * LN_SQRT_2PI + c.ln();
    }
    total / d.n()
}

/// Margins by least squares, then `θ₃` by maximizing the copula likelihood
/// of the fitted transforms.
pub fn fit_stepwise(data: &SampleSet, model: &MLModel) -> Result<FitResult> {
    let d = Design::from(data)?;
    let zz: f64 = d.z.iter().map(|z| z * z).sum();
    if !(zz > 0.0) {
        return Err(CopulaError::OptimizerDiverged(
            "conditioning column is identically zero".into(),
        ));
    }
    let slope = |y: &[f64]| y.iter().zip(d.z).map(|(y, z)| y * z).sum::<f64>() / zz;
    let (t1, t2) = (slope(d.y1), slope(d.y2));
    let scores: Vec<f64> = (0..d.z.len())
        .map(|i| fgm_score(d.y1[i] - t1 * d.z[i]) * fgm_score(d.y2[i] - t2 * d.z[i]))
        .collect();
    // the copula log-likelihood is concave in θ₃; find the zero of its
    // derivative, which is decreasing
    let evals = Cell::new(0usize);
    let neg_score = |t: f64| {
        evals.set(evals.get() + 1);
        -scores.iter().map(|a| a / (1.0 + t * a)).sum::<f64>() / d.n()
    };
    let (lo, hi) = model.bounds[2];
    let t3 = if neg_score(lo) >= 0.0 {
        lo
    } else if neg_score(hi) <= 0.0 {
        hi
    } else {
        solve_increasing(neg_score, 0.0, lo, hi, 1e-12)?
    };
    let estimates = [t1, t2, t3];
    model.check_bounds(&estimates)?;
    let value = loglik(&d, &estimates);
    if !value.is_finite() {
        return Err(CopulaError::OptimizerDiverged(format!(
            "log-likelihood {value} at the stepwise estimate"
        )));
    }
    Ok(FitResult {
        estimates,
        loglik: value,
        iterations: evals.get(),
        converged: true,
        mode: FitMode::Stepwise,
    })
}

/// Maximizes the full likelihood by a simplex search started at the stepwise
/// estimate.
pub fn fit_joint(data: &SampleSet, model: &MLModel) -> Result<FitResult> {
    let start = fit_stepwise(data, model)?.estimates;
    fit_joint_from(data, model, &start)
}

/// [`fit_joint`] from an explicit starting point.
pub fn fit_joint_from(data: &SampleSet, model: &MLModel, start: &[f64; 3]) -> Result<FitResult> {
    let d = Design::from(data)?;
    let opt = NelderMead::default().maximize(
        |x| loglik(&d, &[x[0], x[1], x[2]]),
        start,
        &model.bounds,
    );
    if !opt.value.is_finite() {
        return Err(CopulaError::OptimizerDiverged(format!(
            "log-likelihood {} after {} iterations",
            opt.value, opt.iterations
        )));
    }
    Ok(FitResult {
        estimates: [opt.x[0], opt.x[1], opt.x[2]],
        loglik: opt.value,
        iterations: opt.iterations,
        converged: opt.converged,
        mode: FitMode::Joint,
    })
}

/// Data-generating processes of the estimator comparison. `Z` is uniform,
/// the margins are `N(z, 1)`, and the scenarios differ in the copula of the
/// transforms given `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// FGM(0.5) at every `z`.
    Simplified,
    /// FGM(0.5) plus a radially asymmetric term with weight `0.25(1 − 2z)`;
    /// the partial copula is still FGM(0.5).
    NonSimplified,
    /// FGM(1 − 2z), whose partial copula is the product copula.
    SymmetricFgm,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::Simplified,
        Scenario::NonSimplified,
        Scenario::SymmetricFgm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Simplified => "simplified",
            Scenario::NonSimplified => "nonsimplified",
            Scenario::SymmetricFgm => "symmetric",
        }
    }

    pub fn parse(s: &str) -> Option<Scenario> {
        Scenario::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn conditional(self) -> ConditionalFamily {
        match self {
            Scenario::Simplified => ConditionalFamily::Constant(Bivariate::Fgm { theta: 0.5 }),
            Scenario::NonSimplified => ConditionalFamily::SkewFgm {
                theta: 0.5,
                skew: 0.25,
            },
            Scenario::SymmetricFgm => ConditionalFamily::FgmLinear { theta: 1.0 },
        }
    }

    /// Margin slopes and the FGM parameter of the partial copula.
    pub fn truth(self) -> [f64; 3] {
        match self {
            Scenario::Simplified | Scenario::NonSimplified => [1.0, 1.0, 0.5],
            Scenario::SymmetricFgm => [1.0, 1.0, 0.0],
        }
    }

    fn stream_base(self) -> u64 {
        match self {
            Scenario::Simplified => 1 << 32,
            Scenario::NonSimplified => 2 << 32,
            Scenario::SymmetricFgm => 3 << 32,
        }
    }
}

/// Draws `n` observations `(y1, y2, z)` of a scenario from stream `stream`.
pub fn simulate(scenario: Scenario, n: usize, seed: u64, stream: u64) -> Result<SampleSet> {
    let cf = scenario.conditional();
    let [t1, t2, _] = scenario.truth();
    let mut g = rng(seed, stream);
    let mut cols: [Vec<f64>; 3] = Default::default();
    for _ in 0..n {
        let z = open_uniform(&mut g);
        let v1 = open_uniform(&mut g);
        let w = open_uniform(&mut g);
        let v2 = cf.at(z).h1_inv(w, v1)?;
        cols[0].push(t1 * z + norm_quantile(v1));
        cols[1].push(t2 * z + norm_quantile(v2));
        cols[2].push(z);
    }
    let [y1, y2, z] = cols;
    SampleSet::new(n, seed)
        .with("y1", y1)?
        .with("y2", y2)?
        .with("z", z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replicate {
    pub index: usize,
    pub stepwise: [f64; 3],
    pub joint: [f64; 3],
    pub loglik_stepwise: f64,
    pub loglik_joint: f64,
    pub converged: bool,
}

impl Replicate {
    pub fn difference(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| self.joint[k] - self.stepwise[k])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateSummary {
    pub name: String,
    /// Mean of `θ^J − θ^S` across replications.
    pub mean_difference: f64,
    /// Standard deviation across replications over `√replications`; absent
    /// with a single replication.
    pub standard_error: Option<f64>,
    pub flagged: bool,
}

impl CoordinateSummary {
    /// `mean_difference / standard_error`, when the error is available.
    pub fn t_ratio(&self) -> Option<f64> {
        self.standard_error.map(|se| self.mean_difference / se)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub generator: String,
    pub replicates: Vec<Replicate>,
    pub coordinates: Vec<CoordinateSummary>,
    pub statement: String,
}

impl ScenarioReport {
    pub fn flagged(&self) -> Vec<&str> {
        self.coordinates
            .iter()
            .filter(|c| c.flagged)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn all_converged(&self) -> bool {
        self.replicates.iter().all(|r| r.converged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenarios: Vec<ScenarioReport>,
}

/// A margin coordinate is flagged when its mean difference exceeds this many
/// standard errors. The copula coordinate is reported but never flagged: its
/// difference carries a second-order term in the margin differences that a
/// standard-error test picks up even under the simplified design.
pub const FLAG_SE: f64 = 3.0;

/// Fits both estimators on `replications` independent datasets of one
/// scenario and summarizes `θ^J − θ^S` per coordinate.
pub fn run_scenario(
    scenario: Scenario,
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<ScenarioReport> {
    if n < 1000 {
        return Err(CopulaError::InvalidInput(format!("n must be at least 1000, got {n}")));
    }
    if replications == 0 {
        return Err(CopulaError::InvalidInput("replications must be at least 1".into()));
    }
    let model = MLModel::default();
    let results: Vec<Result<Replicate>> = (0..replications)
        .into_par_iter()
        .map(|index| {
            let data = simulate(scenario, n, seed, scenario.stream_base() + index as u64)?;
            let step = fit_stepwise(&data, &model)?;
            let joint = fit_joint_from(&data, &model, &step.estimates)?;
            Ok(Replicate {
                index,
                stepwise: step.estimates,
                joint: joint.estimates,
                loglik_stepwise: step.loglik,
                loglik_joint: joint.loglik,
                converged: joint.converged,
            })
        })
        .collect();
    let replicates = results.into_iter().collect::<Result<Vec<_>>>()?;

    let coordinates = summarize_differences(&replicates);
    let statement = separation_statement(&coordinates);
    Ok(ScenarioReport {
        scenario,
        n,
        replications,
        seed,
        generator: GENERATOR_ID.to_string(),
        replicates,
        coordinates,
        statement,
    })
}

/// Mean and standard error of `θ^J − θ^S` per coordinate.
pub fn summarize_differences(replicates: &[Replicate]) -> Vec<CoordinateSummary> {
    let r = replicates.len() as f64;
    (0..3)
        .map(|k| {
            let diffs: Vec<f64> = replicates.iter().map(|rep| rep.difference()[k]).collect();
            let mean = diffs.iter().sum::<f64>() / r;
            let standard_error = (replicates.len() > 1).then(|| {
                let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (r - 1.0);
                (var / r).sqrt()
            });
            let flagged = k < 2 && standard_error.is_some_and(|se| mean.abs() > FLAG_SE * se);
            CoordinateSummary {
                name: PARAM_NAMES[k].to_string(),
                mean_difference: mean,
                standard_error,
                flagged,
            }
        })
        .collect()
}

/// One-sentence reading of a set of coordinate summaries.
pub fn separation_statement(coordinates: &[CoordinateSummary]) -> String {
    let flagged: Vec<&str> = coordinates
        .iter()
        .filter(|c| c.flagged)
        .map(|c| c.name.as_str())
        .collect();
    if coordinates.iter().all(|c| c.standard_error.is_none()) {
        "standard errors unavailable with a single replication; no coordinate assessed".to_string()
    } else if flagged.is_empty() {
        format!(
            "no margin coordinate of the joint minus stepwise difference exceeds {FLAG_SE} \
             standard errors; consistent with a common probability limit"
        )
    } else {
        format!(
            "joint minus stepwise difference exceeds {FLAG_SE} standard errors in {}; \
             consistent with γ ≠ θ",
            flagged.join(", ")
        )
    }
}

/// Runs the simplified and non-simplified scenarios with the same settings.
pub fn estimator_experiment(n: usize, replications: usize, seed: u64) -> Result<ExperimentReport> {
    Ok(ExperimentReport {
        scenarios: vec![
            run_scenario(Scenario::Simplified, n, replications, seed)?,
            run_scenario(Scenario::NonSimplified, n, replications, seed)?,
        ],
    })
}

/// Normal log density, for callers assembling likelihoods by hand.
pub fn normal_log_pdf(x: f64) -> f64 {
    -0.5 * x * x - 0.5 * (2.0 * PI).ln()
}
