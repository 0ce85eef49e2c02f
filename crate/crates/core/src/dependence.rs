//! Dependence measures of bivariate copulas, their expectations over
//! conditional copulas, and sample partial correlation.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bivariate::{Bivariate, BivariateCopula, TailSide};
use crate::error::{CopulaError, Result};
use crate::partial::ConditionalFamily;
use crate::quadrature::QuadratureRule;
use crate::sampling::{quadratic_design, EmpiricalCopula};

/// `12 ∫∫ C(u, v) du dv − 3`.
pub fn spearman_rho<C: BivariateCopula + ?Sized>(cop: &C, rule: &QuadratureRule) -> f64 {
    12.0 * rule.integrate2(|u, v| cop.cdf(u, v)) - 3.0
}

/// `4 ∫∫ C(u, v) c(u, v) du dv − 1`.
pub fn kendall_tau<C: BivariateCopula + ?Sized>(cop: &C, rule: &QuadratureRule) -> Result<f64> {
    if !cop.has_density() {
        return Err(CopulaError::DensityUnavailable(cop.label()));
    }
    let mut total = 0.0;
    for (u, wu) in rule.iter() {
        let mut row = 0.0;
        for (v, wv) in rule.iter() {
            row += wv * cop.cdf(u, v) * cop.pdf(u, v)?;
        }
        total += wu * row;
    }
    Ok(4.0 * total - 1.0)
}

/// Smallest and largest exponent of the `ε = 2^{−k}` sequence.
pub const TAIL_EXPONENTS: (i32, i32) = (6, 20);
/// Agreement required of the last three extrapolants.
pub const TAIL_TOL: f64 = 1e-3;

/// Tail-dependence coefficient, from the closed form when the copula knows
/// it and from [`tail_extrapolated`] otherwise.
pub fn tail_coefficient<C: BivariateCopula + ?Sized>(cop: &C, side: TailSide) -> Result<f64> {
    match cop.tail_closed_form(side) {
        Some(value) => Ok(value),
        None => tail_extrapolated(cop, side),
    }
}

/// `lim C(ε, ε)/ε` (lower) or `lim (1 − 2u + C(u, u))/(1 − u)` (upper),
/// estimated by linear Richardson extrapolation over `ε = 2^{−k}`.
pub fn tail_extrapolated<C: BivariateCopula + ?Sized>(cop: &C, side: TailSide) -> Result<f64> {
    let ratio = |eps: f64| match side {
        TailSide::Lower => cop.cdf(eps, eps) / eps,
        TailSide::Upper => {
            let u = 1.0 - eps;
            (2.0 * eps - (1.0 - cop.cdf(u, u))) / eps
        }
    };
    let (first, last) = TAIL_EXPONENTS;
    let ratios: Vec<f64> = (first..=last).map(|k| ratio(2f64.powi(-k))).collect();
    let extrapolants: Vec<f64> = ratios.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let tail = &extrapolants[extrapolants.len() - 3..];
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo <= TAIL_TOL) {
        return Err(CopulaError::NonConvergent(extrapolants));
    }
    Ok(tail[2].clamp(0.0, 1.0))
}

/// A dependence measure of a bivariate copula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Spearman,
    Kendall,
    TailLower,
    TailUpper,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Spearman,
        Measure::Kendall,
        Measure::TailLower,
        Measure::TailUpper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Spearman => "spearman",
            Measure::Kendall => "kendall",
            Measure::TailLower => "tail_lower",
            Measure::TailUpper => "tail_upper",
        }
    }

    /// The measure of `cop`, by quadrature or tail extrapolation.
    pub fn of<C: BivariateCopula + ?Sized>(self, cop: &C, rule: &QuadratureRule) -> Result<f64> {
        match self {
            Measure::Spearman => Ok(spearman_rho(cop, rule)),
            Measure::Kendall => kendall_tau(cop, rule),
            Measure::TailLower => tail_coefficient(cop, TailSide::Lower),
            Measure::TailUpper => tail_coefficient(cop, TailSide::Upper),
        }
    }
}

/// `∫₀¹ m(C(·, · | z)) dz` with the outer integral on the nodes of `rule`.
pub fn expected_conditional_measure(
    cf: &ConditionalFamily,
    measure: Measure,
    rule: &QuadratureRule,
) -> Result<f64> {
    let nodes: Vec<(f64, f64)> = rule.iter().collect();
    let terms: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|&(z, w)| Ok(w * measure.of(&cf.at(z), rule)?))
        .collect();
    terms.into_iter().sum()
}

/// How a [`DependenceSummary`] entry was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    LimitExtrapolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: f64,
    pub method: Method,
}

/// Rank correlations and tail coefficients of one copula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceSummary {
    pub spearman: Entry,
    pub kendall: Entry,
    pub tail_lower: Entry,
    pub tail_upper: Entry,
}

impl DependenceSummary {
    pub fn get(&self, m: Measure) -> Entry {
        match m {
            Measure::Spearman => self.spearman,
            Measure::Kendall => self.kendall,
            Measure::TailLower => self.tail_lower,
            Measure::TailUpper => self.tail_upper,
        }
    }
}

/// All four measures of `cop`, preferring closed forms.
pub fn summarize<C: BivariateCopula + ?Sized>(
    cop: &C,
    rule: &QuadratureRule,
) -> Result<DependenceSummary> {
    let closed_or = |closed: Option<f64>, quad: &dyn Fn() -> Result<f64>| -> Result<Entry> {
        Ok(match closed {
            Some(value) => Entry {
                value,
                method: Method::ClosedForm,
            },
            None => Entry {
                value: quad()?,
                method: Method::Quadrature,
            },
        })
    };
    let tail = |side: TailSide| -> Result<Entry> {
        Ok(match cop.tail_closed_form(side) {
            Some(value) => Entry {
                value,
                method: Method::ClosedForm,
            },
            None => Entry {
                value: tail_extrapolated(cop, side)?,
                method: Method::LimitExtrapolation,
            },
        })
    };
    Ok(DependenceSummary {
        spearman: closed_or(cop.spearman_closed_form(), &|| Ok(spearman_rho(cop, rule)))?,
        kendall: closed_or(cop.kendall_closed_form(), &|| kendall_tau(cop, rule))?,
        tail_lower: tail(TailSide::Lower)?,
        tail_upper: tail(TailSide::Upper)?,
    })
}

/// Sample correlation of the least-squares residuals of `y1` and `y2` on the
/// columns of `z`. The design should include an intercept column.
pub fn partial_correlation(y1: &[f64], y2: &[f64], z: &DMatrix<f64>) -> Result<f64> {
    let n = y1.len();
    if y2.len() != n || z.nrows() != n {
        return Err(CopulaError::InvalidInput(format!(
            "length mismatch: y1 {n}, y2 {}, z {} rows",
            y2.len(),
            z.nrows()
        )));
    }
    if n < 3 || z.ncols() == 0 || z.ncols() >= n {
        return Err(CopulaError::InvalidInput(format!(
            "need n ≥ 3 observations and 1 ≤ columns < n, got n = {n}, {} columns",
            z.ncols()
        )));
    }
    let qr = z.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if r.diagonal().iter().any(|d| d.abs() <= 1e-12 * scale) || scale == 0.0 {
        return Err(CopulaError::SingularDesign);
    }
    let p = z.ncols();
    let residuals = |y: &[f64]| -> DVector<f64> {
        let y = DVector::from_column_slice(y);
        let mut qty = y.clone();
        qr.q_tr_mul(&mut qty);
        let beta = r
            .solve_upper_triangular(&qty.rows(0, p).into_owned())
            .expect("nonzero diagonal checked above");
        y - z * beta
    };
    let e1 = residuals(y1);
    let e2 = residuals(y2);
    let (m1, m2) = (e1.mean(), e2.mean());
    let (mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0);
    for (a, b) in e1.iter().zip(e2.iter()) {
        let (a, b) = (a - m1, b - m2);
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
    }
    let energy = |y: &[f64]| y.iter().map(|v| v * v).sum::<f64>();
    if s11 <= 1e-24 * energy(y1) || s22 <= 1e-24 * energy(y2) {
        return Err(CopulaError::DegenerateResiduals);
    }
    Ok((s12 / (s11 * s22).sqrt()).clamp(-1.0, 1.0))
}

/// Population partial correlation of `Yᵢ = −1 + Z² + εᵢ` given `Z`, with `Z`
/// standard normal and independent noise of variance `sigma`:
/// `Var[Z²]/(Var[Z²] + σ)`.
pub fn quadratic_design_partial_correlation(sigma: f64) -> f64 {
    2.0 / (2.0 + sigma)
}

/// One noise level of [`partial_correlation_demo`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialCorrelationRow {
    pub sigma: f64,
    pub n: usize,
    /// Sample partial correlation given `[1, Z]`.
    pub sample: f64,
    pub population: f64,
    /// Grid sup-distance between the empirical copula of the CPIT pair and
    /// the product copula.
    pub sup_distance: f64,
    pub band: f64,
}

impl PartialCorrelationRow {
    pub fn independence_retained(&self) -> bool {
        self.sup_distance < self.band
    }
}

/// Independence band for the CPIT sup-distance at sample size `n`.
pub fn cpit_independence_band(n: usize) -> f64 {
    1.63 / (n as f64).sqrt() * 1.5
}

/// Simulates the quadratic design at each noise level and reports the
/// sample partial correlation alongside a conditional-independence check on
/// the CPITs, which are independent by construction.
pub fn partial_correlation_demo(
    sigmas: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<PartialCorrelationRow>> {
    sigmas
        .iter()
        .map(|&sigma| {
            let data = quadratic_design(n, sigma, seed)?;
            let z = data.require("z")?;
            let design = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { z[i] });
            let sample = partial_correlation(data.require("y1")?, data.require("y2")?, &design)?;
            let emp = EmpiricalCopula::from_columns(&data, "u1", "u2")?;
            Ok(PartialCorrelationRow {
                sigma,
                n,
                sample,
                population: quadratic_design_partial_correlation(sigma),
                sup_distance: emp.sup_distance(&Bivariate::Product, 100),
                band: cpit_independence_band(n),
            })
        })
        .collect()
}

/// Conditional correlation `(eᶻ − 1)/√((e − 1)(e^{z²} − 1))` at each `z`.
///
/// The value tends to `1/√(e − 1)` as `z → 0`, equals 1 at `z = 1`, and
/// decays to 0 as `z` grows.
pub fn cond_corr_profile(z_values: &[f64]) -> Vec<f64> {
    z_values.iter().map(|&z| cond_corr(z)).collect()
}

fn cond_corr(z: f64) -> f64 {
    let e1 = 1f64.exp_m1();
    if z == 0.0 {
        return 1.0 / e1.sqrt();
    }
    if z.abs() < 20.0 {
        return z.exp_m1() / (e1 * (z * z).exp_m1()).sqrt();
    }
    // log-space once e^{z²} overflows
    let ln_expm1 = |x: f64| x + (-(-x).exp()).ln_1p();
    if z > 0.0 {
        (ln_expm1(z) - 0.5 * (e1.ln() + ln_expm1(z * z))).exp()
    } else {
        -(((-z.exp_m1()).ln()) - 0.5 * (e1.ln() + ln_expm1(z * z))).exp()
    }
}
