//! Bivariate copulas: the evaluable interface and the parametric families.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CopulaError, Result};
use crate::family::{frank_tau, Family, FamilySpec};
use crate::roots::solve_increasing;
use crate::special::{bvn_cdf, norm_cdf, norm_quantile};

/// Tolerance on the argument when h-functions are inverted numerically.
pub const INVERSION_TOL: f64 = 1e-13;

/// Which corner a tail-dependence coefficient looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TailSide {
    Lower,
    Upper,
}

/// A bivariate copula `C(u, v)` on the unit square.
///
/// `h1(v | u) = ∂C/∂u` is the conditional cdf of the second coordinate given
/// the first, `h2(u | v) = ∂C/∂v` the conditional cdf of the first given the
/// second. Densities and h-functions reject conditioning arguments on the
/// boundary; cdfs accept the whole closed square.
pub trait BivariateCopula: Send + Sync {
    fn cdf(&self, u: f64, v: f64) -> f64;

    fn pdf(&self, u: f64, v: f64) -> Result<f64>;

    fn h1(&self, v: f64, u: f64) -> Result<f64>;

    fn h2(&self, u: f64, v: f64) -> Result<f64>;

    /// Inverse of `h1(· | u)`.
    fn h1_inv(&self, p: f64, u: f64) -> Result<f64> {
        check_given(u)?;
        check_probability(p)?;
        solve_increasing(
            |v| self.h1(v, u).unwrap_or(f64::NAN),
            p,
            0.0,
            1.0,
            INVERSION_TOL,
        )
    }

    /// Inverse of `h2(· | v)`.
    fn h2_inv(&self, p: f64, v: f64) -> Result<f64> {
        check_given(v)?;
        check_probability(p)?;
        solve_increasing(
            |u| self.h2(u, v).unwrap_or(f64::NAN),
            p,
            0.0,
            1.0,
            INVERSION_TOL,
        )
    }

    /// Tail-dependence coefficient when it is known analytically.
    fn tail_closed_form(&self, _side: TailSide) -> Option<f64> {
        None
    }

    /// Spearman's ρ when it is known analytically.
    fn spearman_closed_form(&self) -> Option<f64> {
        None
    }

    /// Kendall's τ when it is known analytically.
    fn kendall_closed_form(&self) -> Option<f64> {
        None
    }

    fn has_density(&self) -> bool {
        true
    }

    fn label(&self) -> String;
}

pub(crate) fn check_given(g: f64) -> Result<()> {
    if g > 0.0 && g < 1.0 {
        Ok(())
    } else {
        Err(CopulaError::EvaluationAtBoundary(format!(
            "conditioning value {g} must lie in (0, 1)"
        )))
    }
}

pub(crate) fn check_unit(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(CopulaError::InvalidInput(format!("{u} is outside [0, 1]")))
    }
}

pub(crate) fn check_open(args: &[f64]) -> Result<()> {
    if args.iter().all(|&x| x > 0.0 && x < 1.0) {
        Ok(())
    } else {
        Err(CopulaError::EvaluationAtBoundary(format!(
            "density arguments {args:?} must lie in the open unit cube"
        )))
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CopulaError::InvalidInput(format!(
            "probability {p} is outside [0, 1]"
        )))
    }
}

/// Parametric bivariate copulas used as building blocks, conditional copulas,
/// and closed-form partial copulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bivariate {
    /// `C⊥(u, v) = uv`.
    Product,
    /// Upper Fréchet bound `M(u, v) = min(u, v)`; has no density.
    Comonotone,
    Fgm { theta: f64 },
    Amh { gamma: f64 },
    Frank { theta: f64 },
    Clayton { theta: f64 },
    Gaussian { rho: f64 },
    /// `uv + w·uv(1−u)(1−v)(1+uv)`.
    PolyCe { weight: f64 },
    /// `uv[1 + (1−u)(1−v)(θ + 2s(1−u−v))]`: an FGM copula plus a radially
    /// asymmetric cubic term.
    SkewFgm { theta: f64, skew: f64 },
    /// Expected AMH copula with parameter `1 − exp(−θZ)`, `Z` uniform.
    PartialFrank { theta: f64 },
}

impl Bivariate {
    /// Builds the copula for a bivariate [`FamilySpec`].
    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        let t = spec.theta();
        Ok(match spec.family() {
            Family::Product2 => Bivariate::Product,
            Family::Comonotone2 => Bivariate::Comonotone,
            Family::Fgm2 => Bivariate::Fgm { theta: t },
            Family::Amh2 => Bivariate::Amh { gamma: t },
            Family::Frank2 => Bivariate::Frank { theta: t },
            Family::Clayton2 => Bivariate::Clayton { theta: t },
            Family::Gauss2 => Bivariate::Gaussian { rho: t },
            f => {
                return Err(CopulaError::UnsupportedFamily(format!(
                    "{f} is not a bivariate family"
                )))
            }
        })
    }

    fn cdf_inner(&self, u: f64, v: f64) -> f64 {
        match *self {
            Bivariate::Product => u * v,
            Bivariate::Comonotone => u.min(v),
            Bivariate::Fgm { theta } => u * v * (1.0 + theta * (1.0 - u) * (1.0 - v)),
            Bivariate::Amh { gamma } => u * v / (1.0 - gamma * (1.0 - u) * (1.0 - v)),
            Bivariate::Frank { theta } => {
                let (xu, xv, d) = frank_terms(theta, u, v);
                -(-xu * xv / d).ln_1p() / theta
            }
            Bivariate::Clayton { theta } => {
                if u == 0.0 || v == 0.0 {
                    return 0.0;
                }
                (u.powf(-theta) + v.powf(-theta) - 1.0).powf(-1.0 / theta)
            }
            Bivariate::Gaussian { rho } => {
                if u == 0.0 || v == 0.0 {
                    0.0
                } else if u == 1.0 {
                    v
                } else if v == 1.0 {
                    u
                } else {
                    bvn_cdf(norm_quantile(u), norm_quantile(v), rho)
                }
            }
            Bivariate::PolyCe { weight } => u * v + weight * poly_ce_term(u, v),
            Bivariate::SkewFgm { theta, skew } => {
                let b = u * (1.0 - u) * v * (1.0 - v);
                u * v + b * (theta + 2.0 * skew * (1.0 - u - v))
            }
            Bivariate::PartialFrank { theta } => partial_frank_cdf(theta, u, v),
        }
    }

    fn pdf_inner(&self, u: f64, v: f64) -> Result<f64> {
        Ok(match *self {
            Bivariate::Product => 1.0,
            Bivariate::Comonotone => {
                return Err(CopulaError::DensityUnavailable(
                    "comonotone copula".into(),
                ))
            }
            Bivariate::Fgm { theta } => 1.0 + theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v),
            Bivariate::Amh { gamma } => {
                let den = 1.0 - gamma * (1.0 - u) * (1.0 - v);
                (1.0 + gamma * ((1.0 + u) * (1.0 + v) - 3.0)
                    + gamma * gamma * (1.0 - u) * (1.0 - v))
                    / (den * den * den)
            }
            Bivariate::Frank { theta } => {
                let (xu, xv, d) = frank_terms(theta, u, v);
                let den = d - xu * xv;
                theta * d * (-theta * (u + v)).exp() / (den * den)
            }
            Bivariate::Clayton { theta } => {
                let s = u.powf(-theta) + v.powf(-theta) - 1.0;
                (1.0 + theta) * (u * v).powf(-theta - 1.0) * s.powf(-1.0 / theta - 2.0)
            }
            Bivariate::Gaussian { rho } => {
                let x = norm_quantile(u);
                let y = norm_quantile(v);
                let one_m = 1.0 - rho * rho;
                (-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * one_m)).exp()
                    / one_m.sqrt()
            }
            Bivariate::PolyCe { weight } => {
                let (bu, qu) = (1.0 - 2.0 * u, 2.0 * u - 3.0 * u * u);
                let (bv, qv) = (1.0 - 2.0 * v, 2.0 * v - 3.0 * v * v);
                1.0 + weight * (bu * bv + qu * qv)
            }
            Bivariate::SkewFgm { theta, skew } => {
                let (bu, du) = (u * (1.0 - u), 1.0 - 2.0 * u);
                let (bv, dv) = (v * (1.0 - v), 1.0 - 2.0 * v);
                1.0 + theta * du * dv + 2.0 * skew * (du * dv * (1.0 - u - v) - du * bv - bu * dv)
            }
            Bivariate::PartialFrank { theta } => partial_frank_pdf(theta, u, v),
        })
    }

    /// `∂C/∂v` at `(u, v)`.
    fn h2_inner(&self, u: f64, v: f64) -> f64 {
        match *self {
            Bivariate::Product => u,
            Bivariate::Comonotone => {
                if u >= v {
                    1.0
                } else {
                    0.0
                }
            }
            Bivariate::Fgm { theta } => u * (1.0 + theta * (1.0 - u) * (1.0 - 2.0 * v)),
            Bivariate::Amh { gamma } => {
                let den = 1.0 - gamma * (1.0 - u) * (1.0 - v);
                u * (1.0 - gamma * (1.0 - u)) / (den * den)
            }
            Bivariate::Frank { theta } => {
                let (xu, xv, d) = frank_terms(theta, u, v);
                xu * (-theta * v).exp() / (d - xu * xv)
            }
            Bivariate::Clayton { theta } => {
                if u == 0.0 {
                    return 0.0;
                }
                (1.0 + v.powf(theta) * (u.powf(-theta) - 1.0)).powf(-1.0 - 1.0 / theta)
            }
            Bivariate::Gaussian { rho } => {
                let x = norm_quantile(u);
                let y = norm_quantile(v);
                norm_cdf((x - rho * y) / (1.0 - rho * rho).sqrt())
            }
            Bivariate::PolyCe { weight } => {
                let (bu, qu) = (u * (1.0 - u), u * u * (1.0 - u));
                let (dbv, dqv) = (1.0 - 2.0 * v, 2.0 * v - 3.0 * v * v);
                u + weight * (bu * dbv + qu * dqv)
            }
            Bivariate::SkewFgm { theta, skew } => {
                let bu = u * (1.0 - u);
                let (bv, dv) = (v * (1.0 - v), 1.0 - 2.0 * v);
                u + theta * bu * dv + 2.0 * skew * bu * (dv * (1.0 - u - v) - bv)
            }
            Bivariate::PartialFrank { theta } => partial_frank_h2(theta, u, v),
        }
    }
}

impl BivariateCopula for Bivariate {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = v.clamp(0.0, 1.0);
        if u == 1.0 {
            return v;
        }
        if v == 1.0 {
            return u;
        }
        self.cdf_inner(u, v)
    }

    fn pdf(&self, u: f64, v: f64) -> Result<f64> {
        check_open(&[u, v])?;
        self.pdf_inner(u, v)
    }

    fn h1(&self, v: f64, u: f64) -> Result<f64> {
        // every family here is exchangeable
        self.h2(v, u)
    }

    fn h2(&self, u: f64, v: f64) -> Result<f64> {
        check_given(v)?;
        check_unit(u)?;
        Ok(self.h2_inner(u, v).clamp(0.0, 1.0))
    }

    fn h1_inv(&self, p: f64, u: f64) -> Result<f64> {
        self.h2_inv(p, u)
    }

    fn h2_inv(&self, p: f64, v: f64) -> Result<f64> {
        check_given(v)?;
        check_probability(p)?;
        if p == 0.0 || p == 1.0 {
            return Ok(p);
        }
        Ok(match *self {
            Bivariate::Product => p,
            Bivariate::Comonotone => v,
            Bivariate::Fgm { theta } => {
                let a = theta * (1.0 - 2.0 * v);
                2.0 * p / ((1.0 + a) + ((1.0 + a) * (1.0 + a) - 4.0 * a * p).sqrt())
            }
            Bivariate::Frank { theta } => {
                let d = -(-theta).exp_m1();
                let xv = -(-theta * v).exp_m1();
                let xu = p * d / (1.0 - xv * (1.0 - p));
                -(-xu).ln_1p() / theta
            }
            Bivariate::Clayton { theta } => {
                let t = p.powf(-theta / (1.0 + theta)) - 1.0;
                (1.0 + t / v.powf(theta)).powf(-1.0 / theta)
            }
            Bivariate::Gaussian { rho } => {
                norm_cdf(norm_quantile(p) * (1.0 - rho * rho).sqrt() + rho * norm_quantile(v))
            }
            _ => solve_increasing(|u| self.h2_inner(u, v), p, 0.0, 1.0, INVERSION_TOL)?,
        })
    }

    fn tail_closed_form(&self, side: TailSide) -> Option<f64> {
        match (*self, side) {
            (Bivariate::Product, _) => Some(0.0),
            (Bivariate::Comonotone, _) => Some(1.0),
            (Bivariate::Clayton { theta }, TailSide::Lower) => Some(2f64.powf(-1.0 / theta)),
            (Bivariate::Clayton { .. }, TailSide::Upper) => Some(0.0),
            (Bivariate::Gaussian { .. }, _) => Some(0.0),
            _ => None,
        }
    }

    fn spearman_closed_form(&self) -> Option<f64> {
        match *self {
            Bivariate::Product => Some(0.0),
            Bivariate::Comonotone => Some(1.0),
            Bivariate::Fgm { theta } | Bivariate::SkewFgm { theta, .. } => Some(theta / 3.0),
            Bivariate::Gaussian { rho } => Some(6.0 / PI * (rho / 2.0).asin()),
            Bivariate::PolyCe { weight } => Some(5.0 * weight / 12.0),
            _ => None,
        }
    }

    fn kendall_closed_form(&self) -> Option<f64> {
        match *self {
            Bivariate::Product => Some(0.0),
            Bivariate::Comonotone => Some(1.0),
            Bivariate::Fgm { theta } => Some(2.0 * theta / 9.0),
            Bivariate::Frank { theta } => Some(frank_tau(theta)),
            Bivariate::Clayton { theta } => Some(theta / (theta + 2.0)),
            Bivariate::Gaussian { rho } => Some(2.0 / PI * rho.asin()),
            Bivariate::PolyCe { weight } => Some(weight * weight / 450.0 + 5.0 * weight / 18.0),
            _ => None,
        }
    }

    fn has_density(&self) -> bool {
        !matches!(self, Bivariate::Comonotone)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Bivariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bivariate::Product => write!(f, "product"),
            Bivariate::Comonotone => write!(f, "comonotone"),
            Bivariate::Fgm { theta } => write!(f, "fgm({theta})"),
            Bivariate::Amh { gamma } => write!(f, "amh({gamma})"),
            Bivariate::Frank { theta } => write!(f, "frank({theta})"),
            Bivariate::Clayton { theta } => write!(f, "clayton({theta})"),
            Bivariate::Gaussian { rho } => write!(f, "gaussian({rho})"),
            Bivariate::PolyCe { weight } => write!(f, "polyce({weight})"),
            Bivariate::SkewFgm { theta, skew } => write!(f, "skew-fgm({theta}, {skew})"),
            Bivariate::PartialFrank { theta } => write!(f, "partial-frank({theta})"),
        }
    }
}

/// `(1 − e^{−θu}, 1 − e^{−θv}, 1 − e^{−θ})` without cancellation.
fn frank_terms(theta: f64, u: f64, v: f64) -> (f64, f64, f64) {
    (
        -(-theta * u).exp_m1(),
        -(-theta * v).exp_m1(),
        -(-theta).exp_m1(),
    )
}

/// `uv(1−u)(1−v)(1+uv)`.
fn poly_ce_term(u: f64, v: f64) -> f64 {
    u * v * (1.0 - u) * (1.0 - v) * (1.0 + u * v)
}

// The closed-form partial Frank copula is `C = (uv/f)·L/θ` with
// `f = u + v − uv` and `L = log(1 + (e^θ − 1) f)`. The log form of `L` is the
// same quantity as `log(1 − (1 − e^{−θ})(1 − u)(1 − v)) + θ` but does not
// cancel near the origin.
fn partial_frank_parts(theta: f64, u: f64, v: f64) -> (f64, f64, f64) {
    let f = u + v - u * v;
    let e = theta.exp_m1();
    let g = 1.0 + e * f;
    (f, e, g)
}

fn partial_frank_cdf(theta: f64, u: f64, v: f64) -> f64 {
    if u == 0.0 || v == 0.0 {
        return 0.0;
    }
    let (f, e, _) = partial_frank_parts(theta, u, v);
    let l = (e * f).ln_1p();
    u * v * l / (theta * f)
}

fn partial_frank_h2(theta: f64, u: f64, v: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let (f, e, g) = partial_frank_parts(theta, u, v);
    let l = (e * f).ln_1p();
    let a = u * v / f;
    let a_v = u * u / (f * f);
    let l_v = e * (1.0 - u) / g;
    (a_v * l + a * l_v) / theta
}

fn partial_frank_pdf(theta: f64, u: f64, v: f64) -> f64 {
    let (f, e, g) = partial_frank_parts(theta, u, v);
    let l = (e * f).ln_1p();
    let a = u * v / f;
    let a_u = v * v / (f * f);
    let a_v = u * u / (f * f);
    let a_uv = 2.0 * u * v / (f * f * f);
    let l_u = e * (1.0 - v) / g;
    let l_v = e * (1.0 - u) / g;
    let l_uv = -e * theta.exp() / (g * g);
    (a_uv * l + a_u * l_v + a_v * l_u + a * l_uv) / theta
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<Bivariate> {
        vec![
            Bivariate::Product,
            Bivariate::Fgm { theta: 0.9 },
            Bivariate::Fgm { theta: -0.6 },
            Bivariate::Amh { gamma: 0.7 },
            Bivariate::Frank { theta: 2.0 },
            Bivariate::Frank { theta: -3.0 },
            Bivariate::Frank { theta: 12.0 },
            Bivariate::Clayton { theta: 2.0 },
            Bivariate::Clayton { theta: 0.4 },
            Bivariate::Gaussian { rho: 0.6 },
            Bivariate::Gaussian { rho: -0.3 },
            Bivariate::PolyCe { weight: 1.0 },
            Bivariate::PolyCe { weight: 0.5 },
            Bivariate::SkewFgm {
                theta: 0.5,
                skew: -0.25,
            },
            Bivariate::PartialFrank { theta: 2.0 },
            Bivariate::PartialFrank { theta: 8.0 },
        ]
    }

    fn grid(n: usize) -> Vec<f64> {
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    #[test]
    fn margins_and_groundedness() {
        let mut all = families();
        all.push(Bivariate::Comonotone);
        for c in all {
            for &u in &grid(20) {
                assert!(c.cdf(u, 0.0).abs() < 1e-15, "{c} at ({u}, 0)");
                assert!(c.cdf(0.0, u).abs() < 1e-15, "{c} at (0, {u})");
                assert!((c.cdf(u, 1.0) - u).abs() < 1e-14, "{c} at ({u}, 1)");
                assert!((c.cdf(1.0, u) - u).abs() < 1e-14, "{c} at (1, {u})");
            }
        }
    }

    #[test]
    fn two_increasing_on_grid() {
        let g = grid(20);
        for c in families() {
            for i in 0..20 {
                for j in 0..20 {
                    let vol = c.cdf(g[i + 1], g[j + 1]) - c.cdf(g[i], g[j + 1])
                        - c.cdf(g[i + 1], g[j])
                        + c.cdf(g[i], g[j]);
                    assert!(vol >= -1e-14, "{c}: volume {vol} at cell ({i}, {j})");
                }
            }
        }
    }

    #[test]
    fn pdf_matches_mixed_difference() {
        let h = 1e-4;
        let pts = [0.13, 0.31, 0.5, 0.67, 0.88];
        for c in families() {
            for &u in &pts {
                for &v in &pts {
                    let fd = (c.cdf(u + h, v + h) - c.cdf(u + h, v - h) - c.cdf(u - h, v + h)
                        + c.cdf(u - h, v - h))
                        / (4.0 * h * h);
                    let pdf = c.pdf(u, v).unwrap();
                    assert!(pdf >= 0.0);
                    assert!(
                        (pdf - fd).abs() < 1e-5 * pdf.max(1.0),
                        "{c} at ({u}, {v}): {pdf} vs {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn h_functions_match_differences() {
        let h = 1e-6;
        let pts = [0.0, 0.13, 0.31, 0.5, 0.67, 0.88, 1.0];
        for c in families() {
            for &u in &pts {
                for &v in &[0.2, 0.5, 0.7] {
                    let fd = (c.cdf(u, v + h) - c.cdf(u, v - h)) / (2.0 * h);
                    let h2 = c.h2(u, v).unwrap();
                    assert!((h2 - fd).abs() < 1e-6, "{c} h2({u}|{v}): {h2} vs {fd}");
                    let fd = (c.cdf(v + h, u) - c.cdf(v - h, u)) / (2.0 * h);
                    let h1 = c.h1(u, v).unwrap();
                    assert!((h1 - fd).abs() < 1e-6, "{c} h1({u}|{v}): {h1} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn h_inverse_round_trips() {
        for c in families() {
            for &g in &[0.05, 0.3, 0.5, 0.9, 0.995] {
                for i in 1..10 {
                    let u = i as f64 / 10.0;
                    let p = c.h2(u, g).unwrap();
                    let back = c.h2_inv(p, g).unwrap();
                    assert!((back - u).abs() < 1e-9, "{c} at g={g}: {u} -> {p} -> {back}");
                }
            }
        }
    }

    #[test]
    fn boundary_policy() {
        let c = Bivariate::Frank { theta: 2.0 };
        assert!(matches!(
            c.pdf(0.0, 0.5),
            Err(CopulaError::EvaluationAtBoundary(_))
        ));
        assert!(matches!(
            c.h2(0.5, 1.0),
            Err(CopulaError::EvaluationAtBoundary(_))
        ));
        assert_eq!(c.h2(0.0, 0.4).unwrap(), 0.0);
        assert!((c.h2(1.0, 0.4).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            Bivariate::Comonotone.pdf(0.5, 0.5),
            Err(CopulaError::DensityUnavailable(_))
        ));
    }

    #[test]
    fn closed_form_tails() {
        let c = Bivariate::Clayton { theta: 2.0 };
        let lam = c.tail_closed_form(TailSide::Lower).unwrap();
        assert!((lam - 0.5f64.sqrt()).abs() < 1e-15);
        // direct check of the corner ratio C(ε, ε)/ε at ε = 1e-6
        let eps = 1e-6;
        assert!((c.cdf(eps, eps) / eps - lam).abs() < 1e-3);
        assert_eq!(
            Bivariate::Gaussian { rho: 0.9 }.tail_closed_form(TailSide::Upper),
            Some(0.0)
        );
        assert_eq!(Bivariate::Frank { theta: 3.0 }.tail_closed_form(TailSide::Upper), None);
    }

    #[test]
    fn amh_at_zero_is_product() {
        let c = Bivariate::Amh { gamma: 0.0 };
        for &u in &[0.1, 0.4, 0.8] {
            for &v in &[0.2, 0.9] {
                assert_eq!(c.cdf(u, v), u * v);
            }
        }
    }

    #[test]
    fn from_spec_rejects_trivariate() {
        assert!(Bivariate::from_spec(&FamilySpec::fgm3(0.2).unwrap()).is_err());
        let spec = FamilySpec::new(Family::Frank2, vec![3.0]).unwrap();
        assert_eq!(Bivariate::from_spec(&spec).unwrap(), Bivariate::Frank { theta: 3.0 });
    }
}
