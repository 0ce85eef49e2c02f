//! Trivariate copula models with the second coordinate as conditioning variable.

use serde::{Deserialize, Serialize};

use crate::bivariate::{check_open, check_unit, Bivariate, BivariateCopula};
use crate::error::{CopulaError, Result};
use crate::family::{Family, FamilySpec};
use crate::quadrature::{gauss_rule, QuadratureRule};
use crate::special::{bvn_cdf, norm_pdf, norm_quantile};

/// Selects a bivariate margin with the conditioning variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Given {
    /// `F₁|₂(u₁ | u₂)`, from the (1, 2) margin.
    OneGivenTwo,
    /// `F₃|₂(u₃ | u₂)`, from the (3, 2) margin.
    ThreeGivenTwo,
}

/// A validated trivariate copula model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrivariateCopula {
    spec: FamilySpec,
}

impl TrivariateCopula {
    pub fn new(spec: FamilySpec) -> Result<Self> {
        if !spec.family().is_trivariate() {
            return Err(CopulaError::UnsupportedFamily(format!(
                "{} is not a trivariate family",
                spec.family()
            )));
        }
        Ok(TrivariateCopula { spec })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family()
    }

    /// The bivariate margin of the selected variable with the conditioning one,
    /// oriented as `C(u_i, u₂)`.
    pub fn margin(&self, which: Given) -> Bivariate {
        let t = self.spec.theta();
        match self.family() {
            Family::Fgm3 | Family::PolyCe => Bivariate::Product,
            Family::Frank3 => Bivariate::Frank { theta: t },
            Family::Clayton3 => Bivariate::Clayton { theta: t },
            Family::Gauss3 => {
                let p = self.spec.params();
                match which {
                    Given::OneGivenTwo => Bivariate::Gaussian { rho: p[0] },
                    Given::ThreeGivenTwo => Bivariate::Gaussian { rho: p[2] },
                }
            }
            _ => unreachable!("validated trivariate"),
        }
    }

    /// The (1, 3) margin `C(u₁, 1, u₃)`.
    pub fn outer_margin(&self) -> Bivariate {
        let t = self.spec.theta();
        match self.family() {
            Family::Fgm3 => Bivariate::Product,
            Family::PolyCe => Bivariate::PolyCe { weight: 0.5 },
            Family::Frank3 => Bivariate::Frank { theta: t },
            Family::Clayton3 => Bivariate::Clayton { theta: t },
            Family::Gauss3 => Bivariate::Gaussian {
                rho: self.spec.params()[1],
            },
            _ => unreachable!("validated trivariate"),
        }
    }

    /// `C(u₁, u₂, u₃)`.
    pub fn cdf(&self, u1: f64, u2: f64, u3: f64) -> f64 {
        let (u1, u2, u3) = (u1.clamp(0.0, 1.0), u2.clamp(0.0, 1.0), u3.clamp(0.0, 1.0));
        if u1 == 0.0 || u2 == 0.0 || u3 == 0.0 {
            return 0.0;
        }
        let t = self.spec.theta();
        match self.family() {
            Family::Fgm3 => {
                let p = u1 * u2 * u3;
                p + t * p * (1.0 - u1) * (1.0 - u2) * (1.0 - u3)
            }
            Family::Frank3 => {
                let q = frank_q(t, u1, u2, u3);
                -(-q).ln_1p() / t
            }
            Family::Clayton3 => {
                (u1.powf(-t) + u2.powf(-t) + u3.powf(-t) - 2.0).powf(-1.0 / t)
            }
            Family::PolyCe => {
                u1 * u2 * u3
                    + 0.5 * u2 * u2 * u1 * u3 * (1.0 - u1) * (1.0 - u3) * (1.0 + u1 * u3)
            }
            Family::Gauss3 => self.gauss_cdf(u1, u2, u3),
            _ => unreachable!("validated trivariate"),
        }
    }

    /// `c(u₁, u₂, u₃)`; all arguments must lie in `(0, 1)`.
    pub fn pdf(&self, u1: f64, u2: f64, u3: f64) -> Result<f64> {
        check_open(&[u1, u2, u3])?;
        let t = self.spec.theta();
        Ok(match self.family() {
            Family::Fgm3 => {
                1.0 + t * (1.0 - 2.0 * u1) * (1.0 - 2.0 * u2) * (1.0 - 2.0 * u3)
            }
            Family::Frank3 => {
                // c = θ² e^{−θΣu} (1 + q) / (D² (1 − q)³), q = Πxᵢ / D²
                let d = -(-t).exp_m1();
                let q = frank_q(t, u1, u2, u3);
                let w = 1.0 - q;
                t * t * (-t * (u1 + u2 + u3)).exp() * (1.0 + q) / (d * d * w * w * w)
            }
            Family::Clayton3 => {
                let s = u1.powf(-t) + u2.powf(-t) + u3.powf(-t) - 2.0;
                (1.0 + t) * (1.0 + 2.0 * t) * (u1 * u2 * u3).powf(-t - 1.0)
                    * s.powf(-1.0 / t - 3.0)
            }
            Family::PolyCe => Bivariate::PolyCe { weight: u2 }.pdf(u1, u3)?,
            Family::Gauss3 => {
                let x = [norm_quantile(u1), norm_quantile(u2), norm_quantile(u3)];
                let (inv, det) = gauss3_inverse(self.spec.params());
                let mut quad = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        quad += x[i] * (inv[i][j] - delta) * x[j];
                    }
                }
                (-0.5 * quad).exp() / det.sqrt()
            }
            _ => unreachable!("validated trivariate"),
        })
    }

    /// Conditional cdf of `u` given the second coordinate: the h-function of
    /// the selected margin. This is the conditional probability integral
    /// transform on the copula scale.
    pub fn hfunc(&self, which: Given, u: f64, given: f64) -> Result<f64> {
        self.margin(which).h2(u, given)
    }

    pub fn hfunc_inv(&self, which: Given, p: f64, given: f64) -> Result<f64> {
        self.margin(which).h2_inv(p, given)
    }

    // C(u₁,u₂,u₃) = ∫_{-∞}^{Φ⁻¹(u₂)} φ(s) Φ₂(a(s), b(s); ρ₁₃|₂) ds
    fn gauss_cdf(&self, u1: f64, u2: f64, u3: f64) -> f64 {
        let p = self.spec.params();
        let (r12, r13, r23) = (p[0], p[1], p[2]);
        if u2 == 1.0 {
            return self.outer_margin().cdf(u1, u3);
        }
        if u1 == 1.0 {
            return Bivariate::Gaussian { rho: r23 }.cdf(u3, u2);
        }
        if u3 == 1.0 {
            return Bivariate::Gaussian { rho: r12 }.cdf(u1, u2);
        }
        let x1 = norm_quantile(u1);
        let x2 = norm_quantile(u2);
        let x3 = norm_quantile(u3);
        let s12 = (1.0 - r12 * r12).sqrt();
        let s23 = (1.0 - r23 * r23).sqrt();
        let rho = gauss_partial_rho(r12, r13, r23);
        let rule = gauss3_rule();
        let lo = -9.0;
        if x2 <= lo {
            return 0.0;
        }
        let panels = ((x2 - lo) / 0.5).ceil() as usize;
        let width = (x2 - lo) / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let a = lo + k as f64 * width;
            total += rule.integrate_on(a, a + width, |s| {
                norm_pdf(s) * bvn_cdf((x1 - r12 * s) / s12, (x3 - r23 * s) / s23, rho)
            });
        }
        total
    }
}

/// `ρ₁₃;₂` from the pairwise correlations.
pub fn gauss_partial_rho(r12: f64, r13: f64, r23: f64) -> f64 {
    (r13 - r12 * r23) / ((1.0 - r12 * r12) * (1.0 - r23 * r23)).sqrt()
}

fn gauss3_rule() -> &'static QuadratureRule {
    use std::sync::OnceLock;
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_rule(20))
}

fn gauss3_inverse(p: &[f64]) -> ([[f64; 3]; 3], f64) {
    let (a, b, c) = (p[0], p[1], p[2]);
    // R = [[1, a, b], [a, 1, c], [b, c, 1]]
    let det = 1.0 - a * a - b * b - c * c + 2.0 * a * b * c;
    let adj = [
        [1.0 - c * c, b * c - a, a * c - b],
        [b * c - a, 1.0 - b * b, a * b - c],
        [a * c - b, a * b - c, 1.0 - a * a],
    ];
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = adj[i][j] / det;
        }
    }
    (inv, det)
}

/// `Π(1 − e^{−θuᵢ}) / (1 − e^{−θ})²`.
fn frank_q(theta: f64, u1: f64, u2: f64, u3: f64) -> f64 {
    let d = -(-theta).exp_m1();
    let x = |u: f64| -(-theta * u).exp_m1();
    x(u1) * x(u2) * x(u3) / (d * d)
}

/// Convenience wrapper around [`TrivariateCopula::cdf`] that validates the
/// arguments.
pub fn cdf3(cop: &TrivariateCopula, u1: f64, u2: f64, u3: f64) -> Result<f64> {
    check_unit(u1)?;
    check_unit(u2)?;
    check_unit(u3)?;
    Ok(cop.cdf(u1, u2, u3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> Vec<TrivariateCopula> {
        [
            FamilySpec::fgm3(1.0),
            FamilySpec::fgm3(-0.7),
            FamilySpec::frank3(2.0),
            FamilySpec::frank3(8.0),
            FamilySpec::clayton3(2.0),
            FamilySpec::gauss3(0.5, 0.3, 0.4),
            Ok(FamilySpec::polyce()),
        ]
        .into_iter()
        .map(|s| TrivariateCopula::new(s.unwrap()).unwrap())
        .collect()
    }

    #[test]
    fn fgm_center_values() {
        let c = TrivariateCopula::new(FamilySpec::fgm3(1.0).unwrap()).unwrap();
        assert!((c.cdf(0.5, 0.5, 0.5) - 0.140625).abs() < 1e-15);
        assert_eq!(c.pdf(0.5, 0.5, 0.5).unwrap(), 1.0);
        let c0 = TrivariateCopula::new(FamilySpec::fgm3(0.0).unwrap()).unwrap();
        assert_eq!(c0.pdf(0.1, 0.7, 0.3).unwrap(), 1.0);
    }

    #[test]
    fn uniform_margins_and_groundedness() {
        let g: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        for c in models() {
            for &u in &g {
                for (a, b, cc) in [(u, 1.0, 1.0), (1.0, u, 1.0), (1.0, 1.0, u)] {
                    assert!((c.cdf(a, b, cc) - u).abs() < 1e-12, "{:?} margin at {u}", c.spec());
                }
                assert_eq!(c.cdf(0.0, u, 0.4), 0.0);
                assert_eq!(c.cdf(u, 0.0, 0.4), 0.0);
                assert_eq!(c.cdf(0.3, u, 0.0), 0.0);
            }
        }
    }

    #[test]
    fn setting_an_argument_to_one_gives_bivariate_margins() {
        let pts = [0.1, 0.35, 0.6, 0.9];
        for c in models() {
            for &a in &pts {
                for &b in &pts {
                    let m12 = c.margin(Given::OneGivenTwo).cdf(a, b);
                    assert!((c.cdf(a, b, 1.0) - m12).abs() < 1e-12);
                    let m32 = c.margin(Given::ThreeGivenTwo).cdf(a, b);
                    assert!((c.cdf(1.0, b, a) - m32).abs() < 1e-12);
                    let m13 = c.outer_margin().cdf(a, b);
                    assert!((c.cdf(a, 1.0, b) - m13).abs() < 1e-12, "{:?} at ({a},{b}): {} vs {m13}", c.spec(), c.cdf(a, 1.0, b));
                }
            }
        }
    }

    #[test]
    fn fgm_margins_are_exactly_product() {
        let c = TrivariateCopula::new(FamilySpec::fgm3(0.8).unwrap()).unwrap();
        for &a in &[0.13, 0.5, 0.77] {
            for &b in &[0.21, 0.64] {
                assert_eq!(c.cdf(a, b, 1.0), a * b);
                assert_eq!(c.cdf(a, 1.0, b), a * b);
                assert_eq!(c.cdf(1.0, a, b), a * b);
            }
        }
    }

    #[test]
    fn three_increasing_on_grid() {
        let g: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        for c in models() {
            for i in 0..10 {
                for j in 0..10 {
                    for k in 0..10 {
                        let mut vol = 0.0;
                        for (di, dj, dk) in corners() {
                            let sign = if (di + dj + dk) % 2 == 1 { 1.0 } else { -1.0 };
                            vol += sign * c.cdf(g[i + di], g[j + dj], g[k + dk]);
                        }
                        assert!(vol >= -1e-12, "{:?}: {vol} at ({i},{j},{k})", c.spec());
                    }
                }
            }
        }
    }

    // corners (di, dj, dk) ∈ {0,1}³ with sign (−1)^{3 − Σ}
    fn corners() -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for di in 0..2 {
            for dj in 0..2 {
                for dk in 0..2 {
                    out.push((di, dj, dk));
                }
            }
        }
        out
    }

    #[test]
    fn density_matches_third_difference() {
        let h = 1e-3;
        let pts = [0.17, 0.42, 0.66, 0.83];
        for c in models() {
            for &a in &pts {
                for &b in &pts {
                    for &d in &pts {
                        let mut fd = 0.0;
                        for (di, dj, dk) in corners() {
                            let sign = if (di + dj + dk) % 2 == 1 { 1.0 } else { -1.0 };
                            let s = |k: usize| if k == 1 { h } else { -h };
                            fd += sign * c.cdf(a + s(di), b + s(dj), d + s(dk));
                        }
                        fd /= 8.0 * h * h * h;
                        let pdf = c.pdf(a, b, d).unwrap();
                        assert!(
                            (pdf - fd).abs() < 1e-4 * pdf.max(1.0),
                            "{:?} at ({a},{b},{d}): {pdf} vs {fd}",
                            c.spec()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let rule = gauss_rule(64);
        for c in models() {
            if c.family() == Family::Gauss3 || c.family() == Family::Clayton3 {
                // singular corners; covered by the difference test instead
                continue;
            }
            let mass = rule.integrate3(|a, b, d| c.pdf(a, b, d).unwrap());
            assert!((mass - 1.0).abs() < 1e-6, "{:?}: {mass}", c.spec());
        }
    }

    #[test]
    fn hfunc_examples() {
        let fgm = TrivariateCopula::new(FamilySpec::fgm3(1.0).unwrap()).unwrap();
        assert_eq!(fgm.hfunc(Given::OneGivenTwo, 0.5, 0.5).unwrap(), 0.5);
        assert_eq!(fgm.hfunc_inv(Given::OneGivenTwo, 0.37, 0.8).unwrap(), 0.37);
        let frank = TrivariateCopula::new(FamilySpec::frank3(2.0).unwrap()).unwrap();
        let h = frank.hfunc(Given::OneGivenTwo, 0.3, 0.7).unwrap();
        let eps = 1e-6;
        let m = frank.margin(Given::OneGivenTwo);
        let fd = (m.cdf(0.3, 0.7 + eps) - m.cdf(0.3, 0.7 - eps)) / (2.0 * eps);
        assert!(h > 0.0 && h < 1.0);
        assert!((h - fd).abs() < 1e-7);
        for c in models() {
            for which in [Given::OneGivenTwo, Given::ThreeGivenTwo] {
                assert_eq!(c.hfunc(which, 0.0, 0.4).unwrap(), 0.0);
                assert!((c.hfunc(which, 1.0, 0.4).unwrap() - 1.0).abs() < 1e-15);
                assert!(c.hfunc(which, 0.5, 0.0).is_err());
            }
        }
    }

    #[test]
    fn frank_inverse_monotone_in_p() {
        let c = TrivariateCopula::new(FamilySpec::frank3(4.0).unwrap()).unwrap();
        for &g in &[0.1, 0.5, 0.9] {
            let xs: Vec<f64> = (1..100)
                .map(|i| c.hfunc_inv(Given::OneGivenTwo, i as f64 / 100.0, g).unwrap())
                .collect();
            assert!(xs.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn pdf_rejects_boundary() {
        let c = TrivariateCopula::new(FamilySpec::frank3(2.0).unwrap()).unwrap();
        assert!(matches!(
            c.pdf(0.0, 0.5, 0.5),
            Err(CopulaError::EvaluationAtBoundary(_))
        ));
        assert!(c.pdf(0.5, 1.0, 0.5).is_err());
    }

    #[test]
    fn cdf3_checks_range() {
        let c = TrivariateCopula::new(FamilySpec::fgm3(0.5).unwrap()).unwrap();
        assert!(cdf3(&c, 1.2, 0.5, 0.5).is_err());
        assert_eq!(cdf3(&c, 0.3, 1.0, 1.0).unwrap(), 0.3);
    }
}
