//! Conditional copulas of trivariate models and the partial copulas obtained
//! by averaging them over the conditioning variable.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bivariate::{check_given, check_open, Bivariate, BivariateCopula, TailSide};
use crate::error::{CopulaError, Result};
use crate::family::Family;
use crate::quadrature::QuadratureRule;
use crate::trivariate::{gauss_partial_rho, TrivariateCopula};

/// A map from a conditioning value to a bivariate copula.
pub type CopulaMap = Arc<dyn Fn(f64) -> Bivariate + Send + Sync>;

/// The copula of `(U₁, U₃)` given `U₂ = z`, as a function of `z`.
#[derive(Clone)]
pub enum ConditionalFamily {
    /// FGM with parameter `θ(1 − 2z)`.
    FgmLinear { theta: f64 },
    /// AMH with parameter `1 − e^{−θz}`.
    AmhFrank { theta: f64 },
    /// The same copula at every `z`.
    Constant(Bivariate),
    /// `uv + z·uv(1−u)(1−v)(1+uv)`.
    PolyCe,
    /// Skewed FGM with fixed `θ` and skew `κ(1 − 2z)`.
    SkewFgm { theta: f64, skew: f64 },
    /// Any other parametric path.
    Custom { label: String, map: CopulaMap },
}

impl ConditionalFamily {
    pub fn custom<F>(label: impl Into<String>, map: F) -> Self
    where
        F: Fn(f64) -> Bivariate + Send + Sync + 'static,
    {
        ConditionalFamily::Custom {
            label: label.into(),
            map: Arc::new(map),
        }
    }

    /// The conditional copula at `z`.
    pub fn at(&self, z: f64) -> Bivariate {
        match self {
            ConditionalFamily::FgmLinear { theta } => Bivariate::Fgm {
                theta: theta * (1.0 - 2.0 * z),
            },
            ConditionalFamily::AmhFrank { theta } => Bivariate::Amh {
                gamma: amh_gamma(*theta, z),
            },
            ConditionalFamily::Constant(b) => *b,
            ConditionalFamily::PolyCe => Bivariate::PolyCe { weight: z },
            ConditionalFamily::SkewFgm { theta, skew } => Bivariate::SkewFgm {
                theta: *theta,
                skew: skew * (1.0 - 2.0 * z),
            },
            ConditionalFamily::Custom { map, .. } => map(z),
        }
    }

    /// `C(u₁, u₂ | z)`.
    pub fn eval(&self, u1: f64, u2: f64, z: f64) -> f64 {
        self.at(z).cdf(u1, u2)
    }

    /// `c(u₁, u₂ | z)`.
    pub fn pdf(&self, u1: f64, u2: f64, z: f64) -> Result<f64> {
        self.at(z).pdf(u1, u2)
    }

    pub fn has_density(&self) -> bool {
        match self {
            ConditionalFamily::Constant(b) => b.has_density(),
            ConditionalFamily::Custom { map, .. } => map(0.5).has_density(),
            _ => true,
        }
    }

    /// True when the conditional copula does not depend on `z`.
    pub fn is_simplified(&self) -> bool {
        match self {
            ConditionalFamily::Constant(_) => true,
            ConditionalFamily::FgmLinear { theta } => *theta == 0.0,
            ConditionalFamily::SkewFgm { skew, .. } => *skew == 0.0,
            _ => false,
        }
    }

    /// The partial copula under a uniform conditioning variable, when it has
    /// a closed form.
    pub fn closed_form_partial(&self) -> Option<Bivariate> {
        match self {
            ConditionalFamily::FgmLinear { .. } => Some(Bivariate::Product),
            ConditionalFamily::AmhFrank { theta } => Some(Bivariate::PartialFrank { theta: *theta }),
            ConditionalFamily::Constant(b) => Some(*b),
            ConditionalFamily::PolyCe => Some(Bivariate::PolyCe { weight: 0.5 }),
            ConditionalFamily::SkewFgm { theta, .. } => Some(Bivariate::Fgm { theta: *theta }),
            ConditionalFamily::Custom { .. } => None,
        }
    }
}

impl fmt::Debug for ConditionalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConditionalFamily({self})")
    }
}

impl fmt::Display for ConditionalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionalFamily::FgmLinear { theta } => write!(f, "fgm({theta}·(1−2z))"),
            ConditionalFamily::AmhFrank { theta } => write!(f, "amh(1−exp(−{theta}z))"),
            ConditionalFamily::Constant(b) => write!(f, "{b}"),
            ConditionalFamily::PolyCe => write!(f, "polyce(z)"),
            ConditionalFamily::SkewFgm { theta, skew } => {
                write!(f, "skew-fgm({theta}, {skew}·(1−2z))")
            }
            ConditionalFamily::Custom { label, .. } => f.write_str(label),
        }
    }
}

/// AMH parameter of the trivariate Frank conditional copula.
pub fn amh_gamma(theta: f64, z: f64) -> f64 {
    -(-theta * z).exp_m1()
}

/// The conditional copula of a trivariate model given its second coordinate.
pub fn conditional_copula(cop: &TrivariateCopula) -> Result<ConditionalFamily> {
    let t = cop.spec().theta();
    Ok(match cop.family() {
        Family::Fgm3 => ConditionalFamily::FgmLinear { theta: t },
        Family::Frank3 => ConditionalFamily::AmhFrank { theta: t },
        Family::Clayton3 => ConditionalFamily::Constant(Bivariate::Clayton {
            theta: t / (1.0 + t),
        }),
        Family::Gauss3 => {
            let p = cop.spec().params();
            ConditionalFamily::Constant(Bivariate::Gaussian {
                rho: gauss_partial_rho(p[0], p[1], p[2]),
            })
        }
        Family::PolyCe => ConditionalFamily::PolyCe,
        other => {
            return Err(CopulaError::UnsupportedFamily(format!(
                "{other} has no conditional copula"
            )))
        }
    })
}

/// Distribution of the conditioning variable on the copula scale.
#[derive(Clone, Default)]
pub enum MixingLaw {
    /// `Z` uniform on `[0, 1]`.
    #[default]
    Uniform,
    /// `Z = Q(W)` with `W` uniform; `Q` must map `(0, 1)` into `(0, 1)`.
    Quantile(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl MixingLaw {
    /// Nodes and weights of `∫ g(z) dF_Z(z)` under `rule`.
    pub fn nodes(&self, rule: &QuadratureRule) -> Vec<(f64, f64)> {
        match self {
            MixingLaw::Uniform => rule.iter().collect(),
            MixingLaw::Quantile(q) => rule.iter().map(|(t, w)| (q(t), w)).collect(),
        }
    }
}

impl fmt::Debug for MixingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MixingLaw::Uniform => f.write_str("Uniform"),
            MixingLaw::Quantile(_) => f.write_str("Quantile(..)"),
        }
    }
}

/// How a [`PartialCopula`] evaluates the average over `z`.
#[derive(Debug, Clone)]
pub enum Mode {
    ClosedForm,
    Quadrature(QuadratureRule),
}

/// The expected conditional copula `∫ C(u, v | z) dF_Z(z)`.
#[derive(Debug, Clone)]
pub struct PartialCopula {
    cond: ConditionalFamily,
    mixing: MixingLaw,
    mode: Mode,
    eval: Eval,
}

#[derive(Debug, Clone)]
enum Eval {
    Closed(Bivariate),
    Slices(Vec<(f64, Bivariate)>),
}

impl PartialCopula {
    /// Fails with `UnsupportedFamily` when closed form is requested for a
    /// conditional family without one, or together with a non-uniform mixing
    /// law.
    pub fn new(cond: ConditionalFamily, mixing: MixingLaw, mode: Mode) -> Result<Self> {
        let eval = match &mode {
            Mode::ClosedForm => {
                let closed = match mixing {
                    MixingLaw::Uniform => cond.closed_form_partial(),
                    MixingLaw::Quantile(_) => None,
                };
                Eval::Closed(closed.ok_or_else(|| {
                    CopulaError::UnsupportedFamily(format!(
                        "no closed-form partial copula for {cond} under {mixing:?} mixing"
                    ))
                })?)
            }
            Mode::Quadrature(rule) => Eval::Slices(
                mixing
                    .nodes(rule)
                    .into_iter()
                    .map(|(z, w)| (w, cond.at(z)))
                    .collect(),
            ),
        };
        Ok(PartialCopula {
            cond,
            mixing,
            mode,
            eval,
        })
    }

    pub fn closed_form(cond: ConditionalFamily) -> Result<Self> {
        Self::new(cond, MixingLaw::Uniform, Mode::ClosedForm)
    }

    pub fn quadrature(cond: ConditionalFamily, rule: QuadratureRule) -> Self {
        Self::new(cond, MixingLaw::Uniform, Mode::Quadrature(rule))
            .expect("quadrature mode always applies")
    }

    /// Partial copula of a trivariate model with a uniform conditioning
    /// variable.
    pub fn of(cop: &TrivariateCopula, mode: Mode) -> Result<Self> {
        Self::new(conditional_copula(cop)?, MixingLaw::Uniform, mode)
    }

    pub fn conditional(&self) -> &ConditionalFamily {
        &self.cond
    }

    pub fn mixing(&self) -> &MixingLaw {
        &self.mixing
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    /// The closed-form copula backing a `ClosedForm` partial copula.
    pub fn closed(&self) -> Option<Bivariate> {
        match self.eval {
            Eval::Closed(b) => Some(b),
            Eval::Slices(_) => None,
        }
    }

    fn average<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&Bivariate) -> Result<f64>,
    {
        match &self.eval {
            Eval::Closed(b) => f(b),
            Eval::Slices(slices) => {
                let mut total = 0.0;
                for (w, b) in slices {
                    total += w * f(b)?;
                }
                Ok(total)
            }
        }
    }
}

impl BivariateCopula for PartialCopula {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        self.average(|b| Ok(b.cdf(u, v))).unwrap_or(f64::NAN)
    }

    fn pdf(&self, u: f64, v: f64) -> Result<f64> {
        check_open(&[u, v])?;
        self.average(|b| b.pdf(u, v))
    }

    fn h1(&self, v: f64, u: f64) -> Result<f64> {
        check_given(u)?;
        Ok(self.average(|b| b.h1(v, u))?.clamp(0.0, 1.0))
    }

    fn h2(&self, u: f64, v: f64) -> Result<f64> {
        check_given(v)?;
        Ok(self.average(|b| b.h2(u, v))?.clamp(0.0, 1.0))
    }

    fn h1_inv(&self, p: f64, u: f64) -> Result<f64> {
        match self.eval {
            Eval::Closed(b) => b.h1_inv(p, u),
            Eval::Slices(_) => crate::roots::solve_increasing(
                |v| self.h1(v, u).unwrap_or(f64::NAN),
                p,
                0.0,
                1.0,
                crate::bivariate::INVERSION_TOL,
            ),
        }
    }

    fn h2_inv(&self, p: f64, v: f64) -> Result<f64> {
        match self.eval {
            Eval::Closed(b) => b.h2_inv(p, v),
            Eval::Slices(_) => crate::roots::solve_increasing(
                |u| self.h2(u, v).unwrap_or(f64::NAN),
                p,
                0.0,
                1.0,
                crate::bivariate::INVERSION_TOL,
            ),
        }
    }

    fn tail_closed_form(&self, side: TailSide) -> Option<f64> {
        match self.eval {
            Eval::Closed(b) => b.tail_closed_form(side),
            Eval::Slices(_) => None,
        }
    }

    fn spearman_closed_form(&self) -> Option<f64> {
        self.closed().and_then(|b| b.spearman_closed_form())
    }

    fn kendall_closed_form(&self) -> Option<f64> {
        self.closed().and_then(|b| b.kendall_closed_form())
    }

    fn has_density(&self) -> bool {
        self.cond.has_density()
    }

    fn label(&self) -> String {
        match self.mode {
            Mode::ClosedForm => format!("partial[{}]", self.cond),
            Mode::Quadrature(ref r) => format!("partial[{}; order {}]", self.cond, r.order()),
        }
    }
}

/// `C^P(u₁, u₂)`.
pub fn partial_cdf(pc: &PartialCopula, u1: f64, u2: f64) -> f64 {
    pc.cdf(u1, u2)
}

/// `c^P(u₁, u₂)` for `u₁, u₂ ∈ (0, 1)`.
pub fn partial_pdf(pc: &PartialCopula, u1: f64, u2: f64) -> Result<f64> {
    pc.pdf(u1, u2)
}

/// `E[C(u₁, u₂ | Z) | U₁ = u₁, U₂ = u₂]` for a uniform `Z`, with the
/// conditional density of `Z` given the pair assembled by quadrature.
///
/// On the boundary of the square every conditional copula takes the same
/// value, which is returned directly.
pub fn l2_projection_bruteforce(
    cf: &ConditionalFamily,
    u1: f64,
    u2: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    if !cf.has_density() {
        return Err(CopulaError::UnsupportedFamily(format!(
            "{cf} has no density, so the projection is undefined"
        )));
    }
    if u1 <= 0.0 || u2 <= 0.0 || u1 >= 1.0 || u2 >= 1.0 {
        return Ok(cf.eval(u1, u2, 0.5));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (z, w) in rule.iter() {
        let c = cf.at(z);
        let dens = c.pdf(u1, u2)?;
        num += w * c.cdf(u1, u2) * dens;
        den += w * dens;
    }
    Ok(num / den)
}

/// Closed-form L2 projection of the conditional FGM copula with parameter
/// `θ(1 − 2z)` onto functions of the pair.
pub fn l2_projection_fgm(theta: f64, u1: f64, u2: f64) -> f64 {
    let (a, b) = (u1, u2);
    let bracket = 4.0 * a * a * b * b - 6.0 * (a * a * b + a * b * b)
        + 2.0 * (a * a + b * b)
        + 9.0 * a * b
        - 3.0 * (a + b)
        + 1.0;
    a * b * (1.0 + theta * theta * bracket / 3.0)
}

const DENSITY_FLOOR: f64 = 1e-300;

/// `∫₀¹∫∫ c(u, v | z) log(c(u, v | z) / c̃(u, v)) du dv dz` for a uniform `Z`
/// on the tensor grid of `rule`.
pub fn kl_divergence<C>(cf: &ConditionalFamily, candidate: &C, rule: &QuadratureRule) -> Result<f64>
where
    C: BivariateCopula + ?Sized,
{
    let nodes: Vec<(f64, f64)> = rule.iter().collect();
    let mut cand = Vec::with_capacity(nodes.len() * nodes.len());
    for &(u, _) in &nodes {
        for &(v, _) in &nodes {
            let d = candidate.pdf(u, v)?;
            if !(d >= DENSITY_FLOOR) {
                return Err(CopulaError::NonpositiveDensity {
                    u1: u,
                    u2: v,
                    value: d,
                });
            }
            cand.push(d.ln());
        }
    }
    let per_z: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|&(z, wz)| {
            let c = cf.at(z);
            let mut acc = 0.0;
            for (i, &(u, wu)) in nodes.iter().enumerate() {
                for (j, &(v, wv)) in nodes.iter().enumerate() {
                    let d = c.pdf(u, v)?;
                    if d > 0.0 {
                        acc += wu * wv * d * (d.ln() - cand[i * nodes.len() + j]);
                    }
                }
            }
            Ok(wz * acc)
        })
        .collect();
    // summed in node order so the result does not depend on scheduling
    per_z.into_iter().sum()
}

/// Both bracketings of `C(C(a, b), c)` and their absolute difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Associativity {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Compares `C(C(a, b), c)` with `C(a, C(b, c))`.
pub fn associativity_check<C>(pc: &C, a: f64, b: f64, c: f64) -> Associativity
where
    C: BivariateCopula + ?Sized,
{
    let lhs = pc.cdf(pc.cdf(a, b), c);
    let rhs = pc.cdf(a, pc.cdf(b, c));
    Associativity {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilySpec;
    use crate::quadrature::gauss_rule;
    use crate::trivariate::Given;

    fn trivariates() -> Vec<TrivariateCopula> {
        [
            FamilySpec::fgm3(0.8),
            FamilySpec::frank3(3.0),
            FamilySpec::clayton3(2.0),
            FamilySpec::gauss3(0.5, 0.3, 0.4),
            Ok(FamilySpec::polyce()),
        ]
        .into_iter()
        .map(|s| TrivariateCopula::new(s.unwrap()).unwrap())
        .collect()
    }

    // c(u₁,u₂,u₃) = c₁₃|₂(h₁, h₃ | u₂) · c₁₂(u₁,u₂) · c₃₂(u₃,u₂)
    #[test]
    fn conditional_density_factorizes_trivariate_density() {
        let pts = [0.15, 0.4, 0.7, 0.9];
        for cop in trivariates() {
            let cf = conditional_copula(&cop).unwrap();
            let m1 = cop.margin(Given::OneGivenTwo);
            let m3 = cop.margin(Given::ThreeGivenTwo);
            for &a in &pts {
                for &z in &pts {
                    for &b in &pts {
                        let h1 = m1.h2(a, z).unwrap();
                        let h3 = m3.h2(b, z).unwrap();
                        let joint = cf.pdf(h1, h3, z).unwrap()
                            * m1.pdf(a, z).unwrap()
                            * m3.pdf(b, z).unwrap();
                        let want = cop.pdf(a, z, b).unwrap();
                        assert!(
                            (joint - want).abs() < 1e-9 * want.max(1.0),
                            "{:?} at ({a},{z},{b}): {joint} vs {want}",
                            cop.spec()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn conditional_examples() {
        let fgm = TrivariateCopula::new(FamilySpec::fgm3(1.0).unwrap()).unwrap();
        assert_eq!(conditional_copula(&fgm).unwrap().at(0.5), Bivariate::Fgm { theta: 0.0 });
        let frank = TrivariateCopula::new(FamilySpec::frank3(2.0).unwrap()).unwrap();
        let at0 = conditional_copula(&frank).unwrap().at(0.0);
        assert_eq!(at0, Bivariate::Amh { gamma: 0.0 });
        assert_eq!(at0.cdf(0.3, 0.6), 0.3 * 0.6);
        let poly = ConditionalFamily::PolyCe;
        assert_eq!(poly.eval(0.3, 0.6, 0.0), 0.3 * 0.6);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let rule = gauss_rule(64);
        let families = [
            ConditionalFamily::FgmLinear { theta: 1.0 },
            ConditionalFamily::AmhFrank { theta: 2.0 },
            ConditionalFamily::AmhFrank { theta: 8.0 },
            ConditionalFamily::PolyCe,
            ConditionalFamily::SkewFgm {
                theta: 0.5,
                skew: 0.25,
            },
        ];
        for cf in families {
            let closed = PartialCopula::closed_form(cf.clone()).unwrap();
            let quad = PartialCopula::quadrature(cf.clone(), rule.clone());
            for i in 1..20 {
                for j in 1..20 {
                    let (u, v) = (i as f64 / 20.0, j as f64 / 20.0);
                    assert!((closed.cdf(u, v) - quad.cdf(u, v)).abs() < 1e-10, "{cf} cdf");
                    let (a, b) = (closed.pdf(u, v).unwrap(), quad.pdf(u, v).unwrap());
                    assert!((a - b).abs() < 1e-8, "{cf} pdf at ({u},{v}): {a} vs {b}");
                    let (a, b) = (closed.h2(u, v).unwrap(), quad.h2(u, v).unwrap());
                    assert!((a - b).abs() < 1e-9, "{cf} h2");
                }
            }
        }
    }

    #[test]
    fn partial_frank_has_uniform_margins() {
        let pc = PartialCopula::closed_form(ConditionalFamily::AmhFrank { theta: 2.0 }).unwrap();
        for u in [0.0, 0.1, 0.37, 0.8, 1.0] {
            assert!((partial_cdf(&pc, u, 1.0) - u).abs() < 1e-15);
            assert!((partial_cdf(&pc, 1.0, u) - u).abs() < 1e-15);
        }
    }

    #[test]
    fn polyce_partial_density_at_center() {
        // d²/du dv of uv(1−u)(1−v)(1+uv) at (1/2, 1/2) is 1/16
        let pc = PartialCopula::closed_form(ConditionalFamily::PolyCe).unwrap();
        assert!((partial_pdf(&pc, 0.5, 0.5).unwrap() - 1.03125).abs() < 1e-15);
    }

    #[test]
    fn partial_density_normalizes() {
        let rule = gauss_rule(64);
        let pc = PartialCopula::closed_form(ConditionalFamily::AmhFrank { theta: 2.0 }).unwrap();
        let total = rule.integrate2(|u, v| pc.pdf(u, v).unwrap());
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn simplified_families_equal_every_slice() {
        let rule = gauss_rule(32);
        for cop in trivariates() {
            let cf = conditional_copula(&cop).unwrap();
            if !cf.is_simplified() {
                continue;
            }
            let pc = PartialCopula::quadrature(cf.clone(), rule.clone());
            for z in [0.1, 0.5, 0.9] {
                for (u, v) in [(0.2, 0.3), (0.6, 0.6), (0.9, 0.4)] {
                    assert!((pc.cdf(u, v) - cf.eval(u, v, z)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn closed_form_requires_known_partial() {
        let cf = ConditionalFamily::custom("gauss(z)", |z| Bivariate::Gaussian { rho: z - 0.5 });
        assert!(matches!(
            PartialCopula::closed_form(cf.clone()),
            Err(CopulaError::UnsupportedFamily(_))
        ));
        let nonuniform = MixingLaw::Quantile(Arc::new(|w: f64| w * w));
        assert!(PartialCopula::new(
            ConditionalFamily::PolyCe,
            nonuniform.clone(),
            Mode::ClosedForm
        )
        .is_err());
        // with Z = W², E[Z] = 1/3, so the PolyCe partial has weight 1/3
        let pc = PartialCopula::new(ConditionalFamily::PolyCe, nonuniform, Mode::Quadrature(gauss_rule(8)))
            .unwrap();
        let want = Bivariate::PolyCe { weight: 1.0 / 3.0 }.cdf(0.3, 0.7);
        assert!((pc.cdf(0.3, 0.7) - want).abs() < 1e-15);
    }

    #[test]
    fn l2_projection_examples() {
        let rule = gauss_rule(64);
        let zero = ConditionalFamily::FgmLinear { theta: 0.0 };
        assert!((l2_projection_bruteforce(&zero, 0.3, 0.6, &rule).unwrap() - 0.18).abs() < 1e-15);
        let one = ConditionalFamily::FgmLinear { theta: 1.0 };
        assert_eq!(l2_projection_bruteforce(&one, 1.0, 1.0, &rule).unwrap(), 1.0);
        for u in [0.1, 0.5, 0.9] {
            assert!((l2_projection_fgm(1.0, u, 1.0) - u).abs() < 1e-15);
        }
        assert!((l2_projection_fgm(1.0, 0.5, 0.5) - 0.25).abs() < 1e-16);
        let off = l2_projection_fgm(1.0, 0.25, 0.75);
        assert!((off - 0.1875).abs() > 1e-4);
        let brute = l2_projection_bruteforce(&one, 0.25, 0.75, &rule).unwrap();
        assert!((brute - off).abs() < 1e-8);
    }

    // The projection reduces to uv(1 + θ²(1−u)(1−v)(1−2u)(1−2v)/3).
    #[test]
    fn l2_projection_polynomial_factorizes() {
        for &(u, v) in &[(0.1, 0.2), (0.33, 0.71), (0.9, 0.45)] {
            let direct = u * v * (1.0 + (1.0 - u) * (1.0 - v) * (1.0 - 2.0 * u) * (1.0 - 2.0 * v) / 3.0);
            assert!((l2_projection_fgm(1.0, u, v) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn kl_of_simplified_family_against_itself_is_zero() {
        let rule = gauss_rule(32);
        let cf = ConditionalFamily::Constant(Bivariate::Clayton { theta: 2.0 / 3.0 });
        let pc = PartialCopula::closed_form(cf.clone()).unwrap();
        assert!(kl_divergence(&cf, &pc, &rule).unwrap().abs() < 1e-8);
    }

    #[test]
    fn kl_prefers_the_partial_copula() {
        let rule = gauss_rule(32);
        let cf = ConditionalFamily::AmhFrank { theta: 2.0 };
        let pc = PartialCopula::closed_form(cf.clone()).unwrap();
        let at_partial = kl_divergence(&cf, &pc, &rule).unwrap();
        assert!(at_partial >= -1e-9);
        assert!(at_partial < kl_divergence(&cf, &Bivariate::Product, &rule).unwrap());
        assert!(at_partial < kl_divergence(&cf, &Bivariate::Fgm { theta: 0.5 }, &rule).unwrap());
    }

    #[test]
    fn kl_rejects_vanishing_candidate_density() {
        let rule = gauss_rule(8);
        let cf = ConditionalFamily::PolyCe;
        let err = kl_divergence(&cf, &Bivariate::Comonotone, &rule).unwrap_err();
        assert!(matches!(err, CopulaError::DensityUnavailable(_)));
        let clayton = Bivariate::Clayton { theta: 300.0 };
        assert!(matches!(
            kl_divergence(&cf, &clayton, &rule).unwrap_err(),
            CopulaError::NonpositiveDensity { .. }
        ));
    }

    #[test]
    fn associativity_examples() {
        let prod = associativity_check(&Bivariate::Product, 0.25, 0.5, 0.5);
        assert_eq!(prod.gap, 0.0);
        let fgm = PartialCopula::closed_form(ConditionalFamily::FgmLinear { theta: 1.0 }).unwrap();
        assert_eq!(associativity_check(&fgm, 0.25, 0.5, 0.5).gap, 0.0);
        let theta = crate::family::frank_tau_to_theta(0.4).unwrap();
        let frank = PartialCopula::closed_form(ConditionalFamily::AmhFrank { theta }).unwrap();
        assert!(associativity_check(&frank, 0.25, 0.5, 0.5).gap > 1e-6);
    }

    #[test]
    fn skew_fgm_slices_are_copulas() {
        let cf = ConditionalFamily::SkewFgm {
            theta: 0.5,
            skew: 0.25,
        };
        for z in [0.0, 0.5, 1.0] {
            let c = cf.at(z);
            for i in 1..40 {
                for j in 1..40 {
                    let d = c.pdf(i as f64 / 40.0, j as f64 / 40.0).unwrap();
                    assert!(d > 0.0);
                }
            }
        }
    }
}
