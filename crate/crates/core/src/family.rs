use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CopulaError, Result};
use crate::roots::solve_increasing;
use crate::special::debye1_complement;

/// Copula families known to the crate.
///
/// Families ending in `3` are trivariate models whose second coordinate is the
/// conditioning variable; the others are bivariate building blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Fgm3,
    Frank3,
    Gauss3,
    Clayton3,
    /// Trivariate model whose conditional copula is the polynomial
    /// `uv + z·uv(1−u)(1−v)(1+uv)` and whose margins with the conditioning
    /// variable are independent.
    PolyCe,
    Amh2,
    Fgm2,
    Frank2,
    Clayton2,
    Gauss2,
    Product2,
    Comonotone2,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::Fgm3,
        Family::Frank3,
        Family::Gauss3,
        Family::Clayton3,
        Family::PolyCe,
        Family::Amh2,
        Family::Fgm2,
        Family::Frank2,
        Family::Clayton2,
        Family::Gauss2,
        Family::Product2,
        Family::Comonotone2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Fgm3 => "fgm3",
            Family::Frank3 => "frank3",
            Family::Gauss3 => "gauss3",
            Family::Clayton3 => "clayton3",
            Family::PolyCe => "polyce",
            Family::Amh2 => "amh2",
            Family::Fgm2 => "fgm2",
            Family::Frank2 => "frank2",
            Family::Clayton2 => "clayton2",
            Family::Gauss2 => "gauss2",
            Family::Product2 => "product2",
            Family::Comonotone2 => "comonotone2",
        }
    }

    pub fn is_trivariate(self) -> bool {
        matches!(
            self,
            Family::Fgm3 | Family::Frank3 | Family::Gauss3 | Family::Clayton3 | Family::PolyCe
        )
    }

    /// Number of parameters the family takes.
    pub fn arity(self) -> usize {
        match self {
            Family::Gauss3 => 3,
            Family::PolyCe | Family::Product2 | Family::Comonotone2 => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = CopulaError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Family::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| CopulaError::UnsupportedFamily(s.to_string()))
    }
}

/// A family tag plus its parameter vector.
///
/// Construct through [`FamilySpec::new`] (or the per-family shorthands) so the
/// parameters are always validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    family: Family,
    params: Vec<f64>,
}

impl FamilySpec {
    pub fn new(family: Family, params: Vec<f64>) -> Result<Self> {
        validate(FamilySpec { family, params })
    }

    pub fn fgm3(theta: f64) -> Result<Self> {
        Self::new(Family::Fgm3, vec![theta])
    }

    pub fn frank3(theta: f64) -> Result<Self> {
        Self::new(Family::Frank3, vec![theta])
    }

    pub fn clayton3(theta: f64) -> Result<Self> {
        Self::new(Family::Clayton3, vec![theta])
    }

    /// Correlations are ordered `(ρ₁₂, ρ₁₃, ρ₂₃)`.
    pub fn gauss3(rho12: f64, rho13: f64, rho23: f64) -> Result<Self> {
        Self::new(Family::Gauss3, vec![rho12, rho13, rho23])
    }

    pub fn polyce() -> Self {
        FamilySpec {
            family: Family::PolyCe,
            params: Vec::new(),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// The single parameter of one-parameter families.
    pub fn theta(&self) -> f64 {
        self.params.first().copied().unwrap_or(0.0)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{p}")).collect();
            write!(f, "({})", ps.join(", "))?;
        }
        Ok(())
    }
}

/// Checks the per-family parameter constraints and returns the spec unchanged.
pub fn validate(spec: FamilySpec) -> Result<FamilySpec> {
    let family = spec.family;
    let fail = |constraint: String| CopulaError::ParameterOutOfRange {
        family: family.name(),
        constraint,
    };
    if spec.params.len() != family.arity() {
        return Err(fail(format!(
            "expected {} parameter(s), got {}",
            family.arity(),
            spec.params.len()
        )));
    }
    if spec.params.iter().any(|p| !p.is_finite()) {
        return Err(fail("parameters must be finite".into()));
    }
    let p = &spec.params;
    match family {
        Family::Fgm3 | Family::Fgm2 if p[0].abs() > 1.0 => {
            return Err(fail(format!("|θ| ≤ 1 violated by θ = {}", p[0])));
        }
        Family::Frank3 | Family::Clayton3 | Family::Clayton2 if p[0] <= 0.0 => {
            return Err(fail(format!("θ > 0 violated by θ = {}", p[0])));
        }
        Family::Frank2 if p[0] == 0.0 => {
            return Err(fail("θ ≠ 0 violated".into()));
        }
        Family::Amh2 if !(0.0..1.0).contains(&p[0]) => {
            return Err(fail(format!("γ ∈ [0, 1) violated by γ = {}", p[0])));
        }
        Family::Gauss2 if p[0].abs() >= 1.0 => {
            return Err(fail(format!("|ρ| < 1 violated by ρ = {}", p[0])));
        }
        Family::Gauss3 => {
            let (r12, r13, r23) = (p[0], p[1], p[2]);
            if p.iter().any(|r| r.abs() >= 1.0) {
                return Err(fail("|ρ| < 1 violated".into()));
            }
            let det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
            if det <= 0.0 {
                return Err(fail(format!(
                    "correlation matrix not positive definite (det = {det})"
                )));
            }
        }
        _ => {}
    }
    Ok(spec)
}

/// Kendall's τ of the bivariate Frank copula, `1 − 4(1 − D₁(θ))/θ`.
pub fn frank_tau(theta: f64) -> f64 {
    if theta < 0.0 {
        return -frank_tau(-theta);
    }
    if theta < 1e-2 {
        let t2 = theta * theta;
        return theta / 9.0 - theta * t2 / 900.0 + theta * t2 * t2 / 52920.0;
    }
    1.0 - 4.0 * debye1_complement(theta) / theta
}

/// The Frank parameter whose Kendall's τ equals `tau`, for `tau ∈ (0, 1)`.
pub fn frank_tau_to_theta(tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(CopulaError::InvalidInput(format!(
            "Kendall's tau {tau} is outside (0, 1)"
        )));
    }
    let mut hi = 10.0;
    while frank_tau(hi) < tau {
        hi *= 2.0;
    }
    // τ' ≥ 1/9 near zero and shrinks like 4/θ², so a relative bracket of
    // 1e-12 is far below 1e-8 in τ
    solve_increasing(frank_tau, tau, 0.0, hi, 1e-12 * hi)
}
