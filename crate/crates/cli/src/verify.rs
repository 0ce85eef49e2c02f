use partial_copula::dependence::tail_coefficient;
use partial_copula::partial::amh_gamma;
use partial_copula::{
    associativity_check, cond_corr_profile, conditional_copula, expected_conditional_measure,
    frank_tau_to_theta, kendall_tau, kl_divergence, l2_projection_bruteforce, l2_projection_fgm,
    partial_correlation_demo, spearman_rho, Bivariate, BivariateCopula, ConditionalFamily,
    FamilySpec, Measure, PartialCopula, QuadratureRule, Result, TailSide, TrivariateCopula,
};
use serde_json::{json, Value};

use crate::output::{sig, Cell, Table};

#[derive(Debug, Clone, Copy)]
pub enum Bound {
    /// `|value − target| ≤ tol`, with the target printed as `label`.
    Near {
        target: f64,
        label: &'static str,
        tol: f64,
    },
    Above(f64),
    Below(f64),
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
}

impl Check {
    fn near(name: impl Into<String>, value: f64, target: f64, label: &'static str, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound: Bound::Near { target, label, tol },
        }
    }

    fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound: Bound::Above(bound),
        }
    }

    fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound: Bound::Below(bound),
        }
    }

    pub fn pass(&self) -> bool {
        match self.bound {
            Bound::Near { target, tol, .. } => (self.value - target).abs() <= tol,
            Bound::Above(b) => self.value > b,
            Bound::Below(b) => self.value < b,
        }
    }

    fn status(&self) -> &'static str {
        if self.pass() {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn line(&self) -> String {
        match self.bound {
            Bound::Near { label, tol, .. } => format!(
                "{}: {} vs {label} {} (tol {})",
                self.name,
                show(self.value),
                self.status(),
                show_bound(tol)
            ),
            Bound::Above(b) => format!(
                "{}: > {} {} (value {})",
                self.name,
                show_bound(b),
                self.status(),
                show(self.value)
            ),
            Bound::Below(b) => format!(
                "{}: < {} {} (value {})",
                self.name,
                show_bound(b),
                self.status(),
                show(self.value)
            ),
        }
    }

    fn reference(&self) -> (String, f64) {
        match self.bound {
            Bound::Near { target, label, tol } => (format!("{label} = {target}"), tol),
            Bound::Above(b) => (format!("> {b}"), 0.0),
            Bound::Below(b) => (format!("< {b}"), 0.0),
        }
    }
}

fn show(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        format!("{v:.7}")
    } else {
        format!("{v:.3e}")
    }
}

fn show_bound(v: f64) -> String {
    sig(v, 4)
}

fn grid21() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

fn max_gap<A, B>(a: &A, b: &B, points: &[f64]) -> f64
where
    A: BivariateCopula + ?Sized,
    B: BivariateCopula + ?Sized,
{
    let mut worst = 0.0f64;
    for &u in points {
        for &v in points {
            worst = worst.max((a.cdf(u, v) - b.cdf(u, v)).abs());
        }
    }
    worst
}

/// Runs every check with quadrature rule `rule` and simulated checks of
/// size `n` from `seed`.
pub fn run(rule: &QuadratureRule, n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let polyce = ConditionalFamily::PolyCe;

    let fgm_partial = PartialCopula::quadrature(ConditionalFamily::FgmLinear { theta: 1.0 }, rule.clone());
    checks.push(Check::near(
        "partial FGM3(1) equals product, max grid gap",
        max_gap(&fgm_partial, &Bivariate::Product, &grid21()),
        0.0,
        "0",
        1e-10,
    ));

    for theta in [0.5, 2.0, 8.0] {
        let cf = ConditionalFamily::AmhFrank { theta };
        let closed = PartialCopula::closed_form(cf.clone())?;
        let quad = PartialCopula::quadrature(cf, rule.clone());
        checks.push(Check::near(
            format!("partial-Frank closed form vs quadrature, θ = {theta}"),
            max_gap(&closed, &quad, &grid21()),
            0.0,
            "0",
            1e-8,
        ));
    }

    let points: Vec<f64> = (1..=5).map(|i| i as f64 / 6.0).collect();
    let fgm_linear = ConditionalFamily::FgmLinear { theta: 1.0 };
    let (mut l2_gap, mut l2_vs_product) = (0.0f64, 0.0f64);
    for &u in &points {
        for &v in &points {
            let closed = l2_projection_fgm(1.0, u, v);
            l2_gap = l2_gap.max((closed - l2_projection_bruteforce(&fgm_linear, u, v, rule)?).abs());
            l2_vs_product = l2_vs_product.max((closed - u * v).abs());
        }
    }
    checks.push(Check::near("L2 projection FGM3(1) closed form vs brute force", l2_gap, 0.0, "0", 1e-8));
    checks.push(Check::above("L2 projection FGM3(1) distance from the partial copula", l2_vs_product, 1e-4));

    let frank_cf = conditional_copula(&TrivariateCopula::new(FamilySpec::frank3(2.0)?)?)?;
    let frank_partial = PartialCopula::closed_form(frank_cf.clone())?;
    let kl_partial = kl_divergence(&frank_cf, &frank_partial, rule)?;
    let mut alternatives = vec![Bivariate::Product];
    alternatives.extend([-0.5, 0.25, 0.5, 0.75, 1.0].map(|theta| Bivariate::Fgm { theta }));
    alternatives.extend([0.2, 0.4, 0.6, 0.8].map(|gamma| Bivariate::Amh { gamma }));
    alternatives.push(Bivariate::Amh { gamma: amh_gamma(2.0, 0.5) });
    let mut kl_margin = f64::INFINITY;
    for alt in &alternatives {
        kl_margin = kl_margin.min(kl_divergence(&frank_cf, alt, rule)? - kl_partial);
    }
    checks.push(Check::above(
        format!("KL excess of {} alternatives over partial Frank3(2)", alternatives.len()),
        kl_margin,
        1e-4,
    ));

    let theta = frank_tau_to_theta(0.4)?;
    let assoc = associativity_check(
        &PartialCopula::closed_form(ConditionalFamily::AmhFrank { theta })?,
        0.25,
        0.5,
        0.5,
    );
    checks.push(Check::above("partial-Frank associativity gap at (0.25,0.5,0.5)", assoc.gap, 1e-6));

    for row in partial_correlation_demo(&[1.0, 0.1, 0.01], n, seed)? {
        checks.push(Check::near(
            format!("partial correlation at σ = {}", row.sigma),
            row.sample,
            row.population,
            "2/(2+σ)",
            0.02,
        ));
        checks.push(Check::below(
            format!("CPIT independence sup-distance at σ = {}", row.sigma),
            row.sup_distance,
            row.band,
        ));
    }

    checks.push(Check::near("conditional correlation profile at z = 1", cond_corr_profile(&[1.0])[0], 1.0, "1", 0.0));
    let grid: Vec<f64> = (1..=1000).map(|i| i as f64 / 100.0).collect();
    let profile = cond_corr_profile(&grid);
    let outside = profile.iter().filter(|v| !(0.0..=1.0).contains(*v)).count();
    checks.push(Check::near("conditional correlation profile values outside [0,1] on (0,10]", outside as f64, 0.0, "0", 0.0));

    let specs = [
        ("FGM3(1)", FamilySpec::fgm3(1.0)?),
        ("Frank3(2)", FamilySpec::frank3(2.0)?),
        ("PolyCE", FamilySpec::polyce()),
    ];
    for (label, spec) in &specs {
        let cf = conditional_copula(&TrivariateCopula::new(spec.clone())?)?;
        let pc = PartialCopula::quadrature(cf.clone(), rule.clone());
        let rho = spearman_rho(&pc, rule);
        let expected = expected_conditional_measure(&cf, Measure::Spearman, rule)?;
        checks.push(Check::near(format!("spearman partial vs expected-conditional {label}"), rho - expected, 0.0, "0", 1e-6));
        for (side, m) in [(TailSide::Lower, Measure::TailLower), (TailSide::Upper, Measure::TailUpper)] {
            let lam = tail_coefficient(&pc, side)?;
            let expected = expected_conditional_measure(&cf, m, rule)?;
            checks.push(Check::near(format!("{} partial vs expected-conditional {label}", m.name()), lam - expected, 0.0, "0", 1e-3));
        }
    }

    let expected_tau = expected_conditional_measure(&polyce, Measure::Kendall, rule)?;
    checks.push(Check::near("kendall expected-conditional PolyCE", expected_tau, 377.0 / 2700.0, "377/2700", 1e-7));
    let partial_tau = kendall_tau(&PartialCopula::quadrature(polyce.clone(), rule.clone()), rule)?;
    checks.push(Check::near("kendall partial PolyCE", partial_tau, 251.0 / 1800.0, "251/1800", 1e-7));
    checks.push(Check::above("kendall partial vs expected-conditional gap PolyCE", (expected_tau - partial_tau).abs(), 1e-5));
    let mut formula_gap = 0.0f64;
    for z in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let tau = kendall_tau(&polyce.at(z), rule)?;
        formula_gap = formula_gap.max((tau - (z * z / 450.0 + 5.0 * z / 18.0)).abs());
    }
    checks.push(Check::near("kendall conditional PolyCE vs z²/450 + 5z/18", formula_gap, 0.0, "0", 1e-7));

    let z_grid: Vec<f64> = (0..=10).map(|i| (i as f64 / 10.0).clamp(1e-6, 1.0 - 1e-6)).collect();
    for (label, spec) in &specs[..2] {
        let cf = conditional_copula(&TrivariateCopula::new(spec.clone())?)?;
        let pc = PartialCopula::quadrature(cf.clone(), rule.clone());
        let mut largest = 0.0f64;
        for side in [TailSide::Lower, TailSide::Upper] {
            largest = largest.max(tail_coefficient(&pc, side)?);
            for &z in &z_grid {
                largest = largest.max(tail_coefficient(&cf.at(z), side)?);
            }
        }
        checks.push(Check::below(format!("largest partial or conditional tail {label}"), largest, 1e-3));
    }
    let clayton = ConditionalFamily::Constant(Bivariate::Clayton { theta: 2.0 });
    let lam = tail_coefficient(&PartialCopula::quadrature(clayton.clone(), rule.clone()), TailSide::Lower)?;
    checks.push(Check::near("lower tail partial, conditional Clayton(2)", lam, 2f64.powf(-0.5), "2^(-1/2)", 1e-3));
    let mut slice_gap = 0.0f64;
    for &z in &z_grid {
        slice_gap = slice_gap.max((tail_coefficient(&clayton.at(z), TailSide::Lower)? - lam).abs());
    }
    checks.push(Check::near("lower tail partial vs conditional slices, Clayton(2)", slice_gap, 0.0, "0", 1e-3));
    let c3 = conditional_copula(&TrivariateCopula::new(FamilySpec::clayton3(2.0)?)?)?;
    let lam3 = tail_coefficient(&PartialCopula::quadrature(c3, rule.clone()), TailSide::Lower)?;
    checks.push(Check::near("lower tail partial Clayton3(2)", lam3, 2f64.powf(-1.5), "2^(-3/2)", 1e-3));

    Ok(checks)
}

pub fn table(checks: &[Check]) -> Table {
    let mut t = Table::new(["check", "value", "reference", "tolerance", "pass"]);
    for c in checks {
        let (reference, tol) = c.reference();
        t.push(vec![
            Cell::Text(c.name.replace(',', ";")),
            c.value.into(),
            Cell::Text(reference.replace(',', ";")),
            tol.into(),
            c.status().into(),
        ]);
    }
    t
}

pub fn json(checks: &[Check], order: usize, n: usize, seed: u64) -> Value {
    let items: Vec<Value> = checks
        .iter()
        .map(|c| {
            let (reference, tol) = c.reference();
            json!({
                "check": c.name,
                "value": c.value,
                "reference": reference,
                "tolerance": tol,
                "pass": c.pass(),
            })
        })
        .collect();
    json!({
        "command": "verify",
        "order": order,
        "n": n,
        "seed": seed,
        "all_pass": checks.iter().all(Check::pass),
        "checks": items,
    })
}
