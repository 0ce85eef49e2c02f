use std::f64::consts::PI;

use partial_copula::special::norm_cdf;
use partial_copula::{
    conditional_copula, cpit, expected_conditional_measure, gauss_rule, kendall_tau, run_scenario,
    sample_trivariate, separation_statement, summarize, summarize_differences, Bivariate,
    BivariateCopula, ConditionalFamily, FamilySpec, Measure, Mode, PartialCopula, QuadratureRule,
    Replicate, Scenario, ScenarioReport, TrivariateCopula,
};
use serde_json::{json, Value};

use crate::args::{
    EstimateArgs, Format, GridArgs, MeasureArgs, ModelArgs, PartialArgs, SampleArgs, ScenarioArg,
};
use crate::error::CliError;
use crate::output::{csv_rounded, emit, render, Cell, Table};

struct Model {
    spec: FamilySpec,
    cop: TrivariateCopula,
    cond: ConditionalFamily,
    rule: QuadratureRule,
}

fn model(args: &ModelArgs) -> Result<Model, CliError> {
    if !args.family.is_trivariate() {
        return Err(CliError::Usage(format!(
            "{} is bivariate; a trivariate family is required (fgm3, frank3, gauss3, clayton3, polyce)",
            args.family
        )));
    }
    let spec = FamilySpec::new(args.family, args.theta.clone())?;
    let cop = TrivariateCopula::new(spec.clone())?;
    let cond = conditional_copula(&cop)?;
    Ok(Model {
        spec,
        cop,
        cond,
        rule: gauss_rule(args.order as usize),
    })
}

fn partial_of(m: &Model, force_quadrature: bool) -> Result<PartialCopula, CliError> {
    let mode = if force_quadrature {
        Mode::Quadrature(m.rule.clone())
    } else {
        Mode::ClosedForm
    };
    match PartialCopula::of(&m.cop, mode) {
        Ok(pc) => Ok(pc),
        Err(_) if !force_quadrature => Ok(PartialCopula::quadrature(m.cond.clone(), m.rule.clone())),
        Err(e) => Err(e.into()),
    }
}

fn header_json(m: &Model, command: &str) -> serde_json::Map<String, Value> {
    let mut map = serde_json::Map::new();
    map.insert("command".into(), command.into());
    map.insert("family".into(), m.spec.family().name().into());
    map.insert("params".into(), json!(m.spec.params()));
    map
}

pub fn measure(args: &MeasureArgs) -> Result<(), CliError> {
    let m = model(&args.model)?;
    let pc = partial_of(&m, false)?;
    let summary = summarize(&pc, &m.rule)?;
    struct Row {
        measure: Measure,
        partial: f64,
        method: String,
        expected: f64,
    }
    let mut rows = Vec::new();
    for measure in Measure::ALL {
        let entry = summary.get(measure);
        rows.push(Row {
            measure,
            partial: entry.value,
            method: format!("{:?}", entry.method).to_lowercase(),
            expected: expected_conditional_measure(&m.cond, measure, &m.rule)?,
        });
    }
    println!("{} partial copula: {}", m.spec, pc.label());
    println!("{:<11} {:>13} {:>21} {:>12}", "measure", "partial", "expected-conditional", "gap");
    for r in &rows {
        println!(
            "{:<11} {:>13.9} {:>21.9} {:>12.3e}",
            r.measure.name(),
            r.partial,
            r.expected,
            (r.partial - r.expected).abs()
        );
    }
    if args.output.out.is_some() {
        let content = render(
            args.output.format,
            || {
                let mut t = Table::new(["measure", "partial", "method", "expected_conditional", "gap"]);
                for r in &rows {
                    t.push(vec![
                        r.measure.name().into(),
                        r.partial.into(),
                        Cell::Text(r.method.clone()),
                        r.expected.into(),
                        (r.partial - r.expected).abs().into(),
                    ]);
                }
                t
            },
            || {
                let mut doc = header_json(&m, "measure");
                doc.insert("order".into(), m.rule.order().into());
                let items: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "measure": r.measure.name(),
                            "partial": r.partial,
                            "method": r.method,
                            "expected_conditional": r.expected,
                            "gap": (r.partial - r.expected).abs(),
                        })
                    })
                    .collect();
                doc.insert("measures".into(), items.into());
                Value::Object(doc)
            },
        );
        emit(&args.output, &content)?;
    }
    Ok(())
}

pub fn partial(args: &PartialArgs) -> Result<(), CliError> {
    let m = model(&args.model)?;
    let pc = partial_of(&m, args.quadrature)?;
    let res = args.resolution as usize;
    let axis: Vec<f64> = (0..res).map(|i| i as f64 / (res - 1) as f64).collect();
    let mut cells = Vec::with_capacity(res * res);
    for &u1 in &axis {
        for &u2 in &axis {
            let interior = u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0;
            let pdf = if interior && pc.has_density() {
                Some(pc.pdf(u1, u2)?)
            } else {
                None
            };
            cells.push((u1, u2, pc.cdf(u1, u2), pdf));
        }
    }
    let content = render(
        args.output.format,
        || {
            let mut t = Table::new(["u1", "u2", "cdf", "pdf"]);
            for &(u1, u2, cdf, pdf) in &cells {
                t.push(vec![u1.into(), u2.into(), cdf.into(), pdf.map_or(Cell::Empty, Cell::Num)]);
            }
            t
        },
        || {
            let mut doc = header_json(&m, "partial");
            doc.insert("copula".into(), pc.label().into());
            doc.insert("axis".into(), json!(axis));
            let cdf: Vec<Vec<f64>> = cells.chunks(res).map(|r| r.iter().map(|c| c.2).collect()).collect();
            let pdf: Vec<Vec<Option<f64>>> =
                cells.chunks(res).map(|r| r.iter().map(|c| c.3).collect()).collect();
            doc.insert("cdf".into(), json!(cdf));
            doc.insert("pdf".into(), json!(pdf));
            Value::Object(doc)
        },
    );
    emit(&args.output, &content)
}

/// `c(Φ(x₁), Φ(x₂))·φ(x₁)·φ(x₂)` on the square `[−range, range]²`.
fn normal_scale_grid<F>(axis: &[f64], density: F) -> Result<Vec<Vec<f64>>, CliError>
where
    F: Fn(f64, f64) -> partial_copula::Result<f64>,
{
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    axis.iter()
        .map(|&x1| {
            axis.iter()
                .map(|&x2| Ok(density(norm_cdf(x1), norm_cdf(x2))? * phi(x1) * phi(x2)))
                .collect()
        })
        .collect()
}

pub fn grid(args: &GridArgs) -> Result<(), CliError> {
    let m = model(&args.model)?;
    if !(args.range > 0.0 && args.range.is_finite()) {
        return Err(CliError::Usage(format!("--range must be positive, got {}", args.range)));
    }
    if let Some(z) = args.z.iter().find(|z| !(**z >= 0.0 && **z <= 1.0)) {
        return Err(CliError::Usage(format!("--z must lie in [0, 1], got {z}")));
    }
    if !m.cond.has_density() {
        return Err(CliError::Usage(format!("{} has no conditional density", m.spec)));
    }
    let res = args.resolution as usize;
    let axis: Vec<f64> = (0..res)
        .map(|i| -args.range + 2.0 * args.range * i as f64 / (res - 1) as f64)
        .collect();
    let mut slices = Vec::new();
    for &z in &args.z {
        let cop = m.cond.at(z);
        slices.push((z, normal_scale_grid(&axis, |u, v| cop.pdf(u, v))?));
    }
    let pc = partial_of(&m, false)?;
    let partial_grid = normal_scale_grid(&axis, |u, v| pc.pdf(u, v))?;
    let z_curve: Vec<f64> = (0..res).map(|i| i as f64 / (res - 1) as f64).collect();
    let tau_curve: Vec<f64> = z_curve
        .iter()
        .map(|&z| {
            let cop: Bivariate = m.cond.at(z);
            cop.kendall_closed_form().map_or_else(|| kendall_tau(&cop, &m.rule), Ok)
        })
        .collect::<partial_copula::Result<_>>()?;

    let content = render(
        args.output.format,
        || {
            let mut t = Table::new(["section", "z", "x1", "x2", "value"]);
            let mut push_grid = |section: &str, z: Option<f64>, g: &[Vec<f64>]| {
                for (i, row) in g.iter().enumerate() {
                    for (j, &d) in row.iter().enumerate() {
                        t.push(vec![
                            section.into(),
                            z.map_or(Cell::Empty, Cell::Num),
                            axis[i].into(),
                            axis[j].into(),
                            d.into(),
                        ]);
                    }
                }
            };
            for (z, g) in &slices {
                push_grid("conditional", Some(*z), g);
            }
            push_grid("partial", None, &partial_grid);
            for (&z, &tau) in z_curve.iter().zip(&tau_curve) {
                t.push(vec!["kendall".into(), z.into(), Cell::Empty, Cell::Empty, tau.into()]);
            }
            t
        },
        || {
            let mut doc = header_json(&m, "grid");
            doc.insert("resolution".into(), res.into());
            doc.insert("range".into(), args.range.into());
            doc.insert("x".into(), json!(axis));
            let cond: Vec<Value> = slices
                .iter()
                .map(|(z, g)| json!({ "z": z, "density": g }))
                .collect();
            doc.insert("conditional".into(), cond.into());
            doc.insert("partial".into(), json!({ "copula": pc.label(), "density": partial_grid }));
            doc.insert("kendall".into(), json!({ "z": z_curve, "tau": tau_curve }));
            Value::Object(doc)
        },
    );
    emit(&args.output, &content)
}

pub fn sample(args: &SampleArgs) -> Result<(), CliError> {
    let m = model(&args.model)?;
    let n = args.n as usize;
    let mut samples = sample_trivariate(&m.spec, n, args.seed)?;
    samples.merge(&cpit(&samples, &m.spec)?)?;
    let names = ["u1", "u2", "u3", "v1", "v3"];
    let cols: Vec<&[f64]> = names
        .iter()
        .map(|c| samples.require(c))
        .collect::<partial_copula::Result<_>>()?;
    let content = render(
        args.output.format,
        || {
            let mut t = Table::new(names);
            for i in 0..n {
                t.push(cols.iter().map(|c| Cell::Num(c[i])).collect());
            }
            t
        },
        || {
            let mut doc = header_json(&m, "sample");
            doc.insert("n".into(), n.into());
            doc.insert("seed".into(), args.seed.into());
            doc.insert("generator".into(), samples.generator().into());
            let mut columns = serde_json::Map::new();
            for (name, c) in names.iter().zip(&cols) {
                columns.insert((*name).into(), json!(c));
            }
            doc.insert("columns".into(), columns.into());
            Value::Object(doc)
        },
    );
    emit(&args.output, &content)
}

const ESTIMATE_HEADER: [&str; 12] = [
    "scenario",
    "replication",
    "theta1_stepwise",
    "theta2_stepwise",
    "theta3_stepwise",
    "theta1_joint",
    "theta2_joint",
    "theta3_joint",
    "loglik_stepwise",
    "loglik_joint",
    "converged",
    "seed",
];

/// The replicate exactly as it reads back from the chosen output format.
fn as_written(rep: &Replicate, format: Format) -> Replicate {
    let round = |v: f64| match format {
        Format::Csv => csv_rounded(v),
        Format::Json => v,
    };
    Replicate {
        index: rep.index,
        stepwise: rep.stepwise.map(round),
        joint: rep.joint.map(round),
        loglik_stepwise: round(rep.loglik_stepwise),
        loglik_joint: round(rep.loglik_joint),
        converged: rep.converged,
    }
}

pub fn summary_lines(report: &ScenarioReport) -> Vec<String> {
    let mut lines = vec![format!(
        "{}: n = {}, replications = {}, seed = {}",
        report.scenario.name(),
        report.n,
        report.replications,
        report.seed
    )];
    for c in &report.coordinates {
        let se = c.standard_error.map_or("unavailable".to_string(), |s| format!("{s:.6e}"));
        lines.push(format!(
            "  {}: mean(joint − stepwise) = {:.6e}, se = {se}{}",
            c.name,
            c.mean_difference,
            if c.flagged { ", flagged" } else { "" }
        ));
    }
    lines.push(format!("  {}", report.statement));
    lines
}

pub fn estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let scenarios: Vec<Scenario> = match args.scenario {
        ScenarioArg::Simplified => vec![Scenario::Simplified],
        ScenarioArg::Nonsimplified => vec![Scenario::NonSimplified],
        ScenarioArg::Symmetric => vec![Scenario::SymmetricFgm],
        ScenarioArg::Both => vec![Scenario::Simplified, Scenario::NonSimplified],
    };
    let format = args.output.format;
    let mut reports = Vec::new();
    for scenario in scenarios {
        let mut report = run_scenario(scenario, args.n as usize, args.reps as usize, args.seed)?;
        report.replicates = report.replicates.iter().map(|r| as_written(r, format)).collect();
        report.coordinates = summarize_differences(&report.replicates);
        report.statement = separation_statement(&report.coordinates);
        reports.push(report);
    }

    let content = render(
        format,
        || {
            let mut t = Table::new(ESTIMATE_HEADER);
            for report in &reports {
                for r in &report.replicates {
                    let mut row: Vec<Cell> = vec![report.scenario.name().into(), Cell::Int(r.index as u64)];
                    row.extend(r.stepwise.iter().chain(&r.joint).map(|&v| Cell::Num(v)));
                    row.push(r.loglik_stepwise.into());
                    row.push(r.loglik_joint.into());
                    row.push(Cell::Text(r.converged.to_string()));
                    row.push(Cell::Int(report.seed));
                    t.push(row);
                }
            }
            t
        },
        || {
            json!({
                "command": "estimate",
                "generator": reports.first().map(|r| r.generator.clone()),
                "scenarios": reports,
            })
        },
    );
    emit(&args.output, &content)?;

    let lines: Vec<String> = reports.iter().flat_map(summary_lines).collect();
    for line in &lines {
        if args.output.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    let unconverged: usize = reports
        .iter()
        .map(|r| r.replicates.iter().filter(|x| !x.converged).count())
        .sum();
    if unconverged > 0 {
        return Err(CliError::Failure(format!(
            "{unconverged} replication(s) stopped at the iteration limit"
        )));
    }
    Ok(())
}
