use serde_json::{json, Map, Value};

use gfl_core::conditionals::BoundaryFamily;
use gfl_core::diagnostics::{
    generator_estimate, oscillating_family, shell_constant_family, IndependenceReport, ModulusReport, WitnessStrategy,
};
use gfl_core::specifications::FieldOnePoint;
use gfl_core::{
    energy_criterion_report, filtration_independence_check, quasilocality_report, ConvergenceReport, Filtration,
    RandomField, Rational, Result, Scalar, Site, Verdict,
};

use super::{Context, Setup};
use crate::experiment::{build_family, parse_site, parse_tol, FamilyOptions, FiltrationSpec};
use crate::formats::ModeScalar;
use crate::model::{FieldBox, FieldIn, Mode, Model};
use crate::parallel::try_par_map;
use crate::report::{header, num, opt_num, to_json_text, Csv, Output};

pub fn diagnose(ctx: &Context) -> Result<Output> {
    let setup = Setup::from_config(&ctx.config)?;
    match setup.mode {
        Mode::Rational => diagnose_in::<Rational>(ctx, &setup.model, setup.mode),
        Mode::Float => diagnose_in::<f64>(ctx, &setup.model, setup.mode),
    }
}

fn convergence<S: Scalar>(
    ctx: &Context,
    field: &FieldBox<S>,
    t: &Site,
    f: &Filtration,
    family: &BoundaryFamily,
    tol: &S,
) -> Result<ConvergenceReport<S>> {
    let estimates = try_par_map(&ctx.pool, family.members(), |b| generator_estimate(field, t, f, b, tol))?;
    Ok(ConvergenceReport::assemble(t, f, family, estimates, tol))
}

fn modulus_json<V: Scalar>(r: &Result<ModulusReport<V>>) -> Value {
    match r {
        Err(e) => json!({ "error": e.to_string() }),
        Ok(r) => json!({
            "quantity": r.quantity,
            "verdict": r.verdict.as_str(),
            "stages": r.stages.iter().map(|s| json!({
                "n": s.n,
                "volume_size": s.volume_size,
                "pairs": s.pairs,
                "modulus": opt_num(s.modulus.as_ref()),
                "attained_by": s.attained_by.as_ref().map(|(a, b)| json!([a, b])),
            })).collect::<Vec<_>>(),
        }),
    }
}

fn independence_json<S: Scalar>(r: &Result<IndependenceReport<S>>) -> Value {
    match r {
        Err(e) => json!({ "error": e.to_string() }),
        Ok(r) => json!({
            "filtrations": r.filtrations,
            "agree": r.agree,
            "max_distance": num(&r.max_distance),
            "rows": r.rows.iter().map(|row| json!({
                "generator": row.label,
                "distances": row.distances.iter().map(num).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
    }
}

fn modulus_at<V: Scalar>(r: &Result<ModulusReport<V>>, n: usize) -> String {
    r.as_ref()
        .ok()
        .and_then(|r| r.stages.iter().find(|s| s.n == n))
        .and_then(|s| s.modulus.as_ref())
        .map(|m| m.render())
        .unwrap_or_default()
}

/// Generators whose pairs cover the moduli: the family itself plus the
/// shell-constant boundaries, which agree pairwise on inner shells. Large
/// shell families are left out since the moduli compare all pairs.
const MODULUS_SHELL_LIMIT: usize = 256;

fn modulus_family(family: &BoundaryFamily, shells: &BoundaryFamily) -> BoundaryFamily {
    if shells.len() > MODULUS_SHELL_LIMIT {
        return family.clone();
    }
    let mut members = family.members().to_vec();
    members.extend(shells.members().iter().cloned());
    BoundaryFamily::new(format!("{} + {}", family.description(), shells.description()), members)
}

fn diagnose_in<S: FieldIn + ModeScalar>(ctx: &Context, model: &Model, mode: Mode) -> Result<Output> {
    let cfg = &ctx.config;
    let field = S::field(model)?;
    let window = field.window().clone();
    let alphabet = field.alphabet().clone();
    let t = parse_site(cfg.get("site"), &window)?;
    let fspec = FiltrationSpec::parse(cfg.get("filtration"), &t, &window)?;
    let f = fspec.build(&t, &window)?;
    let seed = cfg.seed()?;
    let opts = FamilyOptions {
        random: cfg.parse_num("random")?,
        seed,
    };
    let family = build_family(cfg.get("family"), &window, &t, &f, &alphabet, &opts)?;
    let tol: S = parse_tol(cfg.get("tol"))?;

    let report = convergence(ctx, &field, &t, &f, &family, &tol)?;
    let variants = fspec.independence_variants(&t, &window)?;
    let filtrations: Vec<Filtration> = variants.iter().map(|(_, g)| g.clone()).collect();
    let independence = filtration_independence_check(&field, &t, &filtrations, &family, &tol);
    let shells = shell_constant_family(&window, &t, &f, &alphabet, seed);
    let probe = modulus_family(&family, &shells);
    let quasilocal = quasilocality_report(&FieldOnePoint(&field), &t, &f, &probe, &tol);
    let energy = energy_criterion_report(&field, &t, &f, &probe, tol.to_f64());

    let mut searches = Vec::new();
    for strategy in [WitnessStrategy::OscillatingDensity, WitnessStrategy::ExhaustiveSmall { seed }] {
        let fam = match strategy {
            WitnessStrategy::OscillatingDensity => oscillating_family(&window, &t, &f, &alphabet),
            _ => shells.clone(),
        };
        let found = convergence(ctx, &field, &t, &f, &fam, &tol);
        searches.push(match found {
            Err(e) => json!({ "strategy": strategy.name(), "error": e.to_string() }),
            Ok(r) => json!({
                "strategy": strategy.name(),
                "generators_tried": r.family_size,
                "witness": r.witness.as_ref().map(|w| json!({
                    "generator": w.label,
                    "persistent_gap": num(&w.persistent_gap),
                    "gaps": w.gaps.iter().map(num).collect::<Vec<_>>(),
                })),
            }),
        });
    }

    let mut doc: Map<String, Value> = header("diagnose", cfg, mode.as_str());
    doc.insert("model".into(), json!(model.describe()));
    doc.insert("window".into(), json!(window.to_string()));
    doc.insert("site".into(), json!(t.to_string()));
    doc.insert("filtration".into(), json!({ "spec": fspec.describe(), "stages": f.describe() }));
    doc.insert("family".into(), json!({ "description": family.description(), "size": family.len() }));
    doc.insert(
        "convergence".into(),
        json!({
            "verdict": report.verdict.as_str(),
            "gap_tol": num(&report.gap_tol),
            "stages": report.stages.iter().map(|s| json!({
                "n": s.n,
                "volume_size": s.volume_size,
                "sup_gap": opt_num(s.sup_gap.as_ref()),
            })).collect::<Vec<_>>(),
            "witness": report.witness.as_ref().map(|w| json!({
                "generator": w.label,
                "persistent_gap": num(&w.persistent_gap),
            })),
        }),
    );
    doc.insert(
        "generators".into(),
        Value::Array(
            report
                .per_generator
                .iter()
                .map(|e| {
                    json!({
                        "generator": e.boundary_label,
                        "stage_sizes": e.stage_sizes,
                        "kernels": e.values.iter().map(|k| k.probs().iter().map(num).collect::<Vec<_>>()).collect::<Vec<_>>(),
                        "gaps": e.gaps.iter().map(num).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        ),
    );
    doc.insert(
        "independence".into(),
        json!({
            "specs": variants.iter().map(|(s, _)| s.describe()).collect::<Vec<_>>(),
            "report": independence_json(&independence),
        }),
    );
    doc.insert("modulus_family".into(), json!({ "description": probe.description(), "size": probe.len() }));
    doc.insert("quasilocality".into(), modulus_json(&quasilocal));
    doc.insert("energy_criterion".into(), modulus_json(&energy));
    doc.insert("witness_searches".into(), Value::Array(searches.clone()));

    let extra = [("resolved_mode", mode.as_str())];
    let mut stages = Csv::with_config(
        cfg,
        &extra,
        &["n", "volume_size", "sup_gap", "kernel_modulus", "energy_modulus"],
    )?;
    for s in &report.stages {
        stages.row([
            s.n.to_string(),
            s.volume_size.to_string(),
            s.sup_gap.as_ref().map(|g| g.render()).unwrap_or_default(),
            modulus_at(&quasilocal, s.n),
            modulus_at(&energy, s.n),
        ])?;
    }
    let mut columns = vec!["generator".to_string(), "n".into(), "volume_size".into()];
    columns.extend(alphabet.names().iter().map(|a| format!("p({a})")));
    columns.push("gap".into());
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut gens = Csv::with_config(cfg, &extra, &columns)?;
    for e in &report.per_generator {
        for (k, kernel) in e.values.iter().enumerate() {
            let mut row = vec![e.boundary_label.clone(), (k + 1).to_string(), e.stage_sizes[k].to_string()];
            row.extend(kernel.probs().iter().map(|p| p.render()));
            row.push(e.gap_to_previous(k).map(|g| g.render()).unwrap_or_default());
            gens.row(row)?;
        }
    }

    let mut summary = format!(
        "{} at {t}, filtration {} ({} stages), {} generators\n",
        model.describe(),
        fspec.describe(),
        f.len(),
        family.len()
    );
    let gaps: Vec<String> = report
        .sup_gaps()
        .iter()
        .map(|g| g.as_ref().map(|g| g.render()).unwrap_or_else(|| "-".into()))
        .collect();
    summary.push_str(&format!("sup gaps: {}\n", gaps.join(", ")));
    summary.push_str(&format!("verdict: {}\n", report.verdict.as_str()));
    if let Some(w) = &report.witness {
        summary.push_str(&format!("witness: {} (persistent gap {})\n", w.label, w.persistent_gap.render()));
    }
    match &independence {
        Ok(r) => summary.push_str(&format!(
            "filtration independence over {} filtrations: {} (max distance {})\n",
            r.filtrations.len(),
            if r.agree { "agree" } else { "differ" },
            r.max_distance.render()
        )),
        Err(e) => summary.push_str(&format!("filtration independence: {e}\n")),
    }
    for (name, r) in [("quasilocality", quasilocal.as_ref().map(|r| r.verdict)), ("energy criterion", energy.as_ref().map(|r| r.verdict))] {
        match r {
            Ok(v) => summary.push_str(&format!("{name}: {}\n", v.as_str())),
            Err(e) => summary.push_str(&format!("{name}: {e}\n")),
        }
    }
    for s in &searches {
        let found = s["witness"]["generator"].as_str().map(|g| format!("witness {g}")).unwrap_or_else(|| {
            s["error"].as_str().map(|e| format!("error: {e}")).unwrap_or_else(|| "none found".into())
        });
        summary.push_str(&format!("witness search {}: {found}\n", s["strategy"].as_str().unwrap_or("")));
    }

    Ok(Output {
        files: vec![
            ("diagnose.json".into(), to_json_text(&Value::Object(doc))),
            ("diagnose_stages.csv".into(), stages.finish()?),
            ("diagnose_generators.csv".into(), gens.finish()?),
        ],
        summary,
        exit: match report.verdict {
            Verdict::UniformEvidence => 0,
            Verdict::DivergenceWitness => 2,
            Verdict::Inconclusive => 3,
        },
    })
}

