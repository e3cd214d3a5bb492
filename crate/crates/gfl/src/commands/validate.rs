use std::collections::HashSet;

use serde_json::{json, Value};

use gfl_core::lattice::configuration_count;
use gfl_core::specifications::{
    check_1spec_fixture, check_spec_fixture, check_tef_fixture, one_point_fixtures, spec_fixtures, tef_from_1spec,
    FieldOnePoint, FieldSpec, FixtureSet, OnePointFixture, Outcome, SpecFixture, Specification, ValidationReport,
    Violation,
};
use gfl_core::{
    finite_volume_gibbs, spec_from_onepoint, tef_from_potential, Error, RandomField, Rational, Result, Scalar, Volume,
};

use super::{Context, Setup};
use crate::experiment::parse_tol;
use crate::formats::ModeScalar;
use crate::model::{FieldBox, FieldIn, Mode, Model};
use crate::parallel::try_par_map;
use crate::report::{header, to_json_text, validation_json, Csv, Output};

pub const AXIOMS: &[&str] = &["table", "marginal", "1spec", "tef", "spec", "reconstruction", "gibbs"];

/// Full window marginals are only compared up to this many configurations.
const WINDOW_MARGINAL_LIMIT: usize = 1 << 16;

fn selected(text: &str) -> Result<Vec<&'static str>> {
    if text.trim() == "all" {
        return Ok(AXIOMS.to_vec());
    }
    text.split(',')
        .map(|a| {
            AXIOMS
                .iter()
                .find(|k| **k == a.trim())
                .copied()
                .ok_or_else(|| Error::Argument(format!("unknown axiom `{}` (known: {})", a.trim(), AXIOMS.join(", "))))
        })
        .collect()
}

pub fn validate(ctx: &Context) -> Result<Output> {
    let setup = Setup::from_config(&ctx.config)?;
    match setup.mode {
        Mode::Rational => validate_in::<Rational>(ctx, &setup.model, setup.mode),
        Mode::Float => validate_in::<f64>(ctx, &setup.model, setup.mode),
    }
}

struct Run<'a> {
    reports: Vec<(ValidationReport, Option<u64>)>,
    notes: Vec<String>,
    ctx: &'a Context,
}

fn outcome(fixture: String, residual: f64, ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    Outcome {
        residual,
        violation: (!ok).then(|| Violation {
            fixture,
            detail: detail(),
            residual,
        }),
    }
}

fn validate_in<S: FieldIn + ModeScalar>(ctx: &Context, model: &Model, mode: Mode) -> Result<Output> {
    let cfg = &ctx.config;
    let axioms = selected(cfg.get("axioms"))?;
    let seed = cfg.seed()?;
    let samples = cfg.samples()?;
    let max_volume: usize = cfg.parse_num("max_volume")?;
    let mut run = Run {
        reports: Vec::new(),
        notes: Vec::new(),
        ctx,
    };
    let malformed = match model {
        Model::Table { raw, .. } if axioms.contains(&"table") => {
            let r = raw.check::<S>();
            let bad = !r.passed();
            run.reports.push((r, None));
            bad
        }
        Model::Table { .. } => false,
        _ => {
            if axioms.contains(&"table") {
                run.notes.push("table: skipped, the model is not a table file".into());
            }
            false
        }
    };
    if malformed {
        run.notes.push("the table is malformed; the remaining axioms were not checked".into());
        return finish(run, model, mode);
    }

    let field = S::field(model)?;
    let window = field.window().clone();
    let alphabet = field.alphabet().clone();
    let one = one_point_fixtures(&window, &alphabet, samples, seed);
    let spec = spec_fixtures(&window, &alphabet, max_volume, samples, seed);
    let fixture_seed = |exhaustive: bool| (!exhaustive).then_some(seed);
    let pool = &ctx.pool;
    for axiom in axioms {
        match axiom {
            "table" => {}
            "marginal" => {
                let r = marginal_report(&run, &field, &spec)?;
                run.reports.push((r, fixture_seed(spec.exhaustive)));
            }
            "1spec" => {
                let q = FieldOnePoint(&field);
                let outcomes = try_par_map(pool, &one.fixtures, |fx| check_1spec_fixture(&q, fx))?;
                run.reports.push((ValidationReport::from_outcomes("1spec", &one, outcomes), fixture_seed(one.exhaustive)));
            }
            "tef" => {
                let d = tef_from_1spec(FieldOnePoint(&field));
                let outcomes = try_par_map(pool, &one.fixtures, |fx| check_tef_fixture(&d, fx))?;
                run.reports.push((ValidationReport::from_outcomes("tef", &one, outcomes), fixture_seed(one.exhaustive)));
            }
            "spec" => {
                let q = FieldSpec(&field);
                let outcomes = try_par_map(pool, &spec.fixtures, |fx| check_spec_fixture(&q, fx))?;
                run.reports.push((ValidationReport::from_outcomes("spec", &spec, outcomes), fixture_seed(spec.exhaustive)));
            }
            "reconstruction" => {
                let tol: S = parse_tol(cfg.get("tol"))?;
                let r = reconstruction_report(&run, &field, &spec, &tol)?;
                run.reports.push((r, fixture_seed(spec.exhaustive)));
            }
            "gibbs" => match model {
                Model::Potential { phi, window, .. } => {
                    let tol: f64 = parse_tol(cfg.get("tol"))?;
                    let d = tef_from_potential(phi.clone(), window.clone()).with_tolerance(tol);
                    let outcomes = try_par_map(pool, &one.fixtures, |fx| check_tef_fixture(&d, fx))?;
                    let r = ValidationReport::from_outcomes("potential-tef", &one, outcomes);
                    run.reports.push((r, fixture_seed(one.exhaustive)));
                    let r = gibbs_report(&run, model, &one, &spec, tol)?;
                    run.reports.push((r, fixture_seed(spec.exhaustive)));
                }
                _ => run.notes.push("gibbs: skipped, the model has no potential".into()),
            },
            _ => unreachable!("axiom names are checked by `selected`"),
        }
    }
    finish(run, model, mode)
}

/// `P_S` marginalized to `V` against `P_V` for every `V ⊂ S` pair of the
/// specification fixtures, plus `S ⊂ window` when the window is small.
fn marginal_report<S: Scalar>(run: &Run, field: &FieldBox<S>, spec: &FixtureSet<SpecFixture>) -> Result<ValidationReport> {
    let window = field.window().clone();
    let mut seen = HashSet::new();
    let mut pairs: Vec<(Volume, Volume)> = Vec::new();
    let small = configuration_count(&window, field.alphabet()).is_ok_and(|n| n <= WINDOW_MARGINAL_LIMIT);
    for fx in &spec.fixtures {
        let mut candidates = vec![(fx.outer.clone(), fx.inner.clone())];
        if small {
            candidates.push((window.clone(), fx.outer.clone()));
        }
        for pair in candidates {
            if seen.insert(pair.clone()) {
                pairs.push(pair);
            }
        }
    }
    let outcomes = try_par_map(&run.ctx.pool, &pairs, |(outer, inner)| {
        let via = field.marginal(outer)?.marginalize(inner)?;
        let direct = field.marginal(inner)?;
        let residual = via.sup_distance(&direct).to_f64();
        Ok(outcome(format!("{inner} in {outer}"), residual, via.approx_eq(&direct), || {
            format!("marginal of P on {outer} differs from P on {inner}")
        }))
    })?;
    let mut r = ValidationReport::new("marginal");
    // Every pair the fixtures use is checked.
    r.population = pairs.len() as u128;
    outcomes.into_iter().for_each(|o| r.record(o));
    Ok(r)
}

/// Kernels rebuilt from one-point kernels against the field's own kernels.
fn reconstruction_report<S: Scalar>(
    run: &Run,
    field: &FieldBox<S>,
    spec: &FixtureSet<SpecFixture>,
    tol: &S,
) -> Result<ValidationReport> {
    let rebuilt = spec_from_onepoint(FieldOnePoint(field));
    let direct = FieldSpec(field);
    let alphabet = field.alphabet();
    let outcomes = try_par_map(&run.ctx.pool, &spec.fixtures, |fx| {
        let a = rebuilt.kernel(&fx.outer, &fx.z)?;
        let b = direct.kernel(&fx.outer, &fx.z)?;
        let d = a.sup_distance(&b);
        Ok(outcome(format!("V={} z={}", fx.outer, fx.z.display(alphabet)), d.to_f64(), d <= *tol, || {
            format!("reconstructed kernel differs by {}", d.render())
        }))
    })?;
    Ok(ValidationReport::from_outcomes("reconstruction", spec, outcomes))
}

fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// The field's kernels against finite-volume Gibbs kernels of its potential:
/// one-point kernels on the one-point fixtures, volume kernels on the
/// specification fixtures.
fn gibbs_report(
    run: &Run,
    model: &Model,
    one: &FixtureSet<OnePointFixture>,
    spec: &FixtureSet<SpecFixture>,
    tol: f64,
) -> Result<ValidationReport> {
    let Model::Potential { phi, window, .. } = model else {
        return Err(Error::Argument("gibbs check needs a potential model".into()));
    };
    let field = model.float_field()?;
    let direct = FieldSpec(&field);
    let alphabet = phi.alphabet();
    let check = |v: &Volume, z: &gfl_core::Configuration| -> Result<Outcome> {
        let k = direct.kernel(v, z)?;
        let g = finite_volume_gibbs(phi, window, v, z)?;
        let gap = relative_gap(k.probs(), g.probs());
        Ok(outcome(format!("V={v} z={}", z.display(alphabet)), gap, gap <= tol, || {
            format!("kernel differs from the Gibbs kernel by relative {gap:e}")
        }))
    };
    let from_one = try_par_map(&run.ctx.pool, &one.fixtures, |fx| {
        let z = fx.z.concat(&gfl_core::Configuration::constant(Volume::single(fx.s.clone()), alphabet.first()))?;
        check(&Volume::single(fx.t.clone()), &z)
    })?;
    let from_spec = try_par_map(&run.ctx.pool, &spec.fixtures, |fx| check(&fx.outer, &fx.z))?;
    let mut r = ValidationReport::from_outcomes("gibbs", one, from_one);
    r.merge(ValidationReport::from_outcomes("gibbs", spec, from_spec));
    Ok(r)
}

fn finish(run: Run, model: &Model, mode: Mode) -> Result<Output> {
    let cfg = &run.ctx.config;
    let passed = run.reports.iter().all(|(r, _)| r.passed());
    let mut doc = header("validate", cfg, mode.as_str());
    doc.insert("model".into(), json!(model.describe()));
    doc.insert("window".into(), json!(model.window().to_string()));
    doc.insert("alphabet".into(), json!(model.alphabet().names()));
    doc.insert(
        "axioms".into(),
        Value::Array(run.reports.iter().map(|(r, seed)| validation_json(r, *seed)).collect()),
    );
    doc.insert("notes".into(), json!(run.notes));
    doc.insert("passed".into(), json!(passed));

    let mut csv = Csv::with_config(
        cfg,
        &[("resolved_mode", mode.as_str())],
        &["axiom", "passed", "fixtures_checked", "population", "exhaustive", "violation_count", "max_residual"],
    )?;
    let mut summary = String::new();
    for (r, _) in &run.reports {
        csv.row([
            r.axiom.clone(),
            r.passed().to_string(),
            r.fixtures_checked.to_string(),
            r.population.to_string(),
            r.exhaustive.to_string(),
            r.violation_count.to_string(),
            gfl_core::scalar::render_f64(r.max_residual),
        ])?;
        let how = if r.exhaustive { "exhaustive".to_string() } else { format!("sampled from {}", r.population) };
        summary.push_str(&format!(
            "{:<15} {}  {} fixtures ({how}), {} violations, max residual {}\n",
            r.axiom,
            if r.passed() { "pass" } else { "FAIL" },
            r.fixtures_checked,
            r.violation_count,
            gfl_core::scalar::render_f64(r.max_residual)
        ));
        if let Some(v) = r.violations.first() {
            summary.push_str(&format!("                first violation: {} ({})\n", v.fixture, v.detail));
        }
    }
    for n in &run.notes {
        summary.push_str(&format!("note: {n}\n"));
    }
    summary.push_str(if passed { "all checked axioms hold\n" } else { "violations found\n" });
    Ok(Output {
        files: vec![
            ("validate.json".into(), to_json_text(&Value::Object(doc))),
            ("validate.csv".into(), csv.finish()?),
        ],
        summary,
        exit: if passed { 0 } else { 1 },
    })
}
