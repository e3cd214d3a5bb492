//! `energy` dumps Δ and H tables of one conditional kernel; `reconstruct`
//! rebuilds a kernel from one-point kernels and compares it with the direct one.

use serde_json::json;

use gfl_core::conditionals::{finite_conditional, reconstruct_with_order};
use gfl_core::{
    hamiltonian_from_energy, transition_energy, Configuration, Error, RandomField, Rational, Result, Site,
    Volume,
};

use super::{volume_or, Context, Setup};
use crate::experiment::{parse_site, parse_tol};
use crate::formats::{render_energy, render_hamiltonian, render_table, ModeScalar};
use crate::model::{FieldIn, Mode, Model};
use crate::report::{header, num, to_json_text, Output};

pub fn energy(ctx: &Context) -> Result<Output> {
    let setup = Setup::from_config(&ctx.config)?;
    match setup.mode {
        Mode::Rational => energy_in::<Rational>(ctx, &setup.model, setup.mode),
        Mode::Float => energy_in::<f64>(ctx, &setup.model, setup.mode),
    }
}

pub fn reconstruct(ctx: &Context) -> Result<Output> {
    let setup = Setup::from_config(&ctx.config)?;
    match setup.mode {
        Mode::Rational => reconstruct_in::<Rational>(ctx, &setup.model, setup.mode),
        Mode::Float => reconstruct_in::<f64>(ctx, &setup.model, setup.mode),
    }
}

fn energy_in<S: FieldIn + ModeScalar>(ctx: &Context, model: &Model, mode: Mode) -> Result<Output> {
    let cfg = &ctx.config;
    let field = S::field(model)?;
    let alphabet = field.alphabet().clone();
    let site = parse_site(cfg.get("site"), field.window())?;
    let v = volume_or(cfg.get("volume"), Volume::single(site))?;
    let z = Configuration::parse(cfg.get("condition"), &alphabet)?;
    let kernel = finite_conditional(&field, &v, &z)?;
    let e = transition_energy(&kernel)?;
    let gauge = Configuration::constant(v.clone(), alphabet.first());
    let h = hamiltonian_from_energy(&e, &gauge)?;
    let gibbs_matches = h.gibbs_form()?.same_law(&kernel);

    let mut doc = header("energy", cfg, mode.as_str());
    doc.insert("model".into(), json!(model.describe()));
    doc.insert("volume".into(), json!(v.to_string()));
    doc.insert("condition".into(), json!(z.display(&alphabet)));
    doc.insert("kernel".into(), json!(kernel.probs().iter().map(num).collect::<Vec<_>>()));
    doc.insert("antisymmetric".into(), json!(e.check_antisymmetry()));
    doc.insert("cocycle".into(), json!(e.check_cocycle()));
    doc.insert("hamiltonian_finite".into(), json!(h.is_finite()));
    doc.insert("gibbs_form_reproduces_kernel".into(), json!(gibbs_matches));
    let ok = e.check_antisymmetry() && e.check_cocycle() && gibbs_matches;
    let summary = format!(
        "transition energy on {v} given {}: {} configurations, antisymmetry {}, cocycle {}, Gibbs form {}\n",
        if z.is_empty() { "nothing".to_string() } else { z.display(&alphabet) },
        e.len(),
        e.check_antisymmetry(),
        e.check_cocycle(),
        if gibbs_matches { "reproduces the kernel" } else { "DIFFERS from the kernel" }
    );
    Ok(Output {
        files: vec![
            ("energy.tbl".into(), render_energy(&e)),
            ("hamiltonian.tbl".into(), render_hamiltonian(&h, &gauge)),
            ("energy.json".into(), to_json_text(&serde_json::Value::Object(doc))),
        ],
        summary,
        exit: if ok { 0 } else { 1 },
    })
}

fn site_order(text: &str, target: &Volume) -> Result<Vec<Site>> {
    if text.trim().is_empty() {
        return Ok(target.sites().to_vec());
    }
    // Volume::parse sorts, so split by hand to keep the written order.
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| Site::parse(p.trim()))
        .collect()
}

fn reconstruct_in<S: FieldIn + ModeScalar>(ctx: &Context, model: &Model, mode: Mode) -> Result<Output> {
    let cfg = &ctx.config;
    let field = S::field(model)?;
    let alphabet = field.alphabet().clone();
    let z = Configuration::parse(cfg.get("condition"), &alphabet)?;
    let v = volume_or(cfg.get("volume"), field.window().difference(z.volume()))?;
    if v.is_empty() {
        return Err(Error::Argument("nothing to reconstruct: the condition covers the window".into()));
    }
    let order = site_order(cfg.get("order"), &v)?;
    let reference = match cfg.get("reference").trim() {
        "" => None,
        text => Some(Configuration::parse(text, &alphabet)?),
    };
    let tol: S = parse_tol(cfg.get("tol"))?;
    let one_point = |t: &Site, c: &Configuration| finite_conditional(&field, &Volume::single(t.clone()), c);
    let rebuilt = reconstruct_with_order(one_point, &v, &order, &z, reference.as_ref(), &alphabet)?;
    let direct = finite_conditional(&field, &v, &z)?;
    let distance = rebuilt.sup_distance(&direct);
    let equal = distance <= tol;

    let mut doc = header("reconstruct", cfg, mode.as_str());
    doc.insert("model".into(), json!(model.describe()));
    doc.insert("volume".into(), json!(v.to_string()));
    doc.insert("condition".into(), json!(z.display(&alphabet)));
    doc.insert("order".into(), json!(order.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
    doc.insert("reference".into(), json!(reference.as_ref().map(|r| r.display(&alphabet))));
    doc.insert("sup_distance".into(), num(&distance));
    doc.insert("equal".into(), json!(equal));
    let summary = format!(
        "reconstructed g on {v} from one-point kernels: sup distance to the direct kernel {} ({})\n",
        distance.render(),
        if equal { "equal" } else { "DIFFERENT" }
    );
    Ok(Output {
        files: vec![
            ("reconstructed.tbl".into(), render_table(rebuilt.dist())),
            ("reconstruct.json".into(), to_json_text(&serde_json::Value::Object(doc))),
        ],
        summary,
        exit: if equal { 0 } else { 1 },
    })
}
