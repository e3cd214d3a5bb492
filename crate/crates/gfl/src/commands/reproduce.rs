//! Reproductions of the two worked examples, with their goldens.

use std::path::Path;

use serde_json::json;

use gfl_core::conditionals::finite_conditional;
use gfl_core::diagnostics::oscillating_family;
use gfl_core::models::{example1_conditional, example2_limiting_hamiltonian, MarkovChainPair};
use gfl_core::{
    box_filtration, check_marginal_consistency, example1_pair, example2_model, Configuration, ConvergenceReport,
    RandomField, Rational, Result, Scalar, Site, Symbol, Tau, Volume,
};

use super::Context;
use crate::parallel::{par_map, try_par_map};
use crate::report::{first_difference, num, to_json_text, Csv, Output};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    One,
    Two,
}

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Generates the example's files; with `goldens`, compares them instead.
pub fn reproduce(ctx: &Context, example: Example, taus: &[u32], goldens: Option<&Path>) -> Result<Output> {
    let mut out = match example {
        Example::One => example1(ctx)?,
        Example::Two => {
            let mut all = Output::default();
            for &tau in taus {
                let o = example2(ctx, tau)?;
                all.files.extend(o.files);
                all.summary.push_str(&o.summary);
                all.exit = all.exit.max(o.exit);
            }
            all
        }
    };
    if let Some(dir) = goldens {
        let mut mismatches = Vec::new();
        for (name, text) in &out.files {
            match std::fs::read_to_string(dir.join(name)) {
                Err(e) => mismatches.push(format!("{name}: no golden ({e})")),
                Ok(golden) => {
                    if let Some(d) = first_difference(&golden, text) {
                        mismatches.push(format!("{name}: {d}"));
                    }
                }
            }
        }
        if mismatches.is_empty() {
            out.summary.push_str(&format!("{} files match the goldens in {}\n", out.files.len(), dir.display()));
        } else {
            out.summary.push_str(&format!("golden mismatch:\n{}\n", mismatches.join("\n")));
            out.exit = 1;
        }
    }
    Ok(out)
}

const N: usize = 8;

fn spin(m: &MarkovChainPair, s: Symbol) -> i64 {
    RandomField::<Rational>::alphabet(m).value(s)
}

fn example1(ctx: &Context) -> Result<Output> {
    let c = vec![r(1, 2); N - 1];
    let kappa = r(1, 2);
    let (plus, minus) = example1_pair(N, &c, &kappa)?;
    let window = Volume::interval(1, N as i32);
    let alphabet = RandomField::<Rational>::alphabet(&plus).clone();

    // Marginal consistency of every sub-volume against the window.
    let masks: Vec<u64> = (1..(1u64 << N)).collect();
    let mut marginal = Vec::new();
    for m in [&plus, &minus] {
        let ok = try_par_map(&ctx.pool, &masks, |&mask| check_marginal_consistency::<Rational, _>(m, &window, &window.subset_by_mask(mask)))?;
        marginal.push(ok.iter().filter(|b| **b).count());
    }

    // One-point kernels given every condition containing both neighbours.
    let mut cases = Vec::new();
    for t in 2..N as i32 {
        let rest = window.without(&Site::from(t)).without(&Site::from(t - 1)).without(&Site::from(t + 1));
        for mask in 0..(1u64 << rest.len()) {
            cases.push((t, rest.subset_by_mask(mask).union(&Volume::new([Site::from(t - 1), Site::from(t + 1)]))));
        }
    }
    let results = try_par_map(&ctx.pool, &cases, |(t, lam)| -> Result<(usize, usize, usize)> {
        let target = Volume::single(Site::from(*t));
        let (cp, cn) = (&c[*t as usize - 2], &c[*t as usize - 1]);
        let (mut n, mut same, mut closed) = (0, 0, 0);
        for zi in 0..(1usize << lam.len()) {
            let z = Configuration::from_index(lam, 2, zi);
            let kp = finite_conditional::<Rational, _>(&plus, &target, &z)?;
            let km = finite_conditional::<Rational, _>(&minus, &target, &z)?;
            let yp = spin(&plus, z.get(&Site::from(t - 1)).expect("left neighbour in condition"));
            let yn = spin(&plus, z.get(&Site::from(t + 1)).expect("right neighbour in condition"));
            n += 1;
            same += (kp.probs() == km.probs()) as usize;
            let formula: Vec<Rational> = [Symbol(0), Symbol(1)].iter().map(|&x| example1_conditional(cp, cn, yp, spin(&plus, x), yn)).collect();
            closed += (kp.probs() == formula.as_slice()) as usize;
        }
        Ok((n, same, closed))
    })?;
    let (conditions, coincide, closed) = results.iter().fold((0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

    let unit_condition = Configuration::parse("(3)=+1;(5)=+1", &alphabet)?;
    let unit = finite_conditional::<Rational, _>(&plus, &Volume::single(Site::from(4)), &unit_condition)?;
    let unit_value = unit.probs()[1].clone();
    let last = Volume::single(Site::from(N as i32));
    let last_plus = RandomField::<Rational>::marginal(&plus, &last)?;
    let last_minus = RandomField::<Rational>::marginal(&minus, &last)?;

    let mut kernels = Csv::new(
        &[("model", "example1:N=8,c=1/2,kappa=1/2")],
        &["t", "y_prev", "y_next", "plus_p(+1)", "minus_p(+1)", "closed_form"],
    )?;
    for t in 2..N as i32 {
        for (yp, yn) in [(-1, -1), (-1, 1), (1, -1), (1, 1)] {
            let name = |v: i64| if v > 0 { "+1" } else { "-1" };
            let z = Configuration::parse(&format!("({})={};({})={}", t - 1, name(yp), t + 1, name(yn)), &alphabet)?;
            let target = Volume::single(Site::from(t));
            let kp = finite_conditional::<Rational, _>(&plus, &target, &z)?;
            let km = finite_conditional::<Rational, _>(&minus, &target, &z)?;
            let formula = example1_conditional(&c[t as usize - 2], &c[t as usize - 1], yp, 1, yn);
            kernels.row([t.to_string(), yp.to_string(), yn.to_string(), kp.probs()[1].render(), km.probs()[1].render(), formula.render()])?;
        }
    }

    let passed = marginal.iter().all(|&k| k == masks.len())
        && coincide == conditions
        && closed == conditions
        && unit_value == r(9, 10)
        && last_plus.probs() != last_minus.probs();
    let doc = json!({
        "command": "reproduce example1",
        "parameters": { "N": N, "c": "1/2", "kappa": "1/2" },
        "marginal_consistency": {
            "volumes_checked": masks.len(),
            "plus_consistent": marginal[0],
            "minus_consistent": marginal[1],
        },
        "kernels_given_both_neighbours": {
            "conditions_checked": conditions,
            "plus_equals_minus": coincide,
            "closed_form_matches": closed,
        },
        "unit_spin_case": {
            "site": "(4)",
            "condition": unit_condition.display(&alphabet),
            "p(+1)": num(&unit_value),
        },
        "last_site_marginals": {
            "plus": last_plus.probs().iter().map(num).collect::<Vec<_>>(),
            "minus": last_minus.probs().iter().map(num).collect::<Vec<_>>(),
        },
        "passed": passed,
    });
    let summary = format!(
        "example 1 (N=8, c=1/2, kappa=1/2)\n\
         marginal consistency: P+ {}/{} volumes, P- {}/{} volumes\n\
         kernels given both neighbours: {coincide}/{conditions} coincide, {closed}/{conditions} match the closed form\n\
         unit-spin case p(+1 | (3)=+1,(5)=+1) = {}\n\
         last-site marginals: P+ [{}], P- [{}]\n\
         {}\n",
        marginal[0],
        masks.len(),
        marginal[1],
        masks.len(),
        unit_value.render(),
        last_plus.probs().iter().map(|p| p.render()).collect::<Vec<_>>().join(", "),
        last_minus.probs().iter().map(|p| p.render()).collect::<Vec<_>>().join(", "),
        if passed { "reproduced" } else { "NOT reproduced" },
    );
    Ok(Output {
        files: vec![
            ("example1.json".into(), to_json_text(&doc)),
            ("example1_kernels.csv".into(), kernels.finish()?),
        ],
        summary,
        exit: if passed { 0 } else { 1 },
    })
}

/// Largest conditioning volume in the conditional table.
const MAX_LAMBDA: usize = 12;
const WITNESS_HALF_WIDTH: i32 = 242;
const WITNESS_RADII: [u32; 5] = [2, 8, 26, 80, 242];
const DENSITIES: [(i64, i64); 5] = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)];

fn example2(ctx: &Context, tau: u32) -> Result<Output> {
    let tau_text = tau.to_string();
    let comments = [("model", "example2"), ("tau", tau_text.as_str())];

    // P(x_1 = 1 | z on {2..n+1}) for every n <= 12 and every count k of ones.
    let small = example2_model(Tau::Integer(tau), Volume::interval(1, MAX_LAMBDA as i32 + 1))?;
    let target = Volume::single(Site::from(1));
    let cases: Vec<(usize, usize)> = (0..=MAX_LAMBDA).flat_map(|n| (0..=n).map(move |k| (n, k))).collect();
    let values = try_par_map(&ctx.pool, &cases, |&(n, k)| {
        let lam = Volume::interval(2, n as i32 + 1);
        let z = Configuration::from_fn(lam, |s| Symbol((s.coords()[0] - 2 < k as i32) as u8));
        finite_conditional::<Rational, _>(&small, &target, &z).map(|g| g.probs()[1].clone())
    })?;
    let mut conditionals = Csv::new(&comments, &["lambda_size", "ones", "p(1)", "formula", "match"])?;
    let mut matches = 0;
    for ((n, k), v) in cases.iter().zip(&values) {
        let formula = Rational::from_ratio((*k + tau as usize) as i64, (*n + tau as usize + 1) as i64);
        matches += (*v == formula) as usize;
        conditionals.row([n.to_string(), k.to_string(), v.render(), formula.render(), (*v == formula).to_string()])?;
    }

    // Oscillating-density witness search on a wide window.
    let window = Volume::interval(-WITNESS_HALF_WIDTH, WITNESS_HALF_WIDTH);
    let wide = example2_model(Tau::Integer(tau), window.clone())?;
    let t = Site::from(0);
    let f = box_filtration(&t, &WITNESS_RADII, &window)?;
    let family = oscillating_family(&window, &t, &f, RandomField::<Rational>::alphabet(&wide));
    let tol = r(1, 1_000_000_000_000);
    let estimates = try_par_map(&ctx.pool, family.members(), |b| gfl_core::diagnostics::generator_estimate(&wide, &t, &f, b, &tol))?;
    let report = ConvergenceReport::assemble(&t, &f, &family, estimates, &tol);
    let mut witness_csv = Csv::new(&comments, &["generator", "n", "volume_size", "p(1)", "gap"])?;
    for e in &report.per_generator {
        for (k, kernel) in e.values.iter().enumerate() {
            witness_csv.row([
                e.boundary_label.clone(),
                (k + 1).to_string(),
                e.stage_sizes[k].to_string(),
                kernel.probs()[1].render(),
                e.gap_to_previous(k).map(|g| g.render()).unwrap_or_default(),
            ])?;
        }
    }
    let witness_ok = report.witness.as_ref().is_some_and(|w| w.persistent_gap >= r(2, 5) && w.label.starts_with("oscillating"));

    // Limiting one-point Hamiltonian along density-p boundaries.
    let points: Vec<(i64, i64, u8)> = DENSITIES.iter().flat_map(|&(a, b)| [(a, b, 0u8), (a, b, 1u8)]).collect();
    let hvalues = par_map(&ctx.pool, &points, |&(a, b, x)| example2_limiting_hamiltonian(&r(a, b), x));
    let mut hcsv = Csv::new(&comments, &["p", "x", "h"])?;
    let mut hjson = Vec::new();
    for ((a, b, x), h) in points.iter().zip(hvalues) {
        let h = h?;
        let p = r(*a, *b).render();
        hcsv.row([p.clone(), x.to_string(), h.to_string()])?;
        hjson.push(json!({ "p": p, "x": x, "h": h.to_string() }));
    }

    let passed = matches == cases.len() && witness_ok;
    let doc = json!({
        "command": "reproduce example2",
        "tau": tau,
        "conditionals": {
            "window": RandomField::<Rational>::window(&small).to_string(),
            "checked": cases.len(),
            "match_formula": matches,
        },
        "witness": {
            "window": window.to_string(),
            "site": t.to_string(),
            "filtration": f.describe(),
            "verdict": report.verdict.as_str(),
            "generator": report.witness.as_ref().map(|w| w.label.clone()),
            "persistent_gap": report.witness.as_ref().map(|w| num(&w.persistent_gap)),
            "gaps": report.witness.as_ref().map(|w| w.gaps.iter().map(num).collect::<Vec<_>>()),
            "persistent_gap_at_least_2/5": witness_ok,
        },
        "limiting_hamiltonian": hjson,
        "passed": passed,
    });
    let summary = format!(
        "example 2 (tau={tau})\n\
         conditionals: {matches}/{} equal (k+tau)/(n+tau+1)\n\
         witness: {} (persistent gap {})\n\
         {}\n",
        cases.len(),
        report.witness.as_ref().map(|w| w.label.as_str()).unwrap_or("none found"),
        report.witness.as_ref().map(|w| format!("{} ~ {:.4}", w.persistent_gap.render(), w.persistent_gap.to_f64())).unwrap_or_else(|| "-".into()),
        if passed { "reproduced" } else { "NOT reproduced" },
    );
    let stem = format!("example2_tau{tau}");
    Ok(Output {
        files: vec![
            (format!("{stem}.json"), to_json_text(&doc)),
            (format!("{stem}_conditionals.csv"), conditionals.finish()?),
            (format!("{stem}_witness.csv"), witness_csv.finish()?),
            (format!("{stem}_hamiltonian.csv"), hcsv.finish()?),
        ],
        summary,
        exit: if passed { 0 } else { 1 },
    })
}

