use gfl_core::conditionals::{Boundary, BoundaryFamily};
use gfl_core::diagnostics::{mixture_adversarial_family, shell_constant_family, standard_family};
use gfl_core::lattice::lopsided_filtration;
use gfl_core::models::Tau;
use gfl_core::{
    box_filtration, energy_criterion_report, example2_model, filtration_independence_check, non_gibbs_witness,
    quasilocality_report, uniform_convergence_report, Alphabet, IsingDemo, ProductField, QuasilocalVerdict,
    RandomField, Rational, Scalar, Site, Symbol, Verdict, Volume, WitnessStrategy,
};
use gfl_core::specifications::FieldOnePoint;

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

#[test]
fn ising_gaps_vanish_past_the_neighbourhood() {
    for beta in [0.1, 0.4, 1.0] {
        let m = IsingDemo::new(beta, 0.2, 1, 11).unwrap();
        let w = m.window().clone();
        let t = Site::from(6);
        let f = box_filtration(&t, &[1, 2, 3, 4, 5], &w).unwrap();
        let fam = standard_family(&w, &t, m.alphabet(), 6, 42);
        let rep = uniform_convergence_report(&m, &t, &f, &fam, &1e-12).unwrap();
        assert_eq!(rep.verdict, Verdict::UniformEvidence);
        assert_eq!(rep.stages.len(), 5);
        // Every stage already holds both neighbours, so the kernels agree to rounding.
        for s in &rep.stages[1..] {
            assert!(s.sup_gap.unwrap() <= 1e-15, "{:?}", s);
        }
        let filtrations = [
            f.clone(),
            lopsided_filtration(&t, &[1, 2, 3], 2, 1, &w).unwrap(),
            lopsided_filtration(&t, &[1, 2, 3], 1, 2, &w).unwrap(),
        ];
        let ind = filtration_independence_check(&m, &t, &filtrations, &fam, &1e-12).unwrap();
        assert!(ind.agree);
        assert_eq!(ind.filtrations.len(), 3);
        let q = quasilocality_report(&FieldOnePoint(&m), &t, &f, &fam, &1e-12).unwrap();
        assert!(q.stages.iter().all(|s| s.modulus.map_or(true, |v| v <= 1e-15)));
        let search = non_gibbs_witness(&m, &t, &f, &WitnessStrategy::ExhaustiveSmall { seed: 3 }, &1e-12).unwrap();
        assert!(search.witness.is_none());
        assert_eq!(search.generators_tried, 32);
        let search = non_gibbs_witness(&m, &t, &f, &WitnessStrategy::OscillatingDensity, &1e-12).unwrap();
        assert!(search.witness.is_none());
    }
}

#[test]
fn product_field_has_zero_gaps_from_the_first_stage() {
    let w = Volume::interval(-5, 5);
    let t = Site::from(0);
    let m = ProductField::new(w.clone(), Alphabet::binary(), vec![r(2, 7), r(5, 7)]).unwrap();
    let f = box_filtration(&t, &[1, 2, 3, 5], &w).unwrap();
    let fam = standard_family(&w, &t, m.alphabet(), 5, 0);
    let rep = uniform_convergence_report(&m, &t, &f, &fam, &r(0, 1)).unwrap();
    assert_eq!(rep.verdict, Verdict::UniformEvidence);
    assert!(rep.per_generator.iter().all(|e| e.values[0].probs() == [r(2, 7), r(5, 7)]));
    let e = energy_criterion_report(&m, &t, &f, &fam, 1e-12).unwrap();
    assert!(e.stages.iter().all(|s| s.modulus.map_or(true, |v| v == 0.0)));
}

#[test]
fn mixture_with_adversarial_family_is_a_divergence_witness() {
    let w = Volume::interval(-242, 242);
    let t = Site::from(0);
    let m = example2_model(Tau::Integer(1), w.clone()).unwrap();
    let f = box_filtration(&t, &[2, 8, 26, 80, 242], &w).unwrap();
    let fam = mixture_adversarial_family(&w, &t, &f).unwrap();
    let tol = r(1, 1_000_000);
    let rep = uniform_convergence_report::<Rational, _>(&m, &t, &f, &fam, &tol).unwrap();
    assert_eq!(rep.verdict, Verdict::DivergenceWitness);
    let witness = rep.witness.clone().unwrap();
    assert!(witness.label.starts_with("oscillating"));
    assert!(witness.persistent_gap >= r(2, 5));
    // The named generator reproduces its own trace.
    let again = uniform_convergence_report::<Rational, _>(&m, &t, &f, &fam, &tol).unwrap();
    assert_eq!(again, rep);

    let q = quasilocality_report::<Rational, _>(&FieldOnePoint(&m), &t, &f, &fam, &tol).unwrap();
    assert_eq!(q.verdict, QuasilocalVerdict::ViolationWitness);
    for s in &q.stages[..3] {
        assert!(s.modulus.clone().unwrap() >= r(2, 5), "{s:?}");
    }
    let e = energy_criterion_report::<Rational, _>(&m, &t, &f, &fam, 1e-9).unwrap();
    assert!(e.stages.iter().all(|s| s.modulus.unwrap() > 1.0));
}

#[test]
fn mixture_filtration_independence_depends_on_the_boundary() {
    let w = Volume::interval(-12, 12);
    let t = Site::from(0);
    let m = example2_model(Tau::Integer(1), w.clone()).unwrap();
    let f1 = box_filtration(&t, &[2, 4, 6, 8, 12], &w).unwrap();
    let f2 = lopsided_filtration(&t, &[1, 2, 3, 4, 6], 2, 1, &w).unwrap();
    let dom = w.without(&t);
    let even = BoundaryFamily::new("even sites", vec![Boundary::from_fn("even", dom.clone(), |s| {
        Symbol((s.coords()[0] % 2 == 0) as u8)
    })]);
    let ind = filtration_independence_check::<Rational, _>(&m, &t, &[f1.clone(), f2.clone()], &even, &r(0, 1)).unwrap();
    assert!(ind.agree);
    let left = BoundaryFamily::new("left half", vec![Boundary::from_fn("left", dom, |s| Symbol((s.coords()[0] < 0) as u8))]);
    let ind = filtration_independence_check::<Rational, _>(&m, &t, &[f1, f2], &left, &r(1, 100)).unwrap();
    assert!(!ind.agree);
    // 12 ones of 24 against 12 ones of 18: 13/26 versus 13/20.
    assert_eq!(ind.max_distance, r(13, 20) - r(1, 2));
}

#[test]
fn null_conditions_name_the_generator() {
    // A field that forbids two adjacent ones makes "all ones" impossible.
    let w = Volume::interval(0, 4);
    let t = Site::from(2);
    let probs: Vec<Rational> = (0..32usize)
        .map(|i| if i & (i >> 1) == 0 { r(1, 1) } else { r(0, 1) })
        .collect();
    let m = gfl_core::fields::TableField::new(
        gfl_core::FiniteDistribution::from_weights(w.clone(), Alphabet::binary(), probs).unwrap(),
    );
    let f = box_filtration(&t, &[1, 2], &w).unwrap();
    let fam = BoundaryFamily::new("ones", vec![Boundary::constant("all ones", w.without(&t), Symbol(1))]);
    let err = uniform_convergence_report(&m, &t, &f, &fam, &r(0, 1)).unwrap_err();
    match err {
        gfl_core::Error::NullCondition { stage, detail } => {
            assert_eq!(stage, Some(2));
            assert!(detail.contains("all ones"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn shell_constant_family_is_complete_for_few_stages() {
    let w = Volume::interval(-3, 3);
    let t = Site::from(0);
    let f = box_filtration(&t, &[1, 2, 3], &w).unwrap();
    let fam = shell_constant_family(&w, &t, &f, &Alphabet::binary(), 0);
    assert_eq!(fam.len(), 8);
    let ones = fam.members()[5].config().count(Symbol(1));
    // pattern 1,0,1: shells of sizes 2, 2, 2
    assert_eq!(ones, 4);
    assert!(RandomField::<f64>::window(&IsingDemo::new(0.1, 0.0, 1, 3).unwrap()).len() == 3);
}
