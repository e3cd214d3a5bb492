use gfl_core::lattice::enumerate_configurations;
use gfl_core::specifications::{one_point_fixtures, spec_fixtures, PotentialTerm};
use gfl_core::{
    finite_volume_gibbs, onepoint_spec_from_tef, spec_from_onepoint, tef_from_1spec, tef_from_potential,
    validate_1spec, validate_spec, validate_tef, Alphabet, Configuration, OnePointSpec, OnePointTef, Potential,
    Site, Specification, Symbol, Volume,
};

const TOL: f64 = 1e-12;

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * a.abs().max(b.abs()).max(1.0)
}

fn spin(s: Symbol) -> f64 {
    if s.0 == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Ising weights on a volume, summed over nearest-neighbour pairs inside the
/// window, computed straight from the definition.
fn ising_energy(beta: f64, x: &Configuration, boundary: &Configuration, n: i32) -> f64 {
    let value = |i: i32| {
        let s = Site::from(i);
        x.get(&s).or_else(|| boundary.get(&s)).map(spin)
    };
    let mut h = 0.0;
    for i in 1..n {
        let touches = x.get(&Site::from(i)).is_some() || x.get(&Site::from(i + 1)).is_some();
        if touches {
            if let (Some(a), Some(b)) = (value(i), value(i + 1)) {
                h -= beta * a * b;
            }
        }
    }
    h
}

#[test]
fn ising_pipeline_passes_every_axiom_and_matches_gibbs_conditionals() {
    let window = Volume::interval(1, 11);
    let spins = Alphabet::spins();
    for beta in [0.1, 0.4, 1.0] {
        let tef = tef_from_potential(Potential::ising(beta, 0.0, 1), window.clone());
        let one = one_point_fixtures(&window, &spins, 4000, 5);
        let report = validate_tef(&tef, &one).unwrap();
        assert!(report.passed() && report.max_residual <= TOL, "{report:?}");
        let q1 = onepoint_spec_from_tef(&tef);
        assert!(validate_1spec(&q1, &one).unwrap().passed());
        let q = spec_from_onepoint(&q1);
        let fixtures = spec_fixtures(&window, &spins, 3, 1500, 9);
        assert!(validate_spec(&q, &fixtures).unwrap().passed());

        // Finite-volume Gibbs kernels against the extended spec and the oracle.
        for fx in fixtures.fixtures.iter().take(60) {
            let boundary = {
                let rest = window.difference(&fx.outer);
                Configuration::from_fn(rest, |s| Symbol((s.coords()[0] % 2) as u8))
            };
            let gibbs = finite_volume_gibbs(tef.potential(), &window, &fx.outer, &boundary).unwrap();
            let kernel = q.kernel(&fx.outer, &boundary).unwrap();
            let configs = enumerate_configurations(&fx.outer, &spins).unwrap();
            let z: f64 = configs.iter().map(|c| (-ising_energy(beta, c, &boundary, 11)).exp()).sum();
            for (i, c) in configs.iter().enumerate() {
                let want = (-ising_energy(beta, c, &boundary, 11)).exp() / z;
                assert!(rel_close(gibbs.probs()[i], want), "beta={beta} V={} x={i}", fx.outer);
                assert!(rel_close(kernel.probs()[i], want), "beta={beta} V={} x={i}", fx.outer);
            }
        }
        // One-point energy by hand: δ_t(+1, -1) = 2β(z_{t-1} + z_{t+1}).
        let t = Site::from(6);
        let b = Configuration::from_fn(window.without(&t), |s| Symbol((s.coords()[0] > 5) as u8));
        let e = tef.energy(&t, &b).unwrap();
        assert!(rel_close(e.log_value(1, 0), 2.0 * beta * (-1.0 + 1.0)));
        let round = tef_from_1spec(&q1).energy(&t, &b).unwrap();
        assert!(rel_close(round.log_value(1, 0), e.log_value(1, 0)));
    }
}

#[test]
fn a_non_symmetric_pair_potential_still_validates() {
    // Asymmetric nearest-neighbour couplings on three symbols.
    let alphabet = Alphabet::from_names(&["a", "b", "c"]).unwrap();
    let mut terms = Vec::new();
    for x in 0..3u8 {
        for y in 0..3u8 {
            terms.push(PotentialTerm {
                offsets: vec![Site::from(0), Site::from(1)],
                config: vec![Symbol(x), Symbol(y)],
                value: 0.3 * x as f64 - 0.7 * y as f64 + 0.11 * (x * y) as f64,
            });
        }
    }
    let phi = Potential::new(1, alphabet.clone(), terms).unwrap();
    let window = Volume::interval(1, 6);
    let tef = tef_from_potential(phi, window.clone());
    let fixtures = one_point_fixtures(&window, &alphabet, 5000, 1);
    assert!(validate_tef(&tef, &fixtures).unwrap().passed());
    assert!(validate_1spec(&onepoint_spec_from_tef(&tef), &fixtures).unwrap().passed());
    let spec = spec_from_onepoint(onepoint_spec_from_tef(&tef));
    assert_eq!(OnePointSpec::<f64>::alphabet(&onepoint_spec_from_tef(&tef)).size(), 3);
    assert!(validate_spec(&spec, &spec_fixtures(&window, &alphabet, 2, 100, 3)).unwrap().passed());
    assert_eq!(Specification::<f64>::window(&spec), &window);
}
