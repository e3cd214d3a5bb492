use gfl_core::lattice::enumerate_configurations;
use gfl_core::{finite_conditional, table_field, Alphabet, Configuration, Rational, Scalar, Volume};
use num_bigint::BigInt;
use proptest::prelude::*;

fn field(n: usize, weights: &[u32]) -> gfl_core::TableField<Rational> {
    let total: u64 = weights.iter().map(|&w| w as u64).sum();
    let probs = weights
        .iter()
        .map(|&w| Rational::new(BigInt::from(w), BigInt::from(total)))
        .collect();
    table_field(Volume::interval(0, n as i32 - 1), Alphabet::binary(), probs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conditionals_are_normalized_and_chain(
        weights in prop::collection::vec(1u32..50, 16),
        vmask in 1usize..16,
        zmask in 0usize..16,
        zbits in 0usize..16,
    ) {
        let m = field(4, &weights);
        let zmask = zmask & !vmask;
        let pick = |mask: usize| Volume::new((0..4).filter(|k| mask >> k & 1 == 1).map(|k| gfl_core::Site::from(k as i32)));
        let v = pick(vmask);
        let lam = pick(zmask);
        let z = Configuration::from_index(&lam, 2, zbits % (1 << lam.len()));
        let k = finite_conditional(&m, &v, &z).unwrap();
        prop_assert_eq!(Rational::sum(k.probs()), Rational::one());
        // Chain rule against the joint marginal on V ∪ Λ.
        let joint = gfl_core::RandomField::<Rational>::marginal(&m, &v.union(&lam)).unwrap();
        let denom = gfl_core::RandomField::<Rational>::prob(&m, &z).unwrap();
        for x in enumerate_configurations(&v, &Alphabet::binary()).unwrap() {
            let xz = x.concat(&z).unwrap();
            prop_assert_eq!(k.prob(&x).unwrap().mul_ref(&denom), joint.prob(&xz).unwrap().clone());
        }
    }

    #[test]
    fn configuration_index_round_trips(n in 1i32..7, q in 2usize..4, seed in any::<u64>()) {
        let v = Volume::interval(0, n - 1);
        let total = q.pow(n as u32);
        let i = (seed % total as u64) as usize;
        let c = Configuration::from_index(&v, q, i);
        prop_assert_eq!(c.index(q), i);
        let names: Vec<String> = (0..q).map(|s| format!("s{s}")).collect();
        let a = Alphabet::from_names(&names).unwrap();
        prop_assert_eq!(Configuration::parse(&c.display(&a), &a).unwrap(), c);
    }
}
