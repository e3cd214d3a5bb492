mod common;

use common::{conditions_within, pairs_of, random_raw, volume_of};
use gfl_core::lattice::enumerate_configurations;
use gfl_core::{
    finite_conditional, reconstruct_from_one_point, reconstruct_with_order, Alphabet, Configuration, Error,
    Site, Volume,
};

#[test]
fn one_point_kernels_determine_every_finite_conditional() {
    for seed in 0..10u64 {
        let n = 3 + (seed % 3) as usize;
        let raw = random_raw(n, 2000 + seed);
        let m = raw.field();
        let one_point = |t: &Site, c: &Configuration| finite_conditional(&m, &Volume::single(t.clone()), c);
        let full = (1usize << n) - 1;
        for vmask in 1..=full {
            let v = volume_of(vmask, n);
            let refs = enumerate_configurations(&v, &Alphabet::binary()).unwrap();
            let mut reversed = v.sites().to_vec();
            reversed.reverse();
            for z in conditions_within(full & !vmask, n) {
                let got = reconstruct_from_one_point(one_point, &v, &z, None, &Alphabet::binary()).unwrap();
                for x in &refs {
                    let mut query = pairs_of(x);
                    query.sort();
                    assert_eq!(got.prob(x).unwrap(), &raw.conditional(&query, &pairs_of(&z)));
                }
                // Independent of the reference configuration and of the visiting order.
                for u in refs.iter().step_by(3) {
                    let other = reconstruct_with_order(one_point, &v, &reversed, &z, Some(u), &Alphabet::binary()).unwrap();
                    assert_eq!(other.probs(), got.probs());
                }
            }
        }
    }
}

#[test]
fn zero_one_point_probability_is_a_positivity_error() {
    let v = volume_of(0b11, 2);
    let z = Configuration::empty();
    let degenerate = |t: &Site, c: &Configuration| {
        let target = Volume::single(t.clone());
        let probs = vec![gfl_core::Rational::from(num_bigint::BigInt::from(1)), gfl_core::Rational::from(num_bigint::BigInt::from(0))];
        let dist = gfl_core::FiniteDistribution::new(target, Alphabet::binary(), probs)?;
        gfl_core::ConditionalKernel::new(c.clone(), dist)
    };
    let err = reconstruct_from_one_point(degenerate, &v, &z, None, &Alphabet::binary()).unwrap_err();
    assert!(matches!(err, Error::Positivity(ref msg) if msg.contains("j=")), "{err:?}");
}
