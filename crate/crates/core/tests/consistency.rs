mod common;

use common::{conditions_within, pairs_of, random_raw, volume_of};
use gfl_core::lattice::enumerate_configurations;
use gfl_core::{
    check_one_point_consistency, check_pair_consistency, finite_conditional, Alphabet, Scalar, Site,
};

#[test]
fn finite_conditionals_match_brute_force_sums() {
    for (n, seed) in [(3, 11), (4, 12), (5, 13)] {
        let raw = random_raw(n, seed);
        let m = raw.field();
        for vmask in 1..1usize << n {
            let v = volume_of(vmask, n);
            let xs = enumerate_configurations(&v, &Alphabet::binary()).unwrap();
            for z in conditions_within(!vmask & ((1 << n) - 1), n) {
                let k = finite_conditional(&m, &v, &z).unwrap();
                for x in &xs {
                    let want = raw.conditional(&pairs_of(x), &pairs_of(&z));
                    assert_eq!(k.prob(x).unwrap(), &want, "V={v} x={x:?} z={z:?}");
                }
                assert_eq!(gfl_core::Rational::sum(k.probs()), gfl_core::Rational::one());
            }
        }
    }
}

#[test]
fn pair_and_one_point_identities_hold_exactly_on_random_tables() {
    for seed in 0..20u64 {
        let n = 3 + (seed % 3) as usize;
        let m = random_raw(n, 1000 + seed).field();
        let full = (1usize << n) - 1;
        for vmask in 1..=full {
            let v = volume_of(vmask, n);
            let zs = conditions_within(full & !vmask, n);
            // every nonempty proper sub-volume of V
            let mut imask = (vmask - 1) & vmask;
            while imask > 0 {
                let i = volume_of(imask, n);
                for z in &zs {
                    assert!(check_pair_consistency(&m, &i, &v, z).unwrap(), "seed {seed} I={i} V={v}");
                }
                imask = (imask - 1) & vmask;
            }
        }
        for t in 0..n {
            for s in t + 1..n {
                for z in conditions_within(full & !(1 << t) & !(1 << s), n) {
                    let ok = check_one_point_consistency(&m, &Site::from(t as i32), &Site::from(s as i32), &z);
                    assert!(ok.unwrap(), "seed {seed} t={t} s={s}");
                }
            }
        }
    }
}

#[test]
fn overlapping_condition_is_rejected() {
    let m = random_raw(3, 5).field();
    let v = volume_of(0b011, 3);
    let z = enumerate_configurations(&volume_of(0b110, 3), &Alphabet::binary()).unwrap()[0].clone();
    assert!(finite_conditional(&m, &v, &z).is_err());
}
