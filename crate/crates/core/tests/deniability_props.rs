use covert_core::deniability::{check_plausible_deniability, decompose_column, pd_greatest, telescoping_decompose};
use covert_core::dominance::blackwell_dominates;
use covert_core::generate::{random_baseline, random_prior, random_pd};
use covert_core::model::{bayes, classify_messages, MessageClass};
use covert_core::{Rational, Scalar};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_reconstructs(seed in any::<u64>(), n in 2usize..=5, m in 1usize..=4) {
        let f = random_baseline::<Rational>(&mut ChaCha8Rng::seed_from_u64(seed), n, m);
        let dec = telescoping_decompose(&f);
        let c = classify_messages(&f);
        for x in 0..m {
            prop_assert_eq!(dec.reconstruct(x, n), f.column(x).to_vec());
            if c.class_of(x) != MessageClass::S {
                let rays = decompose_column(f.column(x), c.class_of(x));
                prop_assert!(rays.iter().all(|(_, w)| w.is_pos()));
                let mut cuts: Vec<usize> = rays.iter().map(|(r, _)| r.cutoff).collect();
                cuts.dedup();
                prop_assert_eq!(cuts.len(), rays.len());
            }
        }
    }

    #[test]
    fn greatest_dominates_random_deniable(seed in any::<u64>(), n in 2usize..=4, m in 1usize..=4, ny in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_baseline::<Rational>(&mut rng, n, m);
        let h = random_pd(&mut rng, &f, ny);
        prop_assert!(check_plausible_deniability(&h, &f).unwrap().holds);
        let g = pd_greatest(&f);
        prop_assert!(check_plausible_deniability(&g, &f).unwrap().holds);
        prop_assert!(blackwell_dominates(&g, &h, true).unwrap().is_some());
    }

    #[test]
    fn greatest_posteriors_are_tails(seed in any::<u64>(), n in 2usize..=5, m in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_baseline::<Rational>(&mut rng, n, m);
        let mu = random_prior::<Rational>(&mut rng, n);
        let g = pd_greatest(&f);
        let c = classify_messages(&f);
        for x in 0..g.nx() {
            for y in 0..g.ny() {
                let Some(post) = bayes(g.column(x, y), mu.mass()) else { continue };
                let support: Vec<usize> = (0..n).filter(|&k| !post[k].is_zero()).collect();
                let (lo, hi) = (support[0], *support.last().unwrap());
                prop_assert_eq!(support.len(), hi - lo + 1);
                match c.class_of(x) {
                    MessageClass::D => prop_assert_eq!(lo, 0),
                    MessageClass::I => prop_assert_eq!(hi, n - 1),
                    MessageClass::S => prop_assert_eq!(lo, hi),
                }
                let scale = post[lo].clone() / mu.mass()[lo].clone();
                for &k in &support {
                    prop_assert_eq!(post[k].clone(), mu.mass()[k].clone() * scale.clone());
                }
            }
        }
    }
}
