use covert_core::generate::{random_baseline, random_distribution, random_joint, random_pd, random_prior};
use covert_core::model::{apply_garbling, bayes, Garbling};
use covert_core::{Rational, Scalar};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sum(v: impl IntoIterator<Item = Rational>) -> Rational {
    v.into_iter().fold(Rational::zero(), |a, b| a + b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rows_are_distributions(seed in any::<u64>(), n in 2usize..=5, nx in 1usize..=4, ny in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_baseline::<Rational>(&mut rng, n, nx);
        let h = random_pd(&mut rng, &f, ny);
        let j = random_joint::<Rational>(&mut rng, n, nx, ny);
        for k in 0..n {
            prop_assert!(sum((0..nx).map(|x| f.get(x, k).clone())).is_one());
            prop_assert!(sum(h.flat_columns().iter().map(|c| c[k].clone())).is_one());
            prop_assert!(sum(j.flat_columns().iter().map(|c| c[k].clone())).is_one());
        }
        prop_assert!(h.check_consistent(&f).is_ok());
        prop_assert!(j.check_consistent(&j.baseline()).is_ok());
    }

    #[test]
    fn posteriors_average_to_prior(seed in any::<u64>(), n in 2usize..=5, nx in 1usize..=3, ny in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_prior::<Rational>(&mut rng, n);
        let h = random_joint::<Rational>(&mut rng, n, nx, ny);
        let mut avg = vec![Rational::zero(); n];
        for c in h.flat_columns() {
            let p = sum(c.iter().zip(mu.mass()).map(|(a, b)| a * b));
            if let Some(post) = bayes(c, mu.mass()) {
                for k in 0..n {
                    avg[k] = avg[k].clone() + p.clone() * post[k].clone();
                }
            }
        }
        prop_assert_eq!(avg, mu.mass().to_vec());
    }

    #[test]
    fn garbled_rows_are_distributions(seed in any::<u64>(), n in 2usize..=4, nx in 1usize..=3, ny in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_joint::<Rational>(&mut rng, n, nx, ny);
        let (tx, ty) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let rows = (0..nx * ny).map(|_| random_distribution::<Rational>(&mut rng, tx * ty, 4)).collect();
        let labels = |p: &str, m: usize| (0..m).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let g = Garbling::new(h.x_messages().to_vec(), h.y_messages().to_vec(), labels("u", tx), labels("v", ty), rows).unwrap();
        let out = apply_garbling(&h, &g).unwrap();
        for k in 0..n {
            prop_assert!(sum(out.flat_columns().iter().map(|c| c[k].clone())).is_one());
        }
    }

    #[test]
    fn float_structures_agree_with_exact(seed in any::<u64>(), n in 2usize..=4, nx in 1usize..=3) {
        let f = random_baseline::<Rational>(&mut ChaCha8Rng::seed_from_u64(seed), n, nx);
        let g = random_baseline::<f64>(&mut ChaCha8Rng::seed_from_u64(seed), n, nx);
        for x in 0..nx {
            for k in 0..n {
                prop_assert!((f.get(x, k).to_f64() - g.get(x, k)).abs() < 1e-12);
            }
        }
    }
}
