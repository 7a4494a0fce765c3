use covert_core::dominance::blackwell_dominates;
use covert_core::generate::{random_baseline, random_joint, random_pd, random_prior};
use covert_core::model::{apply_garbling, ActionSpace, BaselineStructure, JointStructure};
use covert_core::utility::{sample_utility_with, WeightedExperiment};
use covert_core::{rat, Rational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn garbling_certificates_reproduce(seed in any::<u64>(), n in 2usize..=4, nx in 1usize..=3, ny in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_baseline::<Rational>(&mut rng, n, nx);
        let a = random_pd(&mut rng, &f, ny);
        let b = random_pd(&mut rng, &f, ny);
        for (h1, h2) in [(&a, &b), (&b, &a)] {
            if let Some(g) = blackwell_dominates(h1, h2, false).unwrap() {
                prop_assert_eq!(&apply_garbling(h1, &g).unwrap(), h2);
                let mu = random_prior::<Rational>(&mut rng, n);
                let (w1, w2) = (WeightedExperiment::new(h1, &mu).unwrap(), WeightedExperiment::new(h2, &mu).unwrap());
                let actions = ActionSpace::symmetric(1, 1).unwrap();
                for _ in 0..50 {
                    let u = sample_utility_with(&actions, &mu, &mut rng);
                    prop_assert!(w2.value(&u) <= w1.value(&u));
                }
            }
        }
    }

    #[test]
    fn values_sit_between_bounds(seed in any::<u64>(), n in 2usize..=4, nx in 1usize..=3, ny in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_prior::<Rational>(&mut rng, n);
        let h = random_joint::<Rational>(&mut rng, n, nx, ny);
        let none = JointStructure::trivial(&BaselineStructure::new(vec!["x".into()], vec![vec![rat(1, 1); n]]).unwrap());
        let rows = (0..n).map(|k| (0..n).map(|j| rat((j == k) as i64, 1)).collect()).collect();
        let full = JointStructure::trivial(&BaselineStructure::from_rows((0..n).map(|k| format!("x{k}")).collect(), rows).unwrap());
        let w = |h: &JointStructure| WeightedExperiment::new(h, &mu).unwrap();
        let (wn, wh, wf) = (w(&none), w(&h), w(&full));
        let actions = ActionSpace::symmetric(2, 2).unwrap();
        for _ in 0..20 {
            let u = sample_utility_with(&actions, &mu, &mut rng);
            let v = wh.value(&u);
            prop_assert!(wn.value(&u) <= v.clone());
            prop_assert!(v <= wf.value(&u));
        }
    }

    #[test]
    fn value_is_affine_equivariant(seed in any::<u64>(), n in 2usize..=4, a in 1i64..=7, b in -5i64..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_prior::<Rational>(&mut rng, n);
        let h = random_joint::<Rational>(&mut rng, n, 2, 2);
        let u = sample_utility_with(&ActionSpace::symmetric(1, 1).unwrap(), &mu, &mut rng);
        let (alpha, beta) = (rat(a, 3), rat(b, 2));
        let w = WeightedExperiment::new(&h, &mu).unwrap();
        prop_assert_eq!(w.value(&u.affine(&alpha, &beta)), alpha * w.value(&u) + beta);
    }
}
