use proptest::prelude::*;

use treemart::bst::BstProcess;
use treemart::martingale::{d_gen, d_yule, m_bis, m_bst, m_gen, m_yule};
use treemart::ratios::SplitRatios;
use treemart::tree::BinaryTreeShape;
use treemart::yule::{simulate_yule, Stop, YulePath};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jump_times_count_leaves(seed in any::<u64>(), n in 1u64..300) {
        let p = simulate_yule(seed, Stop::LeafCount(n)).unwrap();
        let taus = p.jump_times();
        prop_assert!(taus.windows(2).all(|w| w[0] < w[1]));
        for k in [0, n / 2, n] {
            let tau = p.jump_time(k as usize).unwrap();
            prop_assert_eq!(p.population(tau).unwrap(), k + 1);
            prop_assert_eq!(p.shape_at_jump(k as usize).unwrap().leaf_count() as u64, k + 1);
        }
    }

    #[test]
    fn alive_profile_sums_to_population(seed in any::<u64>(), t in 0.0f64..4.0) {
        let p = simulate_yule(seed, Stop::Time(4.0)).unwrap();
        let profile = p.alive_profile(t).unwrap();
        prop_assert_eq!(profile.iter().sum::<u64>(), p.population(t).unwrap());
    }

    #[test]
    fn yule_at_one_is_scaled_population(seed in any::<u64>(), t in 0.0f64..3.0) {
        let p = simulate_yule(seed, Stop::Time(3.0)).unwrap();
        let m = m_yule(&p, t, 1.0).unwrap().value();
        let direct = (-t).exp() * p.population(t).unwrap() as f64;
        prop_assert!((m - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn bst_at_one_is_constant(seed in any::<u64>(), n in 0usize..400) {
        let mut b = BstProcess::new(seed);
        b.grow_to(n).unwrap();
        prop_assert!((m_bst(&b.shape(), 1.0).unwrap().value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_is_exactly_one(seed in any::<u64>(), g in 0u8..8) {
        let p = simulate_yule(seed, Stop::Generation(8)).unwrap();
        prop_assert_eq!(m_gen(&p, g, 0.5).unwrap().value(), 1.0);
        let r = SplitRatios::sample_uniform(seed, g).unwrap();
        prop_assert_eq!(m_bis(&r, g, 0.5).unwrap().value(), 1.0);
    }

    #[test]
    fn derivatives_vanish_at_the_root(seed in any::<u64>(), z in 0.1f64..3.0) {
        let p = simulate_yule(seed, Stop::Generation(2)).unwrap();
        prop_assert_eq!(d_gen(&p, 0, z).unwrap().value(), 0.0);
        prop_assert_eq!(d_yule(&p, 0.0, z).unwrap().value(), 0.0);
    }

    #[test]
    fn one_step_children_grow_by_one(seed in any::<u64>(), n in 0usize..60) {
        let mut b = BstProcess::new(seed);
        b.grow_to(n).unwrap();
        let s = b.shape();
        let kids = s.one_step_children();
        prop_assert_eq!(kids.len(), n + 1);
        for k in &kids {
            prop_assert_eq!(k.leaf_count(), n + 2);
            prop_assert_eq!(k.profile().iter().sum::<u64>() as usize, n + 2);
        }
    }

    #[test]
    fn shape_code_round_trips(seed in any::<u64>(), n in 0usize..100) {
        let mut b = BstProcess::new(seed);
        b.grow_to(n).unwrap();
        let s = b.shape();
        prop_assert_eq!(BinaryTreeShape::decode(&s.encode()).unwrap(), s);
    }

    #[test]
    fn siblings_sum_to_one(seed in any::<u64>(), g in 1u8..8) {
        let r = SplitRatios::sample_uniform(seed, g).unwrap();
        let v = r.values();
        for i in 0..(1usize << g) - 1 {
            prop_assert_eq!(v[2 * i + 1] + v[2 * i + 2], 1.0);
        }
    }

    #[test]
    fn path_serialization_round_trips(seed in any::<u64>(), t in 0.5f64..3.0) {
        let p = simulate_yule(seed, Stop::Time(t)).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        let q = YulePath::read_from(buf.as_slice()).unwrap();
        prop_assert_eq!(q.population(t * 0.5).unwrap(), p.population(t * 0.5).unwrap());
        prop_assert_eq!(m_yule(&q, t * 0.5, 0.7).unwrap(), m_yule(&p, t * 0.5, 0.7).unwrap());
    }

    #[test]
    fn extension_keeps_the_past(seed in any::<u64>(), t in 0.5f64..2.0) {
        let short = simulate_yule(seed, Stop::Time(t)).unwrap();
        let long = simulate_yule(seed, Stop::Time(t)).unwrap().extend(Stop::Time(t + 1.0)).unwrap();
        prop_assert_eq!(short.alive_profile(t).unwrap(), long.alive_profile(t).unwrap());
        prop_assert_eq!(m_yule(&short, t, 0.3).unwrap(), m_yule(&long, t, 0.3).unwrap());
    }
}
