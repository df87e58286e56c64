use proptest::prelude::*;
use symalg::Sampler;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn draws_are_reproducible_and_sorted_by_validity(seed in any::<u64>(), draws in 1usize..8, d in 2usize..=5) {
        let (ok, bad) = Sampler::new(seed, draws).sample(d);
        let (ok2, bad2) = Sampler::new(seed, draws).sample(d);
        prop_assert_eq!(&ok, &ok2);
        prop_assert_eq!(&bad, &bad2);
        prop_assert_eq!(ok.len(), draws);
        prop_assert!(ok.iter().all(|g| g.d() == d && g.validity(d).is_valid()));
        prop_assert!(bad.iter().all(|(g, _)| !g.validity(d).is_valid()));
    }
}
