mod common;

use cgsynth::graph::ConceptualGraph;
use cgsynth::metrics::compute_stats;
use cgsynth::rng::seeded;
use common::{close, random_graph, random_vocabulary, recount, same_stats};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn stats_match_recount_and_ignore_order(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let v = random_vocabulary(&mut rng, 60);
        let n = rng.random_range(1..=20);
        let mut graphs: Vec<ConceptualGraph> = (0..n)
            .map(|_| {
                let k = rng.random_range(0..10);
                random_graph(&v, &mut rng, k, 0.5)
            })
            .collect();
        let stats = compute_stats(&graphs).unwrap();
        let (nm, ns, lm, ls, arity) = recount(&v, &graphs);
        prop_assert_eq!(stats.cg_count, n);
        prop_assert!(close(stats.nb_nodes_mean, nm) && close(stats.nb_nodes_stddev, ns));
        prop_assert!(close(stats.nb_labels_mean, lm) && close(stats.nb_labels_stddev, ls));
        prop_assert_eq!(stats.arity_counts.keys().collect::<Vec<_>>(), arity.keys().collect::<Vec<_>>());
        for (k, x) in &arity {
            prop_assert!(close(stats.arity(*k), *x));
        }
        graphs.shuffle(&mut rng);
        prop_assert!(same_stats(&compute_stats(&graphs).unwrap(), &stats));
    }
}

#[test]
fn two_identical_graphs_have_zero_spread() {
    let mut rng = seeded(8);
    let v = random_vocabulary(&mut rng, 40);
    let g = random_graph(&v, &mut rng, 6, 0.5);
    let stats = compute_stats(&[g.clone(), g]).unwrap();
    assert_eq!(stats.nb_nodes_stddev, 0.0);
    assert_eq!(stats.nb_labels_stddev, 0.0);
}
