mod common;

use cgsynth::gamma::{concept_type_domain, marker_domain, relation_type_domain, RelationDomainPolicy};
use cgsynth::rng::seeded;
use common::{oracle_concept_domain, oracle_marker_domain, oracle_relation_domain, random_graph, random_vocabulary};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn domains_match_brute_force(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let v = random_vocabulary(&mut rng, 100);
        let n = rng.random_range(0..12);
        let g = random_graph(&v, &mut rng, n, 0.5);
        for r in g.relations() {
            for policy in [RelationDomainPolicy::ArityOnly, RelationDomainPolicy::SignatureCompatible] {
                prop_assert_eq!(
                    relation_type_domain(&v, &g, r.id, policy).unwrap(),
                    oracle_relation_domain(&v, &g, r.id, policy)
                );
            }
        }
        for c in g.concepts() {
            prop_assert_eq!(concept_type_domain(&v, &g, c.id).unwrap(), oracle_concept_domain(&v, &g, c.id));
            if c.marker.is_some() {
                prop_assert_eq!(marker_domain(&v, &g, c.id).unwrap(), oracle_marker_domain(&v, &g, c.id));
            } else {
                prop_assert!(marker_domain(&v, &g, c.id).is_err());
            }
        }
    }
}

#[test]
fn current_label_is_always_admissible() {
    for seed in 0..50 {
        let mut rng = seeded(seed);
        let v = random_vocabulary(&mut rng, 60);
        let g = random_graph(&v, &mut rng, 8, 0.5);
        for r in g.relations() {
            let d = relation_type_domain(&v, &g, r.id, RelationDomainPolicy::SignatureCompatible).unwrap();
            assert!(d.contains(&r.relation_type));
        }
        for c in g.concepts() {
            assert!(concept_type_domain(&v, &g, c.id).unwrap().contains(&c.concept_type));
        }
    }
}
