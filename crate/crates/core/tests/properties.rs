use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use pcpnet::io::generate::{
    flip_random, random_cpnet, random_dag, random_forest, random_incomplete, random_outcome, random_pcp, rng,
};
use pcpnet::io::{parse_net, serialize, NetDocument};
use pcpnet::optimize::{det_optimal, map_optimal};
use pcpnet::oracle::{compatible_nets, dominance_prob_oracle, entails_oracle};
use pcpnet::tree::{det_dominance, dominance_fpt_detailed, entails_by_formula};
use pcpnet::{CpNet, PcpNet};

fn forest_pcp(seed: u64, max_n: usize) -> (PcpNet, rand_chacha::ChaCha8Rng) {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let s = Arc::new(random_forest(&mut r, n));
    (random_pcp(&mut r, s), r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fpt_agrees_with_enumeration(seed in any::<u64>()) {
        let (pn, mut r) = forest_pcp(seed, 6);
        let n = pn.structure().len();
        let o = random_outcome(&mut r, n);
        let k = r.gen_range(0..=n.min(4));
        let o2 = flip_random(&mut r, &o, k);
        let fwd = dominance_fpt_detailed(&pn, &o, &o2).unwrap().probability;
        let back = dominance_fpt_detailed(&pn, &o2, &o).unwrap().probability;
        prop_assert!((fwd - dominance_prob_oracle(&pn, &o, &o2).unwrap()).abs() <= 1e-9);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&fwd));
        prop_assert!(fwd + back <= 1.0 + 1e-9);
    }

    #[test]
    fn net_probabilities_sum_to_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let s = Arc::new(random_dag(&mut r, n, 2));
        prop_assume!(s.num_slots() <= 12);
        let pn = random_pcp(&mut r, s.clone());
        let total: f64 = compatible_nets(&s).unwrap().iter().map(|net| pn.net_probability(net).unwrap()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn deterministic_dominance_three_ways(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=7);
        let s = Arc::new(random_forest(&mut r, n));
        let net = random_cpnet(&mut r, s);
        let o = random_outcome(&mut r, n);
        let k = r.gen_range(0..=n);
        let o2 = flip_random(&mut r, &o, k);
        let by_search = entails_oracle(&net, &o, &o2).unwrap();
        prop_assert_eq!(det_dominance(&net, &o, &o2).unwrap(), by_search);
        prop_assert_eq!(entails_by_formula(&net, &o, &o2).unwrap(), by_search);
        let p = dominance_fpt_detailed(&PcpNet::degenerate(&net), &o, &o2).unwrap().probability;
        prop_assert_eq!(p, if by_search { 1.0 } else { 0.0 });
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=7);
        let s = Arc::new(random_dag(&mut r, n, 3));
        let doc = match r.gen_range(0..3) {
            0 => NetDocument::Det(random_cpnet(&mut r, s)),
            1 => NetDocument::Pcp(random_pcp(&mut r, s)),
            _ => {
                let absent = r.gen_range(0..=s.num_slots());
                NetDocument::Incomplete(random_incomplete(&mut r, s, absent))
            }
        };
        let text = serialize(&doc);
        prop_assert_eq!(parse_net(&text).unwrap(), doc);
    }

    #[test]
    fn map_of_a_certain_net_is_its_optimum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let s = Arc::new(random_forest(&mut r, n));
        let net: CpNet = random_cpnet(&mut r, s);
        let (best, p) = map_optimal(&PcpNet::degenerate(&net)).unwrap();
        prop_assert_eq!(best, det_optimal(&net));
        prop_assert_eq!(p, 1.0);
    }

    #[test]
    fn parser_never_panics(text in "(pcpnet|cpnet|cpnet incomplete)?\n?([ -~]{0,30}\n){0,6}") {
        let _ = parse_net(&text);
    }

    #[test]
    fn sampling_is_seeded(seed in any::<u64>(), draw in any::<u64>()) {
        let (pn, _) = forest_pcp(seed, 8);
        prop_assert_eq!(pn.sample_nets(draw, 4), pn.sample_nets(draw, 4));
    }
}
