//! Properties of the λ sector: encoding, graph reduction against the
//! substitution-based reference evaluator, (ext1) as η, and divergence.

use glc_core::gen;
use glc_core::graph::{validate, Endpoint, Role};
use glc_core::lambda::{
    alpha_eq, church, encode_term, is_lambda_graph, normal_order_step, readback, reduce_graph,
    reference_eval, LambdaTerm, ReduceStatus, DEFAULT_FUEL, ROOT_LEAF,
};
use glc_core::moves::ext1;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn encoding_is_sound(seed in any::<u64>()) {
        let t = gen::random_closed_term(&mut gen::rng(seed), 6);
        let g = encode_term(&t);
        prop_assert_eq!(validate(&g), vec![]);
        let report = is_lambda_graph(&g);
        prop_assert!(report.is_lambda_graph(), "{}: {:?}", t, report.violations);
        let back = readback(&g).unwrap();
        prop_assert!(alpha_eq(&back, &t), "{} read back as {}", t, back);
    }

    #[test]
    fn one_graph_step_is_one_leftmost_step(seed in any::<u64>()) {
        let t = gen::random_closed_term(&mut gen::rng(seed), 6);
        let Some(next) = normal_order_step(&t) else {
            let r = reduce_graph(&encode_term(&t), 1).unwrap();
            prop_assert_eq!(r.status, ReduceStatus::Normal);
            prop_assert_eq!(r.trace.beta_count(), 0);
            return Ok(());
        };
        // One β, then whatever unsharing and pruning the next step needs.
        let r = reduce_graph(&encode_term(&t), 1).unwrap();
        prop_assert_eq!(r.trace.beta_count(), 1);
        let back = readback(&r.graph).unwrap();
        prop_assert!(alpha_eq(&back, &next), "{} → {}, graph gave {}", t, next, back);
    }

    #[test]
    fn graph_reduction_matches_the_reference(seed in any::<u64>()) {
        let (t, nf) = gen::random_normalizing_term(&mut gen::rng(seed), 6, 200);
        let r = reduce_graph(&encode_term(&t), DEFAULT_FUEL).unwrap();
        prop_assert_eq!(r.status, ReduceStatus::Normal);
        let back = readback(&r.graph).unwrap();
        prop_assert!(alpha_eq(&back, &nf), "{} gave {}, expected {}", t, back, nf);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ext1_is_eta(seed in any::<u64>()) {
        let f = gen::random_term_over(&mut gen::rng(seed), 4, &["y", "z"]);
        let t = LambdaTerm::abs("x", LambdaTerm::app(f.clone(), LambdaTerm::var("x")));
        let g = encode_term(&t);
        let root = g.edge(g.out_leaf(ROOT_LEAF).unwrap()).unwrap();
        let Endpoint::Port(l, Role::AOut) = root.source else { panic!("root is not a λ") };
        let Some(&Endpoint::Port(a, Role::Out)) = g.neighbor(l, Role::In) else {
            panic!("body is not an application")
        };
        let h = ext1(&g, l, a).unwrap();
        let back = readback(&h).unwrap();
        prop_assert!(alpha_eq(&back, &f), "{} gave {}", t, back);
    }

    #[test]
    fn omega_runs_out_of_fuel(fuel in 0u64..300) {
        let r = reduce_graph(&encode_term(&church::omega()), fuel).unwrap();
        prop_assert_eq!(r.status, ReduceStatus::FuelExhausted);
        prop_assert_eq!(r.trace.beta_count() as u64, fuel);
    }
}

#[test]
fn corpus_terms_reach_their_normal_forms() {
    for (name, t) in church::corpus() {
        let (nf, status) = reference_eval(&t, DEFAULT_FUEL);
        assert_eq!(status, ReduceStatus::Normal, "{name}");
        let r = reduce_graph(&encode_term(&t), DEFAULT_FUEL).unwrap();
        assert_eq!(r.status, ReduceStatus::Normal, "{name}");
        let back = readback(&r.graph).unwrap();
        assert!(alpha_eq(&back, &nf), "{name}: {back} vs {nf}");
    }
}
