//! Property tests: canonical forms are stable under refinement, and the
//! parsers reject arbitrary junk without panicking.

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selfsim::config::SystemConfig;
use selfsim::expr::{parse, parse_path_literal, print};
use selfsim::graph::Graph;
use selfsim::sampling::{random_cylinder, random_element, random_graph};

fn cantor_graph() -> Arc<Graph> {
    Arc::new(Graph::new(&["v"], &[("e1", "v", "v"), ("e2", "v", "v")]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Refining a cylinder function to any uniform depth and canonicalizing
    /// recovers the original function.
    #[test]
    fn refine_then_canonicalize_is_identity(seed in any::<u64>(), extra in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 4, 8);
        let f = random_cylinder(&mut rng, &g, 4, 3);
        let depth = f.max_key_len() + extra;
        let refined = f.refine(depth).unwrap();
        prop_assert_eq!(&refined.canonicalize(), &f);
        prop_assert_eq!(&refined, &f);
    }

    /// Printing a random element and parsing it back is the identity.
    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 4, 8);
        let x = random_element(&mut rng, &g, 4, 3);
        let text = print(&x);
        let back = parse(&g, &text).unwrap();
        prop_assert!(back.equals(&x).unwrap(), "round trip changed {text:?}");
    }

    /// The expression parser returns a value or an error on any input.
    #[test]
    fn expression_parser_never_panics(text in any::<String>()) {
        let g = cantor_graph();
        let _ = parse(&g, &text);
    }

    /// The path-literal parser returns a value or an error on any input.
    #[test]
    fn path_literal_parser_never_panics(text in any::<String>()) {
        let g = cantor_graph();
        let _ = parse_path_literal(&g, &text);
    }

    /// The config parser returns a value or an error on any input.
    #[test]
    fn config_parser_never_panics(text in any::<String>()) {
        let _ = SystemConfig::parse(&text);
    }
}
