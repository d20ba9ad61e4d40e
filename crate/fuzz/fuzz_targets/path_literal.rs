//! Fuzzes the path-literal grammar: parsing must never panic, and accepted
//! literals must denote composable paths.

#![no_main]

use std::sync::{Arc, OnceLock};

use libfuzzer_sys::fuzz_target;
use selfsim::expr::parse_path_literal;
use selfsim::graph::Graph;

fn graph() -> &'static Arc<Graph> {
    static GRAPH: OnceLock<Arc<Graph>> = OnceLock::new();
    GRAPH.get_or_init(|| {
        Arc::new(
            Graph::new(
                &["u", "v"],
                &[("e1", "v", "v"), ("e2", "v", "v"), ("f", "u", "v"), ("g", "v", "u")],
            )
            .unwrap(),
        )
    })
}

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let g = graph();
        if let Ok(path) = parse_path_literal(g, text) {
            // Accepted paths are composable: every consecutive pair matches.
            for pair in path.edges().windows(2) {
                assert_eq!(g.source(pair[0]), g.range(pair[1]));
            }
        }
    }
});
