//! Fuzzes the expression grammar: parsing must never panic, and anything that
//! parses must survive a print/parse round trip unchanged.

#![no_main]

use std::sync::{Arc, OnceLock};

use libfuzzer_sys::fuzz_target;
use selfsim::expr::{parse, print};
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
        if let Ok(element) = parse(g, text) {
            let printed = print(&element);
            let back = parse(g, &printed).expect("printed form must re-parse");
            assert!(back.equals(&element).unwrap(), "round trip changed {printed:?}");
        }
    }
});
