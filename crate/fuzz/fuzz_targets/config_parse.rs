//! Fuzzes the config deserializer: parsing arbitrary text must never panic,
//! and configs that deserialize must build (or reject) graph and geometry
//! without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;
use selfsim::config::SystemConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = SystemConfig::parse(text) {
            let _ = cfg.build_graph();
            if cfg.has_geometry() {
                let _ = cfg.build_system();
            }
        }
    }
});
