//! Acceptance gate: nine end-to-end checks covering the symbolic algebra,
//! the representation identities, and the geometric engine. Each test prints
//! one `acceptance N <name>: PASS|FAIL` line (visible with `--nocapture`).

use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selfsim::config::SystemConfig;
use selfsim::expr::{parse, parse_path_literal};
use selfsim::graph::Graph;
use selfsim::mwifs::MwSystem;
use selfsim::sampling::random_graph;
use selfsim::suites::{
    algebra_battery, covariance_battery, generator_battery, roundtrip_battery, tau_battery,
    toeplitz_battery,
};
use selfsim::Error;

/// Seed for the shared random-graph suite used by criteria 1, 3, and 4.
const GRAPH_SUITE_SEED: u64 = 11;
const GRAPH_SUITE_SIZE: usize = 20;

fn suite_graphs() -> Vec<Arc<Graph>> {
    let mut rng = ChaCha8Rng::seed_from_u64(GRAPH_SUITE_SEED);
    (0..GRAPH_SUITE_SIZE).map(|_| random_graph(&mut rng, 6, 12)).collect()
}

fn load_config(name: &str) -> SystemConfig {
    let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {path}: {e}"));
    SystemConfig::parse(&text).unwrap_or_else(|e| panic!("parsing {path}: {e}"))
}

fn load_system(name: &str) -> Arc<MwSystem> {
    let sys = load_config(name).build_system().unwrap();
    sys.require_valid().unwrap();
    sys
}

fn report(number: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "acceptance {number} {name}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_symbolic_identity_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let graphs = suite_graphs();
    let mut total_cases = 0;
    let mut total_failures = 0;
    let mut first = None;
    for g in &graphs {
        let outcome = algebra_battery(g, &mut rng, 500).unwrap();
        total_cases += outcome.cases;
        total_failures += outcome.failures;
        if first.is_none() {
            first = outcome.first_failure.clone();
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = total_failures == 0 && elapsed < 60.0;
    report(
        1,
        "symbolic-identity-suite",
        ok,
        &format!(
            "{} graphs, {total_cases} checks, {total_failures} failures, {elapsed:.1}s",
            graphs.len()
        ),
    );
    assert_eq!(total_failures, 0, "first failure: {first:?}");
    assert!(elapsed < 60.0, "suite took {elapsed:.1}s, budget is 60s");
}

#[test]
fn criterion_2_tau_homomorphism_and_intertwining() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let cantor = load_config("cantor.toml").build_graph().unwrap();
    let mut samples = 0;
    let mut failures = 0;
    let mut first = None;
    // 600 samples on the Cantor graph plus 300 on each of two random graphs;
    // every sample checks multiplicativity and the intertwining at every edge.
    let mut graphs = vec![(cantor, 600usize)];
    for _ in 0..2 {
        graphs.push((random_graph(&mut rng, 5, 9), 300));
    }
    for (g, count) in &graphs {
        let outcome = tau_battery(g, &mut rng, *count).unwrap();
        samples += count;
        failures += outcome.failures;
        if first.is_none() {
            first = outcome.first_failure.clone();
        }
    }
    let ok = failures == 0 && samples >= 1000;
    report(
        2,
        "tau-homomorphism-intertwining",
        ok,
        &format!("{samples} cylinder samples, {failures} failures"),
    );
    assert!(samples >= 1000);
    assert_eq!(failures, 0, "first failure: {first:?}");
}

#[test]
fn criterion_3_toeplitz_and_covariance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let graphs = suite_graphs();
    let mut failures = 0;
    let mut per_graph_min = usize::MAX;
    let mut first = None;
    for g in &graphs {
        let t = toeplitz_battery(g, &mut rng, 500).unwrap();
        let c = covariance_battery(g, &mut rng, 500).unwrap();
        per_graph_min = per_graph_min.min(t.cases + c.cases);
        failures += t.failures + c.failures;
        if first.is_none() {
            first = t.first_failure.clone().or(c.first_failure.clone());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = failures == 0 && per_graph_min >= 1000;
    report(
        3,
        "toeplitz-covariance",
        ok,
        &format!(
            "{} graphs, >= {per_graph_min} inputs each, {failures} failures, {elapsed:.1}s",
            graphs.len()
        ),
    );
    assert!(per_graph_min >= 1000, "only {per_graph_min} inputs on some graph");
    assert_eq!(failures, 0, "first failure: {first:?}");
}

#[test]
fn criterion_4_generator_coverage() {
    let mut failures = 0;
    let mut cases = 0;
    let mut first = None;
    let mut graphs = suite_graphs();
    for name in ["cantor.toml", "halfmaps.toml", "sierpinski.toml", "twovertex.toml"] {
        graphs.push(load_config(name).build_graph().unwrap());
    }
    for g in &graphs {
        let outcome = generator_battery(g).unwrap();
        cases += outcome.cases;
        failures += outcome.failures;
        if first.is_none() {
            first = outcome.first_failure.clone();
        }
    }
    let ok = failures == 0;
    report(
        4,
        "generator-coverage",
        ok,
        &format!("{} graphs, {cases} generators, {failures} failures", graphs.len()),
    );
    assert_eq!(failures, 0, "first failure: {first:?}");
}

#[test]
fn criterion_5_dimension_closed_forms() {
    let cases: [(&str, Arc<MwSystem>, f64); 3] = [
        (
            "cantor ln2/ln3",
            load_system("cantor.toml"),
            f64::ln(2.0) / f64::ln(3.0),
        ),
        (
            "three half loops ln3/ln2",
            load_system("sierpinski.toml"),
            f64::ln(3.0) / f64::ln(2.0),
        ),
        (
            "single half loop 0",
            {
                let text = r#"
                    [graph]
                    vertices = ["v"]
                    [[graph.edges]]
                    id = "e"
                    range = "v"
                    source = "v"
                    [geometry]
                    dimension = 1
                    [geometry.spaces.v]
                    min = [0.0]
                    max = [1.0]
                    [geometry.maps.e]
                    ratio = 0.5
                    translation = [0.25]
                "#;
                SystemConfig::parse(text).unwrap().build_system().unwrap()
            },
            0.0,
        ),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (label, sys, expected) in &cases {
        let start = Instant::now();
        let got = sys.dimension(1e-12).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let here = (got - expected).abs() <= 1e-9 && elapsed < 1.0;
        ok &= here;
        detail.push_str(&format!("{label}: {got:.12} in {elapsed:.3}s; "));
        assert!(
            (got - expected).abs() <= 1e-9,
            "{label}: got {got}, expected {expected}"
        );
        assert!(elapsed < 1.0, "{label}: took {elapsed:.3}s, budget is 1s");
    }
    report(5, "dimension-closed-forms", ok, detail.trim_end_matches("; "));
    assert!(ok);
}

#[test]
fn criterion_6_coding_map_certification() {
    let sys = load_system("cantor.toml");
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let diam = sys.space(sys.graph().vertices().next().unwrap()).diam();
    let rep = sys.check_equivariance(1000, 30, 1e-12, &mut rng).unwrap();
    let budget = 2.0 * 3f64.powi(-30) * diam + 1e-12;
    let residual_ok = rep.pass && rep.max_discrepancy <= budget;

    let literal = "e2 ".repeat(20);
    let path = parse_path_literal(sys.graph(), literal.trim()).unwrap();
    let (point, radius) = sys.code(&path, 20).unwrap();
    let fixed_point_ok = (point[0] - 1.0).abs() <= 3f64.powi(-20);

    let ok = residual_ok && fixed_point_ok;
    report(
        6,
        "coding-map-certification",
        ok,
        &format!(
            "equivariance residual {:.3e} <= {budget:.3e} over {} comparisons; \
             code(e2^20) = {:.12} +- {radius:.3e}",
            rep.max_discrepancy, rep.comparisons, point[0]
        ),
    );
    assert!(
        residual_ok,
        "residual {} exceeds {budget}",
        rep.max_discrepancy
    );
    assert!(
        fixed_point_ok,
        "code(e2^20) = {} is not within 3^-20 of 1.0",
        point[0]
    );
}

#[test]
fn criterion_7_surjectivity_discrimination() {
    let half = load_system("halfmaps.toml");
    let cantor = load_system("cantor.toml");
    let half_rep = half.check_surjectivity(0.01).unwrap();
    let cantor_rep = cantor.check_surjectivity(0.05).unwrap();
    let ok = half_rep.pass && !cantor_rep.pass;
    report(
        7,
        "surjectivity-discrimination",
        ok,
        &format!(
            "halfmaps at 0.01: {}, cantor at 0.05: {}",
            half_rep.pass, cantor_rep.pass
        ),
    );
    assert!(half_rep.pass, "half-maps system must cover [0,1] at eps=0.01");
    assert!(!cantor_rep.pass, "cantor system must miss the middle third at eps=0.05");
}

#[test]
fn criterion_8_attractor_self_similarity() {
    let cases = [
        ("cantor.toml", 1e-3),
        ("halfmaps.toml", 1e-3),
        ("sierpinski.toml", 2e-2),
        ("twovertex.toml", 1e-3),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (name, eps) in cases {
        let sys = load_system(name);
        let attr = sys.attractor(eps).unwrap();
        let defect = sys.self_similarity_defect(&attr);
        let bound = 2.0 * attr.radius;
        let here = defect <= bound;
        ok &= here;
        detail.push_str(&format!(
            "{name}: defect {defect:.3e} <= {bound:.3e} ({} pts); ",
            attr.total_points()
        ));
        assert!(
            here,
            "{name}: self-similarity defect {defect} exceeds 2 * radius = {bound}"
        );
    }
    report(8, "attractor-self-similarity", ok, detail.trim_end_matches("; "));
    assert!(ok);
}

#[test]
fn criterion_9_parser_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut cases = 0;
    let mut failures = 0;
    let mut first = None;
    for _ in 0..5 {
        let g = random_graph(&mut rng, 6, 10);
        let outcome = roundtrip_battery(&g, &mut rng, 200).unwrap();
        cases += outcome.cases;
        failures += outcome.failures;
        if first.is_none() {
            first = outcome.first_failure.clone();
        }
    }

    // Canned syntax errors must blame the exact byte offset.
    let g = load_config("cantor.toml").build_graph().unwrap();
    let canned = [
        ("s(e1", 4),             // unclosed call
        ("p(v) + s(e9)", 9),     // unknown edge id
        ("p(v) p(v)", 5),        // missing operator
    ];
    let mut canned_ok = true;
    for (text, offset) in canned {
        match parse(&g, text) {
            Err(Error::Syntax { offset: got, .. }) => {
                if got != offset {
                    canned_ok = false;
                    failures += 1;
                    if first.is_none() {
                        first = Some(format!("{text:?}: offset {got}, expected {offset}"));
                    }
                }
            }
            other => {
                canned_ok = false;
                failures += 1;
                if first.is_none() {
                    first = Some(format!("{text:?}: expected syntax error, got {other:?}"));
                }
            }
        }
        cases += 1;
    }

    let ok = failures == 0 && cases >= 1003 && canned_ok;
    report(
        9,
        "parser-round-trip",
        ok,
        &format!("{cases} cases, {failures} failures"),
    );
    assert!(cases >= 1003);
    assert_eq!(failures, 0, "first failure: {first:?}");
}
