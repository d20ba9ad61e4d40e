//! Command-line driver: validation, symbolic suites, representation checks,
//! and fractal geometry over a single declarative config file.
//!
//! Every run prints one machine-readable report (TOML) to stdout with the
//! wall-clock line last, so byte-identical inputs give byte-identical reports
//! up to timing. Exit status: 0 all checks pass, 1 a check failed, 2 usage or
//! config error.

use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selfsim::config::SystemConfig;
use selfsim::expr::{parse, parse_path_literal, print};
use selfsim::graph::Graph;
use selfsim::mwifs::MwSystem;
use selfsim::render::{format_points, render_ppm, render_svg};
use selfsim::suites::{
    algebra_battery, covariance_battery, generator_battery, roundtrip_battery, tau_battery,
    toeplitz_battery, SuiteOutcome,
};

#[derive(Parser)]
#[command(
    name = "selfsim",
    version,
    about = "Exact graph-algebra identities and Mauldin-Williams fractal geometry"
)]
struct Cli {
    /// System configuration file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Seed for randomized suites; defaults to the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Tolerance or resolution; the default depends on the command.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Expansion, sampling, or coding depth; the default depends on the command.
    #[arg(long, global = true)]
    depth: Option<usize>,

    /// Output path for point clouds and images.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Image format for `fractal render`.
    #[arg(long, global = true, value_enum)]
    format: Option<ImageFormat>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ImageFormat {
    Ppm,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Check the configured graph and geometry for violations.
    Validate,
    /// Symbolic graph-algebra operations.
    Algebra {
        #[command(subcommand)]
        sub: AlgebraCmd,
    },
    /// Verification suites, exact and numerical.
    Verify {
        #[command(subcommand)]
        sub: VerifyCmd,
    },
    /// Geometric computations on the configured system.
    Fractal {
        #[command(subcommand)]
        sub: FractalCmd,
    },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Normal form of an expression, expanded to a uniform level with --depth.
    Nf { expression: String },
    /// Exact equality of two expressions.
    Eq { left: String, right: String },
    /// Randomized invariant battery on the configured graph.
    Suite,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Diagonal homomorphism: multiplicativity and edge intertwining.
    Intertwine,
    /// Toeplitz identities for the covariant pair.
    Toeplitz,
    /// Cuntz-Pimsner covariance via the edge frame.
    Covariance,
    /// Coding map equivariance on the configured geometry.
    Equivariance,
    /// Coding map surjectivity at a mesh resolution.
    Surjectivity,
}

#[derive(Subcommand)]
enum FractalCmd {
    /// Iterate the attractor and write the point cloud to --out.
    Attractor,
    /// Render the per-vertex point clouds to --out as PPM or SVG.
    Render {
        /// Image width in pixels (PPM only).
        #[arg(long, default_value_t = 800)]
        width: usize,
        /// Image height in pixels (PPM only).
        #[arg(long, default_value_t = 600)]
        height: usize,
    },
    /// Graph-directed Hausdorff dimension of the configured system.
    Dimension,
    /// Point and radius certified for a path literal such as "e1 e2 e1".
    Code { path: String },
}

/// Report under construction: header keys first, then named sections, with
/// `pass` injected after the header and `[timing]` appended last.
struct Report {
    header: Vec<String>,
    body: Vec<String>,
    in_body: bool,
}

impl Report {
    fn new(command: &str) -> Report {
        Report {
            header: vec![format!("command = {command:?}")],
            body: Vec::new(),
            in_body: false,
        }
    }

    fn kv(&mut self, key: &str, value: impl Display) {
        let line = format!("{key} = {value}");
        if self.in_body {
            self.body.push(line);
        } else {
            self.header.push(line);
        }
    }

    fn kv_str(&mut self, key: &str, value: &str) {
        self.kv(key, format_args!("{value:?}"));
    }

    fn kv_list(&mut self, key: &str, values: &[String]) {
        let items: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
        self.kv(key, format_args!("[{}]", items.join(", ")));
    }

    fn section(&mut self, name: &str) {
        self.in_body = true;
        self.body.push(String::new());
        self.body.push(format!("[{name}]"));
    }

    fn suite(&mut self, outcome: &SuiteOutcome) {
        self.section(&format!("suite.{}", outcome.name));
        self.kv("cases", outcome.cases);
        self.kv("failures", outcome.failures);
        if let Some(first) = &outcome.first_failure {
            self.kv_str("first_failure", first);
        }
    }

    /// Prints the report and returns the process exit code. The report goes
    /// out as one write, and a reader that hangs up early (broken pipe) ends
    /// the output quietly without disturbing the exit code.
    fn finish(self, pass: bool, start: Instant) -> i32 {
        let mut text = String::new();
        for line in &self.header {
            text.push_str(line);
            text.push('\n');
        }
        text.push_str(&format!("pass = {pass}\n"));
        for line in &self.body {
            text.push_str(line);
            text.push('\n');
        }
        text.push_str(&format!(
            "\n[timing]\nwall_clock_seconds = {:.6}\n",
            start.elapsed().as_secs_f64()
        ));
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(text.as_bytes());
        let _ = out.flush();
        if pass {
            0
        } else {
            1
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(std::io::stderr(), "error: {message}");
            2
        }
    };
    std::process::exit(code);
}

fn load_config(cli: &Cli) -> Result<(SystemConfig, String), String> {
    let path = cli
        .config
        .as_ref()
        .ok_or("missing required flag --config <PATH>")?;
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {shown}: {e}"))?;
    let cfg = SystemConfig::parse(&text).map_err(|e| format!("{shown}: {e}"))?;
    Ok((cfg, shown))
}

fn valid_graph(cfg: &SystemConfig) -> Result<Arc<Graph>, String> {
    let graph = cfg.build_graph().map_err(|e| e.to_string())?;
    graph.require_valid().map_err(|e| e.to_string())?;
    Ok(graph)
}

fn valid_system(cfg: &SystemConfig) -> Result<Arc<MwSystem>, String> {
    let sys = cfg.build_system().map_err(|e| e.to_string())?;
    sys.require_valid().map_err(|e| e.to_string())?;
    Ok(sys)
}

fn out_path(cli: &Cli, command: &str) -> Result<PathBuf, String> {
    cli.out
        .clone()
        .ok_or_else(|| format!("{command} requires --out <PATH>"))
}

fn execute(cli: &Cli) -> Result<i32, String> {
    let start = Instant::now();
    let (cfg, config_path) = load_config(cli)?;
    let seed = cli.seed.unwrap_or_else(|| cfg.seed());

    match &cli.command {
        Command::Validate => {
            let mut report = Report::new("validate");
            report.kv_str("config", &config_path);
            let graph = cfg.build_graph().map_err(|e| e.to_string())?;
            let graph_report = graph.validate();
            let mut pass = graph_report.ok;

            let mut geometry = None;
            if cfg.has_geometry() && graph_report.ok {
                let sys = cfg.build_system().map_err(|e| e.to_string())?;
                let state = sys.validate().clone();
                pass &= state.ok;
                geometry = Some((sys.dim(), state));
            }

            report.section("graph");
            report.kv("vertices", graph.vertices().count());
            report.kv("edges", graph.edges().count());
            report.kv("valid", graph_report.ok);
            report.kv_list("violations", &graph_report.violations);
            if let Some((dim, state)) = geometry {
                report.section("geometry");
                report.kv("dimension", dim);
                report.kv("valid", state.ok);
                report.kv_list("violations", &state.violations);
            } else if cfg.has_geometry() {
                report.section("geometry");
                report.kv_str("skipped", "graph is invalid");
            }
            Ok(report.finish(pass, start))
        }

        Command::Algebra { sub } => {
            let graph = valid_graph(&cfg)?;
            match sub {
                AlgebraCmd::Nf { expression } => {
                    let element = parse(&graph, expression).map_err(|e| e.to_string())?;
                    let level = cli.depth.unwrap_or(0);
                    let nf = element.normal_form_at_level(level);
                    let mut report = Report::new("algebra nf");
                    report.kv_str("config", &config_path);
                    report.kv_str("expression", expression);
                    report.kv("depth", level);
                    report.section("normal_form");
                    report.kv_str("text", &print(&nf.to_element()));
                    report.kv("degree_classes", nf.classes().len());
                    report.kv("terms", nf.term_count());
                    Ok(report.finish(true, start))
                }
                AlgebraCmd::Eq { left, right } => {
                    let l = parse(&graph, left).map_err(|e| e.to_string())?;
                    let r = parse(&graph, right).map_err(|e| e.to_string())?;
                    let equal = l.equals(&r).map_err(|e| e.to_string())?;
                    let mut report = Report::new("algebra eq");
                    report.kv_str("config", &config_path);
                    report.kv_str("left", left);
                    report.kv_str("right", right);
                    report.section("comparison");
                    report.kv("equal", equal);
                    Ok(report.finish(equal, start))
                }
                AlgebraCmd::Suite => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut report = Report::new("algebra suite");
                    report.kv_str("config", &config_path);
                    report.kv("seed", seed);
                    let outcomes = [
                        algebra_battery(&graph, &mut rng, 500).map_err(|e| e.to_string())?,
                        tau_battery(&graph, &mut rng, 300).map_err(|e| e.to_string())?,
                        generator_battery(&graph).map_err(|e| e.to_string())?,
                        roundtrip_battery(&graph, &mut rng, 200).map_err(|e| e.to_string())?,
                    ];
                    let pass = outcomes.iter().all(SuiteOutcome::pass);
                    for outcome in &outcomes {
                        report.suite(outcome);
                    }
                    Ok(report.finish(pass, start))
                }
            }
        }

        Command::Verify { sub } => match sub {
            VerifyCmd::Intertwine | VerifyCmd::Toeplitz | VerifyCmd::Covariance => {
                let graph = valid_graph(&cfg)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let cases = 1000;
                let (name, outcome) = match sub {
                    VerifyCmd::Intertwine => (
                        "verify intertwine",
                        tau_battery(&graph, &mut rng, cases).map_err(|e| e.to_string())?,
                    ),
                    VerifyCmd::Toeplitz => (
                        "verify toeplitz",
                        toeplitz_battery(&graph, &mut rng, cases).map_err(|e| e.to_string())?,
                    ),
                    VerifyCmd::Covariance => (
                        "verify covariance",
                        covariance_battery(&graph, &mut rng, cases).map_err(|e| e.to_string())?,
                    ),
                    _ => unreachable!(),
                };
                let mut report = Report::new(name);
                report.kv_str("config", &config_path);
                report.kv("seed", seed);
                let pass = outcome.pass();
                report.suite(&outcome);
                Ok(report.finish(pass, start))
            }
            VerifyCmd::Equivariance => {
                let sys = valid_system(&cfg)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let depth = cli.depth.unwrap_or(30);
                let tol = cli.tol.or_else(|| cfg.tol()).unwrap_or(1e-12);
                let samples = 1000;
                let rep = sys
                    .check_equivariance(samples, depth, tol, &mut rng)
                    .map_err(|e| e.to_string())?;
                let mut report = Report::new("verify equivariance");
                report.kv_str("config", &config_path);
                report.kv("seed", seed);
                report.kv("depth", depth);
                report.kv("tol", tol);
                report.section("equivariance");
                report.kv("samples", rep.samples);
                report.kv("comparisons", rep.comparisons);
                report.kv("max_discrepancy", rep.max_discrepancy);
                report.kv("allowance", rep.bound);
                Ok(report.finish(rep.pass, start))
            }
            VerifyCmd::Surjectivity => {
                let sys = valid_system(&cfg)?;
                let resolution = cli.tol.unwrap_or(0.01);
                let rep = sys
                    .check_surjectivity(resolution)
                    .map_err(|e| e.to_string())?;
                let mut report = Report::new("verify surjectivity");
                report.kv_str("config", &config_path);
                report.kv("resolution", resolution);
                report.section("surjectivity");
                report.kv("attractor_radius", rep.attractor_radius);
                report.section("vertices");
                for (name, ok, gap) in &rep.per_vertex {
                    report.kv(
                        &format!("{name:?}"),
                        format_args!("{{ pass = {ok}, max_gap = {gap} }}"),
                    );
                }
                Ok(report.finish(rep.pass, start))
            }
        },

        Command::Fractal { sub } => {
            let sys = valid_system(&cfg)?;
            match sub {
                FractalCmd::Attractor => {
                    let resolution = cli.tol.unwrap_or(0.005);
                    let out = out_path(cli, "fractal attractor")?;
                    let attr = sys.attractor(resolution).map_err(|e| e.to_string())?;
                    let defect = sys.self_similarity_defect(&attr);
                    let bound = 2.0 * attr.radius;
                    let text = format_points(sys.graph(), &attr);
                    std::fs::write(&out, text)
                        .map_err(|e| format!("writing {}: {e}", out.display()))?;
                    let mut report = Report::new("fractal attractor");
                    report.kv_str("config", &config_path);
                    report.kv("resolution", resolution);
                    report.kv_str("out", &out.display().to_string());
                    report.section("attractor");
                    report.kv("levels", attr.levels);
                    report.kv("points", attr.total_points());
                    report.kv("radius", attr.radius);
                    report.kv("self_similarity_defect", defect);
                    report.kv("defect_bound", bound);
                    Ok(report.finish(defect <= bound, start))
                }
                FractalCmd::Render { width, height } => {
                    let resolution = cli.tol.unwrap_or(0.005);
                    let out = out_path(cli, "fractal render")?;
                    let format = cli.format.unwrap_or(ImageFormat::Ppm);
                    let attr = sys.attractor(resolution).map_err(|e| e.to_string())?;
                    let mut report = Report::new("fractal render");
                    report.kv_str("config", &config_path);
                    report.kv("resolution", resolution);
                    report.kv_str("out", &out.display().to_string());
                    report.section("render");
                    report.kv("points", attr.total_points());
                    match format {
                        ImageFormat::Ppm => {
                            let img = render_ppm(&sys, &attr, *width, *height);
                            std::fs::write(&out, img.to_bytes())
                                .map_err(|e| format!("writing {}: {e}", out.display()))?;
                            report.kv_str("format", "ppm");
                            report.kv("width", img.width);
                            report.kv("height", img.height);
                        }
                        ImageFormat::Svg => {
                            let svg = render_svg(&sys, &attr);
                            std::fs::write(&out, svg)
                                .map_err(|e| format!("writing {}: {e}", out.display()))?;
                            report.kv_str("format", "svg");
                        }
                    }
                    Ok(report.finish(true, start))
                }
                FractalCmd::Dimension => {
                    let tol = cli.tol.or_else(|| cfg.tol()).unwrap_or(1e-12);
                    let value = sys.dimension(tol).map_err(|e| e.to_string())?;
                    let mut report = Report::new("fractal dimension");
                    report.kv_str("config", &config_path);
                    report.kv("tol", tol);
                    report.section("dimension");
                    report.kv("value", value);
                    Ok(report.finish(true, start))
                }
                FractalCmd::Code { path } => {
                    let literal =
                        parse_path_literal(sys.graph(), path).map_err(|e| e.to_string())?;
                    let depth = cli.depth.unwrap_or(20).max(literal.len());
                    let (point, radius) = sys.code(&literal, depth).map_err(|e| e.to_string())?;
                    let mut report = Report::new("fractal code");
                    report.kv_str("config", &config_path);
                    report.kv_str("path", path);
                    report.kv("depth", depth);
                    report.section("code");
                    let coords: Vec<String> =
                        point.iter().take(sys.dim()).map(f64::to_string).collect();
                    report.kv("point", format_args!("[{}]", coords.join(", ")));
                    report.kv("radius", radius);
                    Ok(report.finish(true, start))
                }
            }
        }
    }
}
