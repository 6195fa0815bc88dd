use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fqst::analysis::{beaded_spanning_tree, steiner_count_bound};
use fqst::document::{round12, InstanceDocument, ResultDocument, ResultKind};
use fqst::search::{search_bounds, solve_exact_with, SearchOptions};
use fqst::{algebraic, geo, svg, BoundStrategy, Error, Point};
use rand::{Rng, SeedableRng};

/// Flow-dependent quadratic Steiner trees.
#[derive(Parser)]
#[command(name = "fqst", version)]
struct Cli {
    /// Position tolerance for certificates (scaled by the instance extent).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Largest number of sources `exact` accepts.
    #[arg(long, global = true)]
    guard_n: Option<usize>,
    /// Seed for `random`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locally minimal tree for the topology given in the document.
    SolveTopology {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Globally minimum tree under the document's strategy.
    Exact {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Enumerate full topologies only (degree bound 3).
        #[arg(long)]
        full_only: bool,
    },
    /// Re-runs the certificates on a result document.
    Check { file: PathBuf },
    /// Draws a result document as SVG.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Lower and upper bounds for the document's strategy.
    Bounds { file: PathBuf },
    /// Writes a random instance with unit supplies.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Certificates(Vec<String>),
    Input(String),
    Guard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardRefusal { .. } => Failure::Guard(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn finish(doc: &ResultDocument, output: Option<&Path>) -> Result<(), Failure> {
    emit(&doc.to_json(), output)?;
    let failures = doc.certificates.failures(doc.kind);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Certificates(failures))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::SolveTopology { file, output } => {
            let doc = InstanceDocument::parse(&read(&file)?)?;
            let instance = doc.instance()?;
            let strategy = doc.strategy()?;
            let topology = doc
                .topology()?
                .ok_or_else(|| Failure::Input("solve-topology needs a document with a topology".into()))?;
            let (solver, tree) = if instance.has_unit_supplies() && topology.is_full_binary() {
                ("geometric", geo::solve_full_topology(&instance, &topology)?.tree)
            } else {
                ("algebraic", algebraic::solve_topology(&instance, &topology)?)
            };
            let res = ResultDocument::new(ResultKind::Local, doc, solver, &tree, strategy, cli.tolerance);
            finish(&res, output.as_deref())
        }
        Command::Exact { file, output, full_only } => {
            let doc = InstanceDocument::parse(&read(&file)?)?;
            let instance = doc.instance()?;
            let strategy = doc.strategy()?;
            let mut options = SearchOptions { full_only, ..SearchOptions::default() };
            if let Some(g) = cli.guard_n {
                options.guard_full = g;
                options.guard_bounded = g;
            }
            let report = solve_exact_with(&instance, strategy, &options)?;
            finish(&ResultDocument::from_search(doc, &report, cli.tolerance), output.as_deref())
        }
        Command::Check { file } => {
            let doc = ResultDocument::parse(&read(&file)?)?;
            let tree = doc.tree()?;
            let strategy = doc.instance.strategy()?;
            let report = fqst::document::CertificateReport::compute(&tree, strategy, cli.tolerance);
            println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            let mut failures = report.failures(doc.kind);
            let cost = tree.cost();
            if (cost - doc.cost).abs() > cli.tolerance.max(1e-9) * cost.max(1.0) {
                failures.push(format!("stored cost {} differs from recomputed {cost}", doc.cost));
            }
            if failures.is_empty() {
                eprintln!("all certificates pass");
                Ok(())
            } else {
                Err(Failure::Certificates(failures))
            }
        }
        Command::Render { file, output } => {
            let doc = ResultDocument::parse(&read(&file)?)?;
            emit(&svg::render(&doc.tree()?), Some(&output))
        }
        Command::Bounds { file } => {
            let doc = InstanceDocument::parse(&read(&file)?)?;
            let instance = doc.instance()?;
            let strategy = doc.strategy()?;
            let b = search_bounds(&instance, strategy)?;
            let mut out = serde_json::json!({
                "strategy": strategy,
                "lower_bound": round12(b.lower),
                "max_steiner": b.max_steiner,
            });
            if let BoundStrategy::NodeWeighted(c) = strategy {
                let bst = beaded_spanning_tree(&instance, c)?;
                out["spanning_tree_bound"] = round12(bst.objective).into();
                out["spanning_tree_beads"] = bst.beads.total().into();
                out["steiner_count_bound"] = steiner_count_bound(&instance, c)?.into();
            }
            emit(&serde_json::to_string_pretty(&out).expect("json"), None)
        }
        Command::Random { n, output } => {
            if n == 0 {
                return Err(Failure::Input("--n must be at least 1".into()));
            }
            let mut rng = rand::rngs::StdRng::seed_from_u64(cli.seed);
            let mut point = || Point::new(round12(rng.gen_range(0.0..10.0)), round12(rng.gen_range(0.0..10.0)));
            let sources: Vec<Point> = (0..n).map(|_| point()).collect();
            let mut sink = point();
            while sources.contains(&sink) {
                sink = point();
            }
            let doc = InstanceDocument {
                version: fqst::document::VERSION,
                sources,
                supplies: None,
                sink,
                strategy: Some(BoundStrategy::DegreeBound(3)),
                topology: None,
            };
            emit(&doc.to_json(), output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Certificates(list)) => {
            for f in list {
                eprintln!("certificate failure: {f}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("refused: {msg}");
            ExitCode::from(3)
        }
    }
}
