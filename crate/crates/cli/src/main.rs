use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use flowtoric::flowcore::json::{parse_polytope, GraphSpecJson, Polytope};
use flowtoric::flowcore::{enumerate_nonempty_cells, maximal_cells, Cell, FlowPolytopeSpec, DEFAULT_POINT_CAP};
use flowtoric::markov::{enumerate_fiber, fiber_connected, fiber_start, generate_moves_deg23, FiberWalk, DEFAULT_FIBER_CAP};
use flowtoric::netflow::bvn_decompose;
use flowtoric::order::{identity_ranking, subdivide_and_pull_order};
use flowtoric::toric::{buchberger, max_degree, BuchbergerOptions, ExponentVector, Status};
use flowtoric::transform::{bipartize, verify_semigroup_iso};
use flowtoric::triangulate::{global_triangulation, is_unimodular};
use flowtoric::worstcase::{birkhoff_family, covering_certificate, smooth_shift, transport_family};
use flowtoric::{verify, Error, PointList};

#[derive(Parser, Debug)]
#[command(name = "flowtoric", version, about = "Toric ideals of flow and transportation polytopes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Maximum number of lattice points (and cells) to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_POINT_CAP, value_parser = positive)]
    cap_points: usize,
    /// Wall-clock budget for Gröbner basis computations.
    #[arg(long, global = true, value_parser = positive_u64)]
    cap_seconds: Option<u64>,
    /// Skip S-pairs above this degree; the basis is then reported truncated.
    #[arg(long, global = true, value_parser = positive_u32)]
    degree_cap: Option<u32>,
    /// Seed for every randomized step; echoed in the output.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice points of a polytope.
    Points(Input),
    /// Unit cells of the subdivision.
    Cells {
        #[command(flatten)]
        input: Input,
        /// List every nonempty cell, not only the maximal ones.
        #[arg(long)]
        all: bool,
    },
    /// Write a flow of total k as a sum of k lattice points.
    Decompose {
        #[command(flatten)]
        input: Input,
        /// Arc values, in arc order (row-major for tables).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        flow: Vec<i64>,
        #[arg(long)]
        k: usize,
    },
    /// Reduced Gröbner basis under the subdivide-and-pull order.
    Gb(Input),
    /// Subdivide-and-pull triangulation.
    Triangulate(Input),
    /// Degree-2 and degree-3 Markov moves.
    Moves(Input),
    /// Connectivity of one fiber under the generated moves.
    FiberCheck {
        #[command(flatten)]
        fiber: FiberArgs,
        /// Only use moves up to this degree.
        #[arg(long, default_value_t = 3)]
        max_move_degree: u32,
    },
    /// Random walk on one fiber.
    Sample {
        #[command(flatten)]
        fiber: FiberArgs,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
    },
    /// Explicit high-degree Gröbner basis elements.
    Worstcase(WorstArgs),
    /// Split a network into a bipartite one with the same toric ideal.
    Bipartize {
        #[command(flatten)]
        input: Input,
        /// Also check the semigroup isomorphism up to this degree.
        #[arg(long)]
        check: Option<usize>,
    },
    /// Run the acceptance criteria.
    VerifyAll {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Polytope JSON file, or `-` for stdin.
    input: PathBuf,
}

#[derive(Args, Debug)]
struct FiberArgs {
    #[command(flatten)]
    input: Input,
    /// Fiber image in point coordinates.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    target: Vec<i64>,
    #[arg(long)]
    k: usize,
}

#[derive(Args, Debug)]
struct WorstArgs {
    /// The Birkhoff polytope of 2n × 2n permutation matrices.
    #[arg(long, value_name = "N", group = "family", required_unless_present = "transport")]
    birkhoff: Option<usize>,
    /// The m × n transportation family.
    #[arg(long, num_args = 2, value_names = ["M", "N"], group = "family")]
    transport: Option<Vec<usize>>,
    /// Shift the transportation family to smooth margins.
    #[arg(long, requires = "transport")]
    smooth: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive(s).map(|v| v as u64)
}

fn positive_u32(s: &str) -> Result<u32, String> {
    positive(s).and_then(|v| u32::try_from(v).map_err(|e| e.to_string()))
}

enum Failure {
    Input(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// A finished result: the JSON payload and whether every check passed.
struct Outcome {
    body: Value,
    passed: bool,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome { body, passed: true }
    }
}

fn read_polytope(input: &Input) -> Result<Polytope, Failure> {
    let text = if input.input == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map(|_| text)
    } else {
        std::fs::read_to_string(&input.input)
    }
    .map_err(|e| Failure::Input(format!("{}: {e}", input.input.display())))?;
    Ok(parse_polytope(&text)?)
}

fn monomial(e: &ExponentVector) -> Vec<[u64; 2]> {
    e.iter().map(|(i, m)| [i as u64, m as u64]).collect()
}

fn cell_json(c: &Cell, spec: &FlowPolytopeSpec, cap: usize) -> Result<Value, Failure> {
    let flows = c.flows(cap)?;
    let points: Vec<Vec<i64>> = flows.iter().map(|f| spec.embed(f)).collect();
    Ok(json!({ "offset": c.offset(), "points": points }))
}

fn gb_options(g: &Global) -> BuchbergerOptions {
    BuchbergerOptions {
        degree_cap: g.degree_cap,
        time_cap: g.cap_seconds.map(Duration::from_secs),
        shuffle_seed: g.seed,
    }
}

fn run(cmd: &Command, g: &Global) -> Result<Outcome, Failure> {
    let cap = g.cap_points;
    match cmd {
        Command::Points(input) => {
            let spec = read_polytope(input)?.flow_spec();
            let points = spec.lattice_points(cap)?;
            Ok(Outcome::ok(json!({ "count": points.len(), "points": points.points() })))
        }
        Command::Cells { input, all } => {
            let spec = read_polytope(input)?.flow_spec();
            let cells = if *all { enumerate_nonempty_cells(&spec, cap)? } else { maximal_cells(&spec, cap)? };
            let list = cells.iter().map(|c| cell_json(c, &spec, cap)).collect::<Result<Vec<_>, _>>()?;
            Ok(Outcome::ok(json!({ "maximal_only": !all, "count": list.len(), "cells": list })))
        }
        Command::Decompose { input, flow, k } => {
            let spec = read_polytope(input)?.flow_spec();
            let d = bvn_decompose(&spec, flow, *k)?;
            let parts: Vec<&[i64]> = d.parts.iter().map(|p| p.values()).collect();
            let passed = d.sum() == *flow;
            Ok(Outcome { body: json!({ "k": k, "flow": flow, "parts": parts, "sum_matches": passed }), passed })
        }
        Command::Gb(input) => {
            let spec = read_polytope(input)?.flow_spec();
            let points = spec.lattice_points(cap)?;
            let order = subdivide_and_pull_order(&points, &identity_ranking(points.len()))?;
            let gb = buchberger(&points, &order, &gb_options(g))?;
            if gb.status == Status::TimedOut {
                return Err(Failure::Cap(format!("Gröbner basis exceeded {} s", g.cap_seconds.unwrap_or(0))));
            }
            let elements: Vec<Value> = gb
                .elements
                .iter()
                .map(|b| json!({ "degree": b.degree(), "lead": monomial(&b.lead), "trail": monomial(&b.trail) }))
                .collect();
            let degree = if gb.is_complete() { Some(max_degree(&gb)?) } else { None };
            Ok(Outcome::ok(json!({
                "points": points.points(),
                "ranking": order.ranking(),
                "status": gb.status,
                "reduced": gb.reduced,
                "max_degree": degree,
                "elements": elements,
            })))
        }
        Command::Triangulate(input) => {
            let spec = read_polytope(input)?.flow_spec();
            let points = spec.lattice_points(cap)?;
            let (t, cells) = global_triangulation(&spec, &points, &identity_ranking(points.len()), cap)?;
            Ok(Outcome::ok(json!({
                "points": points.points(),
                "dimension": t.dimension,
                "cells": cells,
                "simplices": t.simplices,
                "unimodular": is_unimodular(&t),
            })))
        }
        Command::Moves(input) => {
            let spec = read_polytope(input)?.flow_spec();
            let points = spec.lattice_points(cap)?;
            let moves = generate_moves_deg23(&spec, &points, cap)?;
            let list: Vec<Value> = moves
                .moves
                .iter()
                .map(|b| json!({ "degree": b.degree(), "lead": monomial(&b.lead), "trail": monomial(&b.trail) }))
                .collect();
            Ok(Outcome::ok(json!({
                "points": points.points(),
                "degree2": moves.count_of_degree(2),
                "degree3": moves.count_of_degree(3),
                "moves": list,
            })))
        }
        Command::FiberCheck { fiber, max_move_degree } => {
            let (spec, points) = fiber_setup(fiber, cap)?;
            let all = generate_moves_deg23(&spec, &points, cap)?;
            let moves = flowtoric::markov::MoveSet::new(all.moves.into_iter().filter(|m| m.degree() <= *max_move_degree));
            let f = enumerate_fiber(&points, &fiber.target, fiber.k, DEFAULT_FIBER_CAP.max(cap))?;
            let c = fiber_connected(&f, &moves);
            let summary = if c.connected {
                "connected".to_string()
            } else {
                format!("disconnected, {} components", c.components.len())
            };
            let elements: Vec<Vec<[u64; 2]>> = f.elements.iter().map(monomial).collect();
            Ok(Outcome::ok(json!({
                "target": fiber.target,
                "k": fiber.k,
                "max_move_degree": max_move_degree,
                "moves": moves.len(),
                "fiber_size": f.len(),
                "connected": c.connected,
                "components": c.components,
                "summary": summary,
                "elements": elements,
            })))
        }
        Command::Sample { fiber, steps, burn_in } => {
            let seed = g.seed.ok_or_else(|| Failure::Input("sample requires --seed".into()))?;
            let (spec, points) = fiber_setup(fiber, cap)?;
            let moves = generate_moves_deg23(&spec, &points, cap)?;
            let start = fiber_start(&spec, &points, &fiber.target, fiber.k)?;
            let mut walk = FiberWalk::new(&points, &moves, start.clone(), seed);
            for _ in 0..*burn_in {
                walk.step();
            }
            let mut visits: std::collections::BTreeMap<ExponentVector, usize> = Default::default();
            for _ in 0..*steps {
                *visits.entry(walk.step().clone()).or_default() += 1;
            }
            let visits: Vec<Value> = visits.iter().map(|(u, n)| json!({ "state": monomial(u), "count": n })).collect();
            Ok(Outcome::ok(json!({
                "target": fiber.target,
                "k": fiber.k,
                "steps": steps,
                "burn_in": burn_in,
                "start": monomial(&start),
                "final": monomial(walk.state()),
                "visits": visits,
            })))
        }
        Command::Worstcase(w) => {
            let inst = match (w.birkhoff, &w.transport) {
                (Some(n), _) => birkhoff_family(n)?,
                (None, Some(mn)) => {
                    let base = transport_family(mn[0], mn[1])?;
                    if w.smooth {
                        smooth_shift(&base)?
                    } else {
                        base
                    }
                }
                (None, None) => return Err(Failure::Input("give --birkhoff or --transport".into())),
            };
            let verified = inst.verify();
            let covering = covering_certificate(&inst);
            let initial = inst.lead_is_initial();
            let passed = verified.is_ok() && covering.passed && initial;
            Ok(Outcome {
                body: json!({
                    "instance": inst,
                    "degree": inst.degree(),
                    "claimed_degree": inst.claimed_degree(),
                    "verification": {
                        "identity": verified.err().map(|e| e.to_string()).unwrap_or_else(|| "ok".into()),
                        "lead_is_initial": initial,
                        "covering": covering,
                        "passed": passed,
                    },
                }),
                passed,
            })
        }
        Command::Bipartize { input, check } => {
            let spec = read_polytope(input)?.flow_spec();
            let r = bipartize(&spec)?;
            let report = check.map(|k| verify_semigroup_iso(&r, k, cap)).transpose()?;
            let passed = report.as_ref().is_none_or(|r| r.passed);
            Ok(Outcome {
                body: json!({
                    "capacity": r.capacity,
                    "spec": GraphSpecJson::from(&r.spec),
                    "isomorphism": report,
                }),
                passed,
            })
        }
        Command::VerifyAll { only } => {
            let reports = match only {
                Some(id) => vec![verify::run_one(*id).ok_or_else(|| Failure::Input(format!("no criterion {id}")))?],
                None => verify::run_all(),
            };
            for r in &reports {
                eprintln!("{r}");
            }
            let passed = reports.iter().all(|r| r.passed);
            let count = reports.iter().filter(|r| r.passed).count();
            Ok(Outcome {
                body: json!({ "passed": count, "total": reports.len(), "criteria": reports }),
                passed,
            })
        }
    }
}

fn fiber_setup(f: &FiberArgs, cap: usize) -> Result<(FlowPolytopeSpec, PointList), Failure> {
    let spec = read_polytope(&f.input)?.flow_spec();
    let points = spec.lattice_points(cap)?;
    if f.target.len() != points.dimension() {
        return Err(Failure::Input(format!(
            "target has {} coordinates, points have {}",
            f.target.len(),
            points.dimension()
        )));
    }
    if f.k == 0 {
        return Err(Failure::Input("k must be positive".into()));
    }
    Ok((spec, points))
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Points(_) => "points",
        Command::Cells { .. } => "cells",
        Command::Decompose { .. } => "decompose",
        Command::Gb(_) => "gb",
        Command::Triangulate(_) => "triangulate",
        Command::Moves(_) => "moves",
        Command::FiberCheck { .. } => "fiber-check",
        Command::Sample { .. } => "sample",
        Command::Worstcase(_) => "worstcase",
        Command::Bipartize { .. } => "bipartize",
        Command::VerifyAll { .. } => "verify-all",
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    seed: Option<u64>,
    version: &'a str,
    passed: bool,
    result: Value,
}

/// Write next to the destination, then rename over it, so a failed run
/// never leaves a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let res = std::fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| std::fs::rename(&tmp, path));
    if res.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    res
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli.command, &cli.global) {
        Ok(o) => o,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    let env = Envelope {
        command: command_name(&cli.command),
        seed: cli.global.seed,
        version: env!("CARGO_PKG_VERSION"),
        passed: outcome.passed,
        result: outcome.body,
    };
    let mut bytes = serde_json::to_vec_pretty(&env).expect("JSON values always serialize");
    bytes.push(b'\n');
    let written = match &cli.global.out {
        Some(path) => write_atomic(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
