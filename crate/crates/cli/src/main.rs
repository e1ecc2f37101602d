use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use gridham::cover::find_initial_cover;
use gridham::fixtures;
use gridham::grid::{Grid, GridGraph};
use gridham::hamilton::{is_hamiltonian, search_all_components, ComponentResult, VerdictReason};
use gridham::height::HeightFrame;
use gridham::oracle::{enumerate_covers, min_cycles_bruteforce, z_components, DEFAULT_CAP};
use gridham::render::{render_ascii, render_svg};
use gridham::sampler::{default_component, estimate_ratio, sample, sample_hamiltonian, SamplerConfig};

#[derive(Parser)]
#[command(name = "gridham", version, about = "Hamiltonian cycles and minimal cycle covers of grid graphs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for component searches and independent chains.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Include wall-clock time in JSON output (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide Hamiltonicity; exit code 0 if Hamiltonian, 1 if not.
    Check { file: PathBuf },
    /// Fewest cycles in a cycle cover, per component and overall.
    Mincycles { file: PathBuf },
    /// Print a generated instance as a mask.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(long, default_value_t = 0, global = true)]
        seed: u64,
    },
    /// Run the row-move chain and print the final cover.
    Sample {
        file: PathBuf,
        #[command(flatten)]
        chain: ChainArgs,
        /// Stop at the first Hamiltonian cycle after burn-in.
        #[arg(long)]
        hamiltonian: bool,
    },
    /// Fraction of chain steps spent on Hamiltonian cycles.
    Estimate {
        file: PathBuf,
        #[command(flatten)]
        chain: ChainArgs,
        /// Independent chains, seeded seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        chains: u64,
    },
    /// Draw a cover with the height of every square.
    Render {
        file: PathBuf,
        #[arg(long)]
        svg: bool,
        #[arg(long, value_enum, default_value_t = Which::Minimal)]
        cover: Which,
    },
    /// Exhaustive enumeration of all cycle covers.
    Oracle {
        file: PathBuf,
        /// Largest edge count to enumerate.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Print the catalog dump instead of the summary.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Subcommand, Clone)]
enum Family {
    Rect { width: usize, height: usize },
    Aztec { n: usize },
    ChippedAztec { n: usize, k: usize },
    Tower { cols: usize },
    RandomPolyomino { cells: usize },
    Holed { max_cells: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Initial,
    Minimal,
}

#[derive(Args, Clone)]
struct ChainArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    steps: u64,
    /// Burn-in steps; defaults to 10 |F|^2.
    #[arg(long)]
    burnin: Option<u64>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

impl ChainArgs {
    fn config(&self) -> SamplerConfig {
        SamplerConfig { seed: self.seed, steps: self.steps, burn_in: self.burnin, max_restarts: self.restarts }
    }
}

#[derive(Serialize)]
struct RunResult {
    command: String,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance_hash: Option<String>,
    config: Value,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<f64>,
}

/// What a command produced: JSON payload, text rendering, exit code.
struct Output {
    config: Value,
    result: Value,
    text: String,
    code: u8,
}

fn read_graph(path: &PathBuf) -> Result<GridGraph, String> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
    };
    GridGraph::parse_mask(&text).map_err(|e| e.to_string())
}

fn instance_hash(g: &GridGraph) -> String {
    format!("{:x}", Sha256::digest(g.normalized().to_mask().as_bytes()))
}

fn grid_of(g: &GridGraph) -> Result<Grid, String> {
    Grid::new(g.clone()).map_err(|e| e.to_string())
}

fn components_json(grid: &Grid, comps: &[ComponentResult]) -> Value {
    comps
        .iter()
        .map(|c| {
            json!({
                "signature": c.signature.0,
                "minimum": c.minimum,
                "certificate": c.certificate.to_json(grid),
            })
        })
        .collect()
}

fn cmd_check(g: &GridGraph) -> Result<Output, String> {
    let verdict = is_hamiltonian(g);
    let mut result = json!({
        "hamiltonian": verdict.hamiltonian,
        "reason": verdict.reason,
        "cycle": verdict.cycle,
    });
    let mut text = format!("hamiltonian: {}\n", verdict.hamiltonian);
    match verdict.reason {
        VerdictReason::NotTwoConnected => text.push_str("reason: graph is not 2-connected\n"),
        VerdictReason::NoCover => text.push_str("reason: no cycle cover exists\n"),
        VerdictReason::MinimumCycles(m) => text.push_str(&format!("fewest cycles: {m}\n")),
    }
    if let Some(cycle) = &verdict.cycle {
        let pts: Vec<String> = cycle.iter().map(|p| format!("({},{})", p.x, p.y)).collect();
        text.push_str(&format!("cycle: {}\n", pts.join(" ")));
    }
    if let (false, Some(search)) = (verdict.hamiltonian, &verdict.search) {
        let grid = grid_of(g)?;
        result["components"] = components_json(&grid, &search.components);
    }
    Ok(Output { config: json!({}), result, text, code: if verdict.hamiltonian { 0 } else { 1 } })
}

fn cmd_mincycles(g: &GridGraph) -> Result<Output, String> {
    let grid = grid_of(g)?;
    let search = search_all_components(&grid).map_err(|e| e.to_string())?;
    let mut text = format!("fewest cycles: {}\ncomponents: {}\n", search.minimum, search.components.len());
    for c in &search.components {
        text.push_str(&format!("  signature {:?}: {} (fixed pairs {})\n", c.signature.0, c.minimum, c.certificate.r));
    }
    let result = json!({
        "minimum": search.minimum,
        "witness": search.witness.to_json(g),
        "components": components_json(&grid, &search.components),
        "component_bound": search.bound,
        "stats": search.stats,
    });
    Ok(Output { config: json!({}), result, text, code: 0 })
}

fn cmd_gen(family: &Family, seed: u64) -> Result<Output, String> {
    let (name, params, g) = match *family {
        Family::Rect { width, height } => ("rect", json!({"width": width, "height": height}), fixtures::rect(width, height)),
        Family::Aztec { n } => ("aztec", json!({"n": n}), fixtures::aztec(n)),
        Family::ChippedAztec { n, k } => ("chipped-aztec", json!({"n": n, "k": k}), fixtures::chipped_aztec(n, k, seed)),
        Family::Tower { cols } => ("tower", json!({"cols": cols}), fixtures::tower(cols)),
        Family::RandomPolyomino { cells } => ("random-polyomino", json!({"cells": cells}), fixtures::random_polyomino(cells, seed)),
        Family::Holed { max_cells } => ("holed", json!({"max_cells": max_cells}), fixtures::random_holed(max_cells, seed)),
    };
    let mask = g.map_err(|e| e.to_string())?.to_mask();
    Ok(Output {
        config: json!({"family": name, "params": params, "seed": seed}),
        result: json!({"mask": mask}),
        text: mask,
        code: 0,
    })
}

fn cmd_sample(g: &GridGraph, chain: &ChainArgs, hamiltonian: bool) -> Result<Output, String> {
    let grid = grid_of(g)?;
    let cfg = chain.config();
    let comp = default_component(&grid).map_err(|e| e.to_string())?;
    let run = if hamiltonian { sample_hamiltonian(&grid, &comp, &cfg) } else { sample(&grid, &comp, &cfg) };
    let (cover, stats) = run.map_err(|e| e.to_string())?;
    let frame = HeightFrame::new(&grid).map_err(|e| e.to_string())?;
    let text = format!("cycles: {}\n{}", cover.p(), render_ascii(&grid, &frame, &cover));
    Ok(Output {
        config: json!({"seed": cfg.seed, "steps": cfg.steps, "burn_in": cfg.burn_in_for(&grid), "hamiltonian": hamiltonian}),
        result: json!({"component": comp.0, "cover": cover.to_json(g), "run": stats}),
        text,
        code: 0,
    })
}

fn cmd_estimate(g: &GridGraph, chain: &ChainArgs, chains: u64) -> Result<Output, String> {
    use rayon::prelude::*;
    let grid = grid_of(g)?;
    let cfg = chain.config();
    let comp = default_component(&grid).map_err(|e| e.to_string())?;
    let runs: Vec<_> = (0..chains.max(1))
        .into_par_iter()
        .map(|i| estimate_ratio(&grid, &comp, &SamplerConfig { seed: cfg.seed.wrapping_add(i), ..cfg.clone() }))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let total: u64 = runs.iter().map(|(_, s)| s.steps).sum();
    let ones: u64 = runs.iter().map(|(_, s)| s.visits_p1).sum();
    let ratio = ones as f64 / total as f64;
    let text = format!("hamiltonian fraction: {ratio:.6} ({ones} of {total} steps, {} chains)\n", runs.len());
    Ok(Output {
        config: json!({"seed": cfg.seed, "steps": cfg.steps, "burn_in": cfg.burn_in_for(&grid), "chains": runs.len()}),
        result: json!({
            "component": comp.0,
            "ratio": ratio,
            "chains": runs.iter().map(|(r, s)| json!({"ratio": r, "run": s})).collect::<Vec<_>>(),
        }),
        text,
        code: 0,
    })
}

fn cmd_render(g: &GridGraph, svg: bool, which: Which) -> Result<Output, String> {
    let grid = grid_of(g)?;
    let frame = HeightFrame::new(&grid).map_err(|e| e.to_string())?;
    let cover = match which {
        Which::Initial => find_initial_cover(g).map_err(|e| e.to_string())?,
        Which::Minimal => search_all_components(&grid).map_err(|e| e.to_string())?.witness,
    };
    let text = if svg { render_svg(&grid, &frame, &cover) } else { render_ascii(&grid, &frame, &cover) };
    Ok(Output {
        config: json!({"svg": svg, "cover": if which == Which::Initial { "initial" } else { "minimal" }}),
        result: json!({"picture": text}),
        text,
        code: 0,
    })
}

fn cmd_oracle(g: &GridGraph, cap: usize, dump: bool) -> Result<Output, String> {
    let grid = grid_of(g)?;
    let cat = enumerate_covers(&grid, cap).map_err(|e| e.to_string())?;
    if dump {
        let text = cat.dump();
        return Ok(Output { config: json!({"cap": cap, "dump": true}), result: json!({"dump": text}), text, code: 0 });
    }
    let z = z_components(&grid, &cat);
    let mc = min_cycles_bruteforce(&cat, &z);
    let text = format!(
        "edges: {}\ncovers: {}\nhamiltonian cycles: {}\ncomponents: {}\nfewest cycles: {}\n",
        cat.edge_count,
        cat.len(),
        cat.hamiltonian_count(),
        z.component_count,
        mc.overall.map_or("-".to_string(), |m| m.to_string()),
    );
    Ok(Output {
        config: json!({"cap": cap}),
        result: json!({
            "edges": cat.edge_count,
            "covers": cat.len(),
            "hamiltonian_cycles": cat.hamiltonian_count(),
            "components": z.component_count,
            "minimum": mc.overall,
            "per_component": mc.per_component,
        }),
        text,
        code: 0,
    })
}

fn run(cli: &Cli) -> Result<(String, Option<String>, Output), String> {
    let graph = |path: &PathBuf| read_graph(path);
    Ok(match &cli.command {
        Command::Check { file } => {
            let g = graph(file)?;
            ("check".into(), Some(instance_hash(&g)), cmd_check(&g)?)
        }
        Command::Mincycles { file } => {
            let g = graph(file)?;
            ("mincycles".into(), Some(instance_hash(&g)), cmd_mincycles(&g)?)
        }
        Command::Gen { family, seed } => ("gen".into(), None, cmd_gen(family, *seed)?),
        Command::Sample { file, chain, hamiltonian } => {
            let g = graph(file)?;
            ("sample".into(), Some(instance_hash(&g)), cmd_sample(&g, chain, *hamiltonian)?)
        }
        Command::Estimate { file, chain, chains } => {
            let g = graph(file)?;
            ("estimate".into(), Some(instance_hash(&g)), cmd_estimate(&g, chain, *chains)?)
        }
        Command::Render { file, svg, cover } => {
            let g = graph(file)?;
            ("render".into(), Some(instance_hash(&g)), cmd_render(&g, *svg, *cover)?)
        }
        Command::Oracle { file, cap, dump } => {
            let g = graph(file)?;
            ("oracle".into(), Some(instance_hash(&g)), cmd_oracle(&g, *cap, *dump)?)
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("GRIDHAM_LOG")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let start = Instant::now();
    match run(&cli) {
        Ok((command, instance_hash, out)) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::Json => {
                    let rr = RunResult {
                        command,
                        version: env!("CARGO_PKG_VERSION"),
                        instance_hash,
                        config: out.config,
                        result: out.result,
                        timing_ms: cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
                    };
                    println!("{}", serde_json::to_string_pretty(&rr).expect("results serialize"));
                }
            }
            ExitCode::from(out.code)
        }
        Err(msg) => {
            match cli.format {
                Format::Text => eprintln!("error: {msg}"),
                Format::Json => println!("{}", json!({"error": msg})),
            }
            ExitCode::from(2)
        }
    }
}
