use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use tbdag::belief_game::{make_belief_game, NODE_BUDGET};
use tbdag::game::{analyze, binarize_actions, parse_game, serialize_game_with_extras, Game, Side, SplitMode};
use tbdag::manifest::RunManifest;
use tbdag::solver::{
    dag_best_response, enumeration_oracle, parse_realization, solve_with, strategy_json, write_csv,
    LogPoint, Setup, SolveConfig, UpdateMode, ENUMERATION_BUDGET,
};
use tbdag::tbdag::{
    belief_infosets, build_tbdag, check_size_bounds, num_prescriptions, BuildOptions, TbDag, EDGE_BUDGET, FANOUT_CAP,
};
use tbdag::zoo::{generate, preset, Family, Teams, ZooSpec};

/// `println!` that exits quietly when the reader hangs up.
macro_rules! out {
    ($($arg:tt)*) => {{
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("writing to stdout: {e}");
        }
    }};
}

#[derive(Parser)]
#[command(name = "tbdag", version, about = "Team belief DAG construction and equilibrium solving")]
struct Cli {
    /// Print a single JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a game from a family (kuhn, leduc, dice, fig2, fig8, fig9, worst-case) or preset name.
    Gen(GenArgs),
    /// Structural report per side.
    Info(InfoArgs),
    /// Build TB-DAGs and print their sizes.
    Build(BuildArgs),
    /// Build the belief game and print its size.
    BeliefGame(BeliefArgs),
    /// Run self-play to a target saddle gap.
    Solve(SolveArgs),
    /// Compare DAG best responses against brute-force enumeration.
    OracleCheck(OracleArgs),
    /// Size and timing table over a list of games.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Obs,
    Pub,
}

impl From<SplitArg> for SplitMode {
    fn from(s: SplitArg) -> Self {
        match s {
            SplitArg::Obs => SplitMode::Observation,
            SplitArg::Pub => SplitMode::Public,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Max,
    Min,
    Both,
}

impl SideArg {
    fn sides(self) -> Vec<Side> {
        match self {
            SideArg::Max => vec![Side::Max],
            SideArg::Min => vec![Side::Min],
            SideArg::Both => Side::BOTH.to_vec(),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Family name or preset such as 3K3[1,3] or wc-k1-b2-d5.
    family: String,
    /// Players.
    #[arg(short = 'n', long)]
    players: Option<u32>,
    /// Ranks.
    #[arg(short = 'r', long)]
    ranks: Option<u32>,
    /// Bets (leduc) or branching factor (worst-case).
    #[arg(short = 'b', long)]
    b: Option<u32>,
    /// Suits.
    #[arg(short = 's', long)]
    suits: Option<u32>,
    /// Die faces.
    #[arg(long)]
    faces: Option<u32>,
    /// Information complexity (worst-case).
    #[arg(short = 'k', long)]
    k: Option<u32>,
    /// Depth (worst-case).
    #[arg(short = 'd', long)]
    depth: Option<u32>,
    /// Number of values (fig9).
    #[arg(short = 'c', long)]
    c: Option<u32>,
    /// Comma-separated MAX team (1-based players).
    #[arg(long, value_delimiter = ',')]
    team_max: Vec<u32>,
    /// Comma-separated MIN team.
    #[arg(long, value_delimiter = ',')]
    team_min: Vec<u32>,
    /// Output path; defaults to stdout.
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    /// Game file or preset name.
    game: String,
}

#[derive(Args)]
struct DagFlags {
    #[arg(long, value_enum, default_value = "obs")]
    split: SplitArg,
    /// Skip the terminal-merge and splice reductions.
    #[arg(long)]
    no_reduce: bool,
    /// Edge budget per side.
    #[arg(long, default_value_t = EDGE_BUDGET)]
    budget: usize,
    /// Largest number of infosets allowed at one belief.
    #[arg(long, default_value_t = FANOUT_CAP)]
    fanout_cap: usize,
}

impl DagFlags {
    fn options(&self) -> BuildOptions {
        BuildOptions {
            split: self.split.into(),
            reduce: !self.no_reduce,
            edge_budget: self.budget,
            fanout_cap: self.fanout_cap,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    game: String,
    #[arg(long, value_enum, default_value = "both")]
    side: SideArg,
    #[command(flatten)]
    dag: DagFlags,
    /// Split every node into binary choices first.
    #[arg(long)]
    binarize: bool,
    /// Write the DAG(s) as JSON.
    #[arg(long)]
    dump_dag: Option<PathBuf>,
}

#[derive(Args)]
struct BeliefArgs {
    game: String,
    #[arg(long, value_enum, default_value = "obs")]
    split: SplitArg,
    /// Node budget.
    #[arg(long, default_value_t = NODE_BUDGET)]
    budget: usize,
    /// Write the belief game as JSON.
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverFlags {
    #[arg(long, default_value = "pcfr+")]
    algo: String,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: u64,
    #[arg(long, default_value_t = 10)]
    log_every: u64,
    /// simultaneous or alternating.
    #[arg(long, default_value = "simultaneous")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    dag: DagFlags,
}

impl SolverFlags {
    fn config(&self) -> Result<SolveConfig> {
        let o = self.dag.options();
        Ok(SolveConfig {
            algorithm: self.algo.parse()?,
            eps: self.eps,
            max_iters: self.max_iters,
            log_every: self.log_every,
            mode: self.mode.parse::<UpdateMode>()?,
            seed: self.seed,
            split: o.split,
            reduce: o.reduce,
            edge_budget: o.edge_budget,
            fanout_cap: o.fanout_cap,
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    game: String,
    #[command(flatten)]
    solver: SolverFlags,
    /// Write the convergence log as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write both average strategies as JSON.
    #[arg(long)]
    strategy_out: Option<PathBuf>,
    /// Include behavioral probabilities per decision point.
    #[arg(long)]
    behavioral: bool,
    /// Print log points while solving.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Args)]
struct OracleArgs {
    game: String,
    /// Strategy file from `solve --strategy-out` (either one side or both).
    /// Without it, the game is solved first.
    #[arg(long)]
    avg: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Cap on enumerated pure strategies.
    #[arg(long, default_value_t = ENUMERATION_BUDGET)]
    oracle_budget: u64,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct BenchArgs {
    /// Games to run (files or presets).
    #[arg(long, num_args = 1.., default_values = ["fig2", "2K3", "2K4", "2D2", "3K3[1,2]", "3K3[1,3]", "3K3[2,3]", "fig8", "fig9-C6"])]
    games: Vec<String>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Write the table as CSV.
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

struct Loaded {
    game: Game,
    bytes: Vec<u8>,
}

fn load(spec: &str) -> Result<Loaded> {
    let path = Path::new(spec);
    if path.exists() {
        let bytes = fs::read(path).with_context(|| format!("reading {spec}"))?;
        let text = String::from_utf8(bytes.clone()).context("game file is not UTF-8")?;
        return Ok(Loaded { game: parse_game(&text)?, bytes });
    }
    let zoo = preset(spec).with_context(|| format!("{spec} is neither a file nor a preset"))?;
    let bytes = serde_json::to_vec(&zoo)?;
    Ok(Loaded { game: generate(&zoo)?, bytes })
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(json_mode: bool, mut manifest: RunManifest, mut doc: Value, text: impl FnOnce()) {
    manifest.finish();
    if json_mode {
        doc["manifest"] = manifest.to_json();
        out!("{doc}");
    } else {
        text();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let budget = e.downcast_ref::<tbdag::Error>().is_some_and(|e| e.is_budget());
            ExitCode::from(if budget { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let argv: Vec<String> = std::env::args().collect();
    let j = cli.json;
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a, j, argv),
        Cmd::Info(a) => cmd_info(a, j, argv),
        Cmd::Build(a) => cmd_build(a, j, argv),
        Cmd::BeliefGame(a) => cmd_belief_game(a, j, argv),
        Cmd::Solve(a) => cmd_solve(a, j, argv),
        Cmd::OracleCheck(a) => cmd_oracle(a, j, argv),
        Cmd::Bench(a) => cmd_bench(a, j, argv),
    }
}

fn gen_spec(a: &GenArgs) -> Result<ZooSpec> {
    let family = match a.family.parse::<Family>() {
        Ok(f) => f,
        Err(_) => return Ok(preset(&a.family)?),
    };
    let mut s = ZooSpec::new(family);
    match family {
        Family::Kuhn => {
            s.players = a.players.unwrap_or(2);
            s.ranks = a.ranks.unwrap_or(s.players + 1);
        }
        Family::Leduc => {
            s.players = a.players.unwrap_or(2);
            s.bets = a.b.unwrap_or(1);
            s.ranks = a.ranks.unwrap_or(3);
            s.suits = a.suits.unwrap_or(2);
        }
        Family::LiarsDice => {
            s.players = a.players.unwrap_or(2);
            s.faces = a.faces.unwrap_or(2);
        }
        Family::WorstCase => {
            s.k = a.k.unwrap_or(1);
            s.branching = a.b.unwrap_or(2);
            s.depth = a.depth.unwrap_or(5);
        }
        Family::InflationCounterexampleFig9 => s.c = a.c.unwrap_or(6),
        Family::SignalingFig2 | Family::PublicCounterexampleFig8 => {}
    }
    s.teams = Teams { max: a.team_max.clone(), min: a.team_min.clone() };
    Ok(s)
}

fn size_line(g: &Game) -> Value {
    json!({
        "nodes": g.num_nodes(),
        "terminals": g.terminals().len(),
        "infosets_max": g.side_infosets(Side::Max).len(),
        "infosets_min": g.side_infosets(Side::Min).len(),
        "branching": g.branching(),
        "depth": g.depth(),
    })
}

fn cmd_gen(a: GenArgs, j: bool, argv: Vec<String>) -> Result<()> {
    let spec = gen_spec(&a)?;
    let g = generate(&spec)?;
    let manifest = RunManifest::new("gen", argv).with_input(&serde_json::to_vec(&spec)?);
    let mut extra = Map::new();
    extra.insert("manifest".into(), manifest.to_json());
    extra.insert("spec".into(), serde_json::to_value(&spec)?);
    let text = serialize_game_with_extras(&g, extra);
    let sizes = size_line(&g);
    match &a.out {
        Some(p) => write_out(p, &text)?,
        None if !j => out!("{text}"),
        None => {}
    }
    let mut doc = json!({"sizes": sizes});
    if j && a.out.is_none() {
        doc["game"] = serde_json::from_str(&text)?;
    }
    emit(j, manifest, doc, || {
        eprintln!(
            "|H|={} |Z|={} |I_MAX|={} |I_MIN|={} b={} d={}",
            sizes["nodes"], sizes["terminals"], sizes["infosets_max"], sizes["infosets_min"], sizes["branching"], sizes["depth"]
        )
    });
    Ok(())
}

fn cmd_info(a: InfoArgs, j: bool, argv: Vec<String>) -> Result<()> {
    let l = load(&a.game)?;
    let g = &l.game;
    let manifest = RunManifest::new("info", argv).with_input(&l.bytes);
    let b = g.branching();
    let mut sides = Vec::new();
    for side in Side::BOTH {
        let an = analyze(g, side)?;
        // Largest prescription fan-out over the TB-DAG's beliefs.
        let fanout = build_tbdag(g, &an, BuildOptions::default()).map(|dag| {
            let mut best = (0usize, Vec::new());
            for s in 0..dag.num_dec() as u32 {
                let f = num_prescriptions(g, &belief_infosets(g, side, dag.belief(s))).unwrap_or(usize::MAX);
                if f > best.0 {
                    best = (f, dag.belief(s).to_vec());
                }
            }
            best
        });
        let (fan, at) = match fanout {
            Ok(x) => (json!(x.0), json!(x.1)),
            Err(e) => (json!(null), json!(e.to_string())),
        };
        sides.push(json!({
            "side": side.name(),
            "players": g.team(side),
            "infosets": g.side_infosets(side).len(),
            "sequences": an.view().num_sequences(),
            "perfect_recall": an.perfect_recall(),
            "action_recall": an.action_recall(),
            "public_states": an.num_public_states(),
            "k": an.k(),
            "kappa": an.kappa(),
            "max_fanout": fan,
            "max_fanout_belief": at,
            "fanout_bound": (b as u64 + 1).checked_pow(an.k() as u32),
        }));
    }
    let doc = json!({"game": size_line(g), "sides": sides});
    emit(j, manifest, doc.clone(), || {
        let s = &doc["game"];
        out!("|H|={} |Z|={} b={} d={}", s["nodes"], s["terminals"], s["branching"], s["depth"]);
        for s in &sides {
            out!(
                "{:<4} players={} |I|={} |Seq|={} perfect_recall={} action_recall={} public_states={} k={} kappa={} max_fanout={} at belief {} fanout_bound=(b+1)^k={}",
                s["side"].as_str().unwrap(),
                s["players"],
                s["infosets"],
                s["sequences"],
                s["perfect_recall"],
                s["action_recall"],
                s["public_states"],
                s["k"],
                s["kappa"],
                s["max_fanout"],
                s["max_fanout_belief"],
                s["fanout_bound"],
            );
        }
    });
    Ok(())
}

fn cmd_build(a: BuildArgs, j: bool, argv: Vec<String>) -> Result<()> {
    let l = load(&a.game)?;
    let manifest = RunManifest::new("build", argv).with_input(&l.bytes);
    let log_actions = (l.game.branching().max(2) as f64).log2();
    let g = if a.binarize { binarize_actions(&l.game)? } else { l.game };
    let mut rows = Vec::new();
    let mut dumps = Vec::new();
    for side in a.side.sides() {
        let t = Instant::now();
        let an = analyze(&g, side)?;
        let dag = build_tbdag(&g, &an, a.dag.options())?;
        let ms = t.elapsed().as_secs_f64() * 1e3;
        let report = check_size_bounds(&dag, &g, &an, log_actions);
        if !report.holds {
            anyhow::bail!("edge bound violated on {}: {} > {}", side.name(), report.edges, report.bound);
        }
        rows.push(json!({
            "side": side.name(),
            "decision_points": dag.stats.num_dec,
            "observation_points": dag.stats.num_obs,
            "edges": dag.stats.edges,
            "max_belief": dag.stats.max_belief,
            "max_fanout": dag.stats.max_fanout,
            "k": an.k(),
            "bound": report.bound,
            "slack": report.slack,
            "binary_ratio": report.binary_ratio,
            "build_ms": ms,
        }));
        if a.dump_dag.is_some() {
            dumps.push(dag.to_json(&g));
        }
    }
    if let Some(p) = &a.dump_dag {
        let doc = json!({"manifest": manifest.to_json(), "dags": dumps});
        write_out(p, &serde_json::to_string(&doc)?)?;
    }
    let doc = json!({"nodes": g.num_nodes(), "sides": rows});
    emit(j, manifest, doc, || {
        out!("{:<4} {:>10} {:>10} {:>12} {:>6} {:>8} {:>3} {:>12} {:>10} {:>10}", "side", "|D|", "|O|", "E", "maxB", "fanout", "k", "bound", "slack", "ms");
        for r in &rows {
            out!(
                "{:<4} {:>10} {:>10} {:>12} {:>6} {:>8} {:>3} {:>12.4e} {:>10.3e} {:>10.1}",
                r["side"].as_str().unwrap(),
                r["decision_points"].to_string(),
                r["observation_points"].to_string(),
                r["edges"].to_string(),
                r["max_belief"].to_string(),
                r["max_fanout"].to_string(),
                r["k"].to_string(),
                r["bound"].as_f64().unwrap(),
                r["slack"].as_f64().unwrap(),
                r["build_ms"].as_f64().unwrap(),
            );
        }
    });
    Ok(())
}

fn cmd_belief_game(a: BeliefArgs, j: bool, argv: Vec<String>) -> Result<()> {
    let l = load(&a.game)?;
    let g = &l.game;
    let mut manifest = RunManifest::new("belief-game", argv).with_input(&l.bytes);
    let an = [analyze(g, Side::Max)?, analyze(g, Side::Min)?];
    let bg = make_belief_game(g, [&an[0], &an[1]], a.split.into(), a.budget)?;
    let st = bg.stats();
    if let Some(p) = &a.out {
        let mut doc: Value = serde_json::from_str(&bg.to_json())?;
        manifest.finish();
        doc["manifest"] = manifest.to_json();
        write_out(p, &doc.to_string())?;
    }
    let doc = serde_json::to_value(st)?;
    emit(j, manifest, doc, || {
        out!(
            "nodes={} compact_nodes={} terminals={} infosets MAX={} MIN={} sequences MAX={} MIN={} depth={}",
            st.nodes, st.compact_nodes, st.terminals, st.infosets_max, st.infosets_min, st.sequences_max, st.sequences_min, st.depth
        )
    });
    Ok(())
}

fn print_point(p: &LogPoint) {
    out!(
        "iter {:>7}  gap {:.3e}  br_max {:+.6}  br_min {:+.6}  value {:+.6}  bound {:.3e}  {:.1} ms",
        p.iter, p.gap, p.br_max, p.br_min, p.value, p.bound, p.time_ms
    );
}

fn cmd_solve(a: SolveArgs, j: bool, argv: Vec<String>) -> Result<()> {
    let l = load(&a.game)?;
    let g = &l.game;
    let manifest = RunManifest::new("solve", argv).with_input(&l.bytes);
    let config = a.solver.config()?;
    config.validate()?;
    let t = Instant::now();
    let setup = Setup::new(g, config.build_options())?;
    let init_ms = t.elapsed().as_secs_f64() * 1e3;
    let verbose = a.verbose && !j;
    let mut report = solve_with(g, &setup, &config, |p| {
        if verbose {
            print_point(p)
        }
    })?;
    report.init_ms = init_ms;
    if let Some(p) = &a.csv {
        let mut f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        write_csv(&mut f, &report.log, Some(&manifest.to_line()))?;
        f.flush()?;
    }
    if let Some(p) = &a.strategy_out {
        let doc = json!({
            "manifest": manifest.to_json(),
            "strategies": [
                strategy_json(g, &setup.dags[0], &report.x_flow, a.behavioral),
                strategy_json(g, &setup.dags[1], &report.y_flow, a.behavioral),
            ],
        });
        write_out(p, &serde_json::to_string(&doc)?)?;
    }
    let doc = json!({
        "algorithm": report.algorithm,
        "mode": report.mode,
        "iterations": report.iterations,
        "converged": report.converged,
        "gap": report.gap,
        "value": report.value,
        "init_ms": report.init_ms,
        "solve_ms": report.solve_ms,
        "dag_edges": report.dag_edges,
        "log": report.log,
    });
    emit(j, manifest, doc, || {
        if !verbose {
            if let Some(p) = report.log.last() {
                print_point(p);
            }
        }
        out!(
            "{} after {} iterations: value {:+.6} gap {:.3e} (init {:.1} ms, solve {:.1} ms)",
            if report.converged { "converged" } else { "stopped" },
            report.iterations,
            report.value,
            report.gap,
            report.init_ms,
            report.solve_ms
        );
    });
    Ok(())
}

/// Oracle and DAG best-response values of the side opposing `fixed`.
fn oracle_row(g: &Game, dags: &[TbDag; 2], fixed: Side, realization: &[f64], budget: u64) -> Result<Value> {
    let responder = match fixed {
        Side::Max => Side::Min,
        Side::Min => Side::Max,
    };
    let dag_value = dag_best_response(g, &dags[responder.index()], realization)?;
    let t = Instant::now();
    let o = enumeration_oracle(g, responder, realization, budget)?;
    Ok(json!({
        "responder": responder.name(),
        "dag_br": dag_value,
        "oracle_br": o.value,
        "abs_diff": (dag_value - o.value).abs(),
        "pure_strategies": o.count,
        "oracle_ms": t.elapsed().as_secs_f64() * 1e3,
    }))
}

fn cmd_oracle(a: OracleArgs, j: bool, argv: Vec<String>) -> Result<()> {
    let l = load(&a.game)?;
    let g = &l.game;
    let manifest = RunManifest::new("oracle-check", argv).with_input(&l.bytes);
    let config = a.solver.config()?;
    let setup = Setup::new(g, config.build_options())?;
    let mut fixed: Vec<(Side, Vec<f64>)> = Vec::new();
    match &a.avg {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let doc: Value = serde_json::from_str(&text)?;
            let docs = match doc.get("strategies").and_then(Value::as_array) {
                Some(list) => list.clone(),
                None => vec![doc],
            };
            for d in &docs {
                fixed.push(parse_realization(g, d)?);
            }
        }
        None => {
            let report = solve_with(g, &setup, &config, |_| {})?;
            fixed.push((Side::Max, report.x_avg));
            fixed.push((Side::Min, report.y_avg));
        }
    }
    let mut rows = Vec::new();
    for (side, r) in &fixed {
        rows.push(oracle_row(g, &setup.dags, *side, r, a.oracle_budget)?);
    }
    let ok = rows.iter().all(|r| r["abs_diff"].as_f64().unwrap() <= a.tol);
    let doc = json!({"tolerance": a.tol, "pass": ok, "checks": rows});
    emit(j, manifest, doc, || {
        for r in &rows {
            out!(
                "{:<4} dag_br {:+.9} oracle_br {:+.9} diff {:.2e} ({} pure strategies)",
                r["responder"].as_str().unwrap(),
                r["dag_br"].as_f64().unwrap(),
                r["oracle_br"].as_f64().unwrap(),
                r["abs_diff"].as_f64().unwrap(),
                r["pure_strategies"]
            );
        }
        out!("{}", if ok { "PASS" } else { "FAIL" });
    });
    if !ok {
        anyhow::bail!("oracle mismatch above tolerance {}", a.tol);
    }
    Ok(())
}

const BENCH_HEADER: &str = "game,H,belief_infosets,dag_dec,belief_sequences,dag_obs,dag_edges,init_ms,time_to_eps_ms,iters,gap,value";

fn cmd_bench(a: BenchArgs, j: bool, argv: Vec<String>) -> Result<()> {
    let manifest = RunManifest::new("bench", argv);
    let config = a.solver.config()?;
    let mut lines = vec![BENCH_HEADER.to_string()];
    let mut rows = Vec::new();
    for name in &a.games {
        let l = load(name)?;
        let g = &l.game;
        let t = Instant::now();
        let setup = Setup::new(g, config.build_options())?;
        let init_ms = t.elapsed().as_secs_f64() * 1e3;
        let report = solve_with(g, &setup, &config, |_| {})?;
        let belief = make_belief_game(g, [&setup.analyses[0], &setup.analyses[1]], config.split, NODE_BUDGET).ok().map(|bg| bg.stats());
        let (bi, bs) = match &belief {
            Some(s) => ((s.infosets_max + s.infosets_min).to_string(), (s.sequences_max + s.sequences_min).to_string()),
            None => ("NA".into(), "NA".into()),
        };
        let dec: usize = setup.dags.iter().map(|d| d.stats.num_dec).sum();
        let obs: usize = setup.dags.iter().map(|d| d.stats.num_obs).sum();
        let edges: usize = setup.dags.iter().map(|d| d.stats.edges).sum();
        let tte = if report.converged { format!("{:.3}", report.solve_ms) } else { "NA".into() };
        lines.push(format!(
            "{name},{},{bi},{dec},{bs},{obs},{edges},{init_ms:.3},{tte},{},{:.3e},{:.6}",
            g.num_nodes(),
            report.iterations,
            report.gap,
            report.value
        ));
        rows.push(json!({
            "game": name, "nodes": g.num_nodes(), "belief_game": belief, "dag_dec": dec, "dag_obs": obs,
            "dag_edges": edges, "init_ms": init_ms, "converged": report.converged, "solve_ms": report.solve_ms,
            "iterations": report.iterations, "gap": report.gap, "value": report.value,
        }));
    }
    if let Some(p) = &a.out {
        let body = format!("# {}\n{}\n", manifest.to_line(), lines.join("\n"));
        write_out(p, &body)?;
    }
    emit(j, manifest, json!({"rows": rows}), || {
        for l in &lines {
            out!("{l}");
        }
    });
    Ok(())
}
