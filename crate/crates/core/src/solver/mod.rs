//! Self-play on the two TB-DAGs with averaging and gap certification.

mod oracle;

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use oracle::{enumeration_oracle, OracleResult, ENUMERATION_BUDGET};

use crate::dag::{best_response, DagCfr, FlowVector, RmVariant};
use crate::error::{Error, Result};
use crate::game::{analyze, Game, Side, SplitMode, StructuralAnalysis};
use crate::tbdag::{build_tbdag, BuildOptions, TbDag, EDGE_BUDGET, FANOUT_CAP};

/// Edge count above which the two sides run on separate workers.
const PARALLEL_EDGES: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "cfr")]
    Cfr,
    #[serde(rename = "cfr+")]
    CfrPlus,
    #[serde(rename = "pcfr+")]
    PcfrPlus,
    #[serde(rename = "cfr-mwu")]
    CfrMwu,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Cfr, Algorithm::CfrPlus, Algorithm::PcfrPlus, Algorithm::CfrMwu];

    pub fn variant(self) -> RmVariant {
        match self {
            Algorithm::Cfr => RmVariant::Rm,
            Algorithm::CfrPlus => RmVariant::RmPlus,
            Algorithm::PcfrPlus => RmVariant::PredictiveRmPlus,
            Algorithm::CfrMwu => RmVariant::Mwu,
        }
    }

    /// Averaging weight of iterate `t` (1-based).
    pub fn weight(self, t: u64) -> f64 {
        match self {
            Algorithm::Cfr | Algorithm::CfrMwu => 1.0,
            Algorithm::CfrPlus => t as f64,
            Algorithm::PcfrPlus => (t as f64) * (t as f64),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cfr => "cfr",
            Algorithm::CfrPlus => "cfr+",
            Algorithm::PcfrPlus => "pcfr+",
            Algorithm::CfrMwu => "cfr-mwu",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Params(format!("unknown algorithm {s:?} (cfr, cfr+, pcfr+, cfr-mwu)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateMode {
    Simultaneous,
    /// MAX observes first; MIN then observes against MAX's updated strategy.
    Alternating,
}

impl std::str::FromStr for UpdateMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simultaneous" | "sim" => Ok(UpdateMode::Simultaneous),
            "alternating" | "alt" => Ok(UpdateMode::Alternating),
            other => Err(Error::Params(format!("unknown update mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveConfig {
    pub algorithm: Algorithm,
    pub eps: f64,
    pub max_iters: u64,
    pub log_every: u64,
    pub mode: UpdateMode,
    /// Only used by oracle sampling; the solver is deterministic.
    pub seed: u64,
    pub split: SplitMode,
    pub reduce: bool,
    pub edge_budget: usize,
    pub fanout_cap: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            algorithm: Algorithm::PcfrPlus,
            eps: 1e-3,
            max_iters: 100_000,
            log_every: 10,
            mode: UpdateMode::Simultaneous,
            seed: 0,
            split: SplitMode::Observation,
            reduce: true,
            edge_budget: EDGE_BUDGET,
            fanout_cap: FANOUT_CAP,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::Params("eps must be positive".into()));
        }
        if self.max_iters < 1 || self.log_every < 1 {
            return Err(Error::Params("max_iters and log_every must be at least 1".into()));
        }
        Ok(())
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions { split: self.split, reduce: self.reduce, edge_budget: self.edge_budget, fanout_cap: self.fanout_cap }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogPoint {
    pub iter: u64,
    pub time_ms: f64,
    pub gap: f64,
    pub br_max: f64,
    pub br_min: f64,
    /// MAX's expected utility under the averages.
    pub value: f64,
    /// |H| sqrt(k ln b / t).
    pub bound: f64,
    /// (R_MAX + R_MIN) / t for the uniform average of the played iterates.
    pub regret_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub mode: UpdateMode,
    pub iterations: u64,
    pub converged: bool,
    pub gap: f64,
    pub value: f64,
    pub init_ms: f64,
    pub solve_ms: f64,
    pub log: Vec<LogPoint>,
    /// Average realization per terminal (in `g.terminals()` order).
    pub x_avg: Vec<f64>,
    pub y_avg: Vec<f64>,
    #[serde(skip)]
    pub x_flow: FlowVector,
    #[serde(skip)]
    pub y_flow: FlowVector,
    pub dag_edges: [usize; 2],
}

/// Both sides' analyses and TB-DAGs.
pub struct Setup {
    pub analyses: [StructuralAnalysis; 2],
    pub dags: [TbDag; 2],
}

impl Setup {
    pub fn new(g: &Game, opts: BuildOptions) -> Result<Self> {
        let analyses = [analyze(g, Side::Max)?, analyze(g, Side::Min)?];
        let dags = [build_tbdag(g, &analyses[0], opts)?, build_tbdag(g, &analyses[1], opts)?];
        Ok(Setup { analyses, dags })
    }
}

/// Utility per observation point of `side` against the opponent flow.
/// MAX receives u(z) p(z) y[z], MIN the negation.
pub fn assemble_utility(g: &Game, dag_self: &TbDag, dag_opp: &TbDag, y_opp: &[f64]) -> Result<Vec<f64>> {
    let mut u = vec![0.0; dag_self.num_obs()];
    assemble_into(g, dag_self, dag_opp, y_opp, &mut u)?;
    Ok(u)
}

fn assemble_into(g: &Game, dag_self: &TbDag, dag_opp: &TbDag, y_opp: &[f64], u: &mut [f64]) -> Result<()> {
    let n = g.terminals().len();
    if dag_self.terminal_slot.len() != n || dag_opp.terminal_slot.len() != n {
        return Err(Error::Params("terminal maps do not match the game".into()));
    }
    if y_opp.len() != dag_opp.num_obs() {
        return Err(Error::Params("opponent flow has the wrong length".into()));
    }
    u.iter_mut().for_each(|v| *v = 0.0);
    let sign = dag_self.side.sign();
    for (t, &z) in g.terminals().iter().enumerate() {
        let w = y_opp[dag_opp.terminal_slot[t] as usize];
        if w != 0.0 {
            u[dag_self.terminal_slot[t] as usize] += sign * g.node(z).utility * g.chance_reach(z) * w;
        }
    }
    Ok(())
}

/// MAX's expected utility for flows `x` (MAX) and `y` (MIN).
pub fn expected_value(g: &Game, dags: &[TbDag; 2], x: &[f64], y: &[f64]) -> f64 {
    g.terminals()
        .iter()
        .enumerate()
        .map(|(t, &z)| {
            g.node(z).utility
                * g.chance_reach(z)
                * x[dags[0].terminal_slot[t] as usize]
                * y[dags[1].terminal_slot[t] as usize]
        })
        .sum()
}

/// Best-response values (MAX against `y`, MIN against `x`), each in the
/// responder's own utility.
pub fn best_response_values(g: &Game, dags: &[TbDag; 2], x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let u_max = assemble_utility(g, &dags[0], &dags[1], y)?;
    let u_min = assemble_utility(g, &dags[1], &dags[0], x)?;
    Ok((best_response(&dags[0].problem, &u_max)?.value, best_response(&dags[1].problem, &u_min)?.value))
}

/// Saddle gap max_x' x'Uy - min_y' xUy'.
pub fn gap(g: &Game, dags: &[TbDag; 2], x: &[f64], y: &[f64]) -> Result<f64> {
    let (a, b) = best_response_values(g, dags, x, y)?;
    Ok(a + b)
}

fn rate_bound(g: &Game, k: usize, t: u64) -> f64 {
    let b = g.branching().max(2) as f64;
    g.num_nodes() as f64 * (k.max(1) as f64 * b.ln() / t as f64).sqrt()
}

struct SideRun<'a> {
    cfr: DagCfr<'a>,
    x: Vec<f64>,
    u: Vec<f64>,
    avg: Vec<f64>,
    cum_u: Vec<f64>,
    realized: f64,
}

impl<'a> SideRun<'a> {
    fn new(dag: &'a TbDag, variant: RmVariant, range: f64) -> Self {
        let n = dag.num_obs();
        let mut cfr = DagCfr::new(&dag.problem, variant);
        cfr.set_range(range);
        SideRun { cfr, x: vec![0.0; n], u: vec![0.0; n], avg: vec![0.0; n], cum_u: vec![0.0; n], realized: 0.0 }
    }

    fn observe(&mut self) -> Result<()> {
        let v = self.cfr.observe_utility(&self.u)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("counterfactual value {v} at iteration {}", self.cfr.iterations())));
        }
        self.realized += v;
        for (c, u) in self.cum_u.iter_mut().zip(&self.u) {
            *c += u;
        }
        Ok(())
    }
}

/// Builds both TB-DAGs and runs self-play.
pub fn solve(g: &Game, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let t0 = Instant::now();
    let setup = Setup::new(g, config.build_options())?;
    let init_ms = t0.elapsed().as_secs_f64() * 1e3;
    let mut report = solve_with(g, &setup, config, |_| {})?;
    report.init_ms = init_ms;
    Ok(report)
}

/// Runs self-play on prebuilt DAGs; `on_log` sees every log point.
pub fn solve_with(
    g: &Game,
    setup: &Setup,
    config: &SolveConfig,
    mut on_log: impl FnMut(&LogPoint),
) -> Result<SolveReport> {
    config.validate()?;
    let dags = &setup.dags;
    let k = setup.analyses[0].k().max(setup.analyses[1].k());
    let u_max = g.terminals().iter().map(|&z| g.node(z).utility.abs()).fold(0.0, f64::max);
    let range = (2.0 * u_max).max(f64::MIN_POSITIVE);
    let variant = config.algorithm.variant();
    let mut sides = [SideRun::new(&dags[0], variant, range), SideRun::new(&dags[1], variant, range)];
    let parallel = dags[0].stats.edges + dags[1].stats.edges > PARALLEL_EDGES;
    let mut weight_sum = 0.0;
    let start = Instant::now();
    let mut log = Vec::new();
    let mut converged = false;
    let mut t = 0;
    let mut last = None;
    while t < config.max_iters {
        t += 1;
        let [a, b] = &mut sides;
        let pass = |s: &mut SideRun| s.cfr.next_strategy_into(&mut s.x);
        if parallel {
            rayon::join(|| pass(a), || pass(b));
        } else {
            pass(a);
            pass(b);
        }
        match config.mode {
            UpdateMode::Simultaneous => {
                assemble_into(g, &dags[0], &dags[1], &b.x, &mut a.u)?;
                assemble_into(g, &dags[1], &dags[0], &a.x, &mut b.u)?;
                if parallel {
                    let (ra, rb) = rayon::join(|| a.observe(), || b.observe());
                    ra?;
                    rb?;
                } else {
                    a.observe()?;
                    b.observe()?;
                }
            }
            UpdateMode::Alternating => {
                assemble_into(g, &dags[0], &dags[1], &b.x, &mut a.u)?;
                a.observe()?;
                let mut latest = vec![0.0; a.x.len()];
                a.cfr.next_strategy_into(&mut latest);
                assemble_into(g, &dags[1], &dags[0], &latest, &mut b.u)?;
                b.observe()?;
            }
        }
        let w = config.algorithm.weight(t);
        weight_sum += w;
        for s in sides.iter_mut() {
            for (m, x) in s.avg.iter_mut().zip(&s.x) {
                *m += w * x;
            }
        }
        if t == 1 || t % config.log_every == 0 || t == config.max_iters {
            let x: Vec<f64> = sides[0].avg.iter().map(|v| v / weight_sum).collect();
            let y: Vec<f64> = sides[1].avg.iter().map(|v| v / weight_sum).collect();
            let (br_max, br_min) = best_response_values(g, dags, &x, &y)?;
            let mut regret = 0.0;
            for (s, dag) in sides.iter().zip(dags) {
                regret += best_response(&dag.problem, &s.cum_u)?.value - s.realized;
            }
            let point = LogPoint {
                iter: t,
                time_ms: start.elapsed().as_secs_f64() * 1e3,
                gap: br_max + br_min,
                br_max,
                br_min,
                value: expected_value(g, dags, &x, &y),
                bound: rate_bound(g, k, t),
                regret_bound: regret / t as f64,
            };
            if !point.gap.is_finite() {
                return Err(Error::NonFinite(format!("gap at iteration {t}")));
            }
            on_log(&point);
            converged = point.gap <= config.eps;
            log.push(point);
            last = Some((x, y));
            if converged {
                break;
            }
        }
    }
    let (x, y) = last.expect("at least one log point");
    let p = log.last().unwrap();
    Ok(SolveReport {
        algorithm: config.algorithm,
        mode: config.mode,
        iterations: t,
        converged,
        gap: p.gap,
        value: p.value,
        init_ms: 0.0,
        solve_ms: start.elapsed().as_secs_f64() * 1e3,
        log: log.clone(),
        x_avg: dags[0].terminal_realization(&x),
        y_avg: dags[1].terminal_realization(&y),
        x_flow: x,
        y_flow: y,
        dag_edges: [dags[0].stats.edges, dags[1].stats.edges],
    })
}

pub const CSV_HEADER: &str = "iter,time_ms,gap,br_max,br_min,value,bound";

pub fn csv_row(p: &LogPoint) -> String {
    format!("{},{:.3},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}", p.iter, p.time_ms, p.gap, p.br_max, p.br_min, p.value, p.bound)
}

/// Writes the log as CSV, preceded by an optional comment line.
pub fn write_csv(out: &mut impl Write, log: &[LogPoint], comment: Option<&str>) -> std::io::Result<()> {
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{CSV_HEADER}")?;
    for p in log {
        writeln!(out, "{}", csv_row(p))?;
    }
    Ok(())
}

/// Final average strategy of one side as JSON: realization per terminal,
/// plus behavioral probabilities per decision point when `behavioral`.
pub fn strategy_json(g: &Game, dag: &TbDag, flow: &[f64], behavioral: bool) -> Value {
    let realization: serde_json::Map<String, Value> = g
        .terminals()
        .iter()
        .zip(dag.terminal_realization(flow))
        .map(|(z, p)| (z.to_string(), json!(p)))
        .collect();
    let mut doc = json!({"side": dag.side.name(), "terminal_realization": realization});
    if behavioral {
        let p = &dag.problem;
        let points: Vec<Value> = (0..p.num_dec() as u32)
            .map(|s| {
                let inflow: f64 = p.dec_parents(s).iter().map(|&o| flow[o as usize]).sum();
                let probs: Vec<f64> = p
                    .dec_children(s)
                    .iter()
                    .map(|&o| if inflow > 0.0 { flow[o as usize] / inflow } else { 1.0 / p.dec_children(s).len() as f64 })
                    .collect();
                json!({"belief": dag.belief(s), "probs": probs})
            })
            .collect();
        doc["behavioral"] = json!(points);
    }
    doc
}

/// Reads a terminal realization back from [`strategy_json`] output.
pub fn parse_realization(g: &Game, doc: &Value) -> Result<(Side, Vec<f64>)> {
    let side: Side = doc
        .get("side")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Params("strategy document lacks \"side\"".into()))?
        .parse()?;
    let map = doc
        .get("terminal_realization")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Params("strategy document lacks \"terminal_realization\"".into()))?;
    let mut out = Vec::with_capacity(g.terminals().len());
    for z in g.terminals() {
        let v = map
            .get(&z.to_string())
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Params(format!("no realization for terminal {z}")))?;
        out.push(v);
    }
    Ok((side, out))
}

/// Best-response value of `dag.side` against an opponent given as a
/// realization per terminal (in `g.terminals()` order), computed on the
/// TB-DAG. Pairs with [`enumeration_oracle`].
pub fn dag_best_response(g: &Game, dag: &TbDag, opponent: &[f64]) -> Result<f64> {
    if opponent.len() != g.terminals().len() {
        return Err(Error::Params("opponent realization length does not match the terminals".into()));
    }
    let mut u = vec![0.0; dag.num_obs()];
    let sign = dag.side.sign();
    for (t, &z) in g.terminals().iter().enumerate() {
        u[dag.terminal_slot[t] as usize] += sign * g.node(z).utility * g.chance_reach(z) * opponent[t];
    }
    Ok(best_response(&dag.problem, &u)?.value)
}
