use super::problem::{DagDecisionProblem, FlowVector};
use super::regret::{local_observe, local_strategy, RmVariant};
use crate::error::{Error, Result};

/// Edge count above which the backward pass uses compensated summation.
const KAHAN_THRESHOLD: usize = 1_000_000;

/// Counterfactual regret minimization on a DAG-form decision problem:
/// one local regret minimizer per decision point, a top-down pass for
/// strategies and a bottom-up pass for counterfactual values.
#[derive(Clone, Debug)]
pub struct DagCfr<'a> {
    problem: &'a DagDecisionProblem,
    variant: RmVariant,
    regret: Vec<f64>,
    prediction: Vec<f64>,
    strategy: Vec<f64>,
    t: u64,
    range: f64,
    fresh: bool,
    ops: u64,
    scratch: Vec<f64>,
}

impl<'a> DagCfr<'a> {
    pub fn new(problem: &'a DagDecisionProblem, variant: RmVariant) -> Self {
        let m = problem.num_actions();
        DagCfr {
            problem,
            variant,
            regret: vec![0.0; m],
            prediction: vec![0.0; m],
            strategy: vec![0.0; m],
            t: 0,
            range: 2.0,
            fresh: false,
            ops: 0,
            scratch: Vec::new(),
        }
    }

    /// Utility spread for the MWU step size.
    pub fn set_range(&mut self, range: f64) {
        self.range = range;
    }

    pub fn problem(&self) -> &'a DagDecisionProblem {
        self.problem
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    /// Edge visits performed so far (both passes).
    pub fn ops(&self) -> u64 {
        self.ops
    }

    fn refresh(&mut self) {
        if self.fresh {
            return;
        }
        let p = self.problem;
        for s in 0..p.num_dec() as u32 {
            let (a, n) = (p.action_offset(s), p.dec_children(s).len());
            local_strategy(
                self.variant,
                &self.regret[a..a + n],
                &self.prediction[a..a + n],
                self.t,
                self.range,
                &mut self.strategy[a..a + n],
            );
        }
        self.fresh = true;
    }

    /// Local strategy at decision point `s` for the current round.
    pub fn local(&mut self, s: u32) -> &[f64] {
        self.refresh();
        let a = self.problem.action_offset(s);
        &self.strategy[a..a + self.problem.dec_children(s).len()]
    }

    /// Current strategy as a flow over observation points.
    pub fn next_strategy(&mut self) -> FlowVector {
        let mut x = vec![0.0; self.problem.num_obs()];
        self.next_strategy_into(&mut x);
        x
    }

    pub fn next_strategy_into(&mut self, x: &mut [f64]) {
        self.refresh();
        let p = self.problem;
        x.iter_mut().for_each(|v| *v = 0.0);
        x[0] = 1.0;
        for &s in p.topo() {
            let parents = p.dec_parents(s);
            let inflow: f64 = parents.iter().map(|&o| x[o as usize]).sum();
            let a = p.action_offset(s);
            for (j, &o) in p.dec_children(s).iter().enumerate() {
                x[o as usize] = inflow * self.strategy[a + j];
            }
            self.ops += (parents.len() + p.dec_children(s).len()) as u64;
        }
    }

    /// Observes a utility per observation point for the current strategy;
    /// returns the strategy's expected utility.
    pub fn observe_utility(&mut self, u: &[f64]) -> Result<f64> {
        let p = self.problem;
        if u.len() != p.num_obs() {
            return Err(Error::Params(format!("utility has {} entries, expected {}", u.len(), p.num_obs())));
        }
        self.refresh();
        let mut v = u.to_vec();
        let mut comp = if p.num_edges() > KAHAN_THRESHOLD { vec![0.0; v.len()] } else { Vec::new() };
        let mut local = std::mem::take(&mut self.scratch);
        for &s in p.topo().iter().rev() {
            let a = p.action_offset(s);
            let children = p.dec_children(s);
            local.clear();
            local.extend(children.iter().map(|&o| v[o as usize] - comp.get(o as usize).copied().unwrap_or(0.0)));
            let n = children.len();
            let value: f64 = self.strategy[a..a + n].iter().zip(&local).map(|(x, w)| x * w).sum();
            local_observe(self.variant, &mut self.regret[a..a + n], &mut self.prediction[a..a + n], &self.strategy[a..a + n], &local);
            let parents = p.dec_parents(s);
            for &o in parents {
                let o = o as usize;
                if comp.is_empty() {
                    v[o] += value;
                } else {
                    let y = value - comp[o];
                    let t = v[o] + y;
                    comp[o] = (t - v[o]) - y;
                    v[o] = t;
                }
            }
            self.ops += (n + parents.len()) as u64;
        }
        self.scratch = local;
        self.t += 1;
        self.fresh = false;
        Ok(v[0] - comp.first().copied().unwrap_or(0.0))
    }
}
