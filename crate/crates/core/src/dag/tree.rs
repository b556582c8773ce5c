use super::problem::{DagDecisionProblem, DecId, FlowVector, ObsId};
use super::regret::{LocalRm, RmVariant};
use crate::error::{Error, Result};

/// Default cap on the number of points of an expanded tree.
pub const EXPANSION_BUDGET: usize = 100_000;

/// A DAG unrolled into a tree, with the maps back to the DAG.
#[derive(Clone, Debug)]
pub struct TreeExpansion {
    pub tree: DagDecisionProblem,
    /// DAG observation point of each tree observation point.
    pub obs_map: Vec<ObsId>,
    /// DAG decision point of each tree decision point.
    pub dec_map: Vec<DecId>,
}

impl TreeExpansion {
    /// Pushes a tree flow onto the DAG (sums copies).
    pub fn project(&self, x_tree: &[f64], num_dag_obs: usize) -> FlowVector {
        let mut x = vec![0.0; num_dag_obs];
        for (t, &o) in self.obs_map.iter().enumerate() {
            x[o as usize] += x_tree[t];
        }
        x
    }

    /// Lifts a DAG utility to the tree.
    pub fn lift(&self, u: &[f64]) -> Vec<f64> {
        self.obs_map.iter().map(|&o| u[o as usize]).collect()
    }
}

/// Duplicates every shared suffix so each point has one root path.
pub fn expand_to_tree(problem: &DagDecisionProblem, budget: usize) -> Result<TreeExpansion> {
    let mut obs_map: Vec<ObsId> = vec![0];
    let mut dec_map: Vec<DecId> = Vec::new();
    let mut obs_children: Vec<Vec<u32>> = vec![Vec::new()];
    let mut dec_children: Vec<Vec<u32>> = Vec::new();
    let mut stack: Vec<(ObsId, u32)> = vec![(0, 0)];
    while let Some((dag_o, tree_o)) = stack.pop() {
        for &s in problem.obs_children(dag_o) {
            let ts = dec_map.len() as u32;
            dec_map.push(s);
            dec_children.push(Vec::new());
            obs_children[tree_o as usize].push(ts);
            for &o in problem.dec_children(s) {
                let to = obs_map.len() as u32;
                obs_map.push(o);
                obs_children.push(Vec::new());
                dec_children[ts as usize].push(to);
                stack.push((o, to));
            }
            if obs_map.len() + dec_map.len() > budget {
                return Err(Error::budget("tree expansion", format!("more than {budget} points")));
            }
        }
    }
    let tree = DagDecisionProblem::new(&obs_children, &dec_children)?;
    Ok(TreeExpansion { tree, obs_map, dec_map })
}

/// Tree-form CFR written recursively over a tree-shaped problem.
#[derive(Clone, Debug)]
pub struct TreeCfr {
    tree: DagDecisionProblem,
    rms: Vec<LocalRm>,
}

impl TreeCfr {
    pub fn new(tree: DagDecisionProblem, variant: RmVariant, range: f64) -> Result<Self> {
        if !tree.is_tree() {
            return Err(Error::Params("TreeCfr needs a tree-shaped problem".into()));
        }
        let rms = (0..tree.num_dec() as u32)
            .map(|s| LocalRm::new(variant, tree.dec_children(s).len()).with_range(range))
            .collect();
        Ok(TreeCfr { tree, rms })
    }

    pub fn tree(&self) -> &DagDecisionProblem {
        &self.tree
    }

    pub fn next_strategy(&mut self) -> FlowVector {
        let mut x = vec![0.0; self.tree.num_obs()];
        x[0] = 1.0;
        self.descend(0, &mut x);
        x
    }

    fn descend(&mut self, o: ObsId, x: &mut [f64]) {
        let kids: Vec<DecId> = self.tree.obs_children(o).to_vec();
        for s in kids {
            let r = self.rms[s as usize].next_strategy().to_vec();
            let children: Vec<ObsId> = self.tree.dec_children(s).to_vec();
            for (j, c) in children.into_iter().enumerate() {
                x[c as usize] = x[o as usize] * r[j];
                self.descend(c, x);
            }
        }
    }

    pub fn observe_utility(&mut self, u: &[f64]) -> f64 {
        self.value(0, u)
    }

    fn value(&mut self, o: ObsId, u: &[f64]) -> f64 {
        let mut total = u[o as usize];
        let kids: Vec<DecId> = self.tree.obs_children(o).to_vec();
        for s in kids {
            let children: Vec<ObsId> = self.tree.dec_children(s).to_vec();
            let vals: Vec<f64> = children.iter().map(|&c| self.value(c, u)).collect();
            let rm = &mut self.rms[s as usize];
            let ev: f64 = rm.next_strategy().iter().zip(&vals).map(|(x, v)| x * v).sum();
            rm.observe(&vals);
            total += ev;
        }
        total
    }
}

/// Regret minimizer for a DAG built from tree CFR over its expansion:
/// strategies are projected back, utilities are lifted.
#[derive(Clone, Debug)]
pub struct DagGeneric {
    expansion: TreeExpansion,
    cfr: TreeCfr,
    num_obs: usize,
}

impl DagGeneric {
    pub fn new(problem: &DagDecisionProblem, variant: RmVariant, range: f64, budget: usize) -> Result<Self> {
        let expansion = expand_to_tree(problem, budget)?;
        let cfr = TreeCfr::new(expansion.tree.clone(), variant, range)?;
        Ok(DagGeneric { expansion, cfr, num_obs: problem.num_obs() })
    }

    pub fn expansion(&self) -> &TreeExpansion {
        &self.expansion
    }

    pub fn next_strategy(&mut self) -> FlowVector {
        let xt = self.cfr.next_strategy();
        self.expansion.project(&xt, self.num_obs)
    }

    pub fn observe_utility(&mut self, u: &[f64]) -> f64 {
        let lifted = self.expansion.lift(u);
        self.cfr.observe_utility(&lifted)
    }
}
