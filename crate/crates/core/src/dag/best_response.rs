use super::problem::{DagDecisionProblem, FlowVector};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse {
    /// Pure flow (0/1 per observation point).
    pub flow: FlowVector,
    pub value: f64,
    /// Chosen action index per decision point.
    pub choice: Vec<u32>,
}

/// Maximizes `<u, x>` over the flow polytope by a bottom-up max pass.
/// Ties go to the lowest action index.
pub fn best_response(problem: &DagDecisionProblem, u: &[f64]) -> Result<BestResponse> {
    if u.len() != problem.num_obs() {
        return Err(Error::Params(format!("utility has {} entries, expected {}", u.len(), problem.num_obs())));
    }
    let mut v = u.to_vec();
    let mut choice = vec![0u32; problem.num_dec()];
    for &s in problem.topo().iter().rev() {
        let children = problem.dec_children(s);
        let mut best = 0;
        for j in 1..children.len() {
            if v[children[j] as usize] > v[children[best] as usize] {
                best = j;
            }
        }
        choice[s as usize] = best as u32;
        let value = v[children[best] as usize];
        for &p in problem.dec_parents(s) {
            v[p as usize] += value;
        }
    }
    let mut flow = vec![0.0; problem.num_obs()];
    flow[0] = 1.0;
    for &s in problem.topo() {
        let inflow: f64 = problem.dec_parents(s).iter().map(|&p| flow[p as usize]).sum();
        flow[problem.dec_children(s)[choice[s as usize] as usize] as usize] = inflow;
    }
    Ok(BestResponse { flow, value: v[0], choice })
}
