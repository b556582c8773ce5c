use serde_json::{json, Value};

use crate::csr::Csr;
use crate::error::{Error, Result};

pub type ObsId = u32;
pub type DecId = u32;

/// The source observation point.
pub const ROOT: ObsId = 0;

/// Flow value per observation point.
pub type FlowVector = Vec<f64>;

/// A DAG-form decision problem: decision points choose one child
/// observation point; observation points lead to all of their child
/// decision points. Observation point 0 is the unique source.
#[derive(Clone, Debug, PartialEq)]
pub struct DagDecisionProblem {
    obs_parent: Vec<u32>,
    obs_children: Csr,
    dec_parents: Csr,
    dec_children: Csr,
    topo: Vec<DecId>,
}

impl DagDecisionProblem {
    /// Builds and validates from child lists in both directions.
    pub fn new<A: AsRef<[u32]>, B: AsRef<[u32]>>(obs_children: &[A], dec_children: &[B]) -> Result<Self> {
        Self::from_csr(Csr::from_lists(obs_children), Csr::from_lists(dec_children))
    }

    pub(crate) fn from_csr(obs_children: Csr, dec_children: Csr) -> Result<Self> {
        let num_obs = obs_children.rows();
        let num_dec = dec_children.rows();
        if num_obs == 0 {
            return Err(Error::invalid("decision problem has no source"));
        }
        let mut obs_parent = vec![u32::MAX; num_obs];
        for s in 0..num_dec {
            let row = dec_children.row(s);
            if row.is_empty() {
                return Err(Error::invalid(format!("decision point {s} has no actions")));
            }
            for &o in row {
                if o as usize >= num_obs || o == ROOT {
                    return Err(Error::invalid(format!("decision point {s} has invalid child {o}")));
                }
                if obs_parent[o as usize] != u32::MAX {
                    return Err(Error::invalid(format!("observation point {o} has more than one parent")));
                }
                obs_parent[o as usize] = s as u32;
            }
        }
        if let Some(o) = (1..num_obs).find(|&o| obs_parent[o] == u32::MAX) {
            return Err(Error::invalid(format!("observation point {o} has no parent")));
        }
        let mut pairs = Vec::with_capacity(obs_children.data.len());
        for o in 0..num_obs {
            for &s in obs_children.row(o) {
                if s as usize >= num_dec {
                    return Err(Error::invalid(format!("observation point {o} has invalid child {s}")));
                }
                pairs.push((s, o as u32));
            }
        }
        let dec_parents = Csr::from_rows(num_dec, &pairs);
        drop(pairs);
        let mut indeg: Vec<u32> = (0..num_dec).map(|s| dec_parents.row(s).len() as u32).collect();
        if let Some(s) = indeg.iter().position(|&d| d == 0) {
            return Err(Error::invalid(format!("decision point {s} has no parent")));
        }
        for s in 0..num_dec {
            let row = dec_parents.row(s);
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("decision point {s} listed twice by one observation point")));
            }
        }
        let mut topo = Vec::with_capacity(num_dec);
        for &s in obs_children.row(ROOT as usize) {
            indeg[s as usize] -= 1;
            if indeg[s as usize] == 0 {
                topo.push(s);
            }
        }
        let mut head = 0;
        while head < topo.len() {
            let s = topo[head] as usize;
            head += 1;
            for &o in dec_children.row(s) {
                for &t in obs_children.row(o as usize) {
                    indeg[t as usize] -= 1;
                    if indeg[t as usize] == 0 {
                        topo.push(t);
                    }
                }
            }
        }
        if topo.len() != num_dec {
            return Err(Error::invalid("decision problem has a cycle or unreachable decision points"));
        }
        Ok(DagDecisionProblem { obs_parent, obs_children, dec_parents, dec_children, topo })
    }

    pub fn num_obs(&self) -> usize {
        self.obs_parent.len()
    }

    pub fn num_dec(&self) -> usize {
        self.topo.len()
    }

    /// Total number of edges (both directions).
    pub fn num_edges(&self) -> usize {
        self.obs_children.data.len() + self.dec_children.data.len()
    }

    /// Total number of (decision point, action) pairs.
    pub fn num_actions(&self) -> usize {
        self.dec_children.data.len()
    }

    pub fn obs_parent(&self, o: ObsId) -> Option<DecId> {
        let p = self.obs_parent[o as usize];
        (p != u32::MAX).then_some(p)
    }

    pub fn obs_children(&self, o: ObsId) -> &[DecId] {
        self.obs_children.row(o as usize)
    }

    pub fn dec_parents(&self, s: DecId) -> &[ObsId] {
        self.dec_parents.row(s as usize)
    }

    pub fn dec_children(&self, s: DecId) -> &[ObsId] {
        self.dec_children.row(s as usize)
    }

    /// Index of the first action of `s` in per-action arrays.
    pub fn action_offset(&self, s: DecId) -> usize {
        self.dec_children.start(s as usize)
    }

    /// Decision points, parents before children.
    pub fn topo(&self) -> &[DecId] {
        &self.topo
    }

    /// Position of `o` among its parent's actions.
    pub fn action_index(&self, o: ObsId) -> Option<usize> {
        let s = self.obs_parent(o)?;
        self.dec_children(s).iter().position(|&c| c == o)
    }

    pub fn is_tree(&self) -> bool {
        (0..self.num_dec() as u32).all(|s| self.dec_parents(s).len() == 1)
    }

    /// Checks the flow constraints: x[root] = 1, inflow equals outflow at
    /// every decision point, entries nonnegative.
    pub fn check_flow(&self, x: &[f64], tol: f64) -> std::result::Result<(), String> {
        if x.len() != self.num_obs() {
            return Err(format!("flow has {} entries, expected {}", x.len(), self.num_obs()));
        }
        if (x[0] - 1.0).abs() > tol {
            return Err(format!("root flow {} != 1", x[0]));
        }
        if let Some(o) = x.iter().position(|&v| v < -1e-12 || !v.is_finite()) {
            return Err(format!("flow at {o} is {}", x[o]));
        }
        for s in 0..self.num_dec() as u32 {
            let inflow: f64 = self.dec_parents(s).iter().map(|&p| x[p as usize]).sum();
            let outflow: f64 = self.dec_children(s).iter().map(|&c| x[c as usize]).sum();
            if (inflow - outflow).abs() > tol {
                return Err(format!("decision point {s}: inflow {inflow} != outflow {outflow}"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let obs: Vec<Value> = (0..self.num_obs() as u32)
            .map(|o| json!({"id": o, "parent": self.obs_parent(o), "children": self.obs_children(o)}))
            .collect();
        let dec: Vec<Value> = (0..self.num_dec() as u32)
            .map(|s| json!({"id": s, "parents": self.dec_parents(s), "children": self.dec_children(s)}))
            .collect();
        json!({"observation_points": obs, "decision_points": dec})
    }
}
