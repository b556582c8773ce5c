use crate::error::{Error, Result};
use crate::game::{Game, NodeId, NodeKind, Side};

/// Default cap on the number of reduced pure strategies enumerated.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub value: f64,
    /// Action per infoset id; None where the strategy never reaches it.
    pub strategy: Vec<Option<u32>>,
    /// Number of reduced pure strategies enumerated.
    pub count: u64,
}

struct Enum<'a> {
    g: &'a Game,
    side: Side,
    /// Weight of each terminal: sign * u(z) p(z) opp(z).
    weight: Vec<f64>,
    assignment: Vec<Option<u32>>,
    leaves: u64,
}

impl Enum<'_> {
    /// Expands alive nodes by one level under the current assignment.
    /// Returns the next level's alive non-terminals and the value of the
    /// terminals reached.
    fn step(&self, alive: &[NodeId]) -> (Vec<NodeId>, f64) {
        let mut next = Vec::new();
        let mut value = 0.0;
        let mut visit = |c: NodeId| {
            if self.g.node(c).kind == NodeKind::Terminal {
                value += self.weight[c as usize];
            } else {
                next.push(c);
            }
        };
        for &h in alive {
            let node = self.g.node(h);
            if self.g.is_side_node(h, self.side) {
                let a = self.assignment[node.infoset.unwrap() as usize].unwrap();
                visit(node.actions[a as usize].child);
            } else {
                for act in &node.actions {
                    visit(act.child);
                }
            }
        }
        (next, value)
    }

    /// Best total value of terminals strictly below the `alive` level,
    /// maximized over assignments of the infosets reached from here.
    /// Also returns the maximizing (infoset, action) pairs.
    fn search(&mut self, alive: &[NodeId], count_only: bool, limit: u64) -> Result<(f64, Vec<(u32, u32)>)> {
        if alive.is_empty() {
            self.leaves += 1;
            if self.leaves > limit {
                return Err(Error::budget("enumeration", format!("more than {limit} reduced pure strategies")));
            }
            return Ok((0.0, Vec::new()));
        }
        let mut infosets: Vec<u32> = alive
            .iter()
            .filter(|&&h| self.g.is_side_node(h, self.side))
            .map(|&h| self.g.node(h).infoset.unwrap())
            .collect();
        infosets.sort_unstable();
        infosets.dedup();
        let radix: Vec<u32> = infosets.iter().map(|&i| self.g.num_actions(i) as u32).collect();
        let mut digits = vec![0u32; infosets.len()];
        let mut best = f64::NEG_INFINITY;
        let mut best_plan: Vec<(u32, u32)> = Vec::new();
        loop {
            for (&i, &d) in infosets.iter().zip(&digits) {
                self.assignment[i as usize] = Some(d);
            }
            let (next, here) = self.step(alive);
            let (sub, plan) = self.search(&next, count_only, limit)?;
            let v = here + sub;
            if !count_only && v > best {
                best = v;
                best_plan = plan;
                best_plan.extend(infosets.iter().copied().zip(digits.iter().copied()));
            }
            // Odometer with the last infoset fastest.
            let mut k = digits.len();
            loop {
                if k == 0 {
                    for &i in &infosets {
                        self.assignment[i as usize] = None;
                    }
                    return Ok((best, best_plan));
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < radix[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
    }
}

/// Best pure response of `side` against a fixed opponent realization per
/// terminal (in `g.terminals()` order), by brute-force enumeration of the
/// side's reduced pure strategies evaluated on the game tree. The value is
/// in `side`'s own utility.
pub fn enumeration_oracle(g: &Game, side: Side, opponent: &[f64], budget: u64) -> Result<OracleResult> {
    if opponent.len() != g.terminals().len() {
        return Err(Error::Params(format!(
            "opponent realization has {} entries, expected {}",
            opponent.len(),
            g.terminals().len()
        )));
    }
    let mut weight = vec![0.0; g.num_nodes()];
    for (&z, &y) in g.terminals().iter().zip(opponent) {
        weight[z as usize] = side.sign() * g.node(z).utility * g.chance_reach(z) * y;
    }
    let n_inf = g.infosets().len();
    let mut e = Enum { g, side, weight, assignment: vec![None; n_inf], leaves: 0 };
    let root = g.root();
    let (alive, base) = if g.node(root).is_terminal() { (vec![], e.weight[root as usize]) } else { (vec![root], 0.0) };
    e.search(&alive, true, budget)?;
    let count = e.leaves;
    e.leaves = 0;
    let (v, plan) = e.search(&alive, false, u64::MAX)?;
    let mut strategy = vec![None; n_inf];
    for (i, a) in plan {
        strategy[i as usize] = Some(a);
    }
    Ok(OracleResult { value: base + v, strategy, count })
}
