use super::coordinator::CoordinatorView;
use super::model::{Game, InfosetId, NodeId, Side};
use crate::csr::Csr;
use crate::error::{Error, Result};

/// How a candidate set is refined into beliefs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Connected components of the induced connectivity subgraph.
    Observation,
    /// Intersection with public states.
    Public,
}

impl std::str::FromStr for SplitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obs" | "observation" => Ok(SplitMode::Observation),
            "pub" | "public" => Ok(SplitMode::Public),
            other => Err(Error::Params(format!("unknown split mode {other:?}"))),
        }
    }
}

pub(crate) struct Dsu {
    parent: Vec<u32>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n as u32).collect() }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub(crate) fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so component order is stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Reusable buffers for fast repeated splitting.
#[derive(Default)]
pub struct SplitScratch {
    stamp: Vec<u32>,
    slot: Vec<u32>,
    generation: u32,
    dsu: Vec<u32>,
}

impl SplitScratch {
    fn begin(&mut self, keys: usize) {
        if self.stamp.len() < keys {
            self.stamp.resize(keys, 0);
            self.slot.resize(keys, 0);
        }
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
    }
}

/// Connectivity structure of one side: cliques, public states, last
/// infosets and the information complexity `k`.
#[derive(Clone, Debug)]
pub struct StructuralAnalysis {
    pub side: Side,
    view: CoordinatorView,
    depth: Vec<u32>,
    clique_key: Vec<(InfosetId, u32)>,
    clique_nodes: Csr,
    node_cliques: Csr,
    public_state: Vec<u32>,
    public_nodes: Csr,
    last_infosets: Csr,
    remembered: Vec<Vec<InfosetId>>,
    k: usize,
    kappa: usize,
}

pub fn analyze(g: &Game, side: Side) -> Result<StructuralAnalysis> {
    StructuralAnalysis::new(g, side)
}

impl StructuralAnalysis {
    pub fn new(g: &Game, side: Side) -> Result<Self> {
        let view = CoordinatorView::new(g, side)?;
        let n = g.num_nodes();
        let depth: Vec<u32> = g.nodes().iter().map(|x| x.depth).collect();

        // Cliques: depth-l ancestors of each infoset's members. Levels that
        // collapse to one node induce no edges and are omitted.
        let mut clique_key = Vec::new();
        let mut clique_pairs: Vec<(u32, u32)> = Vec::new();
        for &i in view.infosets() {
            let info = g.infoset(i);
            let mut level: Vec<NodeId> = info.members.clone();
            let mut l = info.depth;
            while level.len() > 1 {
                let c = clique_key.len() as u32;
                clique_key.push((i, l));
                clique_pairs.extend(level.iter().map(|&h| (c, h)));
                let mut up: Vec<NodeId> = level.iter().map(|&h| g.node(h).parent.unwrap()).collect();
                up.dedup();
                level = up;
                l -= 1;
            }
        }
        let clique_nodes = Csr::from_rows(clique_key.len(), &clique_pairs);
        let mut inverted: Vec<(u32, u32)> = clique_pairs.iter().map(|&(c, h)| (h, c)).collect();
        inverted.sort_unstable();
        let node_cliques = Csr::from_rows(n, &inverted);
        drop(inverted);

        // Public states: components of the whole connectivity graph.
        let mut dsu = Dsu::new(n);
        for c in 0..clique_key.len() {
            let row = clique_nodes.row(c);
            for &h in &row[1..] {
                dsu.union(row[0], h);
            }
        }
        let mut public_state = vec![u32::MAX; n];
        let mut num_public = 0u32;
        for h in 0..n as u32 {
            let r = dsu.find(h) as usize;
            if public_state[r] == u32::MAX {
                public_state[r] = num_public;
                num_public += 1;
            }
            public_state[h as usize] = public_state[r];
        }
        let pairs: Vec<(u32, u32)> = (0..n as u32).map(|h| (public_state[h as usize], h)).collect();
        let public_nodes = Csr::from_rows(num_public as usize, &pairs);

        // remembered[J]: infosets I such that every member of J has taken
        // the same action at I.
        let mut remembered = vec![Vec::new(); g.infosets().len()];
        for &j in view.infosets() {
            let members = &g.infoset(j).members;
            let mut common = view.pairs(view.seq(members[0]));
            for &m in &members[1..] {
                if common.is_empty() {
                    break;
                }
                let other = view.pairs(view.seq(m));
                common.retain(|p| other.contains(p));
            }
            let mut r: Vec<InfosetId> = common.into_iter().map(|(i, _)| i).collect();
            r.sort_unstable();
            remembered[j as usize] = r;
        }

        // Last infosets, top-down in preorder.
        let mut li_rows: Vec<Vec<InfosetId>> = vec![Vec::new(); n];
        for h in 0..n {
            let mut li = match g.node(h as u32).parent {
                Some(p) => li_rows[p as usize].clone(),
                None => Vec::new(),
            };
            if g.is_side_node(h as u32, side) {
                let j = g.node(h as u32).infoset.unwrap();
                let rem = &remembered[j as usize];
                li.retain(|i| rem.binary_search(i).is_err());
                if let Err(pos) = li.binary_search(&j) {
                    li.insert(pos, j);
                }
            }
            li_rows[h] = li;
        }
        let li_pairs: Vec<(u32, u32)> = li_rows
            .iter()
            .enumerate()
            .flat_map(|(h, row)| row.iter().map(move |&i| (h as u32, i)))
            .collect();
        drop(li_rows);
        let last_infosets = Csr::from_rows(n, &li_pairs);

        let mut k = 0;
        let mut kappa = 0;
        let mut seen: Vec<u32> = vec![u32::MAX; g.infosets().len()];
        let mut seen_kappa: Vec<u32> = vec![u32::MAX; g.infosets().len()];
        for p in 0..num_public as usize {
            let (mut count, mut count_kappa) = (0, 0);
            for &h in public_nodes.row(p) {
                for &i in last_infosets.row(h as usize) {
                    if seen[i as usize] != p as u32 {
                        seen[i as usize] = p as u32;
                        count += 1;
                    }
                }
                if g.is_side_node(h, side) {
                    let i = g.node(h).infoset.unwrap() as usize;
                    if seen_kappa[i] != p as u32 {
                        seen_kappa[i] = p as u32;
                        count_kappa += 1;
                    }
                }
            }
            k = k.max(count);
            kappa = kappa.max(count_kappa);
        }

        Ok(StructuralAnalysis {
            side,
            view,
            depth,
            clique_key,
            clique_nodes,
            node_cliques,
            public_state,
            public_nodes,
            last_infosets,
            remembered,
            k,
            kappa,
        })
    }

    pub fn view(&self) -> &CoordinatorView {
        &self.view
    }

    pub fn perfect_recall(&self) -> bool {
        self.view.perfect_recall()
    }

    pub fn action_recall(&self) -> bool {
        self.view.action_recall()
    }

    /// Information complexity: max over public states of the number of
    /// distinct last infosets.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Infoset-count variant of `k` (diagnostic only).
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn num_cliques(&self) -> usize {
        self.clique_key.len()
    }

    /// The (infoset, depth) defining clique `c`.
    pub fn clique_key(&self, c: usize) -> (InfosetId, u32) {
        self.clique_key[c]
    }

    pub fn clique_members(&self, c: usize) -> &[NodeId] {
        self.clique_nodes.row(c)
    }

    pub fn cliques_of(&self, h: NodeId) -> &[u32] {
        self.node_cliques.row(h as usize)
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        let (ca, cb) = (self.cliques_of(a), self.cliques_of(b));
        ca.iter().any(|c| cb.binary_search(c).is_ok())
    }

    pub fn num_public_states(&self) -> usize {
        self.public_nodes.rows()
    }

    pub fn public_state(&self, h: NodeId) -> u32 {
        self.public_state[h as usize]
    }

    pub fn public_members(&self, p: u32) -> &[NodeId] {
        self.public_nodes.row(p as usize)
    }

    pub fn last_infosets(&self, h: NodeId) -> &[InfosetId] {
        self.last_infosets.row(h as usize)
    }

    /// Union of last infosets over a public state.
    pub fn li_union(&self, p: u32) -> Vec<InfosetId> {
        let mut all: Vec<InfosetId> =
            self.public_members(p).iter().flat_map(|&h| self.last_infosets(h).iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Whether infoset `j` remembers infoset `i`.
    pub fn remembers(&self, j: InfosetId, i: InfosetId) -> bool {
        j != i && self.remembered[j as usize].binary_search(&i).is_ok()
    }

    fn check_depth(&self, h: &[NodeId]) -> Result<()> {
        if let Some(&first) = h.first() {
            let d = self.depth[first as usize];
            if let Some(&bad) = h.iter().find(|&&x| self.depth[x as usize] != d) {
                return Err(Error::Params(format!(
                    "node set mixes depths {d} and {} (node {bad})",
                    self.depth[bad as usize]
                )));
            }
        }
        Ok(())
    }

    pub fn split_observation(&self, h: &[NodeId]) -> Result<Vec<Vec<NodeId>>> {
        self.split(SplitMode::Observation, h)
    }

    pub fn split_public(&self, h: &[NodeId]) -> Result<Vec<Vec<NodeId>>> {
        self.split(SplitMode::Public, h)
    }

    /// Partitions a same-depth node set into beliefs; blocks are sorted and
    /// ordered by their smallest node.
    pub fn split(&self, mode: SplitMode, h: &[NodeId]) -> Result<Vec<Vec<NodeId>>> {
        self.check_depth(h)?;
        let mut sorted = h.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut scratch = SplitScratch::default();
        let mut out = Vec::new();
        self.split_sorted(mode, &sorted, &mut scratch, &mut out);
        Ok(out)
    }

    /// Fast path for sorted, deduplicated, same-depth input.
    pub fn split_sorted(
        &self,
        mode: SplitMode,
        h: &[NodeId],
        scratch: &mut SplitScratch,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        out.clear();
        match mode {
            SplitMode::Public => {
                scratch.begin(self.num_public_states());
                for &x in h {
                    let p = self.public_state[x as usize] as usize;
                    if scratch.stamp[p] != scratch.generation {
                        scratch.stamp[p] = scratch.generation;
                        scratch.slot[p] = out.len() as u32;
                        out.push(Vec::new());
                    }
                    out[scratch.slot[p] as usize].push(x);
                }
            }
            SplitMode::Observation => {
                scratch.begin(self.clique_key.len());
                scratch.dsu.clear();
                scratch.dsu.extend(0..h.len() as u32);
                let mut dsu = Dsu { parent: std::mem::take(&mut scratch.dsu) };
                for (pos, &x) in h.iter().enumerate() {
                    for &c in self.cliques_of(x) {
                        let c = c as usize;
                        if scratch.stamp[c] == scratch.generation {
                            dsu.union(scratch.slot[c], pos as u32);
                        } else {
                            scratch.stamp[c] = scratch.generation;
                            scratch.slot[c] = pos as u32;
                        }
                    }
                }
                // Roots are the smallest position of each component.
                let mut block_of = vec![u32::MAX; h.len()];
                for (pos, &x) in h.iter().enumerate() {
                    let r = dsu.find(pos as u32) as usize;
                    if block_of[r] == u32::MAX {
                        block_of[r] = out.len() as u32;
                        out.push(Vec::new());
                    }
                    out[block_of[r] as usize].push(x);
                }
                scratch.dsu = dsu.parent;
            }
        }
    }
}
