use crate::algebraic::solve_topology;
use crate::error::{Error, Result};
use crate::tree::SolvedTree;

/// A `J`-split of `target`: the in-neighbours in `subset` are rerouted through
/// a new Steiner point `s'` whose out-neighbour is `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub target: usize,
    /// Node indices of in-neighbours of `target`.
    pub subset: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome {
    /// The re-solved tree; the new Steiner point is the last slot.
    pub tree: SolvedTree,
    pub cost_before: f64,
    pub cost_after: f64,
}

impl SplitOutcome {
    /// Strict decrease of `L`, with a relative margin against round-off.
    pub fn is_beneficial(&self) -> bool {
        self.cost_after < self.cost_before * (1.0 - 1e-12) - 1e-12
    }

    pub fn new_steiner(&self) -> usize {
        self.tree.topology().n_nodes() - 1
    }
}

/// Applies the split and relocates every Steiner point to its optimal
/// position for the new topology.
pub fn apply_split(tree: &SolvedTree, spec: &SplitSpec) -> Result<SplitOutcome> {
    let topo = tree.topology();
    if spec.target >= topo.n_nodes() {
        return Err(Error::InvalidSplit(format!("no node {}", spec.target)));
    }
    if spec.subset.is_empty() {
        return Err(Error::InvalidSplit("empty subset".into()));
    }
    let mut seen = spec.subset.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != spec.subset.len() {
        return Err(Error::InvalidSplit("repeated in-neighbour".into()));
    }
    if let Some(&v) = spec.subset.iter().find(|&&v| v >= topo.n_nodes() || topo.parent(v) != Some(spec.target)) {
        return Err(Error::InvalidSplit(format!("node {v} is not an in-neighbour of {}", topo.kind(spec.target))));
    }
    let mut next = topo.clone();
    let s = next.push_steiner(spec.target);
    for &v in &spec.subset {
        next.set_parent(v, s);
    }
    let solved = solve_topology(tree.instance(), &next)?;
    Ok(SplitOutcome { cost_before: tree.cost(), cost_after: solved.cost(), tree: solved })
}
