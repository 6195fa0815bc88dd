//! Globally minimum trees by exhaustive topology enumeration.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::iter::{ParallelBridge, ParallelIterator};

use crate::algebraic::solve_beaded;
use crate::analysis::{
    apply_split, beaded_spanning_tree, lower_bound_path, optimal_bead_count, steiner_count_bound, SplitSpec,
};
use crate::enumerate::{enumerate_full_topologies, enumerate_skeletons, expand_beads, BeadVector, BeadVectors};
use crate::error::{Error, Result};
use crate::geo::solve_full_topology;
use crate::geometry::{bounding_box, Point};
use crate::strategy::BoundStrategy;
use crate::topology::{compute_flows, Instance, Topology};
use crate::tree::SolvedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest `n` accepted when only full topologies are enumerated.
    pub guard_full: usize,
    /// Largest `n` accepted otherwise.
    pub guard_bounded: usize,
    /// Restrict a `DegreeBound(3)` search to full topologies.
    pub full_only: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { guard_full: 8, guard_bounded: 6, full_only: false }
    }
}

/// Bounds on the objective and on the Steiner count that held for the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBounds {
    /// Lower bound on the objective over every admissible tree.
    pub lower: f64,
    /// `L_c` of the beaded spanning tree (node-weighted only).
    pub upper: Option<f64>,
    /// Largest admissible Steiner count.
    pub max_steiner: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    /// The winner, with beads expanded into explicit Steiner points.
    pub best: SolvedTree,
    pub objective: f64,
    pub topologies_examined: usize,
    pub topologies_pruned: usize,
    pub strategy: BoundStrategy,
    pub bounds: SearchBounds,
}

struct Candidate {
    objective: f64,
    key: String,
    skeleton: Topology,
    beads: BeadVector,
    steiner: Vec<Point>,
}

struct Incumbent {
    best: Mutex<Option<Candidate>>,
    objective: AtomicU64,
}

impl Incumbent {
    fn new(upper: f64) -> Self {
        Incumbent { best: Mutex::new(None), objective: AtomicU64::new(upper.to_bits()) }
    }

    fn bound(&self) -> f64 {
        f64::from_bits(self.objective.load(Ordering::Acquire))
    }

    fn offer(&self, objective: f64, skeleton: &Topology, beads: &BeadVector, steiner: Vec<Point>) {
        if objective > self.bound() {
            return;
        }
        let key = expand_beads(skeleton, beads).canonicalize().canonical_key();
        let mut best = self.best.lock().expect("incumbent lock");
        let better = match &*best {
            None => true,
            Some(b) => (objective, &key) < (b.objective, &b.key),
        };
        if better {
            *best = Some(Candidate { objective, key, skeleton: skeleton.clone(), beads: beads.clone(), steiner });
            if objective < self.bound() {
                self.objective.store(objective.to_bits(), Ordering::Release);
            }
        }
    }
}

struct Plan {
    strategy: BoundStrategy,
    /// Largest Steiner count over skeleton points plus beads.
    max_steiner: usize,
    /// Largest number of skeleton Steiner points.
    max_branching: usize,
    /// Bounding-box diagonal, for per-edge bead caps.
    diagonal: f64,
    upper: Option<f64>,
}

impl Plan {
    fn new(instance: &Instance, strategy: BoundStrategy) -> Result<Self> {
        let n = instance.n();
        let (lo, hi) = bounding_box(instance.sources().iter().copied().chain([instance.sink()])).expect("nonempty");
        let diagonal = (hi - lo).norm();
        let plan = match strategy {
            // With Steiner degrees at least φ and n + 1 terminals,
            // (φ − 2)·|S| ≤ n − 1.
            BoundStrategy::DegreeBound(phi) => {
                let m = (n - 1) / (phi - 2);
                Plan { strategy, max_steiner: m, max_branching: m, diagonal, upper: None }
            }
            BoundStrategy::ExplicitBound(k) => {
                Plan { strategy, max_steiner: k, max_branching: k.min(n - 1), diagonal, upper: None }
            }
            BoundStrategy::NodeWeighted(c) => {
                let upper = beaded_spanning_tree(instance, c)?.objective;
                let b = steiner_count_bound(instance, c)?;
                Plan { strategy, max_steiner: b, max_branching: b.min(n - 1), diagonal, upper: Some(upper) }
            }
        };
        Ok(plan)
    }

    /// Lower bound on the objective of any tree with `j` Steiner points.
    fn lower_at(&self, instance: &Instance, j: usize) -> f64 {
        self.strategy.objective(lower_bound_path(instance, j), j)
    }

    fn lower(&self, instance: &Instance) -> f64 {
        (0..=self.max_steiner).map(|j| self.lower_at(instance, j)).fold(f64::INFINITY, f64::min)
    }

    fn admits(&self, skeleton: &Topology) -> bool {
        let deg = skeleton.degrees();
        let min = self.strategy.min_steiner_degree().max(3);
        (skeleton.sink() + 1..skeleton.n_nodes()).all(|v| deg[v] >= min)
    }

    fn bead_vectors(&self, skeleton: &Topology, flows: &[f64]) -> Result<BeadVectors> {
        let budget = (self.max_steiner - skeleton.n_steiner()) as u32;
        let caps = match self.strategy {
            BoundStrategy::DegreeBound(_) => vec![0; skeleton.n_edges()],
            BoundStrategy::ExplicitBound(_) => vec![budget; skeleton.n_edges()],
            BoundStrategy::NodeWeighted(c) => skeleton
                .edges()
                .map(|(v, _)| Ok(optimal_bead_count(flows[v], self.diagonal, c)?.min(budget as u64) as u32))
                .collect::<Result<_>>()?,
        };
        Ok(BeadVectors::new(caps, budget))
    }
}

/// Objective and Steiner-count bounds that [`solve_exact`] works within.
pub fn search_bounds(instance: &Instance, strategy: BoundStrategy) -> Result<SearchBounds> {
    strategy.validate()?;
    let plan = Plan::new(instance, strategy)?;
    Ok(SearchBounds { lower: plan.lower(instance), upper: plan.upper, max_steiner: plan.max_steiner })
}

/// [`solve_exact_with`] under the default guards.
pub fn solve_exact(instance: &Instance, strategy: BoundStrategy) -> Result<SearchReport> {
    solve_exact_with(instance, strategy, &SearchOptions::default())
}

/// Cheapest tree under `strategy` over every admissible topology.
///
/// Skeletons (Steiner degree at least three) are evaluated in parallel. For
/// the explicit and node-weighted bounds, degree-two Steiner points enter as
/// bead counts on skeleton edges: `p` equally spaced beads on an edge of flow
/// `f` leave the weight `f/(p + 1)` on it, so each bead vector needs only the
/// skeleton-sized linear system. Candidates whose path lower bound already
/// exceeds the incumbent are skipped. Equal objectives resolve to the smaller
/// canonical topology key, so the winner does not depend on scheduling.
pub fn solve_exact_with(instance: &Instance, strategy: BoundStrategy, options: &SearchOptions) -> Result<SearchReport> {
    strategy.validate()?;
    let n = instance.n();
    if options.full_only && strategy != BoundStrategy::DegreeBound(3) {
        return Err(Error::Domain("full-topology search needs the degree bound φ = 3".into()));
    }
    let limit = if options.full_only { options.guard_full } else { options.guard_bounded };
    if n > limit {
        return Err(Error::GuardRefusal { n, limit });
    }

    let plan = Plan::new(instance, strategy)?;
    // The spanning-tree bound is loosened slightly so that a winner equal to
    // it survives round-off.
    let incumbent = Incumbent::new(plan.upper.map_or(f64::INFINITY, |u| u * (1.0 + 1e-9) + 1e-12));
    let examined = AtomicUsize::new(0);
    let pruned = AtomicUsize::new(0);
    let fast = instance.has_unit_supplies();

    let evaluate = |skeleton: Topology| -> Result<()> {
        if !plan.admits(&skeleton) {
            return Ok(());
        }
        if fast && skeleton.is_full_binary() && plan.strategy.is_degree_bounded() {
            if plan.lower_at(instance, skeleton.n_steiner()) > incumbent.bound() {
                pruned.fetch_add(1, Ordering::Relaxed);
                return Ok(());
            }
            let tree = solve_full_topology(instance, &skeleton)?.tree;
            examined.fetch_add(1, Ordering::Relaxed);
            let beads = BeadVector::zeros(skeleton.n_edges());
            incumbent.offer(tree.cost(), &skeleton, &beads, tree.steiner_positions().to_vec());
            return Ok(());
        }
        let flows = compute_flows(&skeleton, instance.supplies())?;
        for beads in plan.bead_vectors(&skeleton, flows.as_slice())? {
            let j = skeleton.n_steiner() + beads.total();
            if plan.lower_at(instance, j) > incumbent.bound() {
                pruned.fetch_add(1, Ordering::Relaxed);
                continue;
            }
            let (steiner, cost) = solve_beaded(instance, &skeleton, &flows, &beads)?;
            examined.fetch_add(1, Ordering::Relaxed);
            incumbent.offer(plan.strategy.objective(cost, j), &skeleton, &beads, steiner);
        }
        Ok(())
    };

    if options.full_only {
        let mut topologies: Vec<Topology> = if n == 1 { vec![Topology::star(1)] } else { enumerate_full_topologies(n)?.collect() };
        topologies.retain(|t| t.n_steiner() <= plan.max_branching);
        topologies.into_iter().par_bridge().try_for_each(evaluate)?;
    } else {
        enumerate_skeletons(n, plan.max_branching).par_bridge().try_for_each(evaluate)?;
    }

    let best = incumbent
        .best
        .into_inner()
        .expect("incumbent lock")
        .ok_or_else(|| Error::InternalConsistency("no admissible topology was found".into()))?;
    let tree = SolvedTree::from_beaded(instance.clone(), &best.skeleton, &best.beads, best.steiner)?;
    Ok(SearchReport {
        objective: best.objective,
        best: tree,
        topologies_examined: examined.into_inner(),
        topologies_pruned: pruned.into_inner(),
        strategy,
        bounds: SearchBounds { lower: plan.lower(instance), upper: plan.upper, max_steiner: plan.max_steiner },
    })
}

/// Whether the split keeps the tree admissible under `strategy`.
fn split_admissible(tree: &SolvedTree, spec: &SplitSpec, strategy: BoundStrategy) -> bool {
    let topo = tree.topology();
    match strategy {
        BoundStrategy::DegreeBound(phi) => {
            let target_ok = !topo.is_steiner(spec.target) || topo.degrees()[spec.target] + 1 - spec.subset.len() >= phi;
            spec.subset.len() + 1 >= phi && target_ok
        }
        BoundStrategy::ExplicitBound(k) => topo.n_steiner() < k,
        BoundStrategy::NodeWeighted(_) => true,
    }
}

/// Largest in-degree whose subsets are scanned exhaustively.
const MAX_SPLIT_FAN_IN: usize = 12;

/// Repeatedly applies the admissible `J`-split with the largest decrease of
/// the objective until none decreases it. Every step strictly lowers the
/// objective, so no topology is visited twice.
pub fn local_improve_by_splits(tree: &SolvedTree, strategy: BoundStrategy) -> Result<SolvedTree> {
    strategy.validate()?;
    let mut current = tree.clone();
    loop {
        let before = current.objective(&strategy);
        let children = current.topology().children();
        let mut best: Option<(f64, SolvedTree)> = None;
        for (target, ins) in children.iter().enumerate() {
            if ins.is_empty() || ins.len() > MAX_SPLIT_FAN_IN {
                continue;
            }
            for mask in 1u32..(1 << ins.len()) {
                let subset: Vec<usize> =
                    ins.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
                let spec = SplitSpec { target, subset };
                if !split_admissible(&current, &spec, strategy) {
                    continue;
                }
                let out = apply_split(&current, &spec)?;
                let after = out.tree.objective(&strategy);
                if after < before * (1.0 - 1e-12) - 1e-12 && best.as_ref().is_none_or(|b| after < b.0) {
                    best = Some((after, out.tree));
                }
            }
        }
        match best {
            Some((_, next)) => current = next,
            None => return Ok(current),
        }
    }
}
