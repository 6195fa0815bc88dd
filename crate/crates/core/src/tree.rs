use crate::enumerate::{expand_beads, BeadVector};
use crate::error::{Error, Result};
use crate::geometry::{sq_dist, Point};
use crate::strategy::BoundStrategy;
use crate::topology::{compute_flows, Flows, Instance, Topology};

/// A topology embedded in the plane: Steiner positions, edge flows and the
/// cost `L(T) = Σ f(e)·|e|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedTree {
    instance: Instance,
    topology: Topology,
    steiner: Vec<Point>,
    flows: Flows,
    cost: f64,
}

impl SolvedTree {
    /// Embeds `topology` with the given Steiner positions (one per slot).
    pub fn new(instance: Instance, topology: Topology, steiner: Vec<Point>) -> Result<Self> {
        if topology.n_sources() != instance.n() {
            return Err(Error::MalformedTopology(format!(
                "topology has {} source slots, instance has {} sources",
                topology.n_sources(),
                instance.n()
            )));
        }
        if steiner.len() != topology.n_steiner() {
            return Err(Error::MalformedTopology(format!(
                "{} Steiner positions for {} Steiner slots",
                steiner.len(),
                topology.n_steiner()
            )));
        }
        if let Some(p) = steiner.iter().find(|p| !p.is_finite()) {
            return Err(Error::NonFinite(format!("Steiner position {p:?}")));
        }
        let flows = compute_flows(&topology, instance.supplies())?;
        let mut tree = SolvedTree { instance, topology, steiner, flows, cost: 0.0 };
        tree.cost = tree.recompute_cost();
        Ok(tree)
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn flows(&self) -> &Flows {
        &self.flows
    }

    pub fn steiner_positions(&self) -> &[Point] {
        &self.steiner
    }

    pub fn steiner_count(&self) -> usize {
        self.steiner.len()
    }

    /// Stored cost `L(T)`.
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// `L(T)` summed afresh from positions and flows.
    pub fn recompute_cost(&self) -> f64 {
        self.edges().map(|e| e.flow * sq_dist(e.from, e.to)).sum()
    }

    /// Objective under `strategy` (`L` or `L_c`).
    pub fn objective(&self, strategy: &BoundStrategy) -> f64 {
        strategy.objective(self.cost, self.steiner_count())
    }

    #[inline]
    pub fn position(&self, node: usize) -> Point {
        if self.topology.is_terminal(node) {
            self.instance.terminal(node)
        } else {
            self.steiner[node - self.topology.n_sources() - 1]
        }
    }

    /// Edges with their endpoints and flow, in node order.
    pub fn edges(&self) -> impl Iterator<Item = TreeEdge> + '_ {
        self.topology.edges().map(move |(c, p)| TreeEdge {
            child: c,
            parent: p,
            from: self.position(c),
            to: self.position(p),
            flow: self.flows.out(c),
        })
    }

    /// Whether some edge is shorter than `tol`.
    pub fn is_degenerate(&self, tol: f64) -> bool {
        self.edges().any(|e| (e.from - e.to).norm() <= tol)
    }

    /// Expands `beads` on the edges of `skeleton` into explicit degree-two
    /// Steiner points, equally spaced along each edge. `steiner` holds the
    /// skeleton's own Steiner positions.
    pub fn from_beaded(instance: Instance, skeleton: &Topology, beads: &BeadVector, steiner: Vec<Point>) -> Result<Self> {
        let n = skeleton.n_sources();
        let pos = |v: usize| if skeleton.is_terminal(v) { instance.terminal(v) } else { steiner[v - n - 1] };
        // `expand_beads` creates each chain from the child end, edge by edge.
        let mut all = steiner.clone();
        for ((c, p), &b) in skeleton.edges().zip(&beads.0) {
            let step = 1.0 / (b as f64 + 1.0);
            all.extend((1..=b).map(|k| pos(c).lerp(pos(p), k as f64 * step)));
        }
        let topology = expand_beads(skeleton, beads);
        SolvedTree::new(instance, topology, all)
    }

    /// Copy with Steiner slot `j` moved to `to`; flows are unchanged and the
    /// cost is recomputed.
    pub fn with_steiner_moved(&self, j: usize, to: Point) -> SolvedTree {
        let mut t = self.clone();
        t.steiner[j] = to;
        t.cost = t.recompute_cost();
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge {
    pub child: usize,
    pub parent: usize,
    pub from: Point,
    pub to: Point,
    pub flow: f64,
}

/// `Σ f·|ab|²` over raw `(flow, a, b)` triples.
pub fn edge_cost(edges: impl IntoIterator<Item = (f64, Point, Point)>) -> f64 {
    edges.into_iter().map(|(f, a, b)| f * sq_dist(a, b)).sum()
}
