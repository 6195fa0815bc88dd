//! Problem instances, directed tree topologies and additive flows.
//!
//! Nodes of a [`Topology`] are addressed by a dense index: sources occupy
//! `0..n`, the sink is `n`, and Steiner slots follow at `n + 1 ..`. Every node
//! other than the sink names exactly one parent (its out-neighbour), so the
//! single-out-edge rule holds by construction; the remaining tree conditions
//! are checked by [`Topology::check_structure`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::strategy::BoundStrategy;

/// Sources with supplies and a single sink.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    sources: Vec<Point>,
    supplies: Vec<f64>,
    sink: Point,
}

impl Instance {
    /// Instance with unit supplies.
    pub fn new(sources: Vec<Point>, sink: Point) -> Result<Self> {
        let n = sources.len();
        Self::with_supplies(sources, vec![1.0; n], sink)
    }

    pub fn with_supplies(sources: Vec<Point>, supplies: Vec<f64>, sink: Point) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::InvalidInstance("at least one source is required".into()));
        }
        if supplies.len() != sources.len() {
            return Err(Error::InvalidInstance(format!(
                "{} supplies given for {} sources",
                supplies.len(),
                sources.len()
            )));
        }
        if !sink.is_finite() {
            return Err(Error::InvalidInstance("sink coordinates must be finite".into()));
        }
        for (i, (z, w)) in sources.iter().zip(&supplies).enumerate() {
            if !z.is_finite() {
                return Err(Error::InvalidInstance(format!("source z{} is not finite", i + 1)));
            }
            if *z == sink {
                return Err(Error::InvalidInstance(format!("source z{} coincides with the sink", i + 1)));
            }
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidInstance(format!("supply of z{} must be positive, got {w}", i + 1)));
            }
        }
        Ok(Instance { sources, supplies, sink })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[Point] {
        &self.sources
    }

    pub fn supplies(&self) -> &[f64] {
        &self.supplies
    }

    pub fn sink(&self) -> Point {
        self.sink
    }

    pub fn total_supply(&self) -> f64 {
        self.supplies.iter().sum()
    }

    pub fn has_unit_supplies(&self) -> bool {
        self.supplies.iter().all(|&w| w == 1.0)
    }

    /// Position of a terminal node (source index or the sink index `n`).
    pub fn terminal(&self, node: usize) -> Point {
        if node == self.n() {
            self.sink
        } else {
            self.sources[node]
        }
    }

    /// Diagonal of the bounding box of all terminals.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = crate::geometry::bounding_box(self.sources.iter().copied().chain([self.sink]))
            .expect("instance has at least one source");
        (hi - lo).norm()
    }

    /// Same instance under `p ↦ R(angle)·p + shift`.
    pub fn transformed(&self, angle: f64, shift: Point) -> Instance {
        let f = |p: Point| p.rotated(angle) + shift;
        Instance {
            sources: self.sources.iter().map(|&p| f(p)).collect(),
            supplies: self.supplies.clone(),
            sink: f(self.sink),
        }
    }
}

/// What a node index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Source(usize),
    Sink,
    Steiner(usize),
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Source(i) => write!(f, "z{}", i + 1),
            NodeKind::Sink => f.write_str("sink"),
            NodeKind::Steiner(j) => write!(f, "s{}", j + 1),
        }
    }
}

/// A directed labelled tree on `n` sources, the sink and `k` Steiner slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Topology {
    n_sources: usize,
    parents: Vec<Option<usize>>,
}

impl Topology {
    /// Builds a topology from a parent array of length `n + 1 + k`.
    ///
    /// Only index ranges are checked here; tree-ness is reported by
    /// [`Topology::check_structure`].
    pub fn from_parents(n_sources: usize, parents: Vec<Option<usize>>) -> Result<Self> {
        if n_sources == 0 {
            return Err(Error::MalformedTopology("no source slots".into()));
        }
        if parents.len() < n_sources + 1 {
            return Err(Error::MalformedTopology(format!(
                "parent array of length {} cannot hold {} sources and a sink",
                parents.len(),
                n_sources
            )));
        }
        let len = parents.len();
        if let Some(bad) = parents.iter().flatten().find(|&&p| p >= len) {
            return Err(Error::MalformedTopology(format!("parent index {bad} out of range")));
        }
        Ok(Topology { n_sources, parents })
    }

    /// All sources attached directly to the sink.
    pub fn star(n: usize) -> Self {
        let mut parents = vec![Some(n); n + 1];
        parents[n] = None;
        Topology { n_sources: n, parents }
    }

    /// Full topology where Steiner slot `j` receives source `j + 1` and the
    /// previous Steiner point (slot 0 receives the first two sources), and the
    /// last Steiner point feeds the sink.
    pub fn caterpillar(n: usize) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return Topology::star(1);
        }
        let k = n - 1;
        let mut parents = vec![None; n + 1 + k];
        let st = |j: usize| n + 1 + j;
        parents[0] = Some(st(0));
        for i in 1..n {
            parents[i] = Some(st(i - 1));
        }
        for j in 0..k - 1 {
            parents[st(j)] = Some(st(j + 1));
        }
        parents[st(k - 1)] = Some(n);
        Topology { n_sources: n, parents }
    }

    #[inline]
    pub fn n_sources(&self) -> usize {
        self.n_sources
    }

    #[inline]
    pub fn n_steiner(&self) -> usize {
        self.parents.len() - self.n_sources - 1
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.parents.len()
    }

    #[inline]
    pub fn sink(&self) -> usize {
        self.n_sources
    }

    #[inline]
    pub fn steiner_node(&self, j: usize) -> usize {
        self.n_sources + 1 + j
    }

    #[inline]
    pub fn is_steiner(&self, node: usize) -> bool {
        node > self.n_sources
    }

    #[inline]
    pub fn is_terminal(&self, node: usize) -> bool {
        node <= self.n_sources
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        use std::cmp::Ordering::*;
        match node.cmp(&self.n_sources) {
            Less => NodeKind::Source(node),
            Equal => NodeKind::Sink,
            Greater => NodeKind::Steiner(node - self.n_sources - 1),
        }
    }

    #[inline]
    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parents[node]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    /// Directed edges `(child, parent)` in node order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents.iter().enumerate().filter_map(|(v, p)| p.map(|p| (v, p)))
    }

    pub fn n_edges(&self) -> usize {
        self.parents.iter().filter(|p| p.is_some()).count()
    }

    /// In-neighbour lists for every node.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parents.len()];
        for (v, p) in self.edges() {
            ch[p].push(v);
        }
        ch
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.parents.len()];
        for (_, p) in self.edges() {
            d[p] += 1;
        }
        d
    }

    /// Undirected degree of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = self.in_degrees();
        for (v, p) in self.parents.iter().enumerate() {
            if p.is_some() {
                d[v] += 1;
            }
        }
        d
    }

    /// Checks that the parent array describes a tree directed towards the
    /// sink and returns the nodes in an order where every node precedes its
    /// parent (the sink comes last).
    pub fn check_structure(&self) -> Result<Vec<usize>> {
        let sink = self.sink();
        if self.parents[sink].is_some() {
            return Err(Error::MalformedTopology("the sink must not have an out-edge".into()));
        }
        for (v, p) in self.parents.iter().enumerate() {
            match p {
                None if v != sink => {
                    return Err(Error::MalformedTopology(format!(
                        "{} has no out-edge",
                        self.kind(v)
                    )))
                }
                Some(p) if *p == v => {
                    return Err(Error::MalformedTopology(format!("{} has a self-loop", self.kind(v))))
                }
                _ => {}
            }
        }
        // Breadth-first from the sink over reversed edges.
        let children = self.children();
        let mut order = Vec::with_capacity(self.parents.len());
        order.push(sink);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            order.extend_from_slice(&children[v]);
        }
        if order.len() != self.parents.len() {
            let mut seen = vec![false; self.parents.len()];
            for &v in &order {
                seen[v] = true;
            }
            let stray = (0..self.parents.len()).find(|&v| !seen[v]).unwrap();
            return Err(Error::MalformedTopology(format!(
                "{} does not reach the sink (cycle)",
                self.kind(stray)
            )));
        }
        order.reverse();
        Ok(order)
    }

    /// Whether every terminal is a leaf and every Steiner point has degree
    /// exactly three.
    pub fn is_full_binary(&self) -> bool {
        let deg = self.degrees();
        (0..=self.n_sources).all(|v| deg[v] == 1) && (self.n_sources + 1..self.n_nodes()).all(|v| deg[v] == 3)
    }

    /// Canonical encoding invariant under relabelling of Steiner slots.
    ///
    /// Each subtree is encoded as its root label followed by the sorted
    /// encodings of its in-neighbour subtrees; Steiner roots share the label
    /// `s`.
    pub fn canonical_key(&self) -> String {
        self.canonical_parts().0
    }

    /// Equivalent topology whose Steiner slots are numbered in canonical
    /// depth-first order.
    pub fn canonicalize(&self) -> Topology {
        let (_, order) = self.canonical_parts();
        let n = self.n_sources;
        let mut relabel = vec![usize::MAX; self.n_nodes()];
        for v in 0..=n {
            relabel[v] = v;
        }
        let mut next = n + 1;
        for &v in &order {
            if self.is_steiner(v) {
                relabel[v] = next;
                next += 1;
            }
        }
        let mut parents = vec![None; self.n_nodes()];
        for (v, p) in self.edges() {
            parents[relabel[v]] = Some(relabel[p]);
        }
        Topology { n_sources: n, parents }
    }

    fn canonical_parts(&self) -> (String, Vec<usize>) {
        let post = self
            .check_structure()
            .unwrap_or_else(|e| panic!("canonical form requires a valid tree: {e}"));
        let children = self.children();
        let mut code: Vec<String> = vec![String::new(); self.n_nodes()];
        let mut sorted_children: Vec<Vec<usize>> = vec![Vec::new(); self.n_nodes()];
        for &v in &post {
            let mut ch = children[v].clone();
            ch.sort_by(|a, b| code[*a].cmp(&code[*b]));
            let mut s = match self.kind(v) {
                NodeKind::Source(i) => format!("z{i}"),
                NodeKind::Sink => "t".to_string(),
                NodeKind::Steiner(_) => "s".to_string(),
            };
            if !ch.is_empty() {
                s.push('(');
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    s.push_str(&code[*c]);
                }
                s.push(')');
            }
            code[v] = s;
            sorted_children[v] = ch;
        }
        // Pre-order over sorted children gives the canonical numbering.
        let mut order = Vec::with_capacity(self.n_nodes());
        let mut stack = vec![self.sink()];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(sorted_children[v].iter().rev());
        }
        (std::mem::take(&mut code[self.sink()]), order)
    }

    /// Adds a Steiner slot and returns its node index.
    pub(crate) fn push_steiner(&mut self, parent: usize) -> usize {
        self.parents.push(Some(parent));
        self.parents.len() - 1
    }

    pub(crate) fn set_parent(&mut self, node: usize, parent: usize) {
        self.parents[node] = Some(parent);
    }

    /// Human-readable parent map, e.g. `{z1: s1, s1: sink}`.
    pub fn describe(&self) -> String {
        let m: BTreeMap<String, String> = self
            .edges()
            .map(|(v, p)| (self.kind(v).to_string(), self.kind(p).to_string()))
            .collect();
        format!("{m:?}")
    }
}

/// Flow on the out-edge of every node, and the sink's in-flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Flows {
    out: Vec<f64>,
    sink_inflow: f64,
}

impl Flows {
    /// Flow on the out-edge of `node` (zero for the sink).
    #[inline]
    pub fn out(&self, node: usize) -> f64 {
        self.out[node]
    }

    pub fn sink_inflow(&self) -> f64 {
        self.sink_inflow
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.out
    }
}

/// Labels every edge with its flow: sources emit their supply plus whatever
/// enters them, Steiner points conserve flow.
pub fn compute_flows(topology: &Topology, supplies: &[f64]) -> Result<Flows> {
    let order = topology.check_structure()?;
    compute_flows_ordered(topology, supplies, &order)
}

pub(crate) fn compute_flows_ordered(topology: &Topology, supplies: &[f64], order: &[usize]) -> Result<Flows> {
    let n = topology.n_sources();
    if supplies.len() != n {
        return Err(Error::InvalidInstance(format!(
            "{} supplies for a topology with {} sources",
            supplies.len(),
            n
        )));
    }
    let mut acc = vec![0.0; topology.n_nodes()];
    let mut has_input = vec![false; topology.n_nodes()];
    for (i, w) in supplies.iter().enumerate() {
        acc[i] = *w;
    }
    for &v in order {
        if topology.is_steiner(v) && !has_input[v] {
            return Err(Error::MalformedTopology(format!(
                "{} has no in-edge and would carry no flow",
                topology.kind(v)
            )));
        }
        if let Some(p) = topology.parent(v) {
            acc[p] += acc[v];
            has_input[p] = true;
        }
    }
    let sink = topology.sink();
    let sink_inflow = acc[sink];
    acc[sink] = 0.0;
    Ok(Flows { out: acc, sink_inflow })
}

/// A structural problem reported by [`validate_topology`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Malformed(String),
    SteinerDegreeBelowBound { node: usize, degree: usize, bound: usize },
    SteinerCountExceeds { count: usize, bound: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Malformed(m) => write!(f, "malformed topology: {m}"),
            Violation::SteinerDegreeBelowBound { node, degree, bound } => {
                write!(f, "Steiner degree < φ: node {node} has degree {degree}, bound {bound}")
            }
            Violation::SteinerCountExceeds { count, bound } => {
                write!(f, "Steiner count exceeds k: {count} > {bound}")
            }
        }
    }
}

/// Tree-ness plus the structural constraint of `strategy`.
///
/// Degree-one Steiner points are rejected under every strategy; under the
/// node-weighted and explicit bounds Steiner points of degree two are allowed.
pub fn validate_topology(topology: &Topology, strategy: &BoundStrategy) -> Vec<Violation> {
    if let Err(e) = topology.check_structure() {
        return vec![Violation::Malformed(e.to_string())];
    }
    let mut out = Vec::new();
    let deg = topology.degrees();
    let min = strategy.min_steiner_degree();
    for v in topology.sink() + 1..topology.n_nodes() {
        if deg[v] < min {
            out.push(Violation::SteinerDegreeBelowBound { node: v, degree: deg[v], bound: min });
        }
    }
    if let BoundStrategy::ExplicitBound(k) = *strategy {
        if topology.n_steiner() > k {
            out.push(Violation::SteinerCountExceeds { count: topology.n_steiner(), bound: k });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// z1→s1, z2→s1, z3→s2, s1→s2, s2→sink.
    pub(crate) fn worked_example_topology() -> Topology {
        Topology::from_parents(3, vec![Some(4), Some(4), Some(5), None, Some(5), Some(3)]).unwrap()
    }

    #[test]
    fn flows_of_worked_example() {
        let t = worked_example_topology();
        let f = compute_flows(&t, &[1.0; 3]).unwrap();
        let per_edge: Vec<f64> = t.edges().map(|(v, _)| f.out(v)).collect();
        // Edge order: z1, z2, z3, s1, s2.
        assert_eq!(per_edge, vec![1.0, 1.0, 1.0, 2.0, 3.0]);
        assert_eq!(f.sink_inflow(), 3.0);
    }

    #[test]
    fn flows_of_single_edge_and_star() {
        let f = compute_flows(&Topology::star(1), &[1.0]).unwrap();
        assert_eq!(f.out(0), 1.0);
        let t = Topology::star(4);
        let f = compute_flows(&t, &[1.0; 4]).unwrap();
        assert_eq!(f.as_slice()[..4], [1.0; 4]);
        assert_eq!(f.sink_inflow(), 4.0);
    }

    #[test]
    fn flows_reject_cycles_and_dangling_steiner() {
        // z1 → s1 → s2 → s1 cycle; sink has no in-edge.
        let t = Topology::from_parents(1, vec![Some(2), None, Some(3), Some(2)]).unwrap();
        assert!(matches!(compute_flows(&t, &[1.0]), Err(Error::MalformedTopology(_))));
        // Steiner leaf.
        let t = Topology::from_parents(1, vec![Some(1), None, Some(1)]).unwrap();
        assert!(matches!(compute_flows(&t, &[1.0]), Err(Error::MalformedTopology(_))));
        // Non-sink node without an out-edge.
        let t = Topology::from_parents(2, vec![Some(2), None, None]).unwrap();
        assert!(matches!(compute_flows(&t, &[1.0, 1.0]), Err(Error::MalformedTopology(_))));
        // Sink with an out-edge.
        let t = Topology::from_parents(1, vec![Some(1), Some(0)]).unwrap();
        assert!(t.check_structure().is_err());
    }

    #[test]
    fn source_with_inflow_accumulates() {
        // z2 → z1 → sink.
        let t = Topology::from_parents(2, vec![Some(2), Some(0), None]).unwrap();
        let f = compute_flows(&t, &[1.0, 1.0]).unwrap();
        assert_eq!(f.out(0), 2.0);
        assert_eq!(f.out(1), 1.0);
    }

    #[test]
    fn validate_examples() {
        let t = worked_example_topology();
        assert!(validate_topology(&t, &BoundStrategy::DegreeBound(3)).is_empty());

        // z1 → s1 → sink, z2 → sink: s1 has degree 2.
        let t = Topology::from_parents(2, vec![Some(3), Some(2), None, Some(2)]).unwrap();
        let v = validate_topology(&t, &BoundStrategy::DegreeBound(3));
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("Steiner degree < φ"));
        assert!(validate_topology(&t, &BoundStrategy::NodeWeighted(1.0)).is_empty());

        // A chain of three beads.
        let t = Topology::from_parents(1, vec![Some(2), None, Some(3), Some(4), Some(1)]).unwrap();
        let v = validate_topology(&t, &BoundStrategy::ExplicitBound(2));
        assert_eq!(v, vec![Violation::SteinerCountExceeds { count: 3, bound: 2 }]);
        assert!(v[0].to_string().contains("Steiner count exceeds k"));
    }

    #[test]
    fn canonical_form_ignores_steiner_labels() {
        let a = worked_example_topology();
        // Same tree with the two Steiner slots swapped.
        let b = Topology::from_parents(3, vec![Some(5), Some(5), Some(4), None, Some(3), Some(4)]).unwrap();
        assert_ne!(a, b);
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_eq!(a.canonicalize(), b.canonicalize());
        // Moving z3 changes the tree.
        let c = Topology::from_parents(3, vec![Some(4), Some(5), Some(5), None, Some(5), Some(3)]).unwrap();
        assert_ne!(a.canonical_key(), c.canonical_key());
    }

    #[test]
    fn caterpillar_is_full() {
        for n in 2..8 {
            let t = Topology::caterpillar(n);
            assert!(t.is_full_binary());
            assert_eq!(t.n_steiner(), n - 1);
            let f = compute_flows(&t, &vec![1.0; n]).unwrap();
            assert_eq!(f.sink_inflow(), n as f64);
        }
    }

    #[test]
    fn instance_rejects_sink_among_sources() {
        let z = Point::new(1.0, 1.0);
        assert!(Instance::new(vec![z], z).is_err());
        assert!(Instance::new(vec![], z).is_err());
        assert!(Instance::with_supplies(vec![Point::ORIGIN], vec![0.0], z).is_err());
        let inst = Instance::new(vec![Point::ORIGIN, Point::ORIGIN], z).unwrap();
        assert!(inst.has_unit_supplies());
    }
}
