//! JSON exchange documents for instances and solved trees.
//!
//! Nodes are named `z1..zn` (sources), `sink`, and `s1..sk` (Steiner
//! points). A topology lists the out-neighbour of every source and Steiner
//! point in that order.

use serde::{Deserialize, Serialize};

use crate::analysis::{
    check_adjacent_collinearity, check_angles, check_centroid_certificate, check_degree_window,
    check_overlapping_edges, DegreeViolation,
};
use crate::error::{Error, Result};
use crate::geometry::{bounding_box, Point};
use crate::search::SearchReport;
use crate::strategy::BoundStrategy;
use crate::topology::{validate_topology, Instance, Topology};
use crate::tree::SolvedTree;

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub version: u32,
    pub sources: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supplies: Option<Vec<f64>>,
    pub sink: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<BoundStrategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopologyDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDocument {
    pub steiner_count: usize,
    /// Out-neighbour labels for `z1..zn, s1..sk`.
    pub parents: Vec<String>,
}

impl InstanceDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if doc.version != VERSION {
            return Err(Error::Document(format!("unsupported version {}", doc.version)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_instance(instance: &Instance, strategy: Option<BoundStrategy>, topology: Option<&Topology>) -> Self {
        InstanceDocument {
            version: VERSION,
            sources: instance.sources().to_vec(),
            supplies: (!instance.has_unit_supplies()).then(|| instance.supplies().to_vec()),
            sink: instance.sink(),
            strategy,
            topology: topology.map(TopologyDocument::from_topology),
        }
    }

    pub fn instance(&self) -> Result<Instance> {
        match &self.supplies {
            Some(w) => Instance::with_supplies(self.sources.clone(), w.clone(), self.sink),
            None => Instance::new(self.sources.clone(), self.sink),
        }
    }

    /// The declared strategy, or the degree bound `φ = 3`.
    pub fn strategy(&self) -> Result<BoundStrategy> {
        let s = self.strategy.unwrap_or(BoundStrategy::DegreeBound(3));
        s.validate()?;
        Ok(s)
    }

    pub fn topology(&self) -> Result<Option<Topology>> {
        self.topology.as_ref().map(|t| t.to_topology(self.sources.len())).transpose()
    }
}

impl TopologyDocument {
    pub fn from_topology(topology: &Topology) -> Self {
        let parents = (0..topology.n_nodes())
            .filter(|&v| v != topology.sink())
            .map(|v| topology.kind(topology.parent(v).expect("non-sink nodes have an out-edge")).to_string())
            .collect();
        TopologyDocument { steiner_count: topology.n_steiner(), parents }
    }

    pub fn to_topology(&self, n: usize) -> Result<Topology> {
        if self.parents.len() != n + self.steiner_count {
            return Err(Error::Document(format!(
                "{} parent entries for {n} sources and {} Steiner points",
                self.parents.len(),
                self.steiner_count
            )));
        }
        let mut parents = Vec::with_capacity(n + 1 + self.steiner_count);
        for (i, label) in self.parents.iter().enumerate() {
            if i == n {
                parents.push(None);
            }
            parents.push(Some(parse_label(label, n, self.steiner_count)?));
        }
        if self.parents.len() == n {
            parents.push(None);
        }
        let t = Topology::from_parents(n, parents)?;
        t.check_structure()?;
        Ok(t)
    }
}

fn parse_label(label: &str, n: usize, k: usize) -> Result<usize> {
    let bad = || Error::Document(format!("unknown node label {label:?}"));
    if label == "sink" {
        return Ok(n);
    }
    let (base, count, offset) = match label.as_bytes().first() {
        Some(b'z') => (&label[1..], n, 0),
        Some(b's') => (&label[1..], k, n + 1),
        _ => return Err(bad()),
    };
    let i: usize = base.parse().map_err(|_| bad())?;
    if i == 0 || i > count || base.starts_with('0') {
        return Err(bad());
    }
    Ok(offset + i - 1)
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_point(p: Point) -> Point {
    Point::new(round12(p.x), round12(p.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultKind {
    /// Locally minimal tree for a given topology.
    Local,
    /// Winner of an exhaustive search.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFlow {
    pub from: String,
    pub to: String,
    pub flow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub topologies_examined: usize,
    pub topologies_pruned: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub lower_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spanning_tree_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steiner_count_bound: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub version: u32,
    pub kind: ResultKind,
    pub instance: InstanceDocument,
    pub solver: String,
    pub topology: TopologyDocument,
    pub steiner_positions: Vec<Point>,
    pub flows: Vec<EdgeFlow>,
    pub cost: f64,
    pub objective: f64,
    pub certificates: CertificateReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSummary>,
}

impl ResultDocument {
    /// Builds the document; certificates use the unrounded tree.
    pub fn new(
        kind: ResultKind,
        instance: InstanceDocument,
        solver: &str,
        tree: &SolvedTree,
        strategy: BoundStrategy,
        tol: f64,
    ) -> Self {
        let topo = tree.topology();
        ResultDocument {
            version: VERSION,
            kind,
            instance,
            solver: solver.to_string(),
            topology: TopologyDocument::from_topology(topo),
            steiner_positions: tree.steiner_positions().iter().map(|&p| round_point(p)).collect(),
            flows: tree
                .edges()
                .map(|e| EdgeFlow {
                    from: topo.kind(e.child).to_string(),
                    to: topo.kind(e.parent).to_string(),
                    flow: round12(e.flow),
                })
                .collect(),
            cost: round12(tree.cost()),
            objective: round12(tree.objective(&strategy)),
            certificates: CertificateReport::compute(tree, strategy, tol),
            search: None,
            bounds: None,
        }
    }

    pub fn from_search(instance: InstanceDocument, report: &SearchReport, tol: f64) -> Self {
        let mut doc = ResultDocument::new(ResultKind::Exact, instance, "exact", &report.best, report.strategy, tol);
        doc.search = Some(SearchSummary {
            topologies_examined: report.topologies_examined,
            topologies_pruned: report.topologies_pruned,
        });
        doc.bounds = Some(BoundsSummary {
            lower_bound: round12(report.bounds.lower),
            spanning_tree_bound: report.bounds.upper.map(round12),
            steiner_count_bound: matches!(report.strategy, BoundStrategy::NodeWeighted(_))
                .then_some(report.bounds.max_steiner),
        });
        doc
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: ResultDocument = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if doc.version != VERSION {
            return Err(Error::Document(format!("unsupported version {}", doc.version)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    /// Rebuilds the tree from the stored instance, topology and positions.
    pub fn tree(&self) -> Result<SolvedTree> {
        let instance = self.instance.instance()?;
        let topology = self.topology.to_topology(instance.n())?;
        SolvedTree::new(instance, topology, self.steiner_positions.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// Topology admissibility under the strategy.
    pub structure: Vec<String>,
    pub centroid_passed: bool,
    pub centroid_max_residual: f64,
    pub collinearity_passed: bool,
    pub angle_violations: Vec<String>,
    /// Present under a degree bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_window_violations: Option<Vec<String>>,
    pub overlaps: Vec<String>,
}

impl CertificateReport {
    /// Runs every check on `tree`. Position tolerances scale with the extent
    /// of the terminal set.
    pub fn compute(tree: &SolvedTree, strategy: BoundStrategy, tol: f64) -> Self {
        let inst = tree.instance();
        let (lo, hi) = bounding_box(inst.sources().iter().copied().chain([inst.sink()])).expect("nonempty");
        let ptol = tol * (hi - lo).norm().max(1.0);
        let topo = tree.topology();
        let name = |v: usize| topo.kind(v).to_string();

        let centroid = check_centroid_certificate(tree, ptol);
        let collinear = check_adjacent_collinearity(tree, ptol);
        let angle_violations = if strategy.is_degree_bounded() {
            Vec::new()
        } else {
            check_angles(tree, 1e-7)
                .iter()
                .map(|a| {
                    format!(
                        "angle {:.6} rad at {} between {} and {}",
                        a.angle,
                        name(a.node),
                        name(a.in_neighbour),
                        name(a.out_neighbour)
                    )
                })
                .collect()
        };
        let degree_window_violations = match strategy {
            BoundStrategy::DegreeBound(phi) => Some(
                check_degree_window(tree, phi, ptol)
                    .iter()
                    .map(|v| match *v {
                        DegreeViolation::SteinerBelowWindow { node, degree } => {
                            format!("{} has degree {degree} < {phi}", name(node))
                        }
                        DegreeViolation::SteinerAboveWindow { node, degree } => {
                            format!("{} has degree {degree} > {}", name(node), 2 * phi - 3)
                        }
                        DegreeViolation::SourceAboveBound { node, degree } => {
                            format!("{} has degree {degree} > {}", name(node), phi - 1)
                        }
                        DegreeViolation::SourceNotMidpoint { node, residual } => {
                            format!("{} is off the midpoint by {residual:.3e}", name(node))
                        }
                    })
                    .collect(),
            ),
            _ => None,
        };
        let overlaps = check_overlapping_edges(tree, 1e-7, &strategy)
            .iter()
            .map(|o| {
                let mut s = format!("edges to {} and {} overlap at {}", name(o.a), name(o.b), name(o.node));
                if o.degenerate {
                    s.push_str(" (zero length)");
                }
                if o.caveat {
                    s.push_str(" (degree-φ Steiner point)");
                }
                s
            })
            .collect();
        CertificateReport {
            structure: validate_topology(topo, &strategy).iter().map(|v| v.to_string()).collect(),
            centroid_passed: centroid.iter().all(|c| c.passed),
            centroid_max_residual: round12(centroid.iter().map(|c| c.residual).fold(0.0, f64::max)),
            collinearity_passed: collinear.iter().all(|c| c.passed),
            angle_violations,
            degree_window_violations,
            overlaps,
        }
    }

    /// Failures that make a result invalid. For exhaustive-search results
    /// the structural optimality conditions count as well; for locally
    /// minimal trees they are informational.
    pub fn failures(&self, kind: ResultKind) -> Vec<String> {
        let mut out: Vec<String> = self.structure.clone();
        if !self.centroid_passed {
            out.push(format!("centre-of-mass certificate failed (residual {:e})", self.centroid_max_residual));
        }
        if !self.collinearity_passed {
            out.push("adjacent Steiner points are not collinear with their centres of mass".into());
        }
        if kind == ResultKind::Exact {
            out.extend(self.angle_violations.iter().cloned());
            out.extend(self.degree_window_violations.iter().flatten().cloned());
            out.extend(self.overlaps.iter().filter(|o| !o.contains("degree-φ")).cloned());
        }
        out
    }
}
