use std::f64::consts::FRAC_PI_2;

use crate::geometry::{angle_at, weighted_mean, Point};
use crate::strategy::BoundStrategy;
use crate::tree::SolvedTree;

/// Result of the centre-of-mass test at one Steiner point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentroidCheck {
    pub node: usize,
    /// Distance between the Steiner point and the centre of mass of its
    /// neighbours.
    pub residual: f64,
    pub passed: bool,
}

/// Centre of mass of the neighbours of `node`: in-neighbours weighted by the
/// flow they send, the out-neighbour by the flow leaving `node`.
fn neighbour_centroid(tree: &SolvedTree, node: usize, children: &[usize]) -> Point {
    let topo = tree.topology();
    let flows = tree.flows();
    let ins = children.iter().map(|&c| (tree.position(c), flows.out(c)));
    match topo.parent(node) {
        Some(p) => weighted_mean(ins.chain([(tree.position(p), flows.out(node))])),
        None => weighted_mean(ins),
    }
}

/// A tree is locally minimal exactly when every Steiner point sits at the
/// flow-weighted centre of mass of its neighbours; this reports that test per
/// Steiner point.
pub fn check_centroid_certificate(tree: &SolvedTree, tol: f64) -> Vec<CentroidCheck> {
    let topo = tree.topology();
    let children = topo.children();
    (topo.sink() + 1..topo.n_nodes())
        .map(|v| {
            let c = neighbour_centroid(tree, v, &children[v]);
            let residual = (tree.position(v) - c).norm();
            CentroidCheck { node: v, residual, passed: residual <= tol }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleViolation {
    pub node: usize,
    pub in_neighbour: usize,
    pub out_neighbour: usize,
    pub angle: f64,
}

/// In-edge/out-edge pairs meeting at an angle below `π/2 − tol`.
///
/// Pairs involving a zero-length edge have no angle and are skipped.
pub fn check_angles(tree: &SolvedTree, tol: f64) -> Vec<AngleViolation> {
    let topo = tree.topology();
    let mut out = Vec::new();
    for (c, v) in topo.edges() {
        let Some(w) = topo.parent(v) else { continue };
        if let Ok(angle) = angle_at(tree.position(v), tree.position(c), tree.position(w)) {
            if angle < FRAC_PI_2 - tol {
                out.push(AngleViolation { node: v, in_neighbour: c, out_neighbour: w, angle });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreeViolation {
    SteinerBelowWindow { node: usize, degree: usize },
    SteinerAboveWindow { node: usize, degree: usize },
    SourceAboveBound { node: usize, degree: usize },
    /// A source of degree `φ − 1` that is not the midpoint of its out-neighbour
    /// and the centre of mass of itself and its in-neighbours.
    SourceNotMidpoint { node: usize, residual: f64 },
}

/// Degree conditions of degree-bounded optima: Steiner degrees in
/// `[φ, 2φ − 3]`, source degrees at most `φ − 1`, and the midpoint condition
/// at sources of degree exactly `φ − 1`.
pub fn check_degree_window(tree: &SolvedTree, phi: usize, tol: f64) -> Vec<DegreeViolation> {
    let topo = tree.topology();
    let deg = topo.degrees();
    let children = topo.children();
    let flows = tree.flows();
    let supplies = tree.instance().supplies();
    let mut out = Vec::new();
    for v in topo.sink() + 1..topo.n_nodes() {
        if deg[v] < phi {
            out.push(DegreeViolation::SteinerBelowWindow { node: v, degree: deg[v] });
        } else if deg[v] + 3 > 2 * phi {
            out.push(DegreeViolation::SteinerAboveWindow { node: v, degree: deg[v] });
        }
    }
    for v in 0..topo.n_sources() {
        if deg[v] + 1 > phi {
            out.push(DegreeViolation::SourceAboveBound { node: v, degree: deg[v] });
        } else if deg[v] + 1 == phi && deg[v] > 1 {
            let z = tree.position(v);
            let own = std::iter::once((z, supplies[v]));
            let c = weighted_mean(own.chain(children[v].iter().map(|&c| (tree.position(c), flows.out(c)))));
            let w = tree.position(topo.parent(v).expect("sources have an out-edge"));
            let residual = (z - c.midpoint(w)).norm();
            if residual > tol {
                out.push(DegreeViolation::SourceNotMidpoint { node: v, residual });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    /// Common node of the two edges.
    pub node: usize,
    pub a: usize,
    pub b: usize,
    /// One of the edges has zero length.
    pub degenerate: bool,
    /// The common node is a Steiner point of degree exactly `φ` under a
    /// degree bound, where an overlap does not rule out optimality.
    pub caveat: bool,
}

/// Pairs of incident edges where one lies inside the other: both leave the
/// common node in the same direction (angle at most `tol`), or one has zero
/// length.
pub fn check_overlapping_edges(tree: &SolvedTree, tol: f64, strategy: &BoundStrategy) -> Vec<Overlap> {
    let topo = tree.topology();
    let children = topo.children();
    let deg = topo.degrees();
    let mut out = Vec::new();
    for v in 0..topo.n_nodes() {
        let mut nbrs = children[v].clone();
        nbrs.extend(topo.parent(v));
        let here = tree.position(v);
        let caveat = matches!(*strategy, BoundStrategy::DegreeBound(phi) if topo.is_steiner(v) && deg[v] == phi);
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                let (pa, pb) = (tree.position(a), tree.position(b));
                let degenerate = pa == here || pb == here;
                let overlapping = degenerate || matches!(angle_at(here, pa, pb), Ok(t) if t <= tol);
                if overlapping {
                    out.push(Overlap { node: v, a, b, degenerate, caveat });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollinearityCheck {
    /// The Steiner point whose out-neighbour is also a Steiner point.
    pub lower: usize,
    pub upper: usize,
    pub residual: f64,
    pub passed: bool,
}

/// For adjacent Steiner points `s₀ → s₁`, let `C_J` be the centre of mass of
/// the in-neighbours of `s₀` (total flow `F_J`) and `C_J̄` that of the other
/// neighbours of `s₁` (total mass `F_J̄`). Then `C_J, s₀, s₁, C_J̄` are
/// collinear and cut `C_J C_J̄` in the ratio `F_J̄ : F_J̄ : F_J`.
pub fn check_adjacent_collinearity(tree: &SolvedTree, tol: f64) -> Vec<CollinearityCheck> {
    let topo = tree.topology();
    let children = topo.children();
    let flows = tree.flows();
    let mut out = Vec::new();
    for s0 in topo.sink() + 1..topo.n_nodes() {
        let Some(s1) = topo.parent(s0).filter(|&p| topo.is_steiner(p)) else { continue };
        let f_j = flows.out(s0);
        let c_j = weighted_mean(children[s0].iter().map(|&c| (tree.position(c), flows.out(c))));
        let mut rest: Vec<(Point, f64)> = children[s1]
            .iter()
            .filter(|&&c| c != s0)
            .map(|&c| (tree.position(c), flows.out(c)))
            .collect();
        let w = topo.parent(s1).expect("Steiner points have an out-edge");
        rest.push((tree.position(w), flows.out(s1)));
        let f_rest: f64 = rest.iter().map(|r| r.1).sum();
        let c_rest = weighted_mean(rest);
        let total = 2.0 * f_rest + f_j;
        let e0 = c_j.lerp(c_rest, f_rest / total);
        let e1 = c_j.lerp(c_rest, 2.0 * f_rest / total);
        let residual = (tree.position(s0) - e0).norm().max((tree.position(s1) - e1).norm());
        out.push(CollinearityCheck { lower: s0, upper: s1, residual, passed: residual <= tol });
    }
    out
}
