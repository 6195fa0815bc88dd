//! Streaming enumeration of tree topologies.
//!
//! Both enumerators grow trees by inserting one source at a time and walk the
//! resulting generation tree depth-first, so memory stays proportional to `n²`
//! no matter how many topologies are produced.

use crate::error::{Error, Result};
use crate::topology::Topology;

/// Every full topology on `n` sources and the sink, with `n − 1` Steiner
/// points of degree three, each exactly once.
///
/// Source `i + 1` is attached by subdividing one edge of a topology on the
/// first `i` sources; the count is `(2n − 3)!!`.
pub fn enumerate_full_topologies(n: usize) -> Result<FullTopologies> {
    if n < 2 {
        return Err(Error::Domain(format!("full topologies need at least two sources, got {n}")));
    }
    let mut parents = vec![None; 2 * n];
    let s0 = n + 1;
    parents[0] = Some(s0);
    parents[1] = Some(s0);
    parents[s0] = Some(n);
    Ok(FullTopologies { n, stack: vec![(parents, 2, 0)], pending_root: true })
}

pub struct FullTopologies {
    n: usize,
    /// (parent array, sources placed, next edge to subdivide)
    stack: Vec<(Vec<Option<usize>>, usize, usize)>,
    pending_root: bool,
}

impl FullTopologies {
    fn edge_child(&self, placed: usize, idx: usize) -> usize {
        // Existing non-sink nodes: sources 0..placed, then Steiner slots.
        if idx < placed {
            idx
        } else {
            self.n + 1 + (idx - placed)
        }
    }
}

impl Iterator for FullTopologies {
    type Item = Topology;

    fn next(&mut self) -> Option<Topology> {
        if self.pending_root {
            self.pending_root = false;
            if self.n == 2 {
                let (p, _, _) = self.stack.pop().unwrap();
                return Some(Topology::from_parents(2, p).unwrap());
            }
        }
        loop {
            let (placed, idx) = {
                let top = self.stack.last_mut()?;
                let edges = 2 * top.1 - 1;
                if top.2 == edges {
                    self.stack.pop();
                    continue;
                }
                top.2 += 1;
                (top.1, top.2 - 1)
            };
            let c = self.edge_child(placed, idx);
            let mut p = self.stack.last().unwrap().0.clone();
            let s = self.n + placed; // next Steiner slot
            let old = p[c].unwrap();
            p[c] = Some(s);
            p[s] = Some(old);
            p[placed] = Some(s);
            if placed + 1 == self.n {
                return Some(Topology::from_parents(self.n, p).unwrap());
            }
            self.stack.push((p, placed + 1, 0));
        }
    }
}

/// Every topology whose Steiner points all have degree at least three, with
/// at most `max_steiner` of them. Terminals may have any degree.
///
/// Growth step for source `i`: attach it to an existing node, subdivide an
/// edge with a new degree-three Steiner point holding it, subdivide an edge
/// with the source itself, or let it take over an existing Steiner point.
/// Undoing the step is unambiguous, so no topology is produced twice.
pub fn enumerate_skeletons(n: usize, max_steiner: usize) -> Skeletons {
    assert!(n >= 1, "at least one source is required");
    let mut parents = vec![None; n + 1];
    parents[0] = Some(n);
    Skeletons { n, max_steiner, stack: vec![Frame { parents, placed: 1, next: 0 }], emitted_root: false }
}

struct Frame {
    parents: Vec<Option<usize>>,
    placed: usize,
    next: usize,
}

impl Frame {
    fn steiner(&self, n: usize) -> usize {
        self.parents.len() - n - 1
    }
}

pub struct Skeletons {
    n: usize,
    max_steiner: usize,
    stack: Vec<Frame>,
    emitted_root: bool,
}

impl Skeletons {
    /// Maps an index in `0..placed + 1 + j` to an existing node.
    fn node(&self, placed: usize, idx: usize) -> usize {
        if idx < placed {
            idx
        } else {
            self.n + (idx - placed)
        }
    }

    fn grow(&self, f: &Frame, choice: usize) -> Vec<Option<usize>> {
        let n = self.n;
        let i = f.placed;
        let j = f.steiner(n);
        let nodes = i + 1 + j;
        let edges = i + j;
        let mut p = f.parents.clone();
        let edge_child = |e: usize| if e < i { e } else { n + 1 + (e - i) };
        if choice < nodes {
            p[i] = Some(self.node(i, choice));
        } else if choice < nodes + edges {
            let c = edge_child(choice - nodes);
            let s = p.len();
            p.push(p[c]);
            p[c] = Some(s);
            p[i] = Some(s);
        } else if choice < nodes + 2 * edges {
            let c = edge_child(choice - nodes - edges);
            p[i] = p[c];
            p[c] = Some(i);
        } else {
            let s = n + 1 + (choice - nodes - 2 * edges);
            p[i] = p[s];
            for q in p.iter_mut() {
                if *q == Some(s) {
                    *q = Some(i);
                }
            }
            let last = p.len() - 1;
            if s != last {
                p[s] = p[last];
                for q in p.iter_mut() {
                    if *q == Some(last) {
                        *q = Some(s);
                    }
                }
            }
            p.pop();
        }
        p
    }
}

impl Iterator for Skeletons {
    type Item = Topology;

    fn next(&mut self) -> Option<Topology> {
        if self.n == 1 {
            if self.emitted_root {
                return None;
            }
            self.emitted_root = true;
            return Some(Topology::from_parents(1, self.stack[0].parents.clone()).unwrap());
        }
        loop {
            let top = self.stack.last_mut()?;
            let i = top.placed;
            let j = top.steiner(self.n);
            let choices = (i + 1 + j) + 2 * (i + j) + j;
            if top.next == choices {
                self.stack.pop();
                continue;
            }
            top.next += 1;
            let choice = top.next - 1;
            let top = self.stack.last().unwrap();
            let p = self.grow(top, choice);
            let placed = i + 1;
            let steiner = p.len() - self.n - 1;
            // Each remaining source can remove at most one Steiner point.
            if steiner > self.max_steiner + (self.n - placed) {
                continue;
            }
            if placed == self.n {
                if steiner <= self.max_steiner {
                    return Some(Topology::from_parents(self.n, p).unwrap());
                }
                continue;
            }
            self.stack.push(Frame { parents: p, placed, next: 0 });
        }
    }
}

/// Every topology on `n` sources with at most `k` Steiner points, each of
/// degree at least `min_steiner_degree`, once per Steiner relabelling class.
///
/// Degree-two Steiner points are produced by distributing beads over the
/// edges of each skeleton. A minimum degree below two is treated as two
/// (a Steiner leaf carries no flow).
pub fn enumerate_bounded_topologies(
    n: usize,
    k: usize,
    min_steiner_degree: usize,
) -> impl Iterator<Item = Topology> {
    let min_deg = min_steiner_degree.max(2);
    enumerate_skeletons(n, k).flat_map(move |sk| {
        let deg = sk.degrees();
        let ok = (sk.sink() + 1..sk.n_nodes()).all(|v| deg[v] >= min_deg.max(3));
        let budget = if ok && min_deg == 2 { k - sk.n_steiner() } else { 0 };
        let edges = sk.n_edges();
        let beads: Box<dyn Iterator<Item = BeadVector>> = if !ok {
            Box::new(std::iter::empty())
        } else {
            Box::new(BeadVectors::new(vec![budget as u32; edges], budget as u32))
        };
        beads.map(move |b| expand_beads(&sk, &b))
    })
}

/// Number of degree-two Steiner points placed on each edge of a topology,
/// indexed in [`Topology::edges`] order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BeadVector(pub Vec<u32>);

impl BeadVector {
    pub fn total(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    pub fn zeros(edges: usize) -> Self {
        BeadVector(vec![0; edges])
    }
}

/// All bead vectors with `beads[e] ≤ caps[e]` and total at most `budget`,
/// in lexicographic order starting from all zeros.
pub struct BeadVectors {
    caps: Vec<u32>,
    budget: u32,
    current: Option<Vec<u32>>,
    total: u32,
}

impl BeadVectors {
    pub fn new(caps: Vec<u32>, budget: u32) -> Self {
        let len = caps.len();
        BeadVectors { caps, budget, current: Some(vec![0; len]), total: 0 }
    }
}

impl Iterator for BeadVectors {
    type Item = BeadVector;

    fn next(&mut self) -> Option<BeadVector> {
        let cur = self.current.as_mut()?;
        let out = BeadVector(cur.clone());
        // Odometer increment from the last position.
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            if cur[pos] < self.caps[pos] && self.total < self.budget {
                cur[pos] += 1;
                self.total += 1;
                break;
            }
            self.total -= cur[pos];
            cur[pos] = 0;
        }
        Some(out)
    }
}

/// Replaces every edge `c → p` carrying `b` beads by a directed chain of `b`
/// new degree-two Steiner points.
pub fn expand_beads(topology: &Topology, beads: &BeadVector) -> Topology {
    let edges: Vec<(usize, usize)> = topology.edges().collect();
    assert_eq!(edges.len(), beads.0.len(), "one bead count per edge");
    let mut t = topology.clone();
    for (&(c, p), &b) in edges.iter().zip(&beads.0) {
        let mut below = c;
        for _ in 0..b {
            let s = t.push_steiner(p);
            t.set_parent(below, s);
            below = s;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_counts_follow_double_factorial() {
        assert!(enumerate_full_topologies(1).is_err());
        let counts: Vec<usize> = (2..=6).map(|n| enumerate_full_topologies(n).unwrap().count()).collect();
        assert_eq!(counts, vec![1, 3, 15, 105, 945]);
    }

    #[test]
    fn full_topologies_are_full_and_distinct() {
        let mut keys = std::collections::HashSet::new();
        for t in enumerate_full_topologies(5).unwrap() {
            assert!(t.is_full_binary());
            assert!(keys.insert(t.canonical_key()));
        }
    }

    #[test]
    fn bounded_small_counts() {
        assert_eq!(enumerate_bounded_topologies(1, 0, 3).count(), 1);
        assert_eq!(enumerate_bounded_topologies(2, 0, 3).count(), 3);
        assert_eq!(enumerate_bounded_topologies(2, 1, 3).count(), 4);
    }

    #[test]
    fn bead_vectors_respect_caps_and_budget() {
        let all: Vec<_> = BeadVectors::new(vec![1, 2], 2).collect();
        assert_eq!(
            all.iter().map(|b| b.0.clone()).collect::<Vec<_>>(),
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(BeadVectors::new(vec![], 3).count(), 1);
        // Compositions of at most 3 into 4 parts: C(7, 4) = 35.
        assert_eq!(BeadVectors::new(vec![3; 4], 3).count(), 35);
    }

    #[test]
    fn bead_expansion_adds_degree_two_chain() {
        let t = Topology::star(2);
        let e = expand_beads(&t, &BeadVector(vec![2, 0]));
        assert_eq!(e.n_steiner(), 2);
        let deg = e.degrees();
        assert!(deg[3..].iter().all(|&d| d == 2));
        assert!(e.check_structure().is_ok());
    }
}
