#![allow(dead_code)]

use fqst::{Instance, Point, Topology};
use rand::rngs::StdRng;
use rand::Rng;

/// `n` unit sources and a sink, uniform in `[0, 10)²`.
pub fn random_instance(rng: &mut StdRng, n: usize) -> Instance {
    let mut p = || Point::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
    let sources = (0..n).map(|_| p()).collect();
    Instance::new(sources, p()).unwrap()
}

/// A uniformly grown full topology: each new source subdivides a random
/// existing edge with a new Steiner point.
pub fn random_full_topology(rng: &mut StdRng, n: usize) -> Topology {
    // Edges as (child, parent) with Steiner points numbered after the sink.
    let sink = n;
    let mut parent: Vec<Option<usize>> = vec![None; 2 * n];
    parent[0] = Some(sink);
    let mut edges = vec![0usize];
    for (i, s) in (1..n).zip(n + 1..) {
        let child = edges[rng.gen_range(0..edges.len())];
        let p = parent[child];
        parent[child] = Some(s);
        parent[s] = p;
        parent[i] = Some(s);
        edges.extend([s, i]);
    }
    Topology::from_parents(n, parent).unwrap()
}

/// Squared-distance tree cost computed directly from positions.
pub fn direct_cost(instance: &Instance, topology: &Topology, steiner: &[Point]) -> f64 {
    let n = topology.n_sources();
    let pos = |v: usize| if v <= n { instance.terminal(v) } else { steiner[v - n - 1] };
    let flows = fqst::topology::compute_flows(topology, instance.supplies()).unwrap();
    topology.edges().map(|(c, p)| flows.out(c) * (pos(c) - pos(p)).norm_sq()).sum()
}
