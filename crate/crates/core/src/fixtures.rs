//! Small reference configurations.

use crate::geometry::Point;
use crate::topology::{Instance, Topology};

/// Three unit sources `(0,0)`, `(2,4)`, `(11,5)`, sink `(11,1)`, with
/// topology `z1→s1, z2→s1, s1→s2, z3→s2, s2→sink`. Its locally minimal
/// embedding has `s1 = (5,2)`, `s2 = (9,2)` and cost 102.
pub fn worked_example() -> (Instance, Topology) {
    let inst = Instance::new(
        vec![Point::new(0.0, 0.0), Point::new(2.0, 4.0), Point::new(11.0, 5.0)],
        Point::new(11.0, 1.0),
    )
    .expect("valid instance");
    let topo = Topology::from_parents(3, vec![Some(4), Some(4), Some(5), None, Some(5), Some(3)]).expect("valid topology");
    (inst, topo)
}

/// `n` unit sources evenly spaced on the unit circle (first at angle
/// `phase`) and a sink at `sink`.
pub fn circle_instance(n: usize, phase: f64, sink: Point) -> Instance {
    let sources = (0..n)
        .map(|i| {
            let a = phase + std::f64::consts::TAU * i as f64 / n as f64;
            Point::new(a.cos(), a.sin())
        })
        .collect();
    Instance::new(sources, sink).expect("valid circle instance")
}

#[cfg(test)]
pub(crate) fn random_instance(n: usize, seed: u64) -> Instance {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let sources = (0..n).map(|_| Point::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
    let sink = Point::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
    Instance::new(sources, sink).unwrap()
}
