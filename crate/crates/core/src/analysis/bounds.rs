use crate::enumerate::BeadVector;
use crate::error::{Error, Result};
use crate::geometry::{sq_dist, Point};
use crate::topology::{compute_flows, Instance, Topology};
use crate::tree::SolvedTree;

/// Number of equally spaced beads minimising `f·ℓ²/(p+1) + c·p`.
///
/// With `x = f·ℓ²/c`, going from `p` to `p+1` beads pays off exactly when
/// `x > (p+1)(p+2)`, so the minimiser is the least `p` with
/// `(p+1)(p+2) ≥ x`; equal costs resolve to the smaller count. That `p`
/// satisfies `p(p+1) ≤ x ≤ (p+1)(p+2)`.
pub fn optimal_bead_count(f: f64, length: f64, c: f64) -> Result<u64> {
    if !(f > 0.0 && f.is_finite()) || !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("flow {f} and node weight {c} must be positive")));
    }
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::Domain(format!("edge length {length} must be nonnegative")));
    }
    let x = f * length * length / c;
    if !x.is_finite() {
        return Err(Error::NonFinite(format!("f·ℓ²/c = {x}")));
    }
    let gain = |p: u64| ((p + 1) as f64) * ((p + 2) as f64) < x;
    let mut p = ((-3.0 + (1.0 + 4.0 * x).sqrt()) / 2.0).ceil().max(0.0) as u64;
    while p > 0 && !gain(p - 1) {
        p -= 1;
    }
    while gain(p) {
        p += 1;
    }
    Ok(p)
}

/// `Σ wᵢ·|zᵢ z_BS|² / (n + k + 1)` over explicit coordinates.
///
/// Every source-to-sink path has at most `n + k` edges and carries at least
/// the source's own supply, so the sum of squares along it is at least
/// `|zᵢ z_BS|²` divided by its edge count.
pub fn path_lower_bound(sources: &[Point], supplies: &[f64], sink: Point, k: usize) -> f64 {
    let s: f64 = sources.iter().zip(supplies).map(|(&z, &w)| w * sq_dist(z, sink)).sum();
    s / (sources.len() + k + 1) as f64
}

/// Lower bound on `L(T)` for every tree on `instance` with at most `k`
/// Steiner points.
pub fn lower_bound_path(instance: &Instance, k: usize) -> f64 {
    path_lower_bound(instance.sources(), instance.supplies(), instance.sink(), k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeadedSpanningTree {
    /// Minimum spanning tree on the terminals, directed toward the sink.
    pub skeleton: Topology,
    pub beads: BeadVector,
    /// The skeleton with its beads as explicit equally spaced Steiner points.
    pub tree: SolvedTree,
    /// `L_c` of `tree`.
    pub objective: f64,
}

/// Minimum spanning tree on sources and sink with the optimal number of
/// equally spaced beads on every edge. Its `L_c` bounds the node-weighted
/// optimum from above.
pub fn beaded_spanning_tree(instance: &Instance, c: f64) -> Result<BeadedSpanningTree> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("node weight {c} must be positive")));
    }
    let n = instance.n();
    let pos: Vec<Point> = (0..=n).map(|v| instance.terminal(v)).collect();

    // Prim from the sink; the attaching vertex becomes the out-neighbour.
    let mut parents = vec![None; n + 1];
    let mut in_tree = vec![false; n + 1];
    let mut best = vec![f64::INFINITY; n + 1];
    let mut via = vec![n; n + 1];
    let mut cur = n;
    in_tree[n] = true;
    for _ in 0..n {
        let mut next = None;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let d = sq_dist(pos[v], pos[cur]);
            if d < best[v] {
                best[v] = d;
                via[v] = cur;
            }
            if next.is_none_or(|u: usize| best[v] < best[u]) {
                next = Some(v);
            }
        }
        let v = next.expect("an unattached source remains");
        in_tree[v] = true;
        parents[v] = Some(via[v]);
        cur = v;
    }
    let skeleton = Topology::from_parents(n, parents)?;
    let flows = compute_flows(&skeleton, instance.supplies())?;

    let edges: Vec<(usize, usize)> = skeleton.edges().collect();
    let counts = edges
        .iter()
        .map(|&(a, b)| {
            let p = optimal_bead_count(flows.out(a), (pos[a] - pos[b]).norm(), c)?;
            u32::try_from(p).map_err(|_| Error::Domain(format!("{p} beads on one edge")))
        })
        .collect::<Result<Vec<u32>>>()?;
    let beads = BeadVector(counts);
    let tree = SolvedTree::from_beaded(instance.clone(), &skeleton, &beads, Vec::new())?;
    let objective = tree.cost() + c * tree.steiner_count() as f64;
    Ok(BeadedSpanningTree { skeleton, beads, tree, objective })
}

/// Largest Steiner count `k` an optimal node-weighted tree can have.
///
/// An optimum with `k` Steiner points satisfies
/// `S/(m + k) + c·k ≤ L_c(T) ≤ U` with `m = n + 1`, `S = Σ wᵢ|zᵢ z_BS|²` and
/// `U = L_c(BST)`, i.e. `c·k² + (c·m − U)·k + (S − m·U) ≤ 0`. The bound is
/// the floor of the larger root `(U − c·m + √Δ)/(2c)`,
/// `Δ = (c·m − U)² − 4c(S − m·U)`, and zero when there is no real root.
pub fn steiner_count_bound(instance: &Instance, c: f64) -> Result<usize> {
    let u = beaded_spanning_tree(instance, c)?.objective;
    let m = (instance.n() + 1) as f64;
    let s = lower_bound_path(instance, 0) * m;
    let b = c * m - u;
    let disc = b * b - 4.0 * c * (s - m * u);
    if disc < 0.0 {
        return Ok(0);
    }
    let root = (-b + disc.sqrt()) / (2.0 * c);
    Ok((root + 1e-9).floor().max(0.0) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::solve_topology;
    use crate::fixtures;

    fn by_enumeration(f: f64, l: f64, c: f64, cap: u64) -> u64 {
        (0..=cap)
            .map(|p| (p, f * l * l / (p as f64 + 1.0) + c * p as f64))
            .fold((0, f64::INFINITY), |acc, (p, v)| if v < acc.1 { (p, v) } else { acc })
            .0
    }

    #[test]
    fn bead_count_examples() {
        assert_eq!(optimal_bead_count(1.0, 3.0, 1.0).unwrap(), 2);
        assert_eq!(by_enumeration(1.0, 3.0, 1.0, 20), 2);
        assert_eq!(optimal_bead_count(4.0, 10.0, 1.0).unwrap(), 19);
        assert_eq!(by_enumeration(4.0, 10.0, 1.0, 40), 19);
        // f·ℓ² = 2c sits on the tie between zero and one bead.
        assert_eq!(optimal_bead_count(2.0, 1.0, 1.0).unwrap(), 0);
        assert_eq!(optimal_bead_count(1.0, 0.5, 1.0).unwrap(), 0);
        assert_eq!(optimal_bead_count(1.0, 0.0, 1.0).unwrap(), 0);
        assert!(optimal_bead_count(0.0, 1.0, 1.0).is_err());
        assert!(optimal_bead_count(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn bead_count_ties_resolve_to_fewer_beads() {
        // x = (p+1)(p+2) makes p and p+1 equally good.
        for p in 0..30u64 {
            let x = ((p + 1) * (p + 2)) as f64;
            assert_eq!(optimal_bead_count(x, 1.0, 1.0).unwrap(), p);
        }
    }

    #[test]
    fn lower_bound_examples() {
        let inst = Instance::new(vec![Point::new(3.0, 4.0)], Point::ORIGIN).unwrap();
        assert_eq!(lower_bound_path(&inst, 0), 12.5);
        let (inst, _) = fixtures::worked_example();
        // 122 + 90 + 16 over n + k + 1 = 6.
        assert!((lower_bound_path(&inst, 2) - 38.0).abs() < 1e-12);
        let z = Point::new(1.0, 1.0);
        assert_eq!(path_lower_bound(&[z, z], &[1.0, 1.0], z, 3), 0.0);
    }

    #[test]
    fn spanning_tree_without_beads_at_the_threshold() {
        // One unit source at distance √(2c): f·ℓ²/c = 2 gives no bead.
        let c = 0.5;
        let inst = Instance::new(vec![Point::new(1.0, 0.0)], Point::ORIGIN).unwrap();
        let bst = beaded_spanning_tree(&inst, c).unwrap();
        assert_eq!(bst.beads.total(), 0);
        assert_eq!(bst.objective, 1.0);
    }

    #[test]
    fn collinear_sources_give_a_beaded_path() {
        let inst = Instance::new(vec![Point::new(3.0, 0.0), Point::new(6.0, 0.0)], Point::ORIGIN).unwrap();
        let bst = beaded_spanning_tree(&inst, 1.0).unwrap();
        assert_eq!(bst.skeleton.parents(), &[Some(2), Some(0), None]);
        // Flow 2 over length 3 and flow 1 over length 3.
        let expected = vec![optimal_bead_count(2.0, 3.0, 1.0).unwrap() as u32, optimal_bead_count(1.0, 3.0, 1.0).unwrap() as u32];
        assert_eq!(bst.beads.0, expected);
        assert_eq!(expected, vec![3, 2]);
        // Explicit beads sit where the solver puts them.
        let resolved = solve_topology(&inst, bst.tree.topology()).unwrap();
        for (a, b) in resolved.steiner_positions().iter().zip(bst.tree.steiner_positions()) {
            assert!(a.max_abs_diff(*b) < 1e-12);
        }
        assert!((bst.objective - (18.0 / 4.0 + 3.0 + 9.0 / 3.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn spanning_tree_is_minimum() {
        // Brute force over all parent maps of the terminal tree (Prüfer-free:
        // every map that reaches the sink without cycles).
        for seed in 0..5 {
            let inst = fixtures::random_instance(4, seed);
            let bst = beaded_spanning_tree(&inst, 1e6).unwrap();
            let length = |t: &Topology| -> f64 {
                t.edges().map(|(a, b)| (inst.terminal(a) - inst.terminal(b)).norm()).sum()
            };
            let mut best = f64::INFINITY;
            for code in 0..5usize.pow(4) {
                let parents: Vec<Option<usize>> =
                    (0..4).map(|i| Some(code / 5usize.pow(i as u32) % 5)).chain([None]).collect();
                if let Ok(t) = Topology::from_parents(4, parents) {
                    if t.check_structure().is_ok() {
                        best = best.min(length(&t));
                    }
                }
            }
            assert!((length(&bst.skeleton) - best).abs() < 1e-9);
        }
    }

    #[test]
    fn count_bound_examples() {
        let (inst, _) = fixtures::worked_example();
        // Above the bead-free spanning tree length no Steiner point pays off.
        let mst = beaded_spanning_tree(&inst, 1e12).unwrap();
        assert_eq!(mst.beads.total(), 0);
        assert_eq!(steiner_count_bound(&inst, 1.01 * mst.objective).unwrap(), 0);
        let mut prev = usize::MAX;
        for i in 0..60 {
            let c = 1e-3 * 1.25f64.powi(i);
            let b = steiner_count_bound(&inst, c).unwrap();
            assert!(b <= prev, "B not monotone at c = {c}");
            prev = b;
        }
        assert!(steiner_count_bound(&inst, 1e-4).unwrap() > 100);
    }
}
