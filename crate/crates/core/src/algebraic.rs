//! Locally minimal trees for arbitrary topologies via the stationarity system.
//!
//! At a locally minimal embedding every Steiner point `s` with in-flows `fⱼ`
//! from in-neighbours `xⱼ` and out-neighbour `x'` satisfies
//!
//! ```text
//! 2·s·Σfⱼ − Σ fⱼ·xⱼ − x'·Σfⱼ = 0
//! ```
//!
//! Collecting one such row per Steiner point gives `A·s = b`, one system per
//! coordinate with a shared matrix. `A` is the flow-weighted graph Laplacian
//! restricted to Steiner points: symmetric, diagonally dominant, and strictly
//! dominant on every row adjacent to a terminal. Since every Steiner point
//! reaches a terminal through Steiner edges, `A` is irreducibly diagonally
//! dominant and therefore non-singular.

use nalgebra::{DMatrix, DVector};

use crate::enumerate::BeadVector;
use crate::error::{Error, Result};
use crate::geometry::{sq_dist, Point};
use crate::topology::{compute_flows, Flows, Instance, Topology};
use crate::tree::SolvedTree;

/// `A·s = b` for the Steiner points of one topology.
#[derive(Debug, Clone, PartialEq)]
pub struct SteinerSystem {
    matrix: DMatrix<f64>,
    bx: DVector<f64>,
    by: DVector<f64>,
    /// Row `r` belongs to node `nodes[r]`.
    nodes: Vec<usize>,
}

impl SteinerSystem {
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rhs_x(&self) -> &DVector<f64> {
        &self.bx
    }

    pub fn rhs_y(&self) -> &DVector<f64> {
        &self.by
    }

    /// Node index owning row `r`.
    pub fn node_of_row(&self, r: usize) -> usize {
        self.nodes[r]
    }

    /// Builds a system directly from its parts (used for testing the solver).
    pub fn from_parts(matrix: DMatrix<f64>, bx: DVector<f64>, by: DVector<f64>) -> Result<Self> {
        let p = matrix.nrows();
        if matrix.ncols() != p || bx.len() != p || by.len() != p {
            return Err(Error::Domain("system dimensions do not agree".into()));
        }
        Ok(SteinerSystem { matrix, bx, by, nodes: (0..p).collect() })
    }

    /// Checks weak diagonal dominance on every row and strict dominance on at
    /// least one row of every connected block.
    pub fn check_dominance(&self) -> Result<()> {
        let p = self.dim();
        let mut strict = vec![false; p];
        for i in 0..p {
            let diag = self.matrix[(i, i)].abs();
            let off: f64 = (0..p).filter(|&j| j != i).map(|j| self.matrix[(i, j)].abs()).sum();
            let slack = 1e-12 * diag.max(1.0);
            if diag + slack < off || diag == 0.0 {
                return Err(Error::InternalConsistency(format!(
                    "row {i} is not diagonally dominant (|a_ii| = {diag}, Σ|a_ij| = {off})"
                )));
            }
            strict[i] = diag > off + slack;
        }
        // Every row must reach a strictly dominant row through nonzero entries.
        let mut reached = strict.clone();
        let mut queue: Vec<usize> = (0..p).filter(|&i| strict[i]).collect();
        while let Some(i) = queue.pop() {
            for j in 0..p {
                if !reached[j] && self.matrix[(j, i)] != 0.0 {
                    reached[j] = true;
                    queue.push(j);
                }
            }
        }
        match reached.iter().position(|r| !r) {
            Some(i) => Err(Error::InternalConsistency(format!(
                "row {i} is not connected to any strictly dominant row"
            ))),
            None => Ok(()),
        }
    }

    /// `‖A·s − b‖∞` over both coordinates.
    pub fn residual(&self, positions: &[Point]) -> f64 {
        let xs = DVector::from_iterator(positions.len(), positions.iter().map(|p| p.x));
        let ys = DVector::from_iterator(positions.len(), positions.iter().map(|p| p.y));
        let rx = &self.matrix * xs - &self.bx;
        let ry = &self.matrix * ys - &self.by;
        rx.amax().max(ry.amax())
    }
}

/// Assembles the stationarity system for `topology` with the given flows.
///
/// Row `i` (Steiner slot `i`): diagonal `2·Σ in-flows`, `−f` for each Steiner
/// in-neighbour with flow `f`, `−Σ in-flows` for a Steiner out-neighbour;
/// terminal neighbours contribute to the right-hand sides.
pub fn assemble_system(instance: &Instance, topology: &Topology, flows: &Flows) -> Result<SteinerSystem> {
    assemble_weighted(instance, topology, flows.as_slice())
}

/// Same as [`assemble_system`] with an arbitrary positive weight on the
/// out-edge of every node, so that the objective is `Σ weight·|e|²`.
pub(crate) fn assemble_weighted(instance: &Instance, topology: &Topology, weights: &[f64]) -> Result<SteinerSystem> {
    let n = topology.n_sources();
    let p = topology.n_steiner();
    let mut matrix = DMatrix::zeros(p, p);
    let mut bx = DVector::zeros(p);
    let mut by = DVector::zeros(p);
    let row = |v: usize| v - n - 1;
    for (c, par) in topology.edges() {
        let w = weights[c];
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InternalConsistency(format!("edge weight {w} on {}", topology.kind(c))));
        }
        match (topology.is_steiner(c), topology.is_steiner(par)) {
            (true, true) => {
                let (i, j) = (row(c), row(par));
                matrix[(i, i)] += w;
                matrix[(j, j)] += w;
                matrix[(i, j)] -= w;
                matrix[(j, i)] -= w;
            }
            (true, false) => {
                let i = row(c);
                let x = instance.terminal(par);
                matrix[(i, i)] += w;
                bx[i] += w * x.x;
                by[i] += w * x.y;
            }
            (false, true) => {
                let j = row(par);
                let x = instance.terminal(c);
                matrix[(j, j)] += w;
                bx[j] += w * x.x;
                by[j] += w * x.y;
            }
            (false, false) => {}
        }
    }
    Ok(SteinerSystem { matrix, bx, by, nodes: (n + 1..n + 1 + p).collect() })
}

/// Solves `A·s = b` for both coordinates by LU decomposition with partial
/// pivoting.
pub fn solve_positions(system: &SteinerSystem) -> Result<Vec<Point>> {
    let p = system.dim();
    if p == 0 {
        return Ok(Vec::new());
    }
    system.check_dominance()?;
    let mut rhs = DMatrix::zeros(p, 2);
    rhs.set_column(0, &system.bx);
    rhs.set_column(1, &system.by);
    let sol = system
        .matrix
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InternalConsistency("singular Steiner system".into()))?;
    let positions: Vec<Point> = (0..p).map(|i| Point::new(sol[(i, 0)], sol[(i, 1)])).collect();
    let bnorm = system.bx.amax().max(system.by.amax());
    let res = system.residual(&positions);
    if !(res <= 1e-9 * (1.0 + bnorm)) {
        return Err(Error::InternalConsistency(format!("solution residual {res:e} too large")));
    }
    Ok(positions)
}

/// Locally minimal embedding of any valid topology (Steiner degree ≥ 2, any
/// positive supplies).
pub fn solve_topology(instance: &Instance, topology: &Topology) -> Result<SolvedTree> {
    let flows = compute_flows(topology, instance.supplies())?;
    let system = assemble_system(instance, topology, &flows)?;
    let positions = solve_positions(&system)?;
    SolvedTree::new(instance.clone(), topology.clone(), positions)
}

/// Steiner positions minimising `Σ weight·|e|²` for per-node out-edge weights.
pub(crate) fn solve_weighted(instance: &Instance, topology: &Topology, weights: &[f64]) -> Result<Vec<Point>> {
    let system = assemble_weighted(instance, topology, weights)?;
    solve_positions(&system)
}

/// Locally minimal embedding of `skeleton` with `beads` degree-two Steiner
/// points on its edges.
///
/// Beads on a locally minimal tree are equally spaced along a straight
/// segment, so an edge of flow `f` with `p` beads costs `f·ℓ²/(p + 1)` and
/// only the skeleton's Steiner points remain as unknowns. Returns their
/// positions and `L` of the beaded tree.
pub fn solve_beaded(
    instance: &Instance,
    skeleton: &Topology,
    flows: &Flows,
    beads: &BeadVector,
) -> Result<(Vec<Point>, f64)> {
    let mut weights = flows.as_slice().to_vec();
    for ((v, _), &b) in skeleton.edges().zip(&beads.0) {
        weights[v] /= b as f64 + 1.0;
    }
    let steiner = solve_weighted(instance, skeleton, &weights)?;
    let n = skeleton.n_sources();
    let pos = |v: usize| if skeleton.is_terminal(v) { instance.terminal(v) } else { steiner[v - n - 1] };
    let cost = skeleton.edges().map(|(v, p)| weights[v] * sq_dist(pos(v), pos(p))).sum();
    Ok((steiner, cost))
}
