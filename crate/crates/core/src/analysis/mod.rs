//! Costs, optimality certificates, splits and bounds.

mod bounds;
mod certificates;
mod split;

pub use bounds::{
    beaded_spanning_tree, lower_bound_path, optimal_bead_count, path_lower_bound, steiner_count_bound,
    BeadedSpanningTree,
};
pub use certificates::{
    check_adjacent_collinearity, check_angles, check_centroid_certificate, check_degree_window,
    check_overlapping_edges, AngleViolation, CentroidCheck, CollinearityCheck, DegreeViolation, Overlap,
};
pub use split::{apply_split, SplitOutcome, SplitSpec};

use crate::tree::SolvedTree;

/// `L(T) = Σ f(e)·|e|²`, summed from the tree's positions and flows.
pub fn cost(tree: &SolvedTree) -> f64 {
    tree.recompute_cost()
}

/// `L_c(T) = L(T) + c·|S|`.
pub fn cost_node_weighted(tree: &SolvedTree, c: f64) -> f64 {
    cost(tree) + c * tree.steiner_count() as f64
}
