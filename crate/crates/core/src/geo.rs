//! Linear-time geometric construction for full topologies with degree-three
//! Steiner points and unit supplies.
//!
//! Pairs of terminals hanging off a common Steiner point are repeatedly
//! replaced by a quasi-source: a formal mass point such that the Steiner
//! point lies at `C(w(q)·q, w(s)·v)`, where `v` is its out-neighbour and
//! `w(s)` the flow on its out-edge. Once only one quasi-source is left, the
//! Steiner points are placed in reverse merge order.

use crate::error::{Error, Result};
use crate::geometry::{weighted_mean, MassPoint, Point};
use crate::topology::{compute_flows, Instance, Topology};
use crate::tree::SolvedTree;

/// A synthetic terminal standing in for a Steiner point and the subtree
/// feeding it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiSource {
    pub position: Point,
    /// Formal mass `w(q)`; it has no flow interpretation.
    pub mass: f64,
    /// Additive mass `w(s)` of the Steiner point this quasi-source replaced.
    pub replaced_steiner_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeKind {
    SourceSource,
    QuasiSource,
    QuasiQuasi,
}

/// One input of a merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeInput {
    /// A source, by node index.
    Source(usize),
    /// The quasi-source produced by an earlier step, by step index.
    Quasi(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeStep {
    pub kind: MergeKind,
    pub inputs: [MergeInput; 2],
    /// Node index of the eliminated Steiner point.
    pub steiner: usize,
    pub result: QuasiSource,
}

#[derive(Debug, Clone)]
pub struct GeoSolution {
    pub tree: SolvedTree,
    pub steps: Vec<MergeStep>,
    /// Merges plus placements; always `2(n − 1)`.
    pub operations: usize,
}

fn require_unit(z: &MassPoint) -> Result<()> {
    if z.mass() != 1.0 {
        return Err(Error::UnsupportedWeights(format!(
            "the geometric solver needs unit supplies, got mass {}; use the algebraic solver",
            z.mass()
        )));
    }
    Ok(())
}

/// Two unit sources on a common Steiner point merge into their midpoint with
/// mass 2.
pub fn merge_sources(z1: MassPoint, z2: MassPoint) -> Result<QuasiSource> {
    require_unit(&z1)?;
    require_unit(&z2)?;
    Ok(QuasiSource {
        position: z1.position.midpoint(z2.position),
        mass: 2.0,
        replaced_steiner_mass: 2.0,
    })
}

/// A quasi-source `q` (mass `w₀`, replaced Steiner mass `w₁`) and a unit
/// source `z` merge into
/// `q + (w₀ + w₁)/(w₀ + w₁ + w₀w₁) · (z − q)` with mass
/// `(w₀ + w₁ + w₀w₁)/(w₀ + w₁)`.
pub fn merge_quasi_source(q: &QuasiSource, z: MassPoint) -> Result<QuasiSource> {
    require_unit(&z)?;
    let (w0, w1) = (q.mass, q.replaced_steiner_mass);
    let num = w0 + w1 + w0 * w1;
    let t = (w0 + w1) / num;
    Ok(QuasiSource {
        position: q.position.lerp(z.position, t),
        mass: num / (w0 + w1),
        replaced_steiner_mass: w1 + z.mass(),
    })
}

/// Two quasi-sources `q₁` (mass `w₀₁`, replaced mass `w₁`) and `q₂` (`w₀₂`,
/// `w₂`) merge into `q₁ + t·(q₂ − q₁)` with
///
/// ```text
/// t    = w₀₂·w₂·(w₁ + w₀₁) / D
/// mass = D / ((w₁ + w₀₁)(w₂ + w₀₂))
/// D    = w₁w₂(w₀₁ + w₀₂) + w₀₁w₀₂(w₁ + w₂)
/// ```
///
/// Each side acts on the new Steiner point as a mass `wᵢ·w₀ᵢ/(wᵢ + w₀ᵢ)`
/// located at `qᵢ`; `t` is the share of the second side.
pub fn merge_quasi_quasi(q1: &QuasiSource, q2: &QuasiSource) -> Result<QuasiSource> {
    let (w01, w1) = (q1.mass, q1.replaced_steiner_mass);
    let (w02, w2) = (q2.mass, q2.replaced_steiner_mass);
    let d = w1 * w2 * (w01 + w02) + w01 * w02 * (w1 + w2);
    let t = w02 * w2 * (w1 + w01) / d;
    let mass = d / ((w1 + w01) * (w2 + w02));
    let position = q1.position.lerp(q2.position, t);
    if !(position.is_finite() && mass.is_finite() && mass > 0.0) {
        return Err(Error::NonFinite("quasi-source merge".into()));
    }
    Ok(QuasiSource { position, mass, replaced_steiner_mass: w1 + w2 })
}

/// Locally minimal tree for a full topology whose Steiner points all have
/// degree three, for unit supplies, in `Θ(n)` steps.
pub fn solve_full_topology(instance: &Instance, topology: &Topology) -> Result<GeoSolution> {
    if topology.n_sources() != instance.n() {
        return Err(Error::UnsupportedTopology("source count differs from the instance".into()));
    }
    if !instance.has_unit_supplies() {
        return Err(Error::UnsupportedWeights(
            "the geometric solver needs unit supplies; use the algebraic solver".into(),
        ));
    }
    let flows = compute_flows(topology, instance.supplies())?;
    let children = topology.children();
    let n = instance.n();
    let sink = topology.sink();
    for v in 0..topology.n_nodes() {
        let deg = children[v].len() + usize::from(v != sink);
        let want = if topology.is_terminal(v) { 1 } else { 3 };
        if deg != want {
            return Err(Error::UnsupportedTopology(format!(
                "{} has degree {deg}; the geometric solver needs a full topology with degree-3 Steiner points",
                topology.kind(v)
            )));
        }
    }

    let mut steps: Vec<MergeStep> = Vec::with_capacity(n.saturating_sub(1));
    // Step index of the quasi-source that replaced each Steiner node.
    let mut step_of = vec![usize::MAX; topology.n_nodes()];

    // Post-order over Steiner nodes by an explicit-stack depth-first search
    // from the sink.
    let mut stack: Vec<(usize, bool)> = children[sink].iter().map(|&c| (c, false)).collect();
    while let Some((v, expanded)) = stack.pop() {
        if !topology.is_steiner(v) {
            continue;
        }
        if !expanded {
            stack.push((v, true));
            for &c in children[v].iter().rev() {
                stack.push((c, false));
            }
            continue;
        }
        let (a, b) = (children[v][0], children[v][1]);
        let input = |c: usize| {
            if topology.is_steiner(c) {
                MergeInput::Quasi(step_of[c])
            } else {
                MergeInput::Source(c)
            }
        };
        let unit = |c: usize| MassPoint::unit(instance.terminal(c));
        let (kind, inputs, result) = match (input(a), input(b)) {
            (MergeInput::Source(x), MergeInput::Source(y)) => {
                (MergeKind::SourceSource, [input(a), input(b)], merge_sources(unit(x), unit(y))?)
            }
            (MergeInput::Quasi(i), MergeInput::Source(y)) | (MergeInput::Source(y), MergeInput::Quasi(i)) => (
                MergeKind::QuasiSource,
                [MergeInput::Quasi(i), MergeInput::Source(y)],
                merge_quasi_source(&steps[i].result, unit(y))?,
            ),
            (MergeInput::Quasi(i), MergeInput::Quasi(j)) => (
                MergeKind::QuasiQuasi,
                [input(a), input(b)],
                merge_quasi_quasi(&steps[i].result, &steps[j].result)?,
            ),
        };
        step_of[v] = steps.len();
        steps.push(MergeStep { kind, inputs, steiner: v, result });
    }

    // Back-tracking: the last merge sits next to the sink; every other
    // Steiner point is placed against its already placed out-neighbour,
    // weighted by the flow on the connecting edge.
    let mut positions = vec![Point::ORIGIN; topology.n_steiner()];
    let mut placements = 0;
    for step in steps.iter().rev() {
        let v = step.steiner;
        let out = topology.parent(v).expect("Steiner points have an out-edge");
        let out_pos = if out == sink { instance.sink() } else { positions[out - n - 1] };
        positions[v - n - 1] = weighted_mean([(step.result.position, step.result.mass), (out_pos, flows.out(v))]);
        placements += 1;
    }
    let operations = steps.len() + placements;
    let tree = SolvedTree::new(instance.clone(), topology.clone(), positions)?;
    Ok(GeoSolution { tree, steps, operations })
}
