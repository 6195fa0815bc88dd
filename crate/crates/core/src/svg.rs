//! Static SVG drawings of solved trees.
//!
//! Terminals are filled circles, Steiner points open circles, and every edge
//! is a line labelled with its flow. The output depends only on the tree.

use std::fmt::Write;

use crate::geometry::{bounding_box, Point};
use crate::tree::SolvedTree;

const SIZE: f64 = 600.0;
const RADIUS: f64 = 5.0;

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

/// Renders `tree` into a square viewport fitted to all points with a 10%
/// margin; `y` grows upward as in the plane.
pub fn render(tree: &SolvedTree) -> String {
    let topo = tree.topology();
    let points: Vec<Point> = (0..topo.n_nodes()).map(|v| tree.position(v)).collect();
    let (lo, hi) = bounding_box(points.iter().copied()).expect("a tree has a sink");
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let extent = if extent > 0.0 { extent } else { 1.0 };
    let margin = 0.1 * extent;
    let scale = SIZE / (extent + 2.0 * margin);
    let cx = (lo.x + hi.x) / 2.0;
    let cy = (lo.y + hi.y) / 2.0;
    let map = |p: Point| (SIZE / 2.0 + (p.x - cx) * scale, SIZE / 2.0 - (p.y - cy) * scale);

    let mut out = String::new();
    let size = num(SIZE);
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();

    writeln!(out, r#"<g stroke="black" stroke-width="2" stroke-linecap="round">"#).unwrap();
    for e in tree.edges() {
        let (x1, y1) = map(e.from);
        let (x2, y2) = map(e.to);
        writeln!(
            out,
            r#"<line class="edge" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();

    writeln!(out, r#"<g font-family="sans-serif" font-size="12" fill="dimgray" text-anchor="middle">"#).unwrap();
    for e in tree.edges() {
        let (x, y) = map(e.from.midpoint(e.to));
        writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, num(x), num(y - 4.0), num(e.flow)).unwrap();
    }
    writeln!(out, "</g>").unwrap();

    for v in 0..topo.n_nodes() {
        let (x, y) = map(points[v]);
        let (class, fill) = if topo.is_steiner(v) { ("steiner", "white") } else { ("terminal", "black") };
        writeln!(
            out,
            r#"<circle class="{class}" cx="{}" cy="{}" r="{}" fill="{fill}" stroke="black" stroke-width="1.5"><title>{}</title></circle>"#,
            num(x),
            num(y),
            num(RADIUS),
            topo.kind(v)
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::solve_topology;
    use crate::fixtures;
    use crate::topology::{Instance, Topology};

    fn count(svg: &str, needle: &str) -> usize {
        svg.matches(needle).count()
    }

    #[test]
    fn worked_example_elements() {
        let (inst, topo) = fixtures::worked_example();
        let svg = render(&solve_topology(&inst, &topo).unwrap());
        assert_eq!(count(&svg, r#"class="terminal""#), 4);
        assert_eq!(count(&svg, r#"class="steiner""#), 2);
        assert_eq!(count(&svg, "<line"), 5);
        assert_eq!(count(&svg, "<text"), 5);
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg, render(&solve_topology(&inst, &topo).unwrap()));
    }

    #[test]
    fn star_and_coincident_points() {
        let inst = Instance::new(vec![Point::new(1.0, 1.0), Point::new(1.0, 1.0)], Point::new(2.0, 1.0)).unwrap();
        let svg = render(&solve_topology(&inst, &Topology::star(2)).unwrap());
        assert_eq!(count(&svg, r#"class="steiner""#), 0);
        assert_eq!(count(&svg, "<line"), 2);
        // z1 → z2 has zero length.
        let topo = Topology::from_parents(2, vec![Some(1), Some(2), None]).unwrap();
        let svg = render(&solve_topology(&inst, &topo).unwrap());
        assert_eq!(count(&svg, "<line"), 2);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }

    #[test]
    fn y_axis_points_up() {
        let inst = Instance::new(vec![Point::new(0.0, 10.0)], Point::ORIGIN).unwrap();
        let svg = render(&solve_topology(&inst, &Topology::star(1)).unwrap());
        // Source first: it sits at the top margin, the sink at the bottom.
        let cys: Vec<&str> = svg.match_indices("cy=\"").map(|(i, _)| svg[i + 4..].split('"').next().unwrap()).collect();
        assert_eq!(cys, vec!["50", "550"]);
    }
}
