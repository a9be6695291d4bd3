//! Small reference graphs used throughout the test suites and the CLI docs.

use crate::graph::FeynmanGraph;

fn legs(g: &mut FeynmanGraph, ports: &[(usize, usize)]) {
    for (i, &at) in ports.iter().enumerate() {
        g.add_external(&format!("f{}", i + 1), at);
    }
}

/// One vertex, a self-loop on adjacent ports 0 and 1, legs on 2 and 3.
/// Planar and regular.
pub fn tadpole_p() -> FeynmanGraph {
    let mut g = FeynmanGraph::new(Some("TADPOLE_P"));
    g.add_vertex();
    g.add_edge((0, 0), (0, 1));
    legs(&mut g, &[(0, 2), (0, 3)]);
    g
}

/// One vertex, a self-loop on opposite ports 0 and 2. Planar but with two
/// broken faces.
pub fn tadpole_x() -> FeynmanGraph {
    let mut g = FeynmanGraph::new(Some("TADPOLE_X"));
    g.add_vertex();
    g.add_edge((0, 0), (0, 2));
    legs(&mut g, &[(0, 1), (0, 3)]);
    g
}

/// Two vertices joined by two parallel edges, four legs, planar regular.
pub fn bubble() -> FeynmanGraph {
    let mut g = FeynmanGraph::new(Some("BUBBLE"));
    g.add_vertex();
    g.add_vertex();
    g.add_edge((0, 0), (1, 1));
    g.add_edge((0, 1), (1, 0));
    legs(&mut g, &[(0, 2), (0, 3), (1, 2), (1, 3)]);
    g
}

/// Same counts as [`bubble`] with the rotation that gives two broken faces.
pub fn bubble_irregular() -> FeynmanGraph {
    let mut g = FeynmanGraph::new(Some("BUBBLE_X"));
    g.add_vertex();
    g.add_vertex();
    g.add_edge((0, 0), (1, 0));
    g.add_edge((0, 1), (1, 1));
    legs(&mut g, &[(0, 2), (0, 3), (1, 2), (1, 3)]);
    g
}

/// Two bubbles in a row: [`bubble`] inserted into a vertex of [`bubble`]
/// respecting the cyclic order. Three vertices, four internal edges.
pub fn chain() -> FeynmanGraph {
    let mut g = FeynmanGraph::new(Some("CHAIN"));
    for _ in 0..3 {
        g.add_vertex();
    }
    g.add_edge((0, 0), (1, 1));
    g.add_edge((0, 1), (1, 0));
    g.add_edge((1, 2), (2, 1));
    g.add_edge((1, 3), (2, 0));
    legs(&mut g, &[(0, 2), (0, 3), (2, 2), (2, 3)]);
    g
}

/// Three bubbles in a row.
pub fn triple_chain() -> FeynmanGraph {
    let mut g = FeynmanGraph::new(Some("CHAIN3"));
    for _ in 0..4 {
        g.add_vertex();
    }
    g.add_edge((0, 0), (1, 1));
    g.add_edge((0, 1), (1, 0));
    g.add_edge((1, 2), (2, 1));
    g.add_edge((1, 3), (2, 0));
    g.add_edge((2, 2), (3, 1));
    g.add_edge((2, 3), (3, 0));
    legs(&mut g, &[(0, 2), (0, 3), (3, 2), (3, 3)]);
    g
}

/// Two vertices, three parallel edges, two legs, planar rotation.
pub fn sunset_p() -> FeynmanGraph {
    let mut g = FeynmanGraph::new(Some("SUNSET_P"));
    g.add_vertex();
    g.add_vertex();
    g.add_edge((0, 0), (1, 2));
    g.add_edge((0, 1), (1, 1));
    g.add_edge((0, 2), (1, 0));
    legs(&mut g, &[(0, 3), (1, 3)]);
    g
}

/// Two vertices, three parallel edges, two legs, genus one.
pub fn sunset_n() -> FeynmanGraph {
    let mut g = FeynmanGraph::new(Some("SUNSET_N"));
    g.add_vertex();
    g.add_vertex();
    g.add_edge((0, 0), (1, 0));
    g.add_edge((0, 1), (1, 1));
    g.add_edge((0, 2), (1, 2));
    legs(&mut g, &[(0, 3), (1, 3)]);
    g
}

/// All named fixtures in a fixed order.
pub fn all() -> Vec<FeynmanGraph> {
    vec![
        tadpole_p(),
        tadpole_x(),
        bubble(),
        bubble_irregular(),
        chain(),
        triple_chain(),
        sunset_p(),
        sunset_n(),
    ]
}
