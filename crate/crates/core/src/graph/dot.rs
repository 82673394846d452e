use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{Endpoint, Graph};

fn dot_id(endpoint: &Endpoint) -> String {
    match endpoint {
        Endpoint::Port(n, _) => n.to_string(),
        leaf => format!("\"{}\"", leaf.to_string().replace('"', "\\\"")),
    }
}

fn role_label(endpoint: &Endpoint) -> String {
    match endpoint {
        Endpoint::Port(_, r) => r.to_string(),
        Endpoint::InLeaf(_) => "IN".into(),
        Endpoint::OutLeaf(_) => "OUT".into(),
    }
}

/// Renders a graph as a Graphviz digraph. Gates are ellipses, leaves are boxes.
pub fn to_dot(g: &Graph) -> String {
    let mut out = String::from("digraph glc {\n");
    writeln!(out, "  // loops: {}", g.loop_count()).unwrap();
    for (id, kind) in g.nodes() {
        writeln!(out, "  {id} [label=\"{kind}\"];").unwrap();
    }
    let mut leaves = BTreeSet::new();
    for (_, e) in g.edges() {
        for end in [&e.source, &e.target] {
            if end.node().is_none() {
                leaves.insert(end.clone());
            }
        }
    }
    for leaf in &leaves {
        writeln!(out, "  {} [shape=box, label=\"{}\"];", dot_id(leaf), leaf).unwrap();
    }
    let mut edges: Vec<_> = g.edges().map(|(_, e)| e).collect();
    edges.sort();
    for e in edges {
        writeln!(
            out,
            "  {} -> {} [label=\"{}→{}\"];",
            dot_id(&e.source),
            dot_id(&e.target),
            role_label(&e.source),
            role_label(&e.target)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_glf;

    #[test]
    fn identity_rendering() {
        let g = parse_glf("node n0 LAM\nedge n0.vout n0.in\nedge n0.aout out:root\n").unwrap();
        let dot = to_dot(&g);
        assert_eq!(
            dot,
            "digraph glc {\n  // loops: 0\n  n0 [label=\"LAM\"];\n  \"out:root\" [shape=box, label=\"out:root\"];\n  n0 -> n0 [label=\"vout→in\"];\n  n0 -> \"out:root\" [label=\"aout→OUT\"];\n}\n"
        );
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot.matches(" -> ").count(), 2);
    }

    #[test]
    fn empty_graph_with_a_loop() {
        let g = parse_glf("loops 1\n").unwrap();
        assert_eq!(to_dot(&g), "digraph glc {\n  // loops: 1\n}\n");
    }
}
