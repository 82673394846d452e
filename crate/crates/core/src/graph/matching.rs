//! Subgraph matching for connected, node-containing patterns.
//!
//! A pattern is an ordinary [`Graph`] whose leaves stand for the numbered
//! boundary of the subgraph. Leaf-side edges of the pattern match any edge of
//! the host graph, including one whose other end is also matched (this is how
//! degenerate β sites are found).

use std::collections::{BTreeMap, HashSet, VecDeque};

use super::{Direction, EdgeId, Endpoint, Graph, NodeId};

/// An embedding of a pattern into a host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphMatch {
    /// Pattern node → host node.
    pub nodes: BTreeMap<NodeId, NodeId>,
    /// Pattern node-to-node edge → host edge.
    pub edges: BTreeMap<EdgeId, EdgeId>,
    /// Pattern leaf → host edge crossing the boundary there.
    pub boundary: BTreeMap<Endpoint, EdgeId>,
}

/// All kind-, role- and orientation-preserving embeddings of `pattern` in `g`,
/// ordered by smallest bound host node id.
///
/// Returns nothing for patterns without nodes or with more than one component.
pub fn find_matches(g: &Graph, pattern: &Graph) -> Vec<SubgraphMatch> {
    let Some((anchor, anchor_kind)) = pattern.nodes().next() else {
        return Vec::new();
    };
    let mut out: Vec<SubgraphMatch> = g
        .nodes()
        .filter(|(_, k)| *k == anchor_kind)
        .filter_map(|(v, _)| embed(g, pattern, anchor, v))
        .collect();
    out.sort_by(|a, b| {
        let key = |m: &SubgraphMatch| {
            let mut ids: Vec<NodeId> = m.nodes.values().copied().collect();
            ids.sort();
            ids
        };
        key(a).cmp(&key(b))
    });
    out.dedup_by(|a, b| a.nodes == b.nodes);
    out
}

fn embed(g: &Graph, pattern: &Graph, anchor: NodeId, image: NodeId) -> Option<SubgraphMatch> {
    let mut nodes = BTreeMap::new();
    let mut used = HashSet::new();
    let mut edges = BTreeMap::new();
    let mut boundary = BTreeMap::new();
    let mut queue = VecDeque::from([(anchor, image)]);
    nodes.insert(anchor, image);
    used.insert(image);

    while let Some((p, v)) = queue.pop_front() {
        let kind = pattern.kind(p)?;
        if g.kind(v)? != kind {
            return None;
        }
        for role in kind.roles() {
            let Some(pe) = pattern.edge_at(p, *role) else {
                continue;
            };
            let ge = g.edge_at(v, *role)?;
            let pedge = pattern.edge(pe)?;
            let far = if role.direction() == Direction::Output {
                &pedge.target
            } else {
                &pedge.source
            };
            match far {
                Endpoint::Port(q, r) => {
                    let gfar = g.neighbor(v, *role)?;
                    let Endpoint::Port(w, rw) = gfar else {
                        return None;
                    };
                    if rw != r {
                        return None;
                    }
                    match nodes.get(q) {
                        Some(bound) if bound == w => {}
                        Some(_) => return None,
                        None => {
                            if !used.insert(*w) {
                                return None;
                            }
                            nodes.insert(*q, *w);
                            queue.push_back((*q, *w));
                        }
                    }
                    edges.insert(pe, ge);
                }
                leaf => {
                    boundary.insert(leaf.clone(), ge);
                }
            }
        }
    }

    if nodes.len() != pattern.node_count() {
        return None;
    }
    Some(SubgraphMatch {
        nodes,
        edges,
        boundary,
    })
}

/// Re-reads the matched region of `g` as a standalone graph using the
/// pattern's node ids and leaf names. For a genuine match the result is
/// isomorphic to the pattern.
pub fn extract_match(g: &Graph, m: &SubgraphMatch, pattern: &Graph) -> Graph {
    let mut out = Graph::new();
    let back: BTreeMap<NodeId, NodeId> = m.nodes.iter().map(|(p, v)| (*v, *p)).collect();
    for (p, v) in &m.nodes {
        if let Some(kind) = g.kind(*v) {
            out.insert_node(*p, kind.clone()).ok();
        }
    }
    for (p, v) in &m.nodes {
        let Some(kind) = g.kind(*v) else { continue };
        for role in kind.roles() {
            let Some(pe) = pattern.edge_at(*p, *role) else {
                continue;
            };
            let Some(pedge) = pattern.edge(pe) else {
                continue;
            };
            let here = Endpoint::Port(*p, *role);
            let internal = m.edges.contains_key(&pe);
            let far = match g.neighbor(*v, *role) {
                Some(Endpoint::Port(w, r)) if internal => match back.get(w) {
                    Some(q) => Endpoint::Port(*q, *r),
                    None => continue,
                },
                _ => {
                    if role.direction() == Direction::Output {
                        pedge.target.clone()
                    } else {
                        pedge.source.clone()
                    }
                }
            };
            // Internal edges are added once, from their source side.
            if role.direction() == Direction::Output {
                out.connect(here, far).ok();
            } else if far.node().is_none() {
                out.connect(far, here).ok();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_isomorphic, parse_glf};

    fn redex_pattern() -> Graph {
        parse_glf(
            "node n0 LAM\nnode n1 APP\nedge n0.aout n1.fin\n\
             edge in:1 n0.in\nedge n0.vout out:2\nedge n1.out out:3\nedge in:4 n1.ain\n",
        )
        .unwrap()
    }

    #[test]
    fn finds_the_single_redex() {
        // (λx.x) y
        let g = parse_glf(
            "node n0 APP\nnode n1 LAM\nedge n1.aout n0.fin\nedge in:y n0.ain\n\
             edge n0.out out:root\nedge n1.vout n1.in\n",
        )
        .unwrap();
        let pattern = redex_pattern();
        let found = find_matches(&g, &pattern);
        assert_eq!(found.len(), 1);
        let m = &found[0];
        assert_eq!(m.nodes[&NodeId(0)], NodeId(1));
        assert_eq!(m.nodes[&NodeId(1)], NodeId(0));
        // Boundary 1 and 2 both bind the self edge of the λ.
        assert_eq!(
            m.boundary[&Endpoint::InLeaf("1".into())],
            m.boundary[&Endpoint::OutLeaf("2".into())]
        );
        assert!(is_isomorphic(&extract_match(&g, m, &pattern), &pattern).is_some());
    }

    #[test]
    fn no_match_without_the_connecting_edge() {
        let g = parse_glf("edge in:a out:b\n").unwrap();
        assert!(find_matches(&g, &redex_pattern()).is_empty());
        let empty = Graph::new();
        assert!(find_matches(&g, &empty).is_empty());
    }
}
