//! Boundary-labeled isomorphism.
//!
//! Every port carries exactly one edge, so fixing the image of one node of a
//! connected component forces the image of the whole component. Components
//! touching a leaf are anchored by the leaf name; closed components try each
//! candidate of the same kind.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::{Endpoint, Graph, NodeId};

pub type NodeMapping = BTreeMap<NodeId, NodeId>;

/// Returns a kind-, role-, decoration-, leaf-name- and loop-count-preserving
/// node bijection from `g1` to `g2`, if one exists.
pub fn is_isomorphic(g1: &Graph, g2: &Graph) -> Option<NodeMapping> {
    if g1.loop_count() != g2.loop_count()
        || g1.node_count() != g2.node_count()
        || g1.edge_count() != g2.edge_count()
        || !g1.in_leaf_names().eq(g2.in_leaf_names())
        || !g1.out_leaf_names().eq(g2.out_leaf_names())
    {
        return None;
    }
    let mut kinds1: Vec<_> = g1.nodes().map(|(_, k)| k).collect();
    let mut kinds2: Vec<_> = g2.nodes().map(|(_, k)| k).collect();
    kinds1.sort();
    kinds2.sort();
    if kinds1 != kinds2 {
        return None;
    }
    let strands = |g: &Graph| -> BTreeSet<(Endpoint, Endpoint)> {
        g.edges()
            .filter(|(_, e)| e.source.node().is_none() && e.target.node().is_none())
            .map(|(_, e)| (e.source.clone(), e.target.clone()))
            .collect()
    };
    if strands(g1) != strands(g2) {
        return None;
    }

    let mut state = State::default();

    // Leaf-anchored components first: the leaf name pins the image.
    for (_, e) in g1.edges() {
        let (leaf, port) = match (&e.source, &e.target) {
            (leaf @ (Endpoint::InLeaf(_) | Endpoint::OutLeaf(_)), Endpoint::Port(n, r))
            | (Endpoint::Port(n, r), leaf @ (Endpoint::InLeaf(_) | Endpoint::OutLeaf(_))) => {
                (leaf, (*n, *r))
            }
            _ => continue,
        };
        let e2 = g2.edge(g2.edge_at_endpoint(leaf)?)?;
        let other = if &e2.source == leaf { &e2.target } else { &e2.source };
        let Endpoint::Port(v, r2) = other else {
            return None;
        };
        if *r2 != port.1 {
            return None;
        }
        match state.forward.get(&port.0) {
            Some(mapped) if mapped == v => {}
            Some(_) => return None,
            None => state = state.extend(g1, g2, port.0, *v)?,
        }
    }

    // Closed components: try each unused candidate of the same kind.
    let by_kind: HashMap<_, Vec<NodeId>> = g2.nodes().fold(HashMap::new(), |mut acc, (id, k)| {
        acc.entry(k).or_default().push(id);
        acc
    });
    for (u, kind) in g1.nodes() {
        if state.forward.contains_key(&u) {
            continue;
        }
        let candidates = by_kind.get(kind)?;
        state = candidates
            .iter()
            .filter(|v| !state.used.contains(v))
            .find_map(|v| state.extend(g1, g2, u, *v))?;
    }

    Some(state.forward)
}

#[derive(Clone, Default)]
struct State {
    forward: NodeMapping,
    used: HashSet<NodeId>,
}

impl State {
    /// Maps `u ↦ v` and everything it forces; `None` on any contradiction.
    fn extend(&self, g1: &Graph, g2: &Graph, u: NodeId, v: NodeId) -> Option<State> {
        let mut next = self.clone();
        let mut queue = VecDeque::new();
        next.bind(u, v)?;
        queue.push_back((u, v));
        while let Some((a, b)) = queue.pop_front() {
            let kind = g1.kind(a)?;
            if g2.kind(b)? != kind {
                return None;
            }
            for role in kind.roles() {
                match (g1.neighbor(a, *role), g2.neighbor(b, *role)) {
                    (None, None) => {}
                    (Some(Endpoint::Port(w1, r1)), Some(Endpoint::Port(w2, r2))) => {
                        if r1 != r2 {
                            return None;
                        }
                        match next.forward.get(w1) {
                            Some(mapped) if mapped == w2 => {}
                            Some(_) => return None,
                            None => {
                                next.bind(*w1, *w2)?;
                                queue.push_back((*w1, *w2));
                            }
                        }
                    }
                    (Some(l1), Some(l2)) if l1.node().is_none() && l1 == l2 => {}
                    _ => return None,
                }
            }
        }
        Some(next)
    }

    fn bind(&mut self, u: NodeId, v: NodeId) -> Option<()> {
        if !self.used.insert(v) {
            return None;
        }
        self.forward.insert(u, v);
        Some(())
    }
}
