//! The knot sector: oriented tangle diagrams encoded as graphs made only of
//! crossing macros (a λ gate whose `aout` feeds an application gate's `fin`),
//! with Reidemeister moves expressed as β-move sequences.
//!
//! At a crossing, the over strand runs through the λ gate (`in → vout`) and
//! the under strand through the application gate (`ain → out`). The sign of
//! a crossing is not visible in the graph, so it travels alongside it in a
//! [`CrossingBinding`].

mod braid;
mod diagram;
pub mod fixtures;
mod reidemeister;
mod script;

pub use braid::{braid_closure, braid_tangle, BraidLetter};
pub use diagram::{emit_pd, parse_pd, ArcId, BoundaryPoint, Crossing, Sign, TangleDiagram};
pub use reidemeister::{
    reidemeister_r1, reidemeister_r2a, reidemeister_r3a, Chirality, KnotMove, Provenance, R1Site,
    R2Site, R3Direction,
};
pub use script::{apply_knot_script, KnotScript, KnotStep};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{find_matches, validate, EdgeId, Endpoint, Graph, GraphError, NodeId, NodeKind, Role};
use crate::moves::{MoveError, Redex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid diagram: {0}")]
    Invalid(String),
    #[error("not a tangle graph: {0}")]
    NotATangle(String),
    #[error("crossing signs do not match the graph: {0}")]
    Binding(String),
    #[error("Reidemeister site mismatch: {0}")]
    Site(String),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("line {line} (`{step}`): {source}")]
    AtStep {
        line: usize,
        step: String,
        source: Box<KnotError>,
    },
}

impl From<GraphError> for KnotError {
    fn from(e: GraphError) -> Self {
        KnotError::Move(MoveError::Graph(e))
    }
}

/// A crossing of an encoded diagram and its sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundCrossing {
    pub lambda: NodeId,
    pub application: NodeId,
    pub sign: Sign,
}

/// The signs of a graph's crossings, in diagram order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossingBinding {
    crossings: Vec<BoundCrossing>,
}

impl CrossingBinding {
    pub fn new(crossings: Vec<BoundCrossing>) -> Self {
        Self { crossings }
    }

    pub fn iter(&self) -> impl Iterator<Item = &BoundCrossing> + '_ {
        self.crossings.iter()
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn sign_of(&self, lambda: NodeId) -> Option<Sign> {
        self.crossings.iter().find(|c| c.lambda == lambda).map(|c| c.sign)
    }

    /// The binding after a move produced `g`: entries whose crossing is gone
    /// are dropped and the move's new crossings are appended. A crossing the
    /// move carried over from an old one inherits that one's sign.
    pub fn update(&self, g: &Graph, created: &[(Redex, Provenance)]) -> CrossingBinding {
        let fresh: BTreeSet<NodeId> = created.iter().map(|(r, _)| r.lambda).collect();
        let live: BTreeSet<(NodeId, NodeId)> =
            detect_crossings(g).iter().map(|r| (r.lambda, r.application)).collect();
        let mut out: Vec<BoundCrossing> = self
            .crossings
            .iter()
            .filter(|c| !fresh.contains(&c.lambda) && live.contains(&(c.lambda, c.application)))
            .copied()
            .collect();
        for (r, prov) in created {
            let sign = match prov {
                Provenance::New(s) => Some(*s),
                Provenance::Moved(old) => self.sign_of(*old),
            };
            if let Some(sign) = sign {
                out.push(BoundCrossing {
                    lambda: r.lambda,
                    application: r.application,
                    sign,
                });
            }
        }
        CrossingBinding { crossings: out }
    }

    /// One `# crossing <λ> <app> <sign>` comment line per crossing, so the
    /// binding can ride along inside a GLF file.
    pub fn to_comments(&self) -> String {
        self.crossings
            .iter()
            .map(|c| format!("# crossing {} {} {}\n", c.lambda, c.application, c.sign))
            .collect()
    }

    /// Reads the `# crossing` comment lines of a GLF text.
    pub fn from_comments(text: &str) -> Result<CrossingBinding, KnotError> {
        let mut crossings = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let Some(rest) = raw.trim_start().strip_prefix('#') else {
                continue;
            };
            let words: Vec<&str> = rest.split_whitespace().collect();
            if words.first() != Some(&"crossing") {
                continue;
            }
            let err = |message: String| KnotError::Parse {
                line: idx + 1,
                column: 1,
                message,
            };
            let [_, l, a, s] = words[..] else {
                return Err(err("expected `# crossing <lambda> <application> <+|->`".into()));
            };
            crossings.push(BoundCrossing {
                lambda: l.parse().map_err(err)?,
                application: a.parse().map_err(err)?,
                sign: s.parse().map_err(err)?,
            });
        }
        Ok(CrossingBinding { crossings })
    }
}

/// Encodes a diagram: one crossing macro per crossing (crossing `i` gets the
/// λ gate `n(2i)` and the application gate `n(2i+1)`), one edge per arc,
/// a leaf per boundary point and a node-free loop per crossing-free circle.
pub fn encode_diagram(d: &TangleDiagram) -> Result<(Graph, CrossingBinding), KnotError> {
    d.validate()?;
    let mut g = Graph::new();
    let mut producer: BTreeMap<&str, Endpoint> = BTreeMap::new();
    let mut consumer: BTreeMap<&str, Endpoint> = BTreeMap::new();
    let mut order: Vec<&str> = Vec::new();
    let mut binding = Vec::new();
    for c in &d.crossings {
        let l = g.add_node(NodeKind::Lambda);
        let a = g.add_node(NodeKind::Application);
        g.connect(Endpoint::Port(l, Role::AOut), Endpoint::Port(a, Role::Fin))?;
        consumer.insert(&c.over_in, Endpoint::Port(l, Role::In));
        producer.insert(&c.over_out, Endpoint::Port(l, Role::VOut));
        consumer.insert(&c.under_in, Endpoint::Port(a, Role::Ain));
        producer.insert(&c.under_out, Endpoint::Port(a, Role::Out));
        order.extend([&c.over_in, &c.over_out, &c.under_in, &c.under_out].map(String::as_str));
        binding.push(BoundCrossing {
            lambda: l,
            application: a,
            sign: c.sign,
        });
    }
    for b in &d.boundary_in {
        producer.insert(&b.arc, Endpoint::InLeaf(b.leaf.clone()));
        order.push(&b.arc);
    }
    for b in &d.boundary_out {
        consumer.insert(&b.arc, Endpoint::OutLeaf(b.leaf.clone()));
        order.push(&b.arc);
    }
    let mut done = BTreeSet::new();
    for arc in order {
        if done.insert(arc) {
            g.connect(producer[arc].clone(), consumer[arc].clone())?;
        }
    }
    g.add_loops(d.circles);
    Ok((g, CrossingBinding::new(binding)))
}

/// The crossing macro as a pattern graph.
fn crossing_pattern() -> Graph {
    let mut p = Graph::new();
    let l = p.add_node(NodeKind::Lambda);
    let a = p.add_node(NodeKind::Application);
    let edges = [
        (Endpoint::Port(l, Role::AOut), Endpoint::Port(a, Role::Fin)),
        (Endpoint::InLeaf("over_in".into()), Endpoint::Port(l, Role::In)),
        (Endpoint::Port(l, Role::VOut), Endpoint::OutLeaf("over_out".into())),
        (Endpoint::InLeaf("under_in".into()), Endpoint::Port(a, Role::Ain)),
        (Endpoint::Port(a, Role::Out), Endpoint::OutLeaf("under_out".into())),
    ];
    for (s, t) in edges {
        p.connect(s, t).expect("pattern is well formed");
    }
    p
}

/// Every occurrence of the crossing macro, found by subgraph matching and
/// ordered by λ gate id. Each is reported as the β-redex it forms.
pub fn detect_crossings(g: &Graph) -> Vec<Redex> {
    let pattern = crossing_pattern();
    let (pl, pa) = (NodeId(0), NodeId(1));
    let mut out: Vec<Redex> = find_matches(g, &pattern)
        .into_iter()
        .map(|m| {
            let connecting = *m.edges.values().next().expect("pattern has one inner edge");
            Redex {
                lambda: m.nodes[&pl],
                application: m.nodes[&pa],
                edge: connecting,
            }
        })
        .collect();
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// Built from crossing macros and strands, with boundary leaves.
    Tangle,
    /// A tangle without leaves.
    Link,
    Neither,
}

impl Classification {
    /// Tangles and links: graphs in the knot sector.
    pub fn is_tangle_graph(self) -> bool {
        self != Classification::Neither
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Tangle => "TANGLE",
            Classification::Link => "LINK",
            Classification::Neither => "NEITHER",
        })
    }
}

fn tangle_violation(g: &Graph) -> Option<String> {
    if let Some(v) = validate(g).first() {
        return Some(v.to_string());
    }
    for (n, kind) in g.nodes() {
        let paired = match kind {
            NodeKind::Lambda => matches!(
                g.neighbor(n, Role::AOut),
                Some(Endpoint::Port(a, Role::Fin)) if g.kind(*a) == Some(&NodeKind::Application)
            ),
            NodeKind::Application => matches!(
                g.neighbor(n, Role::Fin),
                Some(Endpoint::Port(l, Role::AOut)) if g.kind(*l) == Some(&NodeKind::Lambda)
            ),
            other => return Some(format!("{n} is a {} gate", other.tag())),
        };
        if !paired {
            return Some(format!("{n} is not part of a crossing"));
        }
    }
    for (_, e) in g.edges() {
        let connecting = matches!(e.source, Endpoint::Port(_, Role::AOut));
        let strand_source = matches!(
            e.source,
            Endpoint::Port(_, Role::VOut | Role::Out) | Endpoint::InLeaf(_)
        );
        let strand_target = matches!(
            e.target,
            Endpoint::Port(_, Role::In | Role::Ain) | Endpoint::OutLeaf(_)
        );
        if !connecting && !(strand_source && strand_target) {
            return Some(format!("edge {} → {} is not on a strand", e.source, e.target));
        }
    }
    None
}

/// Classifies a graph by local checks: every λ and application gate sits in
/// exactly one crossing macro, there are no other gates, and every other
/// edge lies on a strand. A tangle without leaves is a link.
pub fn classify(g: &Graph) -> Classification {
    if tangle_violation(g).is_some() {
        Classification::Neither
    } else if g.in_leaf_names().next().is_none() && g.out_leaf_names().next().is_none() {
        Classification::Link
    } else {
        Classification::Tangle
    }
}

/// Reads a tangle graph back as a diagram, taking crossing order and signs
/// from `binding`. Arcs at leaves are named after the leaf; inner arcs get
/// fresh names `k1, k2, …`.
pub fn decode_to_pd(g: &Graph, binding: &CrossingBinding) -> Result<TangleDiagram, KnotError> {
    if let Some(why) = tangle_violation(g) {
        return Err(KnotError::NotATangle(why));
    }
    let found: BTreeSet<(NodeId, NodeId)> =
        detect_crossings(g).iter().map(|r| (r.lambda, r.application)).collect();
    let bound: BTreeSet<(NodeId, NodeId)> =
        binding.iter().map(|c| (c.lambda, c.application)).collect();
    if bound.len() != binding.len() {
        return Err(KnotError::Binding("a crossing is listed twice".into()));
    }
    if let Some((l, _)) = found.difference(&bound).next() {
        return Err(KnotError::Binding(format!("no sign for the crossing at {l}")));
    }
    if let Some((l, a)) = bound.difference(&found).next() {
        return Err(KnotError::Binding(format!("{l}/{a} is not a crossing of the graph")));
    }

    let mut names: BTreeMap<EdgeId, String> = BTreeMap::new();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    for (id, e) in g.edges() {
        if let Endpoint::InLeaf(x) = &e.source {
            names.insert(id, x.clone());
            taken.insert(x.clone());
        }
    }
    for (id, e) in g.edges() {
        if let Endpoint::OutLeaf(y) = &e.target {
            if !names.contains_key(&id) && taken.insert(y.clone()) {
                names.insert(id, y.clone());
            }
        }
    }
    // Every remaining edge touches a crossing port.
    let ports = |c: &BoundCrossing| {
        [
            (c.lambda, Role::In),
            (c.lambda, Role::VOut),
            (c.application, Role::Ain),
            (c.application, Role::Out),
        ]
        .map(|(n, r)| g.edge_at(n, r).expect("validated graph"))
    };
    let mut next = 0;
    for c in binding.iter() {
        for id in ports(c) {
            names.entry(id).or_insert_with(|| loop {
                next += 1;
                let k = format!("k{next}");
                if taken.insert(k.clone()) {
                    break k;
                }
            });
        }
    }
    let crossings = binding
        .iter()
        .map(|c| {
            let [oi, oo, ui, uo] = ports(c).map(|id| names[&id].clone());
            Crossing {
                sign: c.sign,
                over_in: oi,
                over_out: oo,
                under_in: ui,
                under_out: uo,
            }
        })
        .collect();
    let boundary = |leaves: Vec<(&str, EdgeId)>| -> Vec<BoundaryPoint> {
        leaves
            .into_iter()
            .map(|(leaf, id)| BoundaryPoint {
                arc: names[&id].clone(),
                leaf: leaf.to_string(),
            })
            .collect()
    };
    let boundary_in = boundary(
        g.in_leaf_names()
            .map(|l| (l, g.in_leaf(l).expect("listed leaf")))
            .collect(),
    );
    let boundary_out = boundary(
        g.out_leaf_names()
            .map(|l| (l, g.out_leaf(l).expect("listed leaf")))
            .collect(),
    );
    Ok(TangleDiagram {
        crossings,
        boundary_in,
        boundary_out,
        circles: g.loop_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{emit_glf, is_isomorphic, parse_glf};
    use crate::moves::find_beta_redexes;

    fn pd(text: &str) -> TangleDiagram {
        parse_pd(text).unwrap()
    }

    #[test]
    fn one_crossing_shape() {
        let (g, b) = encode_diagram(&pd("x + a b c d\n")).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 5);
        assert_eq!(g.in_leaf_names().count() + g.out_leaf_names().count(), 4);
        assert_eq!(b.len(), 1);
        assert_eq!(b.sign_of(NodeId(0)), Some(Sign::Positive));
        let expect = parse_glf(
            "node n0 LAM\nnode n1 APP\nedge n0.aout n1.fin\nedge in:a n0.in\nedge n0.vout out:b\n\
             edge in:c n1.ain\nedge n1.out out:d\n",
        )
        .unwrap();
        assert!(is_isomorphic(&g, &expect).is_some());
        assert_eq!(classify(&g), Classification::Tangle);
    }

    #[test]
    fn trefoil_shape() {
        let (g, _) = encode_diagram(&fixtures::trefoil()).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(detect_crossings(&g).len(), 3);
        assert_eq!(g.edge_count(), 9);
        assert_eq!(g.in_leaf_names().count() + g.out_leaf_names().count(), 0);
        assert_eq!(classify(&g), Classification::Link);
    }

    #[test]
    fn unknot_is_a_loop() {
        let (g, b) = encode_diagram(&pd("circles 1\n")).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.loop_count(), 1);
        assert!(b.is_empty());
        assert_eq!(classify(&g), Classification::Link);
    }

    #[test]
    fn lambda_graphs_are_not_tangles() {
        let id = parse_glf("node n0 LAM\nedge n0.vout n0.in\nedge n0.aout out:root\n").unwrap();
        assert_eq!(classify(&id), Classification::Neither);
        let fo = parse_glf("node n0 FO\nedge in:a n0.in\nedge n0.lout out:b\nedge n0.rout out:c\n").unwrap();
        assert_eq!(classify(&fo), Classification::Neither);
        let dangling = parse_glf("node n0 LAM\nnode n1 APP\nedge n0.aout n1.fin\n").unwrap_err();
        let _ = dangling;
    }

    #[test]
    fn crossings_coincide_with_redexes() {
        for d in [fixtures::trefoil(), fixtures::figure_eight(), fixtures::hopf(), fixtures::r3a_lhs()] {
            let (g, _) = encode_diagram(&d).unwrap();
            assert_eq!(detect_crossings(&g), find_beta_redexes(&g));
        }
    }

    #[test]
    fn decode_inverts_encode() {
        for d in [
            fixtures::trefoil(),
            fixtures::figure_eight(),
            fixtures::hopf(),
            fixtures::kink(Chirality::A),
            fixtures::kink(Chirality::B),
            fixtures::r2a_rhs(),
            pd("x - a b c a\nbin c\nbout b\ncircles 2\n"),
        ] {
            let (g, b) = encode_diagram(&d).unwrap();
            let back = decode_to_pd(&g, &b).unwrap();
            assert!(back.equal_up_to_relabeling(&d), "{d}\nvs\n{back}");
        }
    }

    #[test]
    fn decode_reports_binding_problems() {
        let (g, b) = encode_diagram(&fixtures::hopf()).unwrap();
        let partial = CrossingBinding::new(b.iter().take(1).copied().collect());
        assert!(matches!(decode_to_pd(&g, &partial), Err(KnotError::Binding(m)) if m.contains("no sign")));
        let mut extra: Vec<BoundCrossing> = b.iter().copied().collect();
        extra.push(BoundCrossing {
            lambda: NodeId(7),
            application: NodeId(8),
            sign: Sign::Negative,
        });
        assert!(decode_to_pd(&g, &CrossingBinding::new(extra)).is_err());
        let id = parse_glf("node n0 LAM\nedge n0.vout n0.in\nedge n0.aout out:root\n").unwrap();
        assert!(matches!(decode_to_pd(&id, &CrossingBinding::default()), Err(KnotError::NotATangle(_))));
    }

    #[test]
    fn decode_avoids_leaf_name_clashes() {
        // The arc entering at `a` and the one leaving at `a` are different arcs.
        let d = pd("x + a k c m\nbin a c\nbout k m=a\n");
        let (g, b) = encode_diagram(&d).unwrap();
        let back = decode_to_pd(&g, &b).unwrap();
        assert!(back.equal_up_to_relabeling(&d));
    }

    #[test]
    fn binding_survives_glf_comments() {
        let (g, b) = encode_diagram(&fixtures::trefoil()).unwrap();
        let text = format!("{}{}", b.to_comments(), emit_glf(&g));
        let g2 = parse_glf(&text).unwrap();
        let b2 = CrossingBinding::from_comments(&text).unwrap();
        assert_eq!(b, b2);
        assert!(decode_to_pd(&g2, &b2).unwrap().equal_up_to_relabeling(&fixtures::trefoil()));
    }

    #[test]
    fn smoothing_joins_over_in_to_under_out() {
        let (g, _) = encode_diagram(&pd("x + a b c d\n")).unwrap();
        let r = detect_crossings(&g)[0];
        let (h, _) = crate::moves::beta_reduce(&g, &r).unwrap();
        let expect = parse_glf("edge in:a out:d\nedge in:c out:b\n").unwrap();
        assert!(is_isomorphic(&h, &expect).is_some());
    }
}
