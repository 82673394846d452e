//! Reidemeister moves as β-move sequences on tangle graphs.
//!
//! Each move is a short script of raw β reductions and expansions (plus loop
//! bookkeeping), recorded in the returned trace. Sites are given by λ gates
//! (for the crossings being removed) or strands (for those being created).

use super::{KnotError, Sign};
use crate::graph::{EdgeId, Endpoint, Graph, NodeId, Role};
use crate::moves::{
    expand_step, raw_expand, raw_reduce, redex_at_lambda, reduce_step, ExpandSite, MoveTrace, Redex,
    Step, Strand,
};

/// Which way a kink's petal runs.
///
/// Chirality `A`: the λ gate's variable output feeds its own application
/// gate's `ain` (the petal leaves the over passage and enters the under one).
/// Chirality `B`: the application gate's output feeds the λ gate's `in`.
/// Kinks inserted with chirality `A` get sign `+`, with `B` sign `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    A,
    B,
}

impl Chirality {
    pub fn sign(self) -> Sign {
        match self {
            Chirality::A => Sign::Positive,
            Chirality::B => Sign::Negative,
        }
    }
}

/// R1 site: an existing kink to remove (by its λ gate) or a strand on which
/// to insert one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R1Site {
    Kink(NodeId),
    Strand(Strand),
}

/// R2a site: two crossings to remove (by λ gate, the first one upstream on
/// the over strand), or two strands to lay one over the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R2Site {
    Crossings { first: NodeId, second: NodeId },
    Strands { over: Strand, under: Strand },
}

/// R3a direction. `Forward` turns the braid σ1σ2σ1 into σ2σ1σ2 (the three
/// crossings given in braid order); `Backward` is its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum R3Direction {
    Forward,
    Backward,
}

/// Where a crossing created by a move gets its sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    New(Sign),
    /// It is the image of the crossing at this (now removed) λ gate.
    Moved(NodeId),
}

/// The result of a Reidemeister move.
#[derive(Debug, Clone)]
pub struct KnotMove {
    pub graph: Graph,
    pub trace: MoveTrace,
    /// Crossings created by the move, in diagram order.
    pub created: Vec<(Redex, Provenance)>,
}

fn site(msg: String) -> KnotError {
    KnotError::Site(msg)
}

fn crossing_at(g: &Graph, lambda: NodeId) -> Result<Redex, KnotError> {
    redex_at_lambda(g, lambda).ok_or_else(|| site(format!("{lambda} is not the λ gate of a crossing")))
}

fn edge(g: &Graph, n: NodeId, r: Role) -> Result<EdgeId, KnotError> {
    g.edge_at(n, r).ok_or_else(|| site(format!("{n}.{r} is not connected")))
}

fn feeds(g: &Graph, from: (NodeId, Role), to: (NodeId, Role)) -> bool {
    g.neighbor(from.0, from.1) == Some(&Endpoint::Port(to.0, to.1))
}

fn reduce(g: &mut Graph, trace: &mut MoveTrace, r: &Redex) -> Result<(), KnotError> {
    raw_reduce(g, r)?;
    trace.push(reduce_step(r));
    Ok(())
}

fn expand(g: &mut Graph, trace: &mut MoveTrace, over: Strand, under: Strand) -> Result<Redex, KnotError> {
    let s = ExpandSite::Pair { over, under };
    let step = expand_step(g, &s)?;
    let r = raw_expand(g, &s)?;
    trace.push(step);
    Ok(r)
}

fn add_loop(g: &mut Graph, trace: &mut MoveTrace) {
    g.add_loops(1);
    trace.push(Step::AddLoop);
}

/// R1: removes the kink at a λ gate (one β reduction, then elimination of
/// the petal loop it leaves) or inserts a kink on a strand (a loop is added
/// and braided into the strand by one β expansion).
///
/// Removing the kink of a closed one-crossing unknot leaves one loop: the
/// component itself.
pub fn reidemeister_r1(g: &Graph, at: R1Site, chirality: Chirality) -> Result<KnotMove, KnotError> {
    let mut out = g.clone();
    let mut trace = MoveTrace::new();
    let mut created = Vec::new();
    match at {
        R1Site::Kink(l) => {
            let r = crossing_at(g, l)?;
            let shaped = match chirality {
                Chirality::A => feeds(g, (l, Role::VOut), (r.application, Role::Ain)),
                Chirality::B => feeds(g, (r.application, Role::Out), (l, Role::In)),
            };
            if !shaped {
                return Err(site(format!("{l} is not a kink of chirality {chirality:?}")));
            }
            reduce(&mut out, &mut trace, &r)?;
            out.remove_loop()?;
            trace.push(Step::ElimLoop);
        }
        R1Site::Strand(s) => {
            if let Strand::Edge(e) = s {
                if g.edge(e).is_none() {
                    return Err(site(format!("edge {e} is not present")));
                }
            }
            add_loop(&mut out, &mut trace);
            let (over, under) = match chirality {
                Chirality::A => (s, Strand::Loop),
                Chirality::B => (Strand::Loop, s),
            };
            let r = expand(&mut out, &mut trace, over, under)?;
            created.push((r, Provenance::New(chirality.sign())));
        }
    }
    Ok(KnotMove {
        graph: out,
        trace,
        created,
    })
}

/// R2a with both strands oriented the same way. Removal reduces the two
/// crossings in order (two β moves); insertion lays `over` across `under`
/// with two β expansions, the first crossing positive, the second negative.
pub fn reidemeister_r2a(g: &Graph, at: R2Site) -> Result<KnotMove, KnotError> {
    let mut out = g.clone();
    let mut trace = MoveTrace::new();
    let mut created = Vec::new();
    match at {
        R2Site::Crossings { first, second } => {
            let r1 = crossing_at(g, first)?;
            let r2 = crossing_at(g, second)?;
            if first == second {
                return Err(site("the two crossings must differ".into()));
            }
            if !feeds(g, (first, Role::VOut), (second, Role::In)) {
                return Err(site(format!("{first}.vout does not feed {second}.in")));
            }
            if !feeds(g, (r1.application, Role::Out), (r2.application, Role::Ain)) {
                return Err(site(format!(
                    "{}.out does not feed {}.ain",
                    r1.application, r2.application
                )));
            }
            reduce(&mut out, &mut trace, &r1)?;
            reduce(&mut out, &mut trace, &r2)?;
        }
        R2Site::Strands { over, under } => {
            if over == under && over != Strand::Loop {
                return Err(site("over and under must be different strands".into()));
            }
            let second = expand(&mut out, &mut trace, under, over)?;
            let over_seg = edge(&out, second.application, Role::Ain)?;
            let under_seg = edge(&out, second.lambda, Role::In)?;
            let first = expand(&mut out, &mut trace, Strand::Edge(over_seg), Strand::Edge(under_seg))?;
            created.push((first, Provenance::New(Sign::Positive)));
            created.push((second, Provenance::New(Sign::Negative)));
        }
    }
    Ok(KnotMove {
        graph: out,
        trace,
        created,
    })
}

/// The six crossing-boundary edges of an R3a site must be distinct and must
/// lead outside the three crossings.
fn check_boundary(g: &Graph, nodes: &[NodeId], edges: &[EdgeId]) -> Result<(), KnotError> {
    let mut seen = std::collections::BTreeSet::new();
    for &e in edges {
        if !seen.insert(e) {
            return Err(site(format!("boundary edge {e} is used twice")));
        }
        let edge = g.edge(e).expect("looked up from a port");
        let inside = |p: &Endpoint| p.node().is_some_and(|n| nodes.contains(&n));
        if inside(&edge.source) && inside(&edge.target) {
            return Err(site(format!("boundary edge {e} stays inside the site")));
        }
    }
    Ok(())
}

/// R3a: slides the bottom strand of three mutually crossing strands across
/// the crossing of the other two, as three β reductions followed by three β
/// expansions. `lambdas` are the λ gates of the three crossings in braid
/// order. Each new crossing inherits the sign of the crossing between the
/// same two strands.
pub fn reidemeister_r3a(g: &Graph, lambdas: [NodeId; 3], direction: R3Direction) -> Result<KnotMove, KnotError> {
    let [x1, x2, x3] = lambdas.map(|l| crossing_at(g, l));
    let (x1, x2, x3) = (x1?, x2?, x3?);
    if x1.lambda == x2.lambda || x2.lambda == x3.lambda || x1.lambda == x3.lambda {
        return Err(site("the three crossings must differ".into()));
    }
    let nodes = [x1.lambda, x1.application, x2.lambda, x2.application, x3.lambda, x3.application];
    let (l1, a1, l2, a2, l3, a3) = (nodes[0], nodes[1], nodes[2], nodes[3], nodes[4], nodes[5]);
    let need = |from: (NodeId, Role), to: (NodeId, Role)| {
        if feeds(g, from, to) {
            Ok(())
        } else {
            Err(site(format!("{}.{} does not feed {}.{}", from.0, from.1, to.0, to.1)))
        }
    };
    // Entry points of the top (a), middle (b) and bottom (c) strands.
    let (ea, eb, ec, exits) = match direction {
        R3Direction::Forward => {
            need((l1, Role::VOut), (l2, Role::In))?;
            need((a1, Role::Out), (l3, Role::In))?;
            need((a2, Role::Out), (a3, Role::Ain))?;
            (
                edge(g, l1, Role::In)?,
                edge(g, a1, Role::Ain)?,
                edge(g, a2, Role::Ain)?,
                [edge(g, l2, Role::VOut)?, edge(g, l3, Role::VOut)?, edge(g, a3, Role::Out)?],
            )
        }
        R3Direction::Backward => {
            need((l1, Role::VOut), (a3, Role::Ain))?;
            need((a1, Role::Out), (a2, Role::Ain))?;
            need((l2, Role::VOut), (l3, Role::In))?;
            (
                edge(g, l2, Role::In)?,
                edge(g, l1, Role::In)?,
                edge(g, a1, Role::Ain)?,
                [edge(g, a2, Role::Out)?, edge(g, l3, Role::VOut)?, edge(g, a3, Role::Out)?],
            )
        }
    };
    check_boundary(g, &nodes, &[ea, eb, ec, exits[0], exits[1], exits[2]])?;
    let source = |e: EdgeId| g.edge(e).expect("checked").source.clone();
    let (sa, sb, sc) = (source(ea), source(eb), source(ec));

    let mut out = g.clone();
    let mut trace = MoveTrace::new();
    for r in [&x1, &x2, &x3] {
        reduce(&mut out, &mut trace, r)?;
    }
    let strand_at = |g: &Graph, p: &Endpoint| -> Result<Strand, KnotError> {
        g.edge_at_endpoint(p)
            .map(Strand::Edge)
            .ok_or_else(|| site(format!("no edge at {p}")))
    };
    let port = |g: &Graph, n: NodeId, r: Role| strand_at(g, &Endpoint::Port(n, r));
    let created = match direction {
        R3Direction::Forward => {
            let (b, c) = (strand_at(&out, &sb)?, strand_at(&out, &sc)?);
            let y1 = expand(&mut out, &mut trace, b, c)?;
            let (a, c1) = (strand_at(&out, &sa)?, port(&out, y1.application, Role::Out)?);
            let y2 = expand(&mut out, &mut trace, a, c1)?;
            let (a1, b1) = (port(&out, y2.lambda, Role::VOut)?, port(&out, y1.lambda, Role::VOut)?);
            let y3 = expand(&mut out, &mut trace, a1, b1)?;
            vec![
                (y1, Provenance::Moved(x3.lambda)),
                (y2, Provenance::Moved(x2.lambda)),
                (y3, Provenance::Moved(x1.lambda)),
            ]
        }
        R3Direction::Backward => {
            let (a, b) = (strand_at(&out, &sa)?, strand_at(&out, &sb)?);
            let z1 = expand(&mut out, &mut trace, a, b)?;
            let (a1, c) = (port(&out, z1.lambda, Role::VOut)?, strand_at(&out, &sc)?);
            let z2 = expand(&mut out, &mut trace, a1, c)?;
            let (b1, c1) = (port(&out, z1.application, Role::Out)?, port(&out, z2.application, Role::Out)?);
            let z3 = expand(&mut out, &mut trace, b1, c1)?;
            vec![
                (z1, Provenance::Moved(x3.lambda)),
                (z2, Provenance::Moved(x2.lambda)),
                (z3, Provenance::Moved(x1.lambda)),
            ]
        }
    };
    Ok(KnotMove {
        graph: out,
        trace,
        created,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_isomorphic, parse_glf};
    use crate::knot::{classify, decode_to_pd, encode_diagram, fixtures, parse_pd, Classification};
    use crate::moves::MoveKind;

    fn strand() -> Graph {
        parse_glf("edge in:a out:b\n").unwrap()
    }

    #[test]
    fn r1_removal_leaves_the_bare_strand() {
        for c in [Chirality::A, Chirality::B] {
            let (g, _) = encode_diagram(&fixtures::kink(c)).unwrap();
            let m = reidemeister_r1(&g, R1Site::Kink(NodeId(0)), c).unwrap();
            assert!(is_isomorphic(&m.graph, &strand()).is_some(), "{c:?}");
            assert_eq!(m.trace.beta_count(), 1);
            assert_eq!(m.trace.count(MoveKind::ElimLoop), 1);
            assert_eq!(m.graph.loop_count(), 0);
        }
    }

    #[test]
    fn r1_chirality_is_checked() {
        let (g, _) = encode_diagram(&fixtures::kink(Chirality::A)).unwrap();
        assert!(matches!(
            reidemeister_r1(&g, R1Site::Kink(NodeId(0)), Chirality::B),
            Err(KnotError::Site(_))
        ));
        assert!(reidemeister_r1(&g, R1Site::Kink(NodeId(1)), Chirality::A).is_err());
    }

    #[test]
    fn r1_insert_then_remove() {
        for c in [Chirality::A, Chirality::B] {
            let g = strand();
            let e = g.in_leaf("a").unwrap();
            let ins = reidemeister_r1(&g, R1Site::Strand(Strand::Edge(e)), c).unwrap();
            let (kink, _) = encode_diagram(&fixtures::kink(c)).unwrap();
            assert!(is_isomorphic(&ins.graph, &kink).is_some(), "{c:?}");
            assert_eq!(ins.created[0].1, Provenance::New(c.sign()));
            let rem = reidemeister_r1(&ins.graph, R1Site::Kink(ins.created[0].0.lambda), c).unwrap();
            assert!(is_isomorphic(&rem.graph, &g).is_some());
        }
    }

    #[test]
    fn r1_on_a_closed_unknot() {
        let d = parse_pd("x + a k k a\n").unwrap();
        let (g, _) = encode_diagram(&d).unwrap();
        let m = reidemeister_r1(&g, R1Site::Kink(NodeId(0)), Chirality::A).unwrap();
        assert_eq!(m.graph.node_count(), 0);
        assert_eq!(m.graph.loop_count(), 1);
        let back = reidemeister_r1(&m.graph, R1Site::Strand(Strand::Loop), Chirality::A).unwrap();
        assert!(is_isomorphic(&back.graph, &g).is_some());
    }

    #[test]
    fn r2a_removal_and_insertion() {
        let (lhs, _) = encode_diagram(&fixtures::r2a_lhs()).unwrap();
        let (rhs, _) = encode_diagram(&fixtures::r2a_rhs()).unwrap();
        let m = reidemeister_r2a(&lhs, R2Site::Crossings { first: NodeId(0), second: NodeId(2) }).unwrap();
        assert_eq!(m.trace.beta_count(), 2);
        assert!(is_isomorphic(&m.graph, &rhs).is_some());

        let over = Strand::Edge(rhs.in_leaf("a").unwrap());
        let under = Strand::Edge(rhs.in_leaf("c").unwrap());
        let ins = reidemeister_r2a(&rhs, R2Site::Strands { over, under }).unwrap();
        assert_eq!(ins.trace.beta_count(), 2);
        assert!(is_isomorphic(&ins.graph, &lhs).is_some());
        let [(first, _), (second, _)] = ins.created[..] else { panic!() };
        let back = reidemeister_r2a(&ins.graph, R2Site::Crossings { first: first.lambda, second: second.lambda }).unwrap();
        assert!(is_isomorphic(&back.graph, &rhs).is_some());
    }

    #[test]
    fn r2a_rejects_wrong_sites() {
        let (lhs, _) = encode_diagram(&fixtures::r2a_lhs()).unwrap();
        assert!(reidemeister_r2a(&lhs, R2Site::Crossings { first: NodeId(2), second: NodeId(0) }).is_err());
        let (t, _) = encode_diagram(&fixtures::trefoil()).unwrap();
        assert!(reidemeister_r2a(&t, R2Site::Crossings { first: NodeId(0), second: NodeId(2) }).is_err());
    }

    #[test]
    fn r3a_both_ways() {
        let (lhs, lb) = encode_diagram(&fixtures::r3a_lhs()).unwrap();
        let (rhs, rb) = encode_diagram(&fixtures::r3a_rhs()).unwrap();
        let lambdas = [NodeId(0), NodeId(2), NodeId(4)];
        let fwd = reidemeister_r3a(&lhs, lambdas, R3Direction::Forward).unwrap();
        assert_eq!(fwd.trace.beta_count(), 6);
        assert!(is_isomorphic(&fwd.graph, &rhs).is_some());
        let binding = lb.update(&fwd.graph, &fwd.created);
        assert_eq!(binding.len(), 3);
        let d = decode_to_pd(&fwd.graph, &binding).unwrap();
        assert!(d.equal_up_to_relabeling(&fixtures::r3a_rhs()), "{d}");

        let bwd = reidemeister_r3a(&rhs, lambdas, R3Direction::Backward).unwrap();
        assert_eq!(bwd.trace.beta_count(), 6);
        assert!(is_isomorphic(&bwd.graph, &lhs).is_some());
        let d = decode_to_pd(&bwd.graph, &rb.update(&bwd.graph, &bwd.created)).unwrap();
        assert!(d.equal_up_to_relabeling(&fixtures::r3a_lhs()), "{d}");
        assert_eq!(classify(&bwd.graph), Classification::Tangle);
    }

    #[test]
    fn r3a_rejects_wrong_sites() {
        let (lhs, _) = encode_diagram(&fixtures::r3a_lhs()).unwrap();
        let lambdas = [NodeId(0), NodeId(2), NodeId(4)];
        assert!(reidemeister_r3a(&lhs, lambdas, R3Direction::Backward).is_err());
        assert!(reidemeister_r3a(&lhs, [NodeId(2), NodeId(0), NodeId(4)], R3Direction::Forward).is_err());
    }
}
