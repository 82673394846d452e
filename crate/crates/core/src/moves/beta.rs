//! The graphic β move.
//!
//! A redex is a λ gate whose `aout` feeds the `fin` of an application gate.
//! Reduction deletes both gates and reconnects their four remaining
//! half-edges: what entered the λ now leaves where the application's output
//! went, and what entered the application's `ain` now leaves where the
//! λ's `vout` went. Expansion is the exact inverse: it cuts two strands and
//! braids a fresh λ/application pair into them.

use std::collections::BTreeMap;

use super::script::{RedexSel, Step, StrandSel};
use super::{MoveError, MoveTrace};
use crate::graph::{EdgeId, Endpoint, Graph, NodeId, NodeKind, Role, Spliced};

/// A β-redex: the λ gate, the application gate and the edge joining them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Redex {
    pub lambda: NodeId,
    pub application: NodeId,
    pub edge: EdgeId,
}

/// One strand taking part in a β-expansion: an existing edge, or one of the
/// graph's node-free loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strand {
    Edge(EdgeId),
    Loop,
}

/// Where a β-expansion is performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpandSite {
    /// Two distinct strands; `over` passes through the λ gate
    /// (entering at `in`, leaving at `vout`), `under` through the application
    /// gate (entering at `ain`, leaving at `out`).
    Pair { over: Strand, under: Strand },
    /// A single strand cut twice. With `over_first` the upstream segment is
    /// the over strand; the application gate then feeds itself
    /// (`out → ain`). Otherwise the λ gate feeds itself (`vout → in`).
    Split { carrier: Strand, over_first: bool },
}

/// Result of [`beta_reduce_detailed`].
#[derive(Debug, Clone)]
pub struct BetaReduction {
    pub graph: Graph,
    pub trace: MoveTrace,
    /// A site at which [`beta_expand_site`] undoes the reduction
    /// (before any loop born by it is eliminated).
    pub inverse: ExpandSite,
    /// Node-free loops created by the reduction and then eliminated.
    pub loops_born: usize,
}

/// Result of a β-expansion.
#[derive(Debug, Clone)]
pub struct BetaExpansion {
    pub graph: Graph,
    pub trace: MoveTrace,
    /// The redex that was created.
    pub redex: Redex,
}

pub(crate) fn redex_at_lambda(g: &Graph, lambda: NodeId) -> Option<Redex> {
    if g.kind(lambda) != Some(&NodeKind::Lambda) {
        return None;
    }
    let edge = g.edge_at(lambda, Role::AOut)?;
    match g.neighbor(lambda, Role::AOut)? {
        Endpoint::Port(a, Role::Fin) if g.kind(*a) == Some(&NodeKind::Application) => {
            Some(Redex {
                lambda,
                application: *a,
                edge,
            })
        }
        _ => None,
    }
}

/// All β-redexes, ordered by λ gate id.
pub fn find_beta_redexes(g: &Graph) -> Vec<Redex> {
    g.nodes()
        .filter(|(_, k)| **k == NodeKind::Lambda)
        .filter_map(|(n, _)| redex_at_lambda(g, n))
        .collect()
}

/// Resolves the redex containing `edge`, which must join a λ's `aout` to an
/// application's `fin`.
pub(crate) fn redex_of_edge(g: &Graph, edge: EdgeId) -> Result<Redex, MoveError> {
    let e = g.edge(edge).ok_or(MoveError::MissingEdge(edge))?;
    match &e.source {
        Endpoint::Port(l, Role::AOut) => redex_at_lambda(g, *l)
            .filter(|r| r.edge == edge)
            .ok_or_else(|| MoveError::NotARedex(format!("{} → {}", e.source, e.target))),
        _ => Err(MoveError::NotARedex(format!("{} → {}", e.source, e.target))),
    }
}

fn check_redex(g: &Graph, redex: &Redex) -> Result<(), MoveError> {
    match redex_at_lambda(g, redex.lambda) {
        Some(found) if found == *redex => Ok(()),
        _ => Err(MoveError::NotARedex(format!(
            "{} / {} via {}",
            redex.lambda, redex.application, redex.edge
        ))),
    }
}

fn port_edge(g: &Graph, node: NodeId, role: Role) -> Result<EdgeId, MoveError> {
    g.edge_at(node, role)
        .ok_or(MoveError::Graph(crate::graph::GraphError::DanglingPort { node, role }))
}

/// Raw graphic β reduction in place. Node-free loops it creates are left in
/// the loop count. Returns the inverse expansion site.
pub(crate) fn raw_reduce(g: &mut Graph, redex: &Redex) -> Result<ExpandSite, MoveError> {
    check_redex(g, redex)?;
    let (l, a) = (redex.lambda, redex.application);
    let into_l = port_edge(g, l, Role::In)?;
    let out_a = port_edge(g, a, Role::Out)?;
    port_edge(g, a, Role::Ain)?;
    port_edge(g, l, Role::VOut)?;

    g.disconnect(redex.edge)?;
    let r1 = g.splice(into_l, out_a)?;
    let into_ain = port_edge(g, a, Role::Ain)?;
    let out_vout = port_edge(g, l, Role::VOut)?;
    let r1_edge = match r1 {
        Spliced::Edge(e) => Some(e),
        Spliced::Loop => None,
    };
    let r1_upstream = r1_edge == Some(into_ain);
    let r1_downstream = r1_edge == Some(out_vout);
    let r2 = g.splice(into_ain, out_vout)?;
    g.remove_node(l)?;
    g.remove_node(a)?;

    let strand = |s: Spliced| match s {
        Spliced::Edge(e) => Strand::Edge(e),
        Spliced::Loop => Strand::Loop,
    };
    Ok(if r1_upstream || r1_downstream {
        ExpandSite::Split {
            carrier: strand(r2),
            over_first: r1_upstream,
        }
    } else {
        ExpandSite::Pair {
            over: strand(r1),
            under: strand(r2),
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Point {
    Real(Endpoint),
    Virtual(usize),
}

fn check_strand(g: &Graph, s: Strand) -> Result<(), MoveError> {
    match s {
        Strand::Edge(e) if g.edge(e).is_none() => Err(MoveError::MissingEdge(e)),
        _ => Ok(()),
    }
}

/// Cuts a strand open, returning its two free ends. A loop has no real ends,
/// so both are the same virtual point.
fn open_strand(g: &mut Graph, s: Strand, counter: &mut usize) -> Result<(Point, Point), MoveError> {
    Ok(match s {
        Strand::Edge(e) => {
            let edge = g.disconnect(e)?;
            (Point::Real(edge.source), Point::Real(edge.target))
        }
        Strand::Loop => {
            g.remove_loop()?;
            *counter += 1;
            (Point::Virtual(*counter), Point::Virtual(*counter))
        }
    })
}

/// Raw graphic β expansion in place; the inverse of [`raw_reduce`].
pub(crate) fn raw_expand(g: &mut Graph, site: &ExpandSite) -> Result<Redex, MoveError> {
    let loops_needed = match *site {
        ExpandSite::Pair { over, under } => {
            check_strand(g, over)?;
            check_strand(g, under)?;
            if let (Strand::Edge(x), Strand::Edge(y)) = (over, under) {
                if x == y {
                    return Err(MoveError::SiteMismatch(format!(
                        "over and under are the same edge {x}; use a split site"
                    )));
                }
            }
            usize::from(over == Strand::Loop) + usize::from(under == Strand::Loop)
        }
        ExpandSite::Split { carrier, .. } => {
            check_strand(g, carrier)?;
            usize::from(carrier == Strand::Loop)
        }
    };
    if g.loop_count() < loops_needed {
        return Err(MoveError::NotEnoughLoops {
            needed: loops_needed,
            available: g.loop_count(),
        });
    }

    let mut next_virtual = 0;
    let (over, under) = match *site {
        ExpandSite::Pair { over, under } => (
            open_strand(g, over, &mut next_virtual)?,
            open_strand(g, under, &mut next_virtual)?,
        ),
        ExpandSite::Split {
            carrier,
            over_first,
        } => {
            let (src, dst) = open_strand(g, carrier, &mut next_virtual)?;
            next_virtual += 1;
            let mid = Point::Virtual(next_virtual);
            let first = (src, mid.clone());
            let second = (mid, dst);
            if over_first {
                (first, second)
            } else {
                (second, first)
            }
        }
    };

    let l = g.add_node(NodeKind::Lambda);
    let a = g.add_node(NodeKind::Application);
    let port = |n: NodeId, r: Role| Point::Real(Endpoint::Port(n, r));
    let mut links = vec![
        (over.0, port(l, Role::In)),
        (port(l, Role::VOut), under.1),
        (under.0, port(a, Role::Ain)),
        (port(a, Role::Out), over.1),
    ];
    // Merge the two halves meeting at each virtual point.
    let mut into: BTreeMap<usize, Point> = BTreeMap::new();
    let mut from: BTreeMap<usize, Point> = BTreeMap::new();
    links.retain(|(s, t)| match (s, t) {
        (_, Point::Virtual(k)) => {
            into.insert(*k, s.clone());
            false
        }
        (Point::Virtual(k), _) => {
            from.insert(*k, t.clone());
            false
        }
        _ => true,
    });
    for (k, s) in into {
        let t = from.remove(&k).expect("every virtual point has two sides");
        links.push((s, t));
    }

    let edge = g.connect(Endpoint::Port(l, Role::AOut), Endpoint::Port(a, Role::Fin))?;
    for (s, t) in links {
        match (s, t) {
            (Point::Real(s), Point::Real(t)) => {
                g.connect(s, t)?;
            }
            _ => unreachable!("each link has a gate port on one side"),
        }
    }
    Ok(Redex {
        lambda: l,
        application: a,
        edge,
    })
}

fn strand_sel(g: &Graph, s: Strand) -> Result<StrandSel, MoveError> {
    match s {
        Strand::Loop => Ok(StrandSel::Loop),
        Strand::Edge(e) => g
            .edge(e)
            .map(|edge| StrandSel::Edge(edge.source.clone()))
            .ok_or(MoveError::MissingEdge(e)),
    }
}

pub(crate) fn expand_step(g: &Graph, site: &ExpandSite) -> Result<Step, MoveError> {
    Ok(match *site {
        ExpandSite::Pair { over, under } => Step::BetaExpand {
            over: strand_sel(g, over)?,
            under: strand_sel(g, under)?,
        },
        ExpandSite::Split {
            carrier,
            over_first,
        } => Step::BetaSplit {
            carrier: strand_sel(g, carrier)?,
            over_first,
        },
    })
}

pub(crate) fn reduce_step(redex: &Redex) -> Step {
    Step::BetaReduce(RedexSel::At(Endpoint::Port(redex.lambda, Role::AOut)))
}

/// β reduction followed by elimination of every node-free loop it creates.
pub fn beta_reduce_detailed(g: &Graph, redex: &Redex) -> Result<BetaReduction, MoveError> {
    let mut out = g.clone();
    let before = out.loop_count();
    let inverse = raw_reduce(&mut out, redex)?;
    let loops_born = out.loop_count() - before;
    let mut trace = MoveTrace::new();
    trace.push(reduce_step(redex));
    for _ in 0..loops_born {
        out.remove_loop()?;
        trace.push(Step::ElimLoop);
    }
    Ok(BetaReduction {
        graph: out,
        trace,
        inverse,
        loops_born,
    })
}

/// β reduction at `redex`. Loops created by the move are eliminated and
/// recorded in the trace.
pub fn beta_reduce(g: &Graph, redex: &Redex) -> Result<(Graph, MoveTrace), MoveError> {
    beta_reduce_detailed(g, redex).map(|r| (r.graph, r.trace))
}

/// β expansion with `over` through the new λ gate and `under` through the new
/// application gate.
///
/// Passing the same edge twice inserts a kink on it: a node-free loop is
/// added and used as the under strand.
pub fn beta_expand(g: &Graph, over: Strand, under: Strand) -> Result<BetaExpansion, MoveError> {
    let mut out = g.clone();
    let mut trace = MoveTrace::new();
    let site = if over == under && over != Strand::Loop {
        out.add_loops(1);
        trace.push(Step::AddLoop);
        ExpandSite::Pair {
            over,
            under: Strand::Loop,
        }
    } else {
        ExpandSite::Pair { over, under }
    };
    let step = expand_step(&out, &site)?;
    let redex = raw_expand(&mut out, &site)?;
    trace.push(step);
    Ok(BetaExpansion {
        graph: out,
        trace,
        redex,
    })
}

/// β expansion at an arbitrary site, including split sites.
pub fn beta_expand_site(g: &Graph, site: &ExpandSite) -> Result<BetaExpansion, MoveError> {
    let mut out = g.clone();
    let step = expand_step(&out, site)?;
    let redex = raw_expand(&mut out, site)?;
    let mut trace = MoveTrace::new();
    trace.push(step);
    Ok(BetaExpansion {
        graph: out,
        trace,
        redex,
    })
}

/// Removes one node-free loop.
pub fn eliminate_loop(g: &Graph) -> Result<Graph, MoveError> {
    let mut out = g.clone();
    out.remove_loop()?;
    Ok(out)
}

/// Adds one node-free loop.
pub fn add_loop(g: &Graph) -> Graph {
    let mut out = g.clone();
    out.add_loops(1);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    impl BetaReduction {
        fn inverse_carrier(&self) -> Strand {
            match self.inverse {
                ExpandSite::Split { carrier, .. } => carrier,
                ExpandSite::Pair { over, .. } => over,
            }
        }
    }
    use crate::graph::{is_isomorphic, parse_glf, validate};

    fn glf(text: &str) -> Graph {
        parse_glf(text).unwrap()
    }

    fn only_redex(g: &Graph) -> Redex {
        let r = find_beta_redexes(g);
        assert_eq!(r.len(), 1);
        r[0]
    }

    #[test]
    fn identity_applied_to_a_leaf() {
        // (λx.x) y → y
        let g = glf("node n0 APP\nnode n1 LAM\nedge n1.aout n0.fin\nedge in:y n0.ain\n\
                     edge n0.out out:root\nedge n1.vout n1.in\n");
        let (h, trace) = beta_reduce(&g, &only_redex(&g)).unwrap();
        assert!(is_isomorphic(&h, &glf("edge in:y out:root\n")).is_some());
        assert_eq!(trace.beta_count(), 1);
        assert_eq!(trace.loops_eliminated(), 0);
    }

    #[test]
    fn reduction_rewires_the_four_half_edges() {
        let g = glf("node n0 LAM\nnode n1 APP\nedge n0.aout n1.fin\n\
                     edge in:1 n0.in\nedge n0.vout out:2\nedge n1.out out:3\nedge in:4 n1.ain\n");
        let (h, _) = beta_reduce(&g, &only_redex(&g)).unwrap();
        assert!(is_isomorphic(&h, &glf("edge in:1 out:3\nedge in:4 out:2\n")).is_some());
    }

    #[test]
    fn expansion_inverts_reduction() {
        let lhs = glf("node n0 LAM\nnode n1 APP\nedge n0.aout n1.fin\n\
                       edge in:1 n0.in\nedge n0.vout out:2\nedge n1.out out:3\nedge in:4 n1.ain\n");
        let red = beta_reduce_detailed(&lhs, &only_redex(&lhs)).unwrap();
        let back = beta_expand_site(&red.graph, &red.inverse).unwrap();
        assert!(is_isomorphic(&back.graph, &lhs).is_some());

        let rhs = glf("edge in:1 out:3\nedge in:4 out:2\n");
        let over = Strand::Edge(rhs.in_leaf("1").unwrap());
        let under = Strand::Edge(rhs.in_leaf("4").unwrap());
        let exp = beta_expand(&rhs, over, under).unwrap();
        assert!(is_isomorphic(&exp.graph, &lhs).is_some());
        let (again, _) = beta_reduce(&exp.graph, &exp.redex).unwrap();
        assert!(is_isomorphic(&again, &rhs).is_some());
    }

    #[test]
    fn kink_removal_leaves_the_strand_and_eliminates_the_loop() {
        // The λ variable feeds the application argument: reducing births a loop.
        let g = glf("node n0 LAM\nnode n1 APP\nedge n0.aout n1.fin\n\
                     edge in:a n0.in\nedge n1.out out:b\nedge n0.vout n1.ain\n");
        let red = beta_reduce_detailed(&g, &only_redex(&g)).unwrap();
        assert_eq!(red.loops_born, 1);
        assert_eq!(red.graph.loop_count(), 0);
        assert!(is_isomorphic(&red.graph, &glf("edge in:a out:b\n")).is_some());
        assert_eq!(red.trace.loops_eliminated(), 1);
    }

    #[test]
    fn same_edge_expansion_is_a_kink() {
        let g = glf("edge in:a out:b\n");
        let e = g.in_leaf("a").unwrap();
        let exp = beta_expand(&g, Strand::Edge(e), Strand::Edge(e)).unwrap();
        assert!(validate(&exp.graph).is_empty());
        assert_eq!(exp.graph.loop_count(), 0);
        assert_eq!(exp.graph.neighbor(exp.redex.lambda, Role::VOut), Some(&Endpoint::Port(exp.redex.application, Role::Ain)));
        let (back, trace) = beta_reduce(&exp.graph, &exp.redex).unwrap();
        assert!(is_isomorphic(&back, &g).is_some());
        assert_eq!(trace.loops_eliminated(), 1);
    }

    #[test]
    fn split_sites_give_self_feeding_gates() {
        let g = glf("edge in:a out:b\n");
        let e = g.in_leaf("a").unwrap();
        for over_first in [true, false] {
            let site = ExpandSite::Split {
                carrier: Strand::Edge(e),
                over_first,
            };
            let exp = beta_expand_site(&g, &site).unwrap();
            assert!(validate(&exp.graph).is_empty());
            let r = exp.redex;
            if over_first {
                assert_eq!(exp.graph.neighbor(r.application, Role::Out), Some(&Endpoint::Port(r.application, Role::Ain)));
            } else {
                assert_eq!(exp.graph.neighbor(r.lambda, Role::VOut), Some(&Endpoint::Port(r.lambda, Role::In)));
            }
            let red = beta_reduce_detailed(&exp.graph, &r).unwrap();
            assert_eq!(red.inverse, ExpandSite::Split { carrier: red.inverse_carrier(), over_first });
            assert!(is_isomorphic(&red.graph, &g).is_some());
        }
    }

    #[test]
    fn loops_as_strands() {
        let g = glf("edge in:a out:b\nloops 2\n");
        let e = g.in_leaf("a").unwrap();
        for (over, under) in [
            (Strand::Edge(e), Strand::Loop),
            (Strand::Loop, Strand::Edge(e)),
            (Strand::Loop, Strand::Loop),
        ] {
            let exp = beta_expand(&g, over, under).unwrap();
            assert!(validate(&exp.graph).is_empty());
            let red = beta_reduce_detailed(&exp.graph, &exp.redex).unwrap();
            let mut raw = red.graph.clone();
            raw.add_loops(red.loops_born);
            let back = beta_expand_site(&raw, &red.inverse).unwrap();
            assert!(is_isomorphic(&back.graph, &exp.graph).is_some());
        }
        let bare = glf("edge in:a out:b\n");
        assert!(matches!(
            beta_expand(&bare, Strand::Loop, Strand::Edge(e)),
            Err(MoveError::NotEnoughLoops { .. })
        ));
    }

    #[test]
    fn stale_redex_is_rejected() {
        let g = glf("edge in:a out:b\n");
        let bogus = Redex {
            lambda: NodeId(0),
            application: NodeId(1),
            edge: EdgeId(0),
        };
        assert!(matches!(beta_reduce(&g, &bogus), Err(MoveError::NotARedex(_))));
    }

    #[test]
    fn omega_self_application_has_one_redex() {
        // (λx.x x)(λx.x x)
        let g = glf("node n0 APP\nnode n1 LAM\nnode n2 APP\nnode n3 FO\nnode n4 LAM\nnode n5 APP\nnode n6 FO\n\
                     edge n0.out out:root\nedge n1.aout n0.fin\nedge n4.aout n0.ain\n\
                     edge n2.out n1.in\nedge n1.vout n3.in\nedge n3.lout n2.fin\nedge n3.rout n2.ain\n\
                     edge n5.out n4.in\nedge n4.vout n6.in\nedge n6.lout n5.fin\nedge n6.rout n5.ain\n");
        assert_eq!(find_beta_redexes(&g).len(), 1);
        let (h, _) = beta_reduce(&g, &only_redex(&g)).unwrap();
        assert!(validate(&h).is_empty());
    }
}
