//! Moves other than β: fan-out restructuring, pruning, global fan-out,
//! fan-out distribution and (ext1).

use std::collections::{BTreeMap, BTreeSet};

use super::{mismatch, MoveError};
use crate::graph::{Direction, EdgeId, Endpoint, Graph, NodeId, NodeKind, Role};

/// Fan-out restructuring moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restructure {
    /// Re-brackets two chained fan-outs (`upper` feeding `lower`), swapping
    /// between the left comb (`upper.lout → lower.in`) and the right comb
    /// (`upper.rout → lower.in`). The order of the three continuations is kept.
    CoAssoc { upper: NodeId, lower: NodeId },
    /// Swaps the two continuations of a fan-out.
    CoComm(NodeId),
}

/// What a prune removes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PruneScope {
    /// A single gate whose outputs are all discarded (for a fan-out: at
    /// least one of them).
    Local(NodeId),
    /// A set of gates with no inputs from outside and whose outputs to the
    /// outside all end in termination gates.
    Global(BTreeSet<NodeId>),
}

fn expect_kind(g: &Graph, n: NodeId, kind: &NodeKind) -> Result<(), MoveError> {
    match g.kind(n) {
        None => Err(MoveError::Graph(crate::graph::GraphError::UnknownNode(n))),
        Some(k) if k == kind => Ok(()),
        Some(k) => Err(mismatch(n, &format!("expected {}, found {}", kind.tag(), k.tag()))),
    }
}

fn edge_at(g: &Graph, n: NodeId, r: Role) -> Result<EdgeId, MoveError> {
    g.edge_at(n, r)
        .ok_or(MoveError::Graph(crate::graph::GraphError::DanglingPort { node: n, role: r }))
}

fn source_of(g: &Graph, e: EdgeId) -> Endpoint {
    g.edge(e).expect("edge id from a port").source.clone()
}

fn target_of(g: &Graph, e: EdgeId) -> Endpoint {
    g.edge(e).expect("edge id from a port").target.clone()
}

pub fn fanout_restructure(g: &Graph, op: Restructure) -> Result<Graph, MoveError> {
    let mut out = g.clone();
    match op {
        Restructure::CoComm(f) => co_comm_in_place(&mut out, f)?,
        Restructure::CoAssoc { upper, lower } => co_assoc_in_place(&mut out, upper, lower)?,
    }
    Ok(out)
}

pub(crate) fn co_comm_in_place(g: &mut Graph, f: NodeId) -> Result<(), MoveError> {
    expect_kind(g, f, &NodeKind::FanOut)?;
    let l = edge_at(g, f, Role::LOut)?;
    let r = edge_at(g, f, Role::ROut)?;
    let lt = g.disconnect(l)?.target;
    let rt = g.disconnect(r)?.target;
    g.connect(Endpoint::Port(f, Role::LOut), rt)?;
    g.connect(Endpoint::Port(f, Role::ROut), lt)?;
    Ok(())
}

pub(crate) fn co_assoc_in_place(g: &mut Graph, upper: NodeId, lower: NodeId) -> Result<(), MoveError> {
    expect_kind(g, upper, &NodeKind::FanOut)?;
    expect_kind(g, lower, &NodeKind::FanOut)?;
    if upper == lower {
        return Err(mismatch(upper, "co-associativity needs two distinct fan-outs"));
    }
    let into_lower = g.neighbor(lower, Role::In).cloned();
    let left_comb = match into_lower {
        Some(Endpoint::Port(u, Role::LOut)) if u == upper => true,
        Some(Endpoint::Port(u, Role::ROut)) if u == upper => false,
        _ => return Err(mismatch(lower, &format!("is not fed by {upper}"))),
    };
    let feed = source_of(g, edge_at(g, upper, Role::In)?);
    let conts: Vec<Endpoint> = if left_comb {
        vec![
            target_of(g, edge_at(g, lower, Role::LOut)?),
            target_of(g, edge_at(g, lower, Role::ROut)?),
            target_of(g, edge_at(g, upper, Role::ROut)?),
        ]
    } else {
        vec![
            target_of(g, edge_at(g, upper, Role::LOut)?),
            target_of(g, edge_at(g, lower, Role::LOut)?),
            target_of(g, edge_at(g, lower, Role::ROut)?),
        ]
    };
    let touches_pair = |e: &Endpoint| matches!(e.node(), Some(n) if n == upper || n == lower);
    if touches_pair(&feed) || conts.iter().any(touches_pair) {
        return Err(mismatch(upper, "the fan-out pair is wired to itself"));
    }
    g.remove_node_and_edges(upper)?;
    g.remove_node_and_edges(lower)?;
    g.insert_node(upper, NodeKind::FanOut)?;
    g.insert_node(lower, NodeKind::FanOut)?;
    let p = Endpoint::Port;
    g.connect(feed, p(upper, Role::In))?;
    let [c0, c1, c2]: [Endpoint; 3] = conts.try_into().expect("three continuations");
    if left_comb {
        // Left comb becomes the right comb.
        g.connect(p(upper, Role::LOut), c0)?;
        g.connect(p(upper, Role::ROut), p(lower, Role::In))?;
        g.connect(p(lower, Role::LOut), c1)?;
        g.connect(p(lower, Role::ROut), c2)?;
    } else {
        g.connect(p(upper, Role::LOut), p(lower, Role::In))?;
        g.connect(p(lower, Role::LOut), c0)?;
        g.connect(p(lower, Role::ROut), c1)?;
        g.connect(p(upper, Role::ROut), c2)?;
    }
    Ok(())
}

fn is_terminated(g: &Graph, n: NodeId, r: Role) -> Option<NodeId> {
    match g.neighbor(n, r)? {
        Endpoint::Port(t, Role::In) if g.kind(*t) == Some(&NodeKind::Termination) && *t != n => {
            Some(*t)
        }
        _ => None,
    }
}

fn terminate(g: &mut Graph, source: Endpoint) -> Result<(), MoveError> {
    let t = g.add_node(NodeKind::Termination);
    g.connect(source, Endpoint::Port(t, Role::In))?;
    Ok(())
}

pub fn prune(g: &Graph, scope: &PruneScope) -> Result<Graph, MoveError> {
    let mut out = g.clone();
    match scope {
        PruneScope::Local(n) => prune_local_in_place(&mut out, *n)?,
        PruneScope::Global(set) => prune_global_in_place(&mut out, set)?,
    }
    Ok(out)
}

/// Local pruning of one gate whose result is discarded.
pub(crate) fn prune_local_in_place(g: &mut Graph, n: NodeId) -> Result<(), MoveError> {
    let kind = g
        .kind(n)
        .cloned()
        .ok_or(MoveError::Graph(crate::graph::GraphError::UnknownNode(n)))?;
    match kind {
        NodeKind::Application => {
            let t = is_terminated(g, n, Role::Out)
                .ok_or_else(|| mismatch(n, "application output is not terminated"))?;
            let f = source_of(g, edge_at(g, n, Role::Fin)?);
            let a = source_of(g, edge_at(g, n, Role::Ain)?);
            if f.node() == Some(n) || a.node() == Some(n) {
                return Err(mismatch(n, "application feeds itself"));
            }
            g.remove_node_and_edges(n)?;
            g.remove_node_and_edges(t)?;
            terminate(g, f)?;
            terminate(g, a)?;
        }
        NodeKind::Lambda => {
            let ta = is_terminated(g, n, Role::AOut)
                .ok_or_else(|| mismatch(n, "λ output is not terminated"))?;
            let tv = is_terminated(g, n, Role::VOut)
                .ok_or_else(|| mismatch(n, "λ variable is used"))?;
            let body = source_of(g, edge_at(g, n, Role::In)?);
            g.remove_node_and_edges(n)?;
            g.remove_node_and_edges(ta)?;
            g.remove_node_and_edges(tv)?;
            terminate(g, body)?;
        }
        NodeKind::FanOut => {
            let tl = is_terminated(g, n, Role::LOut);
            let tr = is_terminated(g, n, Role::ROut);
            match (tl, tr) {
                (Some(tl), Some(tr)) => {
                    let feed = source_of(g, edge_at(g, n, Role::In)?);
                    g.remove_node_and_edges(n)?;
                    g.remove_node_and_edges(tl)?;
                    g.remove_node_and_edges(tr)?;
                    terminate(g, feed)?;
                }
                (Some(t), None) | (None, Some(t)) => {
                    let keep = if tl.is_some() { Role::ROut } else { Role::LOut };
                    let into = edge_at(g, n, Role::In)?;
                    let cont = edge_at(g, n, keep)?;
                    g.remove_node_and_edges(t)?;
                    g.splice(into, cont)?;
                    g.remove_node(n)?;
                }
                (None, None) => return Err(mismatch(n, "no fan-out branch is terminated")),
            }
        }
        NodeKind::Termination | NodeKind::Dilation(_) => {
            return Err(mismatch(n, &format!("{} gates are not pruned", kind.tag())))
        }
    }
    Ok(())
}

/// Removes a closed region whose only exits are termination gates.
pub(crate) fn prune_global_in_place(g: &mut Graph, set: &BTreeSet<NodeId>) -> Result<(), MoveError> {
    if set.is_empty() {
        return Err(MoveError::SiteMismatch("empty subgraph".into()));
    }
    let mut sinks = BTreeSet::new();
    for &n in set {
        let kind = g
            .kind(n)
            .ok_or(MoveError::Graph(crate::graph::GraphError::UnknownNode(n)))?;
        for &r in kind.roles() {
            let far = g
                .neighbor(n, r)
                .ok_or(MoveError::Graph(crate::graph::GraphError::DanglingPort { node: n, role: r }))?;
            match far {
                Endpoint::Port(w, _) if set.contains(w) => {}
                Endpoint::Port(t, Role::In)
                    if r.direction() == Direction::Output
                        && g.kind(*t) == Some(&NodeKind::Termination) =>
                {
                    sinks.insert(*t);
                }
                other => {
                    return Err(MoveError::NotClosed(format!("{n}.{r} is wired to {other}")))
                }
            }
        }
    }
    for n in set.iter().chain(&sinks) {
        g.remove_node_and_edges(*n)?;
    }
    Ok(())
}

/// Nodes backward-reachable from `root` (the node feeding a fan-out), not
/// passing through `stop`. IN leaves met on the way are reported.
fn backward_cone(g: &Graph, root: NodeId, stop: NodeId) -> (BTreeSet<NodeId>, bool) {
    let mut seen = BTreeSet::from([root]);
    let mut stack = vec![root];
    let mut reads_leaf = false;
    while let Some(n) = stack.pop() {
        for far in g.predecessors(n) {
            match far {
                Endpoint::Port(w, _) if *w != stop => {
                    if seen.insert(*w) {
                        stack.push(*w);
                    }
                }
                Endpoint::Port(..) => {}
                _ => reads_leaf = true,
            }
        }
    }
    (seen, reads_leaf)
}

fn add_sinks(g: &Graph, set: &mut BTreeSet<NodeId>) {
    let mut sinks = Vec::new();
    for &n in set.iter() {
        for far in g.successors(n) {
            if let Endpoint::Port(t, Role::In) = far {
                if g.kind(*t) == Some(&NodeKind::Termination) && !set.contains(t) {
                    sinks.push(*t);
                }
            }
        }
    }
    set.extend(sinks);
}

/// Duplicates `set`, returning the map from old to new ids. Edges with both
/// ends inside are copied; all other ports of the copies are left free.
fn duplicate(g: &mut Graph, set: &BTreeSet<NodeId>) -> Result<BTreeMap<NodeId, NodeId>, MoveError> {
    let mut map = BTreeMap::new();
    for &n in set {
        let kind = g.kind(n).cloned().expect("member of the graph");
        map.insert(n, g.add_node(kind));
    }
    let internal: Vec<(Endpoint, Endpoint)> = g
        .edges()
        .filter_map(|(_, e)| match (&e.source, &e.target) {
            (Endpoint::Port(a, ra), Endpoint::Port(b, rb)) if set.contains(a) && set.contains(b) => {
                Some((Endpoint::Port(map[a], *ra), Endpoint::Port(map[b], *rb)))
            }
            _ => None,
        })
        .collect();
    for (s, t) in internal {
        g.connect(s, t)?;
    }
    Ok(map)
}

/// Replaces the fan-out `f` by two copies of the region feeding it: the
/// original feeds `f`'s left continuation and the copy its right one.
fn split_fanout(g: &mut Graph, f: NodeId, map: &BTreeMap<NodeId, NodeId>) -> Result<(), MoveError> {
    let root = g.disconnect(edge_at(g, f, Role::In)?)?.source;
    let lt = g.disconnect(edge_at(g, f, Role::LOut)?)?.target;
    let rt = g.disconnect(edge_at(g, f, Role::ROut)?)?.target;
    g.remove_node(f)?;
    let (rn, rr) = root.port().expect("root is a gate port");
    g.connect(root, lt)?;
    g.connect(Endpoint::Port(map[&rn], rr), rt)?;
    Ok(())
}

fn fanout_root(g: &Graph, f: NodeId) -> Result<NodeId, MoveError> {
    expect_kind(g, f, &NodeKind::FanOut)?;
    match g.neighbor(f, Role::In) {
        Some(Endpoint::Port(s, _)) if *s != f => Ok(*s),
        Some(Endpoint::Port(..)) => Err(mismatch(f, "fan-out feeds itself")),
        Some(other) => Err(MoveError::NotClosed(format!("{f} is fed by {other}"))),
        None => Err(MoveError::Graph(crate::graph::GraphError::DanglingPort {
            node: f,
            role: Role::In,
        })),
    }
}

fn check_continuations_outside(g: &Graph, f: NodeId, set: &BTreeSet<NodeId>) -> Result<(), MoveError> {
    for r in [Role::LOut, Role::ROut] {
        if let Some(Endpoint::Port(w, _)) = g.neighbor(f, r) {
            if *w == f || set.contains(w) {
                return Err(mismatch(f, "fan-out output loops back into the shared region"));
            }
        }
    }
    Ok(())
}

pub fn global_fanout(g: &Graph, f: NodeId) -> Result<Graph, MoveError> {
    let mut out = g.clone();
    global_fanout_in_place(&mut out, f)?;
    Ok(out)
}

/// Global fan-out: the closed region feeding `f` is duplicated.
pub(crate) fn global_fanout_in_place(g: &mut Graph, f: NodeId) -> Result<(), MoveError> {
    let root = fanout_root(g, f)?;
    let (mut cone, reads_leaf) = backward_cone(g, root, f);
    if reads_leaf {
        return Err(MoveError::NotClosed(format!("region feeding {f} reads an IN leaf")));
    }
    add_sinks(g, &mut cone);
    check_continuations_outside(g, f, &cone)?;
    let root_edge = edge_at(g, f, Role::In)?;
    for &n in &cone {
        for r in g.kind(n).expect("member").roles() {
            let e = edge_at(g, n, *r)?;
            if e == root_edge {
                continue;
            }
            match g.neighbor(n, *r) {
                Some(Endpoint::Port(w, _)) if cone.contains(w) => {}
                Some(other) => {
                    return Err(MoveError::NotClosed(format!("{n}.{r} is wired to {other}")))
                }
                None => unreachable!("edge present"),
            }
        }
    }
    let map = duplicate(g, &cone)?;
    split_fanout(g, f, &map)
}

pub fn distribute_fanout(g: &Graph, f: NodeId) -> Result<Graph, MoveError> {
    let mut out = g.clone();
    distribute_in_place(&mut out, f)?;
    Ok(out)
}

/// Fan-out distribution: the largest region feeding `f` whose results are
/// used only through `f` (or discarded) is duplicated; each of its inputs
/// from outside is shared between original and copy by a new fan-out.
pub(crate) fn distribute_in_place(g: &mut Graph, f: NodeId) -> Result<(), MoveError> {
    let root = fanout_root(g, f)?;
    let root_edge = edge_at(g, f, Role::In)?;
    let (mut region, _) = backward_cone(g, root, f);
    add_sinks(g, &mut region);
    // Shrink to the part whose outputs stay inside (or are the root edge).
    loop {
        let drop: Vec<NodeId> = region
            .iter()
            .copied()
            .filter(|&n| {
                g.kind(n).expect("member").roles().iter().any(|r| {
                    r.direction() == Direction::Output
                        && g.edge_at(n, *r) != Some(root_edge)
                        && !matches!(g.neighbor(n, *r), Some(Endpoint::Port(w, _)) if region.contains(w))
                })
            })
            .collect();
        if drop.is_empty() {
            break;
        }
        for n in drop {
            region.remove(&n);
        }
    }
    if !region.contains(&root) {
        return Err(mismatch(f, "nothing feeding the fan-out can be duplicated"));
    }
    check_continuations_outside(g, f, &region)?;
    let boundary: Vec<(EdgeId, NodeId, Role)> = region
        .iter()
        .flat_map(|&n| {
            g.kind(n)
                .expect("member")
                .roles()
                .iter()
                .filter(|r| r.direction() == Direction::Input)
                .map(move |r| (n, *r))
        })
        .filter_map(|(n, r)| {
            let e = g.edge_at(n, r)?;
            match g.neighbor(n, r)? {
                Endpoint::Port(w, _) if region.contains(w) => None,
                _ => Some((e, n, r)),
            }
        })
        .collect();
    let map = duplicate(g, &region)?;
    for (e, n, r) in boundary {
        let src = g.disconnect(e)?.source;
        let fo = g.add_node(NodeKind::FanOut);
        g.connect(src, Endpoint::Port(fo, Role::In))?;
        g.connect(Endpoint::Port(fo, Role::LOut), Endpoint::Port(n, r))?;
        g.connect(Endpoint::Port(fo, Role::ROut), Endpoint::Port(map[&n], r))?;
    }
    split_fanout(g, f, &map)
}

pub fn ext1(g: &Graph, lambda: NodeId, app: NodeId) -> Result<Graph, MoveError> {
    let mut out = g.clone();
    ext1_in_place(&mut out, lambda, app)?;
    Ok(out)
}

/// (ext1): a λ whose body is exactly an application of some function to the
/// bound variable is replaced by that function.
pub(crate) fn ext1_in_place(g: &mut Graph, lambda: NodeId, app: NodeId) -> Result<(), MoveError> {
    expect_kind(g, lambda, &NodeKind::Lambda)?;
    expect_kind(g, app, &NodeKind::Application)?;
    if g.neighbor(app, Role::Out) != Some(&Endpoint::Port(lambda, Role::In)) {
        return Err(mismatch(app, &format!("output does not enter the body of {lambda}")));
    }
    if g.neighbor(lambda, Role::VOut) != Some(&Endpoint::Port(app, Role::Ain)) {
        return Err(mismatch(
            lambda,
            &format!("variable is not used exactly once as the argument of {app}"),
        ));
    }
    if g.neighbor(lambda, Role::AOut) == Some(&Endpoint::Port(app, Role::Fin)) {
        return Err(mismatch(lambda, "the λ is its own function"));
    }
    let body = edge_at(g, app, Role::Out)?;
    let var = edge_at(g, lambda, Role::VOut)?;
    g.disconnect(body)?;
    g.disconnect(var)?;
    let func = edge_at(g, app, Role::Fin)?;
    let result = edge_at(g, lambda, Role::AOut)?;
    g.splice(func, result)?;
    g.remove_node(lambda)?;
    g.remove_node(app)?;
    Ok(())
}
