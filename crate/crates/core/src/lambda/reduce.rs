//! Normal-order reduction of λ-graphs by graph moves.
//!
//! The head redex is found by walking the graph from its root the way
//! readback would (function before argument, under abstractions), so the
//! graph follows the leftmost-outermost strategy of the reference
//! evaluator. A redex hidden behind a fan-out (a shared abstraction in
//! function position) is first unshared by global fan-out, or by fan-out
//! distribution when the shared abstraction reads variables bound outside
//! it. When no redex remains, discarded structure is pruned and closed shared
//! terms are duplicated until nothing changes.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{is_lambda_graph, LambdaError, ReduceStatus};
use crate::graph::{Endpoint, Graph, NodeId, NodeKind, Role};
use crate::moves::{
    distribute_in_place, find_beta_redexes, global_fanout_in_place, prune_global_in_place,
    prune_local_in_place, raw_reduce, MoveTrace, Redex, Step,
};

/// Result of [`reduce_graph`].
#[derive(Debug, Clone)]
pub struct GraphReduction {
    pub graph: Graph,
    pub trace: MoveTrace,
    pub status: ReduceStatus,
}

enum Action {
    Beta(Redex),
    /// Unshare the fan-out fed directly by an abstraction in function position.
    Unshare(NodeId),
}

fn feeder(g: &Graph, n: NodeId, r: Role) -> Option<Endpoint> {
    g.neighbor(n, r).cloned()
}

fn redex_at(g: &Graph, l: NodeId) -> Option<Redex> {
    find_beta_redexes(g).into_iter().find(|r| r.lambda == l)
}

fn visit(g: &Graph, at: &Endpoint, visited: &mut HashSet<NodeId>) -> Option<Action> {
    let Endpoint::Port(n, r) = at else {
        return None;
    };
    let (n, r) = (*n, *r);
    let kind = g.kind(n)?;
    if *kind == NodeKind::Lambda && r == Role::VOut {
        return None;
    }
    if !visited.insert(n) {
        return None;
    }
    match kind {
        NodeKind::Lambda => visit(g, &feeder(g, n, Role::In)?, visited),
        NodeKind::FanOut => visit(g, &feeder(g, n, Role::In)?, visited),
        NodeKind::Application => {
            let fun = feeder(g, n, Role::Fin)?;
            let mut head = fun.clone();
            let mut nearest_fan = None;
            while let Endpoint::Port(f, Role::LOut | Role::ROut) = head {
                nearest_fan = Some(f);
                head = feeder(g, f, Role::In)?;
            }
            if let Endpoint::Port(l, Role::AOut) = head {
                return Some(match nearest_fan {
                    None => Action::Beta(redex_at(g, l)?),
                    Some(f) => Action::Unshare(f),
                });
            }
            visit(g, &fun, visited).or_else(|| visit(g, &feeder(g, n, Role::Ain)?, visited))
        }
        _ => None,
    }
}

fn head_action(g: &Graph) -> Option<Action> {
    let mut visited = HashSet::new();
    let roots: Vec<Endpoint> = g
        .out_leaf_names()
        .filter_map(|name| g.out_leaf(name))
        .map(|e| g.edge(e).expect("leaf edge").source.clone())
        .collect();
    roots.iter().find_map(|r| visit(g, r, &mut visited))
}

/// Nodes from which some OUT leaf can be reached.
fn live_nodes(g: &Graph) -> BTreeSet<NodeId> {
    let mut live = BTreeSet::new();
    let mut stack: Vec<NodeId> = g
        .out_leaf_names()
        .filter_map(|name| g.out_leaf(name))
        .filter_map(|e| g.edge(e).expect("leaf edge").source.node())
        .collect();
    while let Some(n) = stack.pop() {
        if !live.insert(n) {
            continue;
        }
        let kind = g.kind(n).expect("known node");
        for r in kind.roles() {
            if r.direction() == crate::graph::Direction::Input {
                if let Some(Endpoint::Port(m, _)) = g.neighbor(n, *r) {
                    stack.push(*m);
                }
            }
        }
    }
    live
}

/// Weakly connected components of the gates that cannot reach the root.
fn dead_components(g: &Graph) -> Vec<BTreeSet<NodeId>> {
    let live = live_nodes(g);
    let dead: BTreeSet<NodeId> = g
        .nodes()
        .filter(|(n, k)| **k != NodeKind::Termination && !live.contains(n))
        .map(|(n, _)| n)
        .collect();
    let mut comp_of: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut comps = Vec::new();
    for &start in &dead {
        if comp_of.contains_key(&start) {
            continue;
        }
        let id = comps.len();
        let mut comp = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            if comp_of.insert(n, id).is_some() {
                continue;
            }
            comp.insert(n);
            for r in g.kind(n).expect("known node").roles() {
                if let Some(Endpoint::Port(m, _)) = g.neighbor(n, *r) {
                    if dead.contains(m) && !comp_of.contains_key(m) {
                        stack.push(*m);
                    }
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// Prunes discarded structure and unshares closed shared terms until
/// nothing changes. Returns whether anything changed.
fn cleanup(g: &mut Graph, trace: &mut MoveTrace) -> bool {
    let mut changed = false;
    loop {
        let mut progress = false;
        let candidates: Vec<NodeId> = g
            .nodes()
            .filter(|(_, k)| **k != NodeKind::Termination)
            .map(|(n, _)| n)
            .collect();
        for n in candidates {
            if g.contains_node(n) && prune_local_in_place(g, n).is_ok() {
                trace.push(Step::PruneLocal(n));
                progress = true;
            }
        }
        for comp in dead_components(g) {
            if prune_global_in_place(g, &comp).is_ok() {
                trace.push(Step::PruneGlobal(comp));
                progress = true;
            }
        }
        if !progress {
            let fans: Vec<NodeId> = g
                .nodes()
                .filter(|(_, k)| **k == NodeKind::FanOut)
                .map(|(n, _)| n)
                .collect();
            for f in fans {
                if global_fanout_in_place(g, f).is_ok() {
                    trace.push(Step::GlobalFanout(f));
                    progress = true;
                    break;
                }
            }
        }
        if !progress {
            return changed;
        }
        changed = true;
    }
}

/// Reduces a λ-graph to normal form, spending at most `fuel` β moves.
pub fn reduce_graph(g: &Graph, fuel: u64) -> Result<GraphReduction, LambdaError> {
    let report = is_lambda_graph(g);
    if !report.is_lambda_graph() {
        let text: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(LambdaError::NotALambdaGraph(text.join("; ")));
    }
    let mut g = g.clone();
    let mut trace = MoveTrace::new();
    let mut remaining = fuel;
    loop {
        match head_action(&g) {
            Some(Action::Beta(redex)) => {
                if remaining == 0 {
                    return Ok(GraphReduction {
                        graph: g,
                        trace,
                        status: ReduceStatus::FuelExhausted,
                    });
                }
                let before = g.loop_count();
                raw_reduce(&mut g, &redex)?;
                trace.push(crate::moves::reduce_step(&redex));
                while g.loop_count() > before {
                    g.remove_loop()?;
                    trace.push(Step::ElimLoop);
                }
                remaining -= 1;
            }
            Some(Action::Unshare(f)) => {
                if global_fanout_in_place(&mut g, f).is_ok() {
                    trace.push(Step::GlobalFanout(f));
                } else if distribute_in_place(&mut g, f).is_ok() {
                    trace.push(Step::Distribute(f));
                } else if !cleanup(&mut g, &mut trace) {
                    return Err(LambdaError::Stuck(format!(
                        "cannot unshare the abstraction feeding {f}"
                    )));
                }
            }
            None => {
                if !cleanup(&mut g, &mut trace) {
                    return Ok(GraphReduction {
                        graph: g,
                        trace,
                        status: ReduceStatus::Normal,
                    });
                }
            }
        }
    }
}
