//! MoveScript: a line-per-move text format.
//!
//! ```text
//! beta- n0.aout          # reduce the redex whose λ output is n0.aout
//! beta- first            # reduce the first redex (by λ id)
//! beta+ in:a n3.out      # expand: over strand, under strand
//! beta+ in:a in:a        # same edge twice: insert a kink
//! beta+ in:a^1 in:a^2    # cut one edge twice (over = upstream segment)
//! beta+ loop in:a        # a node-free loop as a strand
//! elim-loop | add-loop
//! coassoc n1 n2 | cocomm n1
//! subgraph junk n4 n5
//! prune n3 | prune @junk | prune @{n4,n5}
//! gfanout n1 | distribute n1 | ext1 n0 n1
//! ```
//!
//! Strands and redexes are named by an endpoint of the edge they denote.
//! `beta-` is the raw move: node-free loops it creates stay in the loop count
//! until an explicit `elim-loop`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::beta::{expand_step, raw_expand, raw_reduce, redex_of_edge, reduce_step, find_beta_redexes};
use super::structural::{
    co_assoc_in_place, co_comm_in_place, distribute_in_place, ext1_in_place,
    global_fanout_in_place, prune_global_in_place, prune_local_in_place,
};
use super::{ExpandSite, MoveError, MoveKind, MoveTrace, Strand};
use crate::graph::glf::tokens;
use crate::graph::{Endpoint, Graph, NodeId};

/// Names a redex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RedexSel {
    /// The redex whose connecting edge has this endpoint.
    At(Endpoint),
    /// The redex with the smallest λ id.
    First,
}

/// Names a strand: the edge at an endpoint, or a node-free loop.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StrandSel {
    Edge(Endpoint),
    Loop,
}

impl fmt::Display for StrandSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrandSel::Edge(e) => write!(f, "{e}"),
            StrandSel::Loop => f.write_str("loop"),
        }
    }
}

/// One move of a script (and of a trace).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    BetaReduce(RedexSel),
    BetaExpand { over: StrandSel, under: StrandSel },
    BetaSplit { carrier: StrandSel, over_first: bool },
    ElimLoop,
    AddLoop,
    CoAssoc { upper: NodeId, lower: NodeId },
    CoComm(NodeId),
    PruneLocal(NodeId),
    PruneGlobal(BTreeSet<NodeId>),
    GlobalFanout(NodeId),
    Distribute(NodeId),
    Ext1 { lambda: NodeId, app: NodeId },
}

impl Step {
    pub fn kind(&self) -> MoveKind {
        match self {
            Step::BetaReduce(_) => MoveKind::BetaReduce,
            Step::BetaExpand { .. } | Step::BetaSplit { .. } => MoveKind::BetaExpand,
            Step::ElimLoop => MoveKind::ElimLoop,
            Step::AddLoop => MoveKind::AddLoop,
            Step::CoAssoc { .. } => MoveKind::CoAssoc,
            Step::CoComm(_) => MoveKind::CoComm,
            Step::PruneLocal(_) => MoveKind::PruneLocal,
            Step::PruneGlobal(_) => MoveKind::PruneGlobal,
            Step::GlobalFanout(_) => MoveKind::GlobalFanout,
            Step::Distribute(_) => MoveKind::FanoutDistribute,
            Step::Ext1 { .. } => MoveKind::Ext1,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::BetaReduce(RedexSel::At(e)) => write!(f, "beta- {e}"),
            Step::BetaReduce(RedexSel::First) => f.write_str("beta- first"),
            Step::BetaExpand { over, under } => write!(f, "beta+ {over} {under}"),
            Step::BetaSplit {
                carrier,
                over_first,
            } => {
                let (a, b) = if *over_first { (1, 2) } else { (2, 1) };
                write!(f, "beta+ {carrier}^{a} {carrier}^{b}")
            }
            Step::ElimLoop => f.write_str("elim-loop"),
            Step::AddLoop => f.write_str("add-loop"),
            Step::CoAssoc { upper, lower } => write!(f, "coassoc {upper} {lower}"),
            Step::CoComm(n) => write!(f, "cocomm {n}"),
            Step::PruneLocal(n) => write!(f, "prune {n}"),
            Step::PruneGlobal(set) => {
                let ids: Vec<String> = set.iter().map(ToString::to_string).collect();
                write!(f, "prune @{{{}}}", ids.join(","))
            }
            Step::GlobalFanout(n) => write!(f, "gfanout {n}"),
            Step::Distribute(n) => write!(f, "distribute {n}"),
            Step::Ext1 { lambda, app } => write!(f, "ext1 {lambda} {app}"),
        }
    }
}

/// A parsed script: its moves and the source line of each.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MoveScript {
    steps: Vec<(usize, Step)>,
}

impl MoveScript {
    pub fn from_steps(steps: Vec<Step>) -> Self {
        Self {
            steps: steps.into_iter().enumerate().map(|(i, s)| (i + 1, s)).collect(),
        }
    }

    pub fn steps(&self) -> impl Iterator<Item = &Step> + '_ {
        self.steps.iter().map(|(_, s)| s)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps with the source line each came from.
    pub(crate) fn numbered(&self) -> &[(usize, Step)] {
        &self.steps
    }

    pub fn parse(text: &str) -> Result<Self, MoveError> {
        let mut subgraphs: BTreeMap<String, BTreeSet<NodeId>> = BTreeMap::new();
        let mut steps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let toks = tokens(raw);
            let Some(&(col, keyword)) = toks.first() else {
                continue;
            };
            let err = |column: usize, message: String| MoveError::Parse {
                line,
                column,
                message,
            };
            let arity = |n: usize| -> Result<(), MoveError> {
                if toks.len() == n + 1 {
                    Ok(())
                } else {
                    Err(err(col, format!("`{keyword}` takes {n} argument(s)")))
                }
            };
            let node = |i: usize| -> Result<NodeId, MoveError> {
                let (c, t) = toks[i];
                t.parse().map_err(|m| err(c, m))
            };
            let endpoint = |i: usize| -> Result<Endpoint, MoveError> {
                let (c, t) = toks[i];
                t.parse().map_err(|m| err(c, m))
            };
            let step = match keyword {
                "beta-" => {
                    arity(1)?;
                    if toks[1].1 == "first" {
                        Step::BetaReduce(RedexSel::First)
                    } else {
                        Step::BetaReduce(RedexSel::At(endpoint(1)?))
                    }
                }
                "beta+" => {
                    arity(2)?;
                    let a = parse_strand(toks[1].1).map_err(|m| err(toks[1].0, m))?;
                    let b = parse_strand(toks[2].1).map_err(|m| err(toks[2].0, m))?;
                    match (a, b) {
                        ((sa, None), (sb, None)) => Step::BetaExpand { over: sa, under: sb },
                        ((sa, Some(x)), (sb, Some(y))) if sa == sb && x != y => Step::BetaSplit {
                            carrier: sa,
                            over_first: x == 1,
                        },
                        _ => {
                            return Err(err(
                                toks[1].0,
                                "segments must be `s^1 s^2` or `s^2 s^1` of one strand".into(),
                            ))
                        }
                    }
                }
                "elim-loop" => {
                    arity(0)?;
                    Step::ElimLoop
                }
                "add-loop" => {
                    arity(0)?;
                    Step::AddLoop
                }
                "coassoc" => {
                    arity(2)?;
                    Step::CoAssoc {
                        upper: node(1)?,
                        lower: node(2)?,
                    }
                }
                "cocomm" => {
                    arity(1)?;
                    Step::CoComm(node(1)?)
                }
                "gfanout" => {
                    arity(1)?;
                    Step::GlobalFanout(node(1)?)
                }
                "distribute" => {
                    arity(1)?;
                    Step::Distribute(node(1)?)
                }
                "ext1" => {
                    arity(2)?;
                    Step::Ext1 {
                        lambda: node(1)?,
                        app: node(2)?,
                    }
                }
                "subgraph" => {
                    if toks.len() < 3 {
                        return Err(err(col, "expected `subgraph <name> <node>...`".into()));
                    }
                    let (ncol, name) = toks[1];
                    let set = (2..toks.len()).map(node).collect::<Result<BTreeSet<_>, _>>()?;
                    if subgraphs.insert(name.to_string(), set).is_some() {
                        return Err(MoveError::Ambiguous(format!(
                            "line {line}:{ncol}: subgraph `{name}` defined twice"
                        )));
                    }
                    continue;
                }
                "prune" => {
                    arity(1)?;
                    let (c, t) = toks[1];
                    if let Some(list) = t.strip_prefix("@{").and_then(|r| r.strip_suffix('}')) {
                        let set = list
                            .split(',')
                            .map(|s| s.trim().parse::<NodeId>().map_err(|m| err(c, m)))
                            .collect::<Result<BTreeSet<_>, _>>()?;
                        Step::PruneGlobal(set)
                    } else if let Some(name) = t.strip_prefix('@') {
                        let set = subgraphs.get(name).ok_or_else(|| {
                            MoveError::Unresolvable(format!("line {line}:{c}: no subgraph `{name}`"))
                        })?;
                        Step::PruneGlobal(set.clone())
                    } else {
                        Step::PruneLocal(node(1)?)
                    }
                }
                other => return Err(err(col, format!("unknown move `{other}`"))),
            };
            steps.push((line, step));
        }
        Ok(Self { steps })
    }
}

pub(crate) fn parse_strand(tok: &str) -> Result<(StrandSel, Option<u8>), String> {
    let (base, seg) = match tok.rsplit_once('^') {
        Some((b, "1")) => (b, Some(1)),
        Some((b, "2")) => (b, Some(2)),
        Some(_) => return Err(format!("segment must be ^1 or ^2 in `{tok}`")),
        None => (tok, None),
    };
    let sel = if base == "loop" {
        StrandSel::Loop
    } else {
        StrandSel::Edge(base.parse()?)
    };
    Ok((sel, seg))
}

impl fmt::Display for MoveScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (_, s) in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for MoveScript {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

pub(crate) fn resolve_strand(g: &Graph, sel: &StrandSel) -> Result<Strand, MoveError> {
    match sel {
        StrandSel::Loop => Ok(Strand::Loop),
        StrandSel::Edge(e) => g
            .edge_at_endpoint(e)
            .map(Strand::Edge)
            .ok_or_else(|| MoveError::Unresolvable(format!("no edge at {e}"))),
    }
}

/// Applies one step in place, appending what was done to `trace`.
pub(crate) fn apply_step(g: &mut Graph, step: &Step, trace: &mut MoveTrace) -> Result<(), MoveError> {
    match step {
        Step::BetaReduce(sel) => {
            let redex = match sel {
                RedexSel::First => *find_beta_redexes(g)
                    .first()
                    .ok_or_else(|| MoveError::Unresolvable("graph has no β-redex".into()))?,
                RedexSel::At(e) => {
                    let edge = g
                        .edge_at_endpoint(e)
                        .ok_or_else(|| MoveError::Unresolvable(format!("no edge at {e}")))?;
                    redex_of_edge(g, edge)?
                }
            };
            raw_reduce(g, &redex)?;
            trace.push(reduce_step(&redex));
        }
        Step::BetaExpand { over, under } => {
            let o = resolve_strand(g, over)?;
            let u = resolve_strand(g, under)?;
            let site = if o == u && o != Strand::Loop {
                g.add_loops(1);
                trace.push(Step::AddLoop);
                ExpandSite::Pair {
                    over: o,
                    under: Strand::Loop,
                }
            } else {
                ExpandSite::Pair { over: o, under: u }
            };
            let recorded = expand_step(g, &site)?;
            raw_expand(g, &site)?;
            trace.push(recorded);
        }
        Step::BetaSplit {
            carrier,
            over_first,
        } => {
            let site = ExpandSite::Split {
                carrier: resolve_strand(g, carrier)?,
                over_first: *over_first,
            };
            let recorded = expand_step(g, &site)?;
            raw_expand(g, &site)?;
            trace.push(recorded);
        }
        Step::ElimLoop => {
            g.remove_loop()?;
            trace.push(Step::ElimLoop);
        }
        Step::AddLoop => {
            g.add_loops(1);
            trace.push(Step::AddLoop);
        }
        Step::CoAssoc { upper, lower } => {
            co_assoc_in_place(g, *upper, *lower)?;
            trace.push(step.clone());
        }
        Step::CoComm(n) => {
            co_comm_in_place(g, *n)?;
            trace.push(step.clone());
        }
        Step::PruneLocal(n) => {
            prune_local_in_place(g, *n)?;
            trace.push(step.clone());
        }
        Step::PruneGlobal(set) => {
            prune_global_in_place(g, set)?;
            trace.push(step.clone());
        }
        Step::GlobalFanout(n) => {
            global_fanout_in_place(g, *n)?;
            trace.push(step.clone());
        }
        Step::Distribute(n) => {
            distribute_in_place(g, *n)?;
            trace.push(step.clone());
        }
        Step::Ext1 { lambda, app } => {
            ext1_in_place(g, *lambda, *app)?;
            trace.push(step.clone());
        }
    }
    Ok(())
}

/// Runs a script against a copy of `g`. On error nothing is returned; the
/// error names the failing step.
pub fn apply_script(g: &Graph, script: &MoveScript) -> Result<(Graph, MoveTrace), MoveError> {
    let mut out = g.clone();
    let mut trace = MoveTrace::new();
    for (line, step) in &script.steps {
        apply_step(&mut out, step, &mut trace).map_err(|source| MoveError::AtStep {
            index: *line,
            step: step.to_string(),
            source: Box::new(source),
        })?;
    }
    Ok((out, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{emit_glf, is_isomorphic, parse_glf};

    #[test]
    fn script_round_trips_through_text() {
        let text = "beta- n0.aout\nbeta- first\nbeta+ in:a n3.out\nbeta+ loop in:b\n\
                    beta+ in:c^2 in:c^1\nelim-loop\nadd-loop\ncoassoc n1 n2\ncocomm n1\n\
                    prune n3\nprune @{n4,n5}\ngfanout n1\ndistribute n2\next1 n0 n1\n";
        let s = MoveScript::parse(text).unwrap();
        assert_eq!(s.to_string(), text);
        assert_eq!(s.len(), 14);
    }

    #[test]
    fn named_subgraphs() {
        let s = MoveScript::parse("subgraph junk n5 n4\nprune @junk\n").unwrap();
        assert_eq!(s.to_string(), "prune @{n4,n5}\n");
        assert!(matches!(
            MoveScript::parse("prune @nope\n"),
            Err(MoveError::Unresolvable(_))
        ));
        assert!(matches!(
            MoveScript::parse("subgraph a n1\nsubgraph a n2\n"),
            Err(MoveError::Ambiguous(_))
        ));
    }

    #[test]
    fn parse_errors_have_positions() {
        assert_eq!(
            MoveScript::parse("cocomm n1\n  frob\n").unwrap_err(),
            MoveError::Parse {
                line: 2,
                column: 3,
                message: "unknown move `frob`".into()
            }
        );
        assert!(matches!(
            MoveScript::parse("beta+ in:a^1 in:b^2\n"),
            Err(MoveError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn trace_replays_to_the_same_graph() {
        let g = parse_glf("edge in:a out:b\nedge in:c out:d\n").unwrap();
        let script = MoveScript::parse(
            "beta+ in:a in:c\nbeta+ in:a in:a\nbeta+ out:d^1 out:d^2\nbeta- first\nbeta- first\nelim-loop\n",
        )
        .unwrap();
        let (h, trace) = apply_script(&g, &script).unwrap();
        let (h2, trace2) = apply_script(&g, &trace.to_script()).unwrap();
        assert_eq!(emit_glf(&h), emit_glf(&h2));
        assert_eq!(trace, trace2);
        assert!(is_isomorphic(&h, &h2).is_some());
    }

    #[test]
    fn failing_step_is_reported() {
        let g = parse_glf("edge in:a out:b\n").unwrap();
        let err = apply_script(&g, &MoveScript::parse("add-loop\nbeta- first\n").unwrap()).unwrap_err();
        match err {
            MoveError::AtStep { index, source, .. } => {
                assert_eq!(index, 2);
                assert!(matches!(*source, MoveError::Unresolvable(_)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
