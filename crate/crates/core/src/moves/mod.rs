//! Moves on [`Graph`]: the graphic β move in both directions, loop
//! bookkeeping, fan-out restructuring, pruning, global fan-out and (ext1).
//!
//! Every public move is a pure function returning a new graph. Traces record
//! each primitive step as a [`Step`], which is also the unit of a
//! [`MoveScript`], so a trace can always be replayed as a script.

mod beta;
mod script;
mod structural;

pub use beta::{
    add_loop, beta_expand, beta_expand_site, beta_reduce, beta_reduce_detailed, eliminate_loop,
    find_beta_redexes, BetaExpansion, BetaReduction, ExpandSite, Redex, Strand,
};
pub use script::{apply_script, MoveScript, RedexSel, Step, StrandSel};
pub use structural::{
    distribute_fanout, ext1, fanout_restructure, global_fanout, prune, PruneScope, Restructure,
};

pub(crate) use beta::{expand_step, raw_expand, raw_reduce, redex_at_lambda, reduce_step};
pub(crate) use script::{apply_step, parse_strand, resolve_strand};
pub(crate) use structural::{
    distribute_in_place, global_fanout_in_place, prune_global_in_place, prune_local_in_place,
};

use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeId, GraphError, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    BetaReduce,
    BetaExpand,
    ElimLoop,
    AddLoop,
    CoAssoc,
    CoComm,
    PruneLocal,
    PruneGlobal,
    GlobalFanout,
    /// Duplication of a shared subterm whose free inputs are fanned out.
    FanoutDistribute,
    Ext1,
}

impl MoveKind {
    pub fn name(self) -> &'static str {
        match self {
            MoveKind::BetaReduce => "BETA_REDUCE",
            MoveKind::BetaExpand => "BETA_EXPAND",
            MoveKind::ElimLoop => "ELIM_LOOP",
            MoveKind::AddLoop => "ADD_LOOP",
            MoveKind::CoAssoc => "CO_ASSOC",
            MoveKind::CoComm => "CO_COMM",
            MoveKind::PruneLocal => "PRUNE_LOCAL",
            MoveKind::PruneGlobal => "PRUNE_GLOBAL",
            MoveKind::GlobalFanout => "GLOBAL_FANOUT",
            MoveKind::FanoutDistribute => "FANOUT_DISTRIBUTE",
            MoveKind::Ext1 => "EXT1",
        }
    }

    pub fn is_beta(self) -> bool {
        matches!(self, MoveKind::BetaReduce | MoveKind::BetaExpand)
    }

    /// `-1` for moves read left to right (reductions), `+1` for their inverses.
    pub fn direction(self) -> Option<i8> {
        match self {
            MoveKind::BetaReduce | MoveKind::ElimLoop => Some(-1),
            MoveKind::BetaExpand | MoveKind::AddLoop => Some(1),
            _ => None,
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge {0} is not present")]
    MissingEdge(EdgeId),
    #[error("not a β-redex: {0}")]
    NotARedex(String),
    #[error("need {needed} node-free loop(s), graph has {available}")]
    NotEnoughLoops { needed: usize, available: usize },
    #[error("site shape mismatch: {0}")]
    SiteMismatch(String),
    #[error("subgraph is not closed: {0}")]
    NotClosed(String),
    #[error("selector cannot be resolved: {0}")]
    Unresolvable(String),
    #[error("selector is ambiguous: {0}")]
    Ambiguous(String),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("step {index} (`{step}`): {source}")]
    AtStep {
        index: usize,
        step: String,
        source: Box<MoveError>,
    },
}

pub(crate) fn mismatch(node: NodeId, what: &str) -> MoveError {
    MoveError::SiteMismatch(format!("{node}: {what}"))
}

/// One applied primitive move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub kind: MoveKind,
    pub step: Step,
}

/// Ordered record of applied moves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MoveTrace {
    entries: Vec<TraceEntry>,
}

impl MoveTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: Step) {
        self.entries.push(TraceEntry {
            kind: step.kind(),
            step,
        });
    }

    pub fn extend(&mut self, other: MoveTrace) {
        self.entries.extend(other.entries);
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, kind: MoveKind) -> usize {
        self.entries.iter().filter(|e| e.kind == kind).count()
    }

    /// Number of graphic β moves, in either direction.
    pub fn beta_count(&self) -> usize {
        self.entries.iter().filter(|e| e.kind.is_beta()).count()
    }

    pub fn loops_eliminated(&self) -> usize {
        self.count(MoveKind::ElimLoop)
    }

    /// The trace as a replayable script.
    pub fn to_script(&self) -> MoveScript {
        MoveScript::from_steps(self.entries.iter().map(|e| e.step.clone()).collect())
    }

    /// One-line summary, e.g. `beta=6 elim=0 add=0 steps=6`.
    pub fn summary(&self) -> String {
        format!(
            "beta={} elim={} add={} steps={}",
            self.beta_count(),
            self.loops_eliminated(),
            self.count(MoveKind::AddLoop),
            self.len()
        )
    }
}

impl fmt::Display for MoveTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{:<17} {}", e.kind.name(), e.step)?;
        }
        Ok(())
    }
}
