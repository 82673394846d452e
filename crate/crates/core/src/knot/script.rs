//! Knot scripts: ordinary move-script lines plus Reidemeister macros.
//!
//! ```text
//! r1a- n0            # remove the kink at λ gate n0 (chirality A; r1b- for B)
//! r1a+ in:a          # insert a kink on the strand at in:a (or `loop`)
//! r2a- n0 n2         # remove two crossings, n0 upstream of n2
//! r2a+ in:a in:c     # lay the strand at in:a over the one at in:c
//! r3a n0 n2 n4       # σ1σ2σ1 → σ2σ1σ2 at these three crossings
//! r3a' n0 n2 n4      # σ2σ1σ2 → σ1σ2σ1
//! beta- n0.aout      # any move-script line
//! ```
//!
//! Crossings created by macros carry signs; crossings created by raw `beta+`
//! lines do not, so a graph containing one cannot be decoded to a diagram.

use std::fmt;

use super::{
    reidemeister_r1, reidemeister_r2a, reidemeister_r3a, Chirality, CrossingBinding, KnotError,
    R1Site, R2Site, R3Direction,
};
use crate::graph::glf::tokens;
use crate::graph::{Graph, NodeId};
use crate::moves::{apply_step, parse_strand, resolve_strand, MoveError, MoveScript, MoveTrace, Step, StrandSel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KnotStep {
    Move(Step),
    R1Remove { lambda: NodeId, chirality: Chirality },
    R1Insert { strand: StrandSel, chirality: Chirality },
    R2Remove { first: NodeId, second: NodeId },
    R2Insert { over: StrandSel, under: StrandSel },
    R3 { lambdas: [NodeId; 3], direction: R3Direction },
}

fn chirality_tag(c: Chirality) -> char {
    match c {
        Chirality::A => 'a',
        Chirality::B => 'b',
    }
}

impl fmt::Display for KnotStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotStep::Move(s) => write!(f, "{s}"),
            KnotStep::R1Remove { lambda, chirality } => write!(f, "r1{}- {lambda}", chirality_tag(*chirality)),
            KnotStep::R1Insert { strand, chirality } => write!(f, "r1{}+ {strand}", chirality_tag(*chirality)),
            KnotStep::R2Remove { first, second } => write!(f, "r2a- {first} {second}"),
            KnotStep::R2Insert { over, under } => write!(f, "r2a+ {over} {under}"),
            KnotStep::R3 { lambdas: [a, b, c], direction } => {
                let tick = if *direction == R3Direction::Backward { "'" } else { "" };
                write!(f, "r3a{tick} {a} {b} {c}")
            }
        }
    }
}

/// A parsed knot script with the source line of each step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnotScript {
    steps: Vec<(usize, KnotStep)>,
}

impl KnotScript {
    pub fn steps(&self) -> impl Iterator<Item = &KnotStep> + '_ {
        self.steps.iter().map(|(_, s)| s)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self, KnotError> {
        let mut steps = Vec::new();
        // Lines that are not macros go to the move-script parser, which keeps
        // their line numbers because macro lines are blanked out.
        let mut rest = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let toks = tokens(raw);
            match toks.first() {
                Some(&(col, kw)) if kw.starts_with("r1") || kw.starts_with("r2") || kw.starts_with("r3") => {
                    steps.push((line, parse_macro(line, col, kw, &toks[1..])?));
                    rest.push('\n');
                }
                _ => {
                    rest.push_str(raw);
                    rest.push('\n');
                }
            }
        }
        let moves = MoveScript::parse(&rest).map_err(|e| match e {
            MoveError::Parse { line, column, message } => KnotError::Parse { line, column, message },
            other => KnotError::Move(other),
        })?;
        steps.extend(moves.numbered().iter().map(|(l, s)| (*l, KnotStep::Move(s.clone()))));
        steps.sort_by_key(|(l, _)| *l);
        Ok(KnotScript { steps })
    }
}

impl std::str::FromStr for KnotScript {
    type Err = KnotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for KnotScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (_, s) in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

fn parse_macro(line: usize, col: usize, kw: &str, args: &[(usize, &str)]) -> Result<KnotStep, KnotError> {
    let err = |column: usize, message: String| KnotError::Parse { line, column, message };
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(col, format!("`{kw}` takes {n} argument(s)")))
        }
    };
    let node = |i: usize| -> Result<NodeId, KnotError> { args[i].1.parse().map_err(|m| err(args[i].0, m)) };
    let strand = |i: usize| -> Result<StrandSel, KnotError> {
        match parse_strand(args[i].1) {
            Ok((s, None)) => Ok(s),
            Ok((_, Some(_))) => Err(err(args[i].0, "segment marks are not allowed here".into())),
            Err(m) => Err(err(args[i].0, m)),
        }
    };
    let step = match kw {
        "r1a-" | "r1b-" => {
            arity(1)?;
            KnotStep::R1Remove {
                lambda: node(0)?,
                chirality: if kw == "r1a-" { Chirality::A } else { Chirality::B },
            }
        }
        "r1a+" | "r1b+" => {
            arity(1)?;
            KnotStep::R1Insert {
                strand: strand(0)?,
                chirality: if kw == "r1a+" { Chirality::A } else { Chirality::B },
            }
        }
        "r2a-" => {
            arity(2)?;
            KnotStep::R2Remove { first: node(0)?, second: node(1)? }
        }
        "r2a+" => {
            arity(2)?;
            KnotStep::R2Insert { over: strand(0)?, under: strand(1)? }
        }
        "r3a" | "r3a'" => {
            arity(3)?;
            KnotStep::R3 {
                lambdas: [node(0)?, node(1)?, node(2)?],
                direction: if kw == "r3a" { R3Direction::Forward } else { R3Direction::Backward },
            }
        }
        other => return Err(err(col, format!("unknown Reidemeister move `{other}`"))),
    };
    Ok(step)
}

fn apply_knot_step(
    g: &Graph,
    binding: &CrossingBinding,
    step: &KnotStep,
) -> Result<(Graph, CrossingBinding, MoveTrace), KnotError> {
    let m = match step {
        KnotStep::Move(s) => {
            let mut out = g.clone();
            let mut trace = MoveTrace::new();
            apply_step(&mut out, s, &mut trace)?;
            let b = binding.update(&out, &[]);
            return Ok((out, b, trace));
        }
        KnotStep::R1Remove { lambda, chirality } => reidemeister_r1(g, R1Site::Kink(*lambda), *chirality)?,
        KnotStep::R1Insert { strand, chirality } => {
            reidemeister_r1(g, R1Site::Strand(resolve_strand(g, strand)?), *chirality)?
        }
        KnotStep::R2Remove { first, second } => reidemeister_r2a(
            g,
            R2Site::Crossings {
                first: *first,
                second: *second,
            },
        )?,
        KnotStep::R2Insert { over, under } => reidemeister_r2a(
            g,
            R2Site::Strands {
                over: resolve_strand(g, over)?,
                under: resolve_strand(g, under)?,
            },
        )?,
        KnotStep::R3 { lambdas, direction } => reidemeister_r3a(g, *lambdas, *direction)?,
    };
    let b = binding.update(&m.graph, &m.created);
    Ok((m.graph, b, m.trace))
}

/// Runs a knot script, keeping the crossing signs up to date.
pub fn apply_knot_script(
    g: &Graph,
    binding: &CrossingBinding,
    script: &KnotScript,
) -> Result<(Graph, CrossingBinding, MoveTrace), KnotError> {
    let mut graph = g.clone();
    let mut binding = binding.clone();
    let mut trace = MoveTrace::new();
    for (line, step) in &script.steps {
        let (g2, b2, t) = apply_knot_step(&graph, &binding, step).map_err(|e| KnotError::AtStep {
            line: *line,
            step: step.to_string(),
            source: Box::new(e),
        })?;
        graph = g2;
        binding = b2;
        trace.extend(t);
    }
    Ok((graph, binding, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_isomorphic;
    use crate::knot::{decode_to_pd, encode_diagram, fixtures};

    #[test]
    fn parses_macros_and_moves() {
        let text = "r1a- n0\n# note\nr1b+ in:a\nbeta- n2.aout\nr2a- n0 n2\nr2a+ in:a loop\nr3a n0 n2 n4\nr3a' n0 n2 n4\n";
        let s = KnotScript::parse(text).unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(KnotScript::parse(&s.to_string()).unwrap().steps().collect::<Vec<_>>(), s.steps().collect::<Vec<_>>());
        assert!(matches!(KnotScript::parse("r2a- n0\n"), Err(KnotError::Parse { line: 1, .. })));
        assert!(matches!(KnotScript::parse("\nr4 n0\n"), Err(KnotError::Parse { line: 2, .. })));
    }

    #[test]
    fn macros_keep_signs() {
        let (g, b) = encode_diagram(&fixtures::r3a_lhs()).unwrap();
        let s = KnotScript::parse("r3a n0 n2 n4\n").unwrap();
        let (out, b2, trace) = apply_knot_script(&g, &b, &s).unwrap();
        assert_eq!(trace.beta_count(), 6);
        assert!(decode_to_pd(&out, &b2).unwrap().equal_up_to_relabeling(&fixtures::r3a_rhs()));
    }

    #[test]
    fn r2_insert_then_remove_by_script() {
        let (g, b) = encode_diagram(&fixtures::r2a_rhs()).unwrap();
        let s = KnotScript::parse("r2a+ in:a in:c\nr2a- n2 n0\n").unwrap();
        let (out, b2, trace) = apply_knot_script(&g, &b, &s).unwrap();
        assert_eq!(trace.beta_count(), 4);
        assert!(is_isomorphic(&out, &g).is_some());
        assert!(b2.is_empty());
    }

    #[test]
    fn raw_expansion_has_no_sign() {
        let (g, b) = encode_diagram(&fixtures::r2a_rhs()).unwrap();
        let s = KnotScript::parse("beta+ in:a in:c\n").unwrap();
        let (out, b2, _) = apply_knot_script(&g, &b, &s).unwrap();
        assert!(matches!(decode_to_pd(&out, &b2), Err(KnotError::Binding(_))));
    }

    #[test]
    fn failing_step_names_its_line() {
        let (g, b) = encode_diagram(&fixtures::trefoil()).unwrap();
        let s = KnotScript::parse("\nr1a- n0\n").unwrap();
        assert!(matches!(apply_knot_script(&g, &b, &s), Err(KnotError::AtStep { line: 2, .. })));
    }
}
