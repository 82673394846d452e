//! GLF: a line-oriented text form of [`Graph`].
//!
//! ```text
//! # identity combinator
//! node n0 LAM
//! edge n0.vout n0.in
//! edge n0.aout out:root
//! loops 0
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::{validate, Endpoint, Graph, GraphError, NodeId, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlfError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: {source}")]
    Graph {
        line: usize,
        column: usize,
        source: GraphError,
    },
    #[error("invalid graph: {0}")]
    Invalid(String),
}

/// Splits a line into `(column, token)` pairs, dropping `#` comments.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub fn parse_glf(text: &str) -> Result<Graph, GlfError> {
    let mut g = Graph::new();
    let mut pending_edges = Vec::new();
    let mut loops = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some(&(col, keyword)) = toks.first() else {
            continue;
        };
        let syntax = |column: usize, message: String| GlfError::Syntax {
            line,
            column,
            message,
        };
        match keyword {
            "node" => {
                if !(3..=4).contains(&toks.len()) {
                    return Err(syntax(col, "expected `node <id> <kind> [decoration]`".into()));
                }
                let (id_col, id_tok) = toks[1];
                let id: NodeId = id_tok.parse().map_err(|m| syntax(id_col, m))?;
                let (kind_col, kind_tok) = toks[2];
                let kind = match (kind_tok, toks.get(3)) {
                    ("LAM", None) => NodeKind::Lambda,
                    ("FO", None) => NodeKind::FanOut,
                    ("APP", None) => NodeKind::Application,
                    ("TOP", None) => NodeKind::Termination,
                    ("DIL", Some((_, label))) => NodeKind::Dilation(label.to_string()),
                    ("DIL", None) => return Err(syntax(kind_col, "DIL needs a decoration".into())),
                    ("LAM" | "FO" | "APP" | "TOP", Some((c, _))) => {
                        return Err(syntax(*c, format!("{kind_tok} takes no decoration")))
                    }
                    _ => return Err(syntax(kind_col, format!("unknown node kind `{kind_tok}`"))),
                };
                g.insert_node(id, kind).map_err(|source| GlfError::Graph {
                    line,
                    column: id_col,
                    source,
                })?;
            }
            "edge" => {
                if toks.len() != 3 {
                    return Err(syntax(col, "expected `edge <src> <dst>`".into()));
                }
                let (scol, stok) = toks[1];
                let (tcol, ttok) = toks[2];
                let source: Endpoint = stok.parse().map_err(|m| syntax(scol, m))?;
                let target: Endpoint = ttok.parse().map_err(|m| syntax(tcol, m))?;
                pending_edges.push((line, scol, source, target));
            }
            "loops" => {
                if toks.len() != 2 {
                    return Err(syntax(col, "expected `loops <count>`".into()));
                }
                if loops.is_some() {
                    return Err(syntax(col, "`loops` given twice".into()));
                }
                let (ccol, ctok) = toks[1];
                loops = Some(
                    ctok.parse::<usize>()
                        .map_err(|_| syntax(ccol, format!("bad loop count `{ctok}`")))?,
                );
            }
            other => return Err(syntax(col, format!("unknown record `{other}`"))),
        }
    }

    // Edges may mention nodes declared later in the file.
    for (line, column, source, target) in pending_edges {
        g.connect(source, target)
            .map_err(|source| GlfError::Graph {
                line,
                column,
                source,
            })?;
    }
    g.add_loops(loops.unwrap_or(0));

    let violations = validate(&g);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(GlfError::Invalid(text.join("; ")));
    }
    Ok(g)
}

/// Deterministic GLF text: nodes by id, edges by source then target endpoint.
pub fn emit_glf(g: &Graph) -> String {
    let mut out = String::new();
    for (id, kind) in g.nodes() {
        match kind.decoration() {
            Some(label) => writeln!(out, "node {id} {} {label}", kind.tag()),
            None => writeln!(out, "node {id} {}", kind.tag()),
        }
        .expect("writing to a String");
    }
    let mut edges: Vec<_> = g.edges().map(|(_, e)| e).collect();
    edges.sort();
    for e in edges {
        writeln!(out, "edge {} {}", e.source, e.target).expect("writing to a String");
    }
    if g.loop_count() > 0 {
        writeln!(out, "loops {}", g.loop_count()).expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_isomorphic, Role};

    const IDENTITY: &str = "node n0 LAM\nedge n0.vout n0.in\nedge n0.aout out:root\n";

    #[test]
    fn parses_identity() {
        let g = parse_glf(IDENTITY).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(
            g.neighbor(NodeId(0), Role::VOut),
            Some(&Endpoint::Port(NodeId(0), Role::In))
        );
        assert_eq!(emit_glf(&g), IDENTITY);
    }

    #[test]
    fn reemission_is_canonical() {
        let text = "# comment\nedge n7.aout out:root   # trailing\nloops 2\nnode n7 LAM\nedge n7.vout n7.in\n";
        let g = parse_glf(text).unwrap();
        let canonical = emit_glf(&g);
        assert_eq!(
            canonical,
            "node n7 LAM\nedge n7.vout n7.in\nedge n7.aout out:root\nloops 2\n"
        );
        let again = parse_glf(&canonical).unwrap();
        assert_eq!(emit_glf(&again), canonical);
        assert!(is_isomorphic(&g, &again).is_some());
    }

    #[test]
    fn edge_into_output_port_is_a_direction_error() {
        let err = parse_glf("node n0 LAM\nedge n0.vout n0.aout\n").unwrap_err();
        match err {
            GlfError::Graph { line, column, source } => {
                assert_eq!((line, column), (2, 6));
                assert!(matches!(source, GraphError::DirectionMismatch { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_glf("node n0 LAM\n  node q1 APP\n").unwrap_err();
        assert_eq!(
            err,
            GlfError::Syntax {
                line: 2,
                column: 8,
                message: "node ids have the form n<number>, got `q1`".into()
            }
        );
        assert!(matches!(
            parse_glf("frobnicate\n").unwrap_err(),
            GlfError::Syntax { line: 1, column: 1, .. }
        ));
    }

    #[test]
    fn dangling_ports_are_rejected() {
        let err = parse_glf("node n0 APP\nedge in:f n0.fin\nedge n0.out out:r\n").unwrap_err();
        assert!(matches!(err, GlfError::Invalid(msg) if msg.contains("n0.ain")));
    }

    #[test]
    fn dilation_decoration_survives() {
        let text = "node n0 DIL eps\nedge in:a n0.in1\nedge in:b n0.in2\nedge n0.out out:c\n";
        let g = parse_glf(text).unwrap();
        assert_eq!(g.kind(NodeId(0)), Some(&NodeKind::Dilation("eps".into())));
        assert_eq!(
            emit_glf(&g),
            "node n0 DIL eps\nedge n0.out out:c\nedge in:a n0.in1\nedge in:b n0.in2\n"
        );
    }
}
