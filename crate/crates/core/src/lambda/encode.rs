//! Term → graph encoding and the λ-graph condition.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use super::LambdaTerm;
use crate::graph::{Endpoint, Graph, NodeId, NodeKind, Role};

/// Name of the OUT leaf carrying an encoded term's root.
pub const ROOT_LEAF: &str = "root";

/// Number of free occurrences of `x` in `t`.
fn occurrences(t: &LambdaTerm, x: &str) -> usize {
    match t {
        LambdaTerm::Var(y) => usize::from(y == x),
        LambdaTerm::Abs(y, b) => {
            if y == x {
                0
            } else {
                occurrences(b, x)
            }
        }
        LambdaTerm::App(f, a) => occurrences(f, x) + occurrences(a, x),
    }
}

/// Feeds `count` uses of a variable from `source`: nothing (terminated),
/// the source itself, or the outputs of a right comb of fan-outs, in order.
fn share(g: &mut Graph, source: Endpoint, count: usize) -> VecDeque<Endpoint> {
    let mut out = VecDeque::new();
    match count {
        0 => {
            let t = g.add_node(NodeKind::Termination);
            g.connect(source, Endpoint::Port(t, Role::In)).expect("fresh port");
        }
        1 => out.push_back(source),
        _ => {
            let mut feed = source;
            for i in 0..count - 1 {
                let f = g.add_node(NodeKind::FanOut);
                g.connect(feed, Endpoint::Port(f, Role::In)).expect("fresh port");
                out.push_back(Endpoint::Port(f, Role::LOut));
                if i == count - 2 {
                    out.push_back(Endpoint::Port(f, Role::ROut));
                }
                feed = Endpoint::Port(f, Role::ROut);
            }
        }
    }
    out
}

struct Encoder {
    g: Graph,
    /// Innermost binding of each name: remaining occurrence sources.
    scopes: HashMap<String, Vec<VecDeque<Endpoint>>>,
}

impl Encoder {
    /// Encodes `t`, returning the endpoint carrying its value.
    fn encode(&mut self, t: &LambdaTerm) -> Endpoint {
        match t {
            LambdaTerm::Var(x) => self
                .scopes
                .get_mut(x)
                .and_then(|stack| stack.last_mut())
                .and_then(VecDeque::pop_front)
                .expect("occurrences were counted in advance"),
            LambdaTerm::Abs(x, body) => {
                let l = self.g.add_node(NodeKind::Lambda);
                let uses = share(&mut self.g, Endpoint::Port(l, Role::VOut), occurrences(body, x));
                self.scopes.entry(x.clone()).or_default().push(uses);
                let b = self.encode(body);
                self.scopes.get_mut(x).expect("pushed above").pop();
                self.g.connect(b, Endpoint::Port(l, Role::In)).expect("fresh port");
                Endpoint::Port(l, Role::AOut)
            }
            LambdaTerm::App(f, a) => {
                let node = self.g.add_node(NodeKind::Application);
                let fe = self.encode(f);
                self.g.connect(fe, Endpoint::Port(node, Role::Fin)).expect("fresh port");
                let ae = self.encode(a);
                self.g.connect(ae, Endpoint::Port(node, Role::Ain)).expect("fresh port");
                Endpoint::Port(node, Role::Out)
            }
        }
    }
}

/// Encodes a term as a λ-graph whose root is the OUT leaf `root`. Free
/// variables become IN leaves of the same name.
pub fn encode_term(t: &LambdaTerm) -> Graph {
    let mut enc = Encoder {
        g: Graph::new(),
        scopes: HashMap::new(),
    };
    for x in t.free_vars() {
        let uses = share(&mut enc.g, Endpoint::InLeaf(x.clone()), occurrences(t, &x));
        enc.scopes.insert(x, vec![uses]);
    }
    let root = enc.encode(t);
    enc.g
        .connect(root, Endpoint::OutLeaf(ROOT_LEAF.to_string()))
        .expect("fresh leaf");
    enc.g
}

/// Why a graph fails the λ-graph condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaViolation {
    Dilation(NodeId),
    /// A path from the variable output of `lambda` cannot be completed.
    Path { lambda: NodeId, description: String },
}

impl fmt::Display for LambdaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaViolation::Dilation(n) => write!(f, "{n} is a dilation gate"),
            LambdaViolation::Path {
                lambda,
                description,
            } => write!(f, "path from {lambda}.vout {description}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LambdaGraphReport {
    pub violations: Vec<LambdaViolation>,
}

impl LambdaGraphReport {
    pub fn is_lambda_graph(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Active,
    Done,
}

/// Follows every path from an output endpoint. Paths end well at a
/// termination gate or at the body input of any λ gate.
fn check_from(
    g: &Graph,
    from: &Endpoint,
    marks: &mut BTreeMap<NodeId, Mark>,
) -> Result<(), String> {
    let Some(e) = g.edge_at_endpoint(from) else {
        return Err(format!("reaches a free port at {from}"));
    };
    let target = &g.edge(e).expect("edge at endpoint").target;
    let (n, role) = match target {
        Endpoint::OutLeaf(name) => return Err(format!("reaches the OUT leaf {name}")),
        Endpoint::InLeaf(_) => unreachable!("edges never end at IN leaves"),
        Endpoint::Port(n, r) => (*n, *r),
    };
    let kind = g.kind(n).expect("edge to a known node");
    match kind {
        NodeKind::Termination => return Ok(()),
        NodeKind::Lambda if role == Role::In => return Ok(()),
        NodeKind::Dilation(_) => return Err(format!("reaches the dilation gate {n}")),
        _ => {}
    }
    match marks.get(&n) {
        Some(Mark::Done) => return Ok(()),
        Some(Mark::Active) => return Err(format!("runs around a cycle through {n}")),
        None => {}
    }
    marks.insert(n, Mark::Active);
    let next: &[Role] = match kind {
        NodeKind::FanOut => &[Role::LOut, Role::ROut],
        NodeKind::Application => &[Role::Out],
        _ => &[],
    };
    for r in next {
        check_from(g, &Endpoint::Port(n, *r), marks)?;
    }
    marks.insert(n, Mark::Done);
    Ok(())
}

/// Checks the λ-graph condition: no dilation gates, and every path leaving
/// a λ gate's variable output ends in a termination gate or a λ body input.
pub fn is_lambda_graph(g: &Graph) -> LambdaGraphReport {
    let mut violations = Vec::new();
    for (n, kind) in g.nodes() {
        match kind {
            NodeKind::Dilation(_) => violations.push(LambdaViolation::Dilation(n)),
            NodeKind::Lambda => {
                let mut marks = BTreeMap::new();
                if let Err(description) = check_from(g, &Endpoint::Port(n, Role::VOut), &mut marks) {
                    violations.push(LambdaViolation::Path {
                        lambda: n,
                        description,
                    });
                }
            }
            _ => {}
        }
    }
    LambdaGraphReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_isomorphic, parse_glf, validate};
    use crate::lambda::parse_term;

    fn enc(s: &str) -> Graph {
        let g = encode_term(&parse_term(s).unwrap());
        assert!(validate(&g).is_empty(), "{s}");
        g
    }

    fn count(g: &Graph, kind: NodeKind) -> usize {
        g.nodes().filter(|(_, k)| **k == kind).count()
    }

    #[test]
    fn identity_encoding() {
        let g = enc("\\x.x");
        let expect = parse_glf("node n0 LAM\nedge n0.vout n0.in\nedge n0.aout out:root\n").unwrap();
        assert!(is_isomorphic(&g, &expect).is_some());
        // Node names do not matter.
        assert!(is_isomorphic(&g, &enc("\\y.y")).is_some());
    }

    #[test]
    fn unused_variable_is_terminated() {
        let g = enc("\\x.\\y.x");
        let expect = parse_glf(
            "node n0 LAM\nnode n1 LAM\nnode n2 TOP\nedge n0.vout n1.in\nedge n1.vout n2.in\n\
             edge n1.aout n0.in\nedge n0.aout out:root\n",
        )
        .unwrap();
        assert!(is_isomorphic(&g, &expect).is_some());
        assert!(is_lambda_graph(&g).is_lambda_graph());
    }

    #[test]
    fn self_application_shares_through_a_fanout() {
        let g = enc("\\x.x x");
        assert_eq!(count(&g, NodeKind::Lambda), 1);
        assert_eq!(count(&g, NodeKind::FanOut), 1);
        assert_eq!(count(&g, NodeKind::Application), 1);
        let (f, _) = g.nodes().find(|(_, k)| **k == NodeKind::FanOut).unwrap();
        let (l, _) = g.nodes().find(|(_, k)| **k == NodeKind::Lambda).unwrap();
        assert_eq!(g.neighbor(l, Role::VOut), Some(&Endpoint::Port(f, Role::In)));
    }

    #[test]
    fn right_comb_in_occurrence_order() {
        // Three uses of x: two fan-outs, the second hanging off the first's right output.
        let g = enc("\\x.x x x");
        assert_eq!(count(&g, NodeKind::FanOut), 2);
        let fans: Vec<NodeId> = g.nodes().filter(|(_, k)| **k == NodeKind::FanOut).map(|(n, _)| n).collect();
        assert_eq!(g.neighbor(fans[0], Role::ROut), Some(&Endpoint::Port(fans[1], Role::In)));
    }

    #[test]
    fn free_variables_become_in_leaves() {
        let g = enc("y y");
        assert_eq!(g.in_leaf_names().collect::<Vec<_>>(), vec!["y"]);
        assert_eq!(count(&g, NodeKind::FanOut), 1);
        let g = enc("y");
        assert!(is_isomorphic(&g, &parse_glf("edge in:y out:root\n").unwrap()).is_some());
    }

    #[test]
    fn lambda_graph_condition() {
        for s in ["\\x.x", "\\x.\\y.x", "(\\x.x x)(\\x.x x)", "\\f.\\x.f (f x)", "y (\\z.z y)"] {
            assert!(is_lambda_graph(&enc(s)).is_lambda_graph(), "{s}");
        }
        let escaping = parse_glf("node n0 LAM\nedge in:b n0.in\nedge n0.vout out:v\nedge n0.aout out:r\n").unwrap();
        let report = is_lambda_graph(&escaping);
        assert!(!report.is_lambda_graph());
        assert!(matches!(report.violations[0], LambdaViolation::Path { .. }));

        let dil = parse_glf("node n0 DIL eps\nedge in:a n0.in1\nedge in:b n0.in2\nedge n0.out out:c\n").unwrap();
        assert_eq!(is_lambda_graph(&dil).violations, vec![LambdaViolation::Dilation(NodeId(0))]);
    }
}
