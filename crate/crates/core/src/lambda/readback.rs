//! Graph → term readback. Sharing is unfolded.

use std::collections::{BTreeSet, HashMap};

use super::{LambdaError, LambdaTerm};
use crate::graph::{Endpoint, Graph, NodeId, NodeKind, Role};

struct Reader<'a> {
    g: &'a Graph,
    avoid: BTreeSet<String>,
    next: usize,
    /// Current name of each λ gate on the path from the root.
    names: HashMap<NodeId, String>,
    on_path: BTreeSet<NodeId>,
}

impl Reader<'_> {
    fn fresh(&mut self) -> String {
        loop {
            let name = format!("x{}", self.next);
            self.next += 1;
            if !self.avoid.contains(&name) {
                return name;
            }
        }
    }

    fn feeder(&self, n: NodeId, r: Role) -> Result<Endpoint, LambdaError> {
        self.g
            .neighbor(n, r)
            .cloned()
            .ok_or_else(|| LambdaError::Readback(format!("{n}.{r} is not connected")))
    }

    fn enter(&mut self, n: NodeId) -> Result<(), LambdaError> {
        if self.on_path.insert(n) {
            Ok(())
        } else {
            Err(LambdaError::Readback(format!("cycle through {n} without a binder")))
        }
    }

    fn read(&mut self, at: &Endpoint) -> Result<LambdaTerm, LambdaError> {
        let (n, r) = match at {
            Endpoint::InLeaf(x) => return Ok(LambdaTerm::Var(x.clone())),
            Endpoint::OutLeaf(x) => return Err(LambdaError::Readback(format!("edge leaves from OUT leaf {x}"))),
            Endpoint::Port(n, r) => (*n, *r),
        };
        let kind = self.g.kind(n).expect("edge to a known node");
        let term = match (kind, r) {
            (NodeKind::Lambda, Role::AOut) => {
                self.enter(n)?;
                let x = self.fresh();
                let saved = self.names.insert(n, x.clone());
                let body = self.read(&self.feeder(n, Role::In)?)?;
                match saved {
                    Some(s) => self.names.insert(n, s),
                    None => self.names.remove(&n),
                };
                self.on_path.remove(&n);
                LambdaTerm::Abs(x, Box::new(body))
            }
            (NodeKind::Lambda, Role::VOut) => match self.names.get(&n) {
                Some(x) => LambdaTerm::Var(x.clone()),
                None => {
                    return Err(LambdaError::Readback(format!(
                        "variable of {n} is used outside its body"
                    )))
                }
            },
            (NodeKind::FanOut, _) => {
                self.enter(n)?;
                let t = self.read(&self.feeder(n, Role::In)?)?;
                self.on_path.remove(&n);
                t
            }
            (NodeKind::Application, Role::Out) => {
                self.enter(n)?;
                let f = self.read(&self.feeder(n, Role::Fin)?)?;
                let a = self.read(&self.feeder(n, Role::Ain)?)?;
                self.on_path.remove(&n);
                LambdaTerm::App(Box::new(f), Box::new(a))
            }
            (k, _) => {
                return Err(LambdaError::Readback(format!("{} gate {n} inside a term", k.tag())))
            }
        };
        Ok(term)
    }
}

/// Reads back the term at the graph's single OUT leaf. Bound variables get
/// fresh names `x0, x1, …` that avoid the free (IN leaf) names.
pub fn readback(g: &Graph) -> Result<LambdaTerm, LambdaError> {
    let outs: Vec<&str> = g.out_leaf_names().collect();
    let [root] = outs[..] else {
        return Err(LambdaError::Readback(format!(
            "expected exactly one OUT leaf, found {}",
            outs.len()
        )));
    };
    let e = g.out_leaf(root).expect("listed leaf");
    let start = g.edge(e).expect("leaf edge").source.clone();
    let mut reader = Reader {
        g,
        avoid: g.in_leaf_names().map(str::to_string).collect(),
        next: 0,
        names: HashMap::new(),
        on_path: BTreeSet::new(),
    };
    reader.read(&start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_glf;
    use crate::lambda::{alpha_eq, encode_term, parse_term};

    fn round_trip(s: &str) {
        let t = parse_term(s).unwrap();
        let back = readback(&encode_term(&t)).unwrap();
        assert!(alpha_eq(&back, &t), "{s} read back as {back}");
    }

    #[test]
    fn round_trips() {
        for s in [
            "\\x.\\y.x",
            "\\x.x x",
            "(\\x.x x)(\\x.x x)",
            "\\f.\\x.f (f x)",
            "y (\\z.z y)",
            "\\x.\\x.x",
            "x0 (\\x.x x0)",
        ] {
            round_trip(s);
        }
    }

    #[test]
    fn sharing_is_unfolded() {
        let t = readback(&encode_term(&parse_term("\\x.x x").unwrap())).unwrap();
        let LambdaTerm::Abs(x, body) = t else { panic!() };
        assert_eq!(*body, LambdaTerm::app(LambdaTerm::Var(x.clone()), LambdaTerm::Var(x)));
    }

    #[test]
    fn errors() {
        let two = parse_glf("edge in:a out:b\nedge in:c out:d\n").unwrap();
        assert!(matches!(readback(&two), Err(LambdaError::Readback(_))));
        let cyc = parse_glf("node n0 APP\nnode n1 FO\nedge n0.out n1.in\nedge n1.lout n0.fin\n\
                             edge in:a n0.ain\nedge n1.rout out:r\n")
        .unwrap();
        assert!(matches!(readback(&cyc), Err(LambdaError::Readback(m)) if m.contains("cycle")));
    }
}
