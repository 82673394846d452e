//! Seeded random generators for terms, graphs and tangles, shared by the
//! property tests, the acceptance suite and `glc selfcheck`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::collections::BTreeSet;

use crate::graph::{Endpoint, Graph, NodeKind, Role};
use crate::knot::{braid_tangle, BraidLetter, Sign, TangleDiagram};
use crate::lambda::{reference_eval_counted, LambdaTerm, ReduceStatus};
use crate::moves::{
    add_loop, beta_expand, beta_reduce, eliminate_loop, find_beta_redexes, MoveTrace, Strand,
};

/// The generator used everywhere, so that every seed reproduces exactly.
pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

/// A random closed term of depth at most `max_depth` (at least 2). Bound
/// names come from a small pool, so shadowing is common.
pub fn random_closed_term(rng: &mut impl Rng, max_depth: usize) -> LambdaTerm {
    assert!(max_depth >= 2, "a closed term has depth at least 2");
    let mut scope = Vec::new();
    term(rng, max_depth, &mut scope)
}

/// A random term over the free variables `free` (which may be empty).
pub fn random_term_over(rng: &mut impl Rng, max_depth: usize, free: &[&str]) -> LambdaTerm {
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    if scope.is_empty() && max_depth < 2 {
        return LambdaTerm::abs("x", LambdaTerm::var("x"));
    }
    term(rng, max_depth.max(1), &mut scope)
}

fn term(rng: &mut impl Rng, depth: usize, scope: &mut Vec<String>) -> LambdaTerm {
    let can_var = !scope.is_empty();
    if depth == 1 {
        return LambdaTerm::Var(scope.choose(rng).expect("scope checked by caller").clone());
    }
    // Sub-terms one level down must be able to close.
    let can_app = can_var || depth > 2;
    let mut choices = vec![1u8];
    if can_var {
        choices.extend([0, 0]);
    }
    if can_app {
        choices.extend([2, 2, 2]);
    }
    match *choices.choose(rng).expect("abstraction is always possible") {
        0 => LambdaTerm::Var(scope.choose(rng).expect("non-empty").clone()),
        1 => {
            let x = NAMES.choose(rng).expect("non-empty").to_string();
            scope.push(x.clone());
            let body = term(rng, depth - 1, scope);
            scope.pop();
            LambdaTerm::Abs(x, Box::new(body))
        }
        _ => {
            let f = term(rng, depth - 1, scope);
            let a = term(rng, depth - 1, scope);
            LambdaTerm::app(f, a)
        }
    }
}

/// Largest intermediate term the oracle is allowed to build while screening
/// random terms; terms that blow up beyond it are skipped as if divergent.
pub const ORACLE_SIZE_CAP: usize = 20_000;

/// A random closed term of depth ≤ `max_depth` whose normal form the
/// reference evaluator reaches within `max_steps`, together with that
/// normal form. Terms that are already normal are kept only a quarter of
/// the time, to keep the sample focused on reduction.
pub fn random_normalizing_term(
    rng: &mut impl Rng,
    max_depth: usize,
    max_steps: u64,
) -> (LambdaTerm, LambdaTerm) {
    loop {
        let t = random_closed_term(rng, max_depth);
        let (nf, status, steps) = reference_eval_counted(&t, max_steps, ORACLE_SIZE_CAP);
        if status != ReduceStatus::Normal {
            continue;
        }
        if steps == 0 && rng.gen_bool(0.75) {
            continue;
        }
        return (t, nf);
    }
}

/// A random valid graph built from random gates and a random perfect
/// matching of their ports, with some leaves and loops. Used to exercise
/// formats and structural invariants.
pub fn random_graph(rng: &mut impl Rng, max_nodes: usize) -> Graph {
    let mut g = Graph::new();
    let n = rng.gen_range(0..=max_nodes);
    let kinds = [
        NodeKind::Lambda,
        NodeKind::FanOut,
        NodeKind::Application,
        NodeKind::Termination,
        NodeKind::Dilation("eps".to_string()),
        NodeKind::Dilation("mu".to_string()),
    ];
    let mut outputs = Vec::new();
    let mut inputs = Vec::new();
    for _ in 0..n {
        let kind = kinds.choose(rng).expect("non-empty").clone();
        let id = g.add_node(kind.clone());
        for r in kind.roles() {
            let end = Endpoint::Port(id, *r);
            if r.direction() == crate::graph::Direction::Output {
                outputs.push(end);
            } else {
                inputs.push(end);
            }
        }
    }
    // Free strands between leaves.
    for i in 0..rng.gen_range(0..3) {
        outputs.push(Endpoint::InLeaf(format!("s{i}")));
        inputs.push(Endpoint::OutLeaf(format!("t{i}")));
    }
    // Balance the two sides with leaves.
    let mut leaf = 0;
    while outputs.len() < inputs.len() {
        outputs.push(Endpoint::InLeaf(format!("i{leaf}")));
        leaf += 1;
    }
    while inputs.len() < outputs.len() {
        inputs.push(Endpoint::OutLeaf(format!("o{leaf}")));
        leaf += 1;
    }
    inputs.shuffle(rng);
    for (s, t) in outputs.into_iter().zip(inputs) {
        g.connect(s, t).expect("each end used once");
    }
    g.add_loops(rng.gen_range(0..3));
    g
}

fn random_sign(rng: &mut impl Rng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// A random braid word of length `len` on `strands ≥ 2` strands.
pub fn random_braid_word(rng: &mut impl Rng, strands: usize, len: usize) -> Vec<BraidLetter> {
    (0..len)
        .map(|_| BraidLetter::new(rng.gen_range(1..strands), random_sign(rng)))
        .collect()
}

/// Closes each position with probability 0.3, keeping at least one open.
fn random_closure(rng: &mut impl Rng, strands: usize) -> BTreeSet<usize> {
    let mut closed: BTreeSet<usize> = (1..=strands).filter(|_| rng.gen_bool(0.3)).collect();
    if closed.len() == strands {
        let keep = rng.gen_range(1..=strands);
        closed.remove(&keep);
    }
    closed
}

/// A random tangle diagram with at most `max_crossings` crossings: a braid
/// on one to four strands, some positions closed up, sometimes an extra
/// crossing-free circle. At least one strand stays open, so the diagram
/// always has boundary.
pub fn random_tangle(rng: &mut impl Rng, max_crossings: usize) -> TangleDiagram {
    let strands = rng.gen_range(1..=4);
    let len = if strands == 1 { 0 } else { rng.gen_range(0..=max_crossings) };
    let word = random_braid_word(rng, strands, len);
    let mut d = braid_tangle(strands, &word, &random_closure(rng, strands));
    d.circles += usize::from(rng.gen_bool(0.2));
    d
}

/// A Reidemeister pattern placed inside a larger braid tangle.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// The tangle containing the move's left side.
    pub lhs: TangleDiagram,
    /// The same tangle with the left side replaced by the right side.
    pub rhs: TangleDiagram,
    /// Indices (in `lhs` crossing order) of the pattern's crossings.
    pub crossings: Vec<usize>,
}

/// Whether the pattern crossings of `d` share exactly `inner` arcs among
/// themselves, so that closing strands did not wire the pattern to itself.
fn pattern_is_clean(d: &TangleDiagram, at: &[usize], inner: usize) -> bool {
    let produced: BTreeSet<&str> = at
        .iter()
        .flat_map(|&i| [d.crossings[i].over_out.as_str(), d.crossings[i].under_out.as_str()])
        .collect();
    let consumed: BTreeSet<&str> = at
        .iter()
        .flat_map(|&i| [d.crossings[i].over_in.as_str(), d.crossings[i].under_in.as_str()])
        .collect();
    produced.intersection(&consumed).count() == inner
}

fn embed(
    rng: &mut impl Rng,
    min_strands: usize,
    pattern: impl Fn(usize) -> (Vec<BraidLetter>, Vec<BraidLetter>),
) -> Embedding {
    loop {
        let strands = rng.gen_range(min_strands..=min_strands + 2);
        let (before, after) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        let prefix = random_braid_word(rng, strands, before);
        let suffix = random_braid_word(rng, strands, after);
        let (left, right) = pattern(rng.gen_range(1..=strands + 1 - min_strands));
        let closed = random_closure(rng, strands);
        let word = |middle: &[BraidLetter]| -> Vec<BraidLetter> {
            prefix.iter().chain(middle).chain(&suffix).copied().collect()
        };
        let lhs = braid_tangle(strands, &word(&left), &closed);
        let crossings: Vec<usize> = (prefix.len()..prefix.len() + left.len()).collect();
        if !pattern_is_clean(&lhs, &crossings, left.len()) {
            continue;
        }
        let rhs = braid_tangle(strands, &word(&right), &closed);
        return Embedding { lhs, rhs, crossings };
    }
}

/// `σi σi⁻¹` inside a random braid tangle; the right side drops both letters.
pub fn random_r2a_embedding(rng: &mut impl Rng) -> Embedding {
    embed(rng, 2, |i| {
        (
            vec![BraidLetter::new(i, Sign::Positive), BraidLetter::new(i, Sign::Negative)],
            Vec::new(),
        )
    })
}

/// `σi σi+1 σi` (all positive) inside a random braid tangle; the right side
/// is `σi+1 σi σi+1`.
pub fn random_r3a_embedding(rng: &mut impl Rng) -> Embedding {
    embed(rng, 3, |i| {
        let p = |k| BraidLetter::new(k, Sign::Positive);
        (vec![p(i), p(i + 1), p(i)], vec![p(i + 1), p(i), p(i + 1)])
    })
}

/// One random move on a tangle graph: a β reduction at a random crossing, a
/// β expansion on two random strands (edges or loops), or adding or
/// eliminating a loop. Always succeeds.
pub fn random_tangle_move(rng: &mut impl Rng, g: &Graph) -> (Graph, MoveTrace) {
    let strands: Vec<Strand> = g
        .edges()
        .filter(|(_, e)| !matches!(e.source, Endpoint::Port(_, Role::AOut)))
        .map(|(id, _)| Strand::Edge(id))
        .chain((0..g.loop_count().min(2)).map(|_| Strand::Loop))
        .collect();
    loop {
        match rng.gen_range(0..5) {
            0 | 1 => {
                let redexes = find_beta_redexes(g);
                if let Some(r) = redexes.choose(rng) {
                    return beta_reduce(g, r).expect("redexes reduce");
                }
            }
            2 | 3 => {
                if strands.is_empty() {
                    continue;
                }
                let over = *strands.choose(rng).expect("non-empty");
                let under = *strands.choose(rng).expect("non-empty");
                if over == Strand::Loop && under == Strand::Loop && g.loop_count() < 2 {
                    continue;
                }
                let x = beta_expand(g, over, under).expect("strands expand");
                return (x.graph, x.trace);
            }
            _ => {
                let mut trace = MoveTrace::new();
                if g.loop_count() > 0 && rng.gen_bool(0.5) {
                    trace.push(crate::moves::Step::ElimLoop);
                    return (eliminate_loop(g).expect("has a loop"), trace);
                }
                trace.push(crate::moves::Step::AddLoop);
                return (add_loop(g), trace);
            }
        }
    }
}
