//! The engine's self-check: nine end-to-end criteria over the λ-calculus and
//! knot sectors, run on bundled fixtures and seeded random samples.
//!
//! Every sample size, seed and time limit lives in this file. Fixture texts
//! can be swapped out (see [`Fixtures`]) to check that a corrupted fixture is
//! caught.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::gen;
use crate::graph::{emit_glf, is_isomorphic, parse_glf, Endpoint, Graph, NodeId, NodeKind, Role};
use crate::knot::{
    self, classify, decode_to_pd, detect_crossings, encode_diagram, parse_pd, reidemeister_r1,
    reidemeister_r2a, reidemeister_r3a, Chirality, Classification, R1Site, R2Site, R3Direction,
    TangleDiagram,
};
use crate::lambda::{
    alpha_eq, church, encode_term, readback, reduce_graph, reference_eval, LambdaTerm, ReduceStatus,
    DEFAULT_FUEL,
};
use crate::moves::{
    apply_script, beta_expand, beta_expand_site, beta_reduce_detailed, ext1, find_beta_redexes,
    ExpandSite, MoveScript, Strand,
};

/// Base seed of every random sample in the self-check.
pub const SEED: u64 = 0x5EED_61C0;

pub const RANDOM_TERMS: usize = 500;
pub const RANDOM_TERM_DEPTH: usize = 6;
pub const ORACLE_STEPS: u64 = 200;
pub const ETA_INSTANCES: usize = 50;
pub const EMBEDDINGS: usize = 20;
pub const RANDOM_TANGLES: usize = 200;
pub const TANGLE_MAX_CROSSINGS: usize = 8;
pub const MOVES_PER_TANGLE: usize = 10;
pub const RANDOM_DIAGRAMS: usize = 100;
pub const RANDOM_GRAPHS: usize = 1000;
pub const RANDOM_GRAPH_NODES: usize = 12;
pub const INVERSE_CASES: usize = 500;
pub const OMEGA_FUELS: [u64; 3] = [1, 10, 100];

/// Fixture texts the self-check reads. [`Fixtures::default`] gives the
/// bundled ones.
#[derive(Debug, Clone)]
pub struct Fixtures {
    pub r2a_lhs: String,
    pub r2a_rhs: String,
    pub r3a_lhs: String,
    pub r3a_rhs: String,
    /// Move script taking the encoded R3a left side to the right side.
    pub r3a_moves: String,
    pub kink_a: String,
    pub kink_b: String,
    pub trefoil: String,
    pub figure_eight: String,
    pub hopf: String,
}

impl Default for Fixtures {
    fn default() -> Self {
        use knot::fixtures as f;
        Fixtures {
            r2a_lhs: f::R2A_LHS_PD.into(),
            r2a_rhs: f::R2A_RHS_PD.into(),
            r3a_lhs: f::R3A_LHS_PD.into(),
            r3a_rhs: f::R3A_RHS_PD.into(),
            r3a_moves: f::R3A_MOVES.into(),
            kink_a: f::KINK_A_PD.into(),
            kink_b: f::KINK_B_PD.into(),
            trefoil: f::TREFOIL_PD.into(),
            figure_eight: f::FIGURE_EIGHT_PD.into(),
            hopf: f::HOPF_PD.into(),
        }
    }
}

/// One criterion of the self-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Criterion {
    pub number: u8,
    pub name: &'static str,
    /// Sector: `lambda`, `knot`, `moves` or `codec`.
    pub sector: &'static str,
    pub limit: Option<Duration>,
}

const fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

pub const CRITERIA: [Criterion; 9] = [
    Criterion { number: 1, name: "lambda-oracle", sector: "lambda", limit: secs(30) },
    Criterion { number: 2, name: "eta", sector: "lambda", limit: secs(1) },
    Criterion { number: 3, name: "beta-count", sector: "knot", limit: secs(5) },
    Criterion { number: 4, name: "reidemeister-1", sector: "knot", limit: secs(1) },
    Criterion { number: 5, name: "tangle-closure", sector: "knot", limit: secs(30) },
    Criterion { number: 6, name: "redex-crossing", sector: "knot", limit: None },
    Criterion { number: 7, name: "codecs", sector: "codec", limit: None },
    Criterion { number: 8, name: "inverse-pair", sector: "moves", limit: None },
    Criterion { number: 9, name: "divergence", sector: "lambda", limit: secs(1) },
];

impl Criterion {
    /// A filter selects a criterion by number, by name, or by
    /// sector.
    pub fn matches(&self, filter: &str) -> bool {
        filter == self.sector || filter == self.name || filter == self.number.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub criterion: Criterion,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    /// The outcome without its timing, e.g. `PASS 9 divergence: ...`; the
    /// same for every run that reaches the same verdict.
    pub fn verdict(&self) -> String {
        let c = &self.criterion;
        format!("{} {} {}: {}", if self.passed { "PASS" } else { "FAIL" }, c.number, c.name, self.detail)
    }

    /// Elapsed time and limit, e.g. `1.34 s, limit 30 s`.
    pub fn timing(&self) -> String {
        match self.criterion.limit {
            Some(l) => format!("{:.2} s, limit {} s", self.elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.2} s", self.elapsed.as_secs_f64()),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.criterion;
        write!(
            f,
            "{} {} {} ({}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            c.number,
            c.name,
            self.timing(),
            self.detail
        )
    }
}

/// What a check found: whether it held and a one-line account (failures may
/// append a multi-line diff).
type Finding = (bool, String);

/// Runs the criteria selected by `filter` (all when `None`), in order.
pub fn run_selfcheck(fixtures: &Fixtures, filter: Option<&str>) -> Vec<Outcome> {
    let mut walk: Option<(WalkReport, Duration)> = None;
    CRITERIA
        .iter()
        .filter(|c| filter.is_none_or(|f| c.matches(f)))
        .map(|c| {
            let start = Instant::now();
            let (ok, detail) = match c.number {
                1 => lambda_oracle(),
                2 => eta(),
                3 => beta_count(fixtures),
                4 => reidemeister_1(fixtures),
                5 | 6 => {
                    let (report, took) = walk.get_or_insert_with(|| {
                        let s = Instant::now();
                        (tangle_walk(), s.elapsed())
                    });
                    let found = if c.number == 5 { report.closure() } else { report.coincidence() };
                    let elapsed = *took;
                    return finish(*c, found, elapsed);
                }
                7 => codecs(fixtures),
                8 => inverse_pair(),
                _ => divergence(),
            };
            finish(*c, (ok, detail), start.elapsed())
        })
        .collect()
}

fn finish(criterion: Criterion, (ok, mut detail): Finding, elapsed: Duration) -> Outcome {
    let in_time = criterion.limit.is_none_or(|l| elapsed < l);
    if !in_time {
        detail.push_str(" [over the time limit]");
    }
    Outcome {
        criterion,
        passed: ok && in_time,
        detail,
        elapsed,
    }
}

fn tally(name: &str, good: usize, total: usize, first_failure: Option<String>) -> Finding {
    let mut detail = format!("{good}/{total} {name}");
    if let Some(f) = first_failure {
        detail.push_str(&format!("; first failure: {f}"));
    }
    (good == total, detail)
}

/// Encodes, reduces on the graph and reads back; compares with the oracle's
/// normal form.
fn graph_agrees(t: &LambdaTerm, nf: &LambdaTerm) -> Result<(), String> {
    let r = reduce_graph(&encode_term(t), DEFAULT_FUEL).map_err(|e| format!("{t}: {e}"))?;
    if r.status != ReduceStatus::Normal {
        return Err(format!("{t}: {}", r.status));
    }
    let back = readback(&r.graph).map_err(|e| format!("{t}: {e}"))?;
    if alpha_eq(&back, nf) {
        Ok(())
    } else {
        Err(format!("{t} gave {back}, expected {nf}"))
    }
}

fn lambda_oracle() -> Finding {
    let mut cases: Vec<(LambdaTerm, LambdaTerm)> = Vec::new();
    for (_, t) in church::corpus() {
        let (nf, status) = reference_eval(&t, DEFAULT_FUEL);
        assert_eq!(status, ReduceStatus::Normal, "corpus terms normalize");
        cases.push((t, nf));
    }
    let mut rng = gen::rng(SEED);
    for _ in 0..RANDOM_TERMS {
        cases.push(gen::random_normalizing_term(&mut rng, RANDOM_TERM_DEPTH, ORACLE_STEPS));
    }
    let mut good = 0;
    let mut first = None;
    for (t, nf) in &cases {
        match graph_agrees(t, nf) {
            Ok(()) => good += 1,
            Err(e) => {
                first.get_or_insert(e);
            }
        }
    }
    tally("alpha-equal to the reference normal form", good, cases.len(), first)
}

fn eta() -> Finding {
    let mut rng = gen::rng(SEED + 2);
    let mut good = 0;
    let mut first = None;
    for _ in 0..ETA_INSTANCES {
        let f = gen::random_term_over(&mut rng, 4, &["y", "z"]);
        let t = LambdaTerm::abs("x", LambdaTerm::app(f.clone(), LambdaTerm::var("x")));
        let g = encode_term(&t);
        let check = || -> Result<(), String> {
            let out = g.out_leaf(crate::lambda::ROOT_LEAF).and_then(|e| g.edge(e)).ok_or("no root")?;
            let Endpoint::Port(l, Role::AOut) = out.source else {
                return Err("root is not a λ".into());
            };
            let Some(&Endpoint::Port(a, Role::Out)) = g.neighbor(l, Role::In) else {
                return Err("body is not an application".into());
            };
            let h = ext1(&g, l, a).map_err(|e| e.to_string())?;
            let back = readback(&h).map_err(|e| e.to_string())?;
            if alpha_eq(&back, &f) {
                Ok(())
            } else {
                Err(format!("{t} gave {back}"))
            }
        };
        match check() {
            Ok(()) => good += 1,
            Err(e) => {
                first.get_or_insert(e);
            }
        }
    }
    tally("η-contractions read back to f", good, ETA_INSTANCES, first)
}

/// Counts of node kinds, edge shapes, leaf attachments and loops, listed
/// line by line for diffing.
fn signature(g: &Graph) -> BTreeMap<String, usize> {
    let mut sig = BTreeMap::new();
    let tag = |n: NodeId| g.kind(n).map_or("?", NodeKind::tag);
    let end = |e: &Endpoint| match e {
        Endpoint::Port(n, r) => format!("{}.{r}", tag(*n)),
        leaf => leaf.to_string(),
    };
    for (_, k) in g.nodes() {
        *sig.entry(format!("node {}", k.tag())).or_default() += 1;
    }
    for (_, e) in g.edges() {
        *sig.entry(format!("edge {} -> {}", end(&e.source), end(&e.target))).or_default() += 1;
    }
    *sig.entry("loops".to_string()).or_default() += g.loop_count();
    sig
}

/// A line diff of two graphs' signatures: `-` lines only in `expected`,
/// `+` lines only in `actual`.
pub fn graph_diff(expected: &Graph, actual: &Graph) -> String {
    let (a, b) = (signature(expected), signature(actual));
    let mut out = String::new();
    for key in a.keys().chain(b.keys()).collect::<std::collections::BTreeSet<_>>() {
        let (x, y) = (a.get(key).copied().unwrap_or(0), b.get(key).copied().unwrap_or(0));
        if x != y {
            out.push_str(&format!("  - {key} ×{x}\n  + {key} ×{y}\n"));
        }
    }
    if out.is_empty() {
        out.push_str("  (same gate and edge counts; the wiring differs)\n");
    }
    out.push_str("  expected:\n");
    out.extend(emit_glf(expected).lines().map(|l| format!("    {l}\n")));
    out.push_str("  actual:\n");
    out.extend(emit_glf(actual).lines().map(|l| format!("    {l}\n")));
    out
}

fn encode_pd(text: &str) -> Result<Graph, String> {
    let d = parse_pd(text).map_err(|e| e.to_string())?;
    encode_diagram(&d).map(|(g, _)| g).map_err(|e| e.to_string())
}

fn expect_iso(what: &str, actual: &Graph, expected: &Graph) -> Result<(), String> {
    if is_isomorphic(actual, expected).is_some() {
        Ok(())
    } else {
        Err(format!("{what}: result is not isomorphic to the right side\n{}", graph_diff(expected, actual)))
    }
}

fn expect_betas(what: &str, got: usize, want: usize) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: beta_count {got}, expected {want}"))
    }
}

fn lambda_of(index: usize) -> NodeId {
    NodeId(2 * index as u32)
}

fn beta_count(fx: &Fixtures) -> Finding {
    let fixtures = || -> Result<(), String> {
        let (lhs, rhs) = (encode_pd(&fx.r2a_lhs)?, encode_pd(&fx.r2a_rhs)?);
        let m = reidemeister_r2a(&lhs, R2Site::Crossings { first: lambda_of(0), second: lambda_of(1) })
            .map_err(|e| format!("R2a fixture: {e}"))?;
        expect_betas("R2a fixture", m.trace.beta_count(), 2)?;
        expect_iso("R2a fixture", &m.graph, &rhs)?;

        let (lhs, rhs) = (encode_pd(&fx.r3a_lhs)?, encode_pd(&fx.r3a_rhs)?);
        let script = MoveScript::parse(&fx.r3a_moves).map_err(|e| format!("R3a script: {e}"))?;
        let (out, trace) = apply_script(&lhs, &script).map_err(|e| format!("R3a script: {e}"))?;
        expect_betas("R3a script", trace.beta_count(), 6)?;
        expect_iso("R3a script", &out, &rhs)?;
        let m = reidemeister_r3a(&lhs, [0, 1, 2].map(lambda_of), R3Direction::Forward)
            .map_err(|e| format!("R3a fixture: {e}"))?;
        expect_betas("R3a fixture", m.trace.beta_count(), 6)?;
        expect_iso("R3a fixture", &m.graph, &rhs)
    };
    if let Err(e) = fixtures() {
        return (false, e);
    }
    let mut rng = gen::rng(SEED + 3);
    let mut good = 0;
    let mut first = None;
    for i in 0..2 * EMBEDDINGS {
        let r2 = i % 2 == 0;
        let emb = if r2 { gen::random_r2a_embedding(&mut rng) } else { gen::random_r3a_embedding(&mut rng) };
        let check = || -> Result<(), String> {
            let (lhs, _) = encode_diagram(&emb.lhs).map_err(|e| e.to_string())?;
            let (rhs, _) = encode_diagram(&emb.rhs).map_err(|e| e.to_string())?;
            let at: Vec<NodeId> = emb.crossings.iter().map(|&c| lambda_of(c)).collect();
            let (m, want) = if r2 {
                (reidemeister_r2a(&lhs, R2Site::Crossings { first: at[0], second: at[1] }), 2)
            } else {
                (reidemeister_r3a(&lhs, [at[0], at[1], at[2]], R3Direction::Forward), 6)
            };
            let name = if r2 { "R2a embedding" } else { "R3a embedding" };
            let m = m.map_err(|e| format!("{name}: {e}"))?;
            expect_betas(name, m.trace.beta_count(), want)?;
            expect_iso(name, &m.graph, &rhs)
        };
        match check() {
            Ok(()) => good += 1,
            Err(e) => {
                first.get_or_insert(e);
            }
        }
    }
    let (ok, detail) = tally("random embeddings", good, 2 * EMBEDDINGS, first);
    (ok, format!("fixtures: R2a beta=2, R3a beta=6, both isomorphic to the right sides; {detail}"))
}

fn reidemeister_1(fx: &Fixtures) -> Finding {
    let strand = parse_glf("edge in:a out:b\n").expect("static GLF");
    let run = || -> Result<usize, String> {
        let mut checks = 0;
        for (c, text) in [(Chirality::A, &fx.kink_a), (Chirality::B, &fx.kink_b)] {
            let kink = encode_pd(text)?;
            let err = |e: knot::KnotError| format!("{c:?}: {e}");
            let removed = reidemeister_r1(&kink, R1Site::Kink(lambda_of(0)), c).map_err(err)?;
            expect_iso(&format!("R1 removal {c:?}"), &removed.graph, &strand)?;
            // insert ∘ remove on the kink
            let e = removed.graph.in_leaf("a").ok_or("no strand after removal")?;
            let again = reidemeister_r1(&removed.graph, R1Site::Strand(Strand::Edge(e)), c).map_err(err)?;
            expect_iso(&format!("insert after remove {c:?}"), &again.graph, &kink)?;
            // remove ∘ insert on the bare strand
            let e = strand.in_leaf("a").expect("static GLF");
            let inserted = reidemeister_r1(&strand, R1Site::Strand(Strand::Edge(e)), c).map_err(err)?;
            let l = inserted.created[0].0.lambda;
            let back = reidemeister_r1(&inserted.graph, R1Site::Kink(l), c).map_err(err)?;
            expect_iso(&format!("remove after insert {c:?}"), &back.graph, &strand)?;
            checks += 3;
        }
        Ok(checks)
    };
    match run() {
        Ok(n) => (true, format!("{n}/{n} removal, insert∘remove and remove∘insert checks (both chiralities)")),
        Err(e) => (false, e),
    }
}

#[derive(Debug, Default)]
struct WalkReport {
    graphs: usize,
    not_tangle: Option<String>,
    mismatch: Option<String>,
    not_tangle_count: usize,
    mismatch_count: usize,
}

impl WalkReport {
    fn closure(&self) -> Finding {
        let good = self.graphs - self.not_tangle_count;
        tally("graphs classified TANGLE", good, self.graphs, self.not_tangle.clone())
    }

    fn coincidence(&self) -> Finding {
        let good = self.graphs - self.mismatch_count;
        tally("graphs with redexes = crossings", good, self.graphs, self.mismatch.clone())
    }
}

fn tangle_walk() -> WalkReport {
    let mut rng = gen::rng(SEED + 5);
    let mut report = WalkReport::default();
    for i in 0..RANDOM_TANGLES {
        let d = gen::random_tangle(&mut rng, TANGLE_MAX_CROSSINGS);
        let (mut g, _) = encode_diagram(&d).expect("generated diagrams are valid");
        for step in 0..=MOVES_PER_TANGLE {
            if step > 0 {
                g = gen::random_tangle_move(&mut rng, &g).0;
            }
            report.graphs += 1;
            let class = classify(&g);
            if class != Classification::Tangle {
                report.not_tangle_count += 1;
                report.not_tangle.get_or_insert(format!("tangle {i}, step {step}: {class}"));
            }
            let crossings: Vec<_> = detect_crossings(&g).iter().map(|r| r.edge).collect();
            let redexes: Vec<_> = find_beta_redexes(&g).iter().map(|r| r.edge).collect();
            if crossings != redexes {
                report.mismatch_count += 1;
                report.mismatch.get_or_insert(format!("tangle {i}, step {step}"));
            }
        }
    }
    report
}

fn codecs(fx: &Fixtures) -> Finding {
    let mut diagrams: Vec<(String, TangleDiagram)> = Vec::new();
    for (name, text) in [("trefoil", &fx.trefoil), ("figure-eight", &fx.figure_eight), ("Hopf", &fx.hopf)] {
        match parse_pd(text) {
            Ok(d) => diagrams.push((name.to_string(), d)),
            Err(e) => return (false, format!("{name}: {e}")),
        }
    }
    let mut rng = gen::rng(SEED + 7);
    for i in 0..RANDOM_DIAGRAMS {
        let d = if i % 2 == 0 {
            gen::random_tangle(&mut rng, TANGLE_MAX_CROSSINGS)
        } else {
            let strands = rng.gen_range(2..=4);
            let len = rng.gen_range(1..=TANGLE_MAX_CROSSINGS);
            crate::knot::braid_closure(strands, &gen::random_braid_word(&mut rng, strands, len))
        };
        diagrams.push((format!("random diagram {i}"), d));
    }
    let mut pd_good = 0;
    let mut first = None;
    for (name, d) in &diagrams {
        let back = encode_diagram(d).and_then(|(g, b)| decode_to_pd(&g, &b));
        match back {
            Ok(back) if back.equal_up_to_relabeling(d) => pd_good += 1,
            Ok(back) => {
                first.get_or_insert(format!("{name} decoded as\n{back}"));
            }
            Err(e) => {
                first.get_or_insert(format!("{name}: {e}"));
            }
        }
    }
    let mut glf_good = 0;
    for i in 0..RANDOM_GRAPHS {
        let g = gen::random_graph(&mut rng, RANDOM_GRAPH_NODES);
        match parse_glf(&emit_glf(&g)) {
            Ok(h) if is_isomorphic(&g, &h).is_some() => glf_good += 1,
            Ok(_) => {
                first.get_or_insert(format!("random graph {i}: GLF round trip not isomorphic"));
            }
            Err(e) => {
                first.get_or_insert(format!("random graph {i}: {e}"));
            }
        }
    }
    let total = diagrams.len() + RANDOM_GRAPHS;
    let (ok, _) = tally("", pd_good + glf_good, total, None);
    let mut detail = format!(
        "{pd_good}/{} PD round trips, {glf_good}/{RANDOM_GRAPHS} GLF round trips",
        diagrams.len()
    );
    if let Some(f) = first {
        detail.push_str(&format!("; first failure: {f}"));
    }
    (ok, detail)
}

/// A random graph with at least one strand: an encoded random term or a
/// random tangle, alternately.
fn inverse_sample(rng: &mut gen::GenRng, i: usize) -> Graph {
    if i.is_multiple_of(2) {
        encode_term(&gen::random_closed_term(rng, 6))
    } else {
        let d = gen::random_tangle(rng, TANGLE_MAX_CROSSINGS);
        let mut g = encode_diagram(&d).expect("generated diagrams are valid").0;
        if rng.gen_bool(0.3) {
            g.add_loops(1);
        }
        g
    }
}

fn inverse_pair() -> Finding {
    let mut rng = gen::rng(SEED + 8);
    let mut good = 0;
    let mut total = 0;
    let mut first = None;
    let fail = |msg: String, first: &mut Option<String>| {
        first.get_or_insert(msg);
    };
    // Expand, then reduce the new redex.
    let mut i = 0;
    while total < INVERSE_CASES {
        let g = inverse_sample(&mut rng, i);
        i += 1;
        let mut strands: Vec<Strand> = g.edges().map(|(e, _)| Strand::Edge(e)).collect();
        strands.extend((0..g.loop_count()).map(|_| Strand::Loop));
        let Some(&over) = strands.choose(&mut rng) else { continue };
        total += 1;
        let expanded = if rng.gen_bool(0.2) {
            beta_expand_site(&g, &ExpandSite::Split { carrier: over, over_first: rng.gen_bool(0.5) })
        } else {
            let under = *strands.choose(&mut rng).expect("non-empty");
            if over == Strand::Loop && under == Strand::Loop && g.loop_count() < 2 {
                beta_expand_site(&g, &ExpandSite::Split { carrier: over, over_first: true })
            } else {
                beta_expand(&g, over, under)
            }
        };
        // Loops born by the reduction are eliminated, except those that
        // the expansion took from the graph as strands: they come back.
        let result = expanded
            .and_then(|x| {
                let consumed = g.loop_count() - x.graph.loop_count();
                let red = beta_reduce_detailed(&x.graph, &x.redex)?;
                let mut h = red.graph;
                h.add_loops(consumed.min(red.loops_born));
                Ok((h, ()))
            })
            .map_err(|e| e.to_string())
            .and_then(|(h, _)| {
                is_isomorphic(&g, &h)
                    .map(|_| ())
                    .ok_or_else(|| format!("expand∘reduce case {total}\n{}", graph_diff(&g, &h)))
            });
        match result {
            Ok(()) => good += 1,
            Err(e) => fail(e, &mut first),
        }
    }
    // Reduce, then expand at the inverse site.
    let mut reduced = 0;
    while reduced < INVERSE_CASES {
        let g = inverse_sample(&mut rng, i);
        i += 1;
        let redexes = find_beta_redexes(&g);
        let Some(r) = redexes.choose(&mut rng) else { continue };
        reduced += 1;
        total += 1;
        let result = beta_reduce_detailed(&g, r)
            .and_then(|red| {
                let mut h = red.graph;
                h.add_loops(red.loops_born);
                beta_expand_site(&h, &red.inverse)
            })
            .map_err(|e| e.to_string())
            .and_then(|x| {
                is_isomorphic(&g, &x.graph)
                    .map(|_| ())
                    .ok_or_else(|| format!("reduce∘expand case {reduced}\n{}", graph_diff(&g, &x.graph)))
            });
        match result {
            Ok(()) => good += 1,
            Err(e) => fail(e, &mut first),
        }
    }
    tally("expand/reduce round trips are identities", good, total, first)
}

fn divergence() -> Finding {
    let g = encode_term(&church::omega());
    let mut seen = Vec::new();
    for fuel in OMEGA_FUELS {
        match reduce_graph(&g, fuel) {
            Ok(r) if r.status == ReduceStatus::FuelExhausted => seen.push(format!("fuel {fuel}: {}", r.status)),
            Ok(r) => return (false, format!("fuel {fuel}: {}", r.status)),
            Err(e) => return (false, format!("fuel {fuel}: {e}")),
        }
    }
    (true, seen.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_select_by_sector_name_and_number() {
        let pick = |f: &str| CRITERIA.iter().filter(|c| c.matches(f)).map(|c| c.number).collect::<Vec<_>>();
        assert_eq!(pick("lambda"), vec![1, 2, 9]);
        assert_eq!(pick("knot"), vec![3, 4, 5, 6]);
        assert_eq!(pick("eta"), vec![2]);
        assert_eq!(pick("7"), vec![7]);
    }

    #[test]
    fn corrupted_r3a_script_fails_with_a_diff() {
        let mut fx = Fixtures::default();
        fx.r3a_moves = fx.r3a_moves.replace("beta+ in:b in:c", "beta+ in:c in:b");
        let out = run_selfcheck(&fx, Some("beta-count"));
        assert_eq!(out.len(), 1);
        assert!(!out[0].passed);
        assert!(out[0].detail.contains("not isomorphic"), "{}", out[0].detail);
        assert!(out[0].detail.contains("expected:"));
    }

    #[test]
    fn divergence_and_eta_pass() {
        for f in ["eta", "divergence"] {
            let out = run_selfcheck(&Fixtures::default(), Some(f));
            assert!(out.len() == 1 && out[0].passed, "{out:?}");
        }
    }
}
