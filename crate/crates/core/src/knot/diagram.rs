//! Oriented tangle diagrams and their PD-style text form.
//!
//! ```text
//! # one positive crossing
//! x + a b c d        # sign, over_in, over_out, under_in, under_out
//! bin a c            # boundary arcs entering the diagram (optional)
//! bout b d           # boundary arcs leaving it (optional)
//! circles 0          # crossing-free closed components
//! ```
//!
//! A boundary token is `arc` or `arc=leaf`; the leaf name defaults to the
//! arc name. The long form lets a crossing-free strand carry different names
//! at its two ends (`bin s=a` / `bout s=b`). Without `bin`/`bout` lines the
//! boundary is inferred in order of first appearance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::KnotError;
use crate::graph::glf::tokens;

pub type ArcId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Sign::Positive),
            "-" => Ok(Sign::Negative),
            other => Err(format!("crossing sign must be + or -, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub sign: Sign,
    pub over_in: ArcId,
    pub over_out: ArcId,
    pub under_in: ArcId,
    pub under_out: ArcId,
}

impl Crossing {
    pub fn new(sign: Sign, over_in: &str, over_out: &str, under_in: &str, under_out: &str) -> Self {
        Crossing {
            sign,
            over_in: over_in.into(),
            over_out: over_out.into(),
            under_in: under_in.into(),
            under_out: under_out.into(),
        }
    }

    pub fn arcs(&self) -> [&ArcId; 4] {
        [&self.over_in, &self.over_out, &self.under_in, &self.under_out]
    }
}

/// A boundary point: the arc there and the name of its leaf.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryPoint {
    pub arc: ArcId,
    pub leaf: String,
}

impl BoundaryPoint {
    pub fn named(arc: &str) -> Self {
        BoundaryPoint {
            arc: arc.into(),
            leaf: arc.into(),
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arc == self.leaf {
            write!(f, "{}", self.arc)
        } else {
            write!(f, "{}={}", self.arc, self.leaf)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TangleDiagram {
    pub crossings: Vec<Crossing>,
    pub boundary_in: Vec<BoundaryPoint>,
    pub boundary_out: Vec<BoundaryPoint>,
    /// Crossing-free closed components.
    pub circles: usize,
}

impl TangleDiagram {
    pub fn is_link(&self) -> bool {
        self.boundary_in.is_empty() && self.boundary_out.is_empty()
    }

    /// Checks that every arc is produced exactly once and consumed exactly
    /// once, counting boundary points, and that leaf names are unique.
    pub fn validate(&self) -> Result<(), KnotError> {
        let mut produced: BTreeMap<&str, usize> = BTreeMap::new();
        let mut consumed: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &self.crossings {
            *produced.entry(&c.over_out).or_default() += 1;
            *produced.entry(&c.under_out).or_default() += 1;
            *consumed.entry(&c.over_in).or_default() += 1;
            *consumed.entry(&c.under_in).or_default() += 1;
        }
        for b in &self.boundary_in {
            *produced.entry(&b.arc).or_default() += 1;
        }
        for b in &self.boundary_out {
            *consumed.entry(&b.arc).or_default() += 1;
        }
        let arcs: BTreeSet<&str> = produced.keys().chain(consumed.keys()).copied().collect();
        for arc in arcs {
            let p = produced.get(arc).copied().unwrap_or(0);
            let c = consumed.get(arc).copied().unwrap_or(0);
            if p + c > 2 {
                return Err(KnotError::Invalid(format!("arc `{arc}` is used {} times", p + c)));
            }
            if p != 1 || c != 1 {
                return Err(KnotError::Invalid(format!(
                    "arc `{arc}` has {p} start(s) and {c} end(s); boundary and crossings disagree"
                )));
            }
        }
        for (side, list) in [("bin", &self.boundary_in), ("bout", &self.boundary_out)] {
            let mut seen = BTreeSet::new();
            for b in list {
                if !seen.insert(&b.leaf) {
                    return Err(KnotError::Invalid(format!("{side} leaf `{}` repeated", b.leaf)));
                }
            }
        }
        Ok(())
    }

    /// Renames every arc canonically (in order of appearance along the
    /// crossing list, then the boundary) and sorts the boundary by leaf name.
    /// Two diagrams listing their crossings in the same order are equal up to
    /// arc relabeling iff their canonical forms are equal.
    pub fn canonical(&self) -> TangleDiagram {
        let mut names: BTreeMap<String, String> = BTreeMap::new();
        let mut name = |arc: &ArcId| -> String {
            let next = names.len();
            names.entry(arc.clone()).or_insert_with(|| format!("_{next}")).clone()
        };
        let crossings = self
            .crossings
            .iter()
            .map(|c| Crossing {
                sign: c.sign,
                over_in: name(&c.over_in),
                over_out: name(&c.over_out),
                under_in: name(&c.under_in),
                under_out: name(&c.under_out),
            })
            .collect();
        let mut relabel = |list: &[BoundaryPoint]| {
            let mut sorted = list.to_vec();
            sorted.sort_by(|a, b| a.leaf.cmp(&b.leaf));
            sorted
                .into_iter()
                .map(|b| BoundaryPoint {
                    arc: name(&b.arc),
                    leaf: b.leaf,
                })
                .collect::<Vec<_>>()
        };
        let boundary_in = relabel(&self.boundary_in);
        let boundary_out = relabel(&self.boundary_out);
        TangleDiagram {
            crossings,
            boundary_in,
            boundary_out,
            circles: self.circles,
        }
    }

    /// Whether some renaming of arcs and reordering of crossings turns
    /// `self` into `other`, keeping signs, crossing roles and leaf names.
    pub fn equal_up_to_relabeling(&self, other: &TangleDiagram) -> bool {
        if self.crossings.len() != other.crossings.len()
            || self.circles != other.circles
            || self.boundary_in.len() != other.boundary_in.len()
            || self.boundary_out.len() != other.boundary_out.len()
        {
            return false;
        }
        let (a, b) = (ArcIndex::new(self), ArcIndex::new(other));
        let mut m = Relabeling::new(self.crossings.len());
        for (mine, theirs) in [(&self.boundary_in, &other.boundary_in), (&self.boundary_out, &other.boundary_out)] {
            let mut mine = mine.clone();
            let mut theirs = theirs.clone();
            mine.sort_by(|x, y| x.leaf.cmp(&y.leaf));
            theirs.sort_by(|x, y| x.leaf.cmp(&y.leaf));
            for (x, y) in mine.iter().zip(&theirs) {
                if x.leaf != y.leaf || !m.bind_arc(&x.arc, &y.arc) {
                    return false;
                }
            }
        }
        m.search(self, other, &a, &b)
    }
}

/// Where each arc starts and ends: `(crossing, role)` with role 0 for the
/// over strand and 1 for the under strand.
struct ArcIndex<'d> {
    head: BTreeMap<&'d str, (usize, u8)>,
    tail: BTreeMap<&'d str, (usize, u8)>,
}

impl<'d> ArcIndex<'d> {
    fn new(d: &'d TangleDiagram) -> Self {
        let mut head = BTreeMap::new();
        let mut tail = BTreeMap::new();
        for (i, c) in d.crossings.iter().enumerate() {
            head.insert(c.over_in.as_str(), (i, 0));
            head.insert(c.under_in.as_str(), (i, 1));
            tail.insert(c.over_out.as_str(), (i, 0));
            tail.insert(c.under_out.as_str(), (i, 1));
        }
        ArcIndex { head, tail }
    }
}

/// A partial bijection between the arcs and crossings of two diagrams.
#[derive(Clone)]
struct Relabeling {
    arcs: BTreeMap<String, String>,
    arcs_back: BTreeMap<String, String>,
    crossings: Vec<Option<usize>>,
    crossings_back: BTreeSet<usize>,
    pending: Vec<(String, String)>,
}

impl Relabeling {
    fn new(n: usize) -> Self {
        Relabeling {
            arcs: BTreeMap::new(),
            arcs_back: BTreeMap::new(),
            crossings: vec![None; n],
            crossings_back: BTreeSet::new(),
            pending: Vec::new(),
        }
    }

    fn bind_arc(&mut self, x: &str, y: &str) -> bool {
        match (self.arcs.get(x), self.arcs_back.get(y)) {
            (Some(y0), _) => y0 == y,
            (None, Some(_)) => false,
            (None, None) => {
                self.arcs.insert(x.to_string(), y.to_string());
                self.arcs_back.insert(y.to_string(), x.to_string());
                self.pending.push((x.to_string(), y.to_string()));
                true
            }
        }
    }

    fn bind_crossing(&mut self, da: &TangleDiagram, db: &TangleDiagram, i: usize, j: usize) -> bool {
        if let Some(j0) = self.crossings[i] {
            return j0 == j;
        }
        if self.crossings_back.contains(&j) || da.crossings[i].sign != db.crossings[j].sign {
            return false;
        }
        self.crossings[i] = Some(j);
        self.crossings_back.insert(j);
        da.crossings[i].arcs().iter().zip(db.crossings[j].arcs()).all(|(x, y)| self.bind_arc(x, y))
    }

    /// Follows every newly bound arc to the crossings at its two ends,
    /// which are then forced.
    fn propagate(&mut self, da: &TangleDiagram, db: &TangleDiagram, a: &ArcIndex, b: &ArcIndex) -> bool {
        while let Some((x, y)) = self.pending.pop() {
            for (ia, ib) in [(&a.head, &b.head), (&a.tail, &b.tail)] {
                match (ia.get(x.as_str()), ib.get(y.as_str())) {
                    (None, None) => {}
                    (Some(&(i, ri)), Some(&(j, rj))) if ri == rj => {
                        if !self.bind_crossing(da, db, i, j) {
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
        }
        true
    }

    fn search(mut self, da: &TangleDiagram, db: &TangleDiagram, a: &ArcIndex, b: &ArcIndex) -> bool {
        if !self.propagate(da, db, a, b) {
            return false;
        }
        let Some(i) = self.crossings.iter().position(Option::is_none) else {
            return true;
        };
        (0..db.crossings.len()).filter(|j| !self.crossings_back.contains(j)).any(|j| {
            let mut next = self.clone();
            next.bind_crossing(da, db, i, j) && next.search(da, db, a, b)
        })
    }
}

pub fn parse_pd(text: &str) -> Result<TangleDiagram, KnotError> {
    let mut d = TangleDiagram::default();
    let mut bin: Option<Vec<BoundaryPoint>> = None;
    let mut bout: Option<Vec<BoundaryPoint>> = None;
    let mut circles = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some(&(col, keyword)) = toks.first() else {
            continue;
        };
        let err = |column: usize, message: String| KnotError::Parse {
            line,
            column,
            message,
        };
        let arc = |i: usize| -> Result<ArcId, KnotError> {
            let (c, t) = toks[i];
            if t.contains('=') {
                Err(err(c, format!("`=` is only allowed in boundary tokens, got `{t}`")))
            } else {
                Ok(t.to_string())
            }
        };
        match keyword {
            "x" => {
                if toks.len() != 6 {
                    return Err(err(col, "expected `x <+|-> <over_in> <over_out> <under_in> <under_out>`".into()));
                }
                let sign = toks[1].1.parse().map_err(|m| err(toks[1].0, m))?;
                d.crossings.push(Crossing {
                    sign,
                    over_in: arc(2)?,
                    over_out: arc(3)?,
                    under_in: arc(4)?,
                    under_out: arc(5)?,
                });
            }
            "bin" | "bout" => {
                let slot = if keyword == "bin" { &mut bin } else { &mut bout };
                if slot.is_some() {
                    return Err(err(col, format!("`{keyword}` given twice")));
                }
                let mut list = Vec::new();
                for &(c, t) in &toks[1..] {
                    let point = match t.split_once('=') {
                        Some((a, l)) if !a.is_empty() && !l.is_empty() => BoundaryPoint {
                            arc: a.into(),
                            leaf: l.into(),
                        },
                        Some(_) => return Err(err(c, format!("bad boundary token `{t}`"))),
                        None => BoundaryPoint::named(t),
                    };
                    list.push(point);
                }
                *slot = Some(list);
            }
            "circles" => {
                if toks.len() != 2 || circles.is_some() {
                    return Err(err(col, "expected a single `circles <n>`".into()));
                }
                circles = Some(
                    toks[1]
                        .1
                        .parse::<usize>()
                        .map_err(|_| err(toks[1].0, format!("bad count `{}`", toks[1].1)))?,
                );
            }
            other => return Err(err(col, format!("unknown record `{other}`"))),
        }
    }
    d.circles = circles.unwrap_or(0);
    let (inferred_in, inferred_out) = infer_boundary(&d.crossings);
    d.boundary_in = bin.unwrap_or(inferred_in);
    d.boundary_out = bout.unwrap_or(inferred_out);
    d.validate()?;
    Ok(d)
}

/// Arcs consumed but never produced by a crossing enter the diagram; arcs
/// produced but never consumed leave it. Both in order of first appearance.
fn infer_boundary(crossings: &[Crossing]) -> (Vec<BoundaryPoint>, Vec<BoundaryPoint>) {
    let produced: BTreeSet<&str> = crossings
        .iter()
        .flat_map(|c| [c.over_out.as_str(), c.under_out.as_str()])
        .collect();
    let consumed: BTreeSet<&str> = crossings
        .iter()
        .flat_map(|c| [c.over_in.as_str(), c.under_in.as_str()])
        .collect();
    let mut bin = Vec::new();
    let mut bout = Vec::new();
    let mut seen = BTreeSet::new();
    for c in crossings {
        for a in c.arcs() {
            if !seen.insert(a.as_str()) {
                continue;
            }
            if !produced.contains(a.as_str()) {
                bin.push(BoundaryPoint::named(a));
            }
            if !consumed.contains(a.as_str()) {
                bout.push(BoundaryPoint::named(a));
            }
        }
    }
    (bin, bout)
}

pub fn emit_pd(d: &TangleDiagram) -> String {
    let mut out = String::new();
    for c in &d.crossings {
        out.push_str(&format!(
            "x {} {} {} {} {}\n",
            c.sign, c.over_in, c.over_out, c.under_in, c.under_out
        ));
    }
    let join = |list: &[BoundaryPoint]| list.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    if !d.boundary_in.is_empty() {
        out.push_str(&format!("bin {}\n", join(&d.boundary_in)));
    }
    if !d.boundary_out.is_empty() {
        out.push_str(&format!("bout {}\n", join(&d.boundary_out)));
    }
    if d.circles > 0 {
        out.push_str(&format!("circles {}\n", d.circles));
    }
    out
}

impl fmt::Display for TangleDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_pd(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_crossing_infers_its_boundary() {
        let d = parse_pd("x + a b c d\n").unwrap();
        assert_eq!(d.crossings.len(), 1);
        assert_eq!(d.boundary_in, vec![BoundaryPoint::named("a"), BoundaryPoint::named("c")]);
        assert_eq!(d.boundary_out, vec![BoundaryPoint::named("b"), BoundaryPoint::named("d")]);
        assert!(!d.is_link());
    }

    #[test]
    fn closed_diagram_is_a_link() {
        let d = parse_pd("x + a c b d\nx + d e c f\nx + f b e a\n").unwrap();
        assert!(d.is_link());
        assert_eq!(d.crossings.len(), 3);
    }

    #[test]
    fn arc_used_three_times_is_rejected() {
        let err = parse_pd("x + a b a c\nx + c a d e\n").unwrap_err();
        assert!(matches!(err, KnotError::Invalid(m) if m.contains("`a`")));
    }

    #[test]
    fn boundary_must_agree_with_crossings() {
        assert!(parse_pd("x + a b c d\nbin a\nbout b d\n").is_err());
        assert!(parse_pd("x + a b c d\nbin a c\nbout b d\n").is_ok());
    }

    #[test]
    fn free_strand_with_two_leaf_names() {
        let d = parse_pd("bin s=a\nbout s=b\ncircles 2\n").unwrap();
        assert_eq!(d.boundary_in[0].leaf, "a");
        assert_eq!(d.boundary_out[0].leaf, "b");
        assert_eq!(emit_pd(&d), "bin s=a\nbout s=b\ncircles 2\n");
    }

    #[test]
    fn emission_round_trips() {
        let text = "x + a b c d\nx - b e d f\nbin a c\nbout e f\n";
        let d = parse_pd(text).unwrap();
        assert_eq!(emit_pd(&d), text);
        assert_eq!(parse_pd(&emit_pd(&d)).unwrap(), d);
    }

    #[test]
    fn relabeling_equivalence() {
        let a = parse_pd("x + a p c q\nx + p b q d\nbin a c\nbout b d\n").unwrap();
        let b = parse_pd("x + a u c v\nx + u b v d\nbin c a\nbout d b\n").unwrap();
        let c = parse_pd("x + a u c v\nx + v b u d\nbin a c\nbout b d\n").unwrap();
        assert!(a.equal_up_to_relabeling(&b));
        assert!(!a.equal_up_to_relabeling(&c));
    }

    #[test]
    fn relabeling_ignores_crossing_order() {
        let a = parse_pd("x + a c b d
x + d e c f
x + f b e a
").unwrap();
        let b = parse_pd("x + w y v z
x + q v x w
x + z x y q
").unwrap();
        assert!(a.equal_up_to_relabeling(&b));
        let mirror = parse_pd("x - a c b d
x - d e c f
x - f b e a
").unwrap();
        assert!(!a.equal_up_to_relabeling(&mirror));
        // Same signs, different wiring: two Hopf-like crossings plus a kink.
        let other = parse_pd("x + a b c d
x + b a d e
x + e f f c
").unwrap();
        other.validate().unwrap();
        assert!(!a.equal_up_to_relabeling(&other));
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_pd("x * a b c d\n").unwrap_err(),
            KnotError::Parse {
                line: 1,
                column: 3,
                message: "crossing sign must be + or -, got `*`".into()
            }
        );
    }
}
