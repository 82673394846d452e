//! Diagrams of braids and their (partial) closures.
//!
//! Strand positions are numbered `1..=n` from the left, and strands run
//! upward. The letter `σi` with sign `+` crosses the strand at position `i`
//! over the one at `i + 1`; with sign `-` the strand at `i + 1` goes over.
//! Bottom boundary arcs (and leaves) are `b1..bn`, top leaves `t1..tn`.

use std::collections::BTreeSet;

use super::{BoundaryPoint, Crossing, Sign, TangleDiagram};

/// One braid generator `σi^±`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BraidLetter {
    pub position: usize,
    pub sign: Sign,
}

impl BraidLetter {
    pub fn new(position: usize, sign: Sign) -> Self {
        BraidLetter { position, sign }
    }
}

/// The diagram of a braid on `strands` strands, with the positions in
/// `closed` joined from top back to bottom. A closed position no crossing
/// touches becomes a crossing-free circle.
///
/// # Panics
///
/// If a letter's position is outside `1..strands`.
pub fn braid_tangle(strands: usize, word: &[BraidLetter], closed: &BTreeSet<usize>) -> TangleDiagram {
    let mut current: Vec<String> = (1..=strands).map(|p| format!("b{p}")).collect();
    let mut crossings = Vec::new();
    let mut fresh = 0;
    let mut arc = || {
        fresh += 1;
        format!("k{fresh}")
    };
    for letter in word {
        let i = letter.position;
        assert!(i >= 1 && i < strands, "σ{i} needs positions {i} and {} of {strands}", i + 1);
        let (left, right) = (current[i - 1].clone(), current[i].clone());
        let (to_right, to_left) = (arc(), arc());
        let c = match letter.sign {
            Sign::Positive => Crossing {
                sign: Sign::Positive,
                over_in: left,
                over_out: to_right.clone(),
                under_in: right,
                under_out: to_left.clone(),
            },
            Sign::Negative => Crossing {
                sign: Sign::Negative,
                over_in: right,
                over_out: to_left.clone(),
                under_in: left,
                under_out: to_right.clone(),
            },
        };
        crossings.push(c);
        current[i - 1] = to_left;
        current[i] = to_right;
    }
    let mut d = TangleDiagram {
        crossings,
        ..TangleDiagram::default()
    };
    for p in 1..=strands {
        let bottom = format!("b{p}");
        let top = current[p - 1].clone();
        if !closed.contains(&p) {
            d.boundary_in.push(BoundaryPoint::named(&bottom));
            d.boundary_out.push(BoundaryPoint {
                arc: top,
                leaf: format!("t{p}"),
            });
        } else if top == bottom {
            d.circles += 1;
        } else {
            for c in &mut d.crossings {
                for a in [&mut c.over_out, &mut c.under_out] {
                    if *a == top {
                        *a = bottom.clone();
                    }
                }
            }
        }
    }
    d
}

/// The closure of a braid: a link diagram.
pub fn braid_closure(strands: usize, word: &[BraidLetter]) -> TangleDiagram {
    braid_tangle(strands, word, &(1..=strands).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::{encode_diagram, fixtures, parse_pd};

    fn word(letters: &[(usize, char)]) -> Vec<BraidLetter> {
        letters
            .iter()
            .map(|&(p, s)| BraidLetter::new(p, if s == '+' { Sign::Positive } else { Sign::Negative }))
            .collect()
    }

    #[test]
    fn single_letter() {
        let d = braid_tangle(2, &word(&[(1, '+')]), &BTreeSet::new());
        let expect = parse_pd("x + b1 k1 b2 k2\nbin b1 b2\nbout k2=t1 k1=t2\n").unwrap();
        assert_eq!(d, expect);
        let d = braid_tangle(2, &word(&[(1, '-')]), &BTreeSet::new());
        let expect = parse_pd("x - b2 k2 b1 k1\nbin b1 b2\nbout k2=t1 k1=t2\n").unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn closures_match_the_fixtures() {
        let trefoil = braid_closure(2, &word(&[(1, '+'), (1, '+'), (1, '+')]));
        assert!(trefoil.equal_up_to_relabeling(&fixtures::trefoil()), "{trefoil}");
        let hopf = braid_closure(2, &word(&[(1, '+'), (1, '+')]));
        assert!(hopf.equal_up_to_relabeling(&fixtures::hopf()), "{hopf}");
        let fig8 = braid_closure(3, &word(&[(1, '+'), (2, '-'), (1, '+'), (2, '-')]));
        assert!(fig8.equal_up_to_relabeling(&fixtures::figure_eight()), "{fig8}");
    }

    #[test]
    fn untouched_closed_strand_is_a_circle() {
        let d = braid_tangle(3, &word(&[(1, '+')]), &BTreeSet::from([3]));
        assert_eq!(d.circles, 1);
        assert_eq!(d.boundary_in.len(), 2);
        d.validate().unwrap();
        encode_diagram(&d).unwrap();
    }
}
