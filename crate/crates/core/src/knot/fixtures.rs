//! Diagrams shipped with the crate (the `.pd` files under `fixtures/`).

use super::{parse_pd, Chirality, TangleDiagram};

pub const TREFOIL_PD: &str = include_str!("../../fixtures/trefoil.pd");
pub const FIGURE_EIGHT_PD: &str = include_str!("../../fixtures/figure_eight.pd");
pub const HOPF_PD: &str = include_str!("../../fixtures/hopf.pd");
pub const KINK_A_PD: &str = include_str!("../../fixtures/kink_a.pd");
pub const KINK_B_PD: &str = include_str!("../../fixtures/kink_b.pd");
pub const R2A_LHS_PD: &str = include_str!("../../fixtures/r2a_lhs.pd");
pub const R2A_RHS_PD: &str = include_str!("../../fixtures/r2a_rhs.pd");
pub const R3A_LHS_PD: &str = include_str!("../../fixtures/r3a_lhs.pd");
pub const R3A_RHS_PD: &str = include_str!("../../fixtures/r3a_rhs.pd");
/// The six β moves turning the encoded R3a left side into the right side.
pub const R3A_MOVES: &str = include_str!("../../fixtures/r3a.moves");

fn load(text: &str) -> TangleDiagram {
    parse_pd(text).expect("bundled fixture parses")
}

pub fn trefoil() -> TangleDiagram {
    load(TREFOIL_PD)
}

pub fn figure_eight() -> TangleDiagram {
    load(FIGURE_EIGHT_PD)
}

pub fn hopf() -> TangleDiagram {
    load(HOPF_PD)
}

/// A single strand `a → b` with one kink of the given chirality.
pub fn kink(chirality: Chirality) -> TangleDiagram {
    match chirality {
        Chirality::A => load(KINK_A_PD),
        Chirality::B => load(KINK_B_PD),
    }
}

pub fn r2a_lhs() -> TangleDiagram {
    load(R2A_LHS_PD)
}

pub fn r2a_rhs() -> TangleDiagram {
    load(R2A_RHS_PD)
}

pub fn r3a_lhs() -> TangleDiagram {
    load(R3A_LHS_PD)
}

pub fn r3a_rhs() -> TangleDiagram {
    load(R3A_RHS_PD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_isomorphic;
    use crate::knot::encode_diagram;
    use crate::moves::{apply_script, MoveScript};

    #[test]
    fn all_fixtures_parse_and_encode() {
        for d in [trefoil(), figure_eight(), hopf(), kink(Chirality::A), kink(Chirality::B), r2a_lhs(), r2a_rhs(), r3a_lhs(), r3a_rhs()] {
            encode_diagram(&d).unwrap();
        }
        assert!(trefoil().is_link() && figure_eight().is_link() && hopf().is_link());
    }

    #[test]
    fn r3a_script_turns_left_into_right() {
        let (lhs, _) = encode_diagram(&r3a_lhs()).unwrap();
        let (rhs, _) = encode_diagram(&r3a_rhs()).unwrap();
        let (out, trace) = apply_script(&lhs, &MoveScript::parse(R3A_MOVES).unwrap()).unwrap();
        assert_eq!(trace.beta_count(), 6);
        assert!(is_isomorphic(&out, &rhs).is_some());
    }
}
