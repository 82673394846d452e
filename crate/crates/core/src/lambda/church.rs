//! Standard combinators and Church arithmetic.

use super::LambdaTerm;

fn v(name: &str) -> LambdaTerm {
    LambdaTerm::var(name)
}

fn lam(names: &[&str], body: LambdaTerm) -> LambdaTerm {
    names.iter().rev().fold(body, |b, x| LambdaTerm::abs(x, b))
}

/// `λx.x`
pub fn identity() -> LambdaTerm {
    lam(&["x"], v("x"))
}

/// `λx.λy.x`
pub fn k_combinator() -> LambdaTerm {
    lam(&["x", "y"], v("x"))
}

/// `λx.λy.λz.x z (y z)`
pub fn s_combinator() -> LambdaTerm {
    lam(
        &["x", "y", "z"],
        LambdaTerm::apply(v("x"), [v("z"), LambdaTerm::app(v("y"), v("z"))]),
    )
}

/// `(λx.x x)(λx.x x)`
pub fn omega() -> LambdaTerm {
    let half = lam(&["x"], LambdaTerm::app(v("x"), v("x")));
    LambdaTerm::app(half.clone(), half)
}

/// Church numeral `λf.λx.fⁿ x`.
pub fn church(n: usize) -> LambdaTerm {
    let body = (0..n).fold(v("x"), |acc, _| LambdaTerm::app(v("f"), acc));
    lam(&["f", "x"], body)
}

/// `λn.λf.λx.f (n f x)`
pub fn succ() -> LambdaTerm {
    lam(
        &["n", "f", "x"],
        LambdaTerm::app(v("f"), LambdaTerm::apply(v("n"), [v("f"), v("x")])),
    )
}

/// `λm.λn.λf.λx.m f (n f x)`
pub fn plus() -> LambdaTerm {
    lam(
        &["m", "n", "f", "x"],
        LambdaTerm::apply(v("m"), [v("f"), LambdaTerm::apply(v("n"), [v("f"), v("x")])]),
    )
}

/// `λm.λn.λf.m (n f)`
pub fn times() -> LambdaTerm {
    lam(
        &["m", "n", "f"],
        LambdaTerm::app(v("m"), LambdaTerm::app(v("n"), v("f"))),
    )
}

/// Named closed terms: I, K, S, S K K, numerals 0–3, and successor, plus
/// and times applied to numerals up to 3.
pub fn corpus() -> Vec<(String, LambdaTerm)> {
    let mut out = vec![
        ("I".to_string(), identity()),
        ("K".to_string(), k_combinator()),
        ("S".to_string(), s_combinator()),
        (
            "S K K".to_string(),
            LambdaTerm::apply(s_combinator(), [k_combinator(), k_combinator()]),
        ),
    ];
    for n in 0..=3 {
        out.push((format!("{n}"), church(n)));
    }
    for n in 0..=3 {
        out.push((format!("succ {n}"), LambdaTerm::app(succ(), church(n))));
    }
    for m in 0..=3 {
        for n in 0..=3 {
            out.push((format!("plus {m} {n}"), LambdaTerm::apply(plus(), [church(m), church(n)])));
            out.push((format!("times {m} {n}"), LambdaTerm::apply(times(), [church(m), church(n)])));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{alpha_eq, parse_term, reference_eval, ReduceStatus};

    #[test]
    fn numerals_print_as_expected() {
        assert_eq!(church(2).to_string(), "\\f.\\x.f (f x)");
        assert_eq!(church(0).to_string(), "\\f.\\x.x");
    }

    #[test]
    fn arithmetic_by_the_oracle() {
        let (five, st) = reference_eval(&LambdaTerm::apply(plus(), [church(2), church(3)]), 1000);
        assert_eq!(st, ReduceStatus::Normal);
        assert!(alpha_eq(&five, &church(5)));
        let (six, _) = reference_eval(&LambdaTerm::apply(times(), [church(2), church(3)]), 1000);
        assert!(alpha_eq(&six, &church(6)));
        let (skk, _) = reference_eval(&parse_term(&format!("({}) ({}) ({})", s_combinator(), k_combinator(), k_combinator())).unwrap(), 100);
        assert!(alpha_eq(&skk, &identity()));
    }

    #[test]
    fn corpus_is_closed_and_normalizing() {
        let c = corpus();
        assert_eq!(c.len(), 4 + 4 + 4 + 32);
        for (name, t) in c {
            assert!(t.is_closed(), "{name}");
            assert_eq!(reference_eval(&t, 10_000).1, ReduceStatus::Normal, "{name}");
        }
    }
}
