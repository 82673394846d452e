//! Untyped λ-terms, their text syntax, α-equivalence and a substitution-based
//! normal-order evaluator used as the reference for graph reduction.

use std::collections::BTreeSet;
use std::fmt;

use super::LambdaError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LambdaTerm {
    Var(String),
    Abs(String, Box<LambdaTerm>),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
}

impl LambdaTerm {
    pub fn var(name: &str) -> Self {
        LambdaTerm::Var(name.to_string())
    }

    pub fn abs(name: &str, body: LambdaTerm) -> Self {
        LambdaTerm::Abs(name.to_string(), Box::new(body))
    }

    pub fn app(fun: LambdaTerm, arg: LambdaTerm) -> Self {
        LambdaTerm::App(Box::new(fun), Box::new(arg))
    }

    /// Left-associated application of `fun` to each argument in turn.
    pub fn apply(fun: LambdaTerm, args: impl IntoIterator<Item = LambdaTerm>) -> Self {
        args.into_iter().fold(fun, LambdaTerm::app)
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::Abs(_, b) => 1 + b.size(),
            LambdaTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::Abs(_, b) => 1 + b.depth(),
            LambdaTerm::App(f, a) => 1 + f.depth().max(a.depth()),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Whether `name` occurs free.
    pub fn occurs_free(&self, name: &str) -> bool {
        match self {
            LambdaTerm::Var(x) => x == name,
            LambdaTerm::Abs(x, b) => x != name && b.occurs_free(name),
            LambdaTerm::App(f, a) => f.occurs_free(name) || a.occurs_free(name),
        }
    }
}

fn collect_free<'a>(t: &'a LambdaTerm, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    match t {
        LambdaTerm::Var(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        LambdaTerm::Abs(x, b) => {
            bound.push(x);
            collect_free(b, bound, out);
            bound.pop();
        }
        LambdaTerm::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaTerm::Var(x) => f.write_str(x),
            LambdaTerm::Abs(x, b) => write!(f, "\\{x}.{b}"),
            LambdaTerm::App(fun, arg) => {
                match **fun {
                    LambdaTerm::Abs(..) => write!(f, "({fun})")?,
                    _ => write!(f, "{fun}")?,
                }
                match **arg {
                    LambdaTerm::Var(_) => write!(f, " {arg}"),
                    _ => write!(f, " ({arg})"),
                }
            }
        }
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    /// 1-based character column of the current position.
    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, message: impl Into<String>) -> LambdaError {
        LambdaError::Parse {
            column: self.column(),
            message: message.into(),
        }
    }

    fn ident(&mut self) -> Result<String, LambdaError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|(_, c)| c.is_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an identifier"));
        }
        let from = self.chars[start].0;
        let to = self.chars.get(self.pos).map_or(self.text.len(), |(i, _)| *i);
        Ok(self.text[from..to].to_string())
    }

    fn term(&mut self) -> Result<LambdaTerm, LambdaError> {
        match self.peek() {
            Some('\\' | 'λ') => {
                self.pos += 1;
                let x = self.ident()?;
                if self.peek() != Some('.') {
                    return Err(self.error("expected `.` after the bound variable"));
                }
                self.pos += 1;
                Ok(LambdaTerm::Abs(x, Box::new(self.term()?)))
            }
            _ => self.app_term(),
        }
    }

    fn app_term(&mut self) -> Result<LambdaTerm, LambdaError> {
        let mut acc = self.atom()?;
        loop {
            match self.peek() {
                Some('(') => acc = LambdaTerm::app(acc, self.atom()?),
                Some(c) if c.is_alphanumeric() || c == '_' => acc = LambdaTerm::app(acc, self.atom()?),
                // An abstraction may close an application spine: `f \x.x`.
                Some('\\' | 'λ') => return Ok(LambdaTerm::app(acc, self.term()?)),
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<LambdaTerm, LambdaError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(t)
            }
            Some(c) if c.is_alphanumeric() || c == '_' => Ok(LambdaTerm::Var(self.ident()?)),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses `\x.body` (or `λx.body`), left-associative application and
/// parentheses. Errors report a 1-based character column.
pub fn parse_term(text: &str) -> Result<LambdaTerm, LambdaError> {
    let mut p = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        text,
    };
    let t = p.term()?;
    if let Some(c) = p.peek() {
        return Err(p.error(format!("unexpected `{c}` after the term")));
    }
    Ok(t)
}

impl std::str::FromStr for LambdaTerm {
    type Err = LambdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

#[derive(PartialEq, Eq)]
enum DeBruijn<'a> {
    Free(&'a str),
    Bound(usize),
    Abs(Box<DeBruijn<'a>>),
    App(Box<DeBruijn<'a>>, Box<DeBruijn<'a>>),
}

fn de_bruijn<'a>(t: &'a LambdaTerm, env: &mut Vec<&'a str>) -> DeBruijn<'a> {
    match t {
        LambdaTerm::Var(x) => match env.iter().rev().position(|b| b == x) {
            Some(i) => DeBruijn::Bound(i),
            None => DeBruijn::Free(x),
        },
        LambdaTerm::Abs(x, b) => {
            env.push(x);
            let body = de_bruijn(b, env);
            env.pop();
            DeBruijn::Abs(Box::new(body))
        }
        LambdaTerm::App(f, a) => DeBruijn::App(Box::new(de_bruijn(f, env)), Box::new(de_bruijn(a, env))),
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(t1: &LambdaTerm, t2: &LambdaTerm) -> bool {
    de_bruijn(t1, &mut Vec::new()) == de_bruijn(t2, &mut Vec::new())
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (0..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply of names")
}

/// Capture-avoiding substitution `t[x := s]`.
pub fn substitute(t: &LambdaTerm, x: &str, s: &LambdaTerm) -> LambdaTerm {
    let fv = s.free_vars();
    subst(t, x, s, &fv)
}

fn subst(t: &LambdaTerm, x: &str, s: &LambdaTerm, fv_s: &BTreeSet<String>) -> LambdaTerm {
    match t {
        LambdaTerm::Var(y) if y == x => s.clone(),
        LambdaTerm::Var(_) => t.clone(),
        LambdaTerm::App(f, a) => LambdaTerm::app(subst(f, x, s, fv_s), subst(a, x, s, fv_s)),
        LambdaTerm::Abs(y, _) if y == x => t.clone(),
        LambdaTerm::Abs(y, b) => {
            if !b.occurs_free(x) {
                return t.clone();
            }
            if fv_s.contains(y) {
                let mut avoid = fv_s.clone();
                avoid.extend(b.free_vars());
                avoid.insert(x.to_string());
                let z = fresh_name(y, &avoid);
                let renamed = subst(b, y, &LambdaTerm::Var(z.clone()), &BTreeSet::from([z.clone()]));
                LambdaTerm::Abs(z, Box::new(subst(&renamed, x, s, fv_s)))
            } else {
                LambdaTerm::Abs(y.clone(), Box::new(subst(b, x, s, fv_s)))
            }
        }
    }
}

/// One leftmost-outermost β step, if any redex exists.
pub fn normal_order_step(t: &LambdaTerm) -> Option<LambdaTerm> {
    match t {
        LambdaTerm::Var(_) => None,
        LambdaTerm::Abs(x, b) => normal_order_step(b).map(|b| LambdaTerm::Abs(x.clone(), Box::new(b))),
        LambdaTerm::App(f, a) => {
            if let LambdaTerm::Abs(x, body) = &**f {
                return Some(substitute(body, x, a));
            }
            if let Some(f2) = normal_order_step(f) {
                return Some(LambdaTerm::App(Box::new(f2), a.clone()));
            }
            normal_order_step(a).map(|a2| LambdaTerm::App(f.clone(), Box::new(a2)))
        }
    }
}

/// Outcome of a fuel-bounded reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReduceStatus {
    Normal,
    FuelExhausted,
}

impl fmt::Display for ReduceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReduceStatus::Normal => "NORMAL",
            ReduceStatus::FuelExhausted => "FUEL_EXHAUSTED",
        })
    }
}

/// Normal-order evaluation with at most `fuel` β steps.
pub fn reference_eval(t: &LambdaTerm, fuel: u64) -> (LambdaTerm, ReduceStatus) {
    let (t, status, _) = reference_eval_counted(t, fuel, usize::MAX);
    (t, status)
}

/// Like [`reference_eval`], also returning the number of steps taken. Gives
/// up (as exhausted) once an intermediate term exceeds `max_size`.
pub fn reference_eval_counted(t: &LambdaTerm, fuel: u64, max_size: usize) -> (LambdaTerm, ReduceStatus, u64) {
    let mut cur = t.clone();
    let mut steps = 0;
    loop {
        match normal_order_step(&cur) {
            None => return (cur, ReduceStatus::Normal, steps),
            Some(_) if steps == fuel => return (cur, ReduceStatus::FuelExhausted, steps),
            Some(next) => {
                steps += 1;
                if next.size() > max_size {
                    return (next, ReduceStatus::FuelExhausted, steps);
                }
                cur = next;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LambdaTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn parses_the_examples() {
        assert_eq!(p("\\x.x"), LambdaTerm::abs("x", LambdaTerm::var("x")));
        let half = LambdaTerm::abs("x", LambdaTerm::app(LambdaTerm::var("x"), LambdaTerm::var("x")));
        assert_eq!(p("(\\x.x x)(\\x.x x)"), LambdaTerm::app(half.clone(), half));
        let two = LambdaTerm::abs(
            "f",
            LambdaTerm::abs(
                "x",
                LambdaTerm::app(
                    LambdaTerm::var("f"),
                    LambdaTerm::app(LambdaTerm::var("f"), LambdaTerm::var("x")),
                ),
            ),
        );
        assert_eq!(p("\\f.\\x.f (f x)"), two);
        assert_eq!(p("λf.λx.f (f x)"), two);
    }

    #[test]
    fn application_is_left_associative() {
        assert_eq!(
            p("a b c"),
            LambdaTerm::app(LambdaTerm::app(LambdaTerm::var("a"), LambdaTerm::var("b")), LambdaTerm::var("c"))
        );
    }

    #[test]
    fn syntax_errors_have_columns() {
        assert_eq!(
            parse_term("\\x x").unwrap_err(),
            LambdaError::Parse {
                column: 4,
                message: "expected `.` after the bound variable".into()
            }
        );
        assert!(matches!(parse_term("(a b"), Err(LambdaError::Parse { column: 5, .. })));
        assert!(matches!(parse_term("a )"), Err(LambdaError::Parse { column: 3, .. })));
        assert!(parse_term("").is_err());
    }

    #[test]
    fn display_reparses() {
        for s in ["\\x.x", "(\\x.x x) (\\x.x x)", "\\f.\\x.f (f x)", "a (b c) d", "f (\\x.x)"] {
            let t = p(s);
            assert_eq!(p(&t.to_string()), t, "{s}");
        }
    }

    #[test]
    fn alpha_equivalence_examples() {
        assert!(alpha_eq(&p("\\x.x"), &p("\\y.y")));
        assert!(!alpha_eq(&p("\\x.\\y.x"), &p("\\x.\\y.y")));
        assert!(!alpha_eq(&p("x"), &p("y")));
        assert!(alpha_eq(&p("\\x.\\x.x"), &p("\\a.\\b.b")));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (\y.x)[x := y] must not capture.
        let r = substitute(&p("\\y.x"), "x", &p("y"));
        assert!(alpha_eq(&r, &p("\\z.y")));
    }

    #[test]
    fn reference_evaluator_examples() {
        assert_eq!(reference_eval(&p("(\\x.x) y"), 10), (p("y"), ReduceStatus::Normal));
        let (_, st) = reference_eval(&p("(\\x.x x)(\\x.x x)"), 50);
        assert_eq!(st, ReduceStatus::FuelExhausted);
        // K I Ω needs normal order.
        let (t, st) = reference_eval(&p("(\\a.\\b.a) (\\x.x) ((\\x.x x)(\\x.x x))"), 10);
        assert_eq!(st, ReduceStatus::Normal);
        assert!(alpha_eq(&t, &p("\\x.x")));
    }
}
