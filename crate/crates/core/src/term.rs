//! Terms over a pointed signature, their parsing, evaluation and innermost
//! rewriting.

use std::fmt;

use crate::algebra::{Elem, FiniteAlgebra, Signature};
use crate::error::{Error, Result};

/// A term over a signature. Variables are numbered; callers keep the names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Zero,
    Var(usize),
    App(usize, Vec<Term>),
}

impl Term {
    pub fn app(op: usize, args: Vec<Term>) -> Self {
        Term::App(op, args)
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Zero | Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Zero | Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// One more than the largest variable index, or 0 for closed terms.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Zero => 0,
            Term::Var(v) => v + 1,
            Term::App(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    pub fn contains_var(&self, pred: &impl Fn(usize) -> bool) -> bool {
        match self {
            Term::Zero => false,
            Term::Var(v) => pred(*v),
            Term::App(_, args) => args.iter().any(|a| a.contains_var(pred)),
        }
    }

    pub fn eval(&self, algebra: &FiniteAlgebra, assignment: &[Elem]) -> Elem {
        match self {
            Term::Zero => 0,
            Term::Var(v) => assignment[*v],
            Term::App(op, args) => {
                let vals: Vec<Elem> = args.iter().map(|a| a.eval(algebra, assignment)).collect();
                algebra.apply(*op, &vals)
            }
        }
    }

    /// Replaces every variable `v` by `subst(v)`.
    pub fn substitute(&self, subst: &impl Fn(usize) -> Term) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::Var(v) => subst(*v),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| a.substitute(subst)).collect()),
        }
    }

    /// The table of the term function on `algebra^arity`, in lexicographic
    /// argument order.
    pub fn table(&self, algebra: &FiniteAlgebra, arity: usize) -> Vec<Elem> {
        let mut out = Vec::new();
        let mut args = vec![0; arity];
        let _ = crate::algebra::for_each_tuple(&vec![algebra.size(); arity], |t| {
            args.copy_from_slice(t);
            out.push(self.eval(algebra, &args));
            std::ops::ControlFlow::Continue(())
        });
        out
    }

    /// Prefix form that [`parse_term`] reads back, e.g. `+(x,-(y))`.
    pub fn to_prefix(&self, sig: &Signature, vars: &[String]) -> String {
        match self {
            Term::Zero => "0".into(),
            Term::Var(v) => var_name(vars, *v),
            Term::App(op, args) => {
                let parts: Vec<String> = args.iter().map(|a| a.to_prefix(sig, vars)).collect();
                format!("{}({})", sig.name(*op), parts.join(","))
            }
        }
    }

    /// Human-readable form: symbolic binary operations are written infix.
    pub fn display<'a>(&'a self, sig: &'a Signature, vars: &'a [String]) -> TermDisplay<'a> {
        TermDisplay { term: self, sig, vars }
    }
}

fn var_name(vars: &[String], v: usize) -> String {
    vars.get(v).cloned().unwrap_or_else(|| format!("v{}", v + 1))
}

fn is_symbolic(name: &str) -> bool {
    !name.chars().any(|c| c.is_alphanumeric() || c == '_')
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
    vars: &'a [String],
}

impl TermDisplay<'_> {
    fn write(&self, t: &Term, nested: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match t {
            Term::Zero => write!(f, "0"),
            Term::Var(v) => write!(f, "{}", var_name(self.vars, *v)),
            Term::App(op, args) => {
                let name = self.sig.name(*op);
                if is_symbolic(name) && args.len() == 2 {
                    if nested {
                        write!(f, "(")?;
                    }
                    self.write(&args[0], true, f)?;
                    write!(f, "{name}")?;
                    self.write(&args[1], true, f)?;
                    if nested {
                        write!(f, ")")?;
                    }
                    Ok(())
                } else if is_symbolic(name) && args.len() == 1 {
                    write!(f, "{name}")?;
                    self.write(&args[0], true, f)
                } else {
                    write!(f, "{name}(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        self.write(a, false, f)?;
                    }
                    write!(f, ")")
                }
            }
        }
    }
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.term, false, f)
    }
}

/// A term together with its table on a particular algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermFunction {
    pub arity: usize,
    pub table: Vec<Elem>,
    pub term: Term,
}

impl TermFunction {
    pub fn new(term: Term, algebra: &FiniteAlgebra, arity: usize) -> Result<Self> {
        if term.var_bound() > arity {
            return Err(Error::InvalidTerm(format!(
                "term uses {} variables but arity is {arity}",
                term.var_bound()
            )));
        }
        Ok(Self {
            table: term.table(algebra, arity),
            arity,
            term,
        })
    }

    /// Whether `table` is the pointwise evaluation of `term`.
    pub fn is_consistent(&self, algebra: &FiniteAlgebra) -> bool {
        self.term.var_bound() <= self.arity && self.term.table(algebra, self.arity) == self.table
    }
}

/// A term before its symbols are resolved against a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTerm {
    Zero,
    Var(String),
    App(String, Vec<RawTerm>),
}

impl RawTerm {
    fn collect_ops(&self, out: &mut Vec<(String, usize)>) -> Result<()> {
        if let RawTerm::App(name, args) = self {
            match out.iter().find(|(n, _)| n == name) {
                Some((_, k)) if *k != args.len() => {
                    return Err(Error::InvalidTerm(format!(
                        "`{name}` used with arities {k} and {}",
                        args.len()
                    )))
                }
                Some(_) => {}
                None => out.push((name.clone(), args.len())),
            }
            for a in args {
                a.collect_ops(out)?;
            }
        }
        Ok(())
    }

    /// Resolves operation names and numbers variables in first-occurrence
    /// order, extending `vars`.
    pub fn resolve(&self, sig: &Signature, vars: &mut Vec<String>) -> Result<Term> {
        Ok(match self {
            RawTerm::Zero => Term::Zero,
            RawTerm::Var(name) => match vars.iter().position(|v| v == name) {
                Some(i) => Term::Var(i),
                None => {
                    vars.push(name.clone());
                    Term::Var(vars.len() - 1)
                }
            },
            RawTerm::App(name, args) => {
                let op = sig
                    .index_of(name)
                    .ok_or_else(|| Error::InvalidTerm(format!("unknown operation `{name}`")))?;
                if sig.arity(op) != args.len() {
                    return Err(Error::InvalidTerm(format!(
                        "`{name}` takes {} arguments, got {}",
                        sig.arity(op),
                        args.len()
                    )));
                }
                let args = args.iter().map(|a| a.resolve(sig, vars)).collect::<Result<Vec<_>>>()?;
                Term::App(op, args)
            }
        })
    }
}

/// Operation symbols used by `terms`, in first-occurrence order.
pub fn infer_ops<'a>(terms: impl IntoIterator<Item = &'a RawTerm>) -> Result<Vec<(String, usize)>> {
    let mut out = Vec::new();
    for t in terms {
        t.collect_ops(&mut out)?;
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() || "(),;".contains(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(Error::InvalidTerm(format!(
                "expected a symbol at offset {start} in `{}`",
                self.src
            )));
        }
        Ok(&self.src[start..self.pos])
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::InvalidTerm(format!(
                "expected `{ch}` at offset {} in `{}`",
                self.pos, self.src
            )))
        }
    }

    fn term(&mut self) -> Result<RawTerm> {
        let name = self.ident()?;
        if self.peek() == Some('(') {
            self.pos += 1;
            let mut args = Vec::new();
            if self.peek() == Some(')') {
                return Err(Error::InvalidTerm(format!("`{name}()` has no arguments")));
            }
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    _ => break,
                }
            }
            self.expect(')')?;
            Ok(RawTerm::App(name.to_string(), args))
        } else if name == "0" {
            Ok(RawTerm::Zero)
        } else {
            Ok(RawTerm::Var(name.to_string()))
        }
    }
}

/// Parses a prefix term such as `s(x, s(0, y))`. A bare `0` is the constant;
/// any other bare symbol is a variable.
pub fn parse_term(src: &str) -> Result<RawTerm> {
    let mut p = Parser { src, pos: 0 };
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(Error::InvalidTerm(format!(
            "trailing input at offset {} in `{src}`",
            p.pos
        )));
    }
    Ok(t)
}

/// Parses `lhs -> rhs`.
pub fn parse_rule(src: &str) -> Result<(RawTerm, RawTerm)> {
    let (l, r) = src
        .split_once("->")
        .ok_or_else(|| Error::InvalidTerm(format!("rule `{src}` has no `->`")))?;
    Ok((parse_term(l)?, parse_term(r)?))
}

/// An oriented identity `lhs -> rhs` with shared variable numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    pub vars: Vec<String>,
}

impl Rule {
    pub fn resolve(raw: &(RawTerm, RawTerm), sig: &Signature) -> Result<Self> {
        let mut vars = Vec::new();
        let lhs = raw.0.resolve(sig, &mut vars)?;
        let bound = vars.len();
        let rhs = raw.1.resolve(sig, &mut vars)?;
        if vars.len() > bound {
            return Err(Error::InvalidVariety(format!(
                "variable `{}` occurs on the right of a rule but not on the left",
                vars[bound]
            )));
        }
        if matches!(lhs, Term::Var(_)) {
            return Err(Error::InvalidVariety("a rule may not rewrite a bare variable".into()));
        }
        Ok(Self { lhs, rhs, vars })
    }

    pub fn to_prefix(&self, sig: &Signature) -> String {
        format!(
            "{} -> {}",
            self.lhs.to_prefix(sig, &self.vars),
            self.rhs.to_prefix(sig, &self.vars)
        )
    }
}

fn match_pattern(pattern: &Term, term: &Term, subst: &mut Vec<Option<Term>>) -> bool {
    match (pattern, term) {
        (Term::Zero, Term::Zero) => true,
        (Term::Var(v), _) => {
            if *v >= subst.len() {
                subst.resize(v + 1, None);
            }
            match &subst[*v] {
                Some(bound) => bound == term,
                None => {
                    subst[*v] = Some(term.clone());
                    true
                }
            }
        }
        (Term::App(p, pargs), Term::App(t, targs)) => {
            p == t && pargs.iter().zip(targs).all(|(pa, ta)| match_pattern(pa, ta, subst))
        }
        _ => false,
    }
}

/// Rewrites innermost-first with `rules` in order. Returns `None` once more
/// than `budget` rewrite steps would be needed.
pub fn normalize(term: &Term, rules: &[Rule], budget: &mut usize) -> Option<Term> {
    match term {
        Term::Zero | Term::Var(_) => Some(term.clone()),
        Term::App(op, args) => {
            let args = args
                .iter()
                .map(|a| normalize(a, rules, budget))
                .collect::<Option<Vec<_>>>()?;
            rewrite_root(Term::App(*op, args), rules, budget)
        }
    }
}

/// Normalizes a term whose proper subterms are already in normal form.
pub fn rewrite_root(term: Term, rules: &[Rule], budget: &mut usize) -> Option<Term> {
    for rule in rules {
        let mut subst = Vec::new();
        if match_pattern(&rule.lhs, &term, &mut subst) {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let next = rule
                .rhs
                .substitute(&|v| subst[v].clone().expect("rule variables are bound by the left side"));
            return normalize(&next, rules, budget);
        }
    }
    Some(term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parse_and_print_roundtrip() {
        let sig = fixtures::group_signature();
        let raw = parse_term("+(+(x, y), -(z))").unwrap();
        let mut vars = Vec::new();
        let t = raw.resolve(&sig, &mut vars).unwrap();
        assert_eq!(vars, ["x", "y", "z"]);
        assert_eq!(t.to_prefix(&sig, &vars), "+(+(x,y),-(z))");
        assert_eq!(t.display(&sig, &vars).to_string(), "(x+y)+-z");
        assert_eq!(parse_term(&t.to_prefix(&sig, &vars)).unwrap(), raw);
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn zero_is_a_constant() {
        assert_eq!(parse_term("0").unwrap(), RawTerm::Zero);
        assert_eq!(
            parse_term("s(0,x)").unwrap(),
            RawTerm::App("s".into(), vec![RawTerm::Zero, RawTerm::Var("x".into())])
        );
    }

    #[test]
    fn parse_errors() {
        assert!(parse_term("s(x").is_err());
        assert!(parse_term("s(x) y").is_err());
        assert!(parse_term("s()").is_err());
        let sig = fixtures::binary_signature();
        assert!(parse_term("s(x)").unwrap().resolve(&sig, &mut Vec::new()).is_err());
        assert!(parse_term("t(x,y)").unwrap().resolve(&sig, &mut Vec::new()).is_err());
    }

    #[test]
    fn eval_on_example() {
        let a = fixtures::three_element_example();
        let mut vars = Vec::new();
        let t = parse_term("s(x,y)").unwrap().resolve(a.signature(), &mut vars).unwrap();
        assert_eq!(t.eval(&a, &[2, 1]), 2);
        assert_eq!(t.table(&a, 2), a.table(0));
    }

    #[test]
    fn rule_validation() {
        let sig = fixtures::binary_signature();
        assert!(Rule::resolve(&parse_rule("s(x,0) -> y").unwrap(), &sig).is_err());
        assert!(Rule::resolve(&parse_rule("x -> s(x,x)").unwrap(), &sig).is_err());
        assert!(Rule::resolve(&parse_rule("s(x,x) -> x").unwrap(), &sig).is_ok());
    }

    #[test]
    fn rewriting() {
        let sig = fixtures::binary_signature();
        let rules = vec![
            Rule::resolve(&parse_rule("s(0,0) -> 0").unwrap(), &sig).unwrap(),
            Rule::resolve(&parse_rule("s(x,x) -> x").unwrap(), &sig).unwrap(),
        ];
        let mut vars = Vec::new();
        let t = parse_term("s(s(0,0), s(y,y))")
            .unwrap()
            .resolve(&sig, &mut vars)
            .unwrap();
        let mut budget = 100;
        assert_eq!(
            normalize(&t, &rules, &mut budget),
            Some(Term::App(0, vec![Term::Zero, Term::Var(0)]))
        );
        let mut budget = 1;
        assert_eq!(normalize(&t, &rules, &mut budget), None);
    }

    #[test]
    fn non_terminating_rules_hit_the_budget() {
        let sig = fixtures::binary_signature();
        let rules = vec![Rule::resolve(&parse_rule("s(x,y) -> s(y,x)").unwrap(), &sig).unwrap()];
        let t = Term::App(0, vec![Term::Var(0), Term::Var(1)]);
        let mut budget = 50;
        assert_eq!(normalize(&t, &rules, &mut budget), None);
    }
}
