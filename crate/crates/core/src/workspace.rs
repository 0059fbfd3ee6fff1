//! Line-oriented workspace files declaring algebras, varieties, subsets,
//! relations, homomorphisms and tasks.
//!
//! ```text
//! algebra A
//! size 3
//! names 0 1 a
//! op s 2
//! table s
//! 0 0 0
//! 0 0 a
//! 0 a a
//! subset C of A = {0, 1}
//! variety V presented s(0,0) -> 0
//! variety W generated-by A
//! relation R on A = {(0,0),(1,1),(a,a)}
//! hom h from A to A = [0 0 0]
//! task classify A C --variety V
//! ```
//!
//! A table lists `size^arity` entries, names or numbers, in lexicographic
//! order of the arguments (first argument most significant), spread over
//! as many lines as convenient. `#` starts a comment.

use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::algebra::{AlgebraRef, Elem, ElemSet, FiniteAlgebra, Homomorphism, Signature};
use crate::error::{Error, Result};
use crate::span::Relation;
use crate::term::parse_rule;
use crate::variety::{Variety, DEFAULT_STEP_BOUND};

const KEYWORDS: [&str; 10] = [
    "algebra", "size", "names", "op", "table", "variety", "subset", "relation", "hom", "task",
];

#[derive(Clone, Debug)]
pub struct NamedSubset {
    pub algebra: String,
    pub set: ElemSet,
}

#[derive(Clone, Debug)]
pub struct NamedRelation {
    pub source: String,
    pub target: String,
    pub relation: Relation,
}

#[derive(Clone, Debug)]
pub struct NamedHom {
    pub dom: String,
    pub cod: String,
    pub hom: Homomorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub line: usize,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub algebras: IndexMap<String, AlgebraRef>,
    pub varieties: IndexMap<String, Variety>,
    pub subsets: IndexMap<String, NamedSubset>,
    pub relations: IndexMap<String, NamedRelation>,
    pub homs: IndexMap<String, NamedHom>,
    pub tasks: Vec<Task>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated words with their 1-based columns. Brackets group:
/// `{0, 1}` and `V(A, B)` are single words.
pub fn split_words(line: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start: Option<usize> = None;
    let mut word = String::new();
    for (col, ch) in line.chars().enumerate() {
        if ch.is_whitespace() && depth <= 0 {
            if let Some(s) = start.take() {
                out.push((s + 1, std::mem::take(&mut word)));
            }
            continue;
        }
        match ch {
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth -= 1,
            _ => {}
        }
        if start.is_none() {
            start = Some(col);
        }
        if !ch.is_whitespace() {
            word.push(ch);
        } else {
            word.push(' ');
        }
    }
    if let Some(s) = start {
        out.push((s + 1, word));
    }
    out
}

fn resolve(alg: &FiniteAlgebra, token: &str) -> std::result::Result<Elem, String> {
    alg.parse_element(token)
        .ok_or_else(|| format!("`{token}` is not an element of an algebra of size {}", alg.size()))
}

fn strip_brackets(text: &str, open: char, close: char) -> std::result::Result<&str, String> {
    let t = text.trim();
    t.strip_prefix(open)
        .and_then(|t| t.strip_suffix(close))
        .ok_or_else(|| format!("expected `{open}...{close}`, found `{t}`"))
}

/// `{x, y, ...}` as a set of elements of `alg`.
pub fn parse_element_set(alg: &FiniteAlgebra, text: &str) -> std::result::Result<ElemSet, String> {
    let inner = strip_brackets(text, '{', '}')?;
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| resolve(alg, t))
        .collect()
}

/// `{(x,y), ...}` as pairs from `source × target`.
pub fn parse_pairs(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    text: &str,
) -> std::result::Result<Vec<(Elem, Elem)>, String> {
    let inner = strip_brackets(text, '{', '}')?;
    let mut pairs = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
        if rest.is_empty() {
            break;
        }
        let end = rest.find(')').ok_or_else(|| format!("unterminated pair in `{rest}`"))?;
        let pair = strip_brackets(&rest[..=end], '(', ')')?;
        let (x, y) = pair
            .split_once(',')
            .ok_or_else(|| format!("pair `({pair})` needs two entries"))?;
        pairs.push((resolve(source, x.trim())?, resolve(target, y.trim())?));
        rest = &rest[end + 1..];
    }
    Ok(pairs)
}

/// `[x y ...]` (commas optional) as a map on the elements of `dom`.
pub fn parse_map(dom: &FiniteAlgebra, cod: &FiniteAlgebra, text: &str) -> std::result::Result<Vec<Elem>, String> {
    let inner = strip_brackets(text, '[', ']')?;
    let map = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| resolve(cod, t))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if map.len() != dom.size() {
        return Err(format!("map has {} entries for {} elements", map.len(), dom.size()));
    }
    Ok(map)
}

struct TableInProgress {
    op: String,
    expected: usize,
    tokens: Vec<(usize, usize, String)>,
    line: usize,
}

#[derive(Default)]
struct AlgebraBuilder {
    name: String,
    line: usize,
    size: Option<usize>,
    names: Option<Vec<String>>,
    ops: Vec<(String, usize)>,
    tables: HashMap<String, Vec<(usize, usize, String)>>,
}

struct Parser {
    ws: Workspace,
    building: Option<AlgebraBuilder>,
    table: Option<TableInProgress>,
    signatures: Vec<Arc<Signature>>,
}

impl Parser {
    fn declare(&self, name: &str, line: usize, column: usize) -> Result<()> {
        let ws = &self.ws;
        let taken = ws.algebras.contains_key(name)
            || ws.varieties.contains_key(name)
            || ws.subsets.contains_key(name)
            || ws.relations.contains_key(name)
            || ws.homs.contains_key(name)
            || self.building.as_ref().is_some_and(|b| b.name == name);
        if taken {
            return Err(parse_err(line, column, format!("`{name}` is already defined")));
        }
        if KEYWORDS.contains(&name) {
            return Err(parse_err(line, column, format!("`{name}` is a keyword")));
        }
        Ok(())
    }

    fn algebra(&self, name: &str, line: usize, column: usize) -> Result<AlgebraRef> {
        self.ws
            .algebras
            .get(name)
            .cloned()
            .ok_or_else(|| parse_err(line, column, format!("unknown algebra `{name}`")))
    }

    fn finish_algebra(&mut self) -> Result<()> {
        let Some(b) = self.building.take() else {
            return Ok(());
        };
        let at = |m: String| parse_err(b.line, 1, format!("algebra `{}`: {m}", b.name));
        let size = b.size.ok_or_else(|| at("missing `size`".into()))?;
        let sig = Signature::new(b.ops.iter().map(|(n, a)| (n.clone(), *a))).map_err(|e| at(e.to_string()))?;
        let sig = match self.signatures.iter().find(|s| ***s == sig) {
            Some(s) => s.clone(),
            None => {
                let s = Arc::new(sig);
                self.signatures.push(s.clone());
                s
            }
        };
        let mut tables = Vec::new();
        for (op, _) in &b.ops {
            let raw = b
                .tables
                .get(op)
                .ok_or_else(|| at(format!("missing table for `{op}`")))?;
            let mut t = Vec::with_capacity(raw.len());
            for (line, col, tok) in raw {
                let named = b.names.as_ref().and_then(|n| n.iter().position(|x| x == tok));
                let e = named
                    .or_else(|| tok.parse::<usize>().ok().filter(|&e| e < size))
                    .ok_or_else(|| parse_err(*line, *col, format!("`{tok}` is not an element of `{}`", b.name)))?;
                t.push(e);
            }
            tables.push(t);
        }
        let mut alg = FiniteAlgebra::new(sig, size, tables).map_err(|e| at(e.to_string()))?;
        if let Some(names) = b.names {
            alg = alg.with_names(names).map_err(|e| at(e.to_string()))?;
        }
        self.ws.algebras.insert(b.name, Arc::new(alg));
        Ok(())
    }

    fn feed_table(&mut self, line: usize, words: &[(usize, String)]) -> Result<bool> {
        let Some(t) = self.table.as_mut() else {
            return Ok(false);
        };
        if let Some((_, w)) = words.first() {
            if KEYWORDS.contains(&w.as_str()) {
                return Err(parse_err(
                    t.line,
                    1,
                    format!(
                        "table for `{}` has {} entries, expected {}",
                        t.op,
                        t.tokens.len(),
                        t.expected
                    ),
                ));
            }
        }
        for (col, w) in words {
            if t.tokens.len() == t.expected {
                return Err(parse_err(
                    line,
                    *col,
                    format!("table for `{}` has more than {} entries", t.op, t.expected),
                ));
            }
            t.tokens.push((line, *col, w.clone()));
        }
        if t.tokens.len() == t.expected {
            let t = self.table.take().expect("present");
            self.building
                .as_mut()
                .expect("tables belong to algebras")
                .tables
                .insert(t.op, t.tokens);
        }
        Ok(true)
    }

    fn line(&mut self, line: usize, text: &str) -> Result<()> {
        let text = text.split('#').next().unwrap_or("");
        let words = split_words(text);
        if self.feed_table(line, &words)? {
            return Ok(());
        }
        let Some((col, kw)) = words.first() else {
            return Ok(());
        };
        let arg = |i: usize| -> Result<&(usize, String)> {
            words
                .get(i)
                .ok_or_else(|| parse_err(line, text.trim_end().len() + 1, format!("`{kw}` needs more arguments")))
        };
        let rest_after = |i: usize| -> String {
            words
                .get(i)
                .map(|(c, _)| text[c - 1..].trim().to_string())
                .unwrap_or_default()
        };
        match kw.as_str() {
            "size" | "names" | "op" | "table" => {
                let Some(b) = self.building.as_mut() else {
                    return Err(parse_err(line, *col, format!("`{kw}` outside an algebra block")));
                };
                match kw.as_str() {
                    "size" => {
                        let (c, n) = arg(1)?;
                        let n = n
                            .parse::<usize>()
                            .map_err(|_| parse_err(line, *c, format!("`{n}` is not a size")))?;
                        b.size = Some(n);
                    }
                    "names" => b.names = Some(words[1..].iter().map(|(_, w)| w.clone()).collect()),
                    "op" => {
                        let (_, name) = arg(1)?;
                        let (c, ar) = arg(2)?;
                        let ar = ar
                            .parse::<usize>()
                            .map_err(|_| parse_err(line, *c, format!("`{ar}` is not an arity")))?;
                        b.ops.push((name.clone(), ar));
                    }
                    _ => {
                        let (c, op) = arg(1)?;
                        let arity = b
                            .ops
                            .iter()
                            .find(|(n, _)| n == op)
                            .map(|(_, a)| *a)
                            .ok_or_else(|| parse_err(line, *c, format!("table for undeclared operation `{op}`")))?;
                        let size = b
                            .size
                            .ok_or_else(|| parse_err(line, *c, "`size` must precede tables"))?;
                        let expected = crate::algebra::checked_pow(size, arity)
                            .ok_or_else(|| parse_err(line, *c, "table too large"))?;
                        if b.tables.contains_key(op) {
                            return Err(parse_err(line, *c, format!("second table for `{op}`")));
                        }
                        self.table = Some(TableInProgress {
                            op: op.clone(),
                            expected,
                            tokens: Vec::new(),
                            line,
                        });
                        self.feed_table(line, &words[2..])?;
                    }
                }
                return Ok(());
            }
            _ => self.finish_algebra()?,
        }
        match kw.as_str() {
            "algebra" => {
                let (c, name) = arg(1)?;
                self.declare(name, line, *c)?;
                self.building = Some(AlgebraBuilder {
                    name: name.clone(),
                    line,
                    ..Default::default()
                });
            }
            "variety" => {
                let (c, name) = arg(1)?;
                self.declare(name, line, *c)?;
                let (kc, kind) = arg(2)?;
                let v = match kind.as_str() {
                    "generated-by" => {
                        let algs = words[3..]
                            .iter()
                            .map(|(c, n)| self.algebra(n, line, *c))
                            .collect::<Result<Vec<_>>>()?;
                        Variety::generated_by(algs).map_err(|e| parse_err(line, *kc, e.to_string()))?
                    }
                    "presented" => {
                        let body = rest_after(3);
                        let rules = body
                            .split(';')
                            .filter(|r| !r.trim().is_empty())
                            .map(parse_rule)
                            .collect::<Result<Vec<_>>>()
                            .map_err(|e| parse_err(line, *kc, e.to_string()))?;
                        Variety::presented_from_raw(&rules, None, DEFAULT_STEP_BOUND)
                            .map_err(|e| parse_err(line, *kc, e.to_string()))?
                    }
                    other => {
                        return Err(parse_err(
                            line,
                            *kc,
                            format!("expected `generated-by` or `presented`, found `{other}`"),
                        ))
                    }
                };
                self.ws.varieties.insert(name.clone(), v);
            }
            "subset" => {
                let (c, name) = arg(1)?;
                self.declare(name, line, *c)?;
                self.expect(line, &words, 2, "of")?;
                let (ac, alg_name) = arg(3)?;
                let alg = self.algebra(alg_name, line, *ac)?;
                self.expect(line, &words, 4, "=")?;
                let (sc, _) = arg(5)?;
                let set = parse_element_set(&alg, &rest_after(5)).map_err(|m| parse_err(line, *sc, m))?;
                self.ws.subsets.insert(
                    name.clone(),
                    NamedSubset {
                        algebra: alg_name.clone(),
                        set,
                    },
                );
            }
            "relation" => {
                let (c, name) = arg(1)?;
                self.declare(name, line, *c)?;
                let (source, target, eq) = match arg(2)?.1.as_str() {
                    "on" => (arg(3)?, arg(3)?, 4),
                    "from" => {
                        self.expect(line, &words, 4, "to")?;
                        (arg(3)?, arg(5)?, 6)
                    }
                    other => {
                        return Err(parse_err(
                            line,
                            arg(2)?.0,
                            format!("expected `on` or `from`, found `{other}`"),
                        ))
                    }
                };
                self.expect(line, &words, eq, "=")?;
                let x = self.algebra(&source.1, line, source.0)?;
                let y = self.algebra(&target.1, line, target.0)?;
                let (pc, _) = arg(eq + 1)?;
                let pairs = parse_pairs(&x, &y, &rest_after(eq + 1)).map_err(|m| parse_err(line, *pc, m))?;
                let relation = Relation::new(x, y, pairs).map_err(|e| parse_err(line, *pc, e.to_string()))?;
                self.ws.relations.insert(
                    name.clone(),
                    NamedRelation {
                        source: source.1.clone(),
                        target: target.1.clone(),
                        relation,
                    },
                );
            }
            "hom" => {
                let (c, name) = arg(1)?;
                self.declare(name, line, *c)?;
                self.expect(line, &words, 2, "from")?;
                self.expect(line, &words, 4, "to")?;
                self.expect(line, &words, 6, "=")?;
                let (dc, dom) = arg(3)?;
                let (cc, cod) = arg(5)?;
                let x = self.algebra(dom, line, *dc)?;
                let y = self.algebra(cod, line, *cc)?;
                let (mc, _) = arg(7)?;
                let map = parse_map(&x, &y, &rest_after(7)).map_err(|m| parse_err(line, *mc, m))?;
                let hom = Homomorphism::new(x, y, map).map_err(|e| parse_err(line, *mc, e.to_string()))?;
                self.ws.homs.insert(
                    name.clone(),
                    NamedHom {
                        dom: dom.clone(),
                        cod: cod.clone(),
                        hom,
                    },
                );
            }
            "task" => {
                arg(1)?;
                self.ws.tasks.push(Task {
                    line,
                    args: words[1..].iter().map(|(_, w)| w.clone()).collect(),
                });
            }
            other => return Err(parse_err(line, *col, format!("unknown keyword `{other}`"))),
        }
        Ok(())
    }

    fn expect(&self, line: usize, words: &[(usize, String)], i: usize, want: &str) -> Result<()> {
        match words.get(i) {
            Some((_, w)) if w == want => Ok(()),
            Some((c, w)) => Err(parse_err(line, *c, format!("expected `{want}`, found `{w}`"))),
            None => Err(parse_err(
                line,
                words.last().map(|(c, w)| c + w.chars().count()).unwrap_or(1),
                format!("expected `{want}`"),
            )),
        }
    }
}

impl Workspace {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            ws: Workspace::default(),
            building: None,
            table: None,
            signatures: Vec::new(),
        };
        let mut last = 0;
        for (i, text) in src.lines().enumerate() {
            p.line(i + 1, text)?;
            last = i + 1;
        }
        if let Some(t) = &p.table {
            return Err(parse_err(
                t.line,
                1,
                format!(
                    "table for `{}` has {} entries, expected {}",
                    t.op,
                    t.tokens.len(),
                    t.expected
                ),
            ));
        }
        p.finish_algebra().map_err(|e| match e {
            Error::Parse { .. } => e,
            other => parse_err(last, 1, other.to_string()),
        })?;
        Ok(p.ws)
    }

    pub fn algebra(&self, name: &str) -> Result<&AlgebraRef> {
        self.algebras.get(name).ok_or_else(|| Error::UnknownName(name.into()))
    }

    pub fn algebra_name(&self, a: &AlgebraRef) -> Option<&str> {
        self.algebras
            .iter()
            .find(|(_, x)| Arc::ptr_eq(x, a))
            .map(|(n, _)| n.as_str())
    }

    /// A declared variety, or `V(A, B, ...)` for the variety generated by
    /// declared algebras.
    pub fn variety(&self, expr: &str) -> Result<Variety> {
        if let Some(v) = self.varieties.get(expr) {
            return Ok(v.clone());
        }
        let inner = expr
            .trim()
            .strip_prefix("V(")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::UnknownName(expr.into()))?;
        let algs = inner
            .split(',')
            .map(|n| self.algebra(n.trim()).cloned())
            .collect::<Result<Vec<_>>>()?;
        Variety::generated_by(algs)
    }

    /// A declared subset of `alg`, or an inline `{x, y, ...}`.
    pub fn subset(&self, alg: &str, expr: &str) -> Result<ElemSet> {
        let a = self.algebra(alg)?;
        if expr.trim_start().starts_with('{') {
            return parse_element_set(a, expr).map_err(Error::NotASubuniverse);
        }
        let s = self.subsets.get(expr).ok_or_else(|| Error::UnknownName(expr.into()))?;
        if s.algebra != alg {
            return Err(Error::AlgebraMismatch(format!(
                "`{expr}` is a subset of `{}`",
                s.algebra
            )));
        }
        Ok(s.set.clone())
    }

    /// A declared relation (from `alg`, when given), or an inline
    /// `{(x,y), ...}` on `alg`, closed under the operations by generation.
    pub fn relation(&self, expr: &str, alg: Option<&str>) -> Result<Relation> {
        if expr.trim_start().starts_with('{') {
            let name = alg.ok_or_else(|| Error::UnknownName("algebra for inline relation".into()))?;
            let a = self.algebra(name)?;
            let pairs = parse_pairs(a, a, expr).map_err(Error::NotClosed)?;
            return Relation::generated(a.clone(), a.clone(), pairs);
        }
        let r = self
            .relations
            .get(expr)
            .ok_or_else(|| Error::UnknownName(expr.into()))?;
        if let Some(name) = alg {
            if r.source != name {
                return Err(Error::AlgebraMismatch(format!(
                    "`{expr}` is not a relation from `{name}`"
                )));
            }
        }
        Ok(r.relation.clone())
    }

    pub fn hom(&self, name: &str) -> Result<&Homomorphism> {
        self.homs
            .get(name)
            .map(|h| &h.hom)
            .ok_or_else(|| Error::UnknownName(name.into()))
    }

    pub fn is_empty(&self) -> bool {
        self.algebras.is_empty()
            && self.varieties.is_empty()
            && self.subsets.is_empty()
            && self.relations.is_empty()
            && self.homs.is_empty()
            && self.tasks.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example_workspace() {
        let ws = Workspace::parse(fixtures::EXAMPLE_WORKSPACE).unwrap();
        let a = ws.algebra("A").unwrap();
        assert!(a.same_structure(&fixtures::three_element_example()));
        assert_eq!(a.names().unwrap(), &["0", "1", "a"]);
        assert_eq!(ws.subset("A", "C").unwrap(), fixtures::example_subset());
        assert_eq!(ws.tasks.len(), 4);
        assert_eq!(ws.tasks[0].args, ["classify", "A", "C", "--variety", "V"]);
        assert!(matches!(ws.variety("V").unwrap(), Variety::Presented(_)));
        assert!(matches!(ws.variety("V(A)").unwrap(), Variety::GeneratedBy(_)));
    }

    #[test]
    fn groups_workspace() {
        let ws = Workspace::parse(fixtures::GROUPS_WORKSPACE).unwrap();
        assert!(ws.algebra("Z4").unwrap().same_structure(&fixtures::cyclic_group(4)));
        assert!(ws.algebra("S3").unwrap().same_structure(&fixtures::symmetric_group_3()));
        assert_eq!(ws.relation("Z4_mod2", Some("Z4")).unwrap().len(), 8);
        assert_eq!(ws.hom("Z4_to_Z2").unwrap().map(), &[0, 1, 0, 1]);
        assert_eq!(ws.subset("S3", "S3_A3").unwrap(), ElemSet::new([0, 4, 5]));
        assert_eq!(ws.subset("Z4", "{0, 2}").unwrap(), ElemSet::new([0, 2]));
    }

    #[test]
    fn empty_file() {
        assert!(Workspace::parse("").unwrap().is_empty());
        assert!(Workspace::parse("# nothing\n\n").unwrap().is_empty());
    }

    #[test]
    fn short_table_names_the_op() {
        let src = "algebra A\nsize 2\nop f 2\ntable f\n0 1 1\nsubset S of A = {0}\n";
        match Workspace::parse(src).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("`f`"), "{message}");
            }
            e => panic!("{e:?}"),
        }
        let long = "algebra A\nsize 2\nop f 1\ntable f 0 1 1\n";
        match Workspace::parse(long).unwrap_err() {
            Error::Parse { line, column, message } => {
                assert_eq!((line, column), (4, 13));
                assert!(message.contains("`f`"));
            }
            e => panic!("{e:?}"),
        }
        let eof = "algebra A\nsize 2\nop f 1\ntable f 0\n";
        assert!(matches!(Workspace::parse(eof), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn validation_errors() {
        let unpointed = "algebra A\nsize 2\nop f 1\ntable f 1 0\n";
        match Workspace::parse(unpointed).unwrap_err() {
            Error::Parse { message, .. } => assert!(message.contains("pointed"), "{message}"),
            e => panic!("{e:?}"),
        }
        let dup = "algebra A\nsize 1\nalgebra A\nsize 1\n";
        assert!(matches!(Workspace::parse(dup), Err(Error::Parse { line: 3, .. })));
        let unknown = "subset S of B = {0}\n";
        assert!(matches!(
            Workspace::parse(unknown),
            Err(Error::Parse {
                line: 1,
                column: 13,
                ..
            })
        ));
        let open = "algebra A\nsize 2\nop f 1\ntable f 0 1\nrelation R on A = {(1,0)}\n";
        match Workspace::parse(open).unwrap_err() {
            Error::Parse { message, .. } => assert!(message.contains("(0,0)"), "{message}"),
            e => panic!("{e:?}"),
        }
        let bad_elem = "algebra A\nsize 2\nop f 1\ntable f 0 7\n";
        assert!(matches!(
            Workspace::parse(bad_elem),
            Err(Error::Parse {
                line: 4,
                column: 11,
                ..
            })
        ));
    }

    #[test]
    fn words_group_brackets() {
        let w: Vec<String> = split_words("subset C of A = {0, 1}").into_iter().map(|x| x.1).collect();
        assert_eq!(w, ["subset", "C", "of", "A", "=", "{0, 1}"]);
        assert_eq!(split_words("  x  y")[1], (6, "y".to_string()));
    }
}
