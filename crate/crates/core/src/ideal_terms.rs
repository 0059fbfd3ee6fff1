//! Bounded enumeration of ideal terms and the refutation search built on it.
//!
//! Terms in `x₁..x_m, y₁..y_n` are generated breadth-first (depth = round)
//! and merged when they agree on two compositional keys: their table on the
//! target algebra over `A^(m+n)`, and a key for `t(x⃗, 0⃗)` in the variety.
//! For a generated variety the second key is the table of `t(x⃗, 0⃗)` on each
//! generator; for a presented variety it is the normal form of `t(x⃗, 0⃗)`.
//! A term is an ideal term exactly when that key is the one of `0`.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::algebra::{checked_pow, for_each_tuple, AlgebraRef, Elem, ElemSet, FiniteAlgebra};
use crate::closure::{Fixpoint, Operations, Origin};
use crate::error::Result;
use crate::term::{rewrite_root, Term};
use crate::variety::{Presentation, Variety};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermBounds {
    pub max_depth: usize,
    /// Defaults to `|A|` when `None`.
    pub max_x_vars: Option<usize>,
    /// Defaults to `|A|` for enumeration and `|I|` for refutation when `None`.
    pub max_y_vars: Option<usize>,
    /// Distinct terms kept per variable configuration.
    pub max_terms: usize,
    /// Total table cells computed across all configurations.
    pub work_budget: u64,
}

impl Default for TermBounds {
    fn default() -> Self {
        Self {
            max_depth: 6,
            max_x_vars: None,
            max_y_vars: None,
            max_terms: 4096,
            work_budget: 1 << 24,
        }
    }
}

impl TermBounds {
    pub fn with_depth(depth: usize) -> Self {
        Self {
            max_depth: depth,
            ..Self::default()
        }
    }
}

/// An ideal term in `y₁..y_n` with parameters `x₁..x_m`. Variables
/// `0..m` are the `x`s and `m..m+n` the `y`s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealTerm {
    pub term: Term,
    pub x_vars: usize,
    pub y_vars: usize,
    /// Table on the target algebra over `A^(m+n)`.
    pub table: Vec<Elem>,
    pub depth: usize,
}

/// Names `x1..xm, y1..yn`.
pub fn variable_names(m: usize, n: usize) -> Vec<String> {
    (1..=m)
        .map(|i| format!("x{i}"))
        .chain((1..=n).map(|i| format!("y{i}")))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub configurations: usize,
    pub terms: usize,
    pub ideal_terms: usize,
    pub deepest_round: usize,
    /// Every configuration up to the variable bounds was generated to
    /// saturation, so the search was exhaustive for those bounds.
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ZeroKey {
    Tables(Vec<Elem>),
    NormalForm(Option<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    table: Vec<Elem>,
    zero: ZeroKey,
}

enum Mode<'a> {
    Generated {
        algebras: Vec<&'a FiniteAlgebra>,
        coords: Vec<usize>,
    },
    Presented(&'a Presentation),
}

struct TermOps<'a> {
    target: &'a FiniteAlgebra,
    mode: Mode<'a>,
}

fn fold_index(args: &[&Key], cell: usize, n: usize, tables: impl Fn(&Key) -> &[Elem]) -> usize {
    args.iter().fold(0, |acc, k| acc * n + tables(k)[cell])
}

impl Operations for TermOps<'_> {
    type Elem = Key;

    fn op_count(&self) -> usize {
        self.target.signature().len()
    }

    fn arity(&self, op: usize) -> usize {
        self.target.signature().arity(op)
    }

    fn zero(&self) -> Key {
        unreachable!("the zero key is supplied as the first seed")
    }

    fn apply(&self, op: usize, args: &[&Key]) -> Key {
        let n = self.target.size();
        let t = self.target.table(op);
        let table = (0..args[0].table.len())
            .map(|c| t[fold_index(args, c, n, |k| &k.table)])
            .collect();
        let zero = match &self.mode {
            Mode::Generated { algebras, coords } => {
                let tables: Vec<&[Elem]> = args
                    .iter()
                    .map(|k| match &k.zero {
                        ZeroKey::Tables(v) => v.as_slice(),
                        ZeroKey::NormalForm(_) => unreachable!(),
                    })
                    .collect();
                ZeroKey::Tables(
                    coords
                        .iter()
                        .enumerate()
                        .map(|(c, &alg)| {
                            let a = algebras[alg];
                            let m = a.size();
                            a.table(op)[tables.iter().fold(0, |acc, v| acc * m + v[c])]
                        })
                        .collect(),
                )
            }
            Mode::Presented(p) => {
                let children: Option<Vec<Term>> = args
                    .iter()
                    .map(|k| match &k.zero {
                        ZeroKey::NormalForm(t) => t.clone(),
                        ZeroKey::Tables(_) => unreachable!(),
                    })
                    .collect();
                ZeroKey::NormalForm(children.and_then(|c| {
                    let mut budget = p.step_bound();
                    rewrite_root(Term::App(op, c), p.rules(), &mut budget)
                }))
            }
        };
        Key { table, zero }
    }
}

/// `Operations` whose zero is handed in explicitly, since the zero key
/// depends on the configuration.
struct Seeded<'a> {
    inner: TermOps<'a>,
    zero: Key,
}

impl Operations for Seeded<'_> {
    type Elem = Key;
    fn op_count(&self) -> usize {
        self.inner.op_count()
    }
    fn arity(&self, op: usize) -> usize {
        self.inner.arity(op)
    }
    fn zero(&self) -> Key {
        self.zero.clone()
    }
    fn apply(&self, op: usize, args: &[&Key]) -> Key {
        self.inner.apply(op, args)
    }
}

fn projection_table(n: usize, vars: usize, v: Option<usize>) -> Vec<Elem> {
    let mut out = Vec::new();
    let _ = for_each_tuple(&vec![n; vars], |t| {
        out.push(v.map_or(0, |v| t[v]));
        ControlFlow::Continue(())
    });
    out
}

/// The configurations `(m, n)` in search order: by `m + n`, then by `m`.
fn configurations(max_x: usize, max_y: usize, skip_degenerate: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for total in 0..=max_x + max_y {
        for m in 0..=total.min(max_x) {
            let n = total - m;
            if n > max_y || (skip_degenerate && (m == 0 || n == 0)) {
                continue;
            }
            out.push((m, n));
        }
    }
    out
}

struct Enumerator<'a> {
    target: &'a FiniteAlgebra,
    variety: &'a Variety,
    bounds: TermBounds,
    remaining: u64,
    stats: SearchStats,
}

impl Enumerator<'_> {
    /// Runs one configuration; `visit` sees each new ideal term.
    fn run_config(
        &mut self,
        m: usize,
        n: usize,
        visit: &mut impl FnMut(&IdealTerm) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        self.stats.configurations += 1;
        let size = self.target.size();
        let cells = checked_pow(size, m + n).unwrap_or(usize::MAX) as u64;
        let (mode, zero_zero, var_zero): (Mode, ZeroKey, Box<dyn Fn(usize) -> ZeroKey>) = match self.variety {
            Variety::GeneratedBy(algs) => {
                let mut coords = Vec::new();
                for (i, a) in algs.iter().enumerate() {
                    let c = checked_pow(a.size(), m).unwrap_or(usize::MAX);
                    coords.extend(std::iter::repeat_n(i, c.min(1 << 24)));
                }
                let zero_key = ZeroKey::Tables(vec![0; coords.len()]);
                let algs_for_seed: Vec<AlgebraRef> = algs.clone();
                let var_zero = move |v: usize| {
                    let mut out = Vec::new();
                    for a in &algs_for_seed {
                        out.extend(projection_table(a.size(), m, if v < m { Some(v) } else { None }));
                    }
                    ZeroKey::Tables(out)
                };
                (
                    Mode::Generated {
                        algebras: algs.iter().map(|a| &**a).collect(),
                        coords,
                    },
                    zero_key,
                    Box::new(var_zero),
                )
            }
            Variety::Presented(p) => (
                Mode::Presented(p),
                ZeroKey::NormalForm(Some(Term::Zero)),
                Box::new(move |v: usize| ZeroKey::NormalForm(Some(if v < m { Term::Var(v) } else { Term::Zero }))),
            ),
        };
        let zero_cost = match &mode {
            Mode::Generated { coords, .. } => coords.len() as u64,
            Mode::Presented(_) => 8,
        };
        let per_application = cells.saturating_add(zero_cost).max(1);
        if per_application > self.remaining {
            self.stats.exhaustive = false;
            return ControlFlow::Continue(());
        }
        let zero = Key {
            table: projection_table(size, m + n, None),
            zero: zero_zero.clone(),
        };
        let seeds: Vec<Key> = (0..m + n)
            .map(|v| Key {
                table: projection_table(size, m + n, Some(v)),
                zero: var_zero(v),
            })
            .collect();
        let ops = Seeded {
            inner: TermOps {
                target: self.target,
                mode,
            },
            zero,
        };
        let application_limit = self.remaining / per_application;
        let mut fp = Fixpoint::new(ops, seeds).with_limits(self.bounds.max_terms, application_limit);
        let mut terms: Vec<Term> = Vec::new();
        let mut yielded: HashSet<Vec<Elem>> = HashSet::new();
        let mut depth = 0;
        let mut flow = ControlFlow::Continue(());
        loop {
            let block = fp.latest_block();
            let origins = fp.origins();
            for o in &origins[terms.len()..] {
                terms.push(match o {
                    Origin::Zero => Term::Zero,
                    Origin::Seed(j) => Term::Var(*j),
                    Origin::Apply { op, args } => Term::App(*op, args.iter().map(|&a| terms[a].clone()).collect()),
                });
            }
            let block = if depth == 0 { 0..block.end } else { block };
            for i in block {
                let key = &fp.elements()[i];
                let ideal = key.zero == zero_zero;
                if !ideal || !yielded.insert(key.table.clone()) {
                    continue;
                }
                self.stats.ideal_terms += 1;
                let item = IdealTerm {
                    term: terms[i].clone(),
                    x_vars: m,
                    y_vars: n,
                    table: key.table.clone(),
                    depth,
                };
                if visit(&item).is_break() {
                    flow = ControlFlow::Break(());
                    break;
                }
            }
            if flow.is_break() || depth >= self.bounds.max_depth || !fp.step() {
                break;
            }
            depth += 1;
        }
        self.stats.terms += fp.elements().len();
        self.stats.deepest_round = self.stats.deepest_round.max(fp.rounds());
        self.remaining = self.remaining.saturating_sub(fp.applications() * per_application);
        let saturated = fp.is_saturated() || (!fp.is_truncated() && fp.latest_block().is_empty());
        if !saturated {
            self.stats.exhaustive = false;
        }
        flow
    }
}

fn run(
    variety: &Variety,
    target: &FiniteAlgebra,
    bounds: &TermBounds,
    max_x: usize,
    max_y: usize,
    skip_degenerate: bool,
    mut visit: impl FnMut(&IdealTerm) -> ControlFlow<()>,
) -> Result<SearchStats> {
    let variety = variety.adapt(target.signature())?;
    let mut e = Enumerator {
        target,
        variety: &variety,
        bounds: *bounds,
        remaining: bounds.work_budget,
        stats: SearchStats {
            exhaustive: true,
            ..SearchStats::default()
        },
    };
    for (m, n) in configurations(max_x, max_y, skip_degenerate) {
        if e.run_config(m, n, &mut visit).is_break() {
            break;
        }
    }
    Ok(e.stats)
}

/// Streams ideal terms of `variety` evaluated on `target`, configuration by
/// configuration and by depth within each, never repeating a table within a
/// configuration.
pub fn enumerate_ideal_terms(
    variety: &Variety,
    target: &FiniteAlgebra,
    bounds: &TermBounds,
    visit: impl FnMut(&IdealTerm) -> ControlFlow<()>,
) -> Result<SearchStats> {
    let max_x = bounds.max_x_vars.unwrap_or(target.size());
    let max_y = bounds.max_y_vars.unwrap_or(target.size());
    run(variety, target, bounds, max_x, max_y, false, visit)
}

/// Collects [`enumerate_ideal_terms`] into a vector.
pub fn collect_ideal_terms(
    variety: &Variety,
    target: &FiniteAlgebra,
    bounds: &TermBounds,
) -> Result<(Vec<IdealTerm>, SearchStats)> {
    let mut out = Vec::new();
    let stats = enumerate_ideal_terms(variety, target, bounds, |t| {
        out.push(t.clone());
        ControlFlow::Continue(())
    })?;
    Ok((out, stats))
}

/// An ideal-term instance leaving `I`: `t(params, args) = value ∉ I` with
/// every argument in `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealWitness {
    pub term: Term,
    pub x_vars: usize,
    pub y_vars: usize,
    pub params: Vec<Elem>,
    pub args: Vec<Elem>,
    pub value: Elem,
}

impl IdealWitness {
    pub fn variable_names(&self) -> Vec<String> {
        variable_names(self.x_vars, self.y_vars)
    }

    pub fn assignment(&self) -> Vec<Elem> {
        self.params.iter().chain(&self.args).copied().collect()
    }

    /// `t(x⃗, 0⃗)`.
    pub fn vanishing_side(&self) -> Term {
        let m = self.x_vars;
        self.term.substitute(&|v| if v < m { Term::Var(v) } else { Term::Zero })
    }

    pub fn describe(&self, algebra: &FiniteAlgebra) -> String {
        let names = self.variable_names();
        let shown = self.term.display(algebra.signature(), &names).to_string();
        let inst = self
            .term
            .display(algebra.signature(), &instance_names(algebra, &self.assignment()))
            .to_string();
        format!("{shown} at {inst} = {}", algebra.element_name(self.value))
    }
}

fn instance_names(algebra: &FiniteAlgebra, values: &[Elem]) -> Vec<String> {
    values.iter().map(|&v| algebra.element_name(v)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefuteOutcome {
    pub witness: Option<IdealWitness>,
    pub stats: SearchStats,
}

/// First escaping instance of an ideal term, in stream order and then in
/// lexicographic order of `(params, args)`. Configurations with no `x`s or
/// no `y`s are skipped since their instances always stay in `I`.
pub fn refute_ideal(
    a: &FiniteAlgebra,
    subset: &ElemSet,
    variety: &Variety,
    bounds: &TermBounds,
) -> Result<RefuteOutcome> {
    let max_x = bounds.max_x_vars.unwrap_or(a.size());
    let max_y = bounds.max_y_vars.unwrap_or(subset.len());
    let n = a.size();
    let members = subset.as_slice();
    let mask = subset.mask(n);
    let mut witness = None;
    let stats = run(variety, a, bounds, max_x, max_y, true, |t| {
        let (m, k) = (t.x_vars, t.y_vars);
        let mut radices = vec![n; m];
        radices.extend(std::iter::repeat_n(members.len(), k));
        let _ = for_each_tuple(&radices, |digits| {
            let idx = digits
                .iter()
                .enumerate()
                .fold(0, |acc, (p, &d)| acc * n + if p < m { d } else { members[d] });
            let value = t.table[idx];
            if !mask[value] {
                witness = Some(IdealWitness {
                    term: t.term.clone(),
                    x_vars: m,
                    y_vars: k,
                    params: digits[..m].to_vec(),
                    args: digits[m..].iter().map(|&d| members[d]).collect(),
                    value,
                });
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if witness.is_some() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(RefuteOutcome { witness, stats })
}
