//! Fixpoint generation of subuniverses and congruences.
//!
//! [`Fixpoint`] is a semi-naive closure engine: each round applies every
//! operation to the tuples that involve at least one element added in the
//! previous round. Elements keep their insertion order and the basic
//! operation application that first produced them, so callers can unfold a
//! generated element back into a term over the seeds.

use std::collections::HashSet;
use std::hash::Hash;
use std::ops::ControlFlow;

use indexmap::{IndexMap, IndexSet};

use crate::algebra::{for_each_tuple, same_algebra, AlgebraRef, Elem, ElemSet, FiniteAlgebra, Subuniverse};
use crate::error::{Error, Result};

/// Default ceiling on carrier size for exhaustive subset enumeration.
pub const DEFAULT_SUBSET_GUARD: usize = 20;

/// Default ceiling on carrier size for listing all congruences.
pub const DEFAULT_CONGRUENCE_GUARD: usize = 16;

/// Something that can apply the basic operations of a pointed signature to
/// elements of type `Elem`.
pub trait Operations {
    type Elem: Clone + Eq + Hash;

    fn op_count(&self) -> usize;
    fn arity(&self, op: usize) -> usize;
    fn zero(&self) -> Self::Elem;
    fn apply(&self, op: usize, args: &[&Self::Elem]) -> Self::Elem;
}

impl<T: Operations + ?Sized> Operations for &T {
    type Elem = T::Elem;

    fn op_count(&self) -> usize {
        (**self).op_count()
    }
    fn arity(&self, op: usize) -> usize {
        (**self).arity(op)
    }
    fn zero(&self) -> Self::Elem {
        (**self).zero()
    }
    fn apply(&self, op: usize, args: &[&Self::Elem]) -> Self::Elem {
        (**self).apply(op, args)
    }
}

impl Operations for FiniteAlgebra {
    type Elem = Elem;

    fn op_count(&self) -> usize {
        self.signature().len()
    }
    fn arity(&self, op: usize) -> usize {
        self.signature().arity(op)
    }
    fn zero(&self) -> Elem {
        0
    }
    fn apply(&self, op: usize, args: &[&Elem]) -> Elem {
        let n = self.size();
        self.table(op)[args.iter().fold(0, |acc, &&a| acc * n + a)]
    }
}

/// Componentwise operations on `left × right` without tabulating the product.
#[derive(Clone, Copy)]
pub struct PairOps<'a> {
    pub left: &'a FiniteAlgebra,
    pub right: &'a FiniteAlgebra,
}

impl Operations for PairOps<'_> {
    type Elem = (Elem, Elem);

    fn op_count(&self) -> usize {
        self.left.signature().len()
    }
    fn arity(&self, op: usize) -> usize {
        self.left.signature().arity(op)
    }
    fn zero(&self) -> (Elem, Elem) {
        (0, 0)
    }
    fn apply(&self, op: usize, args: &[&(Elem, Elem)]) -> (Elem, Elem) {
        let (n, m) = (self.left.size(), self.right.size());
        let mut li = 0;
        let mut ri = 0;
        for &&(x, y) in args {
            li = li * n + x;
            ri = ri * m + y;
        }
        (self.left.table(op)[li], self.right.table(op)[ri])
    }
}

/// Componentwise operations on a power of several algebras: coordinate `c`
/// lives in `algebras[coords[c]]`.
pub struct PowerOps<'a> {
    pub algebras: Vec<&'a FiniteAlgebra>,
    pub coords: Vec<usize>,
}

impl Operations for PowerOps<'_> {
    type Elem = Vec<Elem>;

    fn op_count(&self) -> usize {
        self.algebras[0].signature().len()
    }
    fn arity(&self, op: usize) -> usize {
        self.algebras[0].signature().arity(op)
    }
    fn zero(&self) -> Vec<Elem> {
        vec![0; self.coords.len()]
    }
    fn apply(&self, op: usize, args: &[&Vec<Elem>]) -> Vec<Elem> {
        self.coords
            .iter()
            .enumerate()
            .map(|(c, &alg)| {
                let a = self.algebras[alg];
                let n = a.size();
                a.table(op)[args.iter().fold(0, |acc, v| acc * n + v[c])]
            })
            .collect()
    }
}

/// How an element entered a closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Zero,
    /// Position in the seed list passed to [`Fixpoint::new`].
    Seed(usize),
    Apply {
        op: usize,
        args: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Running,
    Saturated,
    Truncated,
}

/// Round-based semi-naive closure of a seed set under an [`Operations`].
pub struct Fixpoint<O: Operations> {
    ops: O,
    elements: IndexSet<O::Elem>,
    origins: Vec<Origin>,
    frontier: usize,
    rounds: usize,
    applications: u64,
    element_limit: usize,
    application_limit: u64,
    state: State,
}

impl<O: Operations> Fixpoint<O> {
    /// Starts a closure from `{zero} ∪ seeds`; nothing is applied yet.
    pub fn new(ops: O, seeds: impl IntoIterator<Item = O::Elem>) -> Self {
        let mut elements = IndexSet::new();
        let mut origins = Vec::new();
        elements.insert(ops.zero());
        origins.push(Origin::Zero);
        for (i, s) in seeds.into_iter().enumerate() {
            if elements.insert(s) {
                origins.push(Origin::Seed(i));
            }
        }
        Self {
            ops,
            elements,
            origins,
            frontier: 0,
            rounds: 0,
            applications: 0,
            element_limit: usize::MAX,
            application_limit: u64::MAX,
            state: State::Running,
        }
    }

    pub fn with_limits(mut self, elements: usize, applications: u64) -> Self {
        self.element_limit = elements;
        self.application_limit = applications;
        if self.elements.len() > elements {
            self.state = State::Truncated;
        }
        self
    }

    pub fn ops(&self) -> &O {
        &self.ops
    }

    /// Runs one round. Returns whether new elements were added.
    pub fn step(&mut self) -> bool {
        if self.state != State::Running {
            return false;
        }
        let old = self.frontier;
        let end = self.elements.len();
        if old == end {
            self.state = State::Saturated;
            return false;
        }
        let mut pending: IndexMap<O::Elem, Origin> = IndexMap::new();
        let mut applications = self.applications;
        let mut truncated = false;
        {
            let elements = &self.elements;
            let ops = &self.ops;
            let room = self.element_limit.saturating_sub(end);
            let limit = self.application_limit;
            let mut buf: Vec<&O::Elem> = Vec::new();
            let mut idx: Vec<usize> = Vec::new();
            'ops: for op in 0..ops.op_count() {
                let k = ops.arity(op);
                // Position j holds the first new element: earlier positions
                // range over old elements, later ones over everything.
                for j in 0..k {
                    let radices: Vec<usize> = (0..k)
                        .map(|p| match p.cmp(&j) {
                            std::cmp::Ordering::Less => old,
                            std::cmp::Ordering::Equal => end - old,
                            std::cmp::Ordering::Greater => end,
                        })
                        .collect();
                    let flow = for_each_tuple(&radices, |t| {
                        if applications >= limit {
                            truncated = true;
                            return ControlFlow::Break(());
                        }
                        applications += 1;
                        idx.clear();
                        idx.extend(t.iter().enumerate().map(|(p, &i)| if p == j { i + old } else { i }));
                        buf.clear();
                        buf.extend(idx.iter().map(|&i| &elements[i]));
                        let r = ops.apply(op, &buf);
                        if !elements.contains(&r) && !pending.contains_key(&r) {
                            if pending.len() >= room {
                                truncated = true;
                                return ControlFlow::Break(());
                            }
                            pending.insert(r, Origin::Apply { op, args: idx.clone() });
                        }
                        ControlFlow::Continue(())
                    });
                    if flow.is_break() {
                        break 'ops;
                    }
                }
            }
        }
        self.applications = applications;
        self.frontier = end;
        self.rounds += 1;
        let added = !pending.is_empty();
        for (e, o) in pending {
            self.elements.insert(e);
            self.origins.push(o);
        }
        if truncated {
            self.state = State::Truncated;
        } else if !added {
            self.state = State::Saturated;
        }
        added
    }

    /// Runs rounds until saturation or a limit.
    pub fn run(&mut self) -> &mut Self {
        while self.step() {}
        if self.state == State::Running {
            self.state = State::Saturated;
        }
        self
    }

    pub fn is_saturated(&self) -> bool {
        self.state == State::Saturated
    }

    pub fn is_truncated(&self) -> bool {
        self.state == State::Truncated
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn applications(&self) -> u64 {
        self.applications
    }

    pub fn elements(&self) -> &IndexSet<O::Elem> {
        &self.elements
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    /// Index range of the elements added by the latest round (or the seeds
    /// before any round ran).
    pub fn latest_block(&self) -> std::ops::Range<usize> {
        self.frontier..self.elements.len()
    }

    pub fn into_parts(self) -> (IndexSet<O::Elem>, Vec<Origin>) {
        (self.elements, self.origins)
    }
}

/// Least subuniverse containing `seed ∪ {0}`.
pub fn generate_subuniverse(a: &AlgebraRef, seed: &[Elem]) -> Subuniverse {
    let mut fp = Fixpoint::new(&**a, seed.iter().copied());
    fp.run();
    Subuniverse::new_unchecked(a.clone(), fp.elements().iter().copied().collect())
}

/// All subuniverses, in increasing order of their membership bitmask (bit
/// `e` set for element `e`).
pub fn list_subuniverses(a: &AlgebraRef, guard: usize) -> Result<Vec<Subuniverse>> {
    let n = a.size();
    if n > guard || n >= usize::BITS as usize {
        return Err(Error::SizeGuard(format!(
            "{n} elements exceed the subset-enumeration guard of {guard}"
        )));
    }
    let mut out = Vec::new();
    for rest in 0..(1usize << (n - 1)) {
        let mask = (rest << 1) | 1;
        let set: ElemSet = (0..n).filter(|e| mask >> e & 1 == 1).collect();
        if crate::algebra::closure_escape(a, &set).is_none() {
            out.push(Subuniverse::new_unchecked(a.clone(), set));
        }
    }
    Ok(out)
}

/// Least subuniverse of `left × right` containing `seeds` and `(0,0)`, as
/// sorted pairs.
pub fn generate_pairs(
    left: &FiniteAlgebra,
    right: &FiniteAlgebra,
    seeds: impl IntoIterator<Item = (Elem, Elem)>,
) -> Vec<(Elem, Elem)> {
    let mut fp = Fixpoint::new(PairOps { left, right }, seeds);
    fp.run();
    let mut pairs: Vec<(Elem, Elem)> = fp.elements().iter().copied().collect();
    pairs.sort_unstable();
    pairs
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// A compatible equivalence relation, stored as the block index of every
/// element. Blocks are numbered by their least members.
#[derive(Clone, Debug)]
pub struct Congruence {
    parent: AlgebraRef,
    block_of: Vec<usize>,
}

impl PartialEq for Congruence {
    fn eq(&self, other: &Self) -> bool {
        self.block_of == other.block_of && same_algebra(&self.parent, &other.parent)
    }
}

fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut seen: Vec<(usize, usize)> = Vec::new();
    labels
        .iter()
        .map(|&l| match seen.iter().find(|(old, _)| *old == l) {
            Some(&(_, new)) => new,
            None => {
                let new = seen.len();
                seen.push((l, new));
                new
            }
        })
        .collect()
}

impl Congruence {
    /// Validates that `blocks` partition the carrier and are compatible.
    pub fn from_partition(parent: AlgebraRef, blocks: &[Vec<Elem>]) -> Result<Self> {
        let n = parent.size();
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                if e >= n {
                    return Err(Error::NotACongruence(format!("element {e} out of range")));
                }
                if labels[e] != usize::MAX {
                    return Err(Error::NotACongruence(format!("element {e} in two blocks")));
                }
                labels[e] = b;
            }
        }
        if let Some(e) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::NotACongruence(format!("element {e} in no block")));
        }
        let theta = Self {
            block_of: canonical_labels(&labels),
            parent,
        };
        if let Some(msg) = theta.compatibility_violation() {
            return Err(Error::NotACongruence(msg));
        }
        Ok(theta)
    }

    pub(crate) fn from_labels_unchecked(parent: AlgebraRef, labels: &[usize]) -> Self {
        Self {
            block_of: canonical_labels(labels),
            parent,
        }
    }

    /// The identity congruence Δ.
    pub fn identity(parent: &AlgebraRef) -> Self {
        Self {
            block_of: parent.elements().collect(),
            parent: parent.clone(),
        }
    }

    /// The total congruence ∇.
    pub fn total(parent: &AlgebraRef) -> Self {
        Self {
            block_of: vec![0; parent.size()],
            parent: parent.clone(),
        }
    }

    pub fn parent(&self) -> &AlgebraRef {
        &self.parent
    }

    pub fn block_of(&self, e: Elem) -> usize {
        self.block_of[e]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn block_count(&self) -> usize {
        self.block_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<ElemSet> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (e, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(e);
        }
        blocks.into_iter().map(ElemSet::new).collect()
    }

    pub fn zero_block(&self) -> ElemSet {
        self.parent
            .elements()
            .filter(|&e| self.block_of[e] == self.block_of[0])
            .collect()
    }

    pub fn related(&self, x: Elem, y: Elem) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn pairs(&self) -> Vec<(Elem, Elem)> {
        let n = self.parent.size();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.related(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Pairs `(least member, other member)` that generate this partition.
    pub fn spanning_pairs(&self) -> Vec<(Elem, Elem)> {
        let blocks = self.blocks();
        blocks
            .iter()
            .flat_map(|b| {
                let rep = b.as_slice()[0];
                b.iter().skip(1).map(move |e| (rep, e))
            })
            .collect()
    }

    /// Changing one argument within its block must not change the block of
    /// the result; by transitivity that is enough for compatibility.
    pub fn compatibility_violation(&self) -> Option<String> {
        let a = &*self.parent;
        let n = a.size();
        let blocks = self.blocks();
        for op in 0..a.signature().len() {
            let k = a.signature().arity(op);
            let mut bad = None;
            let mut alt = vec![0; k];
            let _ = for_each_tuple(&vec![n; k], |args| {
                let base = self.block_of[a.apply(op, args)];
                for j in 0..k {
                    alt.copy_from_slice(args);
                    for b in blocks[self.block_of[args[j]]].iter() {
                        alt[j] = b;
                        if self.block_of[a.apply(op, &alt)] != base {
                            bad = Some(format!(
                                "{} changes block when argument {} moves from {} to {}",
                                a.signature().name(op),
                                j + 1,
                                a.element_name(args[j]),
                                a.element_name(b)
                            ));
                            return ControlFlow::Break(());
                        }
                    }
                }
                ControlFlow::Continue(())
            });
            if bad.is_some() {
                return bad;
            }
        }
        None
    }
}

/// Least congruence containing `pairs`, by union-find with a worklist of
/// merged pairs whose translates under each basic operation get merged too.
pub fn generate_congruence(a: &AlgebraRef, pairs: &[(Elem, Elem)]) -> Congruence {
    let n = a.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(Elem, Elem)> = Vec::new();
    let merge = |uf: &mut UnionFind, work: &mut Vec<(Elem, Elem)>, x: Elem, y: Elem| {
        if uf.find(x) != uf.find(y) {
            uf.union(x, y);
            work.push((x, y));
        }
    };
    for &(x, y) in pairs {
        merge(&mut uf, &mut work, x, y);
    }
    let sig = a.signature().clone();
    while let Some((x, y)) = work.pop() {
        for op in 0..sig.len() {
            let k = sig.arity(op);
            let mut args = vec![0; k];
            for pos in 0..k {
                let mut radices = vec![n; k];
                radices[pos] = 1;
                let _ = for_each_tuple(&radices, |t| {
                    args.copy_from_slice(t);
                    args[pos] = x;
                    let u = a.apply(op, &args);
                    args[pos] = y;
                    let v = a.apply(op, &args);
                    merge(&mut uf, &mut work, u, v);
                    ControlFlow::Continue(())
                });
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
    let theta = Congruence::from_labels_unchecked(a.clone(), &labels);
    debug_assert!(theta.compatibility_violation().is_none());
    theta
}

/// All congruences, ordered from finest to coarsest (by block count, then
/// block labels).
pub fn list_congruences(a: &AlgebraRef, guard: usize) -> Result<Vec<Congruence>> {
    let n = a.size();
    if n > guard {
        return Err(Error::SizeGuard(format!(
            "{n} elements exceed the congruence-listing guard of {guard}"
        )));
    }
    let mut found: Vec<Congruence> = vec![Congruence::identity(a)];
    let mut seen: HashSet<Vec<usize>> = found.iter().map(|c| c.labels().to_vec()).collect();
    for x in 0..n {
        for y in x + 1..n {
            let theta = generate_congruence(a, &[(x, y)]);
            if seen.insert(theta.labels().to_vec()) {
                found.push(theta);
            }
        }
    }
    let principal = found.len();
    let mut i = 1;
    while i < found.len() {
        for j in 1..principal.min(found.len()) {
            let mut gens = found[i].spanning_pairs();
            gens.extend(found[j].spanning_pairs());
            let theta = generate_congruence(a, &gens);
            if seen.insert(theta.labels().to_vec()) {
                found.push(theta);
            }
        }
        i += 1;
    }
    found.sort_by(|x, y| {
        y.block_count()
            .cmp(&x.block_count())
            .then_with(|| x.labels().cmp(y.labels()))
    });
    Ok(found)
}

/// Convenience used by tests and the CLI: the congruence as blocks of names.
pub fn describe_congruence(theta: &Congruence) -> String {
    let a = theta.parent();
    theta
        .blocks()
        .iter()
        .map(|b| a.display_set(b))
        .collect::<Vec<_>>()
        .join("")
}
