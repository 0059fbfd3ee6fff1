//! Finite pointed algebras, homomorphisms, products and quotients.
//!
//! Elements of an algebra of size `n` are the integers `0..n`, and `0` is
//! always the distinguished constant. Operation tables are stored flat, with
//! argument tuples in lexicographic order (first argument most significant).

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::closure::Congruence;
use crate::error::{Error, Result};

pub type Elem = usize;

pub type AlgebraRef = Arc<FiniteAlgebra>;

/// Largest operation table (in cells) that products and subalgebras will
/// materialize.
pub const MAX_TABLE_CELLS: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

/// Operation symbols of a pointed variety. The constant `0` is implicit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    ops: Vec<OpSymbol>,
}

impl Signature {
    pub fn new<S: Into<String>>(ops: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut out: Vec<OpSymbol> = Vec::new();
        for (name, arity) in ops {
            let name = name.into();
            if arity == 0 {
                return Err(Error::NullaryOp(name));
            }
            if out.iter().any(|o| o.name == name) {
                return Err(Error::DuplicateOp(name));
            }
            out.push(OpSymbol { name, arity });
        }
        Ok(Self { ops: out })
    }

    pub fn ops(&self) -> &[OpSymbol] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn arity(&self, op: usize) -> usize {
        self.ops[op].arity
    }

    pub fn name(&self, op: usize) -> &str {
        &self.ops[op].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

pub(crate) fn tuple_index(args: &[Elem], n: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// Calls `f` on every tuple `t` with `t[i] < radices[i]`, in lexicographic
/// order. Stops early when `f` breaks.
pub(crate) fn for_each_tuple(radices: &[usize], mut f: impl FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
    if radices.contains(&0) {
        return ControlFlow::Continue(());
    }
    let mut digits = vec![0usize; radices.len()];
    loop {
        f(&digits)?;
        let mut pos = radices.len();
        loop {
            if pos == 0 {
                return ControlFlow::Continue(());
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// A finite algebra in a pointed signature: total operation tables over
/// `0..size` with `0` as the point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    signature: Arc<Signature>,
    size: usize,
    tables: Vec<Vec<Elem>>,
    names: Option<Vec<String>>,
}

impl FiniteAlgebra {
    /// Validates table shapes, value ranges and pointedness.
    pub fn new(signature: Arc<Signature>, size: usize, tables: Vec<Vec<Elem>>) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlgebra);
        }
        if tables.len() != signature.len() {
            let missing = signature
                .ops()
                .get(tables.len())
                .map(|o| o.name.clone())
                .unwrap_or_else(|| "<extra table>".to_string());
            return Err(Error::TableArity {
                op: missing,
                expected: signature.len(),
                found: tables.len(),
            });
        }
        for (op, table) in signature.ops().iter().zip(&tables) {
            let expected = checked_pow(size, op.arity)
                .ok_or_else(|| Error::SizeGuard(format!("table of `{}` overflows", op.name)))?;
            if table.len() != expected {
                return Err(Error::TableArity {
                    op: op.name.clone(),
                    expected,
                    found: table.len(),
                });
            }
            if let Some((position, &value)) = table.iter().enumerate().find(|(_, &v)| v >= size) {
                return Err(Error::ValueRange {
                    op: op.name.clone(),
                    position,
                    value,
                    size,
                });
            }
        }
        let algebra = Self {
            signature,
            size,
            tables,
            names: None,
        };
        // Closing {0} under the operations stays inside {0} exactly when
        // every operation sends the all-zero tuple to 0.
        for op in 0..algebra.signature.len() {
            let value = algebra.tables[op][0];
            if value != 0 {
                return Err(Error::NotPointed {
                    op: algebra.signature.name(op).to_string(),
                    value,
                });
            }
        }
        Ok(algebra)
    }

    /// Builds the tables by evaluating `f(op, args)` on every tuple.
    pub fn from_fn(signature: Arc<Signature>, size: usize, mut f: impl FnMut(usize, &[Elem]) -> Elem) -> Result<Self> {
        let mut tables = Vec::with_capacity(signature.len());
        for op in 0..signature.len() {
            let arity = signature.arity(op);
            let cells = checked_pow(size, arity)
                .filter(|&c| c <= MAX_TABLE_CELLS)
                .ok_or_else(|| Error::SizeGuard(format!("table of `{}` on {size} elements", signature.name(op))))?;
            let mut table = Vec::with_capacity(cells);
            let radices = vec![size; arity];
            let _ = for_each_tuple(&radices, |args| {
                table.push(f(op, args));
                ControlFlow::Continue(())
            });
            tables.push(table);
        }
        Self::new(signature, size, tables)
    }

    /// The one-element algebra `{0}`.
    pub fn trivial(signature: Arc<Signature>) -> Self {
        let tables = signature.ops().iter().map(|_| vec![0]).collect();
        Self {
            signature,
            size: 1,
            tables,
            names: None,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.size {
            return Err(Error::BadNames(format!(
                "{} names for {} elements",
                names.len(),
                self.size
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::BadNames(format!("`{n}` used twice")));
            }
            if let Ok(k) = n.parse::<usize>() {
                if k != i {
                    return Err(Error::BadNames(format!("numeric name `{n}` must alias element {k}")));
                }
            }
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn element_name(&self, e: Elem) -> String {
        match &self.names {
            Some(names) => names[e].clone(),
            None => e.to_string(),
        }
    }

    /// Resolves an element by name or by its number.
    pub fn parse_element(&self, token: &str) -> Option<Elem> {
        if let Some(names) = &self.names {
            if let Some(i) = names.iter().position(|n| n == token) {
                return Some(i);
            }
        }
        token.parse::<usize>().ok().filter(|&e| e < self.size)
    }

    pub fn table(&self, op: usize) -> &[Elem] {
        &self.tables[op]
    }

    pub fn tables(&self) -> &[Vec<Elem>] {
        &self.tables
    }

    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        self.tables[op][tuple_index(args, self.size)]
    }

    /// Structural equality that ignores element names.
    pub fn same_structure(&self, other: &FiniteAlgebra) -> bool {
        self.size == other.size && self.signature == other.signature && self.tables == other.tables
    }

    pub fn display_set(&self, set: &ElemSet) -> String {
        let names: Vec<String> = set.iter().map(|e| self.element_name(e)).collect();
        format!("{{{}}}", names.join(","))
    }
}

pub(crate) fn same_algebra(a: &AlgebraRef, b: &AlgebraRef) -> bool {
    Arc::ptr_eq(a, b) || a.same_structure(b)
}

pub(crate) fn require_same_signature(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<()> {
    if a.signature == b.signature {
        Ok(())
    } else {
        Err(Error::SignatureMismatch)
    }
}

/// A sorted set of elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElemSet(Vec<Elem>);

impl ElemSet {
    pub fn new(elems: impl IntoIterator<Item = Elem>) -> Self {
        let mut v: Vec<Elem> = elems.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn zero() -> Self {
        Self(vec![0])
    }

    pub fn full(size: usize) -> Self {
        Self((0..size).collect())
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        Self(self.iter().filter(|&e| other.contains(e)).collect())
    }

    pub fn mask(&self, size: usize) -> Vec<bool> {
        let mut m = vec![false; size];
        for e in self.iter() {
            m[e] = true;
        }
        m
    }
}

impl FromIterator<Elem> for ElemSet {
    fn from_iter<T: IntoIterator<Item = Elem>>(iter: T) -> Self {
        Self::new(iter)
    }
}

impl fmt::Display for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A basic operation application leaving a set: `op(args) = value`, or the
/// missing constant when `op` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Escape {
    pub op: Option<usize>,
    pub args: Vec<Elem>,
    pub value: Elem,
}

impl Escape {
    pub fn describe(&self, algebra: &FiniteAlgebra) -> String {
        match self.op {
            None => "constant 0 is missing".to_string(),
            Some(op) => {
                let args: Vec<String> = self.args.iter().map(|&a| algebra.element_name(a)).collect();
                format!(
                    "{}({}) = {}",
                    algebra.signature().name(op),
                    args.join(","),
                    algebra.element_name(self.value)
                )
            }
        }
    }
}

/// First basic operation application that leaves `set`, in operation order
/// then lexicographic argument order.
pub fn closure_escape(algebra: &FiniteAlgebra, set: &ElemSet) -> Option<Escape> {
    if !set.contains(0) {
        return Some(Escape {
            op: None,
            args: Vec::new(),
            value: 0,
        });
    }
    let members = set.as_slice();
    let mask = set.mask(algebra.size());
    for op in 0..algebra.signature().len() {
        let arity = algebra.signature().arity(op);
        let mut found = None;
        let mut args = vec![0; arity];
        let _ = for_each_tuple(&vec![members.len(); arity], |t| {
            for (slot, &i) in args.iter_mut().zip(t) {
                *slot = members[i];
            }
            let value = algebra.apply(op, &args);
            if !mask[value] {
                found = Some(Escape {
                    op: Some(op),
                    args: args.clone(),
                    value,
                });
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// A subset of an algebra closed under all operations (and containing 0).
#[derive(Clone, Debug)]
pub struct Subuniverse {
    parent: AlgebraRef,
    members: ElemSet,
}

impl PartialEq for Subuniverse {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && same_algebra(&self.parent, &other.parent)
    }
}

impl Subuniverse {
    pub fn new(parent: AlgebraRef, members: ElemSet) -> Result<Self> {
        if let Some(e) = members.iter().find(|&e| e >= parent.size()) {
            return Err(Error::NotASubuniverse(format!("element {e} out of range")));
        }
        if let Some(escape) = closure_escape(&parent, &members) {
            return Err(Error::NotASubuniverse(escape.describe(&parent)));
        }
        Ok(Self { parent, members })
    }

    pub(crate) fn new_unchecked(parent: AlgebraRef, members: ElemSet) -> Self {
        debug_assert!(closure_escape(&parent, &members).is_none());
        Self { parent, members }
    }

    pub fn parent(&self) -> &AlgebraRef {
        &self.parent
    }

    pub fn members(&self) -> &ElemSet {
        &self.members
    }

    pub fn into_members(self) -> ElemSet {
        self.members
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.members.contains(e)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Materializes the subalgebra, numbering members in increasing order,
    /// together with its inclusion into the parent.
    pub fn subalgebra(&self) -> Result<(AlgebraRef, Homomorphism)> {
        let members = self.members.as_slice();
        let mut index = vec![usize::MAX; self.parent.size()];
        for (i, &m) in members.iter().enumerate() {
            index[m] = i;
        }
        let parent = &self.parent;
        let mut buf = Vec::new();
        let mut sub = FiniteAlgebra::from_fn(parent.signature().clone(), members.len(), |op, args| {
            buf.clear();
            buf.extend(args.iter().map(|&a| members[a]));
            index[parent.apply(op, &buf)]
        })?;
        if let Some(names) = parent.names() {
            sub = sub.with_names(members.iter().map(|&m| names[m].clone()).collect())?;
        }
        let sub = Arc::new(sub);
        let inclusion = Homomorphism::new_unchecked(sub.clone(), parent.clone(), members.to_vec());
        Ok((sub, inclusion))
    }
}

/// A structure-preserving map between algebras of the same signature.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    dom: AlgebraRef,
    cod: AlgebraRef,
    map: Vec<Elem>,
}

impl PartialEq for Homomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && same_algebra(&self.dom, &other.dom) && same_algebra(&self.cod, &other.cod)
    }
}

/// The first `(op, args)` at which `map` fails to commute with the operations.
pub fn homomorphism_violation(map: &[Elem], dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Option<(usize, Vec<Elem>)> {
    let mut image = Vec::new();
    for op in 0..dom.signature().len() {
        let arity = dom.signature().arity(op);
        let mut found = None;
        let _ = for_each_tuple(&vec![dom.size(); arity], |args| {
            image.clear();
            image.extend(args.iter().map(|&a| map[a]));
            if map[dom.apply(op, args)] != cod.apply(op, &image) {
                found = Some((op, args.to_vec()));
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Whether `map` is a homomorphism `a -> b`.
pub fn is_homomorphism(map: &[Elem], a: &FiniteAlgebra, b: &FiniteAlgebra) -> bool {
    a.signature() == b.signature()
        && map.len() == a.size()
        && map.iter().all(|&v| v < b.size())
        && map[0] == 0
        && homomorphism_violation(map, a, b).is_none()
}

impl Homomorphism {
    pub fn new(dom: AlgebraRef, cod: AlgebraRef, map: Vec<Elem>) -> Result<Self> {
        require_same_signature(&dom, &cod)?;
        if map.len() != dom.size() {
            return Err(Error::NotAHomomorphism(format!(
                "map has {} entries for {} elements",
                map.len(),
                dom.size()
            )));
        }
        if let Some(v) = map.iter().find(|&&v| v >= cod.size()) {
            return Err(Error::NotAHomomorphism(format!("value {v} out of range")));
        }
        if map[0] != 0 {
            return Err(Error::NotAHomomorphism("0 is not sent to 0".into()));
        }
        if let Some((op, args)) = homomorphism_violation(&map, &dom, &cod) {
            let shown: Vec<String> = args.iter().map(|&a| dom.element_name(a)).collect();
            return Err(Error::NotAHomomorphism(format!(
                "fails at {}({})",
                dom.signature().name(op),
                shown.join(",")
            )));
        }
        Ok(Self { dom, cod, map })
    }

    pub(crate) fn new_unchecked(dom: AlgebraRef, cod: AlgebraRef, map: Vec<Elem>) -> Self {
        debug_assert!(is_homomorphism(&map, &dom, &cod));
        Self { dom, cod, map }
    }

    pub fn identity(a: &AlgebraRef) -> Self {
        Self {
            dom: a.clone(),
            cod: a.clone(),
            map: a.elements().collect(),
        }
    }

    /// The constant-zero map, a homomorphism by pointedness.
    pub fn zero(dom: &AlgebraRef, cod: &AlgebraRef) -> Result<Self> {
        require_same_signature(dom, cod)?;
        Ok(Self {
            dom: dom.clone(),
            cod: cod.clone(),
            map: vec![0; dom.size()],
        })
    }

    pub fn dom(&self) -> &AlgebraRef {
        &self.dom
    }

    pub fn cod(&self) -> &AlgebraRef {
        &self.cod
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Homomorphism) -> Result<Homomorphism> {
        if !same_algebra(&self.cod, &next.dom) {
            return Err(Error::AlgebraMismatch("composition of non-adjacent maps".into()));
        }
        Ok(Homomorphism {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            map: self.map.iter().map(|&x| next.map[x]).collect(),
        })
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.size()];
        for &v in &self.map {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Preimage of 0.
    pub fn kernel_set(&self) -> ElemSet {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn image_set(&self) -> ElemSet {
        self.map.iter().copied().collect()
    }

    pub fn image_of(&self, set: &ElemSet) -> ElemSet {
        set.iter().map(|x| self.map[x]).collect()
    }

    pub fn preimage_of(&self, set: &ElemSet) -> ElemSet {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, &v)| set.contains(v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Restricts the domain along a subuniverse inclusion.
    pub fn restrict(&self, sub: &Subuniverse) -> Result<Homomorphism> {
        if !same_algebra(sub.parent(), &self.dom) {
            return Err(Error::AlgebraMismatch("restriction to a foreign subuniverse".into()));
        }
        let (alg, inclusion) = sub.subalgebra()?;
        let map = inclusion.map.iter().map(|&x| self.map[x]).collect();
        Ok(Homomorphism::new_unchecked(alg, self.cod.clone(), map))
    }
}

/// `A × B` with its projections. The pair `(x, y)` has index `x·|B| + y`.
#[derive(Clone, Debug)]
pub struct Product {
    pub algebra: AlgebraRef,
    pub first: Homomorphism,
    pub second: Homomorphism,
    right_size: usize,
}

impl Product {
    pub fn pair(&self, x: Elem, y: Elem) -> Elem {
        x * self.right_size + y
    }

    pub fn split(&self, p: Elem) -> (Elem, Elem) {
        (p / self.right_size, p % self.right_size)
    }
}

pub fn product(a: &AlgebraRef, b: &AlgebraRef) -> Result<Product> {
    require_same_signature(a, b)?;
    let m = b.size();
    let size = a
        .size()
        .checked_mul(m)
        .ok_or_else(|| Error::SizeGuard("product size overflows".into()))?;
    for op in 0..a.signature().len() {
        let cells = checked_pow(size, a.signature().arity(op));
        if cells.is_none_or(|c| c > MAX_TABLE_CELLS) {
            return Err(Error::SizeGuard(format!(
                "product of sizes {} and {m} is too large to tabulate",
                a.size()
            )));
        }
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    let alg = FiniteAlgebra::from_fn(a.signature().clone(), size, |op, args| {
        left.clear();
        right.clear();
        for &p in args {
            left.push(p / m);
            right.push(p % m);
        }
        a.apply(op, &left) * m + b.apply(op, &right)
    })?;
    let names = (0..size)
        .map(|p| format!("({},{})", a.element_name(p / m), b.element_name(p % m)))
        .collect();
    let algebra = Arc::new(alg.with_names(names)?);
    let first = Homomorphism::new_unchecked(algebra.clone(), a.clone(), (0..size).map(|p| p / m).collect());
    let second = Homomorphism::new_unchecked(algebra.clone(), b.clone(), (0..size).map(|p| p % m).collect());
    Ok(Product {
        algebra,
        first,
        second,
        right_size: m,
    })
}

/// `A/θ` with its projection. Blocks are numbered by their least members, so
/// the block of 0 is the new 0.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: AlgebraRef,
    pub projection: Homomorphism,
}

pub fn quotient(a: &AlgebraRef, theta: &Congruence) -> Result<Quotient> {
    if !same_algebra(a, theta.parent()) {
        return Err(Error::AlgebraMismatch("congruence of another algebra".into()));
    }
    let reps: Vec<Elem> = theta.blocks().iter().map(|b| b.as_slice()[0]).collect();
    let mut buf = Vec::new();
    let alg = FiniteAlgebra::from_fn(a.signature().clone(), reps.len(), |op, args| {
        buf.clear();
        buf.extend(args.iter().map(|&blk| reps[blk]));
        theta.block_of(a.apply(op, &buf))
    })?;
    let names = reps.iter().map(|&r| format!("[{}]", a.element_name(r))).collect();
    let algebra = Arc::new(alg.with_names(names)?);
    let projection = Homomorphism::new_unchecked(
        a.clone(),
        algebra.clone(),
        a.elements().map(|x| theta.block_of(x)).collect(),
    );
    Ok(Quotient { algebra, projection })
}

/// Materializes the subalgebra of `left × right` carried by `pairs` (which
/// must be closed and sorted), with the two projections.
pub(crate) fn tabulate_pairs(
    left: &AlgebraRef,
    right: &AlgebraRef,
    pairs: &[(Elem, Elem)],
) -> Result<(AlgebraRef, Homomorphism, Homomorphism)> {
    require_same_signature(left, right)?;
    for op in 0..left.signature().len() {
        let cells = checked_pow(pairs.len(), left.signature().arity(op));
        if cells.is_none_or(|c| c > MAX_TABLE_CELLS) {
            return Err(Error::SizeGuard(format!(
                "subalgebra with {} elements is too large to tabulate",
                pairs.len()
            )));
        }
    }
    let index: HashMap<(Elem, Elem), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut lbuf = Vec::new();
    let mut rbuf = Vec::new();
    let mut missing = None;
    let alg = FiniteAlgebra::from_fn(left.signature().clone(), pairs.len(), |op, args| {
        lbuf.clear();
        rbuf.clear();
        for &i in args {
            lbuf.push(pairs[i].0);
            rbuf.push(pairs[i].1);
        }
        let p = (left.apply(op, &lbuf), right.apply(op, &rbuf));
        match index.get(&p) {
            Some(&i) => i,
            None => {
                missing.get_or_insert(p);
                0
            }
        }
    })?;
    if let Some((x, y)) = missing {
        return Err(Error::NotClosed(format!(
            "({},{}) is generated but missing",
            left.element_name(x),
            right.element_name(y)
        )));
    }
    let names = pairs
        .iter()
        .map(|&(x, y)| format!("({},{})", left.element_name(x), right.element_name(y)))
        .collect();
    let algebra = Arc::new(alg.with_names(names)?);
    let first = Homomorphism::new_unchecked(algebra.clone(), left.clone(), pairs.iter().map(|p| p.0).collect());
    let second = Homomorphism::new_unchecked(algebra.clone(), right.clone(), pairs.iter().map(|p| p.1).collect());
    Ok((algebra, first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example_algebra_validates() {
        let a = fixtures::three_element_example();
        assert_eq!(a.size(), 3);
        assert_eq!(a.apply(0, &[2, 1]), 2);
        assert_eq!(a.apply(0, &[1, 2]), 2);
        assert_eq!(a.apply(0, &[2, 2]), 2);
        assert_eq!(a.apply(0, &[1, 1]), 0);
        assert_eq!(a.parse_element("a"), Some(2));
    }

    #[test]
    fn z4_validates() {
        let z4 = fixtures::cyclic_group(4);
        assert_eq!(z4.size(), 4);
        assert_eq!(z4.apply(0, &[3, 2]), 1);
        assert_eq!(z4.apply(1, &[1]), 3);
    }

    #[test]
    fn unpointed_unary_is_rejected() {
        let sig = Arc::new(Signature::new([("u", 1)]).unwrap());
        let err = FiniteAlgebra::new(sig, 2, vec![vec![1, 0]]).unwrap_err();
        assert_eq!(
            err,
            Error::NotPointed {
                op: "u".into(),
                value: 1
            }
        );
    }

    #[test]
    fn table_shape_and_range_errors() {
        let sig = Arc::new(Signature::new([("s", 2)]).unwrap());
        assert!(matches!(
            FiniteAlgebra::new(sig.clone(), 2, vec![vec![0, 1, 1]]),
            Err(Error::TableArity {
                expected: 4,
                found: 3,
                ..
            })
        ));
        assert!(matches!(
            FiniteAlgebra::new(sig, 2, vec![vec![0, 1, 1, 2]]),
            Err(Error::ValueRange { value: 2, .. })
        ));
    }

    #[test]
    fn nullary_and_duplicate_ops_rejected() {
        assert!(matches!(Signature::new([("c", 0)]), Err(Error::NullaryOp(_))));
        assert!(matches!(
            Signature::new([("s", 2), ("s", 1)]),
            Err(Error::DuplicateOp(_))
        ));
    }

    #[test]
    fn z2_squared_addition() {
        let z2 = Arc::new(fixtures::cyclic_group(2));
        let p = product(&z2, &z2).unwrap();
        assert_eq!(p.algebra.size(), 4);
        let one_one = p.pair(1, 1);
        assert_eq!(p.algebra.apply(0, &[one_one, one_one]), p.pair(0, 0));
        assert!(is_homomorphism(p.first.map(), &p.algebra, &z2));
        assert!(is_homomorphism(p.second.map(), &p.algebra, &z2));
    }

    #[test]
    fn example_square_componentwise() {
        let a = Arc::new(fixtures::three_element_example());
        let p = product(&a, &a).unwrap();
        assert_eq!(p.algebra.size(), 9);
        // s((a,1),(1,a)) = (s(a,1), s(1,a)) = (a,a)
        assert_eq!(p.algebra.apply(0, &[p.pair(2, 1), p.pair(1, 2)]), p.pair(2, 2));
    }

    #[test]
    fn identity_zero_and_mod2_maps() {
        let z4 = Arc::new(fixtures::cyclic_group(4));
        let z2 = Arc::new(fixtures::cyclic_group(2));
        assert!(is_homomorphism(Homomorphism::identity(&z4).map(), &z4, &z4));
        assert!(is_homomorphism(&[0, 0, 0, 0], &z4, &z2));
        assert!(is_homomorphism(&[0, 1, 0, 1], &z4, &z2));
        assert!(!is_homomorphism(&[0, 1, 1, 0], &z4, &z2));
    }

    #[test]
    fn subuniverse_rejects_non_closed() {
        let z4 = Arc::new(fixtures::cyclic_group(4));
        let err = Subuniverse::new(z4, ElemSet::new([0, 1, 2])).unwrap_err();
        assert!(matches!(err, Error::NotASubuniverse(_)));
    }
}
