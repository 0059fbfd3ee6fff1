//! Spans and relations between finite algebras: tabulation, zero-classes,
//! normalisations, pullbacks, images, relational composition, left
//! splittings, and the two constructions relating clots to surjective
//! left split relations.

use crate::algebra::{
    product, require_same_signature, same_algebra, tabulate_pairs, AlgebraRef, Elem, ElemSet, Homomorphism, Subuniverse,
};
use crate::closure::generate_pairs;
use crate::error::{Error, Result};
use crate::search::HomSearch;

/// A subuniverse of `source × target`, stored as its sorted list of pairs.
#[derive(Clone, Debug)]
pub struct Relation {
    source: AlgebraRef,
    target: AlgebraRef,
    pairs: Vec<(Elem, Elem)>,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
            && same_algebra(&self.source, &other.source)
            && same_algebra(&self.target, &other.target)
    }
}

fn sorted(pairs: impl IntoIterator<Item = (Elem, Elem)>) -> Vec<(Elem, Elem)> {
    let mut v: Vec<(Elem, Elem)> = pairs.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl Relation {
    /// Checks that `pairs` is closed under the componentwise operations.
    pub fn new(source: AlgebraRef, target: AlgebraRef, pairs: impl IntoIterator<Item = (Elem, Elem)>) -> Result<Self> {
        require_same_signature(&source, &target)?;
        let pairs = sorted(pairs);
        if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x >= source.size() || y >= target.size()) {
            return Err(Error::NotClosed(format!("pair ({x},{y}) out of range")));
        }
        let closed = generate_pairs(&source, &target, pairs.iter().copied());
        if closed.len() != pairs.len() {
            let &(x, y) = closed
                .iter()
                .find(|p| pairs.binary_search(p).is_err())
                .expect("closure adds a pair");
            return Err(Error::NotClosed(format!(
                "({},{}) is generated but missing",
                source.element_name(x),
                target.element_name(y)
            )));
        }
        Ok(Self { source, target, pairs })
    }

    pub(crate) fn new_unchecked(
        source: AlgebraRef,
        target: AlgebraRef,
        pairs: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Self {
        let pairs = sorted(pairs);
        debug_assert_eq!(
            generate_pairs(&source, &target, pairs.iter().copied()).len(),
            pairs.len()
        );
        Self { source, target, pairs }
    }

    /// Least relation containing `seeds` (and `(0,0)`).
    pub fn generated(
        source: AlgebraRef,
        target: AlgebraRef,
        seeds: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<Self> {
        require_same_signature(&source, &target)?;
        let pairs = generate_pairs(&source, &target, seeds);
        Ok(Self { source, target, pairs })
    }

    pub fn diagonal(a: &AlgebraRef) -> Self {
        Self {
            source: a.clone(),
            target: a.clone(),
            pairs: a.elements().map(|x| (x, x)).collect(),
        }
    }

    pub fn total(x: &AlgebraRef, y: &AlgebraRef) -> Result<Self> {
        require_same_signature(x, y)?;
        Ok(Self {
            source: x.clone(),
            target: y.clone(),
            pairs: x.elements().flat_map(|a| y.elements().map(move |b| (a, b))).collect(),
        })
    }

    /// `{(x, h x)}`.
    pub fn graph(h: &Homomorphism) -> Self {
        Self {
            source: h.dom().clone(),
            target: h.cod().clone(),
            pairs: h.map().iter().enumerate().map(|(x, &y)| (x, y)).collect(),
        }
    }

    pub fn converse(&self) -> Self {
        Self {
            source: self.target.clone(),
            target: self.source.clone(),
            pairs: sorted(self.pairs.iter().map(|&(x, y)| (y, x))),
        }
    }

    pub fn source(&self) -> &AlgebraRef {
        &self.source
    }

    pub fn target(&self) -> &AlgebraRef {
        &self.target
    }

    pub fn pairs(&self) -> &[(Elem, Elem)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, x: Elem, y: Elem) -> bool {
        self.pairs.binary_search(&(x, y)).is_ok()
    }

    /// `{y : (0, y) ∈ R}`.
    pub fn zero_class_set(&self) -> ElemSet {
        self.pairs.iter().filter(|p| p.0 == 0).map(|p| p.1).collect()
    }

    pub fn is_reflexive(&self) -> bool {
        same_algebra(&self.source, &self.target) && self.source.elements().all(|x| self.contains(x, x))
    }

    /// Whether the projection onto the target is onto.
    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        for &(_, y) in &self.pairs {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// The jointly monic span tabulating the relation; the apex elements are
    /// the pairs in increasing order.
    pub fn to_span(&self) -> Result<Span> {
        let (_, first, second) = tabulate_pairs(&self.source, &self.target, &self.pairs)?;
        Span::new(first, second)
    }

    pub fn display(&self) -> String {
        let parts: Vec<String> = self
            .pairs
            .iter()
            .map(|&(x, y)| format!("({},{})", self.source.element_name(x), self.target.element_name(y)))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Two homomorphisms `d: R -> X` and `c: R -> Y` out of a common apex.
#[derive(Clone, Debug, PartialEq)]
pub struct Span {
    left: Homomorphism,
    right: Homomorphism,
}

impl Span {
    pub fn new(left: Homomorphism, right: Homomorphism) -> Result<Self> {
        if !same_algebra(left.dom(), right.dom()) {
            return Err(Error::AlgebraMismatch("span legs have different domains".into()));
        }
        Ok(Self { left, right })
    }

    pub fn apex(&self) -> &AlgebraRef {
        self.left.dom()
    }

    pub fn left(&self) -> &Homomorphism {
        &self.left
    }

    pub fn right(&self) -> &Homomorphism {
        &self.right
    }

    pub fn source(&self) -> &AlgebraRef {
        self.left.cod()
    }

    pub fn target(&self) -> &AlgebraRef {
        self.right.cod()
    }
}

/// The image of `⟨d, c⟩`.
pub fn tabulate(s: &Span) -> Relation {
    Relation::new_unchecked(
        s.source().clone(),
        s.target().clone(),
        s.apex().elements().map(|r| (s.left.apply(r), s.right.apply(r))),
    )
}

/// A zero-class `I ⊆ Y` together with a lifting `l: I -> R` with `d l = 0`
/// and `c l = i`. `lifting[j]` lifts the `j`-th member of `subset`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroClassResult {
    pub subset: Subuniverse,
    pub lifting: Vec<Elem>,
}

fn checked_subuniverse(parent: &AlgebraRef, members: ElemSet, what: &str) -> Result<Subuniverse> {
    Subuniverse::new(parent.clone(), members).map_err(|e| Error::Invariant(format!("{what} is not closed: {e}")))
}

/// `{ y : ∃ r, d r = 0 ∧ c r = y }`, each member lifted to its least `r`.
pub fn zero_class(s: &Span) -> Result<ZeroClassResult> {
    let mut lift = vec![None; s.target().size()];
    for r in s.apex().elements() {
        if s.left.apply(r) == 0 {
            lift[s.right.apply(r)].get_or_insert(r);
        }
    }
    let members: ElemSet = lift
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_some())
        .map(|(y, _)| y)
        .collect();
    let lifting = members.iter().map(|y| lift[y].expect("member")).collect();
    let subset = checked_subuniverse(s.target(), members, "zero-class")?;
    Ok(ZeroClassResult { subset, lifting })
}

/// The zero-class computed as the pullback of `⟨d, c⟩: R -> X × Y` along
/// `⟨0, 1_Y⟩: Y -> X × Y`.
pub fn zero_class_via_pullback(s: &Span) -> Result<ZeroClassResult> {
    let xy = product(s.source(), s.target())?;
    let dc = Homomorphism::new(
        s.apex().clone(),
        xy.algebra.clone(),
        s.apex()
            .elements()
            .map(|r| xy.pair(s.left.apply(r), s.right.apply(r)))
            .collect(),
    )?;
    let zero_one = Homomorphism::new(
        s.target().clone(),
        xy.algebra.clone(),
        s.target().elements().map(|y| xy.pair(0, y)).collect(),
    )?;
    let pb = pullback(&dc, &zero_one)?;
    let members = pb.second.image_set();
    let mut lifting = Vec::with_capacity(members.len());
    for y in members.iter() {
        let p = pb.second.map().iter().position(|&v| v == y).expect("member of image");
        lifting.push(pb.first.apply(p));
    }
    let subset = checked_subuniverse(s.target(), members, "zero-class")?;
    Ok(ZeroClassResult { subset, lifting })
}

/// `c(ker d)`.
pub fn normalisation(s: &Span) -> Result<Subuniverse> {
    let kernel = s.left.kernel_set();
    checked_subuniverse(s.target(), s.right.image_of(&kernel), "normalisation")
}

/// `X ×_Z Y` with its projections; the carrier is `{(x, y) : f x = g y}` in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub algebra: AlgebraRef,
    pub first: Homomorphism,
    pub second: Homomorphism,
    pub pairs: Vec<(Elem, Elem)>,
}

impl Pullback {
    pub fn index_of(&self, x: Elem, y: Elem) -> Option<Elem> {
        self.pairs.binary_search(&(x, y)).ok()
    }
}

pub fn pullback(f: &Homomorphism, g: &Homomorphism) -> Result<Pullback> {
    require_same_signature(f.dom(), g.dom())?;
    if !same_algebra(f.cod(), g.cod()) {
        return Err(Error::AlgebraMismatch(
            "pullback of maps with different codomains".into(),
        ));
    }
    let mut pairs = Vec::new();
    for x in f.dom().elements() {
        for y in g.dom().elements() {
            if f.apply(x) == g.apply(y) {
                pairs.push((x, y));
            }
        }
    }
    let (algebra, first, second) = tabulate_pairs(f.dom(), g.dom(), &pairs)?;
    Ok(Pullback {
        algebra,
        first,
        second,
        pairs,
    })
}

/// The set image of `h`.
pub fn image(h: &Homomorphism) -> Result<Subuniverse> {
    checked_subuniverse(h.cod(), h.image_set(), "image")
}

/// `{(x, z) : ∃ y, (x, y) ∈ R ∧ (y, z) ∈ S}`, which must be closed.
pub fn rel_compose(r: &Relation, s: &Relation) -> Result<Relation> {
    if !same_algebra(&r.target, &s.source) {
        return Err(Error::AlgebraMismatch("relations are not composable".into()));
    }
    let mut by_source: Vec<Vec<Elem>> = vec![Vec::new(); s.source.size()];
    for &(y, z) in &s.pairs {
        by_source[y].push(z);
    }
    let pairs = r
        .pairs
        .iter()
        .flat_map(|&(x, y)| by_source[y].iter().map(move |&z| (x, z)));
    Relation::new(r.source.clone(), s.target.clone(), pairs)
}

pub fn is_surjective(s: &Span) -> bool {
    s.right.is_surjective()
}

/// Lexicographically least homomorphic section `e` of the left leg.
pub fn find_left_splitting(s: &Span) -> Result<Option<Homomorphism>> {
    let x = s.source();
    let mut fibres: Vec<Vec<Elem>> = vec![Vec::new(); x.size()];
    for r in s.apex().elements() {
        fibres[s.left.apply(r)].push(r);
    }
    if fibres.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut search = HomSearch::new(x, s.apex())?;
    for (e, fibre) in fibres.into_iter().enumerate() {
        search = search.restrict(e, fibre)?;
    }
    let found = search.run(1);
    Ok(found
        .solutions
        .into_iter()
        .next()
        .map(|map| Homomorphism::new_unchecked(x.clone(), s.apex().clone(), map)))
}

/// A relation whose tabulating span has a section `e` of its left leg.
#[derive(Clone, Debug)]
pub struct LeftSplitSpan {
    pub relation: Relation,
    pub span: Span,
    pub section: Homomorphism,
}

impl LeftSplitSpan {
    pub fn new(relation: Relation, section: Homomorphism) -> Result<Self> {
        let span = relation.to_span()?;
        if !same_algebra(section.cod(), span.apex()) || !same_algebra(section.dom(), span.source()) {
            return Err(Error::AlgebraMismatch("section does not fit the span".into()));
        }
        if section.map().iter().enumerate().any(|(x, &r)| span.left.apply(r) != x) {
            return Err(Error::NotAHomomorphism("section is not split by the left leg".into()));
        }
        Ok(Self {
            relation,
            span,
            section,
        })
    }
}

/// `Sg_{X×X}(Δ ∪ {0} × K)`.
pub fn clot_relation(x: &AlgebraRef, k: &ElemSet) -> Relation {
    let seeds = x.elements().map(|e| (e, e)).chain(k.iter().map(|e| (0, e)));
    Relation::new_unchecked(x.clone(), x.clone(), generate_pairs(x, x, seeds))
}

/// From a clot `K` of `X` and a surjection `p: X -> Y`, the surjective left
/// split relation `S = (1 × p)(R)` whose zero-class is `p(K)`.
pub fn construct_leftsplit_from_ideal(k: &Subuniverse, p: &Homomorphism) -> Result<LeftSplitSpan> {
    let x = k.parent();
    if !same_algebra(x, p.dom()) {
        return Err(Error::AlgebraMismatch(
            "map does not start at the clot's algebra".into(),
        ));
    }
    if !p.is_surjective() {
        return Err(Error::NotSurjective(format!(
            "image is {}",
            p.cod().display_set(&p.image_set())
        )));
    }
    let r = clot_relation(x, k.members());
    let closure = r.zero_class_set();
    if &closure != k.members() {
        return Err(Error::NotAClot(format!(
            "{} generates the zero-class {}",
            x.display_set(k.members()),
            x.display_set(&closure)
        )));
    }
    let s = Relation::new_unchecked(
        x.clone(),
        p.cod().clone(),
        r.pairs.iter().map(|&(a, b)| (a, p.apply(b))),
    );
    let span = s.to_span()?;
    let section_map = x
        .elements()
        .map(|a| {
            s.pairs
                .binary_search(&(a, p.apply(a)))
                .map_err(|_| Error::Invariant("diagonal pair missing from S".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let section = Homomorphism::new(x.clone(), span.apex().clone(), section_map)
        .map_err(|e| Error::Invariant(format!("constructed section: {e}")))?;
    let split = LeftSplitSpan::new(s, section)?;
    let zc = zero_class(&split.span)?;
    if zc.subset.members() != &p.image_of(k.members()) || !is_surjective(&split.span) {
        return Err(Error::Invariant("left split relation has the wrong zero-class".into()));
    }
    Ok(split)
}

/// The reflexive relation `T` on the apex `R̂` of a surjective relation, its
/// zero-class `K` and the map `q: K -> zero_class(R)`.
#[derive(Clone, Debug)]
pub struct TConstruction {
    pub apex: AlgebraRef,
    pub t: Relation,
    pub kernel: Subuniverse,
    /// `q(k)` for each member `k` of `kernel`, in order.
    pub q: Vec<Elem>,
    pub image: ElemSet,
}

/// `T = {(r₁, r₂) : (first r₁, second r₂) ∈ R}` on the tabulation of `R`.
pub fn construct_t(r: &Relation) -> Result<TConstruction> {
    if !r.is_surjective() {
        return Err(Error::NotSurjective("second projection of the relation".into()));
    }
    let (apex, _, _) = tabulate_pairs(&r.source, &r.target, &r.pairs)?;
    let n = r.pairs.len();
    let mut t = Vec::new();
    for (i, &(x1, _)) in r.pairs.iter().enumerate() {
        for (j, &(_, y2)) in r.pairs.iter().enumerate() {
            if r.contains(x1, y2) {
                t.push((i, j));
            }
        }
    }
    let t = Relation::new(apex.clone(), apex.clone(), t)
        .map_err(|e| Error::Invariant(format!("T is not a relation: {e}")))?;
    if !t.is_reflexive() {
        return Err(Error::Invariant("T is not reflexive".into()));
    }
    let kernel = checked_subuniverse(&apex, t.zero_class_set(), "zero-class of T")?;
    let q: Vec<Elem> = kernel.members().iter().map(|i| r.pairs[i].1).collect();
    let image: ElemSet = q.iter().copied().collect();
    if image != r.zero_class_set() {
        return Err(Error::Invariant("q is not onto the zero-class".into()));
    }
    debug_assert!(kernel.members().iter().all(|i| i < n));
    Ok(TConstruction {
        apex,
        t,
        kernel,
        q,
        image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::sync::Arc;

    fn z4() -> AlgebraRef {
        Arc::new(fixtures::cyclic_group(4))
    }

    fn mod2(z4: &AlgebraRef) -> Relation {
        Relation::new(
            z4.clone(),
            z4.clone(),
            (0..4)
                .flat_map(|x| (0..4).map(move |y| (x, y)))
                .filter(|&(x, y)| (4 + y - x) % 2 == 0),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_and_total() {
        let a = Arc::new(fixtures::three_element_example());
        let d = Relation::diagonal(&a);
        assert_eq!(tabulate(&d.to_span().unwrap()), d);
        assert_eq!(
            zero_class(&d.to_span().unwrap()).unwrap().subset.members(),
            &ElemSet::zero()
        );
        let t = Relation::total(&a, &a).unwrap();
        assert_eq!(
            zero_class(&t.to_span().unwrap()).unwrap().subset.members(),
            &ElemSet::full(3)
        );
    }

    #[test]
    fn zero_map_span() {
        let a = Arc::new(fixtures::three_element_example());
        let s = Span::new(Homomorphism::zero(&a, &a).unwrap(), Homomorphism::identity(&a)).unwrap();
        let r = tabulate(&s);
        assert_eq!(r.pairs(), &[(0, 0), (0, 1), (0, 2)]);
    }

    #[test]
    fn z4_mod2_relation() {
        let z = z4();
        let r = mod2(&z);
        assert_eq!(r.len(), 8);
        let s = r.to_span().unwrap();
        let zc = zero_class(&s).unwrap();
        assert_eq!(zc.subset.members(), &ElemSet::new([0, 2]));
        assert_eq!(normalisation(&s).unwrap().members(), &ElemSet::new([0, 2]));
        assert_eq!(zero_class_via_pullback(&s).unwrap(), zc);
        for (j, y) in zc.subset.members().iter().enumerate() {
            assert_eq!(s.left().apply(zc.lifting[j]), 0);
            assert_eq!(s.right().apply(zc.lifting[j]), y);
        }
    }

    #[test]
    fn non_closed_relation_rejected() {
        let z = z4();
        assert!(matches!(
            Relation::new(z.clone(), z, [(0, 0), (1, 1)]),
            Err(Error::NotClosed(_))
        ));
    }

    #[test]
    fn pullbacks() {
        let z = z4();
        let id = Homomorphism::identity(&z);
        let pb = pullback(&id, &id).unwrap();
        assert_eq!(pb.pairs, (0..4).map(|x| (x, x)).collect::<Vec<_>>());
        let z2 = Arc::new(fixtures::cyclic_group(2));
        let one = Arc::new(crate::algebra::FiniteAlgebra::trivial(z2.signature().clone()));
        let bang = Homomorphism::zero(&z2, &one).unwrap();
        assert_eq!(pullback(&bang, &bang).unwrap().algebra.size(), 4);
    }

    #[test]
    fn images() {
        let z = z4();
        let double = Homomorphism::new(z.clone(), z.clone(), vec![0, 2, 0, 2]).unwrap();
        assert_eq!(image(&double).unwrap().members(), &ElemSet::new([0, 2]));
        assert_eq!(image(&Homomorphism::identity(&z)).unwrap().members(), &ElemSet::full(4));
        assert_eq!(
            image(&Homomorphism::zero(&z, &z).unwrap()).unwrap().members(),
            &ElemSet::zero()
        );
    }

    #[test]
    fn composition_of_graphs() {
        let z = z4();
        let z2 = Arc::new(fixtures::cyclic_group(2));
        let f = Homomorphism::new(z.clone(), z.clone(), vec![0, 2, 0, 2]).unwrap();
        let g = Homomorphism::new(z.clone(), z2.clone(), vec![0, 1, 0, 1]).unwrap();
        let fg = rel_compose(&Relation::graph(&f), &Relation::graph(&g)).unwrap();
        assert_eq!(fg, Relation::graph(&f.then(&g).unwrap()));
        let r = mod2(&z);
        assert_eq!(rel_compose(&Relation::diagonal(&z), &r).unwrap(), r);
        let s = rel_compose(&r, &Relation::graph(&g)).unwrap();
        assert!(s.is_surjective());
        assert_eq!(s.zero_class_set(), ElemSet::zero());
    }

    #[test]
    fn left_splittings() {
        let z = z4();
        let r = mod2(&z);
        let e = find_left_splitting(&r.to_span().unwrap()).unwrap().unwrap();
        let span = r.to_span().unwrap();
        for x in 0..4 {
            assert_eq!(span.left().apply(e.apply(x)), x);
        }
        let z2 = Arc::new(fixtures::cyclic_group(2));
        let g = Homomorphism::new(z.clone(), z2.clone(), vec![0, 1, 0, 1]).unwrap();
        let conv = Relation::graph(&g).converse();
        assert!(find_left_splitting(&conv.to_span().unwrap()).unwrap().is_none());
    }

    #[test]
    fn leftsplit_from_clot() {
        let z = z4();
        let k = Subuniverse::new(z.clone(), ElemSet::new([0, 2])).unwrap();
        let split = construct_leftsplit_from_ideal(&k, &Homomorphism::identity(&z)).unwrap();
        assert_eq!(split.relation, mod2(&z));
        let z2 = Arc::new(fixtures::cyclic_group(2));
        let g = Homomorphism::new(z.clone(), z2, vec![0, 1, 0, 1]).unwrap();
        let split = construct_leftsplit_from_ideal(&k, &g).unwrap();
        assert_eq!(split.relation.zero_class_set(), ElemSet::zero());
        assert!(split.relation.is_surjective());
    }

    #[test]
    fn non_clot_rejected() {
        let a = Arc::new(fixtures::three_element_example());
        let c = Subuniverse::new(a.clone(), fixtures::example_subset()).unwrap();
        assert!(matches!(
            construct_leftsplit_from_ideal(&c, &Homomorphism::identity(&a)),
            Err(Error::NotAClot(_))
        ));
    }

    #[test]
    fn t_construction_on_diagonal_and_total() {
        let a = Arc::new(fixtures::three_element_example());
        let t = construct_t(&Relation::diagonal(&a)).unwrap();
        assert_eq!(t.kernel.members(), &ElemSet::zero());
        assert_eq!(t.image, ElemSet::zero());
        // Every (x,y) has (0,y) in the total relation, so K is the whole apex.
        let t = construct_t(&Relation::total(&a, &a).unwrap()).unwrap();
        assert_eq!(t.kernel.len(), 9);
        assert_eq!(t.image, ElemSet::full(3));
    }
}
