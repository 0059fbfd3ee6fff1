//! Where a subalgebra sits in the chain kernel ⊆ normal ⊆ clot ⊆ ideal.
//!
//! Kernel, normal and clot are decided exactly. Ideals get a three-valued
//! verdict: a surjective relation `R ⊆ B × A` with zero-class `I` certifies,
//! an escaping ideal-term instance refutes, and otherwise the answer is
//! unknown at the given bounds.

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{
    closure_escape, product, quotient, same_algebra, AlgebraRef, Elem, ElemSet, Escape, FiniteAlgebra, Homomorphism,
    Quotient, Subuniverse,
};
use crate::closure::{generate_congruence, generate_pairs, list_congruences, Congruence, Fixpoint, Origin, PairOps};
use crate::error::{Error, Result};
use crate::ideal_terms::{refute_ideal, IdealWitness, SearchStats, TermBounds};
use crate::search::HomSearch;
use crate::span::{construct_leftsplit_from_ideal, rel_compose, Relation};
use crate::term::Term;
use crate::variety::{IdentityCheck, Variety};

/// Largest `|A|²` for which quotients of `A × A` join the default pool.
pub const POOL_SQUARE_GUARD: usize = 16;

/// Most two-element algebras added to the default pool.
pub const POOL_TWO_ELEMENT_CAP: usize = 4096;

/// Largest `|A|²` for exhaustive endorelation search.
pub const ENDORELATION_GUARD: usize = 20;

#[derive(Clone, Debug)]
pub struct NormalCheck {
    pub holds: bool,
    /// The least congruence with `{0} × I` in its zero block.
    pub congruence: Congruence,
}

/// `θ = Cg({0} × I)`; `I` is normal iff the block of 0 is exactly `I`.
pub fn is_normal(sub: &Subuniverse) -> NormalCheck {
    let pairs: Vec<(Elem, Elem)> = sub.members().iter().map(|i| (0, i)).collect();
    let congruence = generate_congruence(sub.parent(), &pairs);
    NormalCheck {
        holds: &congruence.zero_block() == sub.members(),
        congruence,
    }
}

#[derive(Clone, Debug)]
pub struct KernelCheck {
    pub holds: bool,
    /// Quotient by the congruence of [`is_normal`]; when `holds`, `I` is the
    /// kernel of its projection.
    pub quotient: Quotient,
}

pub fn is_kernel(sub: &Subuniverse) -> Result<KernelCheck> {
    let normal = is_normal(sub);
    let q = quotient(sub.parent(), &normal.congruence)?;
    Ok(KernelCheck {
        holds: &q.projection.kernel_set() == sub.members(),
        quotient: q,
    })
}

/// Zero-class of `Sg_{A×A}(Δ ∪ {0} × X)`.
pub fn clot_closure(a: &AlgebraRef, x: &ElemSet) -> Subuniverse {
    let seeds = a.elements().map(|e| (e, e)).chain(x.iter().map(|e| (0, e)));
    let zc: ElemSet = generate_pairs(a, a, seeds)
        .into_iter()
        .filter(|p| p.0 == 0)
        .map(|p| p.1)
        .collect();
    Subuniverse::new(a.clone(), zc).expect("zero-class of a relation is closed")
}

#[derive(Clone, Debug)]
pub struct ClotCheck {
    pub holds: bool,
    pub closure: ElemSet,
    /// `Sg_{A×A}(Δ ∪ {0} × K)`, whose zero-class is `closure`.
    pub relation: Relation,
    /// When `holds` is false: a term `t` with `t(a⃗, 0⃗) = 0` in `A` and
    /// `t(a⃗, k⃗) ∉ K` for `k⃗` in `K`.
    pub witness: Option<IdealWitness>,
}

/// Decides whether `K` is a clot, reading a violating term instance off the
/// first generated pair `(0, v)` with `v ∉ K`.
pub fn is_clot(sub: &Subuniverse) -> ClotCheck {
    let a = sub.parent();
    let n = a.size();
    let k = sub.members();
    let seeds: Vec<(Elem, Elem)> = a.elements().map(|e| (e, e)).chain(k.iter().map(|e| (0, e))).collect();
    let mut fp = Fixpoint::new(PairOps { left: a, right: a }, seeds.iter().copied());
    fp.run();
    let escape = fp.elements().iter().position(|&(x, y)| x == 0 && !k.contains(y));
    let witness = escape.map(|i| unfold_witness(a, fp.origins(), fp.elements(), &seeds, n, i));
    let relation = Relation::new_unchecked(a.clone(), a.clone(), fp.elements().iter().copied());
    let closure = relation.zero_class_set();
    ClotCheck {
        holds: &closure == k,
        closure,
        relation,
        witness,
    }
}

fn unfold_witness(
    a: &FiniteAlgebra,
    origins: &[Origin],
    elements: &indexmap::IndexSet<(Elem, Elem)>,
    seeds: &[(Elem, Elem)],
    n: usize,
    target: usize,
) -> IdealWitness {
    // Leaves are diagonal seeds (parameters) and {0}×K seeds (arguments),
    // numbered in order of first use.
    fn collect(origins: &[Origin], i: usize, n: usize, xs: &mut Vec<usize>, ys: &mut Vec<usize>) {
        match &origins[i] {
            Origin::Zero => {}
            Origin::Seed(p) => {
                let list = if *p < n { xs } else { ys };
                if !list.contains(p) {
                    list.push(*p);
                }
            }
            Origin::Apply { args, .. } => {
                for &j in args {
                    collect(origins, j, n, xs, ys);
                }
            }
        }
    }
    fn build(origins: &[Origin], i: usize, n: usize, xs: &[usize], ys: &[usize]) -> Term {
        match &origins[i] {
            Origin::Zero => Term::Zero,
            Origin::Seed(p) if *p < n => Term::Var(xs.iter().position(|q| q == p).expect("collected")),
            Origin::Seed(p) => Term::Var(xs.len() + ys.iter().position(|q| q == p).expect("collected")),
            Origin::Apply { op, args } => Term::App(*op, args.iter().map(|&j| build(origins, j, n, xs, ys)).collect()),
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    collect(origins, target, n, &mut xs, &mut ys);
    let term = build(origins, target, n, &xs, &ys);
    let witness = IdealWitness {
        term,
        x_vars: xs.len(),
        y_vars: ys.len(),
        params: xs.iter().map(|&p| seeds[p].1).collect(),
        args: ys.iter().map(|&p| seeds[p].1).collect(),
        value: elements[target].1,
    };
    debug_assert_eq!(witness.term.eval(a, &witness.assignment()), witness.value);
    witness
}

/// Whether `w` is a clot violation for `K`: `t(a⃗, 0⃗) = 0`, `k⃗ ⊆ K` and
/// `t(a⃗, k⃗) = value ∉ K`.
pub fn check_clot_witness(a: &FiniteAlgebra, k: &ElemSet, w: &IdealWitness) -> bool {
    let mut zeroed = w.params.clone();
    zeroed.extend(std::iter::repeat_n(0, w.y_vars));
    w.params.len() == w.x_vars
        && w.args.len() == w.y_vars
        && w.term.var_bound() <= w.x_vars + w.y_vars
        && w.args.iter().all(|&x| k.contains(x))
        && w.term.eval(a, &zeroed) == 0
        && w.term.eval(a, &w.assignment()) == w.value
        && !k.contains(w.value)
}

/// Whether `w` refutes `I` being an ideal in `v`: `t(x⃗, 0⃗) = 0` holds in
/// `v`, the arguments lie in `I`, and the value does not.
pub fn check_ideal_witness(a: &FiniteAlgebra, i: &ElemSet, v: &Variety, w: &IdealWitness) -> Result<IdentityCheck> {
    let v = v.adapt(a.signature())?;
    let ok = w.params.len() == w.x_vars
        && w.args.len() == w.y_vars
        && w.term.var_bound() <= w.x_vars + w.y_vars
        && w.args.iter().all(|&x| i.contains(x))
        && w.term.eval(a, &w.assignment()) == w.value
        && !i.contains(w.value);
    if !ok {
        return Ok(IdentityCheck::Unknown("instance does not escape".into()));
    }
    Ok(v.identity_holds(&w.vanishing_side(), &Term::Zero))
}

/// How a certificate was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateOrigin {
    /// The subset is a clot of `A`; `B = A`.
    Clot,
    /// Found by search over the pool entry with this index.
    Pool(usize),
    /// Image of a clot of `B` along a surjection `B -> A`.
    ClotImage {
        pool_index: usize,
        clot: ElemSet,
        surjection: Vec<Elem>,
    },
}

/// A surjective relation `R ⊆ B × A` whose zero-class is `I`.
#[derive(Clone, Debug)]
pub struct IdealCertificate {
    pub b: AlgebraRef,
    pub relation: Relation,
    pub origin: CertificateOrigin,
}

/// Checks that `r` goes into `a`, is surjective and has zero-class `i`.
pub fn check_certificate(a: &AlgebraRef, i: &ElemSet, r: &Relation) -> Result<()> {
    if !same_algebra(r.target(), a) {
        return Err(Error::AlgebraMismatch("certificate targets another algebra".into()));
    }
    let regenerated = Relation::new(r.source().clone(), r.target().clone(), r.pairs().iter().copied())?;
    if &regenerated != r {
        return Err(Error::NotClosed("certificate".into()));
    }
    if !r.is_surjective() {
        return Err(Error::NotSurjective("certificate does not cover the algebra".into()));
    }
    let zc = r.zero_class_set();
    if &zc != i {
        return Err(Error::Invariant(format!(
            "certificate has zero-class {} instead of {}",
            a.display_set(&zc),
            a.display_set(i)
        )));
    }
    Ok(())
}

/// Least certificate inside `B × A`, or `None` if there is none.
///
/// Any certificate contains `{0} × I` and, for each `a ∉ I`, some `(b_a, a)`
/// with `b_a ≠ 0`; the subalgebra generated by those pairs is again a
/// certificate. So it suffices to search over the choices `b_a`, pruning as
/// soon as the generated zero-class leaves `I`. The search is complete.
pub fn certificate_in(b: &AlgebraRef, a: &AlgebraRef, i: &ElemSet) -> Result<Option<Relation>> {
    crate::algebra::require_same_signature(b, a)?;
    let base: Vec<(Elem, Elem)> = i.iter().map(|x| (0, x)).collect();
    let outside: Vec<Elem> = a.elements().filter(|&x| !i.contains(x)).collect();

    fn dfs(
        b: &FiniteAlgebra,
        a: &FiniteAlgebra,
        i: &ElemSet,
        outside: &[Elem],
        seeds: &mut Vec<(Elem, Elem)>,
    ) -> Option<Vec<(Elem, Elem)>> {
        let pairs = generate_pairs(b, a, seeds.iter().copied());
        if pairs.iter().any(|&(x, y)| x == 0 && !i.contains(y)) {
            return None;
        }
        let mut covered = vec![false; a.size()];
        for &(_, y) in &pairs {
            covered[y] = true;
        }
        let Some(&next) = outside.iter().find(|&&y| !covered[y]) else {
            return Some(pairs);
        };
        for choice in 1..b.size() {
            seeds.push((choice, next));
            let found = dfs(b, a, i, outside, seeds);
            seeds.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    let mut seeds = base;
    Ok(dfs(b, a, i, &outside, &mut seeds).map(|pairs| Relation::new_unchecked(b.clone(), a.clone(), pairs)))
}

#[derive(Clone, Debug)]
pub struct CertifyOutcome {
    pub certificate: Option<IdealCertificate>,
    pub pool_size: usize,
    /// Pool entries skipped, with the reason (wrong signature, or a rule of
    /// the presented variety fails in them).
    pub skipped: Vec<(usize, String)>,
}

fn pool_entry_problem(b: &FiniteAlgebra, a: &FiniteAlgebra, v: &Variety) -> Option<String> {
    if b.signature() != a.signature() {
        return Some("signature differs".into());
    }
    match v.model_violation(b) {
        Ok(None) => None,
        Ok(Some((rule, _))) => Some(format!("rule {} fails", rule + 1)),
        Err(e) => Some(e.to_string()),
    }
}

/// Searches the pool in order and returns the certificate from the first
/// entry that has one; entries are searched in parallel.
pub fn certify_ideal(a: &AlgebraRef, i: &ElemSet, v: &Variety, pool: &[AlgebraRef]) -> Result<CertifyOutcome> {
    let v = v.adapt(a.signature())?;
    let problems: Vec<Option<String>> = pool.iter().map(|b| pool_entry_problem(b, a, &v)).collect();
    let found = pool
        .par_iter()
        .enumerate()
        .filter(|(idx, _)| problems[*idx].is_none())
        .map(|(idx, b)| certificate_in(b, a, i).map(|r| r.map(|r| (idx, r))))
        .find_map_first(|res| match res {
            Ok(Some(x)) => Some(Ok(x)),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        })
        .transpose()?;
    let certificate = found.map(|(idx, relation)| IdealCertificate {
        b: pool[idx].clone(),
        relation,
        origin: CertificateOrigin::Pool(idx),
    });
    let skipped = problems
        .into_iter()
        .enumerate()
        .filter_map(|(idx, p)| p.map(|p| (idx, p)))
        .collect();
    Ok(CertifyOutcome {
        certificate,
        pool_size: pool.len(),
        skipped,
    })
}

/// Certificates of the form `f ∘ S` for a surjection `f: B -> A` and a
/// clot `K` of `B` with `f(K) = I`, where `S` is the reflexive relation of
/// `K`. Tries surjections and clots in lexicographic order.
pub fn certificate_from_clot_image(
    b: &AlgebraRef,
    a: &AlgebraRef,
    i: &ElemSet,
    pool_index: usize,
) -> Result<Option<IdealCertificate>> {
    let homs = HomSearch::new(b, a)?.run(usize::MAX).solutions;
    for map in homs {
        let f = Homomorphism::new(b.clone(), a.clone(), map)?;
        if !f.is_surjective() {
            continue;
        }
        let pre = f.preimage_of(i);
        // Clots K with f(K) = I lie inside f⁻¹(I); enumerate those subsets.
        let members = pre.as_slice();
        if members.len() > crate::closure::DEFAULT_SUBSET_GUARD {
            return Err(Error::SizeGuard("preimage too large for clot enumeration".into()));
        }
        for mask in 0..(1u64 << members.len()) {
            let k: ElemSet = members
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .map(|(_, &x)| x)
                .collect();
            if !k.contains(0) || closure_escape(b, &k).is_some() || f.image_of(&k) != *i {
                continue;
            }
            let check = is_clot(&Subuniverse::new(b.clone(), k.clone())?);
            if !check.holds {
                continue;
            }
            let relation = rel_compose(&check.relation, &Relation::graph(&f))?;
            check_certificate(a, i, &relation)?;
            return Ok(Some(IdealCertificate {
                b: b.clone(),
                relation,
                origin: CertificateOrigin::ClotImage {
                    pool_index,
                    clot: k,
                    surjection: f.map().to_vec(),
                },
            }));
        }
    }
    Ok(None)
}

/// All two-element algebras of the signature, in lexicographic order of
/// their tables, with elements named `0` and `b`.
pub fn two_element_algebras(sig: &Arc<crate::algebra::Signature>, cap: usize) -> Result<Vec<FiniteAlgebra>> {
    let free_cells: Vec<usize> = sig.ops().iter().map(|o| (1usize << o.arity) - 1).collect();
    let total: usize = free_cells.iter().sum();
    if total >= usize::BITS as usize || (1usize << total) > cap {
        return Err(Error::SizeGuard(format!(
            "{} two-element algebras exceed the cap of {cap}",
            1u128 << total.min(127)
        )));
    }
    let mut out = Vec::with_capacity(1 << total);
    for code in 0..(1usize << total) {
        let mut bit = total;
        let tables = free_cells
            .iter()
            .map(|&cells| {
                std::iter::once(0)
                    .chain((0..cells).map(|_| {
                        bit -= 1;
                        code >> bit & 1
                    }))
                    .collect()
            })
            .collect();
        let alg = FiniteAlgebra::new(sig.clone(), 2, tables)?.with_names(vec!["0".into(), "b".into()])?;
        out.push(alg);
    }
    Ok(out)
}

/// `A`, then the two-element models of a presented variety, then the
/// quotients of `A × A` by its congruences other than the total one
/// (finest first) when `|A|²` is at most [`POOL_SQUARE_GUARD`].
pub fn default_pool(a: &AlgebraRef, v: &Variety) -> Result<Vec<AlgebraRef>> {
    let v = v.adapt(a.signature())?;
    let mut pool = vec![a.clone()];
    if let Variety::Presented(_) = v {
        if let Ok(algs) = two_element_algebras(a.signature(), POOL_TWO_ELEMENT_CAP) {
            for b in algs {
                if v.model_violation(&b)?.is_none() {
                    pool.push(Arc::new(b));
                }
            }
        }
    }
    if a.size() * a.size() <= POOL_SQUARE_GUARD && a.size() > 1 {
        let sq = product(a, a)?;
        for theta in list_congruences(&sq.algebra, POOL_SQUARE_GUARD)? {
            if theta.block_count() > 1 {
                pool.push(quotient(&sq.algebra, &theta)?.algebra);
            }
        }
    }
    Ok(pool)
}

#[derive(Clone, Debug)]
pub struct EndorelationReport {
    pub candidates: u64,
    pub closed: u64,
    pub surjective: u64,
    /// Closed, surjective relations on `A` with zero-class `I`, in order of
    /// their membership bitmask.
    pub matching: Vec<Relation>,
}

/// Exhaustively checks every subset of `A × A`.
pub fn endorelation_search(a: &AlgebraRef, i: &ElemSet) -> Result<EndorelationReport> {
    let n = a.size();
    let cells = n * n;
    if cells > ENDORELATION_GUARD {
        return Err(Error::SizeGuard(format!(
            "{cells} pairs exceed the endorelation guard of {ENDORELATION_GUARD}"
        )));
    }
    let pair_of = |bit: usize| (bit / n, bit % n);
    let results: Vec<(bool, bool, bool)> = (0..1u64 << cells)
        .into_par_iter()
        .map(|mask| {
            let has = |x: Elem, y: Elem| mask >> (x * n + y) & 1 == 1;
            if !has(0, 0) {
                return (false, false, false);
            }
            let members: Vec<(Elem, Elem)> = (0..cells).filter(|&b| mask >> b & 1 == 1).map(pair_of).collect();
            let mut closed = true;
            'ops: for op in 0..a.signature().len() {
                let k = a.signature().arity(op);
                let mut l = vec![0; k];
                let mut r = vec![0; k];
                let flow = crate::algebra::for_each_tuple(&vec![members.len(); k], |t| {
                    for (p, &m) in t.iter().enumerate() {
                        l[p] = members[m].0;
                        r[p] = members[m].1;
                    }
                    if has(a.apply(op, &l), a.apply(op, &r)) {
                        std::ops::ControlFlow::Continue(())
                    } else {
                        std::ops::ControlFlow::Break(())
                    }
                });
                if flow.is_break() {
                    closed = false;
                    break 'ops;
                }
            }
            if !closed {
                return (false, false, false);
            }
            let surjective = (0..n).all(|y| (0..n).any(|x| has(x, y)));
            let zero_class = surjective && (0..n).all(|y| has(0, y) == i.contains(y));
            (true, surjective, zero_class)
        })
        .collect();
    let mut report = EndorelationReport {
        candidates: 1 << cells,
        closed: 0,
        surjective: 0,
        matching: Vec::new(),
    };
    for (mask, &(closed, surjective, matching)) in results.iter().enumerate() {
        report.closed += closed as u64;
        report.surjective += surjective as u64;
        if matching {
            let pairs = (0..cells).filter(|&b| mask >> b & 1 == 1).map(pair_of);
            report
                .matching
                .push(Relation::new_unchecked(a.clone(), a.clone(), pairs));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub enum IdealVerdict {
    NotASubuniverse,
    Certified(IdealCertificate),
    Refuted {
        witness: IdealWitness,
        evidence: IdentityCheck,
    },
    Unknown {
        pool_size: usize,
    },
}

impl IdealVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            IdealVerdict::NotASubuniverse => "not-a-subuniverse",
            IdealVerdict::Certified(_) => "certified",
            IdealVerdict::Refuted { .. } => "refuted",
            IdealVerdict::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ClassifyOptions {
    pub bounds: TermBounds,
    /// `None` selects [`default_pool`].
    pub pool: Option<Vec<AlgebraRef>>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub algebra: AlgebraRef,
    pub subset: ElemSet,
    /// `None` when the subset is a subuniverse.
    pub escape: Option<Escape>,
    pub normal: Option<NormalCheck>,
    pub kernel: Option<KernelCheck>,
    pub clot: Option<ClotCheck>,
    pub ideal: IdealVerdict,
    pub refutation: Option<SearchStats>,
}

impl Verdict {
    pub fn is_subuniverse(&self) -> bool {
        self.escape.is_none()
    }

    pub fn is_normal(&self) -> bool {
        self.normal.as_ref().is_some_and(|c| c.holds)
    }

    pub fn is_kernel(&self) -> bool {
        self.kernel.as_ref().is_some_and(|c| c.holds)
    }

    pub fn is_clot(&self) -> bool {
        self.clot.as_ref().is_some_and(|c| c.holds)
    }
}

/// Runs every check on `S ⊆ A`. Clots are certified directly by their
/// reflexive relation; for other subuniverses the refutation search runs
/// first and the pool search only if it finds nothing.
pub fn classify(a: &AlgebraRef, subset: &ElemSet, v: &Variety, options: &ClassifyOptions) -> Result<Verdict> {
    if let Some(e) = subset.iter().find(|&e| e >= a.size()) {
        return Err(Error::NotASubuniverse(format!("element {e} out of range")));
    }
    let v = v.adapt(a.signature())?;
    let mut verdict = Verdict {
        algebra: a.clone(),
        subset: subset.clone(),
        escape: closure_escape(a, subset),
        normal: None,
        kernel: None,
        clot: None,
        ideal: IdealVerdict::NotASubuniverse,
        refutation: None,
    };
    if verdict.escape.is_some() {
        return Ok(verdict);
    }
    let sub = Subuniverse::new(a.clone(), subset.clone())?;
    let normal = is_normal(&sub);
    let kernel = is_kernel(&sub)?;
    let clot = is_clot(&sub);
    if normal.holds != kernel.holds {
        return Err(Error::Invariant("kernel and normal verdicts differ".into()));
    }
    if normal.holds && !clot.holds {
        return Err(Error::Invariant("normal subalgebra is not a clot".into()));
    }
    if let Some(w) = &clot.witness {
        if !check_clot_witness(a, subset, w) {
            return Err(Error::Invariant("clot witness does not replay".into()));
        }
    }
    verdict.ideal = if clot.holds {
        let split = construct_leftsplit_from_ideal(&sub, &Homomorphism::identity(a))?;
        IdealVerdict::Certified(IdealCertificate {
            b: a.clone(),
            relation: split.relation,
            origin: CertificateOrigin::Clot,
        })
    } else {
        let refuted = refute_ideal(a, subset, &v, &options.bounds)?;
        verdict.refutation = Some(refuted.stats);
        match refuted.witness {
            Some(witness) => {
                let evidence = check_ideal_witness(a, subset, &v, &witness)?;
                if !evidence.holds() {
                    return Err(Error::Invariant("ideal-term witness does not replay".into()));
                }
                IdealVerdict::Refuted { witness, evidence }
            }
            None => {
                let pool = match &options.pool {
                    Some(p) => p.clone(),
                    None => default_pool(a, &v)?,
                };
                let out = certify_ideal(a, subset, &v, &pool)?;
                match out.certificate {
                    Some(c) => IdealVerdict::Certified(c),
                    None => IdealVerdict::Unknown { pool_size: pool.len() },
                }
            }
        }
    };
    if let IdealVerdict::Certified(c) = &verdict.ideal {
        check_certificate(a, subset, &c.relation)
            .map_err(|e| Error::Invariant(format!("certificate does not replay: {e}")))?;
    }
    verdict.normal = Some(normal);
    verdict.kernel = Some(kernel);
    verdict.clot = Some(clot);
    Ok(verdict)
}
