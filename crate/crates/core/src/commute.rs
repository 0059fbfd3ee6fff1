//! Commutators in the sense of connectors: cooperators of cospans,
//! connectors of left split spans and of reflexive relations, and the
//! abelian group structure read off a connector of `(∇, ∇)`.
//!
//! A connector is found by generating, inside `P × D`, the subalgebra on the
//! pairs `(e₁ a, α a)` and `(e₂ c, γ c)`. A total single-valued result is the
//! only candidate; two values for one point of `P` rule every candidate out;
//! a partial graph is completed by homomorphism search.

use std::sync::Arc;

use crate::algebra::{product, same_algebra, AlgebraRef, Elem, ElemSet, FiniteAlgebra, Homomorphism, Subuniverse};
use crate::classify::{classify, ClassifyOptions, Verdict};
use crate::closure::{Fixpoint, Origin, PairOps};
use crate::error::{Error, Result};
use crate::search::HomSearch;
use crate::span::{pullback, Relation};
use crate::term::Term;
use crate::variety::Variety;

/// Node budget for completing a partial connector graph.
pub const DEFAULT_EXTENSION_BUDGET: u64 = 10_000_000;

/// Most distinct completions counted.
pub const MAX_COUNTED_SOLUTIONS: usize = 16;

#[derive(Clone, Debug)]
pub struct Connector {
    /// The pullback (or product) algebra; element `i` is `pairs[i]`.
    pub domain: AlgebraRef,
    pub pairs: Vec<(Elem, Elem)>,
    pub map: Homomorphism,
    /// True when generation alone produced a total graph.
    pub determined_by_generation: bool,
    /// Completions found, capped at [`MAX_COUNTED_SOLUTIONS`]; `map` is the
    /// lexicographically first.
    pub solutions: usize,
}

impl Connector {
    pub fn value(&self, a: Elem, c: Elem) -> Option<Elem> {
        self.pairs.binary_search(&(a, c)).ok().map(|i| self.map.apply(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// `α r b ≠ γ s b`.
    BetaMismatch { b: Elem, via_r: Elem, via_s: Elem },
    /// The generated graph sends `point` to two values. The derivations are
    /// terms over the seeds, named by [`seed_names`](ConnectorResult::seed_names).
    Conflict {
        point: (Elem, Elem),
        first: Elem,
        second: Elem,
        derivations: (Term, Term),
    },
    /// The generated graph is single-valued but has no homomorphic completion.
    NoExtension { assigned: usize, total: usize, nodes: u64 },
}

#[derive(Clone, Debug)]
pub enum ConnectorStatus {
    Found(Connector),
    NoneExists(Obstruction),
    Unknown { assigned: usize, total: usize, nodes: u64 },
}

#[derive(Clone, Debug)]
pub struct ConnectorResult {
    pub status: ConnectorStatus,
    /// `α r = γ s`, when it exists.
    pub beta: Option<Homomorphism>,
    /// Names of the generating seeds, as used in conflict derivations:
    /// `e1(a)` and `e2(c)`.
    pub seed_names: Vec<String>,
    /// The generating pairs `(e₁ a, α a)` and `(e₂ c, γ c)`, with points of
    /// the pullback given by index into `domain`.
    pub seeds: Vec<(Elem, Elem)>,
    /// The pullback (or product) and its points as pairs; absent when the
    /// `β` check already failed.
    pub domain: Option<(AlgebraRef, Vec<(Elem, Elem)>)>,
}

impl ConnectorResult {
    pub fn label(&self) -> &'static str {
        match self.status {
            ConnectorStatus::Found(_) => "found",
            ConnectorStatus::NoneExists(_) => "none",
            ConnectorStatus::Unknown { .. } => "unknown",
        }
    }

    pub fn connector(&self) -> Option<&Connector> {
        match &self.status {
            ConnectorStatus::Found(c) => Some(c),
            _ => None,
        }
    }
}

struct Setup<'a> {
    domain: AlgebraRef,
    pairs: Vec<(Elem, Elem)>,
    e1: Vec<Elem>,
    e2: Vec<Elem>,
    alpha: &'a Homomorphism,
    gamma: &'a Homomorphism,
    d: AlgebraRef,
    budget: u64,
}

fn term_of(origins: &[Origin], i: usize) -> Term {
    match &origins[i] {
        Origin::Zero => Term::Zero,
        Origin::Seed(j) => Term::Var(*j),
        Origin::Apply { op, args } => Term::App(*op, args.iter().map(|&a| term_of(origins, a)).collect()),
    }
}

struct Run {
    status: ConnectorStatus,
    seed_names: Vec<String>,
    seeds: Vec<(Elem, Elem)>,
    domain: (AlgebraRef, Vec<(Elem, Elem)>),
}

fn run_connector(s: Setup<'_>) -> Result<Run> {
    let a = s.alpha.dom();
    let c = s.gamma.dom();
    let seeds: Vec<(Elem, Elem)> = a
        .elements()
        .map(|x| (s.e1[x], s.alpha.apply(x)))
        .chain(c.elements().map(|x| (s.e2[x], s.gamma.apply(x))))
        .collect();
    let seed_names: Vec<String> = a
        .elements()
        .map(|x| format!("e1({})", a.element_name(x)))
        .chain(c.elements().map(|x| format!("e2({})", c.element_name(x))))
        .collect();
    let mut fp = Fixpoint::new(
        PairOps {
            left: &s.domain,
            right: &s.d,
        },
        seeds.iter().copied(),
    );
    let finish = |status: ConnectorStatus| Run {
        status,
        seed_names: seed_names.clone(),
        seeds: seeds.clone(),
        domain: (s.domain.clone(), s.pairs.clone()),
    };
    fp.run();
    let mut value: Vec<Option<(Elem, usize)>> = vec![None; s.domain.size()];
    for (i, &(p, v)) in fp.elements().iter().enumerate() {
        match value[p] {
            None => value[p] = Some((v, i)),
            Some((w, j)) => {
                let obstruction = Obstruction::Conflict {
                    point: s.pairs[p],
                    first: w,
                    second: v,
                    derivations: (term_of(fp.origins(), j), term_of(fp.origins(), i)),
                };
                return Ok(finish(ConnectorStatus::NoneExists(obstruction)));
            }
        }
    }
    let assigned = value.iter().filter(|v| v.is_some()).count();
    let total = s.domain.size();
    if assigned == total {
        let map = value.into_iter().map(|v| v.expect("total").0).collect();
        let map = Homomorphism::new(s.domain.clone(), s.d.clone(), map)
            .map_err(|e| Error::Invariant(format!("generated graph: {e}")))?;
        let connector = Connector {
            domain: s.domain.clone(),
            pairs: s.pairs.clone(),
            map,
            determined_by_generation: true,
            solutions: 1,
        };
        return Ok(finish(ConnectorStatus::Found(connector)));
    }
    let mut search = HomSearch::new(&s.domain, &s.d)?.with_budget(s.budget);
    for (p, v) in value.iter().enumerate() {
        if let Some((v, _)) = v {
            search = search.restrict(p, vec![*v])?;
        }
    }
    let out = search.run(MAX_COUNTED_SOLUTIONS);
    let status = match out.solutions.first() {
        Some(first) => ConnectorStatus::Found(Connector {
            map: Homomorphism::new(s.domain.clone(), s.d.clone(), first.clone())?,
            domain: s.domain.clone(),
            pairs: s.pairs.clone(),
            determined_by_generation: false,
            solutions: out.solutions.len(),
        }),
        None if out.complete => ConnectorStatus::NoneExists(Obstruction::NoExtension {
            assigned,
            total,
            nodes: out.nodes,
        }),
        None => ConnectorStatus::Unknown {
            assigned,
            total,
            nodes: out.nodes,
        },
    };
    Ok(finish(status))
}

/// The cooperator of `α: A -> D` and `γ: C -> D`: a map `φ: A × C -> D` with
/// `φ(a, 0) = α a` and `φ(0, c) = γ c`.
pub fn huq_commute(alpha: &Homomorphism, gamma: &Homomorphism, budget: u64) -> Result<ConnectorResult> {
    if !same_algebra(alpha.cod(), gamma.cod()) {
        return Err(Error::MalformedDiagram("the maps have different codomains".into()));
    }
    let (a, c) = (alpha.dom(), gamma.dom());
    let p = product(a, c)?;
    let pairs = (0..p.algebra.size()).map(|i| p.split(i)).collect();
    let run = run_connector(Setup {
        e1: a.elements().map(|x| p.pair(x, 0)).collect(),
        e2: c.elements().map(|y| p.pair(0, y)).collect(),
        domain: p.algebra.clone(),
        pairs,
        alpha,
        gamma,
        d: alpha.cod().clone(),
        budget,
    })?;
    Ok(ConnectorResult {
        status: run.status,
        beta: Some(Homomorphism::zero(
            &FiniteAlgebra::trivial(a.signature().clone()).into(),
            alpha.cod(),
        )?),
        seed_names: run.seed_names,
        seeds: run.seeds,
        domain: Some(run.domain),
    })
}

/// Two left split spans from `B` to `D`: `f: A -> B` split by `r`, `α: A -> D`,
/// and `g: C -> B` split by `s`, `γ: C -> D`.
#[derive(Clone, Debug)]
pub struct LeftSplitSpanPair {
    pub f: Homomorphism,
    pub r: Homomorphism,
    pub alpha: Homomorphism,
    pub g: Homomorphism,
    pub s: Homomorphism,
    pub gamma: Homomorphism,
}

impl LeftSplitSpanPair {
    pub fn new(
        f: Homomorphism,
        r: Homomorphism,
        alpha: Homomorphism,
        g: Homomorphism,
        s: Homomorphism,
        gamma: Homomorphism,
    ) -> Result<Self> {
        let pair = Self {
            f,
            r,
            alpha,
            g,
            s,
            gamma,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            f,
            r,
            alpha,
            g,
            s,
            gamma,
        } = self;
        let shapes = [
            (same_algebra(f.cod(), g.cod()), "f and g have different codomains"),
            (
                same_algebra(r.dom(), f.cod()) && same_algebra(r.cod(), f.dom()),
                "r does not go B -> A",
            ),
            (
                same_algebra(s.dom(), g.cod()) && same_algebra(s.cod(), g.dom()),
                "s does not go B -> C",
            ),
            (same_algebra(alpha.dom(), f.dom()), "α does not start at A"),
            (same_algebra(gamma.dom(), g.dom()), "γ does not start at C"),
            (
                same_algebra(alpha.cod(), gamma.cod()),
                "α and γ have different codomains",
            ),
        ];
        if let Some((_, msg)) = shapes.iter().find(|(ok, _)| !ok) {
            return Err(Error::MalformedDiagram((*msg).into()));
        }
        if let Some(b) = f.cod().elements().find(|&b| f.apply(r.apply(b)) != b) {
            return Err(Error::MalformedDiagram(format!(
                "f r ≠ 1 at {}",
                f.cod().element_name(b)
            )));
        }
        if let Some(b) = g.cod().elements().find(|&b| g.apply(s.apply(b)) != b) {
            return Err(Error::MalformedDiagram(format!(
                "g s ≠ 1 at {}",
                g.cod().element_name(b)
            )));
        }
        Ok(())
    }

    pub fn b(&self) -> &AlgebraRef {
        self.f.cod()
    }

    pub fn d(&self) -> &AlgebraRef {
        self.alpha.cod()
    }
}

/// Connector `φ: A ×_B C -> D` with `φ(a, s f a) = α a` and
/// `φ(r g c, c) = γ c`.
pub fn leftsplit_commute(p: &LeftSplitSpanPair, budget: u64) -> Result<ConnectorResult> {
    p.validate()?;
    let b = p.b();
    for x in b.elements() {
        let (via_r, via_s) = (p.alpha.apply(p.r.apply(x)), p.gamma.apply(p.s.apply(x)));
        if via_r != via_s {
            return Ok(ConnectorResult {
                status: ConnectorStatus::NoneExists(Obstruction::BetaMismatch { b: x, via_r, via_s }),
                beta: None,
                seed_names: Vec::new(),
                seeds: Vec::new(),
                domain: None,
            });
        }
    }
    let beta = p.r.then(&p.alpha)?;
    let pb = pullback(&p.f, &p.g)?;
    let index = |x: Elem, y: Elem| pb.index_of(x, y).expect("point of the pullback");
    let a = p.alpha.dom();
    let c = p.gamma.dom();
    let run = run_connector(Setup {
        e1: a.elements().map(|x| index(x, p.s.apply(p.f.apply(x)))).collect(),
        e2: c.elements().map(|y| index(p.r.apply(p.g.apply(y)), y)).collect(),
        domain: pb.algebra.clone(),
        pairs: pb.pairs.clone(),
        alpha: &p.alpha,
        gamma: &p.gamma,
        d: p.d().clone(),
        budget,
    })?;
    Ok(ConnectorResult {
        status: run.status,
        beta: Some(beta),
        seed_names: run.seed_names,
        seeds: run.seeds,
        domain: Some(run.domain),
    })
}

/// A reflexive relation on `X` as a left split span: first leg split by the
/// diagonal, second leg into `X`.
pub fn reflexive_span(r: &Relation) -> Result<(Homomorphism, Homomorphism, Homomorphism)> {
    if !r.is_reflexive() {
        return Err(Error::NotReflexive(r.display()));
    }
    let span = r.to_span()?;
    let x = r.source();
    let section = x
        .elements()
        .map(|e| r.pairs().binary_search(&(e, e)).expect("reflexive"))
        .collect();
    let section = Homomorphism::new(x.clone(), span.apex().clone(), section)?;
    Ok((span.left().clone(), section, span.right().clone()))
}

/// Connector of two reflexive relations on `X`, as left split spans from
/// `X` to `X`. A point of the pullback is `((x, y), (x, z))`.
pub fn smith_commute(r: &Relation, s: &Relation, budget: u64) -> Result<ConnectorResult> {
    if !same_algebra(r.source(), s.source()) {
        return Err(Error::AlgebraMismatch("relations on different algebras".into()));
    }
    let (f, rs, alpha) = reflexive_span(r)?;
    let (g, ss, gamma) = reflexive_span(s)?;
    leftsplit_commute(&LeftSplitSpanPair::new(f, rs, alpha, g, ss, gamma)?, budget)
}

/// Reads the connector of `(R, S)` as a partial ternary operation
/// `p(y, x, z) = φ((x, y), (x, z))`, indexed `(y·n + x)·n + z`.
pub fn connector_as_ternary(r: &Relation, s: &Relation, c: &Connector) -> Vec<Option<Elem>> {
    let n = r.source().size();
    let mut table = vec![None; n * n * n];
    for (i, &(ri, si)) in c.pairs.iter().enumerate() {
        let (x, y) = r.pairs()[ri];
        let (x2, z) = s.pairs()[si];
        debug_assert_eq!(x, x2);
        table[(y * n + x) * n + z] = Some(c.map.apply(i));
    }
    table
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianStructure {
    /// `x + y = p(x, 0, y)`, indexed `x·n + y`.
    pub add: Vec<Elem>,
    /// `−x = p(0, x, 0)`.
    pub neg: Vec<Elem>,
    /// The connector of `(∇, ∇)` as a Mal'tsev operation.
    pub maltsev: Vec<Elem>,
}

#[derive(Clone, Debug)]
pub enum AbelianOutcome {
    Structure(AbelianStructure),
    NoConnector(ConnectorStatus),
    /// A group axiom or homomorphism property fails for the extracted
    /// operations.
    AxiomFailure(String),
}

/// First failing abelian group axiom of `(add, neg, 0)` on `n` elements.
pub fn abelian_axiom_failure(n: usize, add: &[Elem], neg: &[Elem]) -> Option<String> {
    let plus = |x: Elem, y: Elem| add[x * n + y];
    for (x, &minus) in neg.iter().enumerate().take(n) {
        if plus(x, 0) != x || plus(0, x) != x {
            return Some(format!("0 is not neutral for {x}"));
        }
        if plus(x, minus) != 0 {
            return Some(format!("{x} + (−{x}) ≠ 0"));
        }
        for y in 0..n {
            if plus(x, y) != plus(y, x) {
                return Some(format!("{x} + {y} ≠ {y} + {x}"));
            }
            for z in 0..n {
                if plus(plus(x, y), z) != plus(x, plus(y, z)) {
                    return Some(format!("+ is not associative at ({x},{y},{z})"));
                }
            }
        }
    }
    None
}

/// The internal abelian group structure of `X` carried by a connector of
/// `(∇, ∇)`, if there is one.
pub fn abelian_from_connector(x: &AlgebraRef, budget: u64) -> Result<AbelianOutcome> {
    let total = Relation::total(x, x)?;
    let result = smith_commute(&total, &total, budget)?;
    let c = match result.status {
        ConnectorStatus::Found(c) => c,
        other => return Ok(AbelianOutcome::NoConnector(other)),
    };
    let n = x.size();
    let maltsev: Vec<Elem> = connector_as_ternary(&total, &total, &c)
        .into_iter()
        .map(|v| v.expect("∇ pullback is total"))
        .collect();
    let p = |u: Elem, v: Elem, w: Elem| maltsev[(u * n + v) * n + w];
    let add: Vec<Elem> = (0..n * n).map(|i| p(i / n, 0, i % n)).collect();
    let neg: Vec<Elem> = (0..n).map(|e| p(0, e, 0)).collect();
    if let Some(msg) = abelian_axiom_failure(n, &add, &neg) {
        return Ok(AbelianOutcome::AxiomFailure(msg));
    }
    let square = product(x, x)?;
    let add_map = (0..square.algebra.size())
        .map(|i| {
            let (u, v) = square.split(i);
            add[u * n + v]
        })
        .collect();
    if let Err(e) = Homomorphism::new(square.algebra.clone(), x.clone(), add_map) {
        return Ok(AbelianOutcome::AxiomFailure(format!("+ is not a homomorphism: {e}")));
    }
    if let Err(e) = Homomorphism::new(x.clone(), x.clone(), neg.clone()) {
        return Ok(AbelianOutcome::AxiomFailure(format!("− is not a homomorphism: {e}")));
    }
    Ok(AbelianOutcome::Structure(AbelianStructure { add, neg, maltsev }))
}

/// Per-instance data comparing commutation of two left split spans with
/// commutation of the restrictions of `α`, `γ` to the kernels of `f`, `g`.
#[derive(Clone, Debug)]
pub struct PtInstanceReport {
    pub spans: ConnectorResult,
    pub kernel_f: ElemSet,
    pub kernel_g: ElemSet,
    pub kernels: ConnectorResult,
    /// Classification of the images of `⟨α, f⟩` and `⟨γ, g⟩` in `D × B`.
    pub image_left: Verdict,
    pub image_right: Verdict,
}

impl PtInstanceReport {
    /// Both images are certified ideals.
    pub fn ideal_proper(&self) -> bool {
        [&self.image_left, &self.image_right]
            .iter()
            .all(|v| matches!(v.ideal, crate::classify::IdealVerdict::Certified(_)))
    }

    /// The kernel restrictions commute but the spans do not.
    pub fn reflection_fails(&self) -> bool {
        self.kernels.connector().is_some() && matches!(self.spans.status, ConnectorStatus::NoneExists(_))
    }
}

/// Runs both commutation checks on the diagram and classifies the images of
/// `⟨α, f⟩` and `⟨γ, g⟩` in the variety `v`.
pub fn pt_kernel_reflection_instance(
    p: &LeftSplitSpanPair,
    v: &Variety,
    options: &ClassifyOptions,
    budget: u64,
) -> Result<PtInstanceReport> {
    p.validate()?;
    let spans = leftsplit_commute(p, budget)?;
    let kernel_f = p.f.kernel_set();
    let kernel_g = p.g.kernel_set();
    let alpha_k = p
        .alpha
        .restrict(&Subuniverse::new(p.f.dom().clone(), kernel_f.clone())?)?;
    let gamma_k = p
        .gamma
        .restrict(&Subuniverse::new(p.g.dom().clone(), kernel_g.clone())?)?;
    let kernels = huq_commute(&alpha_k, &gamma_k, budget)?;
    let db = product(p.d(), p.b())?;
    let image = |h: &Homomorphism, k: &Homomorphism| -> ElemSet {
        h.dom().elements().map(|x| db.pair(h.apply(x), k.apply(x))).collect()
    };
    let image_left = classify(&db.algebra, &image(&p.alpha, &p.f), v, options)?;
    let image_right = classify(&db.algebra, &image(&p.gamma, &p.g), v, options)?;
    Ok(PtInstanceReport {
        spans,
        kernel_f,
        kernel_g,
        kernels,
        image_left,
        image_right,
    })
}

/// The variety generated by every algebra of the diagram.
pub fn diagram_variety(p: &LeftSplitSpanPair) -> Result<Variety> {
    let mut algs: Vec<AlgebraRef> = Vec::new();
    for a in [p.f.dom(), p.b(), p.g.dom(), p.d()] {
        if !algs.iter().any(|x| Arc::ptr_eq(x, a)) {
            algs.push(a.clone());
        }
    }
    Variety::generated_by(algs)
}
