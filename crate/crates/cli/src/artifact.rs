//! Self-contained certificates and witnesses, as written to JSON reports and
//! re-checked by `--replay`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use zeroclass::classify::{check_certificate, check_clot_witness, check_ideal_witness, is_normal};
use zeroclass::commute::abelian_axiom_failure;
use zeroclass::free::is_maltsev_vector;
use zeroclass::ideal_terms::{variable_names, IdealWitness};
use zeroclass::span::{construct_t, zero_class, zero_class_via_pullback};
use zeroclass::term::{parse_rule, parse_term, Rule};
use zeroclass::variety::DEFAULT_STEP_BOUND;
use zeroclass::{
    product, AlgebraRef, Elem, ElemSet, Error, FiniteAlgebra, Homomorphism, Relation, Result, Signature, Subuniverse,
    Term, Variety,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub ops: Vec<(String, usize)>,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub tables: Vec<Vec<Elem>>,
}

impl AlgebraSpec {
    pub fn of(a: &FiniteAlgebra) -> Self {
        Self {
            ops: a.signature().ops().iter().map(|o| (o.name.clone(), o.arity)).collect(),
            size: a.size(),
            names: a.names().map(|n| n.to_vec()),
            tables: a.tables().to_vec(),
        }
    }

    pub fn build(&self) -> Result<AlgebraRef> {
        let sig = Arc::new(Signature::new(self.ops.iter().map(|(n, a)| (n.clone(), *a)))?);
        let mut a = FiniteAlgebra::new(sig, self.size, self.tables.clone())?;
        if let Some(names) = &self.names {
            a = a.with_names(names.clone())?;
        }
        Ok(Arc::new(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VarietySpec {
    GeneratedBy {
        algebras: Vec<AlgebraSpec>,
    },
    Presented {
        ops: Vec<(String, usize)>,
        rules: Vec<String>,
    },
}

impl VarietySpec {
    pub fn of(v: &Variety) -> Self {
        match v {
            Variety::GeneratedBy(algs) => VarietySpec::GeneratedBy {
                algebras: algs.iter().map(|a| AlgebraSpec::of(a)).collect(),
            },
            Variety::Presented(p) => VarietySpec::Presented {
                ops: p.signature().ops().iter().map(|o| (o.name.clone(), o.arity)).collect(),
                rules: p.rules().iter().map(|r| r.to_prefix(p.signature())).collect(),
            },
        }
    }

    pub fn build(&self) -> Result<Variety> {
        match self {
            VarietySpec::GeneratedBy { algebras } => {
                Variety::generated_by(algebras.iter().map(|a| a.build()).collect::<Result<_>>()?)
            }
            VarietySpec::Presented { ops, rules } => {
                let sig = Arc::new(Signature::new(ops.iter().map(|(n, a)| (n.clone(), *a)))?);
                let rules = rules
                    .iter()
                    .map(|r| Rule::resolve(&parse_rule(r)?, &sig))
                    .collect::<Result<Vec<_>>>()?;
                Variety::presented(sig, rules, DEFAULT_STEP_BOUND)
            }
        }
    }
}

fn vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

/// Parses a prefix term whose variables are all among `names`.
pub fn term_from_prefix(src: &str, sig: &Signature, names: &[String]) -> Result<Term> {
    let mut known = names.to_vec();
    let t = parse_term(src)?.resolve(sig, &mut known)?;
    if known.len() > names.len() {
        return Err(Error::InvalidTerm(format!(
            "unexpected variable `{}`",
            known[names.len()]
        )));
    }
    Ok(t)
}

/// A term instance `t(params, args) = value` (clot or ideal witness).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub term: String,
    pub x_vars: usize,
    pub y_vars: usize,
    pub params: Vec<Elem>,
    pub args: Vec<Elem>,
    pub value: Elem,
}

impl InstanceSpec {
    pub fn of(w: &IdealWitness, a: &FiniteAlgebra) -> Self {
        Self {
            term: w.term.to_prefix(a.signature(), &w.variable_names()),
            x_vars: w.x_vars,
            y_vars: w.y_vars,
            params: w.params.clone(),
            args: w.args.clone(),
            value: w.value,
        }
    }

    pub fn build(&self, a: &FiniteAlgebra) -> Result<IdealWitness> {
        Ok(IdealWitness {
            term: term_from_prefix(&self.term, a.signature(), &variable_names(self.x_vars, self.y_vars))?,
            x_vars: self.x_vars,
            y_vars: self.y_vars,
            params: self.params.clone(),
            args: self.args.clone(),
            value: self.value,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Artifact {
    /// `set` is closed under the operations.
    Subuniverse {
        algebra: AlgebraSpec,
        set: ElemSet,
    },
    /// `op(args) = value` leaves `set` (`op = None`: 0 is missing).
    Escape {
        algebra: AlgebraSpec,
        set: ElemSet,
        op: Option<usize>,
        args: Vec<Elem>,
        value: Elem,
    },
    /// Blocks of the congruence generated by `{0} × set`.
    NormalClosure {
        algebra: AlgebraSpec,
        set: ElemSet,
        blocks: Vec<ElemSet>,
    },
    ClotWitness {
        algebra: AlgebraSpec,
        set: ElemSet,
        instance: InstanceSpec,
    },
    /// The set is the zero-class of `Sg(Δ ∪ {0} × set)`.
    Clot {
        algebra: AlgebraSpec,
        set: ElemSet,
    },
    IdealWitness {
        algebra: AlgebraSpec,
        set: ElemSet,
        variety: VarietySpec,
        instance: InstanceSpec,
    },
    /// A surjective relation from `b` to the algebra with zero-class `set`.
    IdealCertificate {
        algebra: AlgebraSpec,
        set: ElemSet,
        b: AlgebraSpec,
        pairs: Vec<(Elem, Elem)>,
    },
    /// The matching endorelations found by exhaustive search.
    Endorelations {
        algebra: AlgebraSpec,
        set: ElemSet,
        candidates: u64,
        closed: u64,
        matching: Vec<Vec<(Elem, Elem)>>,
    },
    ZeroClass {
        source: AlgebraSpec,
        target: AlgebraSpec,
        pairs: Vec<(Elem, Elem)>,
        zero_class: ElemSet,
    },
    /// A relation `S ⊆ X × Y` split by `section` into its apex (indices of
    /// pairs), with the given zero-class.
    LeftSplit {
        source: AlgebraSpec,
        target: AlgebraSpec,
        pairs: Vec<(Elem, Elem)>,
        section: Vec<Elem>,
        zero_class: ElemSet,
    },
    /// `T` on the apex of `pairs` with zero-class `kernel` mapping onto the
    /// zero-class of the relation.
    TConstruction {
        source: AlgebraSpec,
        target: AlgebraSpec,
        pairs: Vec<(Elem, Elem)>,
        kernel: Vec<(Elem, Elem)>,
        image: ElemSet,
    },
    /// `map` is a homomorphism `domain -> codomain` with the given values.
    Connector {
        domain: AlgebraSpec,
        codomain: AlgebraSpec,
        map: Vec<Elem>,
        constraints: Vec<(Elem, Elem)>,
    },
    /// Two terms over the seeds evaluate to the same point of `domain` but
    /// to different elements of `codomain`.
    ConnectorConflict {
        domain: AlgebraSpec,
        codomain: AlgebraSpec,
        seeds: Vec<(Elem, Elem)>,
        derivations: (String, String),
    },
    MaltsevTerm {
        generators: Vec<AlgebraSpec>,
        term: String,
    },
    Abelian {
        algebra: AlgebraSpec,
        add: Vec<Elem>,
        neg: Vec<Elem>,
    },
}

fn fail(what: &str, detail: impl std::fmt::Display) -> Error {
    Error::Invariant(format!("{what} does not replay: {detail}"))
}

fn ensure(ok: bool, what: &str, detail: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(fail(what, detail))
    }
}

/// Names used for seed variables in conflict derivations.
pub fn seed_vars(n: usize) -> Vec<String> {
    vars(n)
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Subuniverse { .. } => "subuniverse",
            Artifact::Escape { .. } => "escape",
            Artifact::NormalClosure { .. } => "normal-closure",
            Artifact::ClotWitness { .. } => "clot-witness",
            Artifact::Clot { .. } => "clot",
            Artifact::IdealWitness { .. } => "ideal-witness",
            Artifact::IdealCertificate { .. } => "ideal-certificate",
            Artifact::Endorelations { .. } => "endorelations",
            Artifact::ZeroClass { .. } => "zero-class",
            Artifact::LeftSplit { .. } => "left-split",
            Artifact::TConstruction { .. } => "t-construction",
            Artifact::Connector { .. } => "connector",
            Artifact::ConnectorConflict { .. } => "connector-conflict",
            Artifact::MaltsevTerm { .. } => "maltsev-term",
            Artifact::Abelian { .. } => "abelian",
        }
    }

    /// Re-checks the artifact from scratch. Any failure is reported as an
    /// invariant violation.
    pub fn replay(&self) -> Result<()> {
        let what = self.kind();
        let wrap = |e: Error| match e {
            Error::Invariant(_) => e,
            other => fail(what, other),
        };
        self.replay_inner().map_err(wrap)
    }

    fn replay_inner(&self) -> Result<()> {
        let what = self.kind();
        match self {
            Artifact::Subuniverse { algebra, set } => {
                let a = algebra.build()?;
                ensure(
                    zeroclass::algebra::closure_escape(&a, set).is_none(),
                    what,
                    "set is not closed",
                )
            }
            Artifact::Escape {
                algebra,
                set,
                op,
                args,
                value,
            } => {
                let a = algebra.build()?;
                match op {
                    None => ensure(!set.contains(0), what, "0 is present"),
                    Some(op) => {
                        ensure(*op < a.signature().len(), what, "no such operation")?;
                        ensure(args.len() == a.signature().arity(*op), what, "wrong arity")?;
                        ensure(args.iter().all(|&x| set.contains(x)), what, "argument outside the set")?;
                        ensure(
                            a.apply(*op, args) == *value && !set.contains(*value),
                            what,
                            "value stays inside",
                        )
                    }
                }
            }
            Artifact::NormalClosure { algebra, set, blocks } => {
                let a = algebra.build()?;
                let sub = Subuniverse::new(a.clone(), set.clone())?;
                let theta = is_normal(&sub).congruence;
                ensure(
                    &theta.blocks() == blocks,
                    what,
                    "blocks differ from the generated congruence",
                )
            }
            Artifact::ClotWitness { algebra, set, instance } => {
                let a = algebra.build()?;
                let w = instance.build(&a)?;
                ensure(check_clot_witness(&a, set, &w), what, "instance does not escape")
            }
            Artifact::Clot { algebra, set } => {
                let a = algebra.build()?;
                let r = zeroclass::span::clot_relation(&a, set);
                ensure(&r.zero_class_set() == set, what, "clot closure is larger")
            }
            Artifact::IdealWitness {
                algebra,
                set,
                variety,
                instance,
            } => {
                let a = algebra.build()?;
                let v = variety.build()?;
                let w = instance.build(&a)?;
                let check = check_ideal_witness(&a, set, &v, &w)?;
                ensure(check.holds(), what, &format!("{check:?}"))
            }
            Artifact::IdealCertificate { algebra, set, b, pairs } => {
                let a = algebra.build()?;
                let b = b.build()?;
                let r = Relation::new(b, a.clone(), pairs.iter().copied())?;
                check_certificate(&a, set, &r)
            }
            Artifact::Endorelations {
                algebra,
                set,
                candidates,
                closed,
                matching,
            } => {
                let a = algebra.build()?;
                let report = zeroclass::classify::endorelation_search(&a, set)?;
                let found: Vec<Vec<(Elem, Elem)>> = report.matching.iter().map(|r| r.pairs().to_vec()).collect();
                ensure(
                    report.candidates == *candidates && report.closed == *closed && &found == matching,
                    what,
                    "search result differs",
                )
            }
            Artifact::ZeroClass {
                source,
                target,
                pairs,
                zero_class: zc,
            } => {
                let r = Relation::new(source.build()?, target.build()?, pairs.iter().copied())?;
                let span = r.to_span()?;
                let direct = zero_class(&span)?;
                let via = zero_class_via_pullback(&span)?;
                ensure(
                    direct.subset.members() == zc && via.subset.members() == zc && &r.zero_class_set() == zc,
                    what,
                    "zero-class differs",
                )
            }
            Artifact::LeftSplit {
                source,
                target,
                pairs,
                section,
                zero_class: zc,
            } => {
                let r = Relation::new(source.build()?, target.build()?, pairs.iter().copied())?;
                let span = r.to_span()?;
                let s = Homomorphism::new(r.source().clone(), span.apex().clone(), section.clone())?;
                let split = zeroclass::span::LeftSplitSpan::new(r.clone(), s)?;
                ensure(split.relation.is_surjective(), what, "relation is not surjective")?;
                ensure(&r.zero_class_set() == zc, what, "zero-class differs")
            }
            Artifact::TConstruction {
                source,
                target,
                pairs,
                kernel,
                image,
            } => {
                let r = Relation::new(source.build()?, target.build()?, pairs.iter().copied())?;
                let t = construct_t(&r)?;
                let k: Vec<(Elem, Elem)> = t.kernel.members().iter().map(|i| r.pairs()[i]).collect();
                ensure(&k == kernel, what, "kernel differs")?;
                let clot = zeroclass::span::clot_relation(&t.apex, t.kernel.members());
                ensure(
                    &clot.zero_class_set() == t.kernel.members(),
                    what,
                    "kernel is not a clot",
                )?;
                ensure(&t.image == image && image == &r.zero_class_set(), what, "image differs")
            }
            Artifact::Connector {
                domain,
                codomain,
                map,
                constraints,
            } => {
                let h = Homomorphism::new(domain.build()?, codomain.build()?, map.clone())?;
                ensure(
                    constraints.iter().all(|&(p, v)| p < map.len() && h.apply(p) == v),
                    what,
                    "constraint violated",
                )
            }
            Artifact::ConnectorConflict {
                domain,
                codomain,
                seeds,
                derivations,
            } => {
                let p = domain.build()?;
                let d = codomain.build()?;
                let names = vars(seeds.len());
                let left: Vec<Elem> = seeds.iter().map(|s| s.0).collect();
                let right: Vec<Elem> = seeds.iter().map(|s| s.1).collect();
                ensure(
                    left.iter().all(|&x| x < p.size()) && right.iter().all(|&y| y < d.size()),
                    what,
                    "seed out of range",
                )?;
                let t1 = term_from_prefix(&derivations.0, p.signature(), &names)?;
                let t2 = term_from_prefix(&derivations.1, p.signature(), &names)?;
                ensure(
                    t1.eval(&p, &left) == t2.eval(&p, &left),
                    what,
                    "derivations reach different points",
                )?;
                ensure(t1.eval(&d, &right) != t2.eval(&d, &right), what, "derivations agree")
            }
            Artifact::MaltsevTerm { generators, term } => {
                let algs = generators.iter().map(|g| g.build()).collect::<Result<Vec<_>>>()?;
                let sig = algs
                    .first()
                    .ok_or_else(|| fail(what, "no generators"))?
                    .signature()
                    .clone();
                let t = term_from_prefix(term, &sig, &["x".into(), "y".into(), "z".into()])?;
                let tables: Vec<Elem> = algs.iter().flat_map(|a| t.table(a, 3)).collect();
                ensure(is_maltsev_vector(&algs, &tables), what, "identities fail")
            }
            Artifact::Abelian { algebra, add, neg } => {
                let x = algebra.build()?;
                let n = x.size();
                ensure(add.len() == n * n && neg.len() == n, what, "table sizes")?;
                if let Some(m) = abelian_axiom_failure(n, add, neg) {
                    return Err(fail(what, m));
                }
                let sq = product(&x, &x)?;
                let map = (0..sq.algebra.size())
                    .map(|i| {
                        let (u, v) = sq.split(i);
                        add[u * n + v]
                    })
                    .collect();
                Homomorphism::new(sq.algebra.clone(), x.clone(), map)?;
                Homomorphism::new(x.clone(), x, neg.clone())?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use zeroclass::fixtures;

    #[test]
    fn algebra_roundtrip() {
        let a = fixtures::three_element_example();
        let spec = AlgebraSpec::of(&a);
        assert!(spec.build().unwrap().same_structure(&a));
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<AlgebraSpec>(&json).unwrap(), spec);
    }

    #[test]
    fn tampered_certificate_fails() {
        let a = fixtures::three_element_example();
        let b = FiniteAlgebra::new(a.signature().clone(), 2, vec![vec![0, 1, 1, 1]]).unwrap();
        let good = Artifact::IdealCertificate {
            algebra: AlgebraSpec::of(&a),
            set: fixtures::example_subset(),
            b: AlgebraSpec::of(&b),
            pairs: vec![(0, 0), (0, 1), (1, 0), (1, 2)],
        };
        good.replay().unwrap();
        let bad = Artifact::IdealCertificate {
            algebra: AlgebraSpec::of(&a),
            set: fixtures::example_subset(),
            b: AlgebraSpec::of(&b),
            pairs: vec![(0, 0), (0, 1), (1, 2)],
        };
        assert!(matches!(bad.replay(), Err(Error::Invariant(_))));
    }

    #[test]
    fn presented_variety_roundtrip() {
        let v = fixtures::example_presented_variety();
        let spec = VarietySpec::of(&v);
        let back = spec.build().unwrap();
        assert_eq!(VarietySpec::of(&back), spec);
    }
}
