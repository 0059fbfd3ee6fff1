//! Varieties given by generating algebras or by oriented rules, and identity
//! checking in both.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::algebra::{for_each_tuple, AlgebraRef, Elem, FiniteAlgebra, Signature};
use crate::error::{Error, Result};
use crate::term::{infer_ops, normalize, RawTerm, Rule, Term};

/// Rewrite steps allowed per normalization unless configured otherwise.
pub const DEFAULT_STEP_BOUND: usize = 10_000;

/// Assignments tried per generator when evaluating an identity.
pub const MAX_IDENTITY_ASSIGNMENTS: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    signature: Arc<Signature>,
    rules: Vec<Rule>,
    step_bound: usize,
}

impl Presentation {
    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn step_bound(&self) -> usize {
        self.step_bound
    }

    pub fn normal_form(&self, t: &Term) -> Option<Term> {
        let mut budget = self.step_bound;
        normalize(t, &self.rules, &mut budget)
    }
}

#[derive(Clone, Debug)]
pub enum Variety {
    GeneratedBy(Vec<AlgebraRef>),
    Presented(Presentation),
}

/// Evidence that an identity fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// Values of the variables in generator `generator` where the sides differ.
    Assignment {
        generator: usize,
        values: Vec<Elem>,
        lhs: Elem,
        rhs: Elem,
    },
    /// Both sides rewrite to different normal forms.
    DistinctNormalForms { lhs: Term, rhs: Term },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdentityCheck {
    Holds,
    Fails(Counterexample),
    Unknown(String),
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        matches!(self, IdentityCheck::Holds)
    }
}

/// First assignment in `algebra` (lexicographic) where `lhs` and `rhs` differ.
pub fn identity_counterexample(
    algebra: &FiniteAlgebra,
    lhs: &Term,
    rhs: &Term,
) -> Result<Option<(Vec<Elem>, Elem, Elem)>> {
    let vars = lhs.var_bound().max(rhs.var_bound());
    let cells = crate::algebra::checked_pow(algebra.size(), vars);
    if cells.is_none_or(|c| c > MAX_IDENTITY_ASSIGNMENTS) {
        return Err(Error::SizeGuard(format!(
            "{vars} variables over {} elements",
            algebra.size()
        )));
    }
    let mut found = None;
    let _ = for_each_tuple(&vec![algebra.size(); vars], |vals| {
        let (l, r) = (lhs.eval(algebra, vals), rhs.eval(algebra, vals));
        if l != r {
            found = Some((vals.to_vec(), l, r));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(found)
}

impl Variety {
    pub fn generated_by(algebras: Vec<AlgebraRef>) -> Result<Self> {
        let first = algebras
            .first()
            .ok_or_else(|| Error::InvalidVariety("no generating algebras".into()))?;
        if algebras.iter().any(|a| a.signature() != first.signature()) {
            return Err(Error::SignatureMismatch);
        }
        Ok(Variety::GeneratedBy(algebras))
    }

    /// Builds a presented variety. For every operation whose all-zero
    /// application does not already rewrite to 0, the rule `f(0,…,0) -> 0`
    /// is appended so that the variety is pointed.
    pub fn presented(signature: Arc<Signature>, rules: Vec<Rule>, step_bound: usize) -> Result<Self> {
        if step_bound == 0 {
            return Err(Error::InvalidVariety("step bound must be positive".into()));
        }
        let mut p = Presentation {
            signature,
            rules,
            step_bound,
        };
        for op in 0..p.signature.len() {
            let constant = Term::App(op, vec![Term::Zero; p.signature.arity(op)]);
            if p.normal_form(&constant) != Some(Term::Zero) {
                p.rules.push(Rule {
                    lhs: constant,
                    rhs: Term::Zero,
                    vars: Vec::new(),
                });
            }
        }
        Ok(Variety::Presented(p))
    }

    /// Resolves raw rules against `signature`, or against the operations the
    /// rules mention when no signature is given.
    pub fn presented_from_raw(
        raw: &[(RawTerm, RawTerm)],
        signature: Option<Arc<Signature>>,
        step_bound: usize,
    ) -> Result<Self> {
        let signature = match signature {
            Some(s) => s,
            None => Arc::new(Signature::new(infer_ops(raw.iter().flat_map(|(l, r)| [l, r]))?)?),
        };
        let rules = raw
            .iter()
            .map(|r| Rule::resolve(r, &signature))
            .collect::<Result<Vec<_>>>()?;
        Self::presented(signature, rules, step_bound)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        match self {
            Variety::GeneratedBy(algs) => algs[0].signature(),
            Variety::Presented(p) => &p.signature,
        }
    }

    /// Re-expresses the variety in `target`. A presented variety may be
    /// widened to a larger signature (operations it does not mention are
    /// only required to be pointed); generating algebras must match exactly.
    pub fn adapt(&self, target: &Arc<Signature>) -> Result<Variety> {
        if self.signature() == target {
            return Ok(self.clone());
        }
        match self {
            Variety::GeneratedBy(_) => Err(Error::SignatureMismatch),
            Variety::Presented(p) => {
                let mut remap = Vec::with_capacity(p.signature.len());
                for sym in p.signature.ops() {
                    match target.index_of(&sym.name) {
                        Some(i) if target.arity(i) == sym.arity => remap.push(i),
                        _ => return Err(Error::SignatureMismatch),
                    }
                }
                let rules = p
                    .rules
                    .iter()
                    .map(|r| Rule {
                        lhs: remap_ops(&r.lhs, &remap),
                        rhs: remap_ops(&r.rhs, &remap),
                        vars: r.vars.clone(),
                    })
                    .collect();
                Variety::presented(target.clone(), rules, p.step_bound)
            }
        }
    }

    pub fn identity_holds(&self, lhs: &Term, rhs: &Term) -> IdentityCheck {
        match self {
            Variety::GeneratedBy(algs) => {
                for (g, a) in algs.iter().enumerate() {
                    match identity_counterexample(a, lhs, rhs) {
                        Ok(None) => {}
                        Ok(Some((values, l, r))) => {
                            return IdentityCheck::Fails(Counterexample::Assignment {
                                generator: g,
                                values,
                                lhs: l,
                                rhs: r,
                            })
                        }
                        Err(e) => return IdentityCheck::Unknown(e.to_string()),
                    }
                }
                IdentityCheck::Holds
            }
            Variety::Presented(p) => match (p.normal_form(lhs), p.normal_form(rhs)) {
                (Some(l), Some(r)) if l == r => IdentityCheck::Holds,
                (Some(l), Some(r)) => IdentityCheck::Fails(Counterexample::DistinctNormalForms { lhs: l, rhs: r }),
                _ => IdentityCheck::Unknown(format!("normalization exceeded {} rewrite steps", p.step_bound)),
            },
        }
    }

    /// For a presented variety, the first rule failing in `model` together
    /// with the failing assignment. Generated varieties accept every model
    /// of their signature here; membership is the caller's responsibility.
    pub fn model_violation(&self, model: &FiniteAlgebra) -> Result<Option<(usize, Vec<Elem>)>> {
        if model.signature() != self.signature() {
            return Err(Error::SignatureMismatch);
        }
        match self {
            Variety::GeneratedBy(_) => Ok(None),
            Variety::Presented(p) => {
                for (i, rule) in p.rules.iter().enumerate() {
                    if let Some((values, _, _)) = identity_counterexample(model, &rule.lhs, &rule.rhs)? {
                        return Ok(Some((i, values)));
                    }
                }
                Ok(None)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Variety::GeneratedBy(algs) => format!("generated by {} algebra(s)", algs.len()),
            Variety::Presented(p) => {
                let rules: Vec<String> = p.rules.iter().map(|r| r.to_prefix(&p.signature)).collect();
                format!("presented by {}", rules.join("; "))
            }
        }
    }
}

fn remap_ops(t: &Term, remap: &[usize]) -> Term {
    match t {
        Term::Zero => Term::Zero,
        Term::Var(v) => Term::Var(*v),
        Term::App(op, args) => Term::App(remap[*op], args.iter().map(|a| remap_ops(a, remap)).collect()),
    }
}
