//! Free algebras of finitely generated varieties and Mal'tsev term search.
//!
//! An element of `F_V(k)` is stored as its term-function tables on every
//! generating algebra, concatenated: one coordinate per generator algebra
//! and per assignment of the `k` variables.

use std::sync::Arc;

use crate::algebra::{checked_pow, for_each_tuple, AlgebraRef, Elem, FiniteAlgebra};
use crate::closure::{Fixpoint, Origin, PowerOps};
use crate::error::{Error, Result};
use crate::term::Term;
use crate::variety::Variety;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeBounds {
    /// Largest number of coordinates (total table cells) per element.
    pub max_coordinates: usize,
    /// Largest number of elements generated before giving up.
    pub max_elements: usize,
}

impl Default for FreeBounds {
    fn default() -> Self {
        Self {
            max_coordinates: 1 << 16,
            max_elements: 1 << 18,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    generators: Vec<AlgebraRef>,
    arity: usize,
    coords: Vec<usize>,
    offsets: Vec<usize>,
    elements: Vec<Vec<Elem>>,
    terms: Vec<Term>,
    generator_elems: Vec<Elem>,
}

fn generator_algebras(v: &Variety) -> Result<&[AlgebraRef]> {
    match v {
        Variety::GeneratedBy(algs) => Ok(algs),
        Variety::Presented(_) => Err(Error::InvalidVariety(
            "free algebras need a variety given by generating algebras".into(),
        )),
    }
}

struct Layout {
    coords: Vec<usize>,
    offsets: Vec<usize>,
}

fn layout(algs: &[AlgebraRef], k: usize, bounds: &FreeBounds) -> Result<Layout> {
    let mut coords = Vec::new();
    let mut offsets = Vec::new();
    for (i, a) in algs.iter().enumerate() {
        let cells = checked_pow(a.size(), k).filter(|&c| coords.len() + c <= bounds.max_coordinates);
        let Some(cells) = cells else {
            return Err(Error::SizeGuard(format!(
                "tables of {k}-ary term functions exceed {} cells",
                bounds.max_coordinates
            )));
        };
        offsets.push(coords.len());
        coords.extend(std::iter::repeat_n(i, cells));
    }
    Ok(Layout { coords, offsets })
}

/// Variable `v` of `k` as a coordinate vector.
fn projection(algs: &[AlgebraRef], k: usize, v: usize) -> Vec<Elem> {
    let mut out = Vec::new();
    for a in algs {
        let _ = for_each_tuple(&vec![a.size(); k], |t| {
            out.push(t[v]);
            std::ops::ControlFlow::Continue(())
        });
    }
    out
}

fn terms_from_origins(origins: &[Origin]) -> Vec<Term> {
    let mut terms: Vec<Term> = Vec::with_capacity(origins.len());
    for o in origins {
        let t = match o {
            Origin::Zero => Term::Zero,
            Origin::Seed(j) => Term::Var(*j),
            Origin::Apply { op, args } => Term::App(*op, args.iter().map(|&a| terms[a].clone()).collect()),
        };
        terms.push(t);
    }
    terms
}

/// `F_V(k)`: the subalgebra of the product of the generators' `k`-ary
/// term-function algebras generated by the variable projections.
pub fn free_algebra(v: &Variety, k: usize, bounds: &FreeBounds) -> Result<FreeAlgebra> {
    let algs = generator_algebras(v)?;
    let Layout { coords, offsets } = layout(algs, k, bounds)?;
    let seeds: Vec<Vec<Elem>> = (0..k).map(|j| projection(algs, k, j)).collect();
    let ops = PowerOps {
        algebras: algs.iter().map(|a| &**a).collect(),
        coords: coords.clone(),
    };
    let mut fp = Fixpoint::new(ops, seeds.iter().cloned()).with_limits(bounds.max_elements, u64::MAX);
    fp.run();
    if fp.is_truncated() {
        return Err(Error::StepBound(format!(
            "free algebra on {k} generators has more than {} elements",
            bounds.max_elements
        )));
    }
    let (set, origins) = fp.into_parts();
    let generator_elems = seeds
        .iter()
        .map(|s| set.get_index_of(s).expect("seed is an element"))
        .collect();
    Ok(FreeAlgebra {
        generators: algs.to_vec(),
        arity: k,
        coords,
        offsets,
        terms: terms_from_origins(&origins),
        elements: set.into_iter().collect(),
        generator_elems,
    })
}

impl FreeAlgebra {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn rank(&self) -> usize {
        self.arity
    }

    /// The element of each free generator.
    pub fn generators(&self) -> &[Elem] {
        &self.generator_elems
    }

    /// A derivation of element `e` of least depth.
    pub fn term(&self, e: Elem) -> &Term {
        &self.terms[e]
    }

    /// The term-function table of `e` on generator algebra `alg`.
    pub fn table(&self, e: Elem, alg: usize) -> &[Elem] {
        let start = self.offsets[alg];
        let end = self.offsets.get(alg + 1).copied().unwrap_or(self.coords.len());
        &self.elements[e][start..end]
    }

    pub fn coordinates(&self, e: Elem) -> &[Elem] {
        &self.elements[e]
    }

    pub fn generator_algebras(&self) -> &[AlgebraRef] {
        &self.generators
    }

    /// Operation tables on the elements, numbered in generation order.
    pub fn tabulate(&self) -> Result<AlgebraRef> {
        let index: std::collections::HashMap<&[Elem], Elem> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_slice(), i))
            .collect();
        let ops = PowerOps {
            algebras: self.generators.iter().map(|a| &**a).collect(),
            coords: self.coords.clone(),
        };
        let sig = self.generators[0].signature().clone();
        let mut refs = Vec::new();
        let alg = FiniteAlgebra::from_fn(sig, self.size(), |op, args| {
            refs.clear();
            refs.extend(args.iter().map(|&a| &self.elements[a]));
            let v = crate::closure::Operations::apply(&ops, op, &refs);
            index[v.as_slice()]
        })?;
        Ok(Arc::new(alg))
    }
}

/// Outcome of the Mal'tsev term search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaltsevOutcome {
    /// `p(x,y,y) = x` and `p(x,x,y) = y` hold on every generator.
    Found {
        term: Term,
        explored: usize,
    },
    /// `F_V(3)` was generated completely and contains no such element.
    NoneExists {
        free_size: usize,
    },
    Unknown {
        explored: usize,
        reason: String,
    },
}

/// Whether the ternary term-function tables `p` (one per generator, over
/// `A³`) satisfy the Mal'tsev identities.
pub fn is_maltsev_vector(algs: &[AlgebraRef], p: &[Elem]) -> bool {
    let mut offset = 0;
    for a in algs {
        let n = a.size();
        let at = |x: Elem, y: Elem, z: Elem| p[offset + (x * n + y) * n + z];
        for u in 0..n {
            for w in 0..n {
                if at(u, w, w) != u || at(u, u, w) != w {
                    return false;
                }
            }
        }
        offset += n * n * n;
    }
    true
}

/// Searches `F_V(3)` round by round for a Mal'tsev term, returning the first
/// one in generation order (so of least depth).
pub fn maltsev_term(v: &Variety, bounds: &FreeBounds) -> Result<MaltsevOutcome> {
    let algs = generator_algebras(v)?;
    let coords = match layout(algs, 3, bounds) {
        Ok(l) => l.coords,
        Err(e) => {
            return Ok(MaltsevOutcome::Unknown {
                explored: 0,
                reason: e.to_string(),
            })
        }
    };
    let seeds: Vec<Vec<Elem>> = (0..3).map(|j| projection(algs, 3, j)).collect();
    for (j, s) in seeds.iter().enumerate() {
        if is_maltsev_vector(algs, s) {
            return Ok(MaltsevOutcome::Found {
                term: Term::Var(j),
                explored: 0,
            });
        }
    }
    let ops = PowerOps {
        algebras: algs.iter().map(|a| &**a).collect(),
        coords,
    };
    let mut fp = Fixpoint::new(ops, seeds).with_limits(bounds.max_elements, u64::MAX);
    let mut checked = 0;
    loop {
        let elements = fp.elements();
        for i in checked..elements.len() {
            if is_maltsev_vector(algs, &elements[i]) {
                let terms = terms_from_origins(&fp.origins()[..=i]);
                return Ok(MaltsevOutcome::Found {
                    term: terms[i].clone(),
                    explored: i + 1,
                });
            }
        }
        checked = elements.len();
        if !fp.step() {
            break;
        }
    }
    if fp.is_truncated() {
        Ok(MaltsevOutcome::Unknown {
            explored: fp.elements().len(),
            reason: format!("free algebra exceeds {} elements", bounds.max_elements),
        })
    } else {
        Ok(MaltsevOutcome::NoneExists {
            free_size: fp.elements().len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn v(a: FiniteAlgebra) -> Variety {
        Variety::generated_by(vec![Arc::new(a)]).unwrap()
    }

    #[test]
    fn free_z2_on_one_generator() {
        let f = free_algebra(&v(fixtures::cyclic_group(2)), 1, &FreeBounds::default()).unwrap();
        assert_eq!(f.size(), 2);
        assert_eq!(f.generators(), &[1]);
        assert_eq!(f.term(1), &Term::Var(0));
    }

    #[test]
    fn free_on_zero_generators_is_trivial() {
        let f = free_algebra(&v(fixtures::three_element_example()), 0, &FreeBounds::default()).unwrap();
        assert_eq!(f.size(), 1);
        assert_eq!(f.tabulate().unwrap().size(), 1);
    }

    #[test]
    fn free_z2_on_three_generators() {
        let f = free_algebra(&v(fixtures::cyclic_group(2)), 3, &FreeBounds::default()).unwrap();
        // subsets of {x, y, z} summed
        assert_eq!(f.size(), 8);
        let alg = f.tabulate().unwrap();
        assert_eq!(alg.size(), 8);
    }

    #[test]
    fn maltsev_for_z2() {
        let vz2 = v(fixtures::cyclic_group(2));
        match maltsev_term(&vz2, &FreeBounds::default()).unwrap() {
            MaltsevOutcome::Found { term, .. } => {
                let z2 = fixtures::cyclic_group(2);
                for x in 0..2 {
                    for y in 0..2 {
                        assert_eq!(term.eval(&z2, &[x, y, y]), x);
                        assert_eq!(term.eval(&z2, &[x, x, y]), y);
                    }
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn no_maltsev_for_example() {
        let out = maltsev_term(&v(fixtures::three_element_example()), &FreeBounds::default()).unwrap();
        assert!(matches!(out, MaltsevOutcome::NoneExists { .. }), "{out:?}");
    }

    #[test]
    fn trivial_variety_uses_a_projection() {
        let sig = fixtures::binary_signature();
        let out = maltsev_term(&v(FiniteAlgebra::trivial(sig)), &FreeBounds::default()).unwrap();
        assert_eq!(
            out,
            MaltsevOutcome::Found {
                term: Term::Var(0),
                explored: 0
            }
        );
    }

    #[test]
    fn presented_variety_rejected() {
        assert!(free_algebra(&fixtures::example_presented_variety(), 1, &FreeBounds::default()).is_err());
    }
}
