//! Random corpus and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zeroclass::{product, AlgebraRef, Elem, ElemSet, FiniteAlgebra, Relation, Signature};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One or two operations, each unary or binary.
pub fn random_signature(rng: &mut ChaCha8Rng) -> Arc<Signature> {
    let count = rng.gen_range(1..=2);
    let ops: Vec<(String, usize)> = (0..count).map(|i| (format!("f{i}"), rng.gen_range(1..=2))).collect();
    Arc::new(Signature::new(ops).unwrap())
}

/// Uniform tables subject to `f(0,..,0) = 0`.
pub fn random_algebra(rng: &mut ChaCha8Rng, sig: &Arc<Signature>, size: usize) -> AlgebraRef {
    let tables = sig
        .ops()
        .iter()
        .map(|op| {
            let cells = size.pow(op.arity as u32);
            (0..cells)
                .map(|i| if i == 0 { 0 } else { rng.gen_range(0..size) })
                .collect()
        })
        .collect();
    Arc::new(FiniteAlgebra::new(sig.clone(), size, tables).unwrap())
}

pub fn random_pairs(rng: &mut ChaCha8Rng, x: usize, y: usize, max: usize) -> Vec<(Elem, Elem)> {
    let k = rng.gen_range(1..=max);
    (0..k).map(|_| (rng.gen_range(0..x), rng.gen_range(0..y))).collect()
}

pub fn z2xz2() -> AlgebraRef {
    let z2 = Arc::new(zeroclass::fixtures::cyclic_group(2));
    product(&z2, &z2).unwrap().algebra
}

pub fn named_algebras() -> Vec<(&'static str, AlgebraRef)> {
    use zeroclass::fixtures::*;
    vec![
        ("Z4", Arc::new(cyclic_group(4))),
        ("Z2xZ2", z2xz2()),
        ("S3", Arc::new(symmetric_group_3())),
        ("A", Arc::new(three_element_example())),
    ]
}

/// Every tuple in `0..n` of length `k`, first coordinate most significant.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

/// Whether `pairs ⊆ X × Y` is closed under the operations.
pub fn closed_pairs(x: &FiniteAlgebra, y: &FiniteAlgebra, pairs: &BTreeSet<(Elem, Elem)>) -> bool {
    let list: Vec<(Elem, Elem)> = pairs.iter().copied().collect();
    (0..x.signature().len()).all(|op| {
        tuples(list.len(), x.signature().arity(op)).iter().all(|t| {
            let left: Vec<Elem> = t.iter().map(|&i| list[i].0).collect();
            let right: Vec<Elem> = t.iter().map(|&i| list[i].1).collect();
            pairs.contains(&(x.apply(op, &left), y.apply(op, &right)))
        })
    })
}

pub fn closed_set(a: &FiniteAlgebra, set: &ElemSet) -> bool {
    set.contains(0)
        && (0..a.signature().len()).all(|op| {
            tuples(set.len(), a.signature().arity(op)).iter().all(|t| {
                let args: Vec<Elem> = t.iter().map(|&i| set.as_slice()[i]).collect();
                set.contains(a.apply(op, &args))
            })
        })
}

pub fn zero_class_of(pairs: impl IntoIterator<Item = (Elem, Elem)>) -> ElemSet {
    pairs.into_iter().filter(|&(x, _)| x == 0).map(|(_, y)| y).collect()
}

/// All reflexive compatible relations on `a`, by enumerating subsets of the
/// off-diagonal pairs.
pub fn reflexive_compatible(a: &FiniteAlgebra) -> Vec<BTreeSet<(Elem, Elem)>> {
    let n = a.size();
    let off: Vec<(Elem, Elem)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|(x, y)| x != y)
        .collect();
    assert!(off.len() <= 20, "algebra too large for the oracle");
    (0u32..1 << off.len())
        .filter_map(|mask| {
            let mut r: BTreeSet<(Elem, Elem)> = (0..n).map(|x| (x, x)).collect();
            r.extend(
                off.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p),
            );
            closed_pairs(a, a, &r).then_some(r)
        })
        .collect()
}

pub fn is_equivalence(r: &BTreeSet<(Elem, Elem)>) -> bool {
    r.iter().all(|&(x, y)| r.contains(&(y, x)))
        && r.iter()
            .all(|&(x, y)| r.iter().filter(|&&(u, _)| u == y).all(|&(_, z)| r.contains(&(x, z))))
}

/// Clots and normal subsets of `a` from the brute-force relation list.
pub fn oracle_clots_and_normals(a: &FiniteAlgebra) -> (BTreeSet<ElemSet>, BTreeSet<ElemSet>) {
    let mut clots = BTreeSet::new();
    let mut normals = BTreeSet::new();
    for r in reflexive_compatible(a) {
        let zc = zero_class_of(r.iter().copied());
        if is_equivalence(&r) {
            normals.insert(zc.clone());
        }
        clots.insert(zc);
    }
    (clots, normals)
}

/// Subgroups closed under conjugation; op 0 is the product, op 1 the inverse.
pub fn normal_subgroups(g: &FiniteAlgebra) -> BTreeSet<ElemSet> {
    let n = g.size();
    (1u32..1 << n)
        .filter(|m| m & 1 == 1)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<ElemSet>())
        .filter(|h| closed_set(g, h))
        .filter(|h| {
            (0..n).all(|x| {
                let inv = g.apply(1, &[x]);
                h.iter().all(|k| h.contains(g.apply(0, &[g.apply(0, &[x, k]), inv])))
            })
        })
        .collect()
}

pub fn relation_set(r: &Relation) -> BTreeSet<(Elem, Elem)> {
    r.pairs().iter().copied().collect()
}
