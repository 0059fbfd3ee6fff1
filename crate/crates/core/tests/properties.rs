use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use zeroclass::classify::{
    check_certificate, classify, clot_closure, is_clot, is_normal, ClassifyOptions, IdealVerdict,
};
use zeroclass::span::{normalisation, zero_class, zero_class_via_pullback};
use zeroclass::{
    generate_congruence, generate_subuniverse, list_subuniverses, AlgebraRef, Elem, ElemSet, FiniteAlgebra, Relation,
    Signature, Variety,
};

/// Size, arities and a pool of raw table values reduced modulo the size.
fn algebra() -> impl Strategy<Value = AlgebraRef> {
    (
        1usize..=4,
        prop::collection::vec(1usize..=2, 1..=2),
        prop::collection::vec(0usize..64, 40),
    )
        .prop_map(|(n, arities, raw)| {
            let sig = Arc::new(Signature::new(arities.iter().enumerate().map(|(i, &k)| (format!("f{i}"), k))).unwrap());
            let mut it = raw.into_iter().cycle();
            let tables = arities
                .iter()
                .map(|&k| {
                    (0..n.pow(k as u32))
                        .map(|i| if i == 0 { 0 } else { it.next().unwrap() % n })
                        .collect()
                })
                .collect();
            Arc::new(FiniteAlgebra::new(sig, n, tables).unwrap())
        })
}

fn with_pairs() -> impl Strategy<Value = (AlgebraRef, Vec<(Elem, Elem)>)> {
    (algebra(), prop::collection::vec((0usize..4, 0usize..4), 0..4)).prop_map(|(a, raw)| {
        let n = a.size();
        let pairs = raw.into_iter().map(|(x, y)| (x % n, y % n)).collect();
        (a, pairs)
    })
}

fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n.pow(k as u32))
        .map(|mut i| {
            let mut t = vec![0; k];
            for slot in t.iter_mut().rev() {
                *slot = i % n;
                i /= n;
            }
            t
        })
        .collect()
}

fn closed(a: &FiniteAlgebra, set: &BTreeSet<Elem>) -> bool {
    let list: Vec<Elem> = set.iter().copied().collect();
    set.contains(&0)
        && (0..a.signature().len()).all(|op| {
            tuples(list.len(), a.signature().arity(op)).iter().all(|t| {
                let args: Vec<Elem> = t.iter().map(|&i| list[i]).collect();
                set.contains(&a.apply(op, &args))
            })
        })
}

fn compatible(a: &FiniteAlgebra, r: &BTreeSet<(Elem, Elem)>) -> bool {
    let list: Vec<(Elem, Elem)> = r.iter().copied().collect();
    (0..a.signature().len()).all(|op| {
        tuples(list.len(), a.signature().arity(op)).iter().all(|t| {
            let l: Vec<Elem> = t.iter().map(|&i| list[i].0).collect();
            let rr: Vec<Elem> = t.iter().map(|&i| list[i].1).collect();
            r.contains(&(a.apply(op, &l), a.apply(op, &rr)))
        })
    })
}

/// Partitions of `0..n` as block labels, restricted-growth form.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn go(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur[i] = b;
            go(i + 1, max.max(b), cur, out);
        }
    }
    if n > 0 {
        go(1, 0, &mut cur, &mut out);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn subuniverse_is_least_closed_superset((a, pairs) in with_pairs()) {
        let seed: Vec<Elem> = pairs.iter().map(|p| p.0).collect();
        let sub = generate_subuniverse(&a, &seed);
        let got: BTreeSet<Elem> = sub.members().iter().collect();
        let n = a.size();
        let least = (0u32..1 << n)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<BTreeSet<Elem>>())
            .filter(|s| seed.iter().all(|e| s.contains(e)) && closed(&a, s))
            .min_by_key(|s| s.len())
            .unwrap();
        prop_assert_eq!(got, least);
    }

    #[test]
    fn congruence_is_least_compatible_equivalence((a, pairs) in with_pairs()) {
        let theta = generate_congruence(&a, &pairs);
        let n = a.size();
        let best = partitions(n)
            .into_iter()
            .filter(|p| pairs.iter().all(|&(x, y)| p[x] == p[y]))
            .filter(|p| {
                let r: BTreeSet<(Elem, Elem)> =
                    (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| p[x] == p[y]).collect();
                compatible(&a, &r)
            })
            .max_by_key(|p| p.iter().max().copied().unwrap_or(0))
            .unwrap();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(theta.related(x, y), best[x] == best[y]);
            }
        }
    }

    #[test]
    fn zero_class_routes_agree((a, pairs) in with_pairs()) {
        let r = Relation::generated(a.clone(), a.clone(), pairs).unwrap();
        let span = r.to_span().unwrap();
        let oracle: ElemSet = r.pairs().iter().filter(|p| p.0 == 0).map(|p| p.1).collect();
        prop_assert_eq!(zero_class(&span).unwrap().subset.into_members(), oracle.clone());
        prop_assert_eq!(zero_class_via_pullback(&span).unwrap().subset.into_members(), oracle.clone());
        prop_assert_eq!(normalisation(&span).unwrap().into_members(), oracle);
    }

    #[test]
    fn clot_closure_is_stable((a, pairs) in with_pairs()) {
        let x: ElemSet = pairs.iter().map(|p| p.1).collect();
        let once = clot_closure(&a, &x);
        prop_assert!(x.is_subset(once.members()));
        let twice = clot_closure(&a, once.members());
        prop_assert_eq!(once.members(), twice.members());
        prop_assert!(is_clot(&once).holds);
    }

    #[test]
    fn verdicts_respect_the_chain(a in algebra()) {
        let v = Variety::generated_by(vec![a.clone()]).unwrap();
        for k in list_subuniverses(&a, 20).unwrap() {
            let normal = is_normal(&k).holds;
            let clot = is_clot(&k).holds;
            prop_assert!(!normal || clot);
            let verdict = classify(&a, k.members(), &v, &ClassifyOptions::default()).unwrap();
            prop_assert_eq!(verdict.is_normal(), normal);
            prop_assert_eq!(verdict.is_clot(), clot);
            match &verdict.ideal {
                IdealVerdict::Certified(c) => check_certificate(&a, k.members(), &c.relation).unwrap(),
                IdealVerdict::Refuted { .. } => prop_assert!(!clot),
                IdealVerdict::Unknown { .. } => prop_assert!(!clot),
                IdealVerdict::NotASubuniverse => prop_assert!(false, "listed subuniverse rejected"),
            }
        }
    }
}
