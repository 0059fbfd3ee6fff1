//! Acceptance suite: one pass/fail line per criterion. Runs without the
//! libtest harness so the lines always reach the terminal.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use common::*;
use rand::Rng;
use zeroclass::classify::{
    certify_ideal, check_certificate, classify, default_pool, endorelation_search, is_clot, is_normal, ClassifyOptions,
    IdealVerdict,
};
use zeroclass::commute::{
    abelian_from_connector, huq_commute, smith_commute, AbelianOutcome, ConnectorStatus, DEFAULT_EXTENSION_BUDGET,
};
use zeroclass::free::{free_algebra, maltsev_term, FreeBounds, MaltsevOutcome};
use zeroclass::ideal_terms::{refute_ideal, TermBounds};
use zeroclass::span::{construct_leftsplit_from_ideal, construct_t, normalisation, zero_class, Span};
use zeroclass::{
    fixtures, list_congruences, list_subuniverses, product, quotient, AlgebraRef, Elem, ElemSet, Homomorphism,
    Relation, Variety,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn example() -> AlgebraRef {
    Arc::new(fixtures::three_element_example())
}

/// Certificates whose `T` construction criterion 4 replays.
fn example_certificate() -> Result<Relation, String> {
    let a = example();
    let c = fixtures::example_subset();
    let v = fixtures::example_presented_variety()
        .adapt(a.signature())
        .map_err(|e| e.to_string())?;
    let pool = default_pool(&a, &v).map_err(|e| e.to_string())?;
    let out = certify_ideal(&a, &c, &v, &pool).map_err(|e| e.to_string())?;
    out.certificate
        .map(|c| c.relation)
        .ok_or_else(|| "no certificate in the default pool".into())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let a = example();
    let c = fixtures::example_subset();
    let v = fixtures::example_presented_variety();
    let verdict = classify(&a, &c, &v, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    check!(verdict.is_subuniverse(), "C is not reported as a subuniverse");
    check!(!verdict.is_normal(), "C is reported normal");
    check!(!verdict.is_clot(), "C is reported a clot");
    let w = verdict
        .clot
        .as_ref()
        .and_then(|c| c.witness.clone())
        .ok_or("no clot witness")?;
    let s = |x: Elem, y: Elem| a.apply(0, &[x, y]);
    check!(
        w.params == vec![2] && w.args == vec![1] && w.value == 2,
        "witness instance is {:?} {:?} -> {}",
        w.params,
        w.args,
        w.value
    );
    check!(w.term.eval(&a, &[2, 0]) == 0 && s(2, 0) == 0, "s(a,0) != 0");
    check!(
        w.term.eval(&a, &[2, 1]) == 2 && !c.contains(s(2, 1)),
        "s(a,1) is not a or lies in C"
    );

    let rep = endorelation_search(&a, &c).map_err(|e| e.to_string())?;
    check!(
        rep.candidates == 512 && rep.matching.is_empty(),
        "endorelation search: {rep:?}"
    );
    let mut oracle = 0;
    for mask in 0u32..1 << 9 {
        let r: BTreeSet<(Elem, Elem)> = (0..9).filter(|i| mask >> i & 1 == 1).map(|i| (i / 3, i % 3)).collect();
        let onto = (0..3).all(|y| r.iter().any(|&(_, t)| t == y));
        if r.contains(&(0, 0)) && onto && closed_pairs(&a, &a, &r) && zero_class_of(r.iter().copied()) == c {
            oracle += 1;
        }
    }
    check!(oracle == 0, "brute force finds {oracle} endorelations");

    let cert = match &verdict.ideal {
        IdealVerdict::Certified(cert) => cert.clone(),
        other => return Err(format!("ideal verdict is {}", other.label())),
    };
    check!(cert.b.size() == 2, "|B| = {}", cert.b.size());
    check_certificate(&a, &c, &cert.relation).map_err(|e| e.to_string())?;
    let r = relation_set(&cert.relation);
    check!(closed_pairs(&cert.b, &a, &r), "certificate is not closed");
    check!(
        (0..3).all(|y| r.iter().any(|&(_, t)| t == y)),
        "certificate is not onto A"
    );
    check!(
        zero_class_of(r.iter().copied()) == c,
        "certificate zero-class differs from C"
    );
    let direct = example_certificate()?;
    check!(
        direct.source().size() == 2,
        "certify returns |B| = {}",
        direct.source().size()
    );
    let elapsed = start.elapsed();
    check!(elapsed < std::time::Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!(
        "witness s(a,1) = a, 0 of 512 endorelations, |B| = 2, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn random_span(rng: &mut rand_chacha::ChaCha8Rng) -> (Span, BTreeSet<(Elem, Elem)>) {
    let sig = random_signature(rng);
    let nx = rng.gen_range(1..=4);
    let x = random_algebra(rng, &sig, nx);
    let ny = rng.gen_range(1..=4);
    let y = random_algebra(rng, &sig, ny);
    let seeds = random_pairs(rng, x.size(), y.size(), 3);
    let rel = Relation::generated(x, y.clone(), seeds).unwrap();
    let tab = rel.to_span().unwrap();
    let pairs = relation_set(&rel);
    if rng.gen_bool(0.5) {
        return (tab, pairs);
    }
    // A non-monic span over the same relation: widen the apex by a factor.
    let nz = rng.gen_range(1..=3);
    let z = random_algebra(rng, &sig, nz);
    let p = product(tab.apex(), &z).unwrap();
    let left = p.first.then(tab.left()).unwrap();
    let right = p.first.then(tab.right()).unwrap();
    (Span::new(left, right).unwrap(), pairs)
}

fn criterion_2() -> Outcome {
    let mut rng = rng(2);
    let total = 240;
    for case in 0..total {
        let (span, pairs) = random_span(&mut rng);
        let zc = zero_class(&span).map_err(|e| e.to_string())?;
        let norm = normalisation(&span).map_err(|e| e.to_string())?;
        let oracle = zero_class_of(pairs);
        check!(
            zc.subset.members() == norm.members(),
            "case {case}: zero-class != normalisation"
        );
        check!(
            zc.subset.members() == &oracle,
            "case {case}: zero-class differs from the brute-force one"
        );
    }
    Ok(format!("{total} random spans, 0 failures"))
}

fn chain_corpus() -> Vec<(String, AlgebraRef)> {
    let mut rng = rng(3);
    let mut out: Vec<(String, AlgebraRef)> = (0..60)
        .map(|i| {
            let sig = random_signature(&mut rng);
            let n = rng.gen_range(1..=4);
            (format!("random #{i}"), random_algebra(&mut rng, &sig, n))
        })
        .collect();
    out.extend(named_algebras().into_iter().map(|(n, a)| (n.to_string(), a)));
    out
}

fn criterion_3() -> Outcome {
    let bounds = TermBounds::default();
    let mut checked = 0;
    for (name, a) in chain_corpus() {
        let v = Variety::generated_by(vec![a.clone()]).map_err(|e| e.to_string())?;
        let subs = list_subuniverses(&a, 20).map_err(|e| e.to_string())?;
        let mut clots = BTreeSet::new();
        let mut normals = BTreeSet::new();
        for k in &subs {
            let normal = is_normal(k).holds;
            let clot = is_clot(k).holds;
            check!(!normal || clot, "{name}: {} is normal but not a clot", k.members());
            if clot {
                let r = refute_ideal(&a, k.members(), &v, &bounds).map_err(|e| e.to_string())?;
                check!(
                    r.witness.is_none(),
                    "{name}: clot {} has an ideal refutation",
                    k.members()
                );
                clots.insert(k.members().clone());
            }
            if normal {
                normals.insert(k.members().clone());
            }
            checked += 1;
        }
        if a.size() <= 4 {
            let (oc, on) = oracle_clots_and_normals(&a);
            check!(oc == clots, "{name}: clot sets differ from brute force");
            check!(on == normals, "{name}: normal sets differ from brute force");
        }
    }
    Ok(format!("{checked} subuniverses, 0 chain violations, oracle agrees"))
}

fn check_t(r: &Relation, label: &str) -> Result<(), String> {
    let t = construct_t(r).map_err(|e| format!("{label}: {e}"))?;
    let tp = relation_set(&t.t);
    check!(
        (0..t.apex.size()).all(|i| tp.contains(&(i, i))),
        "{label}: T is not reflexive"
    );
    check!(closed_pairs(&t.apex, &t.apex, &tp), "{label}: T is not compatible");
    let kernel = zero_class_of(tp.iter().copied());
    check!(
        &kernel == t.kernel.members(),
        "{label}: kernel is not the zero-class of T"
    );
    check!(is_clot(&t.kernel).holds, "{label}: kernel is not a clot of the apex");
    let image: ElemSet = kernel.iter().map(|i| r.pairs()[i].1).collect();
    check!(
        image == zero_class_of(r.pairs().iter().copied()),
        "{label}: image is not the ideal"
    );
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut splits = 0;
    let mut ts = 0;
    for (name, a) in [("Z4", Arc::new(fixtures::cyclic_group(4))), ("Z2xZ2", z2xz2())] {
        let normals = normal_subgroups(&a);
        for theta in list_congruences(&a, 16).map_err(|e| e.to_string())? {
            let q = quotient(&a, &theta).map_err(|e| e.to_string())?;
            for k in list_subuniverses(&a, 20).map_err(|e| e.to_string())? {
                if !normals.contains(k.members()) {
                    continue;
                }
                let label = format!("{name} K={} θ={}", k.members(), theta.blocks().len());
                let split = construct_leftsplit_from_ideal(&k, &q.projection).map_err(|e| format!("{label}: {e}"))?;
                let pairs = relation_set(&split.relation);
                let y = q.algebra.size();
                check!(
                    (0..y).all(|b| pairs.iter().any(|&(_, t)| t == b)),
                    "{label}: not surjective"
                );
                for x in 0..a.size() {
                    let s = split.section.apply(x);
                    check!(
                        split.relation.pairs()[s].0 == x,
                        "{label}: section does not split at {x}"
                    );
                }
                let want = q.projection.image_of(k.members());
                check!(
                    zero_class_of(pairs.iter().copied()) == want,
                    "{label}: zero-class differs"
                );
                if theta.blocks().len() == a.size() {
                    check!(&want == k.members(), "{label}: identity quotient changes K");
                }
                check_t(&split.relation, &label)?;
                splits += 1;
                ts += 1;
            }
        }
    }
    check_t(&example_certificate()?, "example certificate")?;
    ts += 1;
    Ok(format!(
        "{splits} left split relations, {ts} T constructions, 0 failures"
    ))
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    for a in [
        Arc::new(fixtures::cyclic_group(4)),
        Arc::new(fixtures::symmetric_group_3()),
    ] {
        let v = Variety::generated_by(vec![a.clone()]).map_err(|e| e.to_string())?;
        let normals = normal_subgroups(&a);
        for k in list_subuniverses(&a, 20).map_err(|e| e.to_string())? {
            let verdict = classify(&a, k.members(), &v, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
            let oracle = normals.contains(k.members());
            let ideal = match &verdict.ideal {
                IdealVerdict::Certified(_) => true,
                IdealVerdict::Refuted { .. } => false,
                other => return Err(format!("{}: ideal verdict {}", k.members(), other.label())),
            };
            let all = [verdict.is_kernel(), verdict.is_normal(), verdict.is_clot(), ideal];
            check!(
                all.iter().all(|&b| b == oracle),
                "{}: verdicts {all:?}, normal subgroup {oracle}",
                k.members()
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} subgroups of Z4 and S3, 0 mismatches"))
}

fn criterion_6() -> Outcome {
    let z2 = Arc::new(fixtures::cyclic_group(2));
    let v = Variety::generated_by(vec![z2.clone()]).map_err(|e| e.to_string())?;
    let term = match maltsev_term(&v, &FreeBounds::default()).map_err(|e| e.to_string())? {
        MaltsevOutcome::Found { term, .. } => term,
        other => return Err(format!("no term for V(Z2): {other:?}")),
    };
    let f = free_algebra(&v, 2, &FreeBounds::default()).map_err(|e| e.to_string())?;
    let fa = f.tabulate().map_err(|e| e.to_string())?;
    for x in fa.elements() {
        for y in fa.elements() {
            check!(term.eval(&fa, &[x, y, y]) == x, "p(x,y,y) != x on the free algebra");
            check!(term.eval(&fa, &[x, x, y]) == y, "p(x,x,y) != y on the free algebra");
        }
    }
    let va = Variety::generated_by(vec![example()]).map_err(|e| e.to_string())?;
    match maltsev_term(&va, &FreeBounds::default()).map_err(|e| e.to_string())? {
        MaltsevOutcome::NoneExists { .. } => {}
        other => return Err(format!("example variety: {other:?}")),
    }
    let z3 = Arc::new(fixtures::cyclic_group(3));
    match abelian_from_connector(&z3, DEFAULT_EXTENSION_BUDGET).map_err(|e| e.to_string())? {
        AbelianOutcome::Structure(s) => {
            let want: Vec<Elem> = (0..9).map(|i| (i / 3 + i % 3) % 3).collect();
            check!(s.add == want, "Z3 addition table {:?}", s.add);
        }
        other => return Err(format!("Z3: {other:?}")),
    }
    match abelian_from_connector(&example(), DEFAULT_EXTENSION_BUDGET).map_err(|e| e.to_string())? {
        AbelianOutcome::NoConnector(ConnectorStatus::NoneExists(_)) => {}
        other => return Err(format!("example algebra: {other:?}")),
    }
    Ok(format!(
        "V(Z2) term checked on |F(2)| = {}, V(A) none, Z3 table exact, A none",
        fa.size()
    ))
}

fn inclusion(r: &Relation) -> Result<Homomorphism, String> {
    let k = zeroclass::Subuniverse::new(r.target().clone(), r.zero_class_set()).map_err(|e| e.to_string())?;
    Ok(k.subalgebra().map_err(|e| e.to_string())?.1)
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let mut algebras: Vec<AlgebraRef> = named_algebras()
        .into_iter()
        .map(|(_, a)| a)
        .filter(|a| a.size() <= 4)
        .collect();
    for _ in 0..30 {
        let sig = random_signature(&mut rng);
        let n = rng.gen_range(1..=4);
        algebras.push(random_algebra(&mut rng, &sig, n));
    }
    let (mut pairs, mut found, mut unknown) = (0, 0, 0);
    while pairs < 150 {
        let a = algebras[rng.gen_range(0..algebras.len())].clone();
        let n = a.size();
        let mut rel = || {
            let mut seeds = random_pairs(&mut rng, n, n, 2);
            seeds.extend((0..n).map(|x| (x, x)));
            Relation::generated(a.clone(), a.clone(), seeds).unwrap()
        };
        let (r, s) = (rel(), rel());
        pairs += 1;
        let smith = smith_commute(&r, &s, DEFAULT_EXTENSION_BUDGET).map_err(|e| e.to_string())?;
        match smith.status {
            ConnectorStatus::Found(_) => {}
            ConnectorStatus::Unknown { .. } => {
                unknown += 1;
                continue;
            }
            ConnectorStatus::NoneExists(_) => continue,
        }
        found += 1;
        let huq = huq_commute(&inclusion(&r)?, &inclusion(&s)?, DEFAULT_EXTENSION_BUDGET).map_err(|e| e.to_string())?;
        check!(
            matches!(huq.status, ConnectorStatus::Found(_)),
            "Smith commutes but Huq is {} for {:?} and {:?}",
            huq.label(),
            r.pairs(),
            s.pairs()
        );
    }
    check!(found > 0, "no commuting pair in the corpus");
    Ok(format!(
        "{pairs} pairs, {found} Smith-commuting, {unknown} unknown, 0 violations"
    ))
}

const DETERMINISM_COMMANDS: &[&str] = &[
    "verify-paper-example",
    "tasks",
    "subalgebras S3",
    "congruences Z2xZ2",
    "zero-class Z4 Z4_mod2",
    "normalise Z4 Z4_mod2",
    "classify A C --variety V",
    "classify S3 S3_T",
    "endorelation-search A C",
    "certify A C --variety V",
    "construct-leftsplit Z4 Z4_2 {(0,2)}",
    "construct-T Z4_mod2",
    "commute-huq pa pb",
    "commute-smith S3 {(e,t01)} {(e,r)}",
    "commute-leftsplit pa ia pb pb ib pa",
    "maltsev --variety VS3",
    "abelianize Z3",
    "pt-instance pa,ia,pb,pb,ib,pa",
];

fn run_with_threads(args: &str, threads: &str, json: &std::path::Path) -> Result<(Vec<u8>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_zeroclass"))
        .args(args.split(' '))
        .arg("--json")
        .arg(json)
        .env("ZEROCLASS_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    check!(out.status.success(), "`{args}` exited with {:?}", out.status.code());
    Ok((out.stdout, std::fs::read(json).map_err(|e| e.to_string())?))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (i, args) in DETERMINISM_COMMANDS.iter().enumerate() {
        let one = run_with_threads(args, "1", &dir.path().join(format!("{i}-1.json")))?;
        let four = run_with_threads(args, "4", &dir.path().join(format!("{i}-4.json")))?;
        check!(one.0 == four.0, "`{args}`: text reports differ");
        check!(one.1 == four.1, "`{args}`: JSON reports differ");
    }
    Ok(format!(
        "{} commands byte-identical with 1 and 4 threads",
        DETERMINISM_COMMANDS.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("example golden test", criterion_1),
        ("zero-class equals normalisation", criterion_2),
        ("normal, clot, ideal chain", criterion_3),
        ("left split and T roundtrips", criterion_4),
        ("four classifications coincide in groups", criterion_5),
        ("Maltsev and abelian suite", criterion_6),
        ("Smith commuting implies Huq commuting", criterion_7),
        ("determinism across thread counts", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
