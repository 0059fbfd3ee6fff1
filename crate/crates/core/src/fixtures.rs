//! Small algebras used throughout the tests, the CLI and the shipped example
//! workspace.

use std::sync::Arc;

use crate::algebra::{ElemSet, FiniteAlgebra, Signature};
use crate::term::{parse_rule, RawTerm};
use crate::variety::{Variety, DEFAULT_STEP_BOUND};

/// Workspace file describing the three-element algebra `{0, 1, a}`.
pub const EXAMPLE_WORKSPACE: &str = include_str!("../data/paper_example.alg");

/// Workspace file with a handful of groups.
pub const GROUPS_WORKSPACE: &str = include_str!("../data/groups.alg");

pub fn binary_signature() -> Arc<Signature> {
    Arc::new(Signature::new([("s", 2)]).expect("valid signature"))
}

pub fn group_signature() -> Arc<Signature> {
    Arc::new(Signature::new([("+", 2), ("-", 1)]).expect("valid signature"))
}

pub fn multiplicative_group_signature() -> Arc<Signature> {
    Arc::new(Signature::new([("*", 2), ("inv", 1)]).expect("valid signature"))
}

/// `A = {0, 1, a}` with one binary `s`: `s(a,1) = s(1,a) = s(a,a) = a` and
/// `s(x,y) = 0` otherwise. `a` is element 2.
pub fn three_element_example() -> FiniteAlgebra {
    FiniteAlgebra::from_fn(binary_signature(), 3, |_, args| match (args[0], args[1]) {
        (2, 1) | (1, 2) | (2, 2) => 2,
        _ => 0,
    })
    .and_then(|a| a.with_names(vec!["0".into(), "1".into(), "a".into()]))
    .expect("valid algebra")
}

/// `C = {0, 1}` inside [`three_element_example`].
pub fn example_subset() -> ElemSet {
    ElemSet::new([0, 1])
}

/// The variety of one binary operation satisfying only `s(0,0) = 0`.
pub fn example_presented_variety() -> Variety {
    let rule = parse_rule("s(0,0) -> 0").expect("valid rule");
    Variety::presented_from_raw(&[rule], None, DEFAULT_STEP_BOUND).expect("valid variety")
}

/// `Z_n` with `+` and unary `-`.
pub fn cyclic_group(n: usize) -> FiniteAlgebra {
    FiniteAlgebra::from_fn(group_signature(), n, |op, args| match op {
        0 => (args[0] + args[1]) % n,
        _ => (n - args[0]) % n,
    })
    .expect("valid algebra")
}

/// Permutations of `{0,1,2}`, listed as `e, t01, t02, t12, r, r2`.
const S3_PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];

/// The symmetric group on three letters with `*` (composition, right factor
/// applied first) and `inv`; element 0 is the identity.
pub fn symmetric_group_3() -> FiniteAlgebra {
    let index = |p: [usize; 3]| S3_PERMS.iter().position(|q| *q == p).expect("permutation");
    FiniteAlgebra::from_fn(multiplicative_group_signature(), 6, |op, args| {
        let p = S3_PERMS[args[0]];
        match op {
            0 => {
                let q = S3_PERMS[args[1]];
                index([p[q[0]], p[q[1]], p[q[2]]])
            }
            _ => {
                let mut inv = [0; 3];
                for (i, &pi) in p.iter().enumerate() {
                    inv[pi] = i;
                }
                index(inv)
            }
        }
    })
    .and_then(|a| {
        a.with_names(
            ["e", "t01", "t02", "t12", "r", "r2"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
    })
    .expect("valid algebra")
}

/// Parses a comma-free list of rules such as `["s(0,0) -> 0"]`.
pub fn rules(src: &[&str]) -> Vec<(RawTerm, RawTerm)> {
    src.iter().map(|r| parse_rule(r).expect("valid rule")).collect()
}
