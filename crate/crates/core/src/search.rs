//! Backtracking search for homomorphisms with per-element value restrictions.

use crate::algebra::{Elem, FiniteAlgebra};
use crate::error::{Error, Result};

/// Result of a bounded search. `solutions` are in lexicographic order of the
/// maps; `complete` is false when the node budget ran out first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSearchOutcome {
    pub solutions: Vec<Vec<Elem>>,
    pub complete: bool,
    pub nodes: u64,
}

pub struct HomSearch<'a> {
    dom: &'a FiniteAlgebra,
    cod: &'a FiniteAlgebra,
    allowed: Vec<Vec<Elem>>,
    budget: u64,
}

struct State<'s> {
    search: &'s HomSearch<'s>,
    mask: Vec<Vec<bool>>,
    map: Vec<Option<Elem>>,
    assigned: Vec<Elem>,
    nodes: u64,
    want: usize,
    solutions: Vec<Vec<Elem>>,
    out_of_budget: bool,
}

impl<'a> HomSearch<'a> {
    /// All maps `dom -> cod` sending 0 to 0 are candidates.
    pub fn new(dom: &'a FiniteAlgebra, cod: &'a FiniteAlgebra) -> Result<Self> {
        crate::algebra::require_same_signature(dom, cod)?;
        let mut allowed: Vec<Vec<Elem>> = vec![cod.elements().collect(); dom.size()];
        allowed[0] = vec![0];
        Ok(Self {
            dom,
            cod,
            allowed,
            budget: u64::MAX,
        })
    }

    /// Restricts the image of `x` to `values`, tried in the given order.
    pub fn restrict(mut self, x: Elem, values: Vec<Elem>) -> Result<Self> {
        if values.iter().any(|&v| v >= self.cod.size()) {
            return Err(Error::AlgebraMismatch(format!("value out of range for element {x}")));
        }
        self.allowed[x] = if x == 0 {
            values.into_iter().filter(|&v| v == 0).collect()
        } else {
            values
        };
        Ok(self)
    }

    pub fn with_budget(mut self, nodes: u64) -> Self {
        self.budget = nodes;
        self
    }

    /// Finds up to `want` homomorphisms.
    pub fn run(&self, want: usize) -> HomSearchOutcome {
        let mut mask = vec![vec![false; self.cod.size()]; self.dom.size()];
        for (x, vals) in self.allowed.iter().enumerate() {
            for &v in vals {
                mask[x][v] = true;
            }
        }
        let mut st = State {
            search: self,
            mask,
            map: vec![None; self.dom.size()],
            assigned: Vec::new(),
            nodes: 0,
            want,
            solutions: Vec::new(),
            out_of_budget: false,
        };
        if want > 0 {
            st.dfs();
        }
        HomSearchOutcome {
            solutions: st.solutions,
            complete: !st.out_of_budget,
            nodes: st.nodes,
        }
    }
}

impl State<'_> {
    fn assign(&mut self, x: Elem, v: Elem) -> bool {
        let mut queue = vec![(x, v)];
        while let Some((x, v)) = queue.pop() {
            match self.map[x] {
                Some(old) if old == v => continue,
                Some(_) => return false,
                None => {}
            }
            if !self.mask[x][v] {
                return false;
            }
            self.map[x] = Some(v);
            self.assigned.push(x);
            let dom = self.search.dom;
            let cod = self.search.cod;
            let assigned = self.assigned.clone();
            for op in 0..dom.signature().len() {
                let k = dom.signature().arity(op);
                let mut args = vec![0; k];
                let mut imgs = vec![0; k];
                for j in 0..k {
                    let mut radices = vec![assigned.len(); k];
                    radices[j] = 1;
                    let mut bad = false;
                    let _ = crate::algebra::for_each_tuple(&radices, |t| {
                        for p in 0..k {
                            args[p] = if p == j { x } else { assigned[t[p]] };
                            imgs[p] = self.map[args[p]].expect("assigned");
                        }
                        let r = dom.apply(op, &args);
                        let val = cod.apply(op, &imgs);
                        match self.map[r] {
                            Some(existing) if existing != val => {
                                bad = true;
                                return std::ops::ControlFlow::Break(());
                            }
                            Some(_) => {}
                            None => queue.push((r, val)),
                        }
                        std::ops::ControlFlow::Continue(())
                    });
                    if bad {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        for x in self.assigned.drain(mark..) {
            self.map[x] = None;
        }
    }

    fn dfs(&mut self) {
        if self.solutions.len() >= self.want || self.out_of_budget {
            return;
        }
        let Some(x) = self.map.iter().position(Option::is_none) else {
            self.solutions
                .push(self.map.iter().map(|v| v.expect("total")).collect());
            return;
        };
        for i in 0..self.search.allowed[x].len() {
            if self.nodes >= self.search.budget {
                self.out_of_budget = true;
                return;
            }
            self.nodes += 1;
            let v = self.search.allowed[x][i];
            let mark = self.assigned.len();
            if self.assign(x, v) {
                self.dfs();
            }
            self.undo(mark);
            if self.solutions.len() >= self.want || self.out_of_budget {
                return;
            }
        }
    }
}

/// All homomorphisms `dom -> cod`, lexicographically ordered.
pub fn all_homomorphisms(dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Result<Vec<Vec<Elem>>> {
    Ok(HomSearch::new(dom, cod)?.run(usize::MAX).solutions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::is_homomorphism;
    use crate::fixtures;

    fn brute_force(dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Vec<Vec<Elem>> {
        let n = dom.size();
        let m = cod.size();
        let mut out = Vec::new();
        let total = m.pow(n as u32);
        for code in 0..total {
            let mut map = vec![0; n];
            let mut c = code;
            for x in (0..n).rev() {
                map[x] = c % m;
                c /= m;
            }
            if is_homomorphism(&map, dom, cod) {
                out.push(map);
            }
        }
        out
    }

    #[test]
    fn group_homomorphisms_match_brute_force() {
        let z4 = fixtures::cyclic_group(4);
        let z2 = fixtures::cyclic_group(2);
        let s3 = fixtures::symmetric_group_3();
        assert_eq!(all_homomorphisms(&z4, &z2).unwrap(), brute_force(&z4, &z2));
        assert_eq!(all_homomorphisms(&z4, &z4).unwrap(), brute_force(&z4, &z4));
        assert_eq!(all_homomorphisms(&z2, &z4).unwrap(), vec![vec![0, 0], vec![0, 2]]);
        assert_eq!(all_homomorphisms(&s3, &s3).unwrap().len(), 10);
    }

    #[test]
    fn example_endomorphisms_match_brute_force() {
        let a = fixtures::three_element_example();
        assert_eq!(all_homomorphisms(&a, &a).unwrap(), brute_force(&a, &a));
    }

    #[test]
    fn restrictions_and_budget() {
        let z4 = fixtures::cyclic_group(4);
        let out = HomSearch::new(&z4, &z4).unwrap().restrict(1, vec![3]).unwrap().run(10);
        assert_eq!(out.solutions, vec![vec![0, 3, 2, 1]]);
        assert!(out.complete);
        let out = HomSearch::new(&z4, &z4).unwrap().with_budget(1).run(10);
        assert!(!out.complete);
    }
}
