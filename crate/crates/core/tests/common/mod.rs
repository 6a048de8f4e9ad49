//! Brute-force oracles shared by the integration tests. None of them goes
//! through grounding, the SAT solver or the prover.

#![allow(dead_code)]

use folkit::clause::{Atom, Clause, Literal};
use folkit::model::Interpretation;
use folkit::Signature;

/// Number of interpretations of `sig` over a domain of `n` elements, or
/// `None` past `u64`.
pub fn interpretation_count(sig: &Signature, n: usize) -> Option<u64> {
    let mut total: u64 = 1;
    for &arity in sig.functions.values() {
        let cells = (n as u64).checked_pow(arity as u32)?;
        total = total.checked_mul((n as u64).checked_pow(cells as u32)?)?;
    }
    for &arity in sig.predicates.values() {
        let cells = (n as u64).checked_pow(arity as u32)?;
        total = total.checked_mul(2u64.checked_pow(cells as u32)?)?;
    }
    Some(total)
}

/// Calls `visit` on every interpretation of `sig` of size `n` until it
/// returns true. Returns whether it ever did.
pub fn any_interpretation(
    sig: &Signature,
    n: usize,
    mut visit: impl FnMut(&Interpretation) -> bool,
) -> bool {
    let mut i = Interpretation::new(n, sig);
    loop {
        if visit(&i) {
            return true;
        }
        if !advance(&mut i) {
            return false;
        }
    }
}

// odometer over constants, function cells, then predicate cells
fn advance(i: &mut Interpretation) -> bool {
    let n = i.size;
    for v in i.constants.values_mut() {
        *v += 1;
        if *v < n {
            return true;
        }
        *v = 0;
    }
    for t in i.functions.values_mut() {
        for v in t.values.iter_mut() {
            *v += 1;
            if *v < n {
                return true;
            }
            *v = 0;
        }
    }
    for t in i.predicates.values_mut() {
        for h in t.holds.iter_mut() {
            *h = !*h;
            if *h {
                return true;
            }
        }
    }
    false
}

/// DIMACS-style literals: `v` or `-v` for variables `1..=vars`.
pub fn truth_table_satisfiable(vars: usize, clauses: &[Vec<i32>]) -> bool {
    (0u32..1 << vars).any(|bits| {
        clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let value = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                value == (l > 0)
            })
        })
    })
}

/// The same clause set with variable `v` read as the proposition `pv`.
pub fn propositional_clauses(clauses: &[Vec<i32>]) -> Vec<Clause> {
    clauses
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let lits = c
                .iter()
                .map(|&l| {
                    let atom = Atom::pred(format!("p{}", l.unsigned_abs()).as_str(), vec![]);
                    if l > 0 {
                        Literal::pos(atom)
                    } else {
                        Literal::neg(atom)
                    }
                })
                .collect();
            Clause::new(lits, vec![format!("c{k}").as_str().into()])
        })
        .collect()
}
