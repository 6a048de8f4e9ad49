//! Conversion of closed formulas to clause sets.
//!
//! Pipeline: negation normal form (with `<=>` expanded by polarity and
//! `$true`/`$false` simplified away), Skolemization, distribution into CNF,
//! tautology deletion, and renaming apart.

use std::collections::HashSet;
use std::sync::Arc;

use crate::clause::{rename_apart, Atom, Clause, Literal};
use crate::syntax::{fresh_variable, Formula, Signature, Substitution, Symbol, Term};
use crate::tptp::NamedFormula;

/// Label attached to the clauses produced by [`equality_axioms`].
pub const EQUALITY_LABEL: &str = "equality";

fn mk_and(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::False, _) | (_, Formula::False) => Formula::False,
        (Formula::True, x) | (x, Formula::True) => x,
        (a, b) => a.and(b),
    }
}

fn mk_or(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::True, _) | (_, Formula::True) => Formula::True,
        (Formula::False, x) | (x, Formula::False) => x,
        (a, b) => a.or(b),
    }
}

fn mk_quant(universal: bool, v: Symbol, body: Formula) -> Formula {
    match body {
        Formula::True | Formula::False => body,
        body if universal => Formula::forall(v, body),
        body => Formula::exists(v, body),
    }
}

/// Negation normal form: only `&`, `|`, quantifiers and literals remain.
pub fn nnf(f: &Formula) -> Formula {
    nnf_polar(f, true)
}

fn nnf_polar(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::True => {
            if positive {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::False => {
            if positive {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::Atom(..) | Formula::Equal(..) => {
            if positive {
                f.clone()
            } else {
                f.clone().not()
            }
        }
        Formula::Not(g) => nnf_polar(g, !positive),
        Formula::And(a, b) => {
            if positive {
                mk_and(nnf_polar(a, true), nnf_polar(b, true))
            } else {
                mk_or(nnf_polar(a, false), nnf_polar(b, false))
            }
        }
        Formula::Or(a, b) => {
            if positive {
                mk_or(nnf_polar(a, true), nnf_polar(b, true))
            } else {
                mk_and(nnf_polar(a, false), nnf_polar(b, false))
            }
        }
        Formula::Implies(a, b) => {
            if positive {
                mk_or(nnf_polar(a, false), nnf_polar(b, true))
            } else {
                mk_and(nnf_polar(a, true), nnf_polar(b, false))
            }
        }
        Formula::Iff(a, b) => {
            if positive {
                mk_and(
                    mk_or(nnf_polar(a, false), nnf_polar(b, true)),
                    mk_or(nnf_polar(b, false), nnf_polar(a, true)),
                )
            } else {
                mk_and(
                    mk_or(nnf_polar(a, true), nnf_polar(b, true)),
                    mk_or(nnf_polar(a, false), nnf_polar(b, false)),
                )
            }
        }
        Formula::Forall(v, body) => mk_quant(positive, *v, nnf_polar(body, positive)),
        Formula::Exists(v, body) => mk_quant(!positive, *v, nnf_polar(body, positive)),
    }
}

/// Renames bound variables that reuse a name already bound elsewhere in `f`.
fn rename_bound_apart(f: &Formula) -> Formula {
    fn all_vars(f: &Formula, out: &mut HashSet<Symbol>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => args.iter().for_each(|a| out.extend(a.variables())),
            Formula::Equal(a, b) => {
                out.extend(a.variables());
                out.extend(b.variables());
            }
            Formula::Not(g) => all_vars(g, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                all_vars(a, out);
                all_vars(b, out);
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                out.insert(*v);
                all_vars(g, out);
            }
        }
    }
    fn go(f: &Formula, seen: &mut HashSet<Symbol>, avoid: &mut HashSet<Symbol>) -> Formula {
        match f {
            Formula::True | Formula::False | Formula::Atom(..) | Formula::Equal(..) => f.clone(),
            Formula::Not(g) => go(g, seen, avoid).not(),
            Formula::And(a, b) => go(a, seen, avoid).and(go(b, seen, avoid)),
            Formula::Or(a, b) => go(a, seen, avoid).or(go(b, seen, avoid)),
            Formula::Implies(a, b) => go(a, seen, avoid).implies(go(b, seen, avoid)),
            Formula::Iff(a, b) => go(a, seen, avoid).iff(go(b, seen, avoid)),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let (v, body) = if seen.insert(*v) {
                    (*v, go(body, seen, avoid))
                } else {
                    let fresh = fresh_variable(*v, avoid);
                    avoid.insert(fresh);
                    seen.insert(fresh);
                    let renamed =
                        Substitution::from_pairs([(*v, Term::Var(fresh))]).apply_formula(body);
                    (fresh, go(&renamed, seen, avoid))
                };
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
        }
    }
    let mut avoid = HashSet::new();
    all_vars(f, &mut avoid);
    go(f, &mut HashSet::new(), &mut avoid)
}

/// Replaces every existential of an NNF formula by a fresh Skolem function of
/// the universally quantified variables in whose scope it occurs. New symbols
/// `sk<n>` are registered in `sig` and never clash with symbols already there.
pub fn skolemize(f: &Formula, sig: &mut Signature) -> Formula {
    fn go(
        f: &Formula,
        universals: &mut Vec<Symbol>,
        subst: &mut Substitution,
        sig: &mut Signature,
    ) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(p, args) => Formula::Atom(*p, subst.apply_args(args)),
            Formula::Equal(a, b) => Formula::Equal(subst.apply(a), subst.apply(b)),
            Formula::Not(g) => go(g, universals, subst, sig).not(),
            Formula::And(a, b) => go(a, universals, subst, sig).and(go(b, universals, subst, sig)),
            Formula::Or(a, b) => go(a, universals, subst, sig).or(go(b, universals, subst, sig)),
            Formula::Implies(a, b) => {
                go(a, universals, subst, sig).implies(go(b, universals, subst, sig))
            }
            Formula::Iff(a, b) => go(a, universals, subst, sig).iff(go(b, universals, subst, sig)),
            Formula::Forall(v, body) => {
                universals.push(*v);
                let body = go(body, universals, subst, sig);
                universals.pop();
                Formula::forall(*v, body)
            }
            Formula::Exists(v, body) => {
                let sk = sig.fresh_function("sk", universals.len());
                let args: Vec<Term> = universals.iter().map(|u| Term::Var(*u)).collect();
                let previous = subst.remove(*v);
                subst.insert(*v, Term::app(sk, args));
                let body = go(body, universals, subst, sig);
                subst.remove(*v);
                if let Some(t) = previous {
                    subst.insert(*v, t);
                }
                body
            }
        }
    }
    let f = rename_bound_apart(f);
    go(&f, &mut Vec::new(), &mut Substitution::new(), sig)
}

fn cnf(f: &Formula) -> Vec<Vec<Literal>> {
    match f {
        Formula::True => Vec::new(),
        Formula::False => vec![Vec::new()],
        Formula::Atom(p, args) => vec![vec![Literal::pos(Atom::Pred(*p, args.clone()))]],
        Formula::Equal(a, b) => vec![vec![Literal::pos(Atom::Equal(a.clone(), b.clone()))]],
        Formula::Not(g) => match &**g {
            Formula::Atom(p, args) => vec![vec![Literal::neg(Atom::Pred(*p, args.clone()))]],
            Formula::Equal(a, b) => vec![vec![Literal::neg(Atom::Equal(a.clone(), b.clone()))]],
            _ => unreachable!("negation above a non-atom in NNF"),
        },
        Formula::And(a, b) => {
            let mut out = cnf(a);
            out.extend(cnf(b));
            out
        }
        Formula::Or(a, b) => {
            let left = cnf(a);
            let right = cnf(b);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    let mut c = l.clone();
                    c.extend(r.iter().cloned());
                    out.push(c);
                }
            }
            out
        }
        Formula::Forall(_, body) => cnf(body),
        Formula::Exists(..) | Formula::Implies(..) | Formula::Iff(..) => {
            unreachable!("cnf expects skolemized negation normal form")
        }
    }
}

/// Clausifies one formula. Conjectures are negated first. Skolem symbols are
/// registered in `sig`.
pub fn clausify_formula(f: &Formula, label: Symbol, sig: &mut Signature) -> Vec<Clause> {
    let _ = sig.add_formula(f);
    let skolemized = skolemize(&nnf(f), sig);
    cnf(&skolemized)
        .into_iter()
        .map(|lits| {
            let lits = lits
                .into_iter()
                .filter(|l| !l.is_trivially_false())
                .collect();
            Clause::new(lits, vec![label])
        })
        .filter(|c| !c.is_tautology())
        .collect()
}

/// Clausifies a list of units into an equisatisfiable, renamed-apart clause
/// set. Conjecture units contribute their negation.
pub fn clausify(units: &[NamedFormula], sig: &mut Signature) -> Vec<Clause> {
    for u in units {
        let _ = sig.add_formula(&u.formula);
    }
    let mut out: Vec<Clause> = units
        .iter()
        .flat_map(|u| clausify_formula(&u.as_assumption(), u.label, sig))
        .collect();
    rename_apart(&mut out);
    out
}

/// Reflexivity, symmetry, transitivity, and one congruence clause per
/// argument position of every non-constant function and every predicate.
pub fn equality_axioms(sig: &Signature) -> Vec<Clause> {
    let label = vec![Symbol::intern(EQUALITY_LABEL)];
    let v = Symbol::var;
    let x = || Term::Var(v(0));
    let y = || Term::Var(v(1));
    let z = || Term::Var(v(2));
    let eq = |a: Term, b: Term| Atom::Equal(a, b);
    let mut out = vec![
        Clause::new(vec![Literal::pos(eq(x(), x()))], label.clone()),
        Clause::new(
            vec![Literal::neg(eq(x(), y())), Literal::pos(eq(y(), x()))],
            label.clone(),
        ),
        Clause::new(
            vec![
                Literal::neg(eq(x(), y())),
                Literal::neg(eq(y(), z())),
                Literal::pos(eq(x(), z())),
            ],
            label.clone(),
        ),
    ];
    // arguments other than the substituted one are X2, X3, ...
    let args_with = |arity: usize, pos: usize, t: Term| -> Arc<[Term]> {
        (0..arity)
            .map(|i| {
                if i == pos {
                    t.clone()
                } else {
                    Term::Var(v(i + 2))
                }
            })
            .collect()
    };
    for (&f, &arity) in &sig.functions {
        for pos in 0..arity {
            out.push(Clause::new(
                vec![
                    Literal::neg(eq(x(), y())),
                    Literal::pos(eq(
                        Term::App(f, args_with(arity, pos, x())),
                        Term::App(f, args_with(arity, pos, y())),
                    )),
                ],
                label.clone(),
            ));
        }
    }
    for (&p, &arity) in &sig.predicates {
        for pos in 0..arity {
            out.push(Clause::new(
                vec![
                    Literal::neg(eq(x(), y())),
                    Literal::neg(Atom::Pred(p, args_with(arity, pos, x()))),
                    Literal::pos(Atom::Pred(p, args_with(arity, pos, y()))),
                ],
                label.clone(),
            ));
        }
    }
    rename_apart(&mut out);
    out
}

/// Clausifies `units` and, when any clause mentions equality, appends the
/// equality axioms for the resulting signature (Skolem symbols included).
pub fn clausify_with_equality(units: &[NamedFormula], sig: &mut Signature) -> Vec<Clause> {
    let mut clauses = clausify(units, sig);
    if clauses.iter().any(Clause::has_equality) {
        clauses.extend(equality_axioms(sig));
        rename_apart(&mut clauses);
    }
    clauses
}
