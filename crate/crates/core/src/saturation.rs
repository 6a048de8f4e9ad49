//! Given-clause refutation prover: unrestricted binary resolution and
//! factoring, forward subsumption and tautology deletion. A refutation comes
//! with a [`Derivation`] that [`check_derivation`] re-verifies step by step.

use std::collections::{BTreeSet, HashMap};

use std::fmt;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

use crate::clause::{Atom, Clause, Literal};
use crate::syntax::{Substitution, Symbol, Term};

mod engine;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnificationResult {
    Mgu(Substitution),
    Clash,
    OccursCheckFailure,
}

impl UnificationResult {
    pub fn mgu(self) -> Option<Substitution> {
        match self {
            UnificationResult::Mgu(s) => Some(s),
            _ => None,
        }
    }
}

enum Failure {
    Clash,
    Occurs,
}

#[derive(Default)]
struct Unifier {
    bindings: HashMap<Symbol, Term>,
}

impl Unifier {
    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: Symbol, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> Result<(), Failure> {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => Ok(()),
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if self.occurs(*x, t) {
                    return Err(Failure::Occurs);
                }
                self.bindings.insert(*x, t.clone());
                Ok(())
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return Err(Failure::Clash);
                }
                for (x, y) in fa.iter().zip(ga.iter()) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
        }
    }

    fn resolve(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Var(v) => Term::Var(*v),
            Term::App(f, args) if args.is_empty() => Term::App(*f, args.clone()),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    fn finish(self, result: Result<(), Failure>) -> UnificationResult {
        match result {
            Err(Failure::Clash) => UnificationResult::Clash,
            Err(Failure::Occurs) => UnificationResult::OccursCheckFailure,
            Ok(()) => {
                let mut pairs: Vec<(Symbol, Term)> = Vec::with_capacity(self.bindings.len());
                for v in self.bindings.keys() {
                    pairs.push((*v, self.resolve(&Term::Var(*v))));
                }
                UnificationResult::Mgu(Substitution::from_pairs(pairs))
            }
        }
    }
}

/// Most general unifier with occurs check. The result is idempotent.
pub fn unify(a: &Term, b: &Term) -> UnificationResult {
    let mut u = Unifier::default();
    let r = u.unify(a, b);
    u.finish(r)
}

pub fn unify_atoms(a: &Atom, b: &Atom) -> UnificationResult {
    let mut u = Unifier::default();
    let r = match (a, b) {
        (Atom::Pred(p, pa), Atom::Pred(q, qa)) if p == q && pa.len() == qa.len() => pa
            .iter()
            .zip(qa.iter())
            .try_for_each(|(x, y)| u.unify(x, y)),
        (Atom::Equal(a1, a2), Atom::Equal(b1, b2)) => u.unify(a1, b1).and_then(|_| u.unify(a2, b2)),
        _ => Err(Failure::Clash),
    };
    u.finish(r)
}

/// One conclusion of a resolution or factoring inference.
#[derive(Clone, Debug)]
pub struct Inference {
    pub clause: Clause,
    /// Resolution: literal index in the left and right premise.
    /// Factoring: the two merged literal indices, the second one is dropped.
    pub positions: [usize; 2],
    pub mgu: Substitution,
}

fn merged_provenance(a: &Clause, b: &Clause) -> Vec<Symbol> {
    let mut p = a.provenance.clone();
    p.extend(b.provenance.iter().copied());
    p
}

fn resolvent(left: &Clause, right: &Clause, i: usize, j: usize, mgu: &Substitution) -> Clause {
    let lits = left
        .literals()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i)
        .chain(right.literals().iter().enumerate().filter(|(k, _)| *k != j))
        .map(|(_, l)| l.apply(mgu))
        .collect();
    Clause::new(lits, merged_provenance(left, right))
}

fn factor_of(c: &Clause, j: usize, mgu: &Substitution) -> Clause {
    let lits = c
        .literals()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != j)
        .map(|(_, l)| l.apply(mgu))
        .collect();
    Clause::new(lits, c.provenance.clone())
}

/// All binary resolvents of two clauses that must not share variables.
pub fn resolve(left: &Clause, right: &Clause) -> Vec<Inference> {
    let mut out = Vec::new();
    for (i, l) in left.literals().iter().enumerate() {
        for (j, r) in right.literals().iter().enumerate() {
            if l.positive == r.positive {
                continue;
            }
            if let UnificationResult::Mgu(mgu) = unify_atoms(&l.atom, &r.atom) {
                out.push(Inference {
                    clause: resolvent(left, right, i, j, &mgu),
                    positions: [i, j],
                    mgu,
                });
            }
        }
    }
    out
}

/// All binary factors of a clause.
pub fn factor(c: &Clause) -> Vec<Inference> {
    let lits = c.literals();
    let mut out = Vec::new();
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            if lits[i].positive != lits[j].positive {
                continue;
            }
            if let UnificationResult::Mgu(mgu) = unify_atoms(&lits[i].atom, &lits[j].atom) {
                out.push(Inference {
                    clause: factor_of(c, j, &mgu),
                    positions: [i, j],
                    mgu,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Input(Symbol),
    Resolution {
        parents: [usize; 2],
        positions: [usize; 2],
        mgu: Substitution,
    },
    Factoring {
        parent: usize,
        positions: [usize; 2],
        mgu: Substitution,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub id: usize,
    pub clause: Clause,
    pub rule: Rule,
}

/// A sequence of inference steps, each referring only to earlier steps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn is_refutation(&self) -> bool {
        self.steps.last().is_some_and(|s| s.clause.is_empty())
    }

    /// Input labels the derivation depends on, sorted.
    pub fn input_labels(&self) -> Vec<Symbol> {
        let set: BTreeSet<Symbol> = self
            .steps
            .iter()
            .filter_map(|s| match s.rule {
                Rule::Input(l) => Some(l),
                _ => None,
            })
            .collect();
        set.into_iter().collect()
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            write!(f, "{}. {} [", s.id, s.clause)?;
            match &s.rule {
                Rule::Input(label) => write!(f, "input {label}")?,
                Rule::Resolution { parents, .. } => {
                    write!(f, "resolution {} {}", parents[0], parents[1])?
                }
                Rule::Factoring { parent, .. } => write!(f, "factoring {parent}")?,
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("step {step}: {reason}")]
pub struct DerivationError {
    pub step: usize,
    pub reason: String,
}

/// Re-checks every step of `d`. Input steps must be variants of clauses in
/// `inputs`; inference steps must re-derive their recorded clause from their
/// parents with the recorded unifier. The right premise of a resolution is
/// renamed apart by normalizing its variables after those of the left one.
pub fn check_derivation(d: &Derivation, inputs: &[Clause]) -> Result<(), DerivationError> {
    let mut by_id: HashMap<usize, &Clause> = HashMap::new();
    let fail = |step: usize, reason: String| Err(DerivationError { step, reason });
    for s in &d.steps {
        if by_id.contains_key(&s.id) {
            return fail(s.id, "duplicate step id".into());
        }
        let parent = |id: usize| -> Result<&Clause, DerivationError> {
            by_id.get(&id).copied().ok_or(DerivationError {
                step: s.id,
                reason: format!("parent {id} does not precede this step"),
            })
        };
        let derived = match &s.rule {
            Rule::Input(label) => {
                if !inputs.iter().any(|c| c.is_variant_of(&s.clause)) {
                    return fail(s.id, format!("clause is not among the inputs ({label})"));
                }
                by_id.insert(s.id, &s.clause);
                continue;
            }
            Rule::Resolution {
                parents,
                positions,
                mgu,
            } => {
                let left = parent(parents[0])?.normalized(0);
                let right_raw = parent(parents[1])?;
                let right = right_raw.normalized(left.variables().len());
                let [i, j] = *positions;
                let (Some(l), Some(r)) = (left.literals().get(i), right.literals().get(j)) else {
                    return fail(s.id, "literal position out of range".into());
                };
                if l.positive == r.positive {
                    return fail(s.id, "resolved literals have the same sign".into());
                }
                if l.atom.apply(mgu) != r.atom.apply(mgu) {
                    return fail(
                        s.id,
                        "recorded substitution does not unify the atoms".into(),
                    );
                }
                resolvent(&left, &right, i, j, mgu)
            }
            Rule::Factoring {
                parent: p,
                positions,
                mgu,
            } => {
                let c = parent(*p)?.normalized(0);
                let [i, j] = *positions;
                let (Some(a), Some(b)) = (c.literals().get(i), c.literals().get(j)) else {
                    return fail(s.id, "literal position out of range".into());
                };
                if i == j || a.positive != b.positive {
                    return fail(s.id, "factored literals differ in sign".into());
                }
                if a.atom.apply(mgu) != b.atom.apply(mgu) {
                    return fail(
                        s.id,
                        "recorded substitution does not unify the atoms".into(),
                    );
                }
                factor_of(&c, j, mgu)
            }
        };
        if derived.normalized(0).literals() != s.clause.normalized(0).literals() {
            return fail(
                s.id,
                format!(
                    "recorded clause `{}` but the rule yields `{}`",
                    s.clause, derived
                ),
            );
        }
        by_id.insert(s.id, &s.clause);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResourceReason {
    ClauseLimit,
    TimeLimit,
    MemoryLimit,
    Cancelled,
}

impl fmt::Display for ResourceReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResourceReason::ClauseLimit => "clause limit",
            ResourceReason::TimeLimit => "time limit",
            ResourceReason::MemoryLimit => "memory limit",
            ResourceReason::Cancelled => "cancelled",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SaturationResult {
    Refutation(Derivation),
    Saturated,
    ResourceOut(ResourceReason),
}

#[derive(Clone, Debug)]
pub struct SaturationLimits {
    pub max_clauses: usize,
    pub time_limit: Duration,
    /// Rough bound on the bytes held by kept clauses.
    pub max_memory: usize,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SaturationLimits {
    fn default() -> Self {
        SaturationLimits {
            max_clauses: 1_000_000,
            time_limit: Duration::from_secs(60),
            max_memory: 4 << 30,
            cancel: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SaturationStats {
    pub generated: usize,
    pub kept: usize,
    pub selected: usize,
}

#[derive(Clone, Debug)]
pub struct SaturationRun {
    pub result: SaturationResult,
    pub stats: SaturationStats,
}

/// One-way matching: extends `s` so that `pattern`·s == `target`.
fn match_term<'t>(pattern: &Term, target: &'t Term, s: &mut Vec<(Symbol, &'t Term)>) -> bool {
    match pattern {
        Term::Var(v) => match s.iter().find(|(w, _)| w == v) {
            Some((_, t)) => *t == target,
            None => {
                s.push((*v, target));
                true
            }
        },
        Term::App(f, fa) => match target {
            Term::App(g, ga) if f == g && fa.len() == ga.len() => {
                fa.iter().zip(ga.iter()).all(|(x, y)| match_term(x, y, s))
            }
            _ => false,
        },
    }
}

fn match_literal<'t>(p: &Literal, t: &'t Literal, s: &mut Vec<(Symbol, &'t Term)>) -> bool {
    if p.positive != t.positive {
        return false;
    }
    let mark = s.len();
    let ok = match (&p.atom, &t.atom) {
        (Atom::Pred(f, fa), Atom::Pred(g, ga)) if f == g && fa.len() == ga.len() => {
            fa.iter().zip(ga.iter()).all(|(x, y)| match_term(x, y, s))
        }
        (Atom::Equal(a1, a2), Atom::Equal(b1, b2)) => {
            match_term(a1, b1, s) && match_term(a2, b2, s)
        }
        _ => false,
    };
    if !ok {
        s.truncate(mark);
    }
    ok
}

/// Multiset subsumption: an injective map of the literals of `c` into those
/// of `d` under one substitution.
pub fn subsumes(c: &Clause, d: &Clause) -> bool {
    fn go<'t>(
        c: &[Literal],
        d: &'t [Literal],
        used: &mut [bool],
        s: &mut Vec<(Symbol, &'t Term)>,
    ) -> bool {
        let Some((first, rest)) = c.split_first() else {
            return true;
        };
        for (k, target) in d.iter().enumerate() {
            if used[k] {
                continue;
            }
            let mark = s.len();
            if match_literal(first, target, s) {
                used[k] = true;
                if go(rest, d, used, s) {
                    return true;
                }
                used[k] = false;
                s.truncate(mark);
            }
        }
        false
    }
    if c.len() > d.len() {
        return false;
    }
    let mut small = [false; 16];
    let mut large;
    let used: &mut [bool] = if d.len() <= small.len() {
        &mut small[..d.len()]
    } else {
        large = vec![false; d.len()];
        &mut large
    };
    go(c.literals(), d.literals(), used, &mut Vec::with_capacity(8))
}

/// Runs the given-clause loop on `clauses` until the empty clause is
/// derived, no unprocessed clause remains, or a limit is hit.
pub fn saturate(clauses: &[Clause], limits: &SaturationLimits) -> SaturationRun {
    let mut engine = engine::Engine::new(limits);
    let result = engine.run(clauses);
    SaturationRun {
        result,
        stats: engine.stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Term {
        Term::constant(s)
    }
    fn v(s: &str) -> Term {
        Term::var(s)
    }
    fn bf(t: Term) -> Term {
        Term::app("bestFriend", vec![t])
    }
    fn lit(positive: bool, p: &str, args: Vec<Term>) -> Literal {
        Literal {
            positive,
            atom: Atom::pred(p, args),
        }
    }
    fn clause(lits: Vec<Literal>) -> Clause {
        Clause::new(lits, vec![Symbol::intern("t")])
    }

    #[test]
    fn unify_examples() {
        let r = unify(&v("X"), &bf(c("tarr")));
        assert_eq!(
            r,
            UnificationResult::Mgu(Substitution::from_pairs([(
                Symbol::intern("X"),
                bf(c("tarr"))
            )]))
        );
        assert_eq!(unify(&bf(v("X")), &c("tarr")), UnificationResult::Clash);
        assert_eq!(
            unify(&v("X"), &bf(v("X"))),
            UnificationResult::OccursCheckFailure
        );
    }

    #[test]
    fn unifier_is_idempotent_and_unifies() {
        let a = Term::app("f", vec![v("X"), v("Y"), bf(v("Z"))]);
        let b = Term::app("f", vec![v("Y"), v("Z"), v("W")]);
        let s = unify(&a, &b).mgu().unwrap();
        assert!(s.is_idempotent());
        assert_eq!(s.apply(&a), s.apply(&b));
    }

    #[test]
    fn resolve_examples() {
        let r = resolve(
            &clause(vec![lit(true, "p", vec![v("X")])]),
            &clause(vec![lit(false, "p", vec![c("a")]), lit(true, "q", vec![])]),
        );
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].clause.to_string(), "q");

        let r = resolve(
            &clause(vec![lit(true, "p", vec![])]),
            &clause(vec![lit(false, "p", vec![])]),
        );
        assert_eq!(r.len(), 1);
        assert!(r[0].clause.is_empty());

        let r = resolve(
            &clause(vec![lit(true, "p", vec![c("a")])]),
            &clause(vec![lit(true, "p", vec![c("b")])]),
        );
        assert!(r.is_empty());
    }

    #[test]
    fn factor_examples() {
        let f = factor(&clause(vec![
            lit(true, "p", vec![v("X")]),
            lit(true, "p", vec![c("a")]),
        ]));
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].clause.to_string(), "p(a)");
        assert!(factor(&clause(vec![
            lit(true, "p", vec![c("a")]),
            lit(false, "p", vec![c("a")])
        ]))
        .is_empty());
        assert!(factor(&clause(vec![
            lit(true, "p", vec![c("a")]),
            lit(true, "q", vec![c("b")])
        ]))
        .is_empty());
    }

    #[test]
    fn subsumption() {
        let general = clause(vec![lit(true, "p", vec![v("X")])]);
        let specific = clause(vec![lit(true, "p", vec![c("a")]), lit(true, "q", vec![])]);
        assert!(subsumes(&general, &specific));
        assert!(!subsumes(&specific, &general));
        // multiset: two literals cannot both map onto one
        let two = clause(vec![
            lit(true, "p", vec![v("X")]),
            lit(true, "p", vec![v("Y")]),
        ]);
        assert!(!subsumes(&two, &clause(vec![lit(true, "p", vec![c("a")])])));
        // shared variable must be bound consistently
        let shared = clause(vec![lit(true, "r", vec![v("X"), v("X")])]);
        assert!(!subsumes(
            &shared,
            &clause(vec![lit(true, "r", vec![c("a"), c("b")])])
        ));
    }

    #[test]
    fn saturate_small_sets() {
        let run = saturate(
            &[clause(vec![lit(true, "p", vec![])])],
            &SaturationLimits::default(),
        );
        assert_eq!(run.result, SaturationResult::Saturated);

        let inputs = vec![
            clause(vec![
                lit(true, "p", vec![v("X")]),
                lit(true, "q", vec![v("X")]),
            ]),
            clause(vec![lit(false, "p", vec![c("a")])]),
            clause(vec![lit(false, "q", vec![v("Y")])]),
        ];
        let run = saturate(&inputs, &SaturationLimits::default());
        let SaturationResult::Refutation(d) = run.result else {
            panic!("expected refutation, got {:?}", run.result);
        };
        assert!(d.is_refutation());
        check_derivation(&d, &inputs).unwrap();
    }

    #[test]
    fn refutation_needs_factoring() {
        // {p(X) | p(Y)}, {~p(U) | ~p(V)} is unsatisfiable only with factoring
        let inputs = vec![
            clause(vec![
                lit(true, "p", vec![v("X")]),
                lit(true, "p", vec![v("Y")]),
            ]),
            clause(vec![
                lit(false, "p", vec![v("U")]),
                lit(false, "p", vec![v("V")]),
            ]),
        ];
        let run = saturate(&inputs, &SaturationLimits::default());
        let SaturationResult::Refutation(d) = run.result else {
            panic!("expected refutation");
        };
        check_derivation(&d, &inputs).unwrap();
        assert!(d
            .steps
            .iter()
            .any(|s| matches!(s.rule, Rule::Factoring { .. })));
    }

    #[test]
    fn checker_catches_tampering() {
        let inputs = vec![
            clause(vec![
                lit(true, "p", vec![v("X")]),
                lit(true, "q", vec![v("X")]),
                lit(true, "r", vec![]),
            ]),
            clause(vec![lit(false, "p", vec![c("a")])]),
            clause(vec![lit(false, "q", vec![v("Y")])]),
            clause(vec![lit(false, "r", vec![])]),
        ];
        let SaturationResult::Refutation(d) =
            saturate(&inputs, &SaturationLimits::default()).result
        else {
            panic!("expected refutation");
        };
        check_derivation(&d, &inputs).unwrap();
        let middle = d
            .steps
            .iter()
            .position(|s| !matches!(s.rule, Rule::Input(_)) && !s.clause.is_empty())
            .expect("a non-empty derived step");
        let mut tampered = d.clone();
        let lits = tampered.steps[middle].clause.literals()[1..].to_vec();
        tampered.steps[middle].clause = Clause::new(lits, vec![]);
        let err = check_derivation(&tampered, &inputs).unwrap_err();
        assert_eq!(err.step, tampered.steps[middle].id);

        // an input step whose clause was never given
        let mut forged = d.clone();
        forged.steps[0].clause = clause(vec![lit(true, "zzz", vec![])]);
        assert!(check_derivation(&forged, &inputs).is_err());
    }

    #[test]
    fn empty_derivation_checks_vacuously() {
        let d = Derivation::default();
        assert!(check_derivation(&d, &[]).is_ok());
        assert!(!d.is_refutation());
    }

    #[test]
    fn empty_input_clause_is_immediate_refutation() {
        let inputs = vec![Clause::new(vec![], vec![Symbol::intern("f")])];
        let SaturationResult::Refutation(d) =
            saturate(&inputs, &SaturationLimits::default()).result
        else {
            panic!("expected refutation");
        };
        assert_eq!(d.steps.len(), 1);
        assert_eq!(d.to_string(), "0. $false [input f]\n");
    }

    #[test]
    fn limits_are_reported() {
        // p(a), p(X) -> p(f(X)) never saturates
        let inputs = vec![
            clause(vec![lit(true, "p", vec![c("a")])]),
            clause(vec![
                lit(false, "p", vec![v("X")]),
                lit(true, "p", vec![Term::app("f", vec![v("X")])]),
            ]),
        ];
        let limits = SaturationLimits {
            max_clauses: 50,
            ..Default::default()
        };
        assert_eq!(
            saturate(&inputs, &limits).result,
            SaturationResult::ResourceOut(ResourceReason::ClauseLimit)
        );
        let cancel = Arc::new(AtomicBool::new(true));
        let limits = SaturationLimits {
            cancel: Some(cancel),
            ..Default::default()
        };
        assert_eq!(
            saturate(&inputs, &limits).result,
            SaturationResult::ResourceOut(ResourceReason::Cancelled)
        );
    }
}
