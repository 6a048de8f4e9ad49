//! Literals and clauses.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::syntax::{Formula, Substitution, Symbol, Term};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Pred(Symbol, Arc<[Term]>),
    Equal(Term, Term),
}

impl Atom {
    pub fn pred(p: impl Into<Symbol>, args: Vec<Term>) -> Atom {
        Atom::Pred(p.into(), Arc::from(args))
    }

    pub fn apply(&self, s: &Substitution) -> Atom {
        match self {
            Atom::Pred(p, args) => Atom::Pred(*p, s.apply_args(args)),
            Atom::Equal(a, b) => Atom::Equal(s.apply(a), s.apply(b)),
        }
    }

    pub fn rename(&self, map: &HashMap<Symbol, Symbol>) -> Atom {
        match self {
            Atom::Pred(p, args) if args.is_empty() => Atom::Pred(*p, args.clone()),
            Atom::Pred(p, args) => Atom::Pred(*p, args.iter().map(|a| a.rename(map)).collect()),
            Atom::Equal(a, b) => Atom::Equal(a.rename(map), b.rename(map)),
        }
    }

    pub fn terms(&self) -> &[Term] {
        match self {
            Atom::Pred(_, args) => args,
            Atom::Equal(a, _) => std::slice::from_ref(a),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Atom::Pred(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Atom::Equal(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn weight(&self) -> usize {
        match self {
            Atom::Pred(_, args) => 1 + args.iter().map(Term::weight).sum::<usize>(),
            Atom::Equal(a, b) => 1 + a.weight() + b.weight(),
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Atom::Pred(p, args) => Formula::Atom(*p, args.clone()),
            Atom::Equal(a, b) => Formula::Equal(a.clone(), b.clone()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Literal {
        Literal {
            positive: true,
            atom,
        }
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal {
            positive: false,
            atom,
        }
    }

    pub fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            atom: self.atom.clone(),
        }
    }

    pub fn apply(&self, s: &Substitution) -> Literal {
        Literal {
            positive: self.positive,
            atom: self.atom.apply(s),
        }
    }

    /// `t = t`: true in every interpretation.
    pub fn is_trivially_true(&self) -> bool {
        self.positive && matches!(&self.atom, Atom::Equal(a, b) if a == b)
    }

    /// `t != t`: false in every interpretation.
    pub fn is_trivially_false(&self) -> bool {
        !self.positive && matches!(&self.atom, Atom::Equal(a, b) if a == b)
    }

    pub fn to_formula(&self) -> Formula {
        let f = self.atom.to_formula();
        if self.positive {
            f
        } else {
            f.not()
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.atom, self.positive) {
            (Atom::Equal(a, b), true) => write!(f, "{a} = {b}"),
            (Atom::Equal(a, b), false) => write!(f, "{a} != {b}"),
            (Atom::Pred(p, args), positive) => {
                if !positive {
                    f.write_str("~")?;
                }
                write!(f, "{}", Term::App(*p, args.clone()))
            }
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_formula(), f)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A disjunction of literals, implicitly universally quantified. Duplicate
/// literals are merged on construction; the empty clause is a contradiction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
    /// Labels of the input units this clause descends from, sorted.
    pub provenance: Vec<Symbol>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>, provenance: Vec<Symbol>) -> Clause {
        let mut lits: Vec<Literal> = Vec::with_capacity(literals.len());
        for l in literals {
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        let mut provenance = provenance;
        provenance.sort();
        provenance.dedup();
        Clause {
            literals: lits,
            provenance,
        }
    }

    pub fn empty() -> Clause {
        Clause::new(Vec::new(), Vec::new())
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_tautology(&self) -> bool {
        self.literals.iter().any(Literal::is_trivially_true)
            || self.literals.iter().enumerate().any(|(i, l)| {
                self.literals[i + 1..]
                    .iter()
                    .any(|m| m.positive != l.positive && m.atom == l.atom)
            })
    }

    pub fn has_equality(&self) -> bool {
        self.literals
            .iter()
            .any(|l| matches!(l.atom, Atom::Equal(..)))
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for l in &self.literals {
            l.atom.collect_vars(&mut out);
        }
        out
    }

    pub fn weight(&self) -> usize {
        self.literals.iter().map(|l| l.atom.weight()).sum()
    }

    pub fn apply(&self, s: &Substitution) -> Clause {
        Clause::new(
            self.literals.iter().map(|l| l.apply(s)).collect(),
            self.provenance.clone(),
        )
    }

    /// Renames variables to `X<offset>, X<offset+1>, ...` in order of first
    /// occurrence. Two clauses equal up to variable renaming (with the same
    /// literal order) have identical normal forms.
    pub fn normalized(&self, offset: usize) -> Clause {
        let map: HashMap<Symbol, Symbol> = self
            .variables()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, Symbol::var(offset + i)))
            .collect();
        self.rename(&map)
    }

    pub fn rename(&self, map: &HashMap<Symbol, Symbol>) -> Clause {
        Clause {
            literals: self
                .literals
                .iter()
                .map(|l| Literal {
                    positive: l.positive,
                    atom: l.atom.rename(map),
                })
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Equal up to a bijective renaming of variables.
    pub fn is_variant_of(&self, other: &Clause) -> bool {
        self.literals.len() == other.literals.len()
            && self.normalized(0).literals == other.normalized(0).literals
    }

    /// Universal closure of the disjunction of the literals.
    pub fn to_formula(&self) -> Formula {
        let body = self
            .literals
            .iter()
            .map(Literal::to_formula)
            .reduce(|a, b| a.or(b))
            .unwrap_or(Formula::False);
        let vars = self.variables();
        vars.into_iter()
            .rev()
            .fold(body, |b, v| Formula::forall(v, b))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("$false");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Renames variables so that no two clauses share one.
pub fn rename_apart(clauses: &mut [Clause]) {
    let mut next = 0;
    for c in clauses.iter_mut() {
        let n = c.variables().len();
        *c = c.normalized(next);
        next += n;
    }
}

/// Diagnostic dump: one `label: lit | lit | ...` line per clause.
pub fn dump_clauses(clauses: &[Clause]) -> String {
    let mut out = String::new();
    for c in clauses {
        let label = c
            .provenance
            .iter()
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("{label}: {c}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: Term) -> Atom {
        Atom::pred("p", vec![t])
    }

    #[test]
    fn duplicates_merge() {
        let a = Term::constant("a");
        let c = Clause::new(vec![Literal::pos(p(a.clone())), Literal::pos(p(a))], vec![]);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn tautologies() {
        let a = Term::constant("a");
        let c = Clause::new(
            vec![Literal::pos(p(a.clone())), Literal::neg(p(a.clone()))],
            vec![],
        );
        assert!(c.is_tautology());
        let e = Clause::new(
            vec![Literal::pos(Atom::Equal(a.clone(), a.clone()))],
            vec![],
        );
        assert!(e.is_tautology());
        let d = Clause::new(
            vec![Literal::pos(p(a.clone())), Literal::neg(p(Term::var("Y")))],
            vec![],
        );
        assert!(!d.is_tautology());
    }

    #[test]
    fn normalization_and_variants() {
        let c = Clause::new(
            vec![
                Literal::pos(Atom::pred("q", vec![Term::var("B"), Term::var("A")])),
                Literal::neg(p(Term::var("B"))),
            ],
            vec![],
        );
        let n = c.normalized(0);
        assert_eq!(n.to_string(), "q(X0,X1) | ~p(X0)");
        assert!(c.is_variant_of(&n));
        let other = Clause::new(
            vec![
                Literal::pos(Atom::pred("q", vec![Term::var("B"), Term::var("B")])),
                Literal::neg(p(Term::var("B"))),
            ],
            vec![],
        );
        assert!(!c.is_variant_of(&other));
    }

    #[test]
    fn display_of_empty_clause() {
        assert_eq!(Clause::empty().to_string(), "$false");
        assert_eq!(Clause::empty().to_formula(), Formula::False);
    }
}
