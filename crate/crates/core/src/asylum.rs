//! The asylum of Doctor Tarr and Professor Fether: twelve hypotheses about
//! who is a doctor and who is sane, where "x believes P" is `sane(x) <=> P`.

use indexmap::IndexMap;
use thiserror::Error;

use crate::syntax::{Formula, Signature, Symbol, Term};
use crate::tptp::NamedFormula;

/// The Figure 1 problem file: hypotheses 4, 5, 7, 8, 10, 12 and a `false`
/// conjecture.
pub const FIGURE1_TPTP: &str = include_str!("../corpus/fig1.p");

/// All twelve hypotheses in the same format.
pub const ALL_HYPOTHESES_TPTP: &str = include_str!("../corpus/asylum_all.p");

pub const LABELS: [&str; 12] = [
    "ax1", "ax2", "ax3", "ax4", "ax5", "ax6", "ax7", "ax8", "ax9", "ax10", "ax11", "ax12",
];

/// The six hypotheses of the reduced contradictory set.
pub const REDUCED: [&str; 6] = ["ax4", "ax5", "ax7", "ax8", "ax10", "ax12"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown hypothesis label `{0}`")]
pub struct UnknownLabel(pub String);

fn doctor(t: Term) -> Formula {
    Formula::atom("doctor", vec![t])
}
fn sane(t: Term) -> Formula {
    Formula::atom("sane", vec![t])
}
fn peculiar(t: Term) -> Formula {
    Formula::atom("peculiar", vec![t])
}
fn special(t: Term) -> Formula {
    Formula::atom("special", vec![t])
}
fn best_friend(t: Term) -> Term {
    Term::app("bf", vec![t])
}
fn tarr() -> Term {
    Term::constant("tarr")
}
fn fether() -> Term {
    Term::constant("fether")
}
fn x() -> Term {
    Term::var("X")
}
fn y() -> Term {
    Term::var("Y")
}

/// `agent` believes `p`.
pub fn belief(agent: Term, p: Formula) -> Formula {
    sane(agent).iff(p)
}

/// Predicates `doctor`, `sane`, `peculiar`, `special`; function `bf`;
/// constants `tarr`, `fether`.
pub fn signature() -> Signature {
    let mut sig = Signature::new();
    for p in ["doctor", "sane", "peculiar", "special"] {
        sig.add_predicate(Symbol::intern(p), 1).unwrap();
    }
    sig.add_function(Symbol::intern("bf"), 1).unwrap();
    sig.add_function(Symbol::intern("tarr"), 0).unwrap();
    sig.add_function(Symbol::intern("fether"), 0).unwrap();
    sig
}

pub fn asylum_hypotheses() -> IndexMap<Symbol, NamedFormula> {
    let patient = |t: Term| doctor(t).not();
    let formulas = [
        doctor(tarr()),
        doctor(fether()),
        Formula::exists(
            "X",
            doctor(x())
                .and(Formula::equal(x(), tarr()).not())
                .and(Formula::equal(x(), fether()).not()),
        ),
        // peculiar: believes they are a patient
        Formula::forall("X", peculiar(x()).iff(belief(x(), patient(x())))),
        // special: every patient believes X peculiar, no doctor does
        Formula::forall(
            "X",
            special(x()).iff(Formula::forall(
                "Y",
                patient(y()).iff(belief(y(), peculiar(x()))),
            )),
        ),
        Formula::exists("X", sane(x())),
        // condition C
        Formula::forall(
            "X",
            Formula::forall(
                "Y",
                belief(x(), special(y())).implies(belief(best_friend(x()), patient(y()))),
            ),
        ),
        belief(tarr(), Formula::forall("X", doctor(x()).implies(sane(x())))),
        belief(
            tarr(),
            Formula::exists("X", patient(x()).and(sane(x()).not())),
        ),
        belief(
            fether(),
            Formula::forall("X", patient(x()).implies(sane(x()).not())),
        ),
        belief(fether(), Formula::exists("X", doctor(x()).and(sane(x())))),
        belief(fether(), sane(tarr())),
    ];
    LABELS
        .iter()
        .zip(formulas)
        .map(|(label, f)| (Symbol::intern(label), NamedFormula::axiom(*label, f)))
        .collect()
}

/// The hypotheses named by `labels`, in the order given.
pub fn subset<S: AsRef<str>>(labels: &[S]) -> Result<Vec<NamedFormula>, UnknownLabel> {
    let all = asylum_hypotheses();
    labels
        .iter()
        .map(|l| {
            all.get(&Symbol::intern(l.as_ref()))
                .cloned()
                .ok_or_else(|| UnknownLabel(l.as_ref().to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_equal;
    use crate::tptp::{parse_formula, parse_tptp, print_tptp, Problem};

    #[test]
    fn belief_is_a_biconditional() {
        let a = Term::constant("a");
        assert_eq!(
            belief(a.clone(), sane(a.clone())),
            sane(a.clone()).iff(sane(a.clone()))
        );
        let b = Term::constant("b");
        let p = Formula::prop("p");
        assert_eq!(
            belief(a.clone(), belief(b.clone(), p.clone())),
            sane(a).iff(sane(b).iff(p))
        );
    }

    #[test]
    fn hypotheses_match_their_text() {
        let h = asylum_hypotheses();
        let expect = [
            ("ax1", "doctor(tarr)"),
            ("ax2", "doctor(fether)"),
            ("ax3", "?[X] : ((doctor(X) & X != tarr) & X != fether)"),
            ("ax6", "?[X] : sane(X)"),
            ("ax8", "sane(tarr) <=> ![X] : (doctor(X) => sane(X))"),
            ("ax9", "sane(tarr) <=> ?[X] : (~doctor(X) & ~sane(X))"),
            ("ax11", "sane(fether) <=> ?[X] : (doctor(X) & sane(X))"),
            ("ax12", "sane(fether) <=> sane(tarr)"),
        ];
        for (label, text) in expect {
            let f = &h[&Symbol::intern(label)].formula;
            assert!(
                alpha_equal(f, &parse_formula(text).unwrap()),
                "{label}: {f}"
            );
        }
    }

    #[test]
    fn figure1_units_agree_with_programmatic_ones() {
        let problem = parse_tptp(FIGURE1_TPTP).unwrap();
        let h = asylum_hypotheses();
        let axioms: Vec<_> = problem.axioms().collect();
        assert_eq!(axioms.len(), 6);
        for unit in axioms {
            assert!(
                alpha_equal(&unit.formula, &h[&unit.label].formula),
                "{}",
                unit.label
            );
        }
        assert_eq!(problem.conjecture().unwrap().formula, Formula::False);
    }

    #[test]
    fn generated_corpus_file_is_current() {
        let all: Vec<_> = asylum_hypotheses().into_values().collect();
        let printed = print_tptp(&Problem::from_units(all).unwrap());
        assert_eq!(printed, ALL_HYPOTHESES_TPTP);
    }

    #[test]
    fn signature_is_exact() {
        let all: Vec<_> = asylum_hypotheses().into_values().collect();
        let used = Signature::of_formulas(all.iter().map(|u| &u.formula)).unwrap();
        let sig = signature();
        assert_eq!(used.predicates.len(), sig.predicates.len());
        assert_eq!(used.functions.len(), sig.functions.len());
        for (p, a) in &used.predicates {
            assert_eq!(sig.predicates.get(p), Some(a));
        }
        for (f, a) in &used.functions {
            assert_eq!(sig.functions.get(f), Some(a));
        }
    }

    #[test]
    fn subsets() {
        let s = subset(&REDUCED).unwrap();
        let labels: Vec<_> = s.iter().map(|u| u.label.as_str()).collect();
        assert_eq!(labels, REDUCED);
        assert!(subset::<&str>(&[]).unwrap().is_empty());
        assert_eq!(subset(&["ax13"]), Err(UnknownLabel("ax13".into())));
    }
}
