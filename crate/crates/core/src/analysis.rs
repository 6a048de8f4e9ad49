//! Consistency checks, conjecture proving and minimal unsatisfiable subsets.
//! Every query races the saturation prover against the model finder; the
//! first decisive answer cancels the other and its witness is re-verified
//! before it is reported.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::clausify::clausify_with_equality;
use crate::model::{evaluate, find_model, Interpretation, ModelLimits, ModelSearchResult};
use crate::saturation::{
    check_derivation, saturate, Derivation, SaturationLimits, SaturationResult,
};
use crate::syntax::{Formula, Signature, Symbol};
use crate::tptp::{NamedFormula, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Unsatisfiable,
    Satisfiable,
    Theorem,
    CounterSatisfiable,
    Unknown,
}

impl Status {
    pub fn is_decisive(self) -> bool {
        self != Status::Unknown
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Unsatisfiable => "Unsatisfiable",
            Status::Satisfiable => "Satisfiable",
            Status::Theorem => "Theorem",
            Status::CounterSatisfiable => "CounterSatisfiable",
            Status::Unknown => "Unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Refutation(Derivation),
    Model(Interpretation),
    None,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub elapsed: Duration,
    pub clauses_generated: usize,
    pub domain_sizes_tried: usize,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    pub witness: Witness,
    pub stats: Stats,
}

impl Verdict {
    pub fn refutation(&self) -> Option<&Derivation> {
        match &self.witness {
            Witness::Refutation(d) => Some(d),
            _ => None,
        }
    }

    pub fn model(&self) -> Option<&Interpretation> {
        match &self.witness {
            Witness::Model(m) => Some(m),
            _ => None,
        }
    }
}

/// `SZS status <Status>` followed by the proof or the model.
impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SZS status {}", self.status)?;
        match &self.witness {
            Witness::Refutation(d) => write!(f, "{d}"),
            Witness::Model(m) => write!(f, "{m}"),
            Witness::None => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Limits {
    /// Wall clock budget for each prover and model finder run.
    pub time_limit: Duration,
    pub max_clauses: usize,
    pub max_model_size: usize,
    /// Largest domain tried when certifying that a deletion is satisfiable.
    pub certify_size: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            time_limit: Duration::from_secs(60),
            max_clauses: 1_000_000,
            max_model_size: 8,
            certify_size: 4,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("the axioms are not refutable within the limits (status {0})")]
    PreconditionViolated(Status),
}

enum Answer {
    Prover(SaturationResult, usize),
    Finder(ModelSearchResult),
}

/// Satisfiability of `units`, conjectures read negated.
fn decide(units: &[NamedFormula], limits: &Limits) -> Verdict {
    let started = Instant::now();
    let mut sig = Signature::new();
    let clauses = clausify_with_equality(units, &mut sig);
    let cancel = Arc::new(AtomicBool::new(false));
    let prover_limits = SaturationLimits {
        max_clauses: limits.max_clauses,
        time_limit: limits.time_limit,
        cancel: Some(cancel.clone()),
        ..SaturationLimits::default()
    };
    let finder_limits = ModelLimits {
        max_size: limits.max_model_size,
        time_limit: limits.time_limit,
        cancel: Some(cancel.clone()),
    };

    let mut refutation = None;
    let mut model = None;
    let mut stats = Stats::default();
    thread::scope(|s| {
        let (tx, rx) = mpsc::channel();
        let to_finder = tx.clone();
        let clauses = &clauses;
        s.spawn(move || {
            let run = saturate(clauses, &prover_limits);
            let _ = tx.send(Answer::Prover(run.result, run.stats.generated));
        });
        s.spawn(move || {
            let _ = to_finder.send(Answer::Finder(find_model(units, &finder_limits)));
        });
        for answer in rx.iter().take(2) {
            match answer {
                Answer::Prover(result, generated) => {
                    stats.clauses_generated = generated;
                    if let SaturationResult::Refutation(d) = result {
                        refutation = Some(d);
                        cancel.store(true, Ordering::Relaxed);
                    }
                }
                Answer::Finder(result) => {
                    stats.domain_sizes_tried = result.sizes_tried();
                    if let ModelSearchResult::Model(m) = result {
                        model = Some(m);
                        cancel.store(true, Ordering::Relaxed);
                    }
                }
            }
        }
    });
    assert!(
        refutation.is_none() || model.is_none(),
        "prover and model finder disagree"
    );

    let refutation = refutation.filter(|d| check_derivation(d, &clauses).is_ok());
    let model = model.filter(|m| {
        units
            .iter()
            .all(|u| evaluate(m, &u.as_assumption()) == Ok(true))
    });
    let (status, witness) = match (refutation, model) {
        (Some(d), _) => (Status::Unsatisfiable, Witness::Refutation(d)),
        (None, Some(m)) => (Status::Satisfiable, Witness::Model(m)),
        (None, None) => (Status::Unknown, Witness::None),
    };
    stats.elapsed = started.elapsed();
    Verdict {
        status,
        witness,
        stats,
    }
}

/// Unsatisfiable with a checked refutation, Satisfiable with a verified
/// model, or Unknown when neither engine settles the question in time.
pub fn check_consistency(axioms: &[NamedFormula], limits: &Limits) -> Verdict {
    decide(axioms, limits)
}

/// Refutes the axioms together with the negated conjecture.
pub fn prove_conjecture(axioms: &[NamedFormula], conjecture: &Formula, limits: &Limits) -> Verdict {
    let mut units = axioms.to_vec();
    units.push(NamedFormula::conjecture(
        fresh_label(axioms),
        conjecture.clone(),
    ));
    let mut v = decide(&units, limits);
    v.status = match v.status {
        Status::Unsatisfiable => Status::Theorem,
        Status::Satisfiable => Status::CounterSatisfiable,
        s => s,
    };
    v
}

fn fresh_label(axioms: &[NamedFormula]) -> Symbol {
    let taken = |s: &str| axioms.iter().any(|a| a.label.as_str() == s);
    let mut name = String::from("conjecture");
    while taken(&name) {
        name.push('_');
    }
    Symbol::intern(&name)
}

/// Proves the problem's conjecture from its axioms. Without a conjecture, or
/// with `$false` as the conjecture, this checks the axioms for consistency.
pub fn solve(problem: &Problem, limits: &Limits) -> Verdict {
    let axioms: Vec<NamedFormula> = problem.axioms().cloned().collect();
    match problem.conjecture() {
        Some(c) if c.formula != Formula::False => prove_conjecture(&axioms, &c.formula, limits),
        _ => check_consistency(&axioms, limits),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Model(Interpretation),
    /// No model up to this domain size.
    Unknown(usize),
}

#[derive(Clone, Debug)]
pub struct MusReport {
    pub core: Vec<Symbol>,
    pub refutation: Derivation,
    /// For each core axiom, what is known about the core without it.
    pub deletions: Vec<(Symbol, Certificate)>,
}

impl MusReport {
    /// Whether every single deletion has a model, making the core minimal
    /// outright rather than up to the search bounds.
    pub fn is_certified(&self) -> bool {
        self.deletions
            .iter()
            .all(|(_, c)| matches!(c, Certificate::Model(_)))
    }
}

impl fmt::Display for MusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.core.iter().map(|l| l.as_str()).collect();
        writeln!(f, "core: {}", labels.join(", "))?;
        for (label, cert) in &self.deletions {
            match cert {
                Certificate::Model(m) => {
                    writeln!(f, "without {label}: Satisfiable, model of size {}", m.size)?
                }
                Certificate::Unknown(n) => {
                    writeln!(f, "without {label}: Unknown, no model up to size {n}")?
                }
            }
        }
        if !self.is_certified() {
            writeln!(f, "minimality holds only modulo the search bounds")?;
        }
        Ok(())
    }
}

/// Deletion-based minimization in input order: each axiom is dropped for
/// good when the rest still refutes. Each single deletion from the final
/// core is then certified by a model of size at most `limits.certify_size`.
pub fn extract_mus(axioms: &[NamedFormula], limits: &Limits) -> Result<MusReport, AnalysisError> {
    let first = check_consistency(axioms, limits);
    let Witness::Refutation(mut refutation) = first.witness else {
        return Err(AnalysisError::PreconditionViolated(first.status));
    };
    let mut core = axioms.to_vec();
    for label in axioms.iter().map(|a| a.label) {
        let rest: Vec<NamedFormula> = core.iter().filter(|a| a.label != label).cloned().collect();
        if let Witness::Refutation(d) = check_consistency(&rest, limits).witness {
            core = rest;
            refutation = d;
        }
    }

    let certify = ModelLimits {
        max_size: limits.certify_size,
        time_limit: limits.time_limit,
        cancel: None,
    };
    let deletions = core
        .iter()
        .map(|a| {
            let rest: Vec<NamedFormula> = core
                .iter()
                .filter(|b| b.label != a.label)
                .cloned()
                .collect();
            let cert = match find_model(&rest, &certify) {
                ModelSearchResult::Model(m) => Certificate::Model(m),
                other => Certificate::Unknown(other.sizes_tried()),
            };
            (a.label, cert)
        })
        .collect();
    Ok(MusReport {
        core: core.iter().map(|a| a.label).collect(),
        refutation,
        deletions,
    })
}
