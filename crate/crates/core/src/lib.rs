//! A small first-order logic toolkit: TPTP `fof` reader and printer,
//! clausifier, given-clause resolution prover with checkable refutations,
//! CDCL SAT solver, finite model finder, and consistency / conjecture /
//! minimal-unsatisfiable-subset analyses. The bundled workload is the
//! asylum of Doctor Tarr and Professor Fether.

pub mod analysis;
pub mod asylum;
pub mod clause;
pub mod clausify;
pub mod model;
pub mod sat;
pub mod saturation;
pub mod syntax;
pub mod tptp;

pub use clause::{Atom, Clause, Literal};
pub use syntax::{alpha_equal, free_variables, Formula, Signature, Substitution, Symbol, Term};
pub use tptp::{parse_tptp, print_tptp, NamedFormula, Problem, Role};
