//! Finite interpretations, Tarskian evaluation, and a Mace-style model
//! finder that grounds flattened clauses over `{0..n-1}` and calls the SAT
//! solver.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use thiserror::Error;

use crate::clause::{Atom, Clause};
use crate::clausify::clausify;
use crate::sat::{sat_solve_interruptible, PropClauseSet, SatResult};
use crate::syntax::{Formula, Signature, Symbol, Term};
use crate::tptp::NamedFormula;

/// Row-major table over all argument tuples, first argument most
/// significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    pub arity: usize,
    pub values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateTable {
    pub arity: usize,
    pub holds: Vec<bool>,
}

/// A finite structure with domain `{0..size-1}`. Constants are kept apart
/// from functions of positive arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub size: usize,
    pub constants: IndexMap<Symbol, usize>,
    pub functions: IndexMap<Symbol, FunctionTable>,
    pub predicates: IndexMap<Symbol, PredicateTable>,
}

fn tuple_index(args: &[usize], n: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

fn tuple_of(mut index: usize, arity: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

/// All tuples of `arity` elements in lexicographic order.
pub fn tuples(arity: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = n.pow(arity as u32);
    (0..count).map(move |i| tuple_of(i, arity, n))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("symbol `{0}` is not interpreted")]
    UnknownSymbol(Symbol),
    #[error("variable `{0}` is free")]
    FreeVariable(Symbol),
    #[error("symbol `{symbol}` used with arity {found}, interpreted with arity {expected}")]
    Arity {
        symbol: Symbol,
        expected: usize,
        found: usize,
    },
}

impl Interpretation {
    /// Every symbol of `sig` interpreted trivially: constants and function
    /// values 0, predicates empty.
    pub fn new(size: usize, sig: &Signature) -> Interpretation {
        assert!(size >= 1, "domain must be nonempty");
        let mut i = Interpretation {
            size,
            constants: IndexMap::new(),
            functions: IndexMap::new(),
            predicates: IndexMap::new(),
        };
        for (&f, &arity) in &sig.functions {
            if arity == 0 {
                i.constants.insert(f, 0);
            } else {
                i.functions.insert(
                    f,
                    FunctionTable {
                        arity,
                        values: vec![0; size.pow(arity as u32)],
                    },
                );
            }
        }
        for (&p, &arity) in &sig.predicates {
            i.predicates.insert(
                p,
                PredicateTable {
                    arity,
                    holds: vec![false; size.pow(arity as u32)],
                },
            );
        }
        i
    }

    pub fn function_value(&self, f: Symbol, args: &[usize]) -> Result<usize, EvalError> {
        if args.is_empty() {
            if let Some(&c) = self.constants.get(&f) {
                return Ok(c);
            }
        }
        let table = self.functions.get(&f).ok_or(EvalError::UnknownSymbol(f))?;
        if table.arity != args.len() {
            return Err(EvalError::Arity {
                symbol: f,
                expected: table.arity,
                found: args.len(),
            });
        }
        Ok(table.values[tuple_index(args, self.size)])
    }

    pub fn holds(&self, p: Symbol, args: &[usize]) -> Result<bool, EvalError> {
        let table = self.predicates.get(&p).ok_or(EvalError::UnknownSymbol(p))?;
        if table.arity != args.len() {
            return Err(EvalError::Arity {
                symbol: p,
                expected: table.arity,
                found: args.len(),
            });
        }
        Ok(table.holds[tuple_index(args, self.size)])
    }

    pub fn set_function(&mut self, f: Symbol, args: &[usize], value: usize) {
        if args.is_empty() {
            self.constants.insert(f, value);
            return;
        }
        let n = self.size;
        let table = self.functions.entry(f).or_insert_with(|| FunctionTable {
            arity: args.len(),
            values: vec![0; n.pow(args.len() as u32)],
        });
        table.values[tuple_index(args, n)] = value;
    }

    pub fn set_predicate(&mut self, p: Symbol, args: &[usize], value: bool) {
        let n = self.size;
        let table = self.predicates.entry(p).or_insert_with(|| PredicateTable {
            arity: args.len(),
            holds: vec![false; n.pow(args.len() as u32)],
        });
        table.holds[tuple_index(args, n)] = value;
    }

    /// Drops every symbol not in `sig`.
    pub fn restrict(&mut self, sig: &Signature) {
        self.constants.retain(|s, _| sig.functions.contains_key(s));
        self.functions.retain(|s, _| sig.functions.contains_key(s));
        self.predicates
            .retain(|s, _| sig.predicates.contains_key(s));
    }

    fn term_value(&self, t: &Term, env: &[(Symbol, usize)]) -> Result<usize, EvalError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(w, _)| w == v)
                .map(|(_, e)| *e)
                .ok_or(EvalError::FreeVariable(*v)),
            Term::App(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.term_value(a, env))
                    .collect::<Result<Vec<_>, _>>()?;
                self.function_value(*f, &vals)
            }
        }
    }

    fn eval(&self, f: &Formula, env: &mut Vec<(Symbol, usize)>) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(p, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.term_value(a, env))
                    .collect::<Result<Vec<_>, _>>()?;
                self.holds(*p, &vals)?
            }
            Formula::Equal(a, b) => self.term_value(a, env)? == self.term_value(b, env)?,
            Formula::Not(g) => !self.eval(g, env)?,
            Formula::And(a, b) => self.eval(a, env)? && self.eval(b, env)?,
            Formula::Or(a, b) => self.eval(a, env)? || self.eval(b, env)?,
            Formula::Implies(a, b) => !self.eval(a, env)? || self.eval(b, env)?,
            Formula::Iff(a, b) => self.eval(a, env)? == self.eval(b, env)?,
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let universal = matches!(f, Formula::Forall(..));
                let mut result = universal;
                for e in 0..self.size {
                    env.push((*v, e));
                    let r = self.eval(body, env);
                    env.pop();
                    if r? != universal {
                        result = !universal;
                        break;
                    }
                }
                result
            }
        })
    }

    /// True if every clause holds under every assignment of its variables.
    pub fn satisfies_clause(&self, c: &Clause) -> Result<bool, EvalError> {
        evaluate(self, &c.to_formula())
    }

    /// Parses the text produced by `Display`. Symbols of `sig` that the text
    /// does not mention are interpreted trivially (false, or element 0).
    pub fn parse(text: &str, sig: &Signature) -> Result<Interpretation, ModelParseError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with("SZS") && !l.starts_with('%'));
        let (_, first) = lines.next().ok_or(ModelParseError::MissingSize)?;
        let size: usize = first
            .strip_prefix("domain size ")
            .and_then(|n| n.parse().ok())
            .filter(|&n| n >= 1)
            .ok_or(ModelParseError::MissingSize)?;
        let mut model = Interpretation::new(size, sig);
        for (i, line) in lines {
            let bad = || ModelParseError::Line {
                line: i + 1,
                text: line.to_string(),
            };
            let (lhs, value) = match line.split_once(" = ") {
                Some((l, r)) => (l, Some(r.parse::<usize>().map_err(|_| bad())?)),
                None => (line, None),
            };
            let (name, args) = match lhs.split_once('(') {
                Some((name, rest)) => {
                    let inner = rest.strip_suffix(')').ok_or_else(bad)?;
                    let args = inner
                        .split(',')
                        .map(|a| a.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| bad())?;
                    (name, args)
                }
                None => (lhs, Vec::new()),
            };
            if args.iter().chain(value.iter()).any(|&e| e >= size) {
                return Err(bad());
            }
            let sym = Symbol::intern(name);
            match value {
                Some(v) => model.set_function(sym, &args, v),
                None => model.set_predicate(sym, &args, true),
            }
        }
        Ok(model)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelParseError {
    #[error("expected `domain size <n>`")]
    MissingSize,
    #[error("line {line}: cannot read `{text}`")]
    Line { line: usize, text: String },
}

fn write_tuple(f: &mut fmt::Formatter<'_>, name: Symbol, args: &[usize]) -> fmt::Result {
    write!(f, "{name}")?;
    if !args.is_empty() {
        let parts: Vec<String> = args.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))?;
    }
    Ok(())
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain size {}", self.size)?;
        for (c, v) in &self.constants {
            writeln!(f, "{c} = {v}")?;
        }
        for (name, table) in &self.functions {
            for (i, v) in table.values.iter().enumerate() {
                write_tuple(f, *name, &tuple_of(i, table.arity, self.size))?;
                writeln!(f, " = {v}")?;
            }
        }
        for (name, table) in &self.predicates {
            for (i, &h) in table.holds.iter().enumerate() {
                if h {
                    write_tuple(f, *name, &tuple_of(i, table.arity, self.size))?;
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}

/// Truth value of a closed formula.
pub fn evaluate(i: &Interpretation, f: &Formula) -> Result<bool, EvalError> {
    i.eval(f, &mut Vec::new())
}

/// What a propositional variable of a grounding stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundAtom {
    Pred(Symbol, Vec<usize>),
    /// `f(args) = value`
    Cell(Symbol, Vec<usize>, usize),
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundAtom::Pred(p, args) => write_tuple(f, *p, args),
            GroundAtom::Cell(g, args, v) => {
                write_tuple(f, *g, args)?;
                write!(f, " = {v}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Grounding {
    pub size: usize,
    pub signature: Signature,
    pub props: PropClauseSet,
    /// `atoms[v - 1]` describes propositional variable `v`.
    pub atoms: Vec<GroundAtom>,
    pred_base: HashMap<Symbol, usize>,
    cell_base: HashMap<Symbol, usize>,
}

/// A literal of a flattened clause: every argument is a variable slot.
#[derive(Clone, Debug)]
enum FlatLit {
    Pred(bool, Symbol, Vec<usize>),
    Eq(bool, usize, usize),
    /// `f(args) = result`
    Graph(bool, Symbol, Vec<usize>, usize),
}

struct Flattener {
    slots: Vec<Symbol>,
    lits: Vec<FlatLit>,
}

impl Flattener {
    fn slot_of_var(&mut self, v: Symbol) -> usize {
        match self.slots.iter().position(|s| *s == v) {
            Some(i) => i,
            None => {
                self.slots.push(v);
                self.slots.len() - 1
            }
        }
    }

    fn fresh_slot(&mut self) -> usize {
        self.slots.push(Symbol::intern("$flat"));
        self.slots.len() - 1
    }

    /// Slot holding the value of `t`, adding `f(args) != slot` literals.
    fn flatten(&mut self, t: &Term) -> usize {
        match t {
            Term::Var(v) => self.slot_of_var(*v),
            Term::App(f, args) => {
                let arg_slots: Vec<usize> = args.iter().map(|a| self.flatten(a)).collect();
                let slot = self.fresh_slot();
                self.lits.push(FlatLit::Graph(false, *f, arg_slots, slot));
                slot
            }
        }
    }
}

fn flatten_clause(c: &Clause) -> (usize, Vec<FlatLit>) {
    let mut fl = Flattener {
        slots: Vec::new(),
        lits: Vec::new(),
    };
    let mut own = Vec::new();
    for l in c.literals() {
        let lit = match &l.atom {
            Atom::Pred(p, args) => {
                let slots = args.iter().map(|a| fl.flatten(a)).collect();
                FlatLit::Pred(l.positive, *p, slots)
            }
            Atom::Equal(a, b) => match (a, b) {
                (Term::App(f, args), Term::Var(_)) | (Term::Var(_), Term::App(f, args)) => {
                    let other = if a.is_var() { a } else { b };
                    let arg_slots = args.iter().map(|x| fl.flatten(x)).collect();
                    let r = fl.flatten(other);
                    FlatLit::Graph(l.positive, *f, arg_slots, r)
                }
                _ => {
                    let x = fl.flatten(a);
                    let y = fl.flatten(b);
                    FlatLit::Eq(l.positive, x, y)
                }
            },
        };
        own.push(lit);
    }
    own.extend(fl.lits);
    (fl.slots.len(), own)
}

impl Grounding {
    fn pred_var(&self, p: Symbol, args: &[usize]) -> i32 {
        (self.pred_base[&p] + tuple_index(args, self.size) + 1) as i32
    }

    fn cell_var(&self, f: Symbol, args: &[usize], value: usize) -> i32 {
        (self.cell_base[&f] + tuple_index(args, self.size) * self.size + value + 1) as i32
    }

    /// Decodes a satisfying assignment.
    pub fn decode(&self, assignment: &[bool]) -> Interpretation {
        let mut model = Interpretation::new(self.size, &self.signature);
        for (k, atom) in self.atoms.iter().enumerate() {
            if !assignment[k] {
                continue;
            }
            match atom {
                GroundAtom::Pred(p, args) => model.set_predicate(*p, args, true),
                GroundAtom::Cell(f, args, v) => model.set_function(*f, args, *v),
            }
        }
        model
    }
}

/// Grounds `clauses` over a domain of `n` elements. Positive equality
/// between distinct elements is false, so the clauses are read with
/// identity semantics; equality axioms among them are harmless but
/// unnecessary.
pub fn ground(clauses: &[Clause], n: usize) -> Grounding {
    let mut sig = Signature::new();
    for c in clauses {
        for l in c.literals() {
            sig.add_formula(&l.atom.to_formula())
                .expect("clauses use each symbol with one arity");
        }
    }
    ground_with_signature(clauses, &sig, n)
}

/// As [`ground`], allocating variables for every symbol of `sig` (which
/// must cover the clauses) in signature order.
pub fn ground_with_signature(clauses: &[Clause], sig: &Signature, n: usize) -> Grounding {
    assert!(n >= 1, "domain must be nonempty");
    let mut g = Grounding {
        size: n,
        signature: sig.clone(),
        props: PropClauseSet::new(),
        atoms: Vec::new(),
        pred_base: HashMap::new(),
        cell_base: HashMap::new(),
    };
    for (&p, &arity) in &sig.predicates {
        g.pred_base.insert(p, g.atoms.len());
        for t in tuples(arity, n) {
            g.atoms.push(GroundAtom::Pred(p, t));
        }
    }
    for (&f, &arity) in &sig.functions {
        g.cell_base.insert(f, g.atoms.len());
        for t in tuples(arity, n) {
            for v in 0..n {
                g.atoms.push(GroundAtom::Cell(f, t.clone(), v));
            }
        }
    }
    g.props.num_vars = g.atoms.len();

    // each function cell takes exactly one value
    for (&f, &arity) in &sig.functions {
        for t in tuples(arity, n) {
            let cells: Vec<i32> = (0..n).map(|v| g.cell_var(f, &t, v)).collect();
            g.props.add_clause(cells.clone());
            for i in 0..n {
                for j in i + 1..n {
                    g.props.add_clause(vec![-cells[i], -cells[j]]);
                }
            }
        }
    }
    if let Some(first) = sig.constants().next() {
        let unit = g.cell_var(first, &[], 0);
        g.props.add_clause(vec![unit]);
    }

    for c in clauses {
        let (num_slots, lits) = flatten_clause(c);
        let mut values = vec![0usize; num_slots];
        'assignments: loop {
            let mut prop = Vec::with_capacity(lits.len());
            let mut satisfied = false;
            for l in &lits {
                match l {
                    FlatLit::Eq(pos, x, y) => {
                        if (values[*x] == values[*y]) == *pos {
                            satisfied = true;
                            break;
                        }
                    }
                    FlatLit::Pred(pos, p, slots) => {
                        let args: Vec<usize> = slots.iter().map(|&s| values[s]).collect();
                        let v = g.pred_var(*p, &args);
                        prop.push(if *pos { v } else { -v });
                    }
                    FlatLit::Graph(pos, f, slots, r) => {
                        let args: Vec<usize> = slots.iter().map(|&s| values[s]).collect();
                        let v = g.cell_var(*f, &args, values[*r]);
                        prop.push(if *pos { v } else { -v });
                    }
                }
            }
            if !satisfied {
                prop.sort_unstable();
                prop.dedup();
                if !prop.windows(2).any(|w| w[0] == -w[1]) {
                    g.props.add_clause(prop);
                }
            }
            // next assignment, last slot fastest
            for k in (0..num_slots).rev() {
                values[k] += 1;
                if values[k] < n {
                    continue 'assignments;
                }
                values[k] = 0;
            }
            break;
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSearchResult {
    Model(Interpretation),
    NoModelUpTo(usize),
    /// Interrupted; no model of any size up to the given one.
    ResourceOut(usize),
}

impl ModelSearchResult {
    /// Number of domain sizes searched to completion.
    pub fn sizes_tried(&self) -> usize {
        match self {
            ModelSearchResult::Model(m) => m.size,
            ModelSearchResult::NoModelUpTo(n) | ModelSearchResult::ResourceOut(n) => *n,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModelLimits {
    pub max_size: usize,
    pub time_limit: Duration,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for ModelLimits {
    fn default() -> Self {
        ModelLimits {
            max_size: 8,
            time_limit: Duration::from_secs(60),
            cancel: None,
        }
    }
}

/// Searches domain sizes `1..=limits.max_size` in order for a model of the
/// units, conjectures read negated. Every model returned has been checked
/// with [`evaluate`] against each unit.
///
/// # Panics
///
/// If the units use a symbol with two arities or as both a predicate and a
/// function; [`crate::Problem`] rules this out.
pub fn find_model(units: &[NamedFormula], limits: &ModelLimits) -> ModelSearchResult {
    let started = Instant::now();
    let user_sig = match Signature::of_formulas(units.iter().map(|u| &u.formula)) {
        Ok(sig) => sig,
        Err(e) => panic!("ill-formed problem: {e}"),
    };
    let mut sig = user_sig.clone();
    let clauses = clausify(units, &mut sig);
    let stop = || {
        started.elapsed() >= limits.time_limit
            || limits
                .cancel
                .as_ref()
                .is_some_and(|c| c.load(Ordering::Relaxed))
    };
    for n in 1..=limits.max_size {
        if stop() {
            return ModelSearchResult::ResourceOut(n - 1);
        }
        let g = ground_with_signature(&clauses, &sig, n);
        match sat_solve_interruptible(&g.props, &stop) {
            None => return ModelSearchResult::ResourceOut(n - 1),
            Some(SatResult::Unsat) => continue,
            Some(SatResult::Sat(assignment)) => {
                let mut model = g.decode(&assignment);
                model.restrict(&user_sig);
                for u in units {
                    let ok = evaluate(&model, &u.as_assumption());
                    assert_eq!(
                        ok,
                        Ok(true),
                        "decoded model falsifies {}:\n{model}",
                        u.label
                    );
                }
                return ModelSearchResult::Model(model);
            }
        }
    }
    ModelSearchResult::NoModelUpTo(limits.max_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::Literal;
    use crate::tptp::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn doctors(size: usize, members: &[usize]) -> Interpretation {
        let mut i = Interpretation::new(size, &Signature::new());
        for e in 0..size {
            i.set_predicate(Symbol::intern("doctor"), &[e], members.contains(&e));
        }
        i
    }

    #[test]
    fn evaluate_examples() {
        let all = f("![X] : doctor(X)");
        assert_eq!(evaluate(&doctors(1, &[0]), &all), Ok(true));
        assert_eq!(evaluate(&doctors(2, &[0]), &all), Ok(false));
        let taut = f("p | ~p");
        let mut i = Interpretation::new(1, &Signature::new());
        i.set_predicate(Symbol::intern("p"), &[], false);
        assert_eq!(evaluate(&i, &taut), Ok(true));
        assert_eq!(
            evaluate(&i, &f("q")),
            Err(EvalError::UnknownSymbol(Symbol::intern("q")))
        );
    }

    #[test]
    fn ground_examples() {
        let x = Term::var("X");
        let px = Clause::new(vec![Literal::pos(Atom::pred("p", vec![x]))], vec![]);
        let g = ground(&[px], 2);
        assert_eq!(g.props.clauses, vec![vec![1], vec![2]]);
        assert_eq!(g.atoms[0].to_string(), "p(0)");

        let g = ground(&[], 3);
        assert!(g.props.clauses.is_empty());

        let sk = Term::constant("sk0");
        let clauses = [
            Clause::new(
                vec![Literal::pos(Atom::pred("doctor", vec![sk.clone()]))],
                vec![],
            ),
            Clause::new(
                vec![Literal::neg(Atom::Equal(sk, Term::constant("tarr")))],
                vec![],
            ),
        ];
        let g = ground(&clauses, 1);
        assert_eq!(crate::sat::sat_solve(&g.props), SatResult::Unsat);
        let g = ground(&clauses, 2);
        assert!(matches!(crate::sat::sat_solve(&g.props), SatResult::Sat(_)));
    }

    #[test]
    fn find_model_examples() {
        let contradiction = [NamedFormula::axiom("c", f("p & ~p"))];
        assert_eq!(
            find_model(
                &contradiction,
                &ModelLimits {
                    max_size: 3,
                    ..Default::default()
                }
            ),
            ModelSearchResult::NoModelUpTo(3)
        );
        assert!(matches!(
            find_model(&[], &ModelLimits::default()),
            ModelSearchResult::Model(Interpretation { size: 1, .. })
        ));
        let two = [NamedFormula::axiom("d", f("a != b"))];
        match find_model(&two, &ModelLimits::default()) {
            ModelSearchResult::Model(m) => {
                assert_eq!(m.size, 2);
                assert_eq!(m.constants[&Symbol::intern("a")], 0);
            }
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn conjecture_is_negated() {
        let units = [NamedFormula::conjecture("c", f("sane(tarr)"))];
        match find_model(&units, &ModelLimits::default()) {
            ModelSearchResult::Model(m) => {
                assert_eq!(m.size, 1);
                assert_eq!(m.holds(Symbol::intern("sane"), &[0]), Ok(false));
            }
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn nested_functions_are_flattened() {
        let units = [NamedFormula::axiom(
            "n",
            f("![X] : f(f(X)) != X & ?[Y] : p(f(Y))"),
        )];
        match find_model(&units, &ModelLimits::default()) {
            ModelSearchResult::Model(m) => assert!(m.size >= 2),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn display_and_parse_round_trip() {
        let units = [NamedFormula::axiom(
            "u",
            f("doctor(tarr) & ~doctor(fether) & bf(tarr) = fether"),
        )];
        let sig = Signature::of_formulas(units.iter().map(|u| &u.formula)).unwrap();
        let mut m = Interpretation::new(2, &sig);
        m.set_function(Symbol::intern("fether"), &[], 1);
        m.set_function(Symbol::intern("bf"), &[0], 1);
        m.set_predicate(Symbol::intern("doctor"), &[0], true);
        let text = m.to_string();
        assert_eq!(
            text,
            "domain size 2\ntarr = 0\nfether = 1\nbf(0) = 1\nbf(1) = 0\ndoctor(0)\n"
        );
        assert_eq!(Interpretation::parse(&text, &sig).unwrap(), m);
        assert!(Interpretation::parse("domain size 2\ndoctor(5)\n", &sig).is_err());

        let ModelSearchResult::Model(found) = find_model(&units, &ModelLimits::default()) else {
            panic!("expected a model");
        };
        assert_eq!(found.size, 2);
        assert_eq!(
            Interpretation::parse(&found.to_string(), &sig).unwrap(),
            found
        );
    }
}
