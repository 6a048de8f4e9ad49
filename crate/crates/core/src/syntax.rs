//! Abstract syntax of first-order logic with equality.
//!
//! Identifiers are interned [`Symbol`]s: equality and hashing are by id,
//! ordering is by name so that anything sorted by symbol is stable across
//! runs regardless of interning order. Formulas and term argument lists are
//! reference-counted and immutable, so cloning a subtree is cheap and values
//! can be shared between threads.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use indexmap::IndexMap;
use thiserror::Error;

struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        RwLock::new(Interner {
            names: Vec::new(),
            ids: HashMap::new(),
        })
    })
}

/// An interned identifier used for variables, function and predicate symbols.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol(u32);

impl Symbol {
    pub fn intern(name: &str) -> Symbol {
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Symbol(id);
        }
        let mut table = interner().write().unwrap();
        if let Some(&id) = table.ids.get(name) {
            return Symbol(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Symbol(id)
    }

    pub fn as_str(self) -> &'static str {
        interner().read().unwrap().names[self.0 as usize]
    }

    /// Canonical clause variable `X<index>`.
    pub fn var(index: usize) -> Symbol {
        thread_local! {
            static CACHE: std::cell::RefCell<Vec<Symbol>> = const { std::cell::RefCell::new(Vec::new()) };
        }
        CACHE.with(|cache| {
            let mut cache = cache.borrow_mut();
            while cache.len() <= index {
                let next = cache.len();
                cache.push(Symbol::intern(&format!("X{next}")));
            }
            cache[index]
        })
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self.0 == other.0 {
            return std::cmp::Ordering::Equal;
        }
        self.as_str().cmp(other.as_str())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<&str> for Symbol {
    fn from(name: &str) -> Self {
        Symbol::intern(name)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Symbol),
    /// Function application; constants have no arguments.
    App(Symbol, Arc<[Term]>),
}

impl Term {
    pub fn var(name: impl Into<Symbol>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<Symbol>) -> Term {
        Term::App(name.into(), Arc::from(Vec::new()))
    }

    pub fn app(name: impl Into<Symbol>, args: Vec<Term>) -> Term {
        Term::App(name.into(), Arc::from(args))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn contains_var(&self, v: Symbol) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn variables(&self) -> BTreeSet<Symbol> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }

    /// Number of symbol and variable occurrences.
    pub fn weight(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::weight).sum::<usize>(),
        }
    }

    pub fn rename(&self, map: &HashMap<Symbol, Symbol>) -> Term {
        match self {
            Term::Var(v) => Term::Var(*map.get(v).unwrap_or(v)),
            Term::App(f, args) if args.is_empty() => Term::App(*f, args.clone()),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.rename(map)).collect()),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) if args.is_empty() => write!(f, "{s}"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Symbol, Arc<[Term]>),
    Equal(Term, Term),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Forall(Symbol, Arc<Formula>),
    Exists(Symbol, Arc<Formula>),
}

impl Formula {
    pub fn atom(pred: impl Into<Symbol>, args: Vec<Term>) -> Formula {
        Formula::Atom(pred.into(), Arc::from(args))
    }

    pub fn prop(name: impl Into<Symbol>) -> Formula {
        Formula::atom(name, Vec::new())
    }

    pub fn equal(a: Term, b: Term) -> Formula {
        Formula::Equal(a, b)
    }

    pub fn not(self) -> Formula {
        Formula::Not(Arc::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Arc::new(self), Arc::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Arc::new(self), Arc::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Arc::new(self), Arc::new(other))
    }

    pub fn iff(self, other: Formula) -> Formula {
        Formula::Iff(Arc::new(self), Arc::new(other))
    }

    pub fn forall(var: impl Into<Symbol>, body: Formula) -> Formula {
        Formula::Forall(var.into(), Arc::new(body))
    }

    pub fn exists(var: impl Into<Symbol>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Arc::new(body))
    }

    pub fn is_closed(&self) -> bool {
        free_variables(self).is_empty()
    }

    /// Universal closure over the free variables, outermost first in name order.
    pub fn universal_closure(self) -> Formula {
        let free = free_variables(&self);
        free.into_iter()
            .rev()
            .fold(self, |body, v| Formula::forall(v, body))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::tptp::formula_to_string(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::tptp::formula_to_string(self))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol `{symbol}` used with arity {found}, previously {expected}")]
    Arity {
        symbol: Symbol,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{0}` used both as a predicate and as a function")]
    KindClash(Symbol),
}

/// Predicate and function symbols with their arities, in first-seen order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: IndexMap<Symbol, usize>,
    pub functions: IndexMap<Symbol, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_predicate(&mut self, sym: Symbol, arity: usize) -> Result<(), SignatureError> {
        if self.functions.contains_key(&sym) {
            return Err(SignatureError::KindClash(sym));
        }
        match self.predicates.get(&sym) {
            Some(&a) if a != arity => Err(SignatureError::Arity {
                symbol: sym,
                expected: a,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.predicates.insert(sym, arity);
                Ok(())
            }
        }
    }

    pub fn add_function(&mut self, sym: Symbol, arity: usize) -> Result<(), SignatureError> {
        if self.predicates.contains_key(&sym) {
            return Err(SignatureError::KindClash(sym));
        }
        match self.functions.get(&sym) {
            Some(&a) if a != arity => Err(SignatureError::Arity {
                symbol: sym,
                expected: a,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.functions.insert(sym, arity);
                Ok(())
            }
        }
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        self.predicates.contains_key(&sym) || self.functions.contains_key(&sym)
    }

    pub fn constants(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.functions
            .iter()
            .filter(|(_, &a)| a == 0)
            .map(|(s, _)| *s)
    }

    pub fn add_term(&mut self, t: &Term) -> Result<(), SignatureError> {
        if let Term::App(f, args) = t {
            self.add_function(*f, args.len())?;
            for a in args.iter() {
                self.add_term(a)?;
            }
        }
        Ok(())
    }

    /// Registers every symbol of `f`, checking arity consistency.
    pub fn add_formula(&mut self, f: &Formula) -> Result<(), SignatureError> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Atom(p, args) => {
                self.add_predicate(*p, args.len())?;
                args.iter().try_for_each(|a| self.add_term(a))
            }
            Formula::Equal(a, b) => {
                self.add_term(a)?;
                self.add_term(b)
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => self.add_formula(g),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                self.add_formula(a)?;
                self.add_formula(b)
            }
        }
    }

    pub fn of_formulas<'a>(
        formulas: impl IntoIterator<Item = &'a Formula>,
    ) -> Result<Signature, SignatureError> {
        let mut sig = Signature::new();
        for f in formulas {
            sig.add_formula(f)?;
        }
        Ok(sig)
    }

    /// Registers a fresh function symbol `<prefix><n>` for the smallest `n`
    /// not already in the signature.
    pub fn fresh_function(&mut self, prefix: &str, arity: usize) -> Symbol {
        let mut n = 0usize;
        loop {
            let sym = Symbol::intern(&format!("{prefix}{n}"));
            if !self.contains(sym) {
                self.functions.insert(sym, arity);
                return sym;
            }
            n += 1;
        }
    }
}

/// Simultaneous replacement of variables by terms.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: HashMap<Symbol, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, Term)>) -> Self {
        Substitution {
            bindings: pairs.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, v: Symbol, t: Term) {
        self.bindings.insert(v, t);
    }

    pub fn remove(&mut self, v: Symbol) -> Option<Term> {
        self.bindings.remove(&v)
    }

    pub fn get(&self, v: Symbol) -> Option<&Term> {
        self.bindings.get(&v)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn domain(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.bindings.keys().copied()
    }

    /// Bindings sorted by variable name.
    pub fn sorted(&self) -> Vec<(Symbol, &Term)> {
        let mut v: Vec<_> = self.bindings.iter().map(|(k, t)| (*k, t)).collect();
        v.sort_by_key(|a| a.0);
        v
    }

    /// True when no variable maps to a term containing a domain variable.
    pub fn is_idempotent(&self) -> bool {
        self.bindings
            .values()
            .all(|t| self.bindings.keys().all(|v| !t.contains_var(*v)))
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(_, args) if args.is_empty() => t.clone(),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn apply_args(&self, args: &Arc<[Term]>) -> Arc<[Term]> {
        if self.bindings.is_empty() || args.is_empty() {
            return args.clone();
        }
        args.iter().map(|a| self.apply(a)).collect()
    }

    /// Capture-avoiding application to a formula: bound variables that would
    /// capture a variable of the substituted terms are renamed first.
    pub fn apply_formula(&self, f: &Formula) -> Formula {
        if self.bindings.is_empty() {
            return f.clone();
        }
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(p, args) => Formula::Atom(*p, self.apply_args(args)),
            Formula::Equal(a, b) => Formula::Equal(self.apply(a), self.apply(b)),
            Formula::Not(g) => Formula::Not(Arc::new(self.apply_formula(g))),
            Formula::And(a, b) => Formula::And(
                Arc::new(self.apply_formula(a)),
                Arc::new(self.apply_formula(b)),
            ),
            Formula::Or(a, b) => Formula::Or(
                Arc::new(self.apply_formula(a)),
                Arc::new(self.apply_formula(b)),
            ),
            Formula::Implies(a, b) => Formula::Implies(
                Arc::new(self.apply_formula(a)),
                Arc::new(self.apply_formula(b)),
            ),
            Formula::Iff(a, b) => Formula::Iff(
                Arc::new(self.apply_formula(a)),
                Arc::new(self.apply_formula(b)),
            ),
            Formula::Forall(v, body) => {
                let (v, body) = self.apply_under_binder(*v, body);
                Formula::Forall(v, Arc::new(body))
            }
            Formula::Exists(v, body) => {
                let (v, body) = self.apply_under_binder(*v, body);
                Formula::Exists(v, Arc::new(body))
            }
        }
    }

    fn apply_under_binder(&self, v: Symbol, body: &Formula) -> (Symbol, Formula) {
        let body_free = free_variables(body);
        let mut inner = Substitution::new();
        for (&k, t) in &self.bindings {
            if k != v && body_free.contains(&k) {
                inner.insert(k, t.clone());
            }
        }
        let captures = inner.bindings.values().any(|t| t.contains_var(v));
        if !captures {
            return (v, inner.apply_formula(body));
        }
        let mut avoid: HashSet<Symbol> = body_free.iter().copied().collect();
        for t in inner.bindings.values() {
            avoid.extend(t.variables());
        }
        let fresh = fresh_variable(v, &avoid);
        inner.insert(v, Term::Var(fresh));
        (fresh, inner.apply_formula(body))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.sorted().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// A variable name derived from `base` that is not in `avoid`.
pub fn fresh_variable(base: Symbol, avoid: &HashSet<Symbol>) -> Symbol {
    let stem = base.as_str().split('_').next().unwrap_or("X");
    let stem = if stem.is_empty() { "X" } else { stem };
    (1usize..)
        .map(|i| Symbol::intern(&format!("{stem}_{i}")))
        .find(|s| !avoid.contains(s))
        .expect("unbounded search")
}

pub fn free_variables(f: &Formula) -> BTreeSet<Symbol> {
    fn go(f: &Formula, bound: &mut Vec<Symbol>, out: &mut BTreeSet<Symbol>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => {
                for a in args.iter() {
                    for v in a.variables() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Formula::Equal(a, b) => {
                for v in a.variables().into_iter().chain(b.variables()) {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Not(g) => go(g, bound, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(*v);
                go(body, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// Syntactic equality up to consistent renaming of bound variables.
pub fn alpha_equal(a: &Formula, b: &Formula) -> bool {
    fn term_eq(a: &Term, b: &Term, env: &[(Symbol, Symbol)]) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let bx = env.iter().rposition(|(l, _)| l == x);
                let by = env.iter().rposition(|(_, r)| r == y);
                match (bx, by) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                f == g
                    && fa.len() == ga.len()
                    && fa.iter().zip(ga.iter()).all(|(x, y)| term_eq(x, y, env))
            }
            _ => false,
        }
    }
    fn go(a: &Formula, b: &Formula, env: &mut Vec<(Symbol, Symbol)>) -> bool {
        use Formula::*;
        match (a, b) {
            (True, True) | (False, False) => true,
            (Atom(p, pa), Atom(q, qa)) => {
                p == q
                    && pa.len() == qa.len()
                    && pa.iter().zip(qa.iter()).all(|(x, y)| term_eq(x, y, env))
            }
            (Equal(a1, a2), Equal(b1, b2)) => term_eq(a1, b1, env) && term_eq(a2, b2, env),
            (Not(x), Not(y)) => go(x, y, env),
            (And(a1, a2), And(b1, b2))
            | (Or(a1, a2), Or(b1, b2))
            | (Implies(a1, a2), Implies(b1, b2))
            | (Iff(a1, a2), Iff(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
            (Forall(x, fa), Forall(y, fb)) | (Exists(x, fa), Exists(y, fb)) => {
                env.push((*x, *y));
                let r = go(fa, fb, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}
