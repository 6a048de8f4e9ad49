//! The given-clause loop behind [`super::saturate`], on flat clauses: each
//! literal is a header code (`predicate << 1 | positive`) followed by its
//! arguments in prefix order. Variables carry the `VAR` bit; two premises
//! are renamed apart by giving the second one a variable offset.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::Ordering;
use std::sync::Arc;
use std::time::Instant;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{
    unify_atoms, Derivation, ResourceReason, Rule, SaturationLimits, SaturationResult,
    SaturationStats, Step,
};
use crate::clause::{Atom, Clause, Literal};
use crate::syntax::{Symbol, Term};

const VAR: u32 = 1 << 31;
const SIDE: u32 = 1 << 31;
const NONE: u32 = u32::MAX;
/// Predicate code of equality.
const EQ: u32 = 0;

/// Every `AGE_PERIOD`-th selection takes the oldest passive clause, the
/// others the lightest.
const AGE_PERIOD: usize = 5;

/// Size of the cache of recent subsumers.
const RECENT: usize = 16;

struct SymbolTable {
    code: HashMap<Symbol, u32>,
    symbol: Vec<Symbol>,
    arity: Vec<u32>,
}

impl SymbolTable {
    fn new() -> Self {
        SymbolTable {
            code: HashMap::new(),
            symbol: vec![Symbol::intern("=")],
            arity: vec![2],
        }
    }

    fn intern(&mut self, s: Symbol, arity: usize) -> u32 {
        if let Some(&c) = self.code.get(&s) {
            return c;
        }
        let c = self.symbol.len() as u32;
        self.code.insert(s, c);
        self.symbol.push(s);
        self.arity.push(arity as u32);
        c
    }
}

#[derive(Clone, Default)]
struct FClause {
    codes: Vec<u32>,
    starts: Vec<u32>,
    num_vars: u32,
}

impl FClause {
    fn len(&self) -> usize {
        self.starts.len()
    }

    fn literal(&self, i: usize) -> &[u32] {
        let end = self
            .starts
            .get(i + 1)
            .map_or(self.codes.len(), |&e| e as usize);
        &self.codes[self.starts[i] as usize..end]
    }
}

fn term_end(codes: &[u32], arity: &[u32], mut p: usize) -> usize {
    let mut need = 1u32;
    while need > 0 {
        let c = codes[p];
        p += 1;
        need -= 1;
        if c & VAR == 0 {
            need += arity[c as usize];
        }
    }
    p
}

fn encode_term(t: &Term, table: &mut SymbolTable, vars: &[Symbol], out: &mut Vec<u32>) {
    match t {
        Term::Var(v) => {
            let i = vars
                .iter()
                .position(|w| w == v)
                .expect("variable of the clause");
            out.push(VAR | i as u32);
        }
        Term::App(f, args) => {
            out.push(table.intern(*f, args.len()));
            for a in args.iter() {
                encode_term(a, table, vars, out);
            }
        }
    }
}

/// `c` must be normalized.
fn encode(c: &Clause, table: &mut SymbolTable) -> FClause {
    let vars = c.variables();
    let mut f = FClause {
        num_vars: vars.len() as u32,
        ..Default::default()
    };
    for l in c.literals() {
        f.starts.push(f.codes.len() as u32);
        let pos = u32::from(l.positive);
        match &l.atom {
            Atom::Pred(p, args) => {
                f.codes.push(table.intern(*p, args.len()) << 1 | pos);
                for a in args.iter() {
                    encode_term(a, table, &vars, &mut f.codes);
                }
            }
            Atom::Equal(a, b) => {
                f.codes.push(EQ << 1 | pos);
                encode_term(a, table, &vars, &mut f.codes);
                encode_term(b, table, &vars, &mut f.codes);
            }
        }
    }
    f
}

fn decode_term(codes: &[u32], p: usize, table: &SymbolTable) -> (Term, usize) {
    let c = codes[p];
    if c & VAR != 0 {
        return (Term::Var(Symbol::var((c & !VAR) as usize)), p + 1);
    }
    let mut args = Vec::with_capacity(table.arity[c as usize] as usize);
    let mut q = p + 1;
    for _ in 0..table.arity[c as usize] {
        let (t, next) = decode_term(codes, q, table);
        args.push(t);
        q = next;
    }
    (Term::App(table.symbol[c as usize], Arc::from(args)), q)
}

fn decode(f: &FClause, table: &SymbolTable) -> Clause {
    let mut lits = Vec::with_capacity(f.len());
    for i in 0..f.len() {
        let lit = f.literal(i);
        let pred = lit[0] >> 1;
        let positive = lit[0] & 1 == 1;
        let mut args = Vec::new();
        let mut p = 1;
        for _ in 0..table.arity[pred as usize] {
            let (t, next) = decode_term(lit, p, table);
            args.push(t);
            p = next;
        }
        let atom = if pred == EQ {
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Atom::Equal(a, b)
        } else {
            Atom::Pred(table.symbol[pred as usize], Arc::from(args))
        };
        lits.push(Literal { positive, atom });
    }
    Clause::new(lits, Vec::new())
}

/// Two premises addressed by references `side << 31 | position`.
struct Sides<'c> {
    code: [&'c [u32]; 2],
    off: [u32; 2],
    arity: &'c [u32],
}

impl Sides<'_> {
    fn at(&self, r: u32) -> u32 {
        self.code[(r >> 31) as usize][(r & !SIDE) as usize]
    }

    fn global(&self, r: u32, c: u32) -> u32 {
        (c & !VAR) + self.off[(r >> 31) as usize]
    }

    fn end(&self, r: u32) -> u32 {
        let side = r & SIDE;
        let p = term_end(
            self.code[(r >> 31) as usize],
            self.arity,
            (r & !SIDE) as usize,
        );
        side | p as u32
    }
}

#[derive(Default)]
struct Unifier {
    bind: Vec<u32>,
    trail: Vec<u32>,
    stack: Vec<(u32, u32)>,
    renum: Vec<u32>,
    renum_trail: Vec<u32>,
    next_var: u32,
}

impl Unifier {
    fn reset(&mut self, num_vars: usize) {
        for &v in &self.trail {
            self.bind[v as usize] = NONE;
        }
        self.trail.clear();
        if self.bind.len() < num_vars {
            self.bind.resize(num_vars, NONE);
            self.renum.resize(num_vars, NONE);
        }
    }

    fn deref(&self, s: &Sides, mut r: u32) -> (u32, u32) {
        loop {
            let c = s.at(r);
            if c & VAR == 0 {
                return (r, c);
            }
            let b = self.bind[s.global(r, c) as usize];
            if b == NONE {
                return (r, c);
            }
            r = b;
        }
    }

    fn occurs(&self, s: &Sides, g: u32, r: u32) -> bool {
        let (r, c) = self.deref(s, r);
        if c & VAR != 0 {
            return s.global(r, c) == g;
        }
        let mut p = r + 1;
        for _ in 0..s.arity[c as usize] {
            if self.occurs(s, g, p) {
                return true;
            }
            p = s.end(p);
        }
        false
    }

    fn bind_var(&mut self, g: u32, r: u32) {
        self.bind[g as usize] = r;
        self.trail.push(g);
    }

    /// Unifies the arguments of two literals with the same predicate.
    fn unify_literals(&mut self, s: &Sides, a: u32, b: u32) -> bool {
        let pred = s.at(a) >> 1;
        self.stack.clear();
        let (mut pa, mut pb) = (a + 1, b + 1);
        for _ in 0..s.arity[pred as usize] {
            self.stack.push((pa, pb));
            pa = s.end(pa);
            pb = s.end(pb);
        }
        while let Some((a, b)) = self.stack.pop() {
            let (a, ca) = self.deref(s, a);
            let (b, cb) = self.deref(s, b);
            match (ca & VAR != 0, cb & VAR != 0) {
                (true, true) => {
                    let (ga, gb) = (s.global(a, ca), s.global(b, cb));
                    if ga != gb {
                        self.bind_var(ga, b);
                    }
                }
                (true, false) => {
                    let ga = s.global(a, ca);
                    if self.occurs(s, ga, b) {
                        return false;
                    }
                    self.bind_var(ga, b);
                }
                (false, true) => {
                    let gb = s.global(b, cb);
                    if self.occurs(s, gb, a) {
                        return false;
                    }
                    self.bind_var(gb, a);
                }
                (false, false) => {
                    if ca != cb {
                        return false;
                    }
                    let (mut pa, mut pb) = (a + 1, b + 1);
                    for _ in 0..s.arity[ca as usize] {
                        self.stack.push((pa, pb));
                        pa = s.end(pa);
                        pb = s.end(pb);
                    }
                }
            }
        }
        true
    }

    fn start_emit(&mut self) {
        for &g in &self.renum_trail {
            self.renum[g as usize] = NONE;
        }
        self.renum_trail.clear();
        self.next_var = 0;
    }

    /// Writes the instance of the term at `r`, renumbering variables by
    /// first occurrence; returns the end of the source term.
    fn emit(&mut self, s: &Sides, r: u32, out: &mut Vec<u32>) -> u32 {
        let c = s.at(r);
        if c & VAR != 0 {
            let g = s.global(r, c);
            let b = self.bind[g as usize];
            if b != NONE {
                self.emit(s, b, out);
            } else {
                if self.renum[g as usize] == NONE {
                    self.renum[g as usize] = self.next_var;
                    self.renum_trail.push(g);
                    self.next_var += 1;
                }
                out.push(VAR | self.renum[g as usize]);
            }
            return r + 1;
        }
        out.push(c);
        let mut p = r + 1;
        for _ in 0..s.arity[c as usize] {
            p = self.emit(s, p, out);
        }
        p
    }

    fn emit_literal(&mut self, s: &Sides, r: u32, out: &mut FClause) {
        let start = out.codes.len();
        let header = s.at(r);
        out.codes.push(header);
        let mut p = r + 1;
        for _ in 0..s.arity[(header >> 1) as usize] {
            p = self.emit(s, p, &mut out.codes);
        }
        let (old, new) = out.codes.split_at(start);
        let ends = out
            .starts
            .iter()
            .skip(1)
            .map(|&e| e as usize)
            .chain([start]);
        let duplicate = out
            .starts
            .iter()
            .zip(ends)
            .any(|(&b, e)| old[b as usize] == header && &old[b as usize..e] == new);
        if duplicate {
            out.codes.truncate(start);
        } else {
            out.starts.push(start as u32);
        }
    }
}

fn is_tautology(c: &FClause, arity: &[u32]) -> bool {
    for i in 0..c.len() {
        let a = c.literal(i);
        if a[0] == (EQ << 1 | 1) {
            let mid = term_end(a, arity, 1);
            if a[1..mid] == a[mid..] {
                return true;
            }
        }
        for k in i + 1..c.len() {
            let b = c.literal(k);
            if a[0] == b[0] ^ 1 && a[1..] == b[1..] {
                return true;
            }
        }
    }
    false
}

#[derive(Default)]
struct Matcher {
    bind: Vec<u32>,
    trail: Vec<u32>,
    used: Vec<bool>,
}

impl Matcher {
    /// Matches the pattern term at `cp` onto the target term at `dp`.
    fn term(
        &mut self,
        c: &[u32],
        cp: usize,
        d: &[u32],
        dp: usize,
        arity: &[u32],
    ) -> Option<(usize, usize)> {
        let code = c[cp];
        if code & VAR != 0 {
            let v = (code & !VAR) as usize;
            let de = term_end(d, arity, dp);
            let b = self.bind[v];
            if b == NONE {
                self.bind[v] = dp as u32;
                self.trail.push(v as u32);
            } else {
                let b = b as usize;
                let be = term_end(d, arity, b);
                if d[b..be] != d[dp..de] {
                    return None;
                }
            }
            return Some((cp + 1, de));
        }
        if d[dp] != code {
            return None;
        }
        let (mut cp, mut dp) = (cp + 1, dp + 1);
        for _ in 0..arity[code as usize] {
            (cp, dp) = self.term(c, cp, d, dp, arity)?;
        }
        Some((cp, dp))
    }

    fn undo(&mut self, mark: usize) {
        for &v in &self.trail[mark..] {
            self.bind[v as usize] = NONE;
        }
        self.trail.truncate(mark);
    }

    fn literals(&mut self, c: &FClause, ci: usize, d: &FClause, arity: &[u32]) -> bool {
        if ci == c.len() {
            return true;
        }
        let cl = c.literal(ci);
        for k in 0..d.len() {
            let ds = d.starts[k] as usize;
            if self.used[k] || d.codes[ds] != cl[0] {
                continue;
            }
            let mark = self.trail.len();
            let (mut cp, mut dp) = (1, ds + 1);
            let mut ok = true;
            for _ in 0..arity[(cl[0] >> 1) as usize] {
                match self.term(cl, cp, &d.codes, dp, arity) {
                    Some((a, b)) => (cp, dp) = (a, b),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.used[k] = true;
                if self.literals(c, ci + 1, d, arity) {
                    return true;
                }
                self.used[k] = false;
            }
            self.undo(mark);
        }
        false
    }

    fn subsumes(&mut self, c: &FClause, d: &FClause, arity: &[u32]) -> bool {
        if c.len() > d.len() {
            return false;
        }
        if self.bind.len() < c.num_vars as usize {
            self.bind.resize(c.num_vars as usize, NONE);
        }
        self.used.clear();
        self.used.resize(d.len(), false);
        let r = self.literals(c, 0, d, arity);
        self.undo(0);
        r
    }
}

/// Saturating counts in 8-bit lanes: literals per header in the first 16
/// lanes, function symbol occurrences in the other 16 (codes folded
/// modulo 16). If `c` subsumes `d`, every lane of `c` is at most that of `d`.
#[derive(Clone, Copy, Default)]
struct Features([u64; 4]);

const HIGH: u64 = 0x8080_8080_8080_8080;

impl Features {
    fn of(c: &FClause) -> Self {
        let mut lanes = [0u8; 32];
        for i in 0..c.len() {
            let lit = c.literal(i);
            let h = &mut lanes[(lit[0] % 16) as usize];
            *h = (*h + 1).min(127);
            for &code in &lit[1..] {
                if code & VAR == 0 {
                    let f = &mut lanes[16 + (code % 16) as usize];
                    *f = (*f + 1).min(127);
                }
            }
        }
        let mut words = [0u64; 4];
        for (w, chunk) in words.iter_mut().zip(lanes.chunks(8)) {
            *w = u64::from_le_bytes(chunk.try_into().unwrap());
        }
        Features(words)
    }

    /// Lane-wise `self <= other`.
    fn below(&self, other: &Self) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .all(|(&a, &b)| ((b | HIGH) - a) & HIGH == HIGH)
    }
}

/// Subsumption index key of a literal: header and the code of the first
/// argument, or `NONE` when that is a variable or absent. A literal can only
/// be matched onto literals with the same key, or onto any literal with the
/// same header when its own key ends in `NONE`.
type Key = (u32, u32);

fn index_key(lit: &[u32]) -> Key {
    let top = match lit.get(1) {
        Some(&c) if c & VAR == 0 => c,
        _ => NONE,
    };
    (lit[0], top)
}

fn most_specific_first(c: &FClause) -> FClause {
    let mut order: Vec<usize> = (0..c.len()).collect();
    let symbols = |i: usize| c.literal(i).iter().filter(|&&x| x & VAR == 0).count();
    order.sort_by_key(|&i| std::cmp::Reverse(symbols(i)));
    let mut p = FClause {
        num_vars: c.num_vars,
        ..FClause::default()
    };
    for i in order {
        p.starts.push(p.codes.len() as u32);
        p.codes.extend_from_slice(c.literal(i));
    }
    p
}

fn pair_key(a: u32, b: u32) -> u64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    (hi as u64) << 32 | lo as u64
}

/// Writes the factor of `c` merging literal `j` into literal `i`.
fn build_factor(
    u: &mut Unifier,
    arity: &[u32],
    c: &FClause,
    i: usize,
    j: usize,
    out: &mut FClause,
) -> bool {
    let (si, sj) = (c.starts[i], c.starts[j]);
    if c.codes[si as usize] != c.codes[sj as usize] {
        return false;
    }
    let s = Sides {
        code: [&c.codes, &c.codes],
        off: [0, 0],
        arity,
    };
    u.reset(c.num_vars as usize);
    if !u.unify_literals(&s, si, sj) {
        return false;
    }
    out.codes.clear();
    out.starts.clear();
    u.start_emit();
    for k in 0..c.len() {
        if k != j {
            u.emit_literal(&s, c.starts[k], out);
        }
    }
    out.num_vars = u.next_var;
    true
}

/// Writes the resolvent of `left` on literal `i` with `right` on literal
/// `j`; `right` is renamed apart by offsetting its variables.
fn build_resolvent(
    u: &mut Unifier,
    arity: &[u32],
    left: &FClause,
    right: &FClause,
    i: usize,
    j: usize,
    out: &mut FClause,
) -> bool {
    let (a, b) = (left.starts[i], right.starts[j]);
    if left.codes[a as usize] != right.codes[b as usize] ^ 1 {
        return false;
    }
    let s = Sides {
        code: [&left.codes, &right.codes],
        off: [0, left.num_vars],
        arity,
    };
    u.reset((left.num_vars + right.num_vars) as usize);
    if !u.unify_literals(&s, a, SIDE | b) {
        return false;
    }
    out.codes.clear();
    out.starts.clear();
    u.start_emit();
    for k in 0..left.len() {
        if k != i {
            u.emit_literal(&s, left.starts[k], out);
        }
    }
    for k in 0..right.len() {
        if k != j {
            u.emit_literal(&s, SIDE | right.starts[k], out);
        }
    }
    out.num_vars = u.next_var;
    true
}

enum Origin {
    Input(Symbol),
    Resolution {
        parents: [u32; 2],
        positions: [u32; 2],
    },
    Factoring {
        parent: u32,
        positions: [u32; 2],
    },
}

pub(super) struct Engine<'a> {
    limits: &'a SaturationLimits,
    started: Instant,
    table: SymbolTable,
    clauses: Vec<FClause>,
    /// The same clauses with their most specific literals first, for
    /// subsumption tests.
    patterns: Vec<FClause>,
    origins: Vec<Origin>,
    weights: Vec<u32>,
    by_weight: BTreeSet<(u32, u32)>,
    by_age: BTreeSet<u32>,
    /// Active literals by header: (clause, literal index).
    active: FxHashMap<u32, Vec<(u32, u32)>>,
    /// Dense ids of the literal keys that occur in the subsumption index.
    key_ids: FxHashMap<Key, u32>,
    /// Unit clauses by key id.
    units: Vec<Vec<(Features, u32)>>,
    /// Longer clauses, each filed under the key ids of two of its literals.
    subsumers: FxHashMap<u64, Vec<(Features, u32)>>,
    seen: FxHashSet<Box<[u32]>>,
    /// Recent successful subsumers, checked before the index.
    recent: Vec<(Features, u32)>,
    /// Key ids offered by the clause being tested, with the number of its
    /// literals offering each.
    offered: Vec<(u32, u32)>,
    /// Activation order of each clause.
    rank: Vec<u32>,
    next_rank: u32,
    pairs: Vec<(u32, u32, u32, u32)>,
    unifier: Unifier,
    matcher: Matcher,
    scratch: FClause,
    memory: usize,
    pub(super) stats: SaturationStats,
    #[cfg(test)]
    trace: Vec<u32>,
}

enum Outcome {
    Continue,
    Empty(u32),
    Limit(ResourceReason),
}

impl<'a> Engine<'a> {
    pub(super) fn new(limits: &'a SaturationLimits) -> Self {
        Engine {
            limits,
            started: Instant::now(),
            table: SymbolTable::new(),
            clauses: Vec::new(),
            patterns: Vec::new(),
            origins: Vec::new(),
            weights: Vec::new(),
            by_weight: BTreeSet::new(),
            by_age: BTreeSet::new(),
            active: FxHashMap::default(),
            key_ids: FxHashMap::default(),
            units: Vec::new(),
            subsumers: FxHashMap::default(),
            seen: FxHashSet::default(),
            offered: Vec::new(),
            recent: Vec::new(),
            rank: Vec::new(),
            next_rank: 0,
            pairs: Vec::new(),
            unifier: Unifier::default(),
            matcher: Matcher::default(),
            scratch: FClause::default(),
            memory: 0,
            stats: SaturationStats::default(),
            #[cfg(test)]
            trace: Vec::new(),
        }
    }

    fn check_limits(&self) -> Option<ResourceReason> {
        if self
            .limits
            .cancel
            .as_ref()
            .is_some_and(|c| c.load(Ordering::Relaxed))
        {
            return Some(ResourceReason::Cancelled);
        }
        if self.clauses.len() >= self.limits.max_clauses {
            return Some(ResourceReason::ClauseLimit);
        }
        if self.memory >= self.limits.max_memory {
            return Some(ResourceReason::MemoryLimit);
        }
        if self.started.elapsed() >= self.limits.time_limit {
            return Some(ResourceReason::TimeLimit);
        }
        None
    }

    fn scan(
        &mut self,
        bucket: Option<&Vec<(Features, u32)>>,
        c: &FClause,
        m: &Features,
    ) -> Option<(Features, u32)> {
        bucket?.iter().find_map(|&(f, id)| {
            (f.below(m)
                && self
                    .matcher
                    .subsumes(&self.patterns[id as usize], c, &self.table.arity))
            .then_some((f, id))
        })
    }

    fn forward_subsumed(&mut self, c: &FClause, m: &Features) -> bool {
        for k in 0..self.recent.len() {
            let (f, id) = self.recent[k];
            if f.below(m)
                && self
                    .matcher
                    .subsumes(&self.patterns[id as usize], c, &self.table.arity)
            {
                self.recent[..=k].rotate_right(1);
                return true;
            }
        }
        match self.index_subsumer(c, m) {
            Some(entry) => {
                if self.recent.len() == RECENT {
                    self.recent.pop();
                }
                self.recent.insert(0, entry);
                true
            }
            None => false,
        }
    }

    fn index_subsumer(&mut self, c: &FClause, m: &Features) -> Option<(Features, u32)> {
        let mut offered = std::mem::take(&mut self.offered);
        offered.clear();
        for i in 0..c.len() {
            let k = index_key(c.literal(i));
            let wild = (k.1 != NONE).then_some((k.0, NONE));
            for key in [Some(k), wild].into_iter().flatten() {
                let Some(&id) = self.key_ids.get(&key) else {
                    continue;
                };
                match offered.iter_mut().find(|(o, _)| *o == id) {
                    Some((_, n)) => *n += 1,
                    None => offered.push((id, 1)),
                }
            }
        }
        let units = std::mem::take(&mut self.units);
        let mut hit = offered
            .iter()
            .find_map(|&(id, _)| self.scan(units.get(id as usize), c, m));
        self.units = units;
        if hit.is_none() && c.len() > 1 {
            let subsumers = std::mem::take(&mut self.subsumers);
            'probe: for (x, &(a, n)) in offered.iter().enumerate() {
                if n > 1 {
                    hit = self.scan(subsumers.get(&pair_key(a, a)), c, m);
                    if hit.is_some() {
                        break;
                    }
                }
                for &(b, _) in &offered[x + 1..] {
                    hit = self.scan(subsumers.get(&pair_key(a, b)), c, m);
                    if hit.is_some() {
                        break 'probe;
                    }
                }
            }
            self.subsumers = subsumers;
        }
        self.offered = offered;
        hit
    }

    fn key_id(&mut self, key: Key) -> u32 {
        let next = self.key_ids.len() as u32;
        *self.key_ids.entry(key).or_insert(next)
    }

    /// Files the scratch clause unless it is redundant.
    fn consider(&mut self, origin: Origin) -> Outcome {
        self.stats.generated += 1;
        let c = std::mem::take(&mut self.scratch);
        let outcome = if c.len() == 0 {
            Outcome::Empty(self.keep(c.clone(), origin, Features::default()))
        } else if is_tautology(&c, &self.table.arity) || self.seen.contains(c.codes.as_slice()) {
            Outcome::Continue
        } else {
            let m = Features::of(&c);
            if !self.forward_subsumed(&c, &m) {
                self.keep(c.clone(), origin, m);
            }
            Outcome::Continue
        };
        self.scratch = c;
        if matches!(outcome, Outcome::Continue) && self.stats.generated.is_multiple_of(256) {
            if let Some(r) = self.check_limits() {
                return Outcome::Limit(r);
            }
        }
        outcome
    }

    fn keep(&mut self, c: FClause, origin: Origin, m: Features) -> u32 {
        let id = self.clauses.len() as u32;
        let weight = c.codes.len() as u32;
        if c.len() == 1 {
            let k = self.key_id(index_key(&c.codes)) as usize;
            if self.units.len() <= k {
                self.units.resize_with(k + 1, Vec::new);
            }
            self.units[k].push((m, id));
        } else if c.len() > 1 {
            let keys: Vec<u32> = (0..c.len())
                .map(|i| self.key_id(index_key(c.literal(i))))
                .collect();
            let mut best = pair_key(keys[0], keys[1]);
            let mut best_len = usize::MAX;
            for i in 0..keys.len() {
                for j in i + 1..keys.len() {
                    let pair = pair_key(keys[i], keys[j]);
                    let len = self.subsumers.get(&pair).map_or(0, Vec::len);
                    if len < best_len {
                        (best, best_len) = (pair, len);
                    }
                }
            }
            self.subsumers.entry(best).or_default().push((m, id));
        }
        if c.len() > 0 {
            self.seen.insert(c.codes.clone().into_boxed_slice());
        }
        self.memory += 8 * c.codes.len() + 4 * c.starts.len() + 96;
        self.patterns.push(most_specific_first(&c));
        self.clauses.push(c);
        self.origins.push(origin);
        self.weights.push(weight);
        self.rank.push(NONE);
        self.by_weight.insert((weight, id));
        self.by_age.insert(id);
        self.stats.kept += 1;
        id
    }

    fn select(&mut self) -> Option<u32> {
        let by_age = self.stats.selected % AGE_PERIOD == AGE_PERIOD - 1;
        let id = if by_age {
            *self.by_age.iter().next()?
        } else {
            self.by_weight.iter().next()?.1
        };
        self.by_age.remove(&id);
        self.by_weight.remove(&(self.weights[id as usize], id));
        self.stats.selected += 1;
        #[cfg(test)]
        self.trace.push(id);
        Some(id)
    }

    fn factors(&mut self, given: u32) -> Outcome {
        let n = self.clauses[given as usize].len();
        for i in 0..n {
            for j in i + 1..n {
                let c = &self.clauses[given as usize];
                if !build_factor(
                    &mut self.unifier,
                    &self.table.arity,
                    c,
                    i,
                    j,
                    &mut self.scratch,
                ) {
                    continue;
                }
                let origin = Origin::Factoring {
                    parent: given,
                    positions: [i as u32, j as u32],
                };
                match self.consider(origin) {
                    Outcome::Continue => {}
                    other => return other,
                }
            }
        }
        Outcome::Continue
    }

    /// Resolves the given clause with every active clause, partners taken
    /// in activation order.
    fn resolvents(&mut self, given: u32) -> Outcome {
        let mut pairs = std::mem::take(&mut self.pairs);
        pairs.clear();
        {
            let c = &self.clauses[given as usize];
            for i in 0..c.len() {
                let header = c.codes[c.starts[i] as usize];
                if let Some(bucket) = self.active.get(&(header ^ 1)) {
                    for &(other, j) in bucket {
                        pairs.push((self.rank[other as usize], i as u32, other, j));
                    }
                }
            }
        }
        pairs.sort_unstable();
        let mut outcome = Outcome::Continue;
        for &(_, i, other, j) in &pairs {
            let i = i as usize;
            {
                let left = &self.clauses[given as usize];
                let right = &self.clauses[other as usize];
                let arity = &self.table.arity;
                if !build_resolvent(
                    &mut self.unifier,
                    arity,
                    left,
                    right,
                    i,
                    j as usize,
                    &mut self.scratch,
                ) {
                    continue;
                }
                let origin = Origin::Resolution {
                    parents: [given, other],
                    positions: [i as u32, j],
                };
                match self.consider(origin) {
                    Outcome::Continue => {}
                    other => {
                        outcome = other;
                        break;
                    }
                }
            }
        }
        self.pairs = pairs;
        outcome
    }

    fn activate(&mut self, id: u32) {
        self.rank[id as usize] = self.next_rank;
        self.next_rank += 1;
        let c = &self.clauses[id as usize];
        for i in 0..c.len() {
            let header = c.codes[c.starts[i] as usize];
            self.active.entry(header).or_default().push((id, i as u32));
        }
    }

    pub(super) fn run(&mut self, inputs: &[Clause]) -> SaturationResult {
        self.run_until(inputs, usize::MAX)
    }

    fn run_until(&mut self, inputs: &[Clause], selections: usize) -> SaturationResult {
        for c in inputs {
            let label = c
                .provenance
                .first()
                .copied()
                .unwrap_or_else(|| Symbol::intern("input"));
            self.scratch = encode(&c.normalized(0), &mut self.table);
            if let Outcome::Empty(id) = self.consider(Origin::Input(label)) {
                return SaturationResult::Refutation(self.derivation(id));
            }
        }
        loop {
            if let Some(reason) = self.check_limits() {
                return SaturationResult::ResourceOut(reason);
            }
            if self.stats.selected >= selections {
                return SaturationResult::ResourceOut(ResourceReason::Cancelled);
            }
            let Some(given) = self.select() else {
                return SaturationResult::Saturated;
            };
            let mut outcome = self.factors(given);
            if matches!(outcome, Outcome::Continue) {
                self.activate(given);
                outcome = self.resolvents(given);
            }
            match outcome {
                Outcome::Continue => {}
                Outcome::Empty(id) => return SaturationResult::Refutation(self.derivation(id)),
                Outcome::Limit(reason) => return SaturationResult::ResourceOut(reason),
            }
        }
    }

    fn derivation(&self, empty: u32) -> Derivation {
        let mut needed = BTreeSet::new();
        let mut stack = vec![empty];
        while let Some(id) = stack.pop() {
            if !needed.insert(id) {
                continue;
            }
            match &self.origins[id as usize] {
                Origin::Input(_) => {}
                Origin::Resolution { parents, .. } => stack.extend(parents.iter().copied()),
                Origin::Factoring { parent, .. } => stack.push(*parent),
            }
        }
        // the empty clause is step 0 and comes last
        let renumber: HashMap<u32, usize> = needed
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, if id == empty { 0 } else { i + 1 }))
            .collect();
        let decoded: HashMap<u32, Clause> = needed
            .iter()
            .map(|&id| (id, decode(&self.clauses[id as usize], &self.table)))
            .collect();
        let steps = needed
            .iter()
            .map(|&id| {
                let rule = match self.origins[id as usize] {
                    Origin::Input(label) => Rule::Input(label),
                    Origin::Resolution { parents, positions } => {
                        let left = &decoded[&parents[0]];
                        let right = decoded[&parents[1]].normalized(left.variables().len());
                        let mgu = unify_atoms(
                            &left.literals()[positions[0] as usize].atom,
                            &right.literals()[positions[1] as usize].atom,
                        )
                        .mgu()
                        .expect("recorded resolution premises unify");
                        Rule::Resolution {
                            parents: [renumber[&parents[0]], renumber[&parents[1]]],
                            positions: [positions[0] as usize, positions[1] as usize],
                            mgu,
                        }
                    }
                    Origin::Factoring { parent, positions } => {
                        let c = &decoded[&parent];
                        let mgu = unify_atoms(
                            &c.literals()[positions[0] as usize].atom,
                            &c.literals()[positions[1] as usize].atom,
                        )
                        .mgu()
                        .expect("recorded factoring literals unify");
                        Rule::Factoring {
                            parent: renumber[&parent],
                            positions: [positions[0] as usize, positions[1] as usize],
                            mgu,
                        }
                    }
                };
                Step {
                    id: renumber[&id],
                    clause: decoded[&id].clone(),
                    rule,
                }
            })
            .collect();
        Derivation { steps }
    }
}
