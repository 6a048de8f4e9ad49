//! CDCL propositional solver: two watched literals, first-UIP learning,
//! activity-based branching and geometric restarts.

use std::fmt::Write as _;
use thiserror::Error;

/// Clauses over variables `1..=num_vars`, literals as signed DIMACS indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropClauseSet {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl PropClauseSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocates a variable and returns its (positive) index.
    pub fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    pub fn add_clause(&mut self, clause: Vec<i32>) {
        debug_assert!(clause
            .iter()
            .all(|&l| l != 0 && l.unsigned_abs() as usize <= self.num_vars));
        self.clauses.push(clause);
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn parse_dimacs(text: &str) -> Result<PropClauseSet, DimacsError> {
        let mut header: Option<(usize, usize)> = None;
        let mut set = PropClauseSet::new();
        let mut current = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    ["p", "cnf", v, c] => {
                        let v = v.parse().map_err(|_| DimacsError::Header(line_no))?;
                        let c = c.parse().map_err(|_| DimacsError::Header(line_no))?;
                        header = Some((v, c));
                        set.num_vars = v;
                    }
                    _ => return Err(DimacsError::Header(line_no)),
                }
                continue;
            }
            let Some((num_vars, _)) = header else {
                return Err(DimacsError::MissingHeader);
            };
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| DimacsError::Literal {
                    line: line_no,
                    token: tok.to_string(),
                })?;
                if l == 0 {
                    set.clauses.push(std::mem::take(&mut current));
                } else if l.unsigned_abs() as usize > num_vars {
                    return Err(DimacsError::Literal {
                        line: line_no,
                        token: tok.to_string(),
                    });
                } else {
                    current.push(l);
                }
            }
        }
        if !current.is_empty() {
            set.clauses.push(current);
        }
        match header {
            None => Err(DimacsError::MissingHeader),
            Some((_, n)) if n != set.clauses.len() => Err(DimacsError::ClauseCount {
                declared: n,
                found: set.clauses.len(),
            }),
            Some(_) => Ok(set),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {0}: malformed header")]
    Header(usize),
    #[error("line {line}: bad literal `{token}`")]
    Literal { line: usize, token: String },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    /// `assignment[v - 1]` is the value of variable `v`.
    Sat(Vec<bool>),
    Unsat,
}

pub fn sat_solve(c: &PropClauseSet) -> SatResult {
    Solver::new(c).solve(None).expect("uninterruptible solve")
}

/// Like [`sat_solve`], but gives up with `None` once `stop` returns true.
/// `stop` is polled after each conflict.
pub fn sat_solve_interruptible(c: &PropClauseSet, stop: &dyn Fn() -> bool) -> Option<SatResult> {
    Solver::new(c).solve(Some(stop))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: i32) -> Lit {
        let v = l.unsigned_abs() - 1;
        Lit(2 * v + u32::from(l < 0))
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn negative(self) -> bool {
        self.0 & 1 == 1
    }
    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const UNDEF: u8 = 2;

/// Max-heap of variables by activity, ties to the lowest index.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn before(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::before(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::before(act, self.heap[r], self.heap[l]) {
                r
            } else {
                l
            };
            if !Self::before(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.down(0, act);
        }
        Some(top)
    }
}

struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    seen: Vec<bool>,
    trivially_unsat: bool,
}

impl Solver {
    fn new(set: &PropClauseSet) -> Solver {
        let n = set.num_vars;
        let mut s = Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            heap: VarHeap {
                heap: Vec::with_capacity(n),
                pos: vec![None; n],
            },
            seen: vec![false; n],
            trivially_unsat: false,
        };
        for v in 0..n {
            s.heap.insert(v, &s.activity);
        }
        for c in &set.clauses {
            let mut lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l)).collect();
            lits.sort_by_key(|l| l.0);
            lits.dedup();
            if lits.windows(2).any(|w| w[0] == !w[1]) {
                continue;
            }
            s.add_input(lits);
        }
        s
    }

    fn lit_value(&self, l: Lit) -> u8 {
        let v = self.value[l.var()];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ u8::from(l.negative())
        }
    }

    fn add_input(&mut self, lits: Vec<Lit>) {
        if self.trivially_unsat {
            return;
        }
        match lits.len() {
            0 => self.trivially_unsat = true,
            1 => match self.lit_value(lits[0]) {
                0 => self.trivially_unsat = true,
                1 => {}
                _ => self.assign(lits[0], None),
            },
            _ => {
                let idx = self.clauses.len();
                self.watches[lits[0].index()].push(idx);
                self.watches[lits[1].index()].push(idx);
                self.clauses.push(lits);
            }
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn assign(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        self.value[v] = u8::from(!l.negative());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Returns the index of a conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.lit_value(first) == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[ci].len() {
                    let lk = self.clauses[ci][k];
                    if self.lit_value(lk) != 0 {
                        self.clauses[ci].swap(1, k);
                        self.watches[lk.index()].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.lit_value(first) == 0 {
                    conflict = Some(ci);
                    break;
                }
                self.assign(first, Some(ci));
                i += 1;
            }
            let rest = std::mem::replace(&mut self.watches[false_lit.index()], ws);
            self.watches[false_lit.index()].extend(rest);
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        if let Some(i) = self.heap.pos[v] {
            self.heap.up(i, &self.activity);
        }
    }

    /// First-UIP learning: returns the learnt clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, mut conflict: usize) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit(0)];
        let mut pending = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            let start = usize::from(p.is_some());
            for k in start..self.clauses[conflict].len() {
                let q = self.clauses[conflict][k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= self.decision_level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var()] = false;
            pending -= 1;
            p = Some(lit);
            if pending == 0 {
                break;
            }
            conflict = self.reason[lit.var()].expect("implied literal has a reason");
        }
        learnt[0] = !p.unwrap();
        for l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var()] > self.level[learnt[max_i].var()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            back = self.level[learnt[1].var()];
        }
        (learnt, back)
    }

    fn backtrack(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for k in (lim..self.trail.len()).rev() {
            let v = self.trail[k].var();
            self.value[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<usize> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == UNDEF {
                return Some(v);
            }
        }
        None
    }

    fn solve(mut self, stop: Option<&dyn Fn() -> bool>) -> Option<SatResult> {
        if self.trivially_unsat {
            return Some(SatResult::Unsat);
        }
        let mut restart_at = 100.0f64;
        let mut conflicts_since_restart = 0usize;
        loop {
            if let Some(conflict) = self.propagate() {
                if self.decision_level() == 0 {
                    return Some(SatResult::Unsat);
                }
                if stop.is_some_and(|s| s()) {
                    return None;
                }
                conflicts_since_restart += 1;
                let (learnt, back) = self.analyze(conflict);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.assign(learnt[0], None);
                } else {
                    let idx = self.clauses.len();
                    self.watches[learnt[0].index()].push(idx);
                    self.watches[learnt[1].index()].push(idx);
                    let asserting = learnt[0];
                    self.clauses.push(learnt);
                    self.assign(asserting, Some(idx));
                }
                self.var_inc /= 0.95;
                if conflicts_since_restart as f64 >= restart_at {
                    conflicts_since_restart = 0;
                    restart_at *= 1.5;
                    self.backtrack(0);
                }
            } else {
                match self.pick_branch() {
                    None => {
                        let model = self.value.iter().map(|&v| v == 1).collect();
                        return Some(SatResult::Sat(model));
                    }
                    Some(v) => {
                        self.trail_lim.push(self.trail.len());
                        self.assign(Lit(2 * v as u32 + 1), None);
                    }
                }
            }
        }
    }
}
