//! DPLL with two-watched-literal unit propagation and chronological
//! backtracking. Variables are branched on in index order, positive phase
//! first.

use super::cnf::{CnfFormula, Lit};

/// Default limit on the number of branching decisions.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// `model[v]` is the value of variable `v`; index 0 is unused.
    Sat(Vec<bool>),
    Unsat,
    /// The decision budget ran out before an answer was found.
    BudgetExceeded,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

pub fn solve(f: &CnfFormula) -> SatResult {
    solve_with_budget(f, DEFAULT_BUDGET)
}

pub fn solve_with_budget(f: &CnfFormula, budget: u64) -> SatResult {
    if f.has_empty_clause() {
        return SatResult::Unsat;
    }
    let Some(mut solver) = Solver::new(f) else {
        return SatResult::Unsat;
    };
    let result = solver.search(budget);
    if let SatResult::Sat(model) = &result {
        assert!(f.satisfied_by(model), "solver produced a model that violates the formula");
    }
    result
}

const UNASSIGNED: i8 = 0;

fn lit_index(l: Lit) -> usize {
    (l.unsigned_abs() as usize - 1) * 2 + usize::from(l < 0)
}

struct Solver {
    vars: usize,
    clauses: Vec<Vec<Lit>>,
    /// Clauses watching each literal, by `lit_index`.
    watches: Vec<Vec<usize>>,
    /// +1 true, -1 false, 0 unassigned; indexed by variable.
    values: Vec<i8>,
    trail: Vec<Lit>,
    /// Trail length at the start of each decision level.
    levels: Vec<usize>,
    /// Decision literal per level and whether it is already the flipped branch.
    decisions: Vec<(Lit, bool)>,
    queue_head: usize,
}

impl Solver {
    /// `None` if the unit clauses are already contradictory.
    fn new(f: &CnfFormula) -> Option<Self> {
        let vars = f.variable_count();
        let mut s = Solver {
            vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); vars * 2],
            values: vec![UNASSIGNED; vars + 1],
            trail: Vec::new(),
            levels: Vec::new(),
            decisions: Vec::new(),
            queue_head: 0,
        };
        let mut units = Vec::new();
        for clause in f.clauses() {
            let mut c = clause.clone();
            c.sort_unstable();
            c.dedup();
            if c.iter().any(|&l| c.contains(&-l)) {
                continue;
            }
            if c.len() == 1 {
                units.push(c[0]);
                continue;
            }
            let id = s.clauses.len();
            s.watches[lit_index(c[0])].push(id);
            s.watches[lit_index(c[1])].push(id);
            s.clauses.push(c);
        }
        for u in units {
            match s.value(u) {
                Some(true) => {}
                Some(false) => return None,
                None => s.assign(u),
            }
        }
        Some(s)
    }

    fn value(&self, l: Lit) -> Option<bool> {
        match self.values[l.unsigned_abs() as usize] {
            UNASSIGNED => None,
            v => Some((v > 0) == (l > 0)),
        }
    }

    fn assign(&mut self, l: Lit) {
        self.values[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.queue_head < self.trail.len() {
            let falsified = -self.trail[self.queue_head];
            self.queue_head += 1;
            let fi = lit_index(falsified);
            let watching = std::mem::take(&mut self.watches[fi]);
            let mut keep = Vec::with_capacity(watching.len());
            let mut conflict = false;
            for (pos, &cid) in watching.iter().enumerate() {
                if conflict {
                    keep.extend_from_slice(&watching[pos..]);
                    break;
                }
                let clause = &mut self.clauses[cid];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                if self.values[other.unsigned_abs() as usize] != UNASSIGNED
                    && (self.values[other.unsigned_abs() as usize] > 0) == (other > 0)
                {
                    keep.push(cid);
                    continue;
                }
                let replacement = (2..clause.len()).find(|&k| {
                    let l = clause[k];
                    let v = self.values[l.unsigned_abs() as usize];
                    v == UNASSIGNED || (v > 0) == (l > 0)
                });
                match replacement {
                    Some(k) => {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[lit_index(new_watch)].push(cid);
                    }
                    None => {
                        keep.push(cid);
                        match self.value(other) {
                            None => self.assign(other),
                            Some(false) => conflict = true,
                            Some(true) => unreachable!(),
                        }
                    }
                }
            }
            self.watches[fi] = keep;
            if conflict {
                return false;
            }
        }
        true
    }

    fn backtrack(&mut self) {
        let start = self.levels.pop().expect("backtrack below level 0");
        for l in self.trail.drain(start..) {
            self.values[l.unsigned_abs() as usize] = UNASSIGNED;
        }
        self.queue_head = start;
    }

    fn search(&mut self, budget: u64) -> SatResult {
        let mut decisions = 0u64;
        let mut next_var = 1usize;
        if !self.propagate() {
            return SatResult::Unsat;
        }
        loop {
            while next_var <= self.vars && self.values[next_var] != UNASSIGNED {
                next_var += 1;
            }
            if next_var > self.vars {
                let model = std::iter::once(false)
                    .chain(self.values[1..].iter().map(|&v| v > 0))
                    .collect();
                return SatResult::Sat(model);
            }
            if decisions >= budget {
                return SatResult::BudgetExceeded;
            }
            decisions += 1;
            let lit = next_var as Lit;
            self.levels.push(self.trail.len());
            self.decisions.push((lit, false));
            self.assign(lit);
            while !self.propagate() {
                // Undo levels whose flipped branch also failed.
                loop {
                    let Some((lit, flipped)) = self.decisions.pop() else {
                        return SatResult::Unsat;
                    };
                    self.backtrack();
                    if !flipped {
                        self.levels.push(self.trail.len());
                        self.decisions.push((-lit, true));
                        self.assign(-lit);
                        break;
                    }
                }
            }
            next_var = 1;
        }
    }
}
