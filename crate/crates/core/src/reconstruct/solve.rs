use super::ip::{IpModel, Sense};

pub const NODE_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub assignment: Vec<bool>,
    pub objective: f64,
    /// False when the node budget ran out before optimality was proven.
    pub certified: bool,
    pub nodes: u64,
}

impl Solution {
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(i, _)| i)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SolveError {
    #[error("the integer program is infeasible")]
    Infeasible,
    #[error("node budget exhausted before any feasible assignment was found")]
    NodeLimit,
    #[error("constraint {constraint} references variable {var} of {len}")]
    BadVariable {
        constraint: usize,
        var: usize,
        len: usize,
    },
}

struct Row {
    terms: Vec<(usize, i64)>,
    rhs: i64,
}

const FREE: i8 = -1;

struct Search {
    w: Vec<f64>,
    rows: Vec<Row>,
    var_rows: Vec<Vec<usize>>,
    val: Vec<i8>,
    trail: Vec<usize>,
    queued: Vec<bool>,
    best: Option<(f64, Vec<bool>)>,
    slack: f64,
    nodes: u64,
    limit: u64,
    aborted: bool,
}

impl Search {
    fn new(w: Vec<f64>, rows: Vec<Row>, limit: u64) -> Self {
        let n = w.len();
        let mut var_rows = vec![Vec::new(); n];
        for (r, row) in rows.iter().enumerate() {
            for &(i, _) in &row.terms {
                if var_rows[i].last() != Some(&r) {
                    var_rows[i].push(r);
                }
            }
        }
        let slack = 1e-9 * w.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        let queued = vec![false; rows.len()];
        Self {
            w,
            rows,
            var_rows,
            val: vec![FREE; n],
            trail: Vec::new(),
            queued,
            best: None,
            slack,
            nodes: 0,
            limit,
            aborted: false,
        }
    }

    fn fix(&mut self, i: usize, v: i8) {
        self.val[i] = v;
        self.trail.push(i);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let i = self.trail.pop().unwrap();
            self.val[i] = FREE;
        }
    }

    /// Bound propagation over `≤` rows: fails on a row whose minimum activity
    /// already exceeds its right-hand side, and fixes every free variable
    /// whose other value would.
    fn propagate(&mut self, mut queue: Vec<usize>) -> bool {
        for &r in &queue {
            self.queued[r] = true;
        }
        let mut ok = true;
        while let Some(r) = queue.pop() {
            self.queued[r] = false;
            if !ok {
                continue;
            }
            let row = &self.rows[r];
            let mut min = 0i64;
            for &(i, a) in &row.terms {
                min += match self.val[i] {
                    FREE => a.min(0),
                    v => a * v as i64,
                };
            }
            if min > row.rhs {
                ok = false;
                continue;
            }
            let mut forced = Vec::new();
            for &(i, a) in &row.terms {
                if self.val[i] != FREE {
                    continue;
                }
                if a > 0 && min + a > row.rhs {
                    forced.push((i, 0));
                } else if a < 0 && min - a > row.rhs {
                    forced.push((i, 1));
                }
            }
            for (i, v) in forced {
                if self.val[i] != FREE {
                    continue;
                }
                self.fix(i, v);
                for &r2 in &self.var_rows[i] {
                    if !self.queued[r2] {
                        self.queued[r2] = true;
                        queue.push(r2);
                    }
                }
            }
        }
        ok
    }

    fn propagate_var(&mut self, i: usize) -> bool {
        let rows = self.var_rows[i].clone();
        self.propagate(rows)
    }

    fn dfs(&mut self) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return;
        }
        let mut current = 0.0;
        let mut optimistic = 0.0;
        let mut branch = None;
        for (i, &v) in self.val.iter().enumerate() {
            match v {
                1 => current += self.w[i],
                FREE => {
                    if branch.is_none() {
                        branch = Some(i);
                    }
                    if self.w[i] > 0.0 {
                        optimistic += self.w[i];
                    }
                }
                _ => {}
            }
        }
        if let Some((best, _)) = &self.best {
            if current + optimistic + self.slack < *best {
                return;
            }
        }
        let Some(i) = branch else {
            let x: Vec<bool> = self.val.iter().map(|&v| v == 1).collect();
            let value = x
                .iter()
                .zip(&self.w)
                .filter(|(on, _)| **on)
                .fold(0.0, |acc, (_, w)| acc + w);
            let better = match &self.best {
                None => true,
                Some((b, bx)) => value > *b || (value == *b && x < *bx),
            };
            if better {
                self.best = Some((value, x));
            }
            return;
        };
        let order: [i8; 2] = if self.w[i] > 0.0 { [1, 0] } else { [0, 1] };
        for v in order {
            let mark = self.trail.len();
            self.fix(i, v);
            if self.propagate_var(i) {
                self.dfs();
            }
            self.undo(mark);
        }
    }
}

/// Exact maximization by depth-first branch and bound on each independent
/// block of variables. Among optimal assignments the lexicographically
/// smallest (false < true, variable order) is returned.
pub fn solve_ip(model: &IpModel) -> Result<Solution, SolveError> {
    solve_ip_with_limit(model, NODE_LIMIT)
}

pub fn solve_ip_with_limit(model: &IpModel, limit: u64) -> Result<Solution, SolveError> {
    let n = model.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (k, c) in model.constraints.iter().enumerate() {
        if let Some(&(var, _)) = c.terms.iter().find(|(i, _)| *i >= n) {
            return Err(SolveError::BadVariable {
                constraint: k,
                var,
                len: n,
            });
        }
        if c.terms.is_empty() {
            let ok = match c.sense {
                Sense::Le => 0 <= c.rhs,
                Sense::Eq => c.rhs == 0,
            };
            if !ok {
                return Err(SolveError::Infeasible);
            }
        }
        for w in c.terms.windows(2) {
            let (a, b) = (find(&mut parent, w[0].0), find(&mut parent, w[1].0));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut constrained = vec![false; n];
    for c in &model.constraints {
        for &(i, _) in &c.terms {
            constrained[i] = true;
        }
    }

    let mut assignment = vec![false; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; n];
    for i in 0..n {
        if !constrained[i] {
            assignment[i] = model.objective[i] > 0.0;
            continue;
        }
        let root = find(&mut parent, i);
        if block_of[root] == usize::MAX {
            block_of[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[block_of[root]].push(i);
    }

    let mut rows_of: Vec<Vec<Row>> = (0..blocks.len()).map(|_| Vec::new()).collect();
    let mut local = vec![0usize; n];
    for b in &blocks {
        for (k, &i) in b.iter().enumerate() {
            local[i] = k;
        }
    }
    for c in &model.constraints {
        let Some(&(first, _)) = c.terms.first() else {
            continue;
        };
        let b = block_of[find(&mut parent, first)];
        let mut merged: Vec<(usize, i64)> = Vec::new();
        let mut terms: Vec<(usize, i64)> = c.terms.iter().map(|&(i, a)| (local[i], a)).collect();
        terms.sort_unstable_by_key(|t| t.0);
        for (i, a) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += a,
                _ => merged.push((i, a)),
            }
        }
        merged.retain(|t| t.1 != 0);
        if c.sense == Sense::Eq {
            rows_of[b].push(Row {
                terms: merged.iter().map(|&(i, a)| (i, -a)).collect(),
                rhs: -c.rhs,
            });
        }
        rows_of[b].push(Row {
            terms: merged,
            rhs: c.rhs,
        });
    }

    let mut nodes = 0;
    let mut certified = true;
    for (b, rows) in blocks.iter().zip(rows_of) {
        let w: Vec<f64> = b.iter().map(|&i| model.objective[i]).collect();
        let mut s = Search::new(w, rows, limit.saturating_sub(nodes));
        let all: Vec<usize> = (0..s.rows.len()).collect();
        if s.propagate(all) {
            s.dfs();
        }
        nodes += s.nodes;
        if s.aborted {
            certified = false;
        }
        match s.best {
            Some((_, x)) => {
                for (k, &i) in b.iter().enumerate() {
                    assignment[i] = x[k];
                }
            }
            None if s.aborted => return Err(SolveError::NodeLimit),
            None => return Err(SolveError::Infeasible),
        }
    }
    Ok(Solution {
        objective: model.value(&assignment),
        assignment,
        certified,
        nodes,
    })
}
