//! Backtracking with arc-consistency over bit-mask domains.
//!
//! Domains live in one `Vec<u64>`; every change is logged on a trail so a
//! branch is undone by popping back to a mark. The search stack is explicit.
//! Binary constraints come from [`Model::neighbors`] and
//! [`Model::compatible`], so no constraint graph is stored.

use std::collections::VecDeque;
use std::time::Instant;

use super::model::{full_mask, Model};
use super::{SearchOptions, SearchStats};

pub(crate) enum Finish {
    /// The tree was exhausted (all models found are in the list).
    Complete,
    /// Stopped after reaching the requested number of models.
    Enough,
    Timeout,
}

struct Frame {
    var: usize,
    remaining: u64,
    mark: usize,
}

pub(crate) struct Engine<'m> {
    model: &'m Model,
    opts: &'m SearchOptions,
    dom: Vec<u64>,
    trail: Vec<(usize, u64)>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    buf: Vec<(usize, u64)>,
    start: Instant,
    timed_out: bool,
    pub stats: SearchStats,
    pub models: Vec<Vec<usize>>,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

impl<'m> Engine<'m> {
    pub fn new(model: &'m Model, opts: &'m SearchOptions) -> Self {
        Engine {
            model,
            opts,
            dom: model.initial.clone(),
            trail: Vec::new(),
            queue: VecDeque::new(),
            queued: vec![false; model.nvars],
            buf: Vec::new(),
            start: Instant::now(),
            timed_out: false,
            stats: SearchStats::default(),
            models: Vec::new(),
        }
    }

    fn set(&mut self, v: usize, d: u64) {
        if self.dom[v] != d {
            self.trail.push((v, self.dom[v]));
            self.dom[v] = d;
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, d) = self.trail.pop().expect("trail above mark");
            self.dom[v] = d;
        }
    }

    fn enqueue(&mut self, v: usize) {
        if !self.queued[v] {
            self.queued[v] = true;
            self.queue.push_back(v);
        }
    }

    fn out_of_budget(&self) -> bool {
        if let Some(limit) = self.opts.node_budget {
            if self.stats.nodes >= limit {
                return true;
            }
        }
        match self.opts.time_budget {
            Some(t) => self.stats.nodes.is_multiple_of(256) && self.start.elapsed() >= t,
            None => false,
        }
    }

    pub fn run(&mut self) -> Finish {
        if self.opts.node_budget == Some(0)
            || self.opts.time_budget.is_some_and(|t| t.is_zero())
        {
            return Finish::Timeout;
        }
        if self.dom.contains(&0) {
            return Finish::Complete;
        }
        let all: Vec<usize> = (0..self.model.nvars).collect();
        let consistent = if self.opts.propagate {
            self.propagate(&all)
        } else {
            let fixed: Vec<usize> = all.into_iter().filter(|&v| self.dom[v].count_ones() == 1).collect();
            fixed.into_iter().all(|v| self.check_assigned(v)) && self.globals_feasible()
        };
        if self.timed_out {
            return Finish::Timeout;
        }
        if !consistent {
            return Finish::Complete;
        }
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            match self.select() {
                Some(var) => stack.push(Frame {
                    var,
                    remaining: self.dom[var],
                    mark: self.trail.len(),
                }),
                None => {
                    if self.leaf_ok() {
                        self.stats.models += 1;
                        self.models
                            .push(self.dom.iter().map(|d| d.trailing_zeros() as usize).collect());
                        if self.models.len() >= self.opts.max_models.max(1) {
                            return Finish::Enough;
                        }
                    }
                }
            }
            self.stats.max_depth = self.stats.max_depth.max(stack.len());
            match self.next_branch(&mut stack) {
                Some(true) => continue,
                Some(false) => return Finish::Complete,
                None => return Finish::Timeout,
            }
        }
    }

    /// Tries the next value of the deepest open frame, backtracking as
    /// needed. `Some(false)` when the tree is exhausted, `None` on timeout.
    fn next_branch(&mut self, stack: &mut Vec<Frame>) -> Option<bool> {
        loop {
            let (var, value, mark) = {
                let Some(f) = stack.last_mut() else {
                    return Some(false);
                };
                if f.remaining == 0 {
                    let mark = f.mark;
                    stack.pop();
                    self.undo(mark);
                    self.stats.backtracks += 1;
                    continue;
                }
                let v = f.remaining.trailing_zeros() as usize;
                f.remaining &= f.remaining - 1;
                (f.var, v, f.mark)
            };
            self.undo(mark);
            if self.out_of_budget() {
                return None;
            }
            self.stats.nodes += 1;
            self.set(var, 1 << value);
            let ok = if self.opts.propagate {
                self.propagate(&[var])
            } else {
                self.check_assigned(var) && self.globals_feasible()
            };
            if ok {
                return Some(true);
            }
            if self.timed_out {
                return None;
            }
        }
    }

    fn select(&self) -> Option<usize> {
        let mut open = (0..self.model.nvars).filter(|&v| self.dom[v].count_ones() > 1);
        if self.opts.first_fail {
            open.min_by_key(|&v| self.dom[v].count_ones())
        } else {
            open.next()
        }
    }

    /// Arc-consistency from the given changed variables, interleaved with
    /// the global constraints until a fixpoint.
    fn propagate(&mut self, seeds: &[usize]) -> bool {
        for &v in seeds {
            self.enqueue(v);
        }
        let mut buf = std::mem::take(&mut self.buf);
        let ok = loop {
            if !self.drain(&mut buf) {
                break false;
            }
            match self.propagate_globals() {
                None => break false,
                Some(0) => break true,
                Some(_) => {}
            }
        };
        while let Some(v) = self.queue.pop_front() {
            self.queued[v] = false;
        }
        self.buf = buf;
        ok
    }

    fn drain(&mut self, buf: &mut Vec<(usize, u64)>) -> bool {
        while let Some(x) = self.queue.pop_front() {
            self.queued[x] = false;
            self.model.neighbors(x, buf);
            let dx = self.dom[x];
            for &(y, mask) in buf.iter() {
                let dy = self.dom[y];
                let mut keep = 0u64;
                for b in bits(dy) {
                    if bits(dx).any(|a| self.model.compatible(y, b, x, a, mask)) {
                        keep |= 1 << b;
                    }
                }
                self.stats.revisions += 1;
                if self.stats.revisions.is_multiple_of(4096)
                    && self.opts.time_budget.is_some_and(|t| self.start.elapsed() >= t)
                {
                    self.timed_out = true;
                    return false;
                }
                if keep != dy {
                    if keep == 0 {
                        return false;
                    }
                    self.stats.prunings += (dy & !keep).count_ones() as u64;
                    self.set(y, keep);
                    self.enqueue(y);
                }
            }
        }
        true
    }

    /// Onto and non-dictatorship. Returns the number of domains narrowed, or
    /// `None` on a contradiction.
    fn propagate_globals(&mut self) -> Option<usize> {
        let mut narrowed = 0;
        if self.model.onto {
            for c in 0..self.model.nvals() {
                let mut holders = (0..self.model.nvars).filter(|&v| self.dom[v] >> c & 1 == 1);
                match (holders.next(), holders.next()) {
                    (None, _) => return None,
                    (Some(v), None) if self.dom[v] != 1 << c => {
                        self.set(v, 1 << c);
                        self.enqueue(v);
                        narrowed += 1;
                    }
                    _ => {}
                }
            }
        }
        if let Some(tops) = &self.model.tops {
            for agent_tops in tops {
                // Only agents who can still be dictators matter.
                if (0..self.model.nvars).any(|v| self.dom[v] >> agent_tops[v] & 1 == 0) {
                    continue;
                }
                let mut open = (0..self.model.nvars).filter(|&v| self.dom[v] != 1 << agent_tops[v]);
                match (open.next(), open.next()) {
                    (None, _) => return None,
                    (Some(v), None) => {
                        let d = self.dom[v] & !(1 << agent_tops[v]);
                        self.set(v, d);
                        self.enqueue(v);
                        narrowed += 1;
                    }
                    _ => {}
                }
            }
        }
        Some(narrowed)
    }

    /// Without propagation: the new assignment must agree with every
    /// assigned neighbor.
    fn check_assigned(&mut self, x: usize) -> bool {
        let mut buf = std::mem::take(&mut self.buf);
        self.model.neighbors(x, &mut buf);
        let a = self.dom[x].trailing_zeros() as usize;
        let ok = buf.iter().all(|&(y, mask)| {
            let dy = self.dom[y];
            dy.count_ones() != 1 || self.model.compatible(x, a, y, dy.trailing_zeros() as usize, mask)
        });
        self.stats.revisions += buf.len() as u64;
        self.buf = buf;
        ok
    }

    /// Without propagation: global constraints are still satisfiable.
    fn globals_feasible(&self) -> bool {
        if self.model.onto {
            let union = self.dom.iter().fold(0u64, |u, &d| u | d);
            if union != full_mask(self.model.nvals()) {
                return false;
            }
        }
        if let Some(tops) = &self.model.tops {
            for agent_tops in tops {
                if (0..self.model.nvars).all(|v| self.dom[v] == 1 << agent_tops[v]) {
                    return false;
                }
            }
        }
        true
    }

    fn leaf_ok(&self) -> bool {
        self.globals_feasible()
    }
}
