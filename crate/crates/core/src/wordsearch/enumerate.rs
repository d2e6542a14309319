use std::collections::HashSet;

use rayon::prelude::*;
use rayon::ThreadPool;

use super::{MatrixSet, ProductNode, Word};
use crate::error::{GptError, Result};
use crate::linalg::Matrix;
use crate::verdict::BudgetReport;

/// How repeated products are pruned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dedup {
    /// Keep every word.
    None,
    /// One node per distinct matrix; the earliest word in
    /// length-then-lexicographic order survives.
    #[default]
    Exact,
    /// One node per distinct (matrix, length). Keeps every length class
    /// populated, which norm certificates over fixed lengths need.
    PerLength,
    /// One node per distinct (matrix, min(length, cap)): lengths below
    /// `cap` stay distinguishable, longer ones merge.
    LengthCapped(usize),
}

/// Search budgets. Both limits are mandatory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub max_len: usize,
    /// Cap on emitted nodes, the empty word included.
    pub max_nodes: usize,
    /// Worker threads; 0 uses the global rayon pool.
    pub threads: usize,
    pub dedup: Dedup,
}

impl EnumerateOptions {
    pub fn new(max_len: usize, max_nodes: usize) -> Self {
        EnumerateOptions {
            max_len,
            max_nodes,
            threads: 1,
            dedup: Dedup::Exact,
        }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn dedup(mut self, dedup: Dedup) -> Self {
        self.dedup = dedup;
        self
    }
}

/// Frontier nodes processed per parallel batch. Fixed so that truncation
/// under a node budget does not depend on the thread count.
const BATCH: usize = 1024;

/// Breadth-first product enumeration, one length level per iteration.
///
/// Children are multiplied in parallel and merged sequentially in
/// frontier order, so the output is the same for every thread count.
pub struct Enumerator<'a> {
    ms: &'a MatrixSet,
    opts: EnumerateOptions,
    pool: Option<ThreadPool>,
    frontier: Vec<ProductNode>,
    seen: HashSet<(Matrix, usize)>,
    next_len: usize,
    emitted: usize,
    complete_length: Option<usize>,
    exhausted: bool,
    closed: bool,
}

impl<'a> Enumerator<'a> {
    pub fn new(ms: &'a MatrixSet, opts: EnumerateOptions) -> Result<Self> {
        let pool = if opts.threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(opts.threads)
                    .build()
                    .map_err(|e| GptError::InvalidParameter(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Enumerator {
            ms,
            opts,
            pool,
            frontier: Vec::new(),
            seen: HashSet::new(),
            next_len: 0,
            emitted: 0,
            complete_length: None,
            exhausted: false,
            closed: false,
        })
    }

    pub fn nodes_explored(&self) -> usize {
        self.emitted
    }

    /// Whether the whole word tree up to `max_len` has been covered, either
    /// level by level or because every longer product repeats a shorter one.
    pub fn is_complete(&self) -> bool {
        !self.exhausted && (self.closed || self.complete_length == Some(self.opts.max_len))
    }

    pub fn report(&self) -> BudgetReport {
        let note = if self.exhausted {
            format!("node budget of {} reached", self.opts.max_nodes)
        } else if self.closed {
            "closure reached: every longer product repeats a shorter one".to_string()
        } else if self.complete_length == Some(self.opts.max_len) {
            format!("all words up to length {} explored", self.opts.max_len)
        } else {
            "enumeration stopped early".to_string()
        };
        BudgetReport {
            max_len: self.opts.max_len,
            max_nodes: self.opts.max_nodes,
            nodes_explored: self.emitted,
            complete_length: self.complete_length,
            node_budget_exhausted: self.exhausted,
            note,
        }
    }

    fn key(&self, node: &ProductNode) -> Option<(Matrix, usize)> {
        match self.opts.dedup {
            Dedup::None => None,
            Dedup::Exact => Some((node.matrix.clone(), 0)),
            Dedup::PerLength => Some((node.matrix.clone(), node.word.len())),
            Dedup::LengthCapped(cap) => Some((node.matrix.clone(), node.word.len().min(cap))),
        }
    }

    /// Keep `node` unless an equivalent one was seen.
    fn admit(&mut self, node: &ProductNode) -> bool {
        match self.key(node) {
            Some(key) => self.seen.insert(key),
            None => true,
        }
    }

    fn children(&self, batch: &[ProductNode]) -> Vec<ProductNode> {
        let ms = self.ms;
        let expand = |node: &ProductNode| -> Vec<ProductNode> {
            (1..=ms.len())
                .map(|label| {
                    let m = ms.matrices()[label - 1]
                        .mul(&node.matrix)
                        .expect("dimensions validated by MatrixSet");
                    ProductNode::new(node.word.pushed(label), m)
                })
                .collect()
        };
        match &self.pool {
            Some(pool) => pool.install(|| batch.par_iter().flat_map_iter(expand).collect()),
            None => batch.iter().flat_map(expand).collect(),
        }
    }

    fn finished(&self) -> bool {
        self.exhausted || self.closed || self.next_len > self.opts.max_len
    }
}

impl Iterator for Enumerator<'_> {
    type Item = Vec<ProductNode>;

    fn next(&mut self) -> Option<Vec<ProductNode>> {
        if self.finished() {
            return None;
        }
        if self.emitted >= self.opts.max_nodes {
            self.exhausted = true;
            return None;
        }
        let len = self.next_len;
        let mut level = Vec::new();
        if len == 0 {
            let root = ProductNode::new(Word::empty(), Matrix::identity(self.ms.dim()));
            self.admit(&root);
            level.push(root);
            self.emitted += 1;
        } else {
            let frontier = std::mem::take(&mut self.frontier);
            'batches: for batch in frontier.chunks(BATCH) {
                for child in self.children(batch) {
                    if self.emitted >= self.opts.max_nodes {
                        self.exhausted = true;
                        break 'batches;
                    }
                    if self.admit(&child) {
                        self.emitted += 1;
                        level.push(child);
                    }
                }
            }
        }
        if !self.exhausted {
            self.complete_length = Some(len);
            if level.is_empty() {
                self.closed = true;
            }
        }
        self.next_len += 1;
        if self.next_len <= self.opts.max_len && !self.exhausted {
            self.frontier = level.clone();
        }
        if level.is_empty() {
            None
        } else {
            Some(level)
        }
    }
}

/// Every retained node up to the budget, in output order.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub nodes: Vec<ProductNode>,
    pub report: BudgetReport,
}

pub fn enumerate(ms: &MatrixSet, opts: EnumerateOptions) -> Result<Enumeration> {
    let mut e = Enumerator::new(ms, opts)?;
    let nodes: Vec<ProductNode> = e.by_ref().flatten().collect();
    Ok(Enumeration {
        nodes,
        report: e.report(),
    })
}
