//! Exact solution counting by candidate-mask backtracking.
//!
//! A [`ConstraintSystem`] is a set of cells and all-different groups over the
//! values `1..=n²`. Isolated grids have `3n²` groups; coupled layouts carry
//! the rows, columns and blocks of every component over the union of their
//! cells. The search always branches on the empty cell with the fewest
//! candidates and aborts once a node budget is spent, so a count is either
//! exact or absent.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::grid::{apply_partly_filled, CoupledLayout, Grid, GridError, PartlyFilledSpec};

/// Node budget used when none is given.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("node budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("target row {0} is not empty")]
    RowNotEmpty(usize),
    #[error("row index {row} outside 0..{side}")]
    RowOutOfRange { row: usize, side: usize },
    #[error("exhaustive pattern enumeration needs n = 2, got spec {0}")]
    TooLarge(PartlyFilledSpec),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub count: BigUint,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// Cells plus all-different groups over the values `1..=symbols`.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    symbols: usize,
    groups: Vec<Vec<usize>>,
    cell_groups: Vec<Vec<usize>>,
    givens: Vec<Option<u8>>,
    /// Grid coordinates of each cell (global ones for coupled layouts).
    coords: Vec<(usize, usize)>,
}

impl ConstraintSystem {
    fn build(
        symbols: usize,
        coords: Vec<(usize, usize)>,
        givens: Vec<Option<u8>>,
        groups: impl IntoIterator<Item = Vec<usize>>,
    ) -> Self {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for mut g in groups {
            g.sort_unstable();
            if g.len() > 1 && seen.insert(g.clone()) {
                kept.push(g);
            }
        }
        let mut cell_groups = vec![Vec::new(); coords.len()];
        for (gi, g) in kept.iter().enumerate() {
            for &c in g {
                cell_groups[c].push(gi);
            }
        }
        ConstraintSystem {
            symbols,
            groups: kept,
            cell_groups,
            givens,
            coords,
        }
    }

    /// The rows, columns and blocks of one grid, with its filled cells as givens.
    pub fn from_grid(g: &Grid) -> Self {
        let side = g.side();
        let n = g.n();
        let coords = (0..side * side).map(|i| (i / side, i % side)).collect();
        let rows = (0..side).map(|r| (0..side).map(|c| r * side + c).collect());
        let cols = (0..side).map(|c| (0..side).map(|r| r * side + c).collect());
        let blocks = (0..side).map(|b| {
            let (r0, c0) = (b / n * n, b % n * n);
            (0..side)
                .map(|k| (r0 + k / n) * side + c0 + k % n)
                .collect()
        });
        Self::build(
            side,
            coords,
            g.cells().to_vec(),
            rows.chain(cols).chain(blocks).collect::<Vec<_>>(),
        )
    }

    /// Only the cells of `g` selected by `keep`, with every group clipped to them.
    fn clipped(g: &Grid, keep: impl Fn(usize, usize) -> bool) -> Self {
        let full = Self::from_grid(g);
        let mut index = HashMap::new();
        let mut coords = Vec::new();
        let mut givens = Vec::new();
        for (i, &(r, c)) in full.coords.iter().enumerate() {
            if keep(r, c) {
                index.insert(i, coords.len());
                coords.push((r, c));
                givens.push(full.givens[i]);
            }
        }
        let groups: Vec<Vec<usize>> = full
            .groups
            .iter()
            .map(|g| g.iter().filter_map(|c| index.get(c).copied()).collect())
            .collect();
        Self::build(full.symbols, coords, givens, groups)
    }

    /// The union of a layout's cells, constrained by every component's rows,
    /// columns and blocks.
    pub fn from_layout(layout: &CoupledLayout) -> Self {
        let n = layout.n();
        let side = n * n;
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (br, bc) in layout.union_blocks() {
            for k in 0..side {
                index.insert((br * n + k / n, bc * n + k % n), 0);
            }
        }
        let coords: Vec<(usize, usize)> = index.keys().copied().collect();
        for (i, v) in index.values_mut().enumerate() {
            *v = i;
        }
        let mut groups = Vec::new();
        for &(br, bc) in layout.components() {
            let (r0, c0) = (br * n, bc * n);
            for k in 0..side {
                groups.push((0..side).map(|c| index[&(r0 + k, c0 + c)]).collect());
                groups.push((0..side).map(|r| index[&(r0 + r, c0 + k)]).collect());
                let (rb, cb) = (r0 + k / n * n, c0 + k % n * n);
                groups.push(
                    (0..side)
                        .map(|t| index[&(rb + t / n, cb + t % n)])
                        .collect(),
                );
            }
        }
        let givens = vec![None; coords.len()];
        Self::build(side, coords, givens, groups)
    }

    pub fn cell_count(&self) -> usize {
        self.coords.len()
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn coords(&self) -> &[(usize, usize)] {
        &self.coords
    }
}

/// Backtracking counter with a node budget.
#[derive(Clone, Copy, Debug)]
pub struct Counter {
    budget: u64,
    parallel: bool,
}

impl Default for Counter {
    fn default() -> Self {
        Counter {
            budget: DEFAULT_BUDGET,
            parallel: false,
        }
    }
}

impl Counter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Splits the search over the first branching cell's candidates. The
    /// count does not depend on the schedule; `nodes_explored` may.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn count(&self, sys: &ConstraintSystem) -> Result<CountResult, CountError> {
        let start = Instant::now();
        let nodes = AtomicU64::new(0);
        let count = match Search::new(sys, &nodes, self.budget) {
            None => Some(0),
            Some(mut search) if self.parallel => search.count_split(),
            Some(mut search) => search.count(),
        };
        let explored = nodes.load(Ordering::Relaxed);
        match count {
            Some(c) => Ok(CountResult {
                count: BigUint::from(c),
                nodes_explored: explored,
                elapsed: start.elapsed(),
            }),
            None => Err(CountError::BudgetExceeded {
                budget: self.budget,
            }),
        }
    }

    /// Calls `f` with the values of every solution, in search order.
    pub fn for_each_solution(
        &self,
        sys: &ConstraintSystem,
        mut f: impl FnMut(&[u8]),
    ) -> Result<u64, CountError> {
        let nodes = AtomicU64::new(0);
        let Some(mut search) = Search::new(sys, &nodes, self.budget) else {
            return Ok(0);
        };
        search.visit(&mut f).ok_or(CountError::BudgetExceeded {
            budget: self.budget,
        })
    }
}

struct Search<'a> {
    sys: &'a ConstraintSystem,
    used: Vec<u64>,
    values: Vec<u8>,
    full: u64,
    nodes: &'a AtomicU64,
    budget: u64,
}

impl<'a> Search<'a> {
    /// `None` when the givens already clash.
    fn new(sys: &'a ConstraintSystem, nodes: &'a AtomicU64, budget: u64) -> Option<Self> {
        let mut used = vec![0u64; sys.groups.len()];
        let mut values = vec![0u8; sys.cell_count()];
        for (cell, given) in sys.givens.iter().enumerate() {
            let Some(v) = *given else { continue };
            let bit = 1u64 << (v - 1);
            for &g in &sys.cell_groups[cell] {
                if used[g] & bit != 0 {
                    return None;
                }
                used[g] |= bit;
            }
            values[cell] = v;
        }
        let full = if sys.symbols == 64 {
            u64::MAX
        } else {
            (1u64 << sys.symbols) - 1
        };
        Some(Search {
            sys,
            used,
            values,
            full,
            nodes,
            budget,
        })
    }

    fn candidates(&self, cell: usize) -> u64 {
        self.sys.cell_groups[cell]
            .iter()
            .fold(self.full, |m, &g| m & !self.used[g])
    }

    /// Most constrained empty cell: `Ok(None)` when none is left,
    /// `Err(())` when some empty cell has no candidate.
    fn pick(&self) -> Result<Option<(usize, u64)>, ()> {
        let mut best: Option<(usize, u64)> = None;
        for cell in 0..self.values.len() {
            if self.values[cell] != 0 {
                continue;
            }
            let cand = self.candidates(cell);
            let k = cand.count_ones();
            if k == 0 {
                return Err(());
            }
            if best.is_none_or(|(_, b)| k < b.count_ones()) {
                best = Some((cell, cand));
                if k == 1 {
                    break;
                }
            }
        }
        Ok(best)
    }

    fn place(&mut self, cell: usize, bit: u64) {
        for &g in &self.sys.cell_groups[cell] {
            self.used[g] |= bit;
        }
        self.values[cell] = bit.trailing_zeros() as u8 + 1;
    }

    fn unplace(&mut self, cell: usize, bit: u64) {
        for &g in &self.sys.cell_groups[cell] {
            self.used[g] &= !bit;
        }
        self.values[cell] = 0;
    }

    fn tick(&self) -> bool {
        self.nodes.fetch_add(1, Ordering::Relaxed) < self.budget
    }

    fn count(&mut self) -> Option<u64> {
        if !self.tick() {
            return None;
        }
        let (cell, mut cand) = match self.pick() {
            Err(()) => return Some(0),
            Ok(None) => return Some(1),
            Ok(Some(choice)) => choice,
        };
        let mut total = 0;
        while cand != 0 {
            let bit = cand & cand.wrapping_neg();
            cand &= cand - 1;
            self.place(cell, bit);
            let sub = self.count();
            self.unplace(cell, bit);
            total += sub?;
        }
        Some(total)
    }

    fn count_split(&mut self) -> Option<u64> {
        if !self.tick() {
            return None;
        }
        let (cell, cand) = match self.pick() {
            Err(()) => return Some(0),
            Ok(None) => return Some(1),
            Ok(Some(choice)) => choice,
        };
        let bits: Vec<u64> = (0..64)
            .map(|b| 1u64 << b)
            .filter(|b| cand & b != 0)
            .collect();
        let partial: Option<Vec<u64>> = bits
            .par_iter()
            .map(|&bit| {
                let mut branch = Search {
                    sys: self.sys,
                    used: self.used.clone(),
                    values: self.values.clone(),
                    full: self.full,
                    nodes: self.nodes,
                    budget: self.budget,
                };
                branch.place(cell, bit);
                branch.count()
            })
            .collect();
        partial.map(|v| v.into_iter().sum())
    }

    fn visit(&mut self, f: &mut impl FnMut(&[u8])) -> Option<u64> {
        if !self.tick() {
            return None;
        }
        let (cell, mut cand) = match self.pick() {
            Err(()) => return Some(0),
            Ok(None) => {
                f(&self.values);
                return Some(1);
            }
            Ok(Some(choice)) => choice,
        };
        let mut total = 0;
        while cand != 0 {
            let bit = cand & cand.wrapping_neg();
            cand &= cand - 1;
            self.place(cell, bit);
            let sub = self.visit(f);
            self.unplace(cell, bit);
            total += sub?;
        }
        Some(total)
    }
}

/// Number of completions of `g`. An inconsistent grid has none.
pub fn count_solutions(g: &Grid) -> Result<CountResult, CountError> {
    Counter::new().count(&ConstraintSystem::from_grid(g))
}

/// Joint assignments to a layout's cells in which every component is a
/// valid Sudoku.
pub fn count_coupled(layout: &CoupledLayout) -> Result<CountResult, CountError> {
    Counter::new().count(&ConstraintSystem::from_layout(layout))
}

/// Ways to fill the empty row `row` without clashing with any filled cell,
/// enumerated cell by cell.
pub fn count_row_completions(g: &Grid, row: usize) -> Result<BigUint, CountError> {
    let side = g.side();
    if row >= side {
        return Err(CountError::RowOutOfRange { row, side });
    }
    if !g.row_is_empty(row) {
        return Err(CountError::RowNotEmpty(row));
    }
    let n = g.n();
    let blocked: Vec<u64> = (0..side)
        .map(|col| {
            let (br, bc) = (row / n * n, col / n * n);
            (0..side)
                .filter_map(|r| g.get(r, col))
                .chain((br..br + n).flat_map(|r| (bc..bc + n).filter_map(move |c| g.get(r, c))))
                .fold(0u64, |m, v| m | 1 << (v - 1))
        })
        .collect();
    fn fill(blocked: &[u64], col: usize, row_used: u64, side: usize) -> u64 {
        if col == blocked.len() {
            return 1;
        }
        (0..side)
            .filter(|v| (blocked[col] | row_used) >> v & 1 == 0)
            .map(|v| fill(blocked, col + 1, row_used | 1 << v, side))
            .sum()
    }
    Ok(BigUint::from(fill(&blocked, 0, 0, side)))
}

/// Every consistent way to fill the spec's top-left rectangle.
pub fn enumerate_fillings(
    spec: &PartlyFilledSpec,
    counter: &Counter,
) -> Result<Vec<Grid>, CountError> {
    let empty = Grid::empty(spec.n())?;
    let sys = ConstraintSystem::clipped(&empty, |r, c| spec.contains_cell(r, c));
    let mut out = Vec::new();
    counter.for_each_solution(&sys, |values| {
        let mut g = empty.clone();
        for (&(r, c), &v) in sys.coords().iter().zip(values) {
            g.set(r, c, Some(v)).expect("value within range");
        }
        out.push(g);
    })?;
    Ok(out)
}

/// Solution counts of an `(n; c1, c2)` partly filled Sudoku across filling patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartlyFilledCounts {
    pub spec: PartlyFilledSpec,
    pub patterns: usize,
    pub min: BigUint,
    pub max: BigUint,
    /// Count value → number of patterns producing it.
    pub histogram: BTreeMap<BigUint, usize>,
}

/// Counts over the given fillings of the spec's rectangle.
pub fn count_partly_filled_sample(
    spec: &PartlyFilledSpec,
    fillings: &[Grid],
    counter: &Counter,
) -> Result<PartlyFilledCounts, CountError> {
    let mut histogram = BTreeMap::new();
    for filling in fillings {
        let grid = apply_partly_filled(spec, filling)?;
        let c = counter.count(&ConstraintSystem::from_grid(&grid))?.count;
        *histogram.entry(c).or_insert(0) += 1;
    }
    let min = histogram.keys().next().cloned().unwrap_or_default();
    let max = histogram.keys().next_back().cloned().unwrap_or_default();
    Ok(PartlyFilledCounts {
        spec: *spec,
        patterns: fillings.len(),
        min,
        max,
        histogram,
    })
}

/// Counts over every consistent filling of the rectangle; `n = 2` only.
pub fn count_partly_filled(spec: &PartlyFilledSpec) -> Result<PartlyFilledCounts, CountError> {
    if spec.n() != 2 {
        return Err(CountError::TooLarge(*spec));
    }
    let counter = Counter::new();
    let fillings = enumerate_fillings(spec, &counter)?;
    count_partly_filled_sample(spec, &fillings, &counter)
}
