//! Decomposition of coupled Sudokus into partly filled ones.
//!
//! Components are processed in some order. When component `k` comes up,
//! every block it shares with an earlier component is treated as already
//! filled; if those blocks form a rectangle `U × V` (any choice of block rows
//! `U` and block columns `V`) the component contributes the partly filled
//! bound for `(n; |U|, |V|)`. The product over components bounds the
//! solution count of the whole layout.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::bounds::{herzberg_bound, partly_filled_bound, LogBound};
use crate::grid::{
    layout::block_rectangle, make_layout, total_cells, CoupledLayout, LayoutError, LayoutKind,
    PartlyFilledSpec,
};

/// Largest component count searched exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// Known exact counts of the empty `n × n` Sudoku. `S(3)` is the published
/// enumeration result and is not re-derived here.
pub fn exact_sudoku_count(n: usize) -> Option<BigUint> {
    match n {
        1 => Some(BigUint::from(1u32)),
        2 => Some(BigUint::from(288u32)),
        3 => Some(BigUint::from(6_670_903_752_021_072_936_960u128)),
        _ => None,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("order must be a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("component {component} meets earlier components in a non-rectangular set of blocks")]
    NonRectangular { component: usize },
    #[error("no exact count stored for n = {0}")]
    NoExactCount(usize),
    #[error("{count} components exceed the exhaustive search limit of {limit}")]
    TooManyComponents { count: usize, limit: usize },
    #[error("no processing order yields rectangular overlaps")]
    NoValidOrder,
    #[error("coding rate needs n >= 2 and a positive cell count")]
    InvalidRate,
}

/// One component of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentStep {
    pub component: usize,
    /// Blocks treated as filled, as a mask over the component's local blocks.
    pub overlap: u64,
    /// Row-band extent of the overlap in `c1`, column-band extent in `c2`,
    /// swapped when `transposed`.
    pub spec: PartlyFilledSpec,
    pub transposed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    n: usize,
    cells: usize,
    steps: Vec<ComponentStep>,
}

impl Decomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distinct cells in the layout.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn steps(&self) -> &[ComponentStep] {
        &self.steps
    }

    pub fn order(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.component).collect()
    }

    pub fn specs(&self) -> Vec<PartlyFilledSpec> {
        self.steps.iter().map(|s| s.spec).collect()
    }
}

/// Overlap of component `k` with the processed set, as (mask, c1, c2).
fn step_overlap(layout: &CoupledLayout, k: usize, done: &[usize]) -> (u64, Option<(usize, usize)>) {
    let mask = done.iter().fold(0, |m, &j| m | layout.overlap_mask(k, j));
    (mask, block_rectangle(mask, layout.n()))
}

/// Decomposes `layout` processing components in `order`, labelling each
/// overlap with its row-band extent first.
pub fn decompose(layout: &CoupledLayout, order: &[usize]) -> Result<Decomposition, CouplingError> {
    let m = layout.len();
    let mut seen = vec![false; m];
    if order.len() != m
        || order
            .iter()
            .any(|&k| k >= m || std::mem::replace(&mut seen[k], true))
    {
        return Err(CouplingError::NotAPermutation(m));
    }
    let n = layout.n();
    let mut steps = Vec::with_capacity(m);
    for (pos, &k) in order.iter().enumerate() {
        let (mask, rect) = step_overlap(layout, k, &order[..pos]);
        let (c1, c2) = rect.ok_or(CouplingError::NonRectangular { component: k })?;
        steps.push(ComponentStep {
            component: k,
            overlap: mask,
            spec: PartlyFilledSpec::new(n, c1, c2).expect("extents within n"),
            transposed: false,
        });
    }
    Ok(Decomposition {
        n,
        cells: total_cells(layout),
        steps,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentBound {
    pub component: usize,
    pub spec: PartlyFilledSpec,
    pub bound: LogBound,
    /// The factor is the exact count `S(n)` rather than a bound.
    pub exact_count: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositeBound {
    pub ln_value: f64,
    pub bound: LogBound,
    pub per_component: Vec<ComponentBound>,
    pub cells: usize,
    pub rate_upper: f64,
}

impl CompositeBound {
    pub fn log10(&self) -> f64 {
        self.ln_value / std::f64::consts::LN_10
    }
}

fn component_factor(
    spec: &PartlyFilledSpec,
    exact_free: bool,
) -> Result<(LogBound, bool), CouplingError> {
    if spec.is_empty() {
        if exact_free {
            let exact =
                exact_sudoku_count(spec.n()).ok_or(CouplingError::NoExactCount(spec.n()))?;
            return Ok((LogBound::from_integer(exact), true));
        }
        let b = herzberg_bound(spec.n()).expect("layout order within bound range");
        return Ok((b, false));
    }
    Ok((partly_filled_bound(spec), false))
}

/// The product of per-component factors. Components with nothing pre-filled
/// use the exact `S(n)` when `exact_free` is set, the bound `S_U(n)` otherwise.
pub fn composite_bound(
    d: &Decomposition,
    exact_free: bool,
) -> Result<CompositeBound, CouplingError> {
    let mut per_component = Vec::with_capacity(d.steps.len());
    for step in &d.steps {
        let (bound, exact_count) = component_factor(&step.spec, exact_free)?;
        per_component.push(ComponentBound {
            component: step.component,
            spec: step.spec,
            bound,
            exact_count,
        });
    }
    let bound: LogBound = per_component.iter().map(|c| c.bound.clone()).product();
    let ln_value = bound.ln();
    Ok(CompositeBound {
        ln_value,
        bound,
        per_component,
        cells: d.cells,
        rate_upper: coding_rate(ln_value, d.n, d.cells)?,
    })
}

/// Memoized `ln` of the smallest factor for an overlap of extent `(c1, c2)`.
struct CostTable {
    n: usize,
    exact_free: bool,
    cache: HashMap<(usize, usize), (f64, bool)>,
}

impl CostTable {
    fn cost(&mut self, c1: usize, c2: usize) -> Result<(f64, bool), CouplingError> {
        if let Some(&hit) = self.cache.get(&(c1, c2)) {
            return Ok(hit);
        }
        let spec = PartlyFilledSpec::new(self.n, c1, c2).expect("extents within n");
        let direct = component_factor(&spec, self.exact_free)?.0.ln();
        let flipped = component_factor(&spec.transposed(), self.exact_free)?
            .0
            .ln();
        let best = if flipped < direct {
            (flipped, true)
        } else {
            (direct, false)
        };
        self.cache.insert((c1, c2), best);
        Ok(best)
    }
}

fn oriented_step(
    n: usize,
    k: usize,
    mask: u64,
    c1: usize,
    c2: usize,
    transposed: bool,
) -> ComponentStep {
    let (a, b) = if transposed { (c2, c1) } else { (c1, c2) };
    ComponentStep {
        component: k,
        overlap: mask,
        spec: PartlyFilledSpec::new(n, a, b).expect("extents within n"),
        transposed,
    }
}

/// The decomposition with the smallest composite bound over all processing
/// orders and both labellings of every non-square overlap.
///
/// The factor for a component depends only on which components precede it,
/// so the search runs over subsets of processed components rather than over
/// orders. Among equal minima the lexicographically first order wins.
pub fn best_decomposition(
    layout: &CoupledLayout,
    exact_free: bool,
) -> Result<Decomposition, CouplingError> {
    let m = layout.len();
    if m > EXHAUSTIVE_LIMIT {
        return Err(CouplingError::TooManyComponents {
            count: m,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let n = layout.n();
    let mut costs = CostTable {
        n,
        exact_free,
        cache: HashMap::new(),
    };
    let pair: Vec<Vec<u64>> = (0..m)
        .map(|k| {
            (0..m)
                .map(|j| if j == k { 0 } else { layout.overlap_mask(k, j) })
                .collect()
        })
        .collect();
    let overlap = |k: usize, set: usize| {
        (0..m)
            .filter(|j| set >> j & 1 == 1)
            .fold(0u64, |acc, j| acc | pair[k][j])
    };
    let full = (1usize << m) - 1;
    // rest[s]: least ln-cost of processing everything outside s, given s is done.
    let mut rest = vec![f64::INFINITY; full + 1];
    rest[full] = 0.0;
    for set in (0..full).rev() {
        for k in (0..m).filter(|k| set >> k & 1 == 0) {
            let after = rest[set | 1 << k];
            if after.is_infinite() {
                continue;
            }
            if let Some((c1, c2)) = block_rectangle(overlap(k, set), n) {
                let total = costs.cost(c1, c2)?.0 + after;
                if total < rest[set] {
                    rest[set] = total;
                }
            }
        }
    }
    if rest[0].is_infinite() {
        return Err(CouplingError::NoValidOrder);
    }
    let mut steps = Vec::with_capacity(m);
    let mut set = 0usize;
    while set != full {
        let target = rest[set];
        let tol = 1e-9 * target.abs().max(1.0);
        let mut chosen = None;
        for k in (0..m).filter(|k| set >> k & 1 == 0) {
            let mask = overlap(k, set);
            let Some((c1, c2)) = block_rectangle(mask, n) else {
                continue;
            };
            let (c, transposed) = costs.cost(c1, c2)?;
            if c + rest[set | 1 << k] <= target + tol {
                chosen = Some(oriented_step(n, k, mask, c1, c2, transposed));
                break;
            }
        }
        let step = chosen.expect("an optimal continuation exists");
        set |= 1 << step.component;
        steps.push(step);
    }
    Ok(Decomposition {
        n,
        cells: total_cells(layout),
        steps,
    })
}

/// Repeatedly takes the component sharing the most blocks with those already
/// processed. Not optimal in general; usable beyond the exhaustive limit.
pub fn greedy_decomposition(
    layout: &CoupledLayout,
    exact_free: bool,
) -> Result<Decomposition, CouplingError> {
    let m = layout.len();
    let n = layout.n();
    let mut costs = CostTable {
        n,
        exact_free,
        cache: HashMap::new(),
    };
    let mut done: Vec<usize> = Vec::with_capacity(m);
    let mut steps = Vec::with_capacity(m);
    while done.len() < m {
        let mut best: Option<(u32, ComponentStep)> = None;
        for k in (0..m).filter(|k| !done.contains(k)) {
            let (mask, rect) = step_overlap(layout, k, &done);
            let Some((c1, c2)) = rect else { continue };
            let shared = mask.count_ones();
            if best.as_ref().is_none_or(|(b, _)| shared > *b) {
                let transposed = costs.cost(c1, c2)?.1;
                best = Some((shared, oriented_step(n, k, mask, c1, c2, transposed)));
            }
        }
        let (_, step) = best.ok_or(CouplingError::NoValidOrder)?;
        done.push(step.component);
        steps.push(step);
    }
    Ok(Decomposition {
        n,
        cells: total_cells(layout),
        steps,
    })
}

/// `R = log_{n²} S / C` from `ln S`.
pub fn coding_rate(ln_count: f64, n: usize, cells: usize) -> Result<f64, CouplingError> {
    if n < 2 || cells == 0 {
        return Err(CouplingError::InvalidRate);
    }
    Ok(ln_count / ((n * n) as f64).ln() / cells as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    Stair,
    Belt,
}

impl ChainKind {
    fn layout(self, stages: usize) -> LayoutKind {
        match self {
            ChainKind::Stair => LayoutKind::Stair(stages),
            ChainKind::Belt => LayoutKind::Belt(stages),
        }
    }
}

/// Per-stage growth of a chain: `(ln` factor added, cells added`)`.
pub fn stage_increment(kind: ChainKind) -> Result<(f64, usize), CouplingError> {
    let one = make_layout(kind.layout(1))?;
    let two = make_layout(kind.layout(2))?;
    let b1 = composite_bound(&decompose(&one, &[0])?, true)?;
    let b2 = composite_bound(&decompose(&two, &[0, 1])?, true)?;
    Ok((b2.ln_value - b1.ln_value, b2.cells - b1.cells))
}

/// Rate upper bound of an infinitely long chain: added `log₉` per added cell.
pub fn rate_limit(kind: ChainKind) -> Result<f64, CouplingError> {
    let (ln_step, cells_step) = stage_increment(kind)?;
    coding_rate(ln_step, 3, cells_step)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog(kind: LayoutKind) -> CoupledLayout {
        make_layout(kind).unwrap()
    }

    fn natural(layout: &CoupledLayout) -> Decomposition {
        decompose(layout, &(0..layout.len()).collect::<Vec<_>>()).unwrap()
    }

    fn s(n: usize, c1: usize, c2: usize) -> PartlyFilledSpec {
        PartlyFilledSpec::new(n, c1, c2).unwrap()
    }

    #[test]
    fn natural_orders_match_catalog_reductions() {
        let stair = natural(&catalog(LayoutKind::Stair(2)));
        assert_eq!(stair.specs(), vec![s(3, 0, 0), s(3, 2, 2)]);
        let belt = natural(&catalog(LayoutKind::Belt(3)));
        assert_eq!(belt.specs(), vec![s(3, 0, 0), s(3, 1, 3), s(3, 1, 3)]);
        let shogun = natural(&catalog(LayoutKind::Shogun)).specs();
        assert_eq!(shogun.iter().filter(|&&x| x == s(3, 0, 0)).count(), 8);
        assert_eq!(shogun.iter().filter(|&&x| x == s(3, 2, 2)).count(), 3);
        let sumo = natural(&catalog(LayoutKind::Sumo)).specs();
        assert_eq!(sumo.iter().filter(|&&x| x == s(3, 0, 0)).count(), 9);
        assert_eq!(sumo.iter().filter(|&&x| x == s(3, 2, 2)).count(), 4);
    }

    #[test]
    fn decompose_rejects_bad_orders() {
        let belt = catalog(LayoutKind::Belt(3));
        assert_eq!(
            decompose(&belt, &[0, 1]),
            Err(CouplingError::NotAPermutation(3))
        );
        assert_eq!(
            decompose(&belt, &[0, 0, 1]),
            Err(CouplingError::NotAPermutation(3))
        );
        // An L-shaped overlap: a grid meeting one neighbour on its top band and
        // another on its left band.
        let l = CoupledLayout::new(3, vec![(0, 2), (2, 0), (2, 2)]).unwrap();
        assert_eq!(
            decompose(&l, &[0, 1, 2]),
            Err(CouplingError::NonRectangular { component: 2 })
        );
        assert!(decompose(&l, &[2, 0, 1]).is_ok());
    }

    #[test]
    fn bookkeeping_covers_every_cell() {
        let mut kinds = vec![LayoutKind::Shogun, LayoutKind::Sumo];
        kinds.extend((1..=6).flat_map(|l| [LayoutKind::Stair(l), LayoutKind::Belt(l)]));
        for kind in kinds {
            let l = catalog(kind);
            let d = natural(&l);
            let cells: usize = d.steps().iter().map(|st| (9 - st.spec.area()) * 9).sum();
            assert_eq!(cells, total_cells(&l), "{kind}");
        }
    }

    #[test]
    fn exact_flag_requires_known_count() {
        let l = CoupledLayout::new(4, vec![(0, 0), (2, 0)]).unwrap();
        let d = natural(&l);
        assert_eq!(
            composite_bound(&d, true),
            Err(CouplingError::NoExactCount(4))
        );
        assert!(composite_bound(&d, false).is_ok());
    }

    #[test]
    fn best_prefers_row_band_orientation_for_belt() {
        let belt = catalog(LayoutKind::Belt(2));
        let d = best_decomposition(&belt, true).unwrap();
        assert_eq!(d.specs(), vec![s(3, 0, 0), s(3, 1, 3)]);
        // Rotating the belt sideways makes the natural label (3,3,1); the
        // search flips it back.
        let side = CoupledLayout::new(3, vec![(0, 0), (0, 2)]).unwrap();
        assert_eq!(natural(&side).specs()[1], s(3, 3, 1));
        let d = best_decomposition(&side, true).unwrap();
        assert_eq!(d.specs()[1], s(3, 1, 3));
        assert!(d.steps()[1].transposed);
    }

    #[test]
    fn best_single_component() {
        let one = catalog(LayoutKind::Stair(1));
        let d = best_decomposition(&one, false).unwrap();
        assert_eq!(d.specs(), vec![s(3, 0, 0)]);
        let b = composite_bound(&d, false).unwrap();
        assert_eq!(b.ln_value, herzberg_bound(3).unwrap().ln());
    }

    #[test]
    fn greedy_on_catalog() {
        let d = greedy_decomposition(&catalog(LayoutKind::Stair(4)), true).unwrap();
        assert_eq!(d.order(), vec![0, 1, 2, 3]);
        assert!(greedy_decomposition(&catalog(LayoutKind::Sumo), true).is_ok());
    }

    #[test]
    fn too_many_components() {
        let l = catalog(LayoutKind::Belt(EXHAUSTIVE_LIMIT + 1));
        assert!(matches!(
            best_decomposition(&l, true),
            Err(CouplingError::TooManyComponents { .. })
        ));
    }

    #[test]
    fn rates() {
        assert!((coding_rate(288f64.ln(), 2, 16).unwrap() - 0.2553).abs() < 1e-4);
        assert_eq!(coding_rate(1.0, 1, 1), Err(CouplingError::InvalidRate));
        assert_eq!(coding_rate(1.0, 3, 0), Err(CouplingError::InvalidRate));
        let (_, cells) = stage_increment(ChainKind::Stair).unwrap();
        assert_eq!(cells, 45);
        let (_, cells) = stage_increment(ChainKind::Belt).unwrap();
        assert_eq!(cells, 54);
    }
}
