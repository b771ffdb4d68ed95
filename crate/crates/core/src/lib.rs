//! Solution counts and upper bounds for isolated, partly filled and
//! spatially coupled Sudokus.
//!
//! - [`grid`]: grids, partly filled patterns, coupled layouts and their text formats.
//! - [`permanent`]: exact permanents, the Bregman–Minc bound, admissibility matrices.
//! - [`bounds`]: closed-form bounds `S_U(n)` and `S_U(n; c1, c2)` in log domain.
//! - [`coupling`]: decompositions of coupled layouts, composite bounds, coding rates.
//! - [`counting`]: exact backtracking counts used to check the bounds.
//! - [`report`]: the regression table of published values.

#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod counting;
pub mod coupling;
mod factorial;
pub mod grid;
pub mod permanent;
pub mod report;

pub use bounds::{
    asymptotic_exponents, herzberg_bound, mu, nu, partly_filled_bound, spec_from_fractions,
    AsymptoticExponents, BoundError, LogBound,
};
pub use counting::{
    count_coupled, count_partly_filled, count_row_completions, count_solutions, ConstraintSystem,
    CountError, CountResult, Counter,
};
pub use coupling::{
    best_decomposition, coding_rate, composite_bound, decompose, exact_sudoku_count, rate_limit,
    stage_increment, ChainKind, CompositeBound, CouplingError, Decomposition,
};
pub use factorial::ln_factorial;
pub use grid::{
    make_layout, total_cells, Band, CoupledLayout, Grid, GridError, LayoutKind, PartlyFilledSpec,
};
pub use permanent::{
    admissibility_matrix, bregman_minc_bound, permanent_naive, permanent_ryser, BinaryMatrix,
    PermanentError,
};
pub use report::{run_paper_report, ReportRow, Selection, Tolerance};
