//! Fixtures shared by the benchmarks.

use sudoku_bounds::{BinaryMatrix, Grid};

/// Three zero blocks of size `k` on the diagonal of a `3k × 3k` matrix, ones elsewhere.
pub fn diagonal_block_matrix(k: usize) -> BinaryMatrix {
    let m = 3 * k;
    let rows: Vec<Vec<bool>> = (0..m)
        .map(|i| (0..m).map(|j| i / k != j / k).collect())
        .collect();
    BinaryMatrix::from_rows(&rows).expect("size within limits")
}

/// An `n = 3` grid with its first row filled `1..=9`.
pub fn first_row_grid() -> Grid {
    let mut g = Grid::empty(3).expect("order 3");
    for c in 0..9 {
        g.set(0, c, Some(c as u8 + 1)).expect("value in range");
    }
    g
}
