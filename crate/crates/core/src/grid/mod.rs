//! Sudoku grids, bands, partly filled patterns and coupled layouts.
//!
//! A grid of block order `n` has `n²` rows and columns of cells, each empty
//! or holding a value in `1..=n²`. Rows and columns are 0-based in code;
//! bands are numbered `1..=n` as in the usual notation.

pub(crate) mod layout;

pub use layout::{make_layout, total_cells, CoupledLayout, LayoutError, LayoutKind};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest block order a [`Grid`] can hold: values must fit a 64-bit mask.
pub const MAX_GRID_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("block order {n} outside 1..={max}")]
    InvalidOrder { n: usize, max: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("expected {expected} cells, found {found}")]
    CellCount { expected: usize, found: usize },
    #[error("value {value} outside 1..={max}")]
    ValueOutOfRange { value: usize, max: usize },
    #[error("band index {index} outside 1..={n}")]
    BandOutOfRange { index: usize, n: usize },
    #[error("cannot swap a row band with a column band")]
    MixedBands,
    #[error("partly filled spec ({n};{c1},{c2}) needs c1, c2 <= n")]
    InvalidSpec { n: usize, c1: usize, c2: usize },
    #[error("filling has a value at ({row}, {col}) outside the filled rectangle")]
    OutsideRectangle { row: usize, col: usize },
    #[error("cell ({row}, {col}) of the filled rectangle is empty")]
    IncompleteRectangle { row: usize, col: usize },
    #[error("block order mismatch: spec has n={spec}, grid has n={grid}")]
    OrderMismatch { spec: usize, grid: usize },
    #[error("grid violates a row, column or block constraint")]
    Inconsistent,
}

/// A partially filled Sudoku of block order `n`.
///
/// A grid is raw data and may violate the Sudoku constraints; see
/// [`Grid::is_consistent`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
    cells: Vec<Option<u8>>,
}

impl Grid {
    pub fn empty(n: usize) -> Result<Self, GridError> {
        check_order(n)?;
        Ok(Grid {
            n,
            cells: vec![None; n.pow(4)],
        })
    }

    /// Builds a grid from `n⁴` cells in row-major order.
    pub fn from_cells(n: usize, cells: Vec<Option<u8>>) -> Result<Self, GridError> {
        check_order(n)?;
        if cells.len() != n.pow(4) {
            return Err(GridError::CellCount {
                expected: n.pow(4),
                found: cells.len(),
            });
        }
        let max = n * n;
        if let Some(v) = cells
            .iter()
            .flatten()
            .find(|&&v| v == 0 || v as usize > max)
        {
            return Err(GridError::ValueOutOfRange {
                value: *v as usize,
                max,
            });
        }
        Ok(Grid { n, cells })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows (and columns, and symbols): `n²`.
    pub fn side(&self) -> usize {
        self.n * self.n
    }

    pub fn cells(&self) -> &[Option<u8>] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u8> {
        self.cells[row * self.side() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Option<u8>) -> Result<(), GridError> {
        if let Some(v) = value {
            if v == 0 || v as usize > self.side() {
                return Err(GridError::ValueOutOfRange {
                    value: v as usize,
                    max: self.side(),
                });
            }
        }
        let side = self.side();
        self.cells[row * side + col] = value;
        Ok(())
    }

    /// Block index (row-major over the `n × n` block lattice) of a cell.
    pub fn block_of(&self, row: usize, col: usize) -> usize {
        (row / self.n) * self.n + col / self.n
    }

    pub fn filled_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn row_is_empty(&self, row: usize) -> bool {
        (0..self.side()).all(|c| self.get(row, c).is_none())
    }

    /// True iff no row, column or block holds a repeated value.
    pub fn is_consistent(&self) -> bool {
        let side = self.side();
        let mut rows = vec![0u64; side];
        let mut cols = vec![0u64; side];
        let mut blocks = vec![0u64; side];
        for r in 0..side {
            for c in 0..side {
                let Some(v) = self.get(r, c) else { continue };
                let bit = 1u64 << (v - 1);
                let b = self.block_of(r, c);
                if rows[r] & bit != 0 || cols[c] & bit != 0 || blocks[b] & bit != 0 {
                    return false;
                }
                rows[r] |= bit;
                cols[c] |= bit;
                blocks[b] |= bit;
            }
        }
        true
    }

    pub fn transpose(&self) -> Grid {
        let side = self.side();
        let mut out = self.clone();
        for r in 0..side {
            for c in 0..side {
                out.cells[c * side + r] = self.get(r, c);
            }
        }
        out
    }

    /// Swaps two row bands or two column bands.
    pub fn swap_bands(&self, a: Band, b: Band) -> Result<Grid, GridError> {
        if a.orientation != b.orientation {
            return Err(GridError::MixedBands);
        }
        for band in [a, b] {
            if band.index == 0 || band.index > self.n {
                return Err(GridError::BandOutOfRange {
                    index: band.index,
                    n: self.n,
                });
            }
        }
        let n = self.n;
        let side = self.side();
        let map = |x: usize| {
            let band = x / n + 1;
            let offset = x % n;
            if band == a.index {
                (b.index - 1) * n + offset
            } else if band == b.index {
                (a.index - 1) * n + offset
            } else {
                x
            }
        };
        let mut out = self.clone();
        for r in 0..side {
            for c in 0..side {
                let (r2, c2) = match a.orientation {
                    Orientation::Row => (map(r), c),
                    Orientation::Column => (r, map(c)),
                };
                out.cells[r2 * side + c2] = self.get(r, c);
            }
        }
        Ok(out)
    }

    /// Text form: `n <n>` then `n²` lines of cells. Orders up to 3 use one
    /// character per cell, larger orders comma-separated integers.
    pub fn to_text(&self) -> String {
        let side = self.side();
        let mut out = format!("n {}\n", self.n);
        for r in 0..side {
            let tokens: Vec<String> = (0..side)
                .map(|c| match self.get(r, c) {
                    Some(v) => v.to_string(),
                    None => ".".to_string(),
                })
                .collect();
            if self.n <= 3 {
                out.push_str(&tokens.concat());
            } else {
                out.push_str(&tokens.join(","));
            }
            out.push('\n');
        }
        out
    }
}

fn check_order(n: usize) -> Result<(), GridError> {
    if n == 0 || n > MAX_GRID_ORDER {
        return Err(GridError::InvalidOrder {
            n,
            max: MAX_GRID_ORDER,
        });
    }
    Ok(())
}

/// Parses the `n <int>` header shared by the text formats.
pub(crate) fn parse_header(line: Option<(usize, &str)>, key: &str) -> Result<usize, GridError> {
    let (idx, line) = line.ok_or(GridError::Malformed {
        line: 1,
        message: format!("missing `{key} <int>` header"),
    })?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v.parse().map_err(|_| GridError::Malformed {
            line: idx + 1,
            message: format!("bad integer `{v}`"),
        }),
        _ => Err(GridError::Malformed {
            line: idx + 1,
            message: format!("expected `{key} <int>`, found `{line}`"),
        }),
    }
}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(text: &str) -> Result<Self, GridError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let n = parse_header(lines.next(), "n")?;
        check_order(n)?;
        let side = n * n;
        let mut cells = Vec::with_capacity(side * side);
        for (idx, line) in lines {
            let line = line.trim();
            let separated = line.contains(|c: char| c == ',' || c.is_whitespace());
            let tokens: Vec<&str> = if separated {
                line.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .collect()
            } else if n <= 3 {
                line.char_indices()
                    .map(|(i, ch)| &line[i..i + ch.len_utf8()])
                    .collect()
            } else {
                vec![line]
            };
            if tokens.len() != side {
                return Err(GridError::Malformed {
                    line: idx + 1,
                    message: format!("expected {side} cells, found {}", tokens.len()),
                });
            }
            for t in tokens {
                if t == "." {
                    cells.push(None);
                    continue;
                }
                let v: usize = t.parse().map_err(|_| GridError::Malformed {
                    line: idx + 1,
                    message: format!("bad cell `{t}`"),
                })?;
                if v == 0 || v > side {
                    return Err(GridError::ValueOutOfRange {
                        value: v,
                        max: side,
                    });
                }
                cells.push(Some(v as u8));
            }
        }
        Grid::from_cells(n, cells)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Row,
    Column,
}

/// `n` successive rows (or columns) of blocks; `index` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Band {
    pub orientation: Orientation,
    pub index: usize,
}

impl Band {
    pub fn row(index: usize) -> Self {
        Band {
            orientation: Orientation::Row,
            index,
        }
    }

    pub fn column(index: usize) -> Self {
        Band {
            orientation: Orientation::Column,
            index,
        }
    }
}

/// The triple `(n; c1, c2)`: the top-left `c1 × c2` blocks are pre-filled.
///
/// The solution count depends only on the rectangle's size, so the top-left
/// position is the canonical one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartlyFilledSpec {
    n: usize,
    c1: usize,
    c2: usize,
}

impl PartlyFilledSpec {
    pub fn new(n: usize, c1: usize, c2: usize) -> Result<Self, GridError> {
        if n == 0 || n > crate::bounds::MAX_BOUND_ORDER {
            return Err(GridError::InvalidOrder {
                n,
                max: crate::bounds::MAX_BOUND_ORDER,
            });
        }
        if c1 > n || c2 > n {
            return Err(GridError::InvalidSpec { n, c1, c2 });
        }
        Ok(PartlyFilledSpec { n, c1, c2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row bands spanned by the filled rectangle.
    pub fn c1(&self) -> usize {
        self.c1
    }

    /// Column bands spanned by the filled rectangle.
    pub fn c2(&self) -> usize {
        self.c2
    }

    pub fn is_empty(&self) -> bool {
        self.c1 == 0 || self.c2 == 0
    }

    pub fn transposed(&self) -> Self {
        PartlyFilledSpec {
            n: self.n,
            c1: self.c2,
            c2: self.c1,
        }
    }

    /// Number of filled blocks.
    pub fn area(&self) -> usize {
        self.c1 * self.c2
    }

    pub fn contains_cell(&self, row: usize, col: usize) -> bool {
        row < self.c1 * self.n && col < self.c2 * self.n
    }

    /// Every spec `(n; c1, c2)` with `0 <= c1, c2 <= n`.
    pub fn all(n: usize) -> impl Iterator<Item = PartlyFilledSpec> {
        (0..=n).flat_map(move |c1| (0..=n).map(move |c2| PartlyFilledSpec { n, c1, c2 }))
    }
}

impl fmt::Display for PartlyFilledSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{},{})", self.n, self.c1, self.c2)
    }
}

/// Checks that `filling` fills exactly the spec's rectangle, consistently,
/// and returns it as a counter input.
pub fn apply_partly_filled(spec: &PartlyFilledSpec, filling: &Grid) -> Result<Grid, GridError> {
    if spec.n != filling.n {
        return Err(GridError::OrderMismatch {
            spec: spec.n,
            grid: filling.n,
        });
    }
    let side = filling.side();
    for row in 0..side {
        for col in 0..side {
            match (spec.contains_cell(row, col), filling.get(row, col)) {
                (true, None) => return Err(GridError::IncompleteRectangle { row, col }),
                (false, Some(_)) => return Err(GridError::OutsideRectangle { row, col }),
                _ => {}
            }
        }
    }
    if !filling.is_consistent() {
        return Err(GridError::Inconsistent);
    }
    Ok(filling.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PUZZLE: &str = "n 3
53..7....
6..195...
.98....6.
8...6...3
4..8.3..1
7...2...6
.6....28.
...419..5
....8..79
";

    #[test]
    fn parse_empty_n2() {
        let g: Grid = "n 2\n....\n....\n....\n....\n".parse().unwrap();
        assert_eq!(g, Grid::empty(2).unwrap());
        assert_eq!(g.filled_count(), 0);
    }

    #[test]
    fn parse_puzzle_keeps_clues() {
        let g: Grid = PUZZLE.parse().unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.filled_count(), 30);
        assert_eq!(g.get(0, 0), Some(5));
        assert_eq!(g.get(0, 2), None);
        assert_eq!(g.get(8, 8), Some(9));
        assert!(g.is_consistent());
        assert_eq!(g.to_text(), PUZZLE);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            "n 2\n....\n....\n....\n...\n".parse::<Grid>(),
            Err(GridError::Malformed {
                line: 5,
                message: "expected 4 cells, found 3".into()
            })
        );
        assert!(matches!(
            "n 2\n....\n....\n....\n".parse::<Grid>(),
            Err(GridError::CellCount {
                expected: 16,
                found: 12
            })
        ));
        assert!(matches!(
            "n 2\n5...\n....\n....\n....\n".parse::<Grid>(),
            Err(GridError::ValueOutOfRange { value: 5, max: 4 })
        ));
        assert!(matches!(
            "x 2\n".parse::<Grid>(),
            Err(GridError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            "n 9\n".parse::<Grid>(),
            Err(GridError::InvalidOrder { n: 9, .. })
        ));
    }

    #[test]
    fn separated_tokens_accepted() {
        let g: Grid = "n 2\n1 2 . .\n3,4,.,.\n. . . .\n. . . .\n".parse().unwrap();
        assert_eq!(g.get(1, 1), Some(4));
        assert_eq!(g.filled_count(), 4);
    }

    #[test]
    fn large_order_uses_commas() {
        let mut g = Grid::empty(4).unwrap();
        g.set(0, 0, Some(16)).unwrap();
        g.set(3, 15, Some(7)).unwrap();
        let text = g.to_text();
        assert!(text.lines().nth(1).unwrap().starts_with("16,.,."));
        assert_eq!(text.parse::<Grid>().unwrap(), g);
    }

    #[test]
    fn consistency() {
        assert!(Grid::empty(2).unwrap().is_consistent());
        let mut g = Grid::empty(2).unwrap();
        g.set(0, 0, Some(1)).unwrap();
        g.set(0, 3, Some(1)).unwrap();
        assert!(!g.is_consistent());
        let mut g = Grid::empty(2).unwrap();
        g.set(0, 0, Some(1)).unwrap();
        g.set(1, 1, Some(1)).unwrap();
        assert!(!g.is_consistent());
        g.set(1, 1, Some(2)).unwrap();
        assert!(g.is_consistent());
    }

    #[test]
    fn band_swap_rules() {
        let g: Grid = PUZZLE.parse().unwrap();
        let swapped = g.swap_bands(Band::row(1), Band::row(3)).unwrap();
        assert_eq!(swapped.get(6, 0), Some(5));
        assert_eq!(swapped.swap_bands(Band::row(1), Band::row(3)).unwrap(), g);
        assert!(swapped.is_consistent());
        assert_eq!(
            g.swap_bands(Band::row(1), Band::column(2)),
            Err(GridError::MixedBands)
        );
        assert!(g.swap_bands(Band::column(0), Band::column(2)).is_err());
    }

    #[test]
    fn partly_filled_application() {
        let spec = PartlyFilledSpec::new(2, 0, 0).unwrap();
        let g = apply_partly_filled(&spec, &Grid::empty(2).unwrap()).unwrap();
        assert_eq!(g.filled_count(), 0);

        let spec = PartlyFilledSpec::new(2, 1, 2).unwrap();
        let band: Grid = "n 2\n1234\n3412\n....\n....\n".parse().unwrap();
        let g = apply_partly_filled(&spec, &band).unwrap();
        assert_eq!(g.filled_count(), 8);

        let short: Grid = "n 2\n1234\n34.2\n....\n....\n".parse().unwrap();
        assert!(matches!(
            apply_partly_filled(&spec, &short),
            Err(GridError::IncompleteRectangle { row: 1, col: 2 })
        ));
        let spill: Grid = "n 2\n1234\n3412\n1...\n....\n".parse().unwrap();
        assert!(matches!(
            apply_partly_filled(&spec, &spill),
            Err(GridError::OutsideRectangle { row: 2, col: 0 })
        ));
        let bad: Grid = "n 2\n1234\n1243\n....\n....\n".parse().unwrap();
        assert_eq!(
            apply_partly_filled(&spec, &bad),
            Err(GridError::Inconsistent)
        );
    }

    #[test]
    fn spec_validation() {
        assert!(PartlyFilledSpec::new(3, 4, 0).is_err());
        assert!(PartlyFilledSpec::new(0, 0, 0).is_err());
        assert_eq!(PartlyFilledSpec::all(2).count(), 9);
        let s = PartlyFilledSpec::new(3, 1, 3).unwrap();
        assert_eq!(s.transposed().c1(), 3);
        assert_eq!(s.to_string(), "(3;1,3)");
    }

    fn arb_grid() -> impl Strategy<Value = Grid> {
        (1usize..=4).prop_flat_map(|n| {
            let side = n * n;
            proptest::collection::vec(proptest::option::of(1..=side as u8), side * side)
                .prop_map(move |cells| Grid::from_cells(n, cells).unwrap())
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(g in arb_grid()) {
            let text = g.to_text();
            let back: Grid = text.parse().unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.to_text(), text);
        }

        #[test]
        fn transpose_preserves_consistency(g in arb_grid()) {
            prop_assert_eq!(g.is_consistent(), g.transpose().is_consistent());
            prop_assert_eq!(g.transpose().transpose(), g);
        }
    }
}
