use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{parse_header, GridError, MAX_GRID_ORDER};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("block order {0} outside 1..={MAX_GRID_ORDER}")]
    InvalidOrder(usize),
    #[error("layout has no components")]
    Empty,
    #[error("components {0} and {1} occupy the same blocks")]
    DuplicateComponent(usize, usize),
    #[error("components do not form a single block-sharing cluster")]
    Disconnected,
    #[error("overlap of components {0} and {1} is not a block rectangle")]
    NonRectangularOverlap(usize, usize),
    #[error("stage count must be at least 1")]
    ZeroStages,
    #[error("unknown layout `{0}` (expected shogun, sumo, stair:<l> or belt:<l>)")]
    UnknownKind(String),
    #[error(transparent)]
    Parse(#[from] GridError),
}

/// Several order-`n` Sudokus placed on a shared block lattice.
///
/// Each component is the top-left block coordinate of one `n × n`-block
/// Sudoku. Offsets are block-aligned, so two components always meet in a
/// whole-block rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoupledLayout {
    n: usize,
    components: Vec<(usize, usize)>,
}

impl CoupledLayout {
    pub fn new(n: usize, components: Vec<(usize, usize)>) -> Result<Self, LayoutError> {
        if n == 0 || n > MAX_GRID_ORDER {
            return Err(LayoutError::InvalidOrder(n));
        }
        if components.is_empty() {
            return Err(LayoutError::Empty);
        }
        for (a, pa) in components.iter().enumerate() {
            if let Some(b) = components[a + 1..].iter().position(|pb| pb == pa) {
                return Err(LayoutError::DuplicateComponent(a, a + 1 + b));
            }
        }
        let layout = CoupledLayout { n, components };
        for a in 0..layout.len() {
            for b in a + 1..layout.len() {
                if block_rectangle(layout.overlap_mask(a, b), n).is_none() {
                    return Err(LayoutError::NonRectangularOverlap(a, b));
                }
            }
        }
        if !layout.is_connected() {
            return Err(LayoutError::Disconnected);
        }
        Ok(layout)
    }

    /// `stages` components, each shifted by `step` blocks from the previous.
    pub fn chain(n: usize, stages: usize, step: (usize, usize)) -> Result<Self, LayoutError> {
        if stages == 0 {
            return Err(LayoutError::ZeroStages);
        }
        let components = (0..stages).map(|k| (k * step.0, k * step.1)).collect();
        Self::new(n, components)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[(usize, usize)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Global block coordinates covered by component `k`.
    pub fn blocks(&self, k: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (r0, c0) = self.components[k];
        let n = self.n;
        (0..n).flat_map(move |r| (0..n).map(move |c| (r0 + r, c0 + c)))
    }

    fn covers(&self, k: usize, block: (usize, usize)) -> bool {
        let (r0, c0) = self.components[k];
        (r0..r0 + self.n).contains(&block.0) && (c0..c0 + self.n).contains(&block.1)
    }

    /// Blocks of `k` also covered by `other`, as a mask over `k`'s local
    /// blocks (bit `r * n + c`).
    pub fn overlap_mask(&self, k: usize, other: usize) -> u64 {
        let mut mask = 0u64;
        for (bit, block) in self.blocks(k).enumerate() {
            if self.covers(other, block) {
                mask |= 1 << bit;
            }
        }
        mask
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(k) = stack.pop() {
            for m in 0..self.len() {
                if !seen[m] && self.overlap_mask(k, m) != 0 {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Distinct blocks in the union of all components.
    pub fn union_blocks(&self) -> BTreeSet<(usize, usize)> {
        (0..self.len()).flat_map(|k| self.blocks(k)).collect()
    }

    /// Sum over component pairs of their shared cell counts.
    pub fn pairwise_overlap_cells(&self) -> usize {
        let per_block = self.n * self.n;
        let mut total = 0;
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                total += self.overlap_mask(a, b).count_ones() as usize * per_block;
            }
        }
        total
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (r, c) in &self.components {
            out.push_str(&format!("component {r} {c}\n"));
        }
        out
    }
}

/// If `mask` (over an `n × n` block lattice) is a product `U × V` of block
/// rows and block columns, returns `(|U|, |V|)`. The empty mask is `(0, 0)`.
pub(crate) fn block_rectangle(mask: u64, n: usize) -> Option<(usize, usize)> {
    if mask == 0 {
        return Some((0, 0));
    }
    let mut rows = 0u64;
    let mut cols = 0u64;
    for r in 0..n {
        for c in 0..n {
            if mask >> (r * n + c) & 1 == 1 {
                rows |= 1 << r;
                cols |= 1 << c;
            }
        }
    }
    let mut product = 0u64;
    for r in 0..n {
        for c in 0..n {
            if rows >> r & 1 == 1 && cols >> c & 1 == 1 {
                product |= 1 << (r * n + c);
            }
        }
    }
    (product == mask).then(|| (rows.count_ones() as usize, cols.count_ones() as usize))
}

/// Number of distinct cells in the union of the components (the `C` of a
/// coding rate).
pub fn total_cells(layout: &CoupledLayout) -> usize {
    layout.union_blocks().len() * layout.n.pow(2)
}

impl FromStr for CoupledLayout {
    type Err = LayoutError;

    fn from_str(text: &str) -> Result<Self, LayoutError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let n = parse_header(lines.next(), "n")?;
        let mut components = Vec::new();
        for (idx, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let malformed = || GridError::Malformed {
                line: idx + 1,
                message: format!("expected `component <row> <col>`, found `{}`", line.trim()),
            };
            match parts.as_slice() {
                ["component", r, c] => {
                    let r = r.parse().map_err(|_| malformed())?;
                    let c = c.parse().map_err(|_| malformed())?;
                    components.push((r, c));
                }
                _ => return Err(malformed().into()),
            }
        }
        CoupledLayout::new(n, components)
    }
}

impl fmt::Display for CoupledLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The catalog of coupled Sudokus, all of block order 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayoutKind {
    /// Two rows of four grids joined by three corner-sharing connectors.
    Shogun,
    /// A 3 × 3 array of grids joined by four corner-sharing connectors.
    Sumo,
    /// Diagonal chain; consecutive grids share `2 × 2` blocks.
    Stair(usize),
    /// Vertical chain; consecutive grids share one row band.
    Belt(usize),
}

impl FromStr for LayoutKind {
    type Err = LayoutError;

    fn from_str(s: &str) -> Result<Self, LayoutError> {
        let unknown = || LayoutError::UnknownKind(s.to_string());
        match s.split_once(':') {
            None if s == "shogun" => Ok(LayoutKind::Shogun),
            None if s == "sumo" => Ok(LayoutKind::Sumo),
            Some((kind, stages)) => {
                let stages: usize = stages.parse().map_err(|_| unknown())?;
                match kind {
                    "stair" => Ok(LayoutKind::Stair(stages)),
                    "belt" => Ok(LayoutKind::Belt(stages)),
                    _ => Err(unknown()),
                }
            }
            None => Err(unknown()),
        }
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutKind::Shogun => write!(f, "shogun"),
            LayoutKind::Sumo => write!(f, "sumo"),
            LayoutKind::Stair(l) => write!(f, "stair:{l}"),
            LayoutKind::Belt(l) => write!(f, "belt:{l}"),
        }
    }
}

/// Builds a catalog layout. Grids are listed before the connectors that join
/// them, so the natural order processes connectors last.
pub fn make_layout(kind: LayoutKind) -> Result<CoupledLayout, LayoutError> {
    match kind {
        LayoutKind::Shogun => {
            let mut components: Vec<_> = [0, 4]
                .into_iter()
                .flat_map(|r| [0, 4, 8, 12].into_iter().map(move |c| (r, c)))
                .collect();
            components.extend([(2, 2), (2, 6), (2, 10)]);
            CoupledLayout::new(3, components)
        }
        LayoutKind::Sumo => {
            let mut components: Vec<_> = [0, 4, 8]
                .into_iter()
                .flat_map(|r| [0, 4, 8].into_iter().map(move |c| (r, c)))
                .collect();
            components.extend([(2, 2), (2, 6), (6, 2), (6, 6)]);
            CoupledLayout::new(3, components)
        }
        LayoutKind::Stair(stages) => CoupledLayout::chain(3, stages, (1, 1)),
        LayoutKind::Belt(stages) => CoupledLayout::chain(3, stages, (2, 0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn catalog_cell_counts() {
        let cells = |k| total_cells(&make_layout(k).unwrap());
        assert_eq!(cells(LayoutKind::Stair(1)), 81);
        assert_eq!(cells(LayoutKind::Shogun), 783);
        assert_eq!(cells(LayoutKind::Sumo), 909);
        for l in 1..=8 {
            assert_eq!(cells(LayoutKind::Belt(l)), 81 + 54 * (l - 1));
            assert_eq!(cells(LayoutKind::Stair(l)), 81 + 45 * (l - 1));
        }
        assert_eq!(make_layout(LayoutKind::Shogun).unwrap().len(), 11);
        assert_eq!(make_layout(LayoutKind::Sumo).unwrap().len(), 13);
    }

    #[test]
    fn pairwise_formula_where_overlaps_are_disjoint() {
        let mut kinds = vec![
            LayoutKind::Shogun,
            LayoutKind::Sumo,
            LayoutKind::Stair(1),
            LayoutKind::Stair(2),
        ];
        kinds.extend((1..=6).map(LayoutKind::Belt));
        for kind in kinds {
            let l = make_layout(kind).unwrap();
            assert_eq!(
                total_cells(&l),
                81 * l.len() - l.pairwise_overlap_cells(),
                "{kind}"
            );
        }
        // From three stages on, stage k and k+2 share a block that stage k+1 also holds.
        let stair = make_layout(LayoutKind::Stair(3)).unwrap();
        assert_eq!(stair.overlap_mask(2, 0).count_ones(), 1);
        assert_eq!(
            total_cells(&stair),
            81 * 3 - stair.pairwise_overlap_cells() + 9
        );
    }

    #[test]
    fn overlap_masks() {
        let belt = make_layout(LayoutKind::Belt(2)).unwrap();
        // Second grid's top row band is the first grid's bottom one.
        assert_eq!(belt.overlap_mask(1, 0), 0b000_000_111);
        assert_eq!(block_rectangle(belt.overlap_mask(1, 0), 3), Some((1, 3)));
        let shogun = make_layout(LayoutKind::Shogun).unwrap();
        let corners = (0..8).fold(0, |m, k| m | shogun.overlap_mask(8, k));
        assert_eq!(corners, 0b101_000_101);
        assert_eq!(block_rectangle(corners, 3), Some((2, 2)));
        assert_eq!(block_rectangle(0b011_001_000, 3), None);
    }

    #[test]
    fn rejects_invalid_layouts() {
        assert_eq!(CoupledLayout::new(3, vec![]), Err(LayoutError::Empty));
        assert_eq!(
            CoupledLayout::new(3, vec![(0, 0), (0, 0)]),
            Err(LayoutError::DuplicateComponent(0, 1))
        );
        assert_eq!(
            CoupledLayout::new(3, vec![(0, 0), (0, 3)]),
            Err(LayoutError::Disconnected)
        );
        assert_eq!(
            make_layout(LayoutKind::Stair(0)),
            Err(LayoutError::ZeroStages)
        );
        assert!("stair:x".parse::<LayoutKind>().is_err());
        assert!("ring:3".parse::<LayoutKind>().is_err());
        assert_eq!("belt:4".parse::<LayoutKind>().unwrap(), LayoutKind::Belt(4));
    }

    #[test]
    fn parse_layout_text() {
        let l: CoupledLayout = "n 2\ncomponent 0 0\ncomponent 1 1\n".parse().unwrap();
        assert_eq!(l.components(), &[(0, 0), (1, 1)]);
        assert!(matches!(
            "n 2\ncomponent 0\n".parse::<CoupledLayout>(),
            Err(LayoutError::Parse(GridError::Malformed { line: 2, .. }))
        ));
    }

    proptest! {
        #[test]
        fn layout_text_round_trip(
            steps in proptest::collection::vec((0usize..=1, 0usize..=1), 1..6)
        ) {
            let mut pos = (0, 0);
            let mut comps = vec![pos];
            for (dr, dc) in steps {
                if dr + dc == 0 { continue; }
                pos = (pos.0 + dr, pos.1 + dc);
                comps.push(pos);
            }
            let l = CoupledLayout::new(3, comps).unwrap();
            let text = l.to_text();
            let back: CoupledLayout = text.parse().unwrap();
            prop_assert_eq!(back.to_text(), text);
            prop_assert_eq!(back, l);
        }
    }
}
