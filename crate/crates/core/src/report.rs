//! Regression table of the published solution counts, bounds and rates.
//!
//! Published figures are printed truncated, so a computed value passes when
//! truncating it to the printed precision gives the printed digits.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;

use crate::bounds::{herzberg_bound, partly_filled_bound, LogBound};
use crate::counting::{count_partly_filled, count_solutions};
use crate::coupling::{
    coding_rate, composite_bound, decompose, exact_sudoku_count, rate_limit, stage_increment,
    ChainKind,
};
use crate::grid::{make_layout, Grid, LayoutKind, PartlyFilledSpec};

/// How a computed value is compared with the published one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tolerance {
    /// Integers or sets compared exactly.
    Exact,
    /// Fixed-point value truncated to this many decimals.
    Decimals(u32),
    /// Decimal mantissa truncated to this many decimals, exponent equal.
    Mantissa(u32),
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Exact => write!(f, "exact"),
            Tolerance::Decimals(d) => write!(f, "{d} dp"),
            Tolerance::Mantissa(d) => write!(f, "{} sig", d + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub paper_value: String,
    pub computed_value: String,
    pub relative_error: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

/// Which rows to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Selection {
    #[default]
    All,
    /// Only rows that need the backtracking counter.
    ExactCounts,
    /// Only closed-form rows; no counting is done.
    Bounds,
}

fn truncate(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    // Nudge by a few ulps so values printed exactly (e.g. 0.25) stay put.
    (x * scale * (1.0 + 4.0 * f64::EPSILON)).floor() / scale
}

fn decimal_row(label: &str, published: &str, computed: f64) -> ReportRow {
    let decimals = published.split_once('.').map_or(0, |(_, f)| f.len()) as u32;
    let value: f64 = published.parse().expect("published value parses");
    let shown = truncate(computed, decimals);
    ReportRow {
        label: label.into(),
        paper_value: published.into(),
        computed_value: format!("{computed:.6}"),
        relative_error: (computed - value).abs() / value.abs(),
        tolerance: Tolerance::Decimals(decimals),
        pass: (shown - value).abs() < 0.5 * 10f64.powi(-(decimals as i32)),
    }
}

/// `published` is written `M.MMMMeE`; `log10` is the computed value's log.
fn mantissa_row(label: &str, published: &str, log10: f64) -> ReportRow {
    let (m, e) = published
        .split_once('e')
        .expect("published value in scientific form");
    let decimals = m.split_once('.').map_or(0, |(_, f)| f.len()) as u32;
    let (pm, pe): (f64, i64) = (m.parse().unwrap(), e.parse().unwrap());
    let ce = log10.floor() as i64;
    let cm = 10f64.powf(log10 - ce as f64);
    let rel = (10f64.powf(log10 - pe as f64) - pm).abs() / pm;
    let shown = truncate(cm, decimals);
    ReportRow {
        label: label.into(),
        paper_value: published.into(),
        computed_value: format!("{cm:.6}e{ce}"),
        relative_error: rel,
        tolerance: Tolerance::Mantissa(decimals),
        pass: ce == pe && (shown - pm).abs() < 0.5 * 10f64.powi(-(decimals as i32)),
    }
}

fn exact_row(
    label: &str,
    published: &str,
    computed: String,
    numeric: Option<(f64, f64)>,
) -> ReportRow {
    let relative_error = numeric.map_or(if published == computed { 0.0 } else { 1.0 }, |(c, p)| {
        (c - p).abs() / p.abs()
    });
    ReportRow {
        label: label.into(),
        paper_value: published.into(),
        pass: published == computed,
        computed_value: computed,
        relative_error,
        tolerance: Tolerance::Exact,
    }
}

fn spec(n: usize, c1: usize, c2: usize) -> PartlyFilledSpec {
    PartlyFilledSpec::new(n, c1, c2).expect("valid published spec")
}

fn int_row(label: &str, published: u64, computed: &BigUint) -> ReportRow {
    let c = computed.to_string();
    let cf: f64 = c.parse().unwrap_or(f64::INFINITY);
    exact_row(
        label,
        &published.to_string(),
        c,
        Some((cf, published as f64)),
    )
}

fn natural_composite(kind: LayoutKind) -> crate::coupling::CompositeBound {
    let layout = make_layout(kind).expect("catalog layout");
    let order: Vec<usize> = (0..layout.len()).collect();
    let d = decompose(&layout, &order).expect("catalog order is rectangular");
    composite_bound(&d, true).expect("n = 3 has a stored count")
}

fn count_rows() -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let free = count_solutions(&Grid::empty(2).expect("order 2"))
        .map(|r| r.count)
        .unwrap_or_default();
    rows.push(int_row("S(2;0,0) by counting", 288, &free));

    let single = count_partly_filled(&spec(2, 1, 1)).expect("n = 2 is exhaustive");
    let shown = if single.min == single.max {
        single.min.to_string()
    } else {
        format!("{}..{}", single.min, single.max)
    };
    rows.push(exact_row(
        "S(2;1,1) over all fillings",
        "12",
        shown,
        Some((single.max.to_string().parse().unwrap_or(0.0), 12.0)),
    ));

    let band = count_partly_filled(&spec(2, 1, 2)).expect("n = 2 is exhaustive");
    let values: BTreeSet<String> = band.histogram.keys().map(|k| k.to_string()).collect();
    let shown = format!("{{{}}}", values.into_iter().collect::<Vec<_>>().join(", "));
    rows.push(exact_row(
        "S(2;1,2) over all fillings",
        "{2, 4}",
        shown,
        None,
    ));
    rows
}

fn bound_rows() -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let floor = |b: &LogBound| b.floor_value().expect("small bound");
    rows.push(int_row(
        "S_U(2;0,0)",
        384,
        &floor(&herzberg_bound(2).expect("n = 2")),
    ));
    rows.push(int_row(
        "floor S_U(2;1,1)",
        39,
        &floor(&partly_filled_bound(&spec(2, 1, 1))),
    ));
    rows.push(int_row(
        "S_U(2;1,2)",
        4,
        &floor(&partly_filled_bound(&spec(2, 1, 2))),
    ));

    let s2 = LogBound::from_integer(exact_sudoku_count(2).expect("stored"));
    let s3 = LogBound::from_integer(exact_sudoku_count(3).expect("stored"));
    let rate = |ln: f64, n: usize, cells: usize| coding_rate(ln, n, cells).expect("valid rate");
    rows.push(decimal_row("R(2;0,0)", "0.2553", rate(s2.ln(), 2, 16)));
    rows.push(mantissa_row(
        "S_U(3;0,0)",
        "1.7071e26",
        herzberg_bound(3).expect("n = 3").log10(),
    ));
    rows.push(decimal_row("R(3;0,0)", "0.2823", rate(s3.ln(), 3, 81)));
    rows.push(mantissa_row(
        "S_U(3;2,2)",
        "1.5976e11",
        partly_filled_bound(&spec(3, 2, 2)).log10(),
    ));

    let shogun = natural_composite(LayoutKind::Shogun);
    rows.push(mantissa_row("S_U shogun", "1.5993e208", shogun.log10()));
    rows.push(decimal_row("R_U shogun", "0.2786", shogun.rate_upper));
    let sumo = natural_composite(LayoutKind::Sumo);
    rows.push(mantissa_row("S_U sumo", "1.7045e241", sumo.log10()));
    rows.push(decimal_row("R_U sumo", "0.2781", sumo.rate_upper));

    let ln9 = 9f64.ln();
    rows.push(decimal_row("log10 S(3;0,0)", "21.8241", s3.log10()));
    rows.push(decimal_row("log9 S(3;0,0)", "22.8706", s3.ln() / ln9));
    let (stair_step, _) = stage_increment(ChainKind::Stair).expect("catalog chain");
    rows.push(decimal_row(
        "stair log10 step",
        "11.2034",
        stair_step / std::f64::consts::LN_10,
    ));
    rows.push(decimal_row("stair log9 step", "11.7407", stair_step / ln9));
    rows.push(decimal_row(
        "stair rate limit",
        "0.2609",
        rate_limit(ChainKind::Stair).expect("chain"),
    ));
    let (belt_step, _) = stage_increment(ChainKind::Belt).expect("catalog chain");
    rows.push(decimal_row(
        "belt log10 step",
        "14.0520",
        belt_step / std::f64::consts::LN_10,
    ));
    rows.push(decimal_row("belt log9 step", "14.7258", belt_step / ln9));
    rows.push(decimal_row(
        "belt rate limit",
        "0.2727",
        rate_limit(ChainKind::Belt).expect("chain"),
    ));
    rows
}

pub fn run_paper_report(selection: Selection) -> Vec<ReportRow> {
    match selection {
        Selection::All => {
            let mut rows = count_rows();
            rows.extend(bound_rows());
            rows
        }
        Selection::ExactCounts => count_rows(),
        Selection::Bounds => bound_rows(),
    }
}

/// Plain-text table, one row per line.
pub fn render_table(rows: &[ReportRow]) -> String {
    let mut out = format!(
        "{:<28} {:>12} {:>20} {:>10} {:>7}  {}\n",
        "quantity", "published", "computed", "rel.err", "tol", "status"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<28} {:>12} {:>20} {:>10.2e} {:>7}  {}\n",
            r.label,
            r.paper_value,
            r.computed_value,
            r.relative_error,
            r.tolerance.to_string(),
            if r.pass { "pass" } else { "FAIL" }
        ));
    }
    out
}
