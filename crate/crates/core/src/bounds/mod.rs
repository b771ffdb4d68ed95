//! Closed-form upper bounds on Sudoku solution counts.
//!
//! Every bound is a product of factorial powers `x!^(e/x)` and is carried as a
//! [`LogBound`]. Row band `i` of an `(n; c1, c2)` partly filled Sudoku
//! contributes `μ(i, j; c)` for its first `i` rows and `ν(j; c)` for the rest,
//! with `c = c2` on the first `c1` bands and `c = 0` below them.

mod logbound;

pub use logbound::{ln_biguint, Base, LogBound};

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::grid::PartlyFilledSpec;

/// Largest block order accepted by the closed-form bounds (`n² ≤ 4096`).
pub const MAX_BOUND_ORDER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("block order {0} outside 1..={MAX_BOUND_ORDER}")]
    InvalidOrder(usize),
    #[error("fraction {value} outside [0, 1]")]
    FractionOutOfRange { value: f64 },
    #[error("{d} * {n} is not an integer band count")]
    NonIntegerBands { d: f64, n: usize },
    #[error("bound 10^{log10:.1} too large for an exact decimal expansion")]
    TooLarge { log10: f64 },
}

fn check_order(n: usize) -> Result<(), BoundError> {
    if n == 0 || n > MAX_BOUND_ORDER {
        return Err(BoundError::InvalidOrder(n));
    }
    Ok(())
}

fn exponent(n: usize, c2: usize, x: usize) -> Ratio<i64> {
    Ratio::new((n * n - c2 * n) as i64, x as i64)
}

/// Factorial argument of `μ(i, j; ·)`: `n² - (i-1)n - (j-1)`.
fn mu_arg(n: usize, i: usize, j: usize) -> usize {
    n * n - (i - 1) * n - (j - 1)
}

/// Factorial argument of `ν(j; ·)`: `n² - (j-1)n`.
fn nu_arg(n: usize, j: usize) -> usize {
    n * n - (j - 1) * n
}

/// `μ(i, j; c2) = [n² - (i-1)n - (j-1)]!^((n² - c2 n) / (n² - (i-1)n - (j-1)))`.
pub fn mu(n: usize, i: usize, j: usize, c2: usize) -> Result<LogBound, BoundError> {
    check_order(n)?;
    if !(1..=n).contains(&i) || !(1..=i).contains(&j) || c2 > n {
        return Err(BoundError::IndexOutOfRange(format!(
            "mu(n={n}, i={i}, j={j}, c2={c2}) needs 1 <= j <= i <= n, c2 <= n"
        )));
    }
    let x = mu_arg(n, i, j);
    Ok(LogBound::factorial_power(x as u64, exponent(n, c2, x)))
}

/// `ν(j; c2) = [n² - (j-1)n]!^((n² - c2 n) / (n² - (j-1)n))`.
pub fn nu(n: usize, j: usize, c2: usize) -> Result<LogBound, BoundError> {
    check_order(n)?;
    if !(1..=n).contains(&j) || c2 > n {
        return Err(BoundError::IndexOutOfRange(format!(
            "nu(n={n}, j={j}, c2={c2}) needs 1 <= j <= n, c2 <= n"
        )));
    }
    let x = nu_arg(n, j);
    Ok(LogBound::factorial_power(x as u64, exponent(n, c2, x)))
}

/// The ordinary `n × n` Sudoku bound `S_U(n)`.
pub fn herzberg_bound(n: usize) -> Result<LogBound, BoundError> {
    check_order(n)?;
    let nn = n * n;
    let mut powers = BTreeMap::new();
    for i in 1..=n {
        let args = (1..=i)
            .map(|j| mu_arg(n, i, j))
            .chain((i + 1..=n).map(|j| nu_arg(n, j)));
        for x in args {
            *powers
                .entry(x as u64)
                .or_insert_with(|| Ratio::from_integer(0)) += Ratio::new(nn as i64, x as i64);
        }
    }
    Ok(LogBound::factorial_product(powers))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermKind {
    Mu,
    Nu,
}

/// One factor `x!^exponent` of a partly filled bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundTerm {
    pub kind: TermKind,
    /// Row band, 1-based.
    pub band: usize,
    /// `j` in `μ(i, j; c)` / `ν(j; c)`.
    pub position: usize,
    /// The `c` in the exponent numerator `n² - c n`.
    pub filled_bands: usize,
    pub factorial: u64,
    pub exponent: Ratio<i64>,
    pub ln: f64,
}

impl fmt::Display for BoundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            TermKind::Mu => format!("mu({},{};{})", self.band, self.position, self.filled_bands),
            TermKind::Nu => format!("nu({};{})", self.position, self.filled_bands),
        };
        write!(f, "{name} = {}!^({})", self.factorial, self.exponent)
    }
}

/// The factor decomposition of `S_U(n; c1, c2)`, band by band.
pub fn bound_terms(spec: &PartlyFilledSpec) -> Vec<BoundTerm> {
    let n = spec.n();
    let mut out = Vec::with_capacity(n * n);
    for i in 1..=n {
        let c = if i <= spec.c1() { spec.c2() } else { 0 };
        for j in 1..=n {
            let (kind, x) = if j <= i {
                (TermKind::Mu, mu_arg(n, i, j))
            } else {
                (TermKind::Nu, nu_arg(n, j))
            };
            let e = exponent(n, c, x);
            out.push(BoundTerm {
                kind,
                band: i,
                position: j,
                filled_bands: c,
                factorial: x as u64,
                exponent: e,
                ln: *e.numer() as f64 / *e.denom() as f64
                    * crate::factorial::ln_factorial(x as u64),
            });
        }
    }
    out
}

/// `S_U(n; c1, c2)`: the bound for an `(n; c1, c2)` partly filled Sudoku.
pub fn partly_filled_bound(spec: &PartlyFilledSpec) -> LogBound {
    let mut powers = BTreeMap::new();
    for t in bound_terms(spec) {
        *powers
            .entry(t.factorial)
            .or_insert_with(|| Ratio::from_integer(0)) += t.exponent;
    }
    LogBound::factorial_product(powers)
}

/// The smaller of `S_U(n; c1, c2)` and `S_U(n; c2, c1)`, with a flag telling
/// whether the transposed orientation won.
///
/// Both bound the same count, since transposing a grid swaps `c1` and `c2`.
pub fn oriented_bound(spec: &PartlyFilledSpec) -> (LogBound, bool) {
    let direct = partly_filled_bound(spec);
    if spec.c1() == spec.c2() {
        return (direct, false);
    }
    let flipped = partly_filled_bound(&spec.transposed());
    if flipped.ln() < direct.ln() {
        (flipped, true)
    } else {
        (direct, false)
    }
}

/// Leading exponents of `S_U(n; d1 n, d2 n) = n^(α n⁴) e^(β n⁴ + O(n³ ln n))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticExponents {
    pub alpha: f64,
    pub beta: f64,
}

impl AsymptoticExponents {
    /// `α n⁴ ln n + β n⁴`.
    pub fn ln_estimate(&self, n: usize) -> f64 {
        let nf = n as f64;
        let n4 = nf.powi(4);
        self.alpha * n4 * nf.ln() + self.beta * n4
    }
}

fn check_fraction(d: f64) -> Result<(), BoundError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(BoundError::FractionOutOfRange { value: d });
    }
    Ok(())
}

/// `α = 2(1 - d1 d2)` and `β = -5/2 + (1-d1) d2 ln(1-d1) + d1 d2 + d1² d2 / 2`,
/// taking `0 ln 0 = 0`.
///
/// These track the exact log-bound only to leading order in `n⁴ ln n`. For
/// `d1 d2 > 0` the exact value exceeds the estimate by about
/// `(2 d1 d2 - d1² d2) n⁴`, so the residual measured against `n³ ln n` grows
/// like `n / ln n`; it stays below `9.3 n³ ln n` for `n ≤ 32`.
pub fn asymptotic_exponents(d1: f64, d2: f64) -> Result<AsymptoticExponents, BoundError> {
    check_fraction(d1)?;
    check_fraction(d2)?;
    let log_term = if d1 == 1.0 {
        0.0
    } else {
        (1.0 - d1) * d2 * (1.0 - d1).ln()
    };
    Ok(AsymptoticExponents {
        alpha: 2.0 * (1.0 - d1 * d2),
        beta: -2.5 + log_term + d1 * d2 + d1 * d1 * d2 / 2.0,
    })
}

/// The spec `(n; d1 n, d2 n)`, rejecting fractions that do not give whole bands.
pub fn spec_from_fractions(n: usize, d1: f64, d2: f64) -> Result<PartlyFilledSpec, BoundError> {
    check_fraction(d1)?;
    check_fraction(d2)?;
    let bands = |d: f64| {
        let c = d * n as f64;
        if (c - c.round()).abs() > 1e-9 {
            Err(BoundError::NonIntegerBands { d, n })
        } else {
            Ok(c.round() as usize)
        }
    };
    PartlyFilledSpec::new(n, bands(d1)?, bands(d2)?)
        .map_err(|e| BoundError::IndexOutOfRange(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn spec(n: usize, c1: usize, c2: usize) -> PartlyFilledSpec {
        PartlyFilledSpec::new(n, c1, c2).unwrap()
    }

    #[test]
    fn mu_nu_small_values() {
        assert_eq!(mu(2, 1, 1, 0).unwrap().exact(), Some(&BigUint::from(24u32)));
        let root24 = mu(2, 1, 1, 1).unwrap();
        assert!((root24.value() - 24f64.sqrt()).abs() < 1e-12);
        assert_eq!(nu(2, 2, 0).unwrap().exact(), Some(&BigUint::from(4u32)));
        assert_eq!(nu(3, 3, 0).unwrap().exact(), Some(&BigUint::from(216u32)));
        for n in 1..6 {
            assert_eq!(mu(n, n, 1, n).unwrap().ln(), 0.0);
            assert_eq!(nu(n, 1, n).unwrap().ln(), 0.0);
        }
    }

    #[test]
    fn mu_nu_reject_bad_indices() {
        assert!(mu(3, 2, 3, 0).is_err());
        assert!(mu(3, 0, 0, 0).is_err());
        assert!(mu(3, 1, 1, 4).is_err());
        assert!(nu(3, 4, 0).is_err());
        assert!(nu(0, 1, 0).is_err());
    }

    #[test]
    fn herzberg_small() {
        assert_eq!(
            herzberg_bound(1).unwrap().exact(),
            Some(&BigUint::from(1u32))
        );
        assert_eq!(
            herzberg_bound(2).unwrap().exact(),
            Some(&BigUint::from(384u32))
        );
        let (m, e) = herzberg_bound(3).unwrap().scientific().unwrap();
        assert_eq!(e, 26);
        assert!((m - 1.7071).abs() < 1e-4);
    }

    #[test]
    fn partly_filled_examples() {
        let b = partly_filled_bound(&spec(2, 1, 1));
        assert!((b.value() - 2.0 * 24f64.sqrt() * 4.0).abs() < 1e-9);
        assert_eq!(b.floor_value().unwrap(), BigUint::from(39u32));
        assert_eq!(
            partly_filled_bound(&spec(2, 1, 2)).exact(),
            Some(&BigUint::from(4u32))
        );
        let (m, e) = partly_filled_bound(&spec(3, 2, 2)).scientific().unwrap();
        assert_eq!(e, 11);
        assert!((m - 1.5976).abs() < 1e-4);
        assert!((partly_filled_bound(&spec(3, 1, 3)).log10() - 14.0520).abs() < 1e-4);
    }

    #[test]
    fn orientation_prefers_smaller() {
        let (b, flipped) = oriented_bound(&spec(3, 3, 1));
        assert!(flipped);
        assert_eq!(b, partly_filled_bound(&spec(3, 1, 3)));
        assert!(!oriented_bound(&spec(3, 1, 3)).1);
    }

    #[test]
    fn terms_multiply_to_bound() {
        let s = spec(4, 2, 3);
        let sum: f64 = bound_terms(&s).iter().map(|t| t.ln).sum();
        assert!((sum - partly_filled_bound(&s).ln()).abs() < 1e-9);
        assert_eq!(bound_terms(&s).len(), 16);
    }

    #[test]
    fn asymptotic_plug_ins() {
        for d2 in [0.0, 0.3, 0.7, 1.0] {
            let a = asymptotic_exponents(0.0, d2).unwrap();
            assert_eq!((a.alpha, a.beta), (2.0, -2.5));
            let b = asymptotic_exponents(d2, 0.0).unwrap();
            assert_eq!((b.alpha, b.beta), (2.0, -2.5));
        }
        let full = asymptotic_exponents(1.0, 1.0).unwrap();
        assert_eq!(full.alpha, 0.0);
        assert!((full.beta + 1.0).abs() < 1e-15);
        assert!(asymptotic_exponents(1.5, 0.0).is_err());
        assert!(asymptotic_exponents(0.0, -0.1).is_err());
    }

    #[test]
    fn fractions_must_give_whole_bands() {
        assert_eq!(spec_from_fractions(8, 0.5, 1.0).unwrap(), spec(8, 4, 8));
        assert!(matches!(
            spec_from_fractions(3, 0.5, 0.0),
            Err(BoundError::NonIntegerBands { .. })
        ));
    }
}
