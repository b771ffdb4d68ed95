use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use sudoku_bounds::bounds::{ln_biguint, spec_from_fractions};
use sudoku_bounds::{herzberg_bound, ln_factorial, partly_filled_bound, PartlyFilledSpec};

fn spec(n: usize, c1: usize, c2: usize) -> PartlyFilledSpec {
    PartlyFilledSpec::new(n, c1, c2).unwrap()
}

#[test]
fn empty_spec_matches_isolated_bound() {
    for n in 1..=6 {
        let a = herzberg_bound(n).unwrap().ln();
        let b = partly_filled_bound(&spec(n, 0, 0)).ln();
        assert!(
            (a - b).abs() <= 1e-12 * a.abs().max(1.0),
            "n={n}: {a} vs {b}"
        );
    }
}

#[test]
fn nonincreasing_in_both_extents() {
    for n in 1..=5 {
        for c1 in 0..=n {
            for c2 in 0..=n {
                let here = partly_filled_bound(&spec(n, c1, c2)).ln();
                if c1 < n {
                    let next = partly_filled_bound(&spec(n, c1 + 1, c2)).ln();
                    assert!(
                        next <= here + 1e-12,
                        "({n};{},{c2}) > ({n};{c1},{c2})",
                        c1 + 1
                    );
                }
                if c2 < n {
                    let next = partly_filled_bound(&spec(n, c1, c2 + 1)).ln();
                    assert!(
                        next <= here + 1e-12,
                        "({n};{c1},{}) > ({n};{c1},{c2})",
                        c2 + 1
                    );
                }
            }
        }
    }
}

#[test]
fn column_strip_beats_row_strip_at_order_three() {
    let strip = partly_filled_bound(&spec(3, 1, 3));
    let band = partly_filled_bound(&spec(3, 3, 1));
    assert!(strip.ln() < band.ln());
    assert!((band.log10() - 17.4882).abs() < 1e-4);
}

/// Evaluates the isolated bound term by term with integer powers:
/// the product of `(x!)^(n²/x)` equals `(Π (x!)^(n²·L/x))^(1/L)`.
fn integer_evaluation(n: usize) -> f64 {
    let side = (n * n) as u64;
    let mut lcm = 1u64;
    let mut terms = Vec::new();
    for i in 1..=n as u64 {
        for j in 1..=n as u64 {
            let x = if j <= i {
                side - (i - 1) * n as u64 - (j - 1)
            } else {
                side - (j - 1) * n as u64
            };
            terms.push(x);
            lcm = num_integer::lcm(lcm, x);
        }
    }
    let mut product = BigUint::one();
    for &x in &terms {
        let fact: BigUint = (1..=x).map(BigUint::from).product();
        product *= fact.pow((side * lcm / x) as u32);
    }
    ln_biguint(&product) / lcm as f64
}

#[test]
fn integer_and_log_evaluations_agree() {
    for n in [2usize, 3] {
        let exact = integer_evaluation(n);
        let ln = herzberg_bound(n).unwrap().ln();
        assert!((exact - ln).abs() <= 1e-12 * ln, "n={n}: {exact} vs {ln}");
    }
}

#[test]
fn isolated_bound_rate_approaches_limit() {
    let k = 3.0;
    for n in [8usize, 16, 32] {
        let nf = n as f64;
        let gap = herzberg_bound(n).unwrap().ln() / nf.powi(4) - (2.0 * nf.ln() - 2.5);
        assert!(gap.abs() <= k * nf.ln() / nf, "n={n}: gap {gap}");
    }
}

#[test]
fn small_bounds_are_exact_integers_when_expected() {
    assert_eq!(
        herzberg_bound(2).unwrap().exact().unwrap().to_u64(),
        Some(384)
    );
    assert_eq!(
        partly_filled_bound(&spec(2, 2, 2))
            .exact()
            .unwrap()
            .to_u64(),
        Some(1)
    );
    assert_eq!(
        partly_filled_bound(&spec(3, 3, 3))
            .exact()
            .unwrap()
            .to_u64(),
        Some(1)
    );
    assert!(partly_filled_bound(&spec(2, 1, 1)).exact().is_none());
}

#[test]
fn fractional_extents_rejected() {
    assert!(spec_from_fractions(8, 0.3, 0.0).is_err());
    assert!(spec_from_fractions(8, 0.5, 1.0).is_ok());
}

proptest! {
    #[test]
    fn ln_factorial_is_log_gamma(x in 0u64..2000) {
        let direct: f64 = (2..=x).map(|k| (k as f64).ln()).sum();
        prop_assert!((ln_factorial(x) - direct).abs() <= 1e-9 * direct.max(1.0));
    }

    #[test]
    fn bounds_are_positive_and_finite(n in 1usize..=12, a in 0usize..=12, b in 0usize..=12) {
        let s = spec(n, a.min(n), b.min(n));
        let ln = partly_filled_bound(&s).ln();
        prop_assert!(ln.is_finite() && ln >= -1e-12);
    }
}
