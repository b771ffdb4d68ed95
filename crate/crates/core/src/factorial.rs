//! Factorials in log domain and as prime factorizations.

use std::sync::OnceLock;

/// Largest argument held in the precomputed `ln x!` table (`n² ≤ 4096`).
pub const TABLE_LIMIT: usize = 4096;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LIMIT + 1);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..=TABLE_LIMIT {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln x!` as the exact sum `Σ_{k=2}^{x} ln k`.
pub fn ln_factorial(x: u64) -> f64 {
    let t = table();
    if (x as usize) < t.len() {
        return t[x as usize];
    }
    let mut acc = t[TABLE_LIMIT];
    for k in (TABLE_LIMIT as u64 + 1)..=x {
        acc += (k as f64).ln();
    }
    acc
}

/// Primes `≤ limit` by a plain sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for p in 2..=limit {
        if composite[p] {
            continue;
        }
        out.push(p as u64);
        let mut m = p * p;
        while m <= limit {
            composite[m] = true;
            m += p;
        }
    }
    out
}

/// Exponent of prime `p` in `x!` (Legendre).
pub fn legendre(x: u64, p: u64) -> u64 {
    let mut e = 0;
    let mut q = x / p;
    while q > 0 {
        e += q;
        q /= p;
    }
    e
}

/// Prime factorization of `x!` as `(p, exponent)` pairs in increasing `p`.
pub fn factorial_factorization(x: u64) -> Vec<(u64, u64)> {
    primes_up_to(x)
        .into_iter()
        .map(|p| (p, legendre(x, p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(4) - 24f64.ln()).abs() < 1e-14);
        assert!((ln_factorial(9) - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn beyond_table_continues_sum() {
        let x = TABLE_LIMIT as u64 + 3;
        let direct: f64 = (2..=x).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(x) - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn factorization_of_ten_factorial() {
        // 10! = 2^8 3^4 5^2 7
        assert_eq!(
            factorial_factorization(10),
            vec![(2, 8), (3, 4), (5, 2), (7, 1)]
        );
        assert!(factorial_factorization(1).is_empty());
    }
}
