use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::BoundError;
use crate::factorial::{factorial_factorization, ln_factorial};

/// Bounds whose natural log exceeds this are not checked for exactness on construction.
const EAGER_EXACT_LN_LIMIT: f64 = 2000.0;
/// Largest factorial argument resolved eagerly into primes.
const EAGER_EXACT_BASE_LIMIT: u64 = 256;
/// Decimal expansion limit for [`LogBound::floor_value`]: `10^700`.
const FLOOR_LOG10_LIMIT: f64 = 700.0;
/// Largest intermediate `value^D` (in bits) formed by the exact floor.
const FLOOR_BIT_LIMIT: f64 = (1u64 << 23) as f64;

/// A multiplicative factor of a bound.
///
/// Factorial bases may carry fractional exponents; integer bases only ever
/// carry integral ones.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    Factorial(u64),
    Integer(BigUint),
}

impl Base {
    fn ln(&self) -> f64 {
        match self {
            Base::Factorial(x) => ln_factorial(*x),
            Base::Integer(v) => ln_biguint(v),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Factorial(x) => write!(f, "{x}!"),
            Base::Integer(v) => write!(f, "{v}"),
        }
    }
}

/// A non-negative bound carried as its natural logarithm, together with the
/// exact product of powers it was built from.
///
/// `exact` is attached whenever the value is an integer and small enough to
/// check eagerly. The zero bound has `ln_value = -inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogBound {
    ln_value: f64,
    exact: Option<BigUint>,
    powers: BTreeMap<Base, Ratio<i64>>,
    zero: bool,
}

impl LogBound {
    pub fn one() -> Self {
        Self::from_powers(BTreeMap::new())
    }

    pub fn zero() -> Self {
        LogBound {
            ln_value: f64::NEG_INFINITY,
            exact: Some(BigUint::zero()),
            powers: BTreeMap::new(),
            zero: true,
        }
    }

    pub fn from_integer(value: BigUint) -> Self {
        if value.is_zero() {
            return Self::zero();
        }
        let mut powers = BTreeMap::new();
        if !value.is_one() {
            powers.insert(Base::Integer(value), Ratio::one());
        }
        Self::from_powers(powers)
    }

    /// `x!^exponent`.
    pub fn factorial_power(x: u64, exponent: Ratio<i64>) -> Self {
        assert!(!exponent.is_negative(), "negative exponent");
        let mut powers = BTreeMap::new();
        if x > 1 && !exponent.is_zero() {
            powers.insert(Base::Factorial(x), exponent);
        }
        Self::from_powers(powers)
    }

    /// `∏ x!^e` over the given `(x, e)` pairs.
    pub fn factorial_product(factors: BTreeMap<u64, Ratio<i64>>) -> Self {
        let powers = factors
            .into_iter()
            .filter(|(x, e)| *x > 1 && !e.is_zero())
            .map(|(x, e)| {
                assert!(!e.is_negative(), "negative exponent");
                (Base::Factorial(x), e)
            })
            .collect();
        Self::from_powers(powers)
    }

    fn from_powers(powers: BTreeMap<Base, Ratio<i64>>) -> Self {
        let ln_value = powers
            .iter()
            .map(|(b, e)| ratio_f64(e) * b.ln())
            .sum::<f64>();
        let eager = ln_value <= EAGER_EXACT_LN_LIMIT
            && powers.keys().all(|b| match b {
                Base::Factorial(x) => *x <= EAGER_EXACT_BASE_LIMIT,
                Base::Integer(_) => true,
            });
        let mut out = LogBound {
            ln_value,
            exact: None,
            powers,
            zero: false,
        };
        if eager {
            out.exact = out.resolve().into_exact();
        }
        out
    }

    pub fn ln(&self) -> f64 {
        self.ln_value
    }

    pub fn log10(&self) -> f64 {
        self.ln_value / std::f64::consts::LN_10
    }

    /// Approximate value as `f64` (infinite beyond `f64::MAX`).
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn exact(&self) -> Option<&BigUint> {
        self.exact.as_ref()
    }

    /// The `(base, exponent)` factors in canonical order.
    pub fn powers(&self) -> impl Iterator<Item = (&Base, &Ratio<i64>)> {
        self.powers.iter()
    }

    /// Decimal mantissa in `[1, 10)` and exponent.
    pub fn scientific(&self) -> Option<(f64, i64)> {
        if self.zero {
            return None;
        }
        let l = self.log10();
        let mut e = l.floor();
        let mut m = 10f64.powf(l - e);
        if m >= 10.0 {
            m /= 10.0;
            e += 1.0;
        }
        Some((m, e as i64))
    }

    /// `self^k` for a non-negative integer `k`.
    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        if self.zero {
            return Self::zero();
        }
        let factor = Ratio::from_integer(k as i64);
        let powers = self
            .powers
            .iter()
            .map(|(b, e)| (b.clone(), e * factor))
            .collect();
        Self::from_powers(powers)
    }

    /// `⌊value⌋`, computed exactly.
    ///
    /// With `D` the common denominator of all prime exponents, the floor is
    /// the integer `D`-th root of the integer `value^D`.
    pub fn floor_value(&self) -> Result<BigUint, BoundError> {
        if let Some(v) = &self.exact {
            return Ok(v.clone());
        }
        if self.log10() > FLOOR_LOG10_LIMIT {
            return Err(BoundError::TooLarge {
                log10: self.log10(),
            });
        }
        let resolved = self.resolve();
        let denom = resolved.common_denominator();
        let bits = denom.to_f64().unwrap_or(f64::INFINITY) * self.ln_value / std::f64::consts::LN_2;
        let root = match denom.to_u32() {
            Some(d) if bits <= FLOOR_BIT_LIMIT => d,
            _ => {
                return Err(BoundError::TooLarge {
                    log10: self.log10(),
                })
            }
        };
        let mut raised = num_traits::pow(resolved.integer.clone(), root as usize);
        for (p, e) in &resolved.primes {
            let k = (e * BigInt::from(root)).to_integer();
            let k = k.to_usize().expect("exponent fits usize");
            raised *= num_traits::pow(BigUint::from(*p), k);
        }
        Ok(raised.nth_root(root))
    }

    fn resolve(&self) -> Resolved {
        let mut integer = BigUint::one();
        let mut primes: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (base, e) in &self.powers {
            match base {
                Base::Integer(v) => {
                    debug_assert!(e.is_integer());
                    let k = e.to_integer() as usize;
                    integer *= num_traits::pow(v.clone(), k);
                }
                Base::Factorial(x) => {
                    let e = BigRational::new(BigInt::from(*e.numer()), BigInt::from(*e.denom()));
                    for (p, v) in factorial_factorization(*x) {
                        *primes.entry(p).or_insert_with(BigRational::zero) += &e * BigInt::from(v);
                    }
                }
            }
        }
        Resolved { integer, primes }
    }
}

struct Resolved {
    integer: BigUint,
    primes: BTreeMap<u64, BigRational>,
}

impl Resolved {
    fn common_denominator(&self) -> BigInt {
        self.primes
            .values()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }

    fn into_exact(self) -> Option<BigUint> {
        if !self.primes.values().all(|e| e.is_integer()) {
            return None;
        }
        let mut out = self.integer;
        for (p, e) in self.primes {
            let k = e.to_integer().to_usize()?;
            out *= num_traits::pow(BigUint::from(p), k);
        }
        Some(out)
    }
}

impl Mul for &LogBound {
    type Output = LogBound;

    fn mul(self, rhs: &LogBound) -> LogBound {
        if self.zero || rhs.zero {
            return LogBound::zero();
        }
        let mut powers = self.powers.clone();
        for (b, e) in &rhs.powers {
            let slot = powers.entry(b.clone()).or_insert_with(Ratio::zero);
            *slot += e;
        }
        LogBound::from_powers(powers)
    }
}

impl Mul for LogBound {
    type Output = LogBound;

    fn mul(self, rhs: LogBound) -> LogBound {
        &self * &rhs
    }
}

impl std::iter::Product for LogBound {
    fn product<I: Iterator<Item = LogBound>>(iter: I) -> Self {
        iter.fold(LogBound::one(), |acc, b| acc * b)
    }
}

impl fmt::Display for LogBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = &self.exact {
            if v.bits() <= 64 {
                return write!(f, "{v}");
            }
        }
        match self.scientific() {
            None => write!(f, "0"),
            Some((m, e)) => write!(f, "{m:.4}e{e}"),
        }
    }
}

fn ratio_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Natural log of a big integer (`-inf` for zero).
pub fn ln_biguint(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit prefix");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
