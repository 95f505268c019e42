//! Integer and rational primitives: factorization, power-free decompositions
//! and exact root tests.
//!
//! Integers are [`num_bigint::BigInt`] and rationals are
//! [`num_rational::BigRational`], which keeps every fraction reduced with a
//! positive denominator.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Integer = BigInt;
pub type Rational = num_rational::BigRational;

/// Trial division runs over candidates up to this bound before switching to
/// Pollard rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Miller-Rabin with these bases is deterministic for n < 3.3 * 10^24.
const DETERMINISTIC_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
/// Extra bases used above the deterministic range (strong probable prime).
const EXTRA_BASES: [u32; 12] = [43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("zero has no factorization")]
    ZeroInput,
    #[error("power-free exponent must be at least 2, got {0}")]
    InvalidExponent(u32),
}

/// Signed prime factorization `unit * prod(p^e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    unit: i8,
    factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    /// Either `1` or `-1`.
    pub fn unit(&self) -> i8 {
        self.unit
    }

    /// Prime powers with strictly increasing primes.
    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn exponent_of(&self, prime: u64) -> u32 {
        let prime = BigInt::from(prime);
        self.factors
            .iter()
            .find(|(p, _)| *p == prime)
            .map_or(0, |(_, e)| *e)
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Multiplies the factorization back out.
    pub fn product(&self) -> BigInt {
        let magnitude = self
            .factors
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * p.pow(*e));
        if self.unit < 0 {
            -magnitude
        } else {
            magnitude
        }
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit < 0 {
            write!(f, "-")?;
        }
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Factors a nonzero integer completely.
pub fn factorize(n: &BigInt) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    let unit = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut remaining = n.magnitude().clone();
    let mut primes: BTreeMap<BigUint, u32> = BTreeMap::new();

    let mut trial_exhausted = true;
    let mut candidate = 2u64;
    while candidate <= TRIAL_DIVISION_BOUND {
        if BigUint::from(candidate * candidate) > remaining {
            break;
        }
        let mut exponent = 0u32;
        while (&remaining % candidate).is_zero() {
            remaining /= candidate;
            exponent += 1;
        }
        if exponent > 0 {
            primes.insert(BigUint::from(candidate), exponent);
        }
        candidate = next_wheel_candidate(candidate);
        if candidate > TRIAL_DIVISION_BOUND {
            trial_exhausted = false;
        }
    }

    if !remaining.is_one() {
        if trial_exhausted {
            // every divisor up to sqrt(remaining) was tried
            *primes.entry(remaining).or_insert(0) += 1;
        } else {
            split_large(remaining, &mut primes);
        }
    }

    Ok(Factorization {
        unit,
        factors: primes
            .into_iter()
            .map(|(p, e)| (BigInt::from(p), e))
            .collect(),
    })
}

fn next_wheel_candidate(p: u64) -> u64 {
    match p {
        2 => 3,
        3 => 5,
        // 6k-1 -> 6k+1 -> 6k+5
        _ if p % 6 == 5 => p + 2,
        _ => p + 4,
    }
}

fn split_large(n: BigUint, primes: &mut BTreeMap<BigUint, u32>) {
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *primes.entry(m).or_insert(0) += 1;
            continue;
        }
        let divisor = pollard_rho(&m);
        let cofactor = &m / &divisor;
        stack.push(divisor);
        stack.push(cofactor);
    }
}

/// Miller-Rabin. Deterministic below 3.3 * 10^24, a strong probable-prime
/// test with 25 bases above that.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    for &p in DETERMINISTIC_BASES.iter().chain(EXTRA_BASES.iter()) {
        if *n == BigUint::from(p) {
            return true;
        }
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let twos = n_minus_one.trailing_zeros().unwrap_or(0);
    let odd = &n_minus_one >> twos;

    let deterministic_limit: BigUint = "3317044064679887385961981".parse().unwrap();
    let bases: Vec<u32> = if *n < deterministic_limit {
        DETERMINISTIC_BASES.to_vec()
    } else {
        DETERMINISTIC_BASES
            .iter()
            .chain(EXTRA_BASES.iter())
            .copied()
            .collect()
    };

    'witness: for a in bases {
        let mut x = BigUint::from(a).modpow(&odd, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..twos {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Finds a nontrivial divisor of a composite `n` (Brent's variant).
fn pollard_rho(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        if let Some(d) = brent(n, &c) {
            return d;
        }
        c += 1u32;
    }
}

fn brent(n: &BigUint, c: &BigUint) -> Option<BigUint> {
    let step = |x: &BigUint| (x * x + c) % n;
    let batch = 128usize;
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut r = 1usize;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = step(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..batch.min(r - k) {
                y = step(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += batch;
        }
        r *= 2;
    }
    if g == *n {
        // batch overshot; retrace one step at a time
        loop {
            ys = step(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if g == *n {
        None
    } else {
        Some(g)
    }
}

/// Splits `n = core * scale^e` with `core` e-th-power-free and `scale >= 1`.
/// The sign of `n` stays on `core`.
pub fn powerfree_decompose(n: &BigInt, e: u32) -> Result<(BigInt, BigInt), ArithError> {
    if e < 2 {
        return Err(ArithError::InvalidExponent(e));
    }
    let factorization = factorize(n)?;
    let mut core = BigInt::from(factorization.unit());
    let mut scale = BigInt::one();
    for (p, exponent) in factorization.factors() {
        core *= p.pow(exponent % e);
        scale *= p.pow(exponent / e);
    }
    Ok((core, scale))
}

/// `n = core * scale^2` with `core` squarefree.
pub fn squarefree_part(n: &BigInt) -> Result<(BigInt, BigInt), ArithError> {
    powerfree_decompose(n, 2)
}

pub fn is_squarefree(n: &BigInt) -> bool {
    is_powerfree(n, 2)
}

pub fn is_cubefree(n: &BigInt) -> bool {
    is_powerfree(n, 3)
}

pub fn is_powerfree(n: &BigInt, e: u32) -> bool {
    match factorize(n) {
        Ok(f) => f.factors().iter().all(|(_, exp)| *exp < e),
        Err(_) => false,
    }
}

/// Exact square root of a perfect square, `None` otherwise.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

/// Exact (signed) cube root of a perfect cube.
pub fn exact_cbrt(n: &BigInt) -> Option<BigInt> {
    let root = n.cbrt();
    (&root * &root * &root == *n).then_some(root)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    exact_sqrt(n).is_some()
}

pub fn is_perfect_cube(n: &BigInt) -> bool {
    exact_cbrt(n).is_some()
}

/// Exact square root of a nonnegative rational square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let num = exact_sqrt(q.numer())?;
    let den = exact_sqrt(q.denom())?;
    Some(Rational::new(num, den))
}

/// Exact cube root of a rational cube.
pub fn rational_cbrt(q: &Rational) -> Option<Rational> {
    let num = exact_cbrt(q.numer())?;
    let den = exact_cbrt(q.denom())?;
    Some(Rational::new(num, den))
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn rational_from_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Small helper for `i64`-ranged callers; `None` if out of range.
pub fn to_i64(n: &BigInt) -> Option<i64> {
    n.to_i64()
}

/// Rational `base^exp` for any integer exponent (base must be nonzero if `exp < 0`).
pub fn rational_pow(base: &Rational, exp: i32) -> Rational {
    num_traits::pow::Pow::pow(base, exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn pairs(f: &Factorization) -> Vec<(i64, u32)> {
        f.factors()
            .iter()
            .map(|(p, e)| (p.to_i64().unwrap(), *e))
            .collect()
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(&big(-3456)).unwrap();
        assert_eq!(f.unit(), -1);
        assert_eq!(pairs(&f), vec![(2, 7), (3, 3)]);

        let f = factorize(&big(1)).unwrap();
        assert_eq!(f.unit(), 1);
        assert!(f.factors().is_empty());

        let f = factorize(&big(46656)).unwrap();
        assert_eq!(f.unit(), 1);
        assert_eq!(pairs(&f), vec![(2, 6), (3, 6)]);
    }

    #[test]
    fn factorize_rejects_zero() {
        assert_eq!(factorize(&big(0)), Err(ArithError::ZeroInput));
    }

    #[test]
    fn factorize_beyond_trial_division() {
        // two primes above the trial bound
        let p: BigInt = "1000003".parse().unwrap();
        let q: BigInt = "1000033".parse().unwrap();
        let n = &p * &q * &q * big(12);
        let f = factorize(&n).unwrap();
        assert_eq!(f.product(), n);
        assert_eq!(f.factors().len(), 4);
        assert_eq!(f.factors()[3], (q.clone(), 2));

        let large_prime: BigInt = "1000000000000000003".parse().unwrap();
        let f = factorize(&(-&large_prime)).unwrap();
        assert_eq!(f.unit(), -1);
        assert_eq!(f.factors(), &[(large_prime, 1)]);
    }

    #[test]
    fn miller_rabin_known_values() {
        for p in [2u64, 3, 5, 1_000_003, 2_147_483_647, 1_000_000_007] {
            assert!(is_probable_prime(&BigUint::from(p)), "{p}");
        }
        // Carmichael numbers and a strong pseudoprime to base 2
        for c in [561u64, 1105, 1729, 2047, 3_215_031_751, 1_000_003 * 1_000_033] {
            assert!(!is_probable_prime(&BigUint::from(c)), "{c}");
        }
        assert!(!is_probable_prime(&BigUint::from(1u32)));
    }

    #[test]
    fn powerfree_examples() {
        assert_eq!(powerfree_decompose(&big(46656), 6).unwrap(), (big(1), big(6)));
        assert_eq!(powerfree_decompose(&big(-432), 6).unwrap(), (big(-432), big(1)));
        assert_eq!(powerfree_decompose(&big(24), 3).unwrap(), (big(3), big(2)));
        assert_eq!(powerfree_decompose(&big(-46656), 6).unwrap(), (big(-1), big(6)));
        assert_eq!(
            powerfree_decompose(&big(24), 1),
            Err(ArithError::InvalidExponent(1))
        );
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&big(12)).unwrap(), (big(3), big(2)));
        assert_eq!(squarefree_part(&big(-50)).unwrap(), (big(-2), big(5)));
        assert_eq!(squarefree_part(&big(7)).unwrap(), (big(7), big(1)));
        assert!(is_squarefree(&big(-30)));
        assert!(!is_squarefree(&big(18)));
        assert!(is_cubefree(&big(36)));
        assert!(!is_cubefree(&big(16)));
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_sqrt(&big(18496)), Some(big(136)));
        assert_eq!(exact_sqrt(&big(18497)), None);
        assert_eq!(exact_sqrt(&big(-4)), None);
        assert_eq!(exact_cbrt(&big(-1728)), Some(big(-12)));
        assert_eq!(exact_cbrt(&big(1729)), None);
        assert_eq!(
            rational_cbrt(&Rational::new(big(-8), big(27))),
            Some(Rational::new(big(-2), big(3)))
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn factorize_multiplies_back(n in -1_000_000_000_000i64..=1_000_000_000_000i64) {
                prop_assume!(n != 0);
                let n = big(n);
                let f = factorize(&n).unwrap();
                prop_assert_eq!(f.product(), n);
                let primes: Vec<_> = f.primes().cloned().collect();
                prop_assert!(primes.windows(2).all(|w| w[0] < w[1]));
                for (p, e) in f.factors() {
                    prop_assert!(*e >= 1);
                    prop_assert!(is_probable_prime(p.magnitude()));
                }
            }

            #[test]
            fn powerfree_core_has_small_exponents(n in -10_000_000_000i64..=10_000_000_000i64, e in 2u32..=6) {
                prop_assume!(n != 0);
                let n = big(n);
                let (core, scale) = powerfree_decompose(&n, e).unwrap();
                prop_assert!(scale >= BigInt::one());
                prop_assert_eq!(&core * scale.pow(e), n);
                let f = factorize(&core).unwrap();
                prop_assert!(f.factors().iter().all(|(_, exp)| *exp < e));
            }

            #[test]
            fn squarefree_core_is_idempotent(n in -10_000_000_000i64..=10_000_000_000i64) {
                prop_assume!(n != 0);
                let (core, _) = squarefree_part(&big(n)).unwrap();
                let (again, scale) = squarefree_part(&core).unwrap();
                prop_assert_eq!(again, core);
                prop_assert_eq!(scale, BigInt::one());
            }
        }
    }
}
