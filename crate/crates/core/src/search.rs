//! Bounded search for rational points on `y^2 = x^3 + D`.
//!
//! Rational points on an integral model have the shape `(m/e^2, n/e^3)` with
//! `gcd(m, e) = gcd(n, e) = 1`, so the search walks `e = 1..=E` and
//! `|m| <= H e^2`, testing whether `m^3 + D e^6` is a perfect square. Each
//! `e` slice is split across threads; the merged output keeps the sequential
//! order `(e, |m|, +m first, +y first)`.

use num_bigint::BigInt;
use num_integer::{Integer as _, Roots};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{self, Rational};
use crate::curve::CurvePoint;

pub const DEFAULT_MAX_DENOMINATOR: u64 = 12;
pub const DEFAULT_MAX_HEIGHT: u64 = 10_000;

/// Work below this many candidates per thread is not split further.
const MIN_CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search bounds must be positive (max denominator {0}, max height {1})")]
    InvalidBounds(u64, u64),
    #[error("D must be nonzero")]
    ZeroCoefficient,
}

/// `e <= max_denominator`, `|m| <= max_height * e^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    max_denominator: u64,
    max_height: u64,
}

impl SearchBounds {
    pub fn new(max_denominator: u64, max_height: u64) -> Result<Self, SearchError> {
        if max_denominator == 0 || max_height == 0 {
            return Err(SearchError::InvalidBounds(max_denominator, max_height));
        }
        Ok(Self {
            max_denominator,
            max_height,
        })
    }

    pub fn max_denominator(&self) -> u64 {
        self.max_denominator
    }

    pub fn max_height(&self) -> u64 {
        self.max_height
    }
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            max_height: DEFAULT_MAX_HEIGHT,
        }
    }
}

/// Every point in the box, ordered by `(e, |m|, +m first, +y first)`.
pub fn search_qpoints(
    d: &BigInt,
    bounds: &SearchBounds,
) -> Result<Vec<CurvePoint<Rational>>, SearchError> {
    Ok(search_by_denominator(d, bounds)?.flatten().collect())
}

/// Lazily yields the points of each denominator `e = 1, 2, ...` in turn, so
/// callers that only need the first hit can stop early.
pub fn search_by_denominator(
    d: &BigInt,
    bounds: &SearchBounds,
) -> Result<impl Iterator<Item = Vec<CurvePoint<Rational>>>, SearchError> {
    if d.is_zero() {
        return Err(SearchError::ZeroCoefficient);
    }
    let d = d.clone();
    let height = bounds.max_height;
    Ok((1..=bounds.max_denominator).map(move |e| points_with_denominator(&d, e, height)))
}

/// Points `(m/e^2, +-n/e^3)` with `gcd(m, e) = 1` and `|m| <= height * e^2`.
pub fn points_with_denominator(d: &BigInt, e: u64, height: u64) -> Vec<CurvePoint<Rational>> {
    let e_big = BigInt::from(e);
    let e2 = &e_big * &e_big;
    let e3 = &e2 * &e_big;
    let shift = d * &e3 * &e3; // D e^6
    let hi = BigInt::from(height) * &e2;
    let lo = std::cmp::max(-&hi, ceil_cbrt(&-&shift));
    if lo > hi {
        return Vec::new();
    }

    let hits: Vec<(BigInt, BigInt)> = match (lo.to_i64(), hi.to_i64(), shift.to_i128()) {
        (Some(lo), Some(hi), Some(c)) if fits_fast_path(lo, hi, c) => (0..(hi - lo + 1) as usize)
            .into_par_iter()
            .with_min_len(MIN_CHUNK)
            .filter_map(|offset| {
                let m = lo + offset as i64;
                if e > 1 && gcd_u64(m.unsigned_abs(), e) != 1 {
                    return None;
                }
                let m128 = i128::from(m);
                let value = m128 * m128 * m128 + c;
                let root = exact_sqrt_u128(u128::try_from(value).ok()?)?;
                Some((BigInt::from(m), BigInt::from(root)))
            })
            .collect(),
        _ => slow_hits(&lo, &hi, &shift, &e_big),
    };
    let mut hits = hits;
    hits.sort_by_key(|(m, _)| (m.abs(), m.is_negative()));

    let e2 = Rational::from_integer(e2);
    let e3 = Rational::from_integer(e3);
    let mut points = Vec::with_capacity(2 * hits.len());
    for (m, n) in hits {
        let x = Rational::from_integer(m) / &e2;
        if n.is_zero() {
            points.push(CurvePoint::affine(x, Rational::zero()));
        } else {
            let y = Rational::from_integer(n) / &e3;
            points.push(CurvePoint::affine(x.clone(), y.clone()));
            points.push(CurvePoint::affine(x, -y));
        }
    }
    points
}

fn fits_fast_path(lo: i64, hi: i64, shift: i128) -> bool {
    let span = lo.unsigned_abs().max(hi.unsigned_abs());
    // |m|^3 + |D e^6| < 2^127
    span < (1 << 41) && shift.unsigned_abs() < (1u128 << 125)
}

fn slow_hits(lo: &BigInt, hi: &BigInt, shift: &BigInt, e: &BigInt) -> Vec<(BigInt, BigInt)> {
    let mut hits = Vec::new();
    let mut m = lo.clone();
    while m <= *hi {
        if m.gcd(e) == BigInt::from(1) {
            let value = &m * &m * &m + shift;
            if let Some(root) = arith::exact_sqrt(&value) {
                hits.push((m.clone(), root));
            }
        }
        m += 1;
    }
    hits
}

/// Smallest integer `m` with `m^3 >= t`.
fn ceil_cbrt(t: &BigInt) -> BigInt {
    // cbrt truncates toward zero, which is already the ceiling for t < 0
    let r = t.cbrt();
    if t.is_positive() && &r * &r * &r < *t {
        r + 1
    } else {
        r
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

const fn residue_table<const M: usize>() -> [bool; M] {
    let mut table = [false; M];
    let mut i = 0;
    while i < M {
        table[(i * i) % M] = true;
        i += 1;
    }
    table
}

const SQUARES_MOD_64: [bool; 64] = residue_table::<64>();
const SQUARES_MOD_63: [bool; 63] = residue_table::<63>();
const SQUARES_MOD_65: [bool; 65] = residue_table::<65>();
const SQUARES_MOD_11: [bool; 11] = residue_table::<11>();

/// Exact square root of a perfect square, after cheap residue filters.
fn exact_sqrt_u128(v: u128) -> Option<u128> {
    if !SQUARES_MOD_64[(v % 64) as usize]
        || !SQUARES_MOD_63[(v % 63) as usize]
        || !SQUARES_MOD_65[(v % 65) as usize]
        || !SQUARES_MOD_11[(v % 11) as usize]
    {
        return None;
    }
    let root = v.sqrt();
    (root * root == v).then_some(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::MordellCurve;

    fn pt(x: i64, y: i64) -> CurvePoint<Rational> {
        CurvePoint::affine(
            Rational::from_integer(BigInt::from(x)),
            Rational::from_integer(BigInt::from(y)),
        )
    }

    /// Oracle: plain integer sweep over x with an exact square-root test.
    fn integer_sweep(d: i64, bound: i64) -> Vec<CurvePoint<Rational>> {
        let mut out = Vec::new();
        let xs = (0..=bound).flat_map(|a| if a == 0 { vec![0] } else { vec![a, -a] });
        for x in xs {
            let v = BigInt::from(x).pow(3) + BigInt::from(d);
            if let Some(y) = arith::exact_sqrt(&v) {
                let y = i64::try_from(y).unwrap();
                out.push(pt(x, y));
                if y != 0 {
                    out.push(pt(x, -y));
                }
            }
        }
        out
    }

    #[test]
    fn finds_three_torsion_on_432() {
        let bounds = SearchBounds::new(1, 20).unwrap();
        let found = search_qpoints(&BigInt::from(-432), &bounds).unwrap();
        assert_eq!(found, vec![pt(12, 36), pt(12, -36)]);
    }

    #[test]
    fn finds_golden_point_on_3456() {
        let bounds = SearchBounds::new(1, 30).unwrap();
        let found = search_qpoints(&BigInt::from(-3456), &bounds).unwrap();
        assert_eq!(found, integer_sweep(-3456, 30));
        assert_eq!(&found[..2], &[pt(28, 136), pt(28, -136)]);
    }

    #[test]
    fn integral_slice_matches_sweep() {
        for d in [-432i64, -3456, 1, -2, 17, 8, -11, 100] {
            let bounds = SearchBounds::new(1, 500).unwrap();
            let found = search_qpoints(&BigInt::from(d), &bounds).unwrap();
            assert_eq!(found, integer_sweep(d, 500), "D = {d}");
        }
    }

    #[test]
    fn curve_432_has_no_small_points() {
        let bounds = SearchBounds::new(10, 100).unwrap();
        assert!(search_qpoints(&BigInt::from(432), &bounds).unwrap().is_empty());
    }

    #[test]
    fn finds_non_integral_points() {
        // y^2 = x^3 - 2 has (3, 5) and 2(3, 5) = (129/100, 383/1000)
        let bounds = SearchBounds::new(10, 10).unwrap();
        let found = search_qpoints(&BigInt::from(-2), &bounds).unwrap();
        let x = Rational::new(BigInt::from(129), BigInt::from(100));
        let y = Rational::new(BigInt::from(383), BigInt::from(1000));
        assert!(found.contains(&CurvePoint::affine(x.clone(), y.clone())));
        assert!(found.contains(&CurvePoint::affine(x, -y)));
    }

    #[test]
    fn slow_path_agrees_with_fast_path() {
        let d = BigInt::from(-3456);
        for e in 1..=4u64 {
            let e_big = BigInt::from(e);
            let shift = &d * e_big.pow(6);
            let hi = BigInt::from(60 * e * e);
            let lo = std::cmp::max(-&hi, ceil_cbrt(&-&shift));
            let slow = slow_hits(&lo, &hi, &shift, &e_big);
            let fast = points_with_denominator(&d, e, 60);
            let from_slow: usize = slow.iter().map(|(_, n)| if n.is_zero() { 1 } else { 2 }).sum();
            assert_eq!(from_slow, fast.len(), "e = {e}");
        }
    }

    #[test]
    fn huge_coefficient_uses_big_path() {
        // D = 2^200 + 1 pushes D e^6 past the i128 fast path
        let d = BigInt::from(2).pow(200) + 1;
        let bounds = SearchBounds::new(1, 3).unwrap();
        let found = search_qpoints(&d, &bounds).unwrap();
        let curve = MordellCurve::over_q(d).unwrap();
        assert!(found.iter().all(|p| curve.contains(p).unwrap()));
        // only x = -1 gives a square, (2^100)^2
        let y = Rational::from_integer(BigInt::from(2).pow(100));
        let x = Rational::from_integer(BigInt::from(-1));
        assert_eq!(found, vec![CurvePoint::affine(x.clone(), y.clone()), CurvePoint::affine(x, -y)]);
    }

    #[test]
    fn ceil_cbrt_cases() {
        let c = |t: i64| ceil_cbrt(&BigInt::from(t));
        assert_eq!(c(10), BigInt::from(3));
        assert_eq!(c(8), BigInt::from(2));
        assert_eq!(c(-10), BigInt::from(-2));
        assert_eq!(c(-8), BigInt::from(-2));
        assert_eq!(c(0), BigInt::from(0));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(SearchBounds::new(0, 5), Err(SearchError::InvalidBounds(0, 5)));
        assert!(matches!(
            search_qpoints(&BigInt::from(0), &SearchBounds::default()),
            Err(SearchError::ZeroCoefficient)
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn output_is_on_curve_and_closed_under_negation(d in -5000i64..5000, e in 1u64..5, h in 1u64..60) {
                prop_assume!(d != 0);
                let bounds = SearchBounds::new(e, h).unwrap();
                let found = search_qpoints(&BigInt::from(d), &bounds).unwrap();
                let curve = MordellCurve::over_q(d).unwrap();
                for p in &found {
                    prop_assert!(curve.contains(p).unwrap());
                    prop_assert!(found.contains(&p.negate()));
                }
            }

            #[test]
            fn doubling_bounds_keeps_points(d in -5000i64..5000, e in 1u64..4, h in 1u64..40) {
                prop_assume!(d != 0);
                let small = search_qpoints(&BigInt::from(d), &SearchBounds::new(e, h).unwrap()).unwrap();
                let large = search_qpoints(&BigInt::from(d), &SearchBounds::new(2 * e, 2 * h).unwrap()).unwrap();
                for p in &small {
                    prop_assert!(large.contains(p));
                }
            }
        }
    }
}
