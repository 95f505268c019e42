//! Rational torsion of Mordell curves.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{sixth_free_model, Coordinate, CurveError, CurvePoint, MordellCurve};
use crate::arith::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TorsionGroup {
    #[serde(rename = "Z/6Z")]
    Z6,
    #[serde(rename = "Z/3Z")]
    Z3,
    #[serde(rename = "Z/2Z")]
    Z2,
    #[serde(rename = "trivial")]
    Trivial,
}

impl TorsionGroup {
    pub fn order(self) -> u32 {
        match self {
            TorsionGroup::Z6 => 6,
            TorsionGroup::Z3 => 3,
            TorsionGroup::Z2 => 2,
            TorsionGroup::Trivial => 1,
        }
    }

    pub fn from_order(order: u32) -> Option<Self> {
        match order {
            6 => Some(TorsionGroup::Z6),
            3 => Some(TorsionGroup::Z3),
            2 => Some(TorsionGroup::Z2),
            1 => Some(TorsionGroup::Trivial),
            _ => None,
        }
    }
}

impl fmt::Display for TorsionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorsionGroup::Z6 => "Z/6Z",
            TorsionGroup::Z3 => "Z/3Z",
            TorsionGroup::Z2 => "Z/2Z",
            TorsionGroup::Trivial => "trivial",
        })
    }
}

/// Torsion of `E_D(Q)` from the sixth-power-free model `D'`:
/// `D' = 1` gives Z/6Z, `D'` a square or `-432` gives Z/3Z, `D'` a cube gives
/// Z/2Z, anything else is trivial. The checks run in that order.
pub fn torsion_of_d(d: &BigInt) -> Result<TorsionGroup, CurveError> {
    let (reduced, _) = sixth_free_model(d)?;
    Ok(if reduced.is_one() {
        TorsionGroup::Z6
    } else if arith::is_perfect_square(&reduced) || reduced == BigInt::from(-432) {
        TorsionGroup::Z3
    } else if arith::is_perfect_cube(&reduced) {
        TorsionGroup::Z2
    } else {
        TorsionGroup::Trivial
    })
}

/// Torsion of `E_{-432 d^3 k^2}(Q)` read off from `(d, k)` alone.
pub fn torsion_of_dk(d: &BigInt, k: &BigInt) -> Result<TorsionGroup, CurveError> {
    if d.is_zero() || !arith::is_squarefree(d) {
        return Err(CurveError::InvalidD(d.clone()));
    }
    if *k <= BigInt::zero() || !arith::is_cubefree(k) {
        return Err(CurveError::InvalidK(k.clone()));
    }
    let minus_three = BigInt::from(-3);
    let two = BigInt::from(2);
    Ok(if *d == minus_three && *k == two {
        TorsionGroup::Z6
    } else if *d == minus_three || (d.is_one() && k.is_one()) {
        TorsionGroup::Z3
    } else if *k == two {
        TorsionGroup::Z2
    } else {
        TorsionGroup::Trivial
    })
}

/// `P != infinity` and `3P = infinity`, tested as `2P = -P`.
pub fn three_torsion_check<F: Coordinate>(
    curve: &MordellCurve,
    p: &CurvePoint<F>,
) -> Result<bool, CurveError> {
    if p.is_infinity() {
        return Ok(false);
    }
    let doubled = curve.double(p)?;
    Ok(doubled == p.negate())
}

/// The nontrivial rational torsion points of `E_D` for sixth-power-free `D`.
pub fn torsion_points_enumerate(d: &BigInt) -> Result<Vec<CurvePoint<Rational>>, CurveError> {
    let (reduced, scale) = sixth_free_model(d)?;
    if !scale.is_one() {
        return Err(CurveError::NotSixthPowerFree(d.clone()));
    }
    let int = |n: BigInt| Rational::from_integer(n);
    let pair = |x: BigInt, y: BigInt| {
        [
            CurvePoint::affine(int(x.clone()), int(y.clone())),
            CurvePoint::affine(int(x), int(-y)),
        ]
    };
    let points: Vec<CurvePoint<Rational>> = match torsion_of_d(&reduced)? {
        TorsionGroup::Z6 => {
            let mut pts = pair(BigInt::zero(), BigInt::one()).to_vec();
            pts.push(CurvePoint::affine(int(BigInt::from(-1)), int(BigInt::zero())));
            pts.extend(pair(BigInt::from(2), BigInt::from(3)));
            pts
        }
        TorsionGroup::Z3 if reduced == BigInt::from(-432) => {
            pair(BigInt::from(12), BigInt::from(36)).to_vec()
        }
        TorsionGroup::Z3 => {
            let t = arith::exact_sqrt(&reduced).expect("Z/3Z model is a square here");
            pair(BigInt::zero(), t).to_vec()
        }
        TorsionGroup::Z2 => {
            let c = arith::exact_cbrt(&reduced).expect("Z/2Z model is a cube");
            vec![CurvePoint::affine(int(-c), int(BigInt::zero()))]
        }
        TorsionGroup::Trivial => Vec::new(),
    };
    debug_assert!({
        let curve = MordellCurve::over_q(reduced.clone()).unwrap();
        points.iter().all(|p| curve.contains(p).unwrap())
    });
    Ok(points)
}

/// Nontrivial rational torsion points of `E_A` for any nonzero `A`, carried
/// back from the sixth-power-free model through `(x, y) -> (x b^2, y b^3)`.
pub fn rational_torsion_points(a: &BigInt) -> Result<Vec<CurvePoint<Rational>>, CurveError> {
    let (reduced, scale) = sixth_free_model(a)?;
    let b = Rational::from_integer(scale);
    let b2 = &b * &b;
    let b3 = &b2 * &b;
    Ok(torsion_points_enumerate(&reduced)?
        .into_iter()
        .map(|p| match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x * &b2, y * &b3),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn pt(x: i64, y: i64) -> CurvePoint<Rational> {
        CurvePoint::affine(Rational::from_integer(big(x)), Rational::from_integer(big(y)))
    }

    /// Brute-force oracle: integral points with |x| <= bound of finite order.
    /// Torsion points on an integral Mordell model are integral (Nagell-Lutz).
    fn brute_force_torsion(d: i64, bound: i64) -> Vec<(i64, i64, u32)> {
        let curve = MordellCurve::over_q(d).unwrap();
        let mut out = Vec::new();
        for x in -bound..=bound {
            let rhs = big(x).pow(3) + big(d);
            if let Some(y) = arith::exact_sqrt(&rhs) {
                let y = i64::try_from(y).unwrap();
                for y in if y == 0 { vec![0] } else { vec![y, -y] } {
                    if let Some(n) = curve.order_up_to(&pt(x, y), 12).unwrap() {
                        out.push((x, y, n));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn torsion_of_d_examples() {
        assert_eq!(torsion_of_d(&big(1)).unwrap(), TorsionGroup::Z6);
        assert_eq!(torsion_of_d(&big(-432)).unwrap(), TorsionGroup::Z3);
        assert_eq!(torsion_of_d(&big(8)).unwrap(), TorsionGroup::Z2);
        assert_eq!(torsion_of_d(&big(16)).unwrap(), TorsionGroup::Z3);
        assert_eq!(torsion_of_d(&big(-2)).unwrap(), TorsionGroup::Trivial);
        // reduced first: 64 = 2^6 * 1
        assert_eq!(torsion_of_d(&big(64)).unwrap(), TorsionGroup::Z6);
        assert_eq!(torsion_of_d(&big(0)), Err(CurveError::ZeroCoefficient));
    }

    #[test]
    fn torsion_of_dk_examples() {
        assert_eq!(torsion_of_dk(&big(-3), &big(2)).unwrap(), TorsionGroup::Z6);
        assert_eq!(torsion_of_dk(&big(1), &big(1)).unwrap(), TorsionGroup::Z3);
        assert_eq!(torsion_of_dk(&big(-3), &big(5)).unwrap(), TorsionGroup::Z3);
        assert_eq!(torsion_of_dk(&big(3), &big(2)).unwrap(), TorsionGroup::Z2);
        assert_eq!(torsion_of_dk(&big(2), &big(1)).unwrap(), TorsionGroup::Trivial);
        assert_eq!(torsion_of_dk(&big(4), &big(1)), Err(CurveError::InvalidD(big(4))));
        assert_eq!(torsion_of_dk(&big(0), &big(1)), Err(CurveError::InvalidD(big(0))));
        assert_eq!(torsion_of_dk(&big(2), &big(8)), Err(CurveError::InvalidK(big(8))));
        assert_eq!(torsion_of_dk(&big(2), &big(0)), Err(CurveError::InvalidK(big(0))));
    }

    #[test]
    fn three_torsion_examples() {
        let e = MordellCurve::over_q(-432).unwrap();
        assert!(three_torsion_check(&e, &pt(12, 36)).unwrap());
        assert!(three_torsion_check(&e, &pt(12, -36)).unwrap());
        assert!(!three_torsion_check(&e, &CurvePoint::<Rational>::Infinity).unwrap());
        let e3456 = MordellCurve::over_q(-3456).unwrap();
        assert!(!three_torsion_check(&e3456, &pt(28, 136)).unwrap());
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(
            torsion_points_enumerate(&big(-432)).unwrap(),
            vec![pt(12, 36), pt(12, -36)]
        );
        assert_eq!(
            torsion_points_enumerate(&big(16)).unwrap(),
            vec![pt(0, 4), pt(0, -4)]
        );
        let mut got = torsion_points_enumerate(&big(1)).unwrap();
        got.sort_by_key(|p| p.to_string());
        let mut oracle: Vec<_> = brute_force_torsion(1, 50)
            .into_iter()
            .filter(|&(_, _, n)| n > 1)
            .map(|(x, y, _)| pt(x, y))
            .collect();
        oracle.sort_by_key(|p| p.to_string());
        assert_eq!(got, oracle);
        assert_eq!(torsion_points_enumerate(&big(8)).unwrap(), vec![pt(-2, 0)]);
        assert!(torsion_points_enumerate(&big(-2)).unwrap().is_empty());
        assert_eq!(
            torsion_points_enumerate(&big(64)),
            Err(CurveError::NotSixthPowerFree(big(64)))
        );
    }

    #[test]
    fn enumerated_points_have_predicted_orders() {
        for d in [1i64, -432, 16, 4, 8, -27, 125, -2, 7, 9, 25] {
            let group = torsion_of_d(&big(d)).unwrap();
            let curve = MordellCurve::over_q(d).unwrap();
            let points = torsion_points_enumerate(&big(d)).unwrap();
            assert_eq!(points.len() as u32, group.order() - 1, "D = {d}");
            for p in &points {
                let n = curve.order_up_to(p, 12).unwrap().unwrap();
                assert_eq!(group.order() % n, 0, "D = {d}, P = {p}");
                assert!(n > 1);
            }
            // the group's exponent is attained
            let max = points
                .iter()
                .map(|p| curve.order_up_to(p, 12).unwrap().unwrap())
                .max()
                .unwrap_or(1);
            assert_eq!(max, group.order(), "D = {d}");
            // the brute-force count of integral torsion agrees
            let brute = brute_force_torsion(d, 200).len() as u32;
            assert_eq!(brute, group.order() - 1, "D = {d}");
        }
    }

    #[test]
    fn torsion_pulled_back_to_non_reduced_model() {
        let points = rational_torsion_points(&big(11664)).unwrap();
        assert_eq!(points, vec![pt(0, 108), pt(0, -108)]);
        let curve = MordellCurve::over_q(11664).unwrap();
        assert!(points.iter().all(|p| curve.contains(p).unwrap()));
    }
}
