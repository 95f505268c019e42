//! Root numbers of Mordell curves, computed from local signs.
//!
//! For sixth-power-free `D = 2^a D_2 = 3^b D_3` the global sign is
//! `W = -w_2 w_3 prod_{p >= 5} w_p`. Nothing analytic is evaluated here: the
//! vanishing criterion is the algebraic statement that its residues force
//! `W = -1`, which in turn forces `L(E, 1) = 0`.

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith;
use crate::curve::sixth_free_model;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootNumberError {
    #[error("D must be nonzero")]
    ZeroCoefficient,
    #[error("d = {0} is not a nonzero squarefree integer")]
    InvalidD(BigInt),
}

/// A sign `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_negative(negative: bool) -> Self {
        if negative {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_negative(self != rhs)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Decomposition and local signs behind the root number of `y^2 = x^3 + D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootNumberReport {
    /// Sixth-power-free model the formula was applied to.
    pub d: BigInt,
    pub a: u32,
    pub d2: BigInt,
    pub b: u32,
    pub d3: BigInt,
    pub w2: Sign,
    pub w3: Sign,
    /// `w_p` for every prime `p >= 5` dividing `D`.
    pub odd_local_signs: Vec<(BigInt, Sign)>,
    pub w: Sign,
}

impl RootNumberReport {
    fn check_invariants(&self) {
        let two_part = BigInt::from(2).pow(self.a);
        let three_part = BigInt::from(3).pow(self.b);
        assert_eq!(&two_part * &self.d2, self.d, "D = 2^a D_2");
        assert!(self.d2.is_odd(), "D_2 odd");
        assert_eq!(&three_part * &self.d3, self.d, "D = 3^b D_3");
        assert!(!(&self.d3 % 3i32).is_zero(), "3 does not divide D_3");
        let product = self
            .odd_local_signs
            .iter()
            .fold(self.w2 * self.w3, |acc, (_, s)| acc * *s);
        assert_eq!(self.w, -product, "W = -w_2 w_3 prod w_p");
    }
}

/// Root number of `y^2 = x^3 + D`, after reducing `D` to its
/// sixth-power-free model.
pub fn root_number_mordell(d: &BigInt) -> Result<RootNumberReport, RootNumberError> {
    let (reduced, _) = sixth_free_model(d).map_err(|_| RootNumberError::ZeroCoefficient)?;
    let factorization = arith::factorize(&reduced).expect("reduced model is nonzero");

    let a = factorization.exponent_of(2);
    let b = factorization.exponent_of(3);
    let d2 = &reduced / BigInt::from(2).pow(a);
    let d3 = &reduced / BigInt::from(3).pow(b);

    let d2_mod_4 = residue(&d2, 4);
    let w2 = Sign::from_negative(!a.is_multiple_of(2) || (a.is_multiple_of(2) && d2_mod_4 == 1 && a != 4));

    let d3_mod_9 = residue(&d3, 9);
    let alternating = if (b + 1).is_multiple_of(2) { 1 } else { 8 }; // (-1)^(b+1) mod 9
    let w3 = Sign::from_negative(
        b % 3 == 2 || (b.is_multiple_of(3) && (d3_mod_9 == 2 || d3_mod_9 == 7 || d3_mod_9 == alternating)),
    );

    let odd_local_signs: Vec<(BigInt, Sign)> = factorization
        .primes()
        .filter(|p| **p > BigInt::from(3))
        .map(|p| (p.clone(), Sign::from_negative(residue(p, 3) == 2)))
        .collect();

    let product = odd_local_signs
        .iter()
        .fold(w2 * w3, |acc, (_, s)| acc * *s);
    let report = RootNumberReport {
        d: reduced,
        a,
        d2,
        b,
        d3,
        w2,
        w3,
        odd_local_signs,
        w: -product,
    };
    report.check_invariants();
    Ok(report)
}

/// Root number of `y^2 = x^3 - 432 d^3` straight from `|d| / gcd(d, 6) mod 3`.
pub fn root_number_fermat(d: &BigInt) -> Result<Sign, RootNumberError> {
    if d.is_zero() || !arith::is_squarefree(d) {
        return Err(RootNumberError::InvalidD(d.clone()));
    }
    let magnitude = d.abs();
    let g = magnitude.gcd(&BigInt::from(6));
    let cofactor = residue(&(&magnitude / &g), 3);
    let negative = if g.is_odd() {
        cofactor == 2
    } else {
        cofactor == 1
    };
    Ok(Sign::from_negative(negative))
}

/// `|d| mod 9` in `{2, 5, 6, 8}`, i.e. `|d| = -1, 2, -4, 6 (mod 9)`.
///
/// When this holds for squarefree `d`, the root number of
/// `y^2 = x^3 - 432 d^3` is `-1`, so its L-function vanishes at 1.
pub fn l_vanishing_criterion(d: &BigInt) -> bool {
    matches!(residue(&d.abs(), 9), 2 | 5 | 6 | 8)
}

fn residue(n: &BigInt, m: u32) -> u32 {
    n.mod_floor(&BigInt::from(m))
        .to_u32()
        .expect("residue is below the modulus")
}

/// Root number of the sixth-power-free model of `-432 d^3`.
pub fn root_number_of_fermat_curve(d: &BigInt) -> Result<RootNumberReport, RootNumberError> {
    root_number_mordell(&(BigInt::from(-432) * d.pow(3)))
}

impl RootNumberReport {
    pub fn is_minus_one(&self) -> bool {
        self.w == Sign::Minus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn mordell_example_3456() {
        let r = root_number_mordell(&big(-3456)).unwrap();
        // -3456 = -2^7 3^3 reduces by 2^6 to -54 = -2 * 3^3
        assert_eq!(r.d, big(-54));
        assert_eq!(r.a, 1);
        assert_eq!(r.w2, Sign::Minus);
        assert_eq!(r.b, 3);
        assert_eq!(r.d3, big(-2));
        assert_eq!(r.w3, Sign::Minus);
        assert!(r.odd_local_signs.is_empty());
        assert_eq!(r.w, Sign::Minus);
    }

    #[test]
    fn mordell_example_432() {
        let r = root_number_mordell(&big(-432)).unwrap();
        assert_eq!((r.a, r.d2.clone()), (4, big(-27)));
        assert_eq!(r.w2, Sign::Plus);
        assert_eq!((r.b, r.d3.clone()), (3, big(-16)));
        assert_eq!(r.w3, Sign::Minus);
        assert_eq!(r.w, Sign::Plus);
    }

    #[test]
    fn mordell_example_54000() {
        let r = root_number_mordell(&big(-54000)).unwrap();
        assert_eq!(r.d, big(-54000));
        assert_eq!(r.odd_local_signs, vec![(big(5), Sign::Minus)]);
        assert_eq!(r.w, Sign::Minus);
    }

    #[test]
    fn mordell_rejects_zero() {
        assert_eq!(root_number_mordell(&big(0)), Err(RootNumberError::ZeroCoefficient));
    }

    #[test]
    fn fermat_examples() {
        assert_eq!(root_number_fermat(&big(5)).unwrap(), Sign::Minus);
        assert_eq!(root_number_fermat(&big(2)).unwrap(), Sign::Minus);
        assert_eq!(root_number_fermat(&big(7)).unwrap(), Sign::Plus);
        assert_eq!(root_number_fermat(&big(12)), Err(RootNumberError::InvalidD(big(12))));
        assert_eq!(root_number_fermat(&big(0)), Err(RootNumberError::InvalidD(big(0))));
    }

    #[test]
    fn criterion_examples() {
        assert!(l_vanishing_criterion(&big(2)));
        assert!(l_vanishing_criterion(&big(5)));
        assert!(l_vanishing_criterion(&big(-6)));
        assert!(l_vanishing_criterion(&big(-17)));
        assert!(!l_vanishing_criterion(&big(7)));
        assert!(!l_vanishing_criterion(&big(1)));
    }

    #[test]
    fn both_formulas_agree_on_small_d() {
        for d in (-300i64..=300).filter(|d| d.abs() >= 2) {
            let d = big(d);
            if !arith::is_squarefree(&d) {
                continue;
            }
            let fermat = root_number_fermat(&d).unwrap();
            let mordell = root_number_of_fermat_curve(&d).unwrap();
            assert_eq!(fermat, mordell.w, "d = {d}");
            if l_vanishing_criterion(&d) {
                assert_eq!(mordell.w, Sign::Minus, "d = {d}");
            }
        }
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(-Sign::Plus, Sign::Minus);
        assert_eq!(Sign::Minus.value(), -1);
        assert_eq!(Sign::Minus.to_string(), "-1");
    }
}
