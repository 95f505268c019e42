//! Arithmetic in the quadratic field `Q(sqrt(d))`.
//!
//! Elements are stored on the basis `<1, sqrt(d)>`. The integral basis
//! `<1, (1+sqrt(d))/2>` used when `d = 1 mod 4` is only a view
//! ([`IntegralForm`]).

mod grammar;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{self, ArithError, Rational};

pub use grammar::{parse_rational, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("d = {0} does not define a quadratic field")]
    DegenerateField(BigInt),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields: Q(sqrt({0})) and Q(sqrt({1}))")]
    FieldMismatch(BigInt, BigInt),
    #[error("triple does not satisfy x^3 + y^3 = k z^3")]
    NotOnVariety,
    #[error("the zero triple cannot be rescaled")]
    AllZero,
    #[error("k must be a positive integer, got {0}")]
    InvalidK(BigInt),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// `K = Q(sqrt(d))` with `d` squarefree and `d != 0, 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadField {
    d: BigInt,
}

impl QuadField {
    /// Builds `Q(sqrt(n))`, reducing `n` to its squarefree part first.
    pub fn new(n: &BigInt) -> Result<Self, QuadError> {
        let (d, _) = arith::squarefree_part(n).map_err(|e| match e {
            ArithError::ZeroInput => QuadError::DegenerateField(BigInt::zero()),
            ArithError::InvalidExponent(_) => unreachable!(),
        })?;
        if d.is_one() {
            return Err(QuadError::DegenerateField(n.clone()));
        }
        Ok(Self { d })
    }

    pub fn from_i64(n: i64) -> Result<Self, QuadError> {
        Self::new(&BigInt::from(n))
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    /// `d mod 4` in `{1, 2, 3}`.
    pub fn d_mod_4(&self) -> u8 {
        let r = self.d.mod_floor(&BigInt::from(4));
        u8::try_from(r).expect("residue fits in u8")
    }

    pub fn integral_basis(&self) -> IntegralBasis {
        if self.d_mod_4() == 1 {
            IntegralBasis::Omega
        } else {
            IntegralBasis::Sqrt
        }
    }

    pub fn zero(&self) -> QuadElem {
        self.rational(Rational::zero())
    }

    pub fn one(&self) -> QuadElem {
        self.rational(Rational::one())
    }

    pub fn sqrt_d(&self) -> QuadElem {
        self.elem(Rational::zero(), Rational::one())
    }

    pub fn elem(&self, a: Rational, b: Rational) -> QuadElem {
        QuadElem {
            a,
            b,
            field: self.clone(),
        }
    }

    pub fn rational(&self, a: Rational) -> QuadElem {
        self.elem(a, Rational::zero())
    }

    pub fn integer(&self, n: impl Into<BigInt>) -> QuadElem {
        self.rational(Rational::from_integer(n.into()))
    }

    /// Parses `a/b + c/e*sqrt(n)`; see [`grammar`](self) for the accepted forms.
    pub fn parse(&self, text: &str) -> Result<QuadElem, ParseError> {
        grammar::parse_elem(text, self)
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d)
    }
}

/// `a + b*sqrt(d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    a: Rational,
    b: Rational,
    field: QuadField,
}

impl QuadElem {
    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn sqrt_part(&self) -> &Rational {
        &self.b
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    /// `true` when the element is `s*sqrt(d)` for rational `s` (zero included).
    pub fn is_pure_sqrt(&self) -> bool {
        self.a.is_zero()
    }

    /// The conjugation `sqrt(d) -> -sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: -&self.b,
            field: self.field.clone(),
        }
    }

    /// `a^2 - d b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - self.d_rat() * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// `(a^3 + 3ab^2 d) + (3a^2 b + b^3 d) sqrt(d)`.
    pub fn cube(&self) -> Self {
        let d = self.d_rat();
        let three = Rational::from_integer(BigInt::from(3));
        let a2 = &self.a * &self.a;
        let b2 = &self.b * &self.b;
        Self {
            a: &self.a * (&a2 + &three * &b2 * &d),
            b: &self.b * (&three * &a2 + &b2 * &d),
            field: self.field.clone(),
        }
    }

    pub fn inverse(&self) -> Result<Self, QuadError> {
        if self.is_zero() {
            return Err(QuadError::DivisionByZero);
        }
        // norm vanishes only at zero because d is not a square
        let norm = self.norm();
        Ok(Self {
            a: &self.a / &norm,
            b: -&self.b / &norm,
            field: self.field.clone(),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, QuadError> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            a: &self.a * factor,
            b: &self.b * factor,
            field: self.field.clone(),
        }
    }

    /// Membership in the ring of integers.
    pub fn is_integral(&self) -> bool {
        self.to_integral_form().is_some()
    }

    /// Coordinates on the integral basis, when the element is integral.
    pub fn to_integral_form(&self) -> Option<IntegralForm> {
        match self.field.integral_basis() {
            IntegralBasis::Sqrt => {
                if arith::is_integer(&self.a) && arith::is_integer(&self.b) {
                    Some(IntegralForm {
                        basis: IntegralBasis::Sqrt,
                        coords: (self.a.to_integer(), self.b.to_integer()),
                    })
                } else {
                    None
                }
            }
            IntegralBasis::Omega => {
                // a + b sqrt(d) = (a - b) + 2b (1 + sqrt(d))/2
                let s = &self.b + &self.b;
                let r = &self.a - &self.b;
                if arith::is_integer(&s) && arith::is_integer(&r) {
                    Some(IntegralForm {
                        basis: IntegralBasis::Omega,
                        coords: (r.to_integer(), s.to_integer()),
                    })
                } else {
                    None
                }
            }
        }
    }

    /// Least common multiple of the denominators of both components.
    pub fn denominator_lcm(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }

    fn d_rat(&self) -> Rational {
        Rational::from_integer(self.field.d.clone())
    }

    fn assert_same_field(&self, other: &Self) {
        assert!(
            self.field == other.field,
            "{}",
            QuadError::FieldMismatch(self.field.d.clone(), other.field.d.clone())
        );
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        grammar::write_elem(f, self)
    }
}

impl<'a> Add<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;

    fn add(self, rhs: &QuadElem) -> QuadElem {
        self.assert_same_field(rhs);
        QuadElem {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            field: self.field.clone(),
        }
    }
}

impl<'a> Sub<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;

    fn sub(self, rhs: &QuadElem) -> QuadElem {
        self.assert_same_field(rhs);
        QuadElem {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            field: self.field.clone(),
        }
    }
}

impl<'a> Mul<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;

    fn mul(self, rhs: &QuadElem) -> QuadElem {
        self.assert_same_field(rhs);
        QuadElem {
            a: &self.a * &rhs.a + self.d_rat() * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            field: self.field.clone(),
        }
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;

    fn neg(self) -> QuadElem {
        QuadElem {
            a: -&self.a,
            b: -&self.b,
            field: self.field.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &QuadElem) -> QuadElem {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for QuadElem {
    type Output = QuadElem;

    fn neg(self) -> QuadElem {
        -&self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegralBasis {
    /// `<1, sqrt(d)>`, used when `d = 2, 3 mod 4`.
    Sqrt,
    /// `<1, (1 + sqrt(d))/2>`, used when `d = 1 mod 4`.
    Omega,
}

/// Integer coordinates `(r, s)` of an algebraic integer on the integral basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralForm {
    pub basis: IntegralBasis,
    pub coords: (BigInt, BigInt),
}

impl IntegralForm {
    pub fn to_elem(&self, field: &QuadField) -> QuadElem {
        let r = Rational::from_integer(self.coords.0.clone());
        let s = Rational::from_integer(self.coords.1.clone());
        match self.basis {
            IntegralBasis::Sqrt => field.elem(r, s),
            IntegralBasis::Omega => {
                let half = Rational::new(BigInt::one(), BigInt::from(2));
                field.elem(r + &s * &half, s * half)
            }
        }
    }
}

/// Evaluates `x^3 + y^3 - k z^3`.
pub fn fermat_defect(x: &QuadElem, y: &QuadElem, z: &QuadElem, k: &BigInt) -> QuadElem {
    let k = x.field().integer(k.clone());
    &(&x.cube() + &y.cube()) - &(&k * &z.cube())
}

pub fn satisfies_fermat(x: &QuadElem, y: &QuadElem, z: &QuadElem, k: &BigInt) -> bool {
    fermat_defect(x, y, z, k).is_zero()
}

/// Scales a solution of `x^3 + y^3 = k z^3` by the lcm of all six component
/// denominators, so every coordinate lands in the ring of integers.
///
/// Returns the scale together with the rescaled triple.
pub fn clear_denominators(
    x: &QuadElem,
    y: &QuadElem,
    z: &QuadElem,
    k: &BigInt,
) -> Result<(BigInt, [QuadElem; 3]), QuadError> {
    x.assert_same_field(y);
    x.assert_same_field(z);
    if *k <= BigInt::zero() {
        return Err(QuadError::InvalidK(k.clone()));
    }
    if x.is_zero() && y.is_zero() && z.is_zero() {
        return Err(QuadError::AllZero);
    }
    if !satisfies_fermat(x, y, z, k) {
        return Err(QuadError::NotOnVariety);
    }
    let scale = [x, y, z]
        .iter()
        .fold(BigInt::one(), |acc, e| acc.lcm(&e.denominator_lcm()));
    let factor = Rational::from_integer(scale.clone());
    let scaled = [x.scale(&factor), y.scale(&factor), z.scale(&factor)];
    debug_assert!(scaled.iter().all(QuadElem::is_integral));
    Ok((scale, scaled))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn field(d: i64) -> QuadField {
        QuadField::from_i64(d).unwrap()
    }

    /// Independent cube oracle: expand (a + b t)^3 as a polynomial in t and
    /// reduce t^2 = d, t^3 = d t.
    fn cube_by_expansion(a: &Rational, b: &Rational, d: i64) -> (Rational, Rational) {
        let d = qi(d);
        let c0 = a * a * a;
        let c1 = qi(3) * a * a * b;
        let c2 = qi(3) * a * b * b;
        let c3 = b * b * b;
        (c0 + c2 * &d, c1 + c3 * d)
    }

    #[test]
    fn field_construction_normalizes() {
        assert_eq!(field(12).d(), &BigInt::from(3));
        assert_eq!(field(-50).d(), &BigInt::from(-2));
        assert!(matches!(QuadField::from_i64(0), Err(QuadError::DegenerateField(_))));
        assert!(matches!(QuadField::from_i64(1), Err(QuadError::DegenerateField(_))));
        assert!(matches!(QuadField::from_i64(4), Err(QuadError::DegenerateField(_))));
        assert_eq!(field(5).integral_basis(), IntegralBasis::Omega);
        assert_eq!(field(-3).integral_basis(), IntegralBasis::Omega);
        assert_eq!(field(-1).integral_basis(), IntegralBasis::Sqrt);
        assert_eq!(field(2).integral_basis(), IntegralBasis::Sqrt);
    }

    #[test]
    fn conjugate_examples() {
        let k = field(2);
        assert_eq!(
            k.elem(qi(14), qi(34)).conjugate(),
            k.elem(qi(14), qi(-34))
        );
        let k3 = field(3);
        assert_eq!(k3.integer(5).conjugate(), k3.integer(5));
        let ki = field(-1);
        assert_eq!(ki.sqrt_d().conjugate(), -ki.sqrt_d());
    }

    #[test]
    fn cube_examples() {
        let k = field(2);
        let e = k.elem(qi(18), qi(17));
        let (a, b) = cube_by_expansion(&qi(18), &qi(17), 2);
        assert_eq!((a.clone(), b.clone()), (qi(37044), qi(26350)));
        assert_eq!(e.cube(), k.elem(a, b));
        assert_eq!(e.cube(), &e.square() * &e);
        assert_eq!(k.one().cube(), k.one());
        // 2a(a^2 + 6b^2) with a = 18, b = 17
        let sum = &e.cube() + &e.conjugate().cube();
        assert_eq!(sum, k.integer(74088));
        assert_eq!(qi(42) * qi(42) * qi(42), qi(74088));
    }

    #[test]
    fn inverse_and_division() {
        let k = field(7);
        let e = k.elem(q(3, 2), q(-5, 7));
        let inv = e.inverse().unwrap();
        assert_eq!(&e * &inv, k.one());
        assert_eq!(k.zero().inverse(), Err(QuadError::DivisionByZero));
        assert_eq!(e.checked_div(&e).unwrap(), k.one());
    }

    #[test]
    fn integrality_examples() {
        let k5 = field(5);
        let e = k5.elem(q(1, 2), q(3, 2));
        let form = e.to_integral_form().unwrap();
        assert_eq!(form.basis, IntegralBasis::Omega);
        assert_eq!(form.coords, (BigInt::from(-1), BigInt::from(3)));
        assert_eq!(form.to_elem(&k5), e);

        assert!(!field(2).elem(q(1, 2), qi(1)).is_integral());
        assert!(!k5.rational(q(1, 3)).is_integral());
        // half-integers are fine only together with d = 1 mod 4
        assert!(!field(-1).elem(q(1, 2), q(1, 2)).is_integral());
        assert!(field(-3).elem(q(1, 2), q(1, 2)).is_integral());
        assert!(!k5.elem(q(1, 2), qi(1)).is_integral());
    }

    #[test]
    fn clear_denominators_golden() {
        let k = field(2);
        let x = k.elem(qi(3), q(17, 6));
        let y = k.elem(qi(3), q(-17, 6));
        let z = k.integer(7);
        let one = BigInt::one();
        let (scale, [cx, cy, cz]) = clear_denominators(&x, &y, &z, &one).unwrap();
        assert_eq!(scale, BigInt::from(6));
        assert_eq!(cx, k.elem(qi(18), qi(17)));
        assert_eq!(cy, k.elem(qi(18), qi(-17)));
        assert_eq!(cz, k.integer(42));
        assert!(satisfies_fermat(&cx, &cy, &cz, &one));
    }

    #[test]
    fn clear_denominators_integral_is_identity() {
        let k = field(2);
        let x = k.elem(qi(18), qi(17));
        let y = k.elem(qi(18), qi(-17));
        let z = k.integer(42);
        let (scale, out) = clear_denominators(&x, &y, &z, &BigInt::one()).unwrap();
        assert!(scale.is_one());
        assert_eq!(out, [x, y, z]);
    }

    #[test]
    fn clear_denominators_errors() {
        let k = field(2);
        let one = BigInt::one();
        assert_eq!(
            clear_denominators(&k.integer(1), &k.integer(1), &k.integer(1), &one),
            Err(QuadError::NotOnVariety)
        );
        assert_eq!(
            clear_denominators(&k.zero(), &k.zero(), &k.zero(), &one),
            Err(QuadError::AllZero)
        );
        assert_eq!(
            clear_denominators(&k.integer(1), &k.integer(1), &k.integer(1), &BigInt::zero()),
            Err(QuadError::InvalidK(BigInt::zero()))
        );
    }

    #[test]
    #[should_panic(expected = "different fields")]
    fn mixed_fields_panic() {
        let _ = &field(2).one() + &field(3).one();
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn rational() -> impl Strategy<Value = Rational> {
            (-500i64..500, 1i64..40).prop_map(|(n, d)| q(n, d))
        }

        fn d_value() -> impl Strategy<Value = i64> {
            prop_oneof![Just(-7i64), Just(-3), Just(-1), Just(2), Just(3), Just(5), Just(6), Just(13)]
        }

        proptest! {
            #[test]
            fn conjugation_is_automorphism(d in d_value(), a in rational(), b in rational(), c in rational(), e in rational()) {
                let k = field(d);
                let u = k.elem(a, b);
                let v = k.elem(c, e);
                prop_assert_eq!((&u * &v).conjugate(), &u.conjugate() * &v.conjugate());
                prop_assert_eq!((&u + &v).conjugate(), &u.conjugate() + &v.conjugate());
                prop_assert_eq!(u.conjugate().conjugate(), u);
            }

            #[test]
            fn inverse_is_two_sided(d in d_value(), a in rational(), b in rational()) {
                let k = field(d);
                let u = k.elem(a, b);
                prop_assume!(!u.is_zero());
                let inv = u.inverse().unwrap();
                prop_assert_eq!(&u * &inv, k.one());
                prop_assert_eq!(&inv * &u, k.one());
            }

            #[test]
            fn cube_matches_expansion(d in d_value(), a in rational(), b in rational()) {
                let k = field(d);
                let (ca, cb) = cube_by_expansion(&a, &b, d);
                prop_assert_eq!(k.elem(a, b).cube(), k.elem(ca, cb));
            }

            #[test]
            fn omega_form_round_trips(d in prop_oneof![Just(-3i64), Just(5), Just(-7), Just(13), Just(17)], r in -1000i64..1000, s in -1000i64..1000) {
                let k = field(d);
                let form = IntegralForm { basis: IntegralBasis::Omega, coords: (BigInt::from(r), BigInt::from(s)) };
                let e = form.to_elem(&k);
                prop_assert!(e.is_integral());
                prop_assert_eq!(e.to_integral_form().unwrap(), form);
            }
        }
    }
}
