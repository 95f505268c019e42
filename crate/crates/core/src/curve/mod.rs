//! Mordell curves `y^2 = x^3 + D` over `Q` or over a quadratic field.
//!
//! The group law is written once against [`Coordinate`], so the same chord
//! and tangent formulas serve rational points and points over `Q(sqrt(d))`.

mod torsion;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{self, Rational};
use crate::quad::{QuadElem, QuadField};

pub use torsion::{
    rational_torsion_points, three_torsion_check, torsion_of_d, torsion_of_dk,
    torsion_points_enumerate, TorsionGroup,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("D must be nonzero")]
    ZeroCoefficient,
    #[error("point lies over {point} but the curve is defined over {curve}")]
    FieldMismatch { point: BaseField, curve: BaseField },
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error("isomorphism scale must be nonzero")]
    ZeroScale,
    #[error("{coefficient} / ({scale})^6 is not an integer")]
    NonIntegralImage { coefficient: BigInt, scale: Rational },
    #[error("{0} is not sixth-power-free")]
    NotSixthPowerFree(BigInt),
    #[error("d = {0} is not a nonzero squarefree integer")]
    InvalidD(BigInt),
    #[error("k = {0} is not a positive cubefree integer")]
    InvalidK(BigInt),
}

/// Where a curve or a point lives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseField {
    Rationals,
    Quadratic(QuadField),
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rationals => f.write_str("Q"),
            BaseField::Quadratic(k) => write!(f, "{k}"),
        }
    }
}

/// Field operations the group law needs. `*_like` constructors borrow the
/// field context from an existing element.
pub trait Coordinate: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn base(&self) -> BaseField;
    fn integer_like(&self, n: BigInt) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;

    fn square(&self) -> Self {
        self.mul(self)
    }

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inverse().map(|inv| self.mul(&inv))
    }

    fn scale_by(&self, factor: &Rational) -> Self;
}

impl Coordinate for Rational {
    fn base(&self) -> BaseField {
        BaseField::Rationals
    }

    fn integer_like(&self, n: BigInt) -> Self {
        Rational::from_integer(n)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn scale_by(&self, factor: &Rational) -> Self {
        self * factor
    }
}

impl Coordinate for QuadElem {
    fn base(&self) -> BaseField {
        BaseField::Quadratic(self.field().clone())
    }

    fn integer_like(&self, n: BigInt) -> Self {
        self.field().integer(n)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn inverse(&self) -> Option<Self> {
        QuadElem::inverse(self).ok()
    }

    fn is_zero(&self) -> bool {
        QuadElem::is_zero(self)
    }

    fn scale_by(&self, factor: &Rational) -> Self {
        self.scale(factor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CurvePoint<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F> CurvePoint<F> {
    pub fn affine(x: F, y: F) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn coords(&self) -> Option<(&F, &F)> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, y } => Some((x, y)),
        }
    }
}

impl<F: Coordinate> CurvePoint<F> {
    pub fn negate(&self) -> Self {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), y.neg()),
        }
    }
}

impl CurvePoint<Rational> {
    /// The same point viewed over `field`.
    pub fn embed(&self, field: &QuadField) -> CurvePoint<QuadElem> {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                CurvePoint::affine(field.rational(x.clone()), field.rational(y.clone()))
            }
        }
    }
}

impl CurvePoint<QuadElem> {
    /// Applies the conjugation to both coordinates.
    pub fn conjugate(&self) -> Self {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.conjugate(), y.conjugate()),
        }
    }

    /// `Some` when both coordinates are rational.
    pub fn to_rational(&self) -> Option<CurvePoint<Rational>> {
        match self {
            CurvePoint::Infinity => Some(CurvePoint::Infinity),
            CurvePoint::Affine { x, y } => Some(CurvePoint::affine(
                x.as_rational()?.clone(),
                y.as_rational()?.clone(),
            )),
        }
    }
}

impl<F: fmt::Display> fmt::Display for CurvePoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => f.write_str("infinity"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

/// `y^2 = x^3 + D`; `D` need not be sixth-power-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MordellCurve {
    coefficient: BigInt,
    base: BaseField,
}

impl MordellCurve {
    pub fn new(coefficient: BigInt, base: BaseField) -> Result<Self, CurveError> {
        if coefficient.is_zero() {
            return Err(CurveError::ZeroCoefficient);
        }
        Ok(Self { coefficient, base })
    }

    pub fn over_q(coefficient: impl Into<BigInt>) -> Result<Self, CurveError> {
        Self::new(coefficient.into(), BaseField::Rationals)
    }

    pub fn over_k(coefficient: impl Into<BigInt>, field: &QuadField) -> Result<Self, CurveError> {
        Self::new(coefficient.into(), BaseField::Quadratic(field.clone()))
    }

    /// `E_{-432 d^3 k^2}` over `Q`.
    pub fn fermat_q_curve(d: &BigInt, k: &BigInt) -> Result<Self, CurveError> {
        Self::over_q(BigInt::from(-432) * d.pow(3) * k.pow(2))
    }

    /// `E_{-432 k^2}` over `K`.
    pub fn fermat_k_curve(field: &QuadField, k: &BigInt) -> Result<Self, CurveError> {
        Self::over_k(BigInt::from(-432) * k.pow(2), field)
    }

    pub fn coefficient(&self) -> &BigInt {
        &self.coefficient
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    /// `-432 D^2`, never zero.
    pub fn discriminant(&self) -> BigInt {
        BigInt::from(-432) * &self.coefficient * &self.coefficient
    }

    /// The same curve over a different base.
    pub fn with_base(&self, base: BaseField) -> Self {
        Self {
            coefficient: self.coefficient.clone(),
            base,
        }
    }

    /// The sixth-power-free model `D` with `A = D b^6`.
    pub fn sixth_free_model(&self) -> (Self, BigInt) {
        let (d, b) = sixth_free_model(&self.coefficient).expect("coefficient is nonzero");
        (self.clone().with_coefficient(d), b)
    }

    fn with_coefficient(mut self, coefficient: BigInt) -> Self {
        self.coefficient = coefficient;
        self
    }

    fn check_base<F: Coordinate>(&self, p: &CurvePoint<F>) -> Result<(), CurveError> {
        if let CurvePoint::Affine { x, y } = p {
            for c in [x, y] {
                let base = c.base();
                if base != self.base {
                    return Err(CurveError::FieldMismatch {
                        point: base,
                        curve: self.base.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Exact membership test. Errors when the coordinates live over another field.
    pub fn contains<F: Coordinate>(&self, p: &CurvePoint<F>) -> Result<bool, CurveError> {
        self.check_base(p)?;
        Ok(match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => self.equation_holds(x, y),
        })
    }

    fn equation_holds<F: Coordinate>(&self, x: &F, y: &F) -> bool {
        let rhs = x.square().mul(x).add(&x.integer_like(self.coefficient.clone()));
        y.square() == rhs
    }

    fn require_on_curve<F: Coordinate>(&self, p: &CurvePoint<F>) -> Result<(), CurveError> {
        if self.contains(p)? {
            Ok(())
        } else {
            Err(CurveError::NotOnCurve(p.to_string()))
        }
    }

    pub fn point<F: Coordinate>(&self, x: F, y: F) -> Result<CurvePoint<F>, CurveError> {
        let p = CurvePoint::affine(x, y);
        self.require_on_curve(&p)?;
        Ok(p)
    }

    pub fn negate<F: Coordinate>(&self, p: &CurvePoint<F>) -> Result<CurvePoint<F>, CurveError> {
        self.require_on_curve(p)?;
        Ok(p.negate())
    }

    pub fn add<F: Coordinate>(
        &self,
        p: &CurvePoint<F>,
        q: &CurvePoint<F>,
    ) -> Result<CurvePoint<F>, CurveError> {
        self.require_on_curve(p)?;
        self.require_on_curve(q)?;
        Ok(add_unchecked(p, q))
    }

    pub fn sub<F: Coordinate>(
        &self,
        p: &CurvePoint<F>,
        q: &CurvePoint<F>,
    ) -> Result<CurvePoint<F>, CurveError> {
        self.add(p, &q.negate())
    }

    pub fn double<F: Coordinate>(&self, p: &CurvePoint<F>) -> Result<CurvePoint<F>, CurveError> {
        self.add(p, p)
    }

    /// `n * P`, negative `n` included.
    pub fn scalar_mul<F: Coordinate>(
        &self,
        n: &BigInt,
        p: &CurvePoint<F>,
    ) -> Result<CurvePoint<F>, CurveError> {
        self.require_on_curve(p)?;
        let base = if n.is_negative() { p.negate() } else { p.clone() };
        let magnitude = n.magnitude();
        let mut acc = CurvePoint::Infinity;
        for i in (0..magnitude.bits()).rev() {
            acc = add_unchecked(&acc, &acc);
            if magnitude.bit(i) {
                acc = add_unchecked(&acc, &base);
            }
        }
        Ok(acc)
    }

    /// Smallest `n <= bound` with `n P = infinity`.
    pub fn order_up_to<F: Coordinate>(
        &self,
        p: &CurvePoint<F>,
        bound: u32,
    ) -> Result<Option<u32>, CurveError> {
        self.require_on_curve(p)?;
        let mut acc = p.clone();
        for n in 1..=bound {
            if acc.is_infinity() {
                return Ok(Some(n));
            }
            acc = add_unchecked(&acc, p);
        }
        Ok(None)
    }

    /// The isomorphism `(x, y) -> (x / b^2, y / b^3)` onto `E_{D / b^6}`.
    ///
    /// `b` may be any nonzero rational as long as the image coefficient is an
    /// integer, so the inverse map is `iso_phi` with `1/b`.
    pub fn iso_phi<F: Coordinate>(
        &self,
        p: &CurvePoint<F>,
        b: &Rational,
    ) -> Result<(MordellCurve, CurvePoint<F>), CurveError> {
        let target = self.isomorphic_curve(b)?;
        self.require_on_curve(p)?;
        let image = match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let inv = b.recip();
                let inv2 = &inv * &inv;
                let inv3 = &inv2 * &inv;
                CurvePoint::affine(x.scale_by(&inv2), y.scale_by(&inv3))
            }
        };
        Ok((target, image))
    }

    /// `E_{D / b^6}`.
    pub fn isomorphic_curve(&self, b: &Rational) -> Result<MordellCurve, CurveError> {
        if Zero::is_zero(b) {
            return Err(CurveError::ZeroScale);
        }
        let image = Rational::from_integer(self.coefficient.clone()) / arith::rational_pow(b, 6);
        if !arith::is_integer(&image) {
            return Err(CurveError::NonIntegralImage {
                coefficient: self.coefficient.clone(),
                scale: b.clone(),
            });
        }
        Ok(self.clone().with_coefficient(image.to_integer()))
    }
}

impl fmt::Display for MordellCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.coefficient;
        if d.is_negative() {
            write!(f, "y^2 = x^3 - {} over {}", d.magnitude(), self.base)
        } else {
            write!(f, "y^2 = x^3 + {d} over {}", self.base)
        }
    }
}

/// Chord-and-tangent addition without membership checks.
pub(crate) fn add_unchecked<F: Coordinate>(p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
    let ((x1, y1), (x2, y2)) = match (p, q) {
        (CurvePoint::Infinity, _) => return q.clone(),
        (_, CurvePoint::Infinity) => return p.clone(),
        (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
            ((x1, y1), (x2, y2))
        }
    };
    let slope = if x1 == x2 {
        if y1.add(y2).is_zero() {
            // vertical chord, or tangent at a 2-torsion point
            return CurvePoint::Infinity;
        }
        // tangent: 3x^2 / 2y (no x term in the Weierstrass equation)
        let numerator = x1.square().mul(&x1.integer_like(BigInt::from(3)));
        let denominator = y1.mul(&y1.integer_like(BigInt::from(2)));
        numerator.div(&denominator).expect("y != 0 on the tangent branch")
    } else {
        y2.sub(y1)
            .div(&x2.sub(x1))
            .expect("x1 != x2 on the chord branch")
    };
    let x3 = slope.square().sub(x1).sub(x2);
    let y3 = slope.mul(&x1.sub(&x3)).sub(y1);
    CurvePoint::affine(x3, y3)
}

/// `A = D b^6` with `D` sixth-power-free and `b >= 1`.
pub fn sixth_free_model(a: &BigInt) -> Result<(BigInt, BigInt), CurveError> {
    arith::powerfree_decompose(a, 6).map_err(|_| CurveError::ZeroCoefficient)
}

/// `true` if `D` is sixth-power-free.
pub fn is_sixth_free(d: &BigInt) -> bool {
    sixth_free_model(d).is_ok_and(|(_, b)| b.is_one())
}
