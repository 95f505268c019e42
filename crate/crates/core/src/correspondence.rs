//! Maps between solutions of `x^3 + y^3 = k z^3` over `K = Q(sqrt(d))`,
//! `K`-points on `y^2 = x^3 - 432 k^2`, and `Q`-points on
//! `y^2 = x^3 - 432 d^3 k^2`.
//!
//! ```text
//!   (x, y, z)  --solution_to_kpoint-->  (12kz/(x+y), 36k(x-y)/(x+y))
//!   (X, Y)     --kpoint_to_solution-->  (Y + 36k, 36k - Y, 6X)
//!   (r, s√d)   --kpoint_to_qpoint---->  (rd, sd^2)
//!   (X, Y)     --qpoint_to_kpoint---->  (X/d, (Y/d^2)√d)
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, Rational};
use crate::curve::{CurveError, CurvePoint, MordellCurve};
use crate::quad::{self, QuadElem, QuadError, QuadField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrespondenceError {
    #[error("triple does not satisfy x^3 + y^3 = {0} z^3")]
    NotOnVariety(BigInt),
    #[error("k = {0} is not a positive cubefree integer")]
    InvalidK(BigInt),
    #[error("x + y = 0: the solution has no image on the curve")]
    SumZero,
    #[error("x y = 0 with x + y != 0 is impossible for cubefree k = {0} != 1")]
    ProductZeroWithNontrivialK(BigInt),
    #[error("the point at infinity has no preimage")]
    PointAtInfinity,
    #[error("d = {0} is excluded from the point-to-solution map")]
    ExcludedD(BigInt),
    #[error("point {0} does not have the shape (r, s*sqrt(d)) after P - sigma(P)")]
    UnexpectedShape(String),
    #[error("solution built from {0} is trivial, contradicting d not in {{1, -3}}")]
    UnexpectedTrivial(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// A solution of `x^3 + y^3 = k z^3` over a quadratic field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatSolution {
    x: QuadElem,
    y: QuadElem,
    z: QuadElem,
    k: BigInt,
}

impl FermatSolution {
    pub fn new(x: QuadElem, y: QuadElem, z: QuadElem, k: BigInt) -> Result<Self, CorrespondenceError> {
        if k <= BigInt::zero() || !arith::is_cubefree(&k) {
            return Err(CorrespondenceError::InvalidK(k));
        }
        for other in [&y, &z] {
            if other.field() != x.field() {
                return Err(QuadError::FieldMismatch(x.field().d().clone(), other.field().d().clone()).into());
            }
        }
        if !quad::satisfies_fermat(&x, &y, &z, &k) {
            return Err(CorrespondenceError::NotOnVariety(k));
        }
        Ok(Self { x, y, z, k })
    }

    pub fn x(&self) -> &QuadElem {
        &self.x
    }

    pub fn y(&self) -> &QuadElem {
        &self.y
    }

    pub fn z(&self) -> &QuadElem {
        &self.z
    }

    pub fn k(&self) -> &BigInt {
        &self.k
    }

    pub fn field(&self) -> &QuadField {
        self.x.field()
    }

    pub fn coordinates(&self) -> [&QuadElem; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Same solution scaled into the ring of integers.
    pub fn clear_denominators(&self) -> Result<(BigInt, FermatSolution), CorrespondenceError> {
        let (scale, [x, y, z]) = quad::clear_denominators(&self.x, &self.y, &self.z, &self.k)?;
        Ok((scale, FermatSolution::new(x, y, z, self.k.clone())?))
    }

    pub fn is_integral(&self) -> bool {
        self.coordinates().iter().all(|c| c.is_integral())
    }
}

impl fmt::Display for FermatSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TrivialityClass {
    /// `x + y = 0`.
    SumZero,
    /// `x y = 0` with `x + y != 0`; only possible for `k = 1`.
    ProductZero,
    Nontrivial,
}

impl TrivialityClass {
    pub fn is_trivial(self) -> bool {
        self != TrivialityClass::Nontrivial
    }
}

impl fmt::Display for TrivialityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrivialityClass::SumZero => "SumZero",
            TrivialityClass::ProductZero => "ProductZero",
            TrivialityClass::Nontrivial => "Nontrivial",
        })
    }
}

pub fn classify_solution(s: &FermatSolution) -> Result<TrivialityClass, CorrespondenceError> {
    if (&s.x + &s.y).is_zero() {
        return Ok(TrivialityClass::SumZero);
    }
    if s.x.is_zero() || s.y.is_zero() {
        if !s.k.is_one() {
            return Err(CorrespondenceError::ProductZeroWithNontrivialK(s.k.clone()));
        }
        return Ok(TrivialityClass::ProductZero);
    }
    Ok(TrivialityClass::Nontrivial)
}

/// `(12kz/(x+y), 36k(x-y)/(x+y))` on `y^2 = x^3 - 432k^2` over `K`.
pub fn solution_to_kpoint(s: &FermatSolution) -> Result<CurvePoint<QuadElem>, CorrespondenceError> {
    let sum = &s.x + &s.y;
    let inv = sum.inverse().map_err(|_| CorrespondenceError::SumZero)?;
    let field = s.field();
    let k = Rational::from_integer(s.k.clone());
    let x = (&s.z * &inv).scale(&(Rational::from_integer(BigInt::from(12)) * &k));
    let y = (&(&s.x - &s.y) * &inv).scale(&(Rational::from_integer(BigInt::from(36)) * &k));
    let curve = MordellCurve::fermat_k_curve(field, &s.k)?;
    Ok(curve.point(x, y)?)
}

/// `(Y + 36k, 36k - Y, 6X)` for an affine point `(X, Y)` on `y^2 = x^3 - 432k^2`.
pub fn kpoint_to_solution(p: &CurvePoint<QuadElem>, k: &BigInt) -> Result<FermatSolution, CorrespondenceError> {
    let (x, y) = p.coords().ok_or(CorrespondenceError::PointAtInfinity)?;
    if *k <= BigInt::zero() || !arith::is_cubefree(k) {
        return Err(CorrespondenceError::InvalidK(k.clone()));
    }
    let curve = MordellCurve::fermat_k_curve(x.field(), k)?;
    if !curve.contains(p)? {
        return Err(CurveError::NotOnCurve(p.to_string()).into());
    }
    let field = x.field();
    let shift = field.integer(BigInt::from(36) * k);
    FermatSolution::new(
        y + &shift,
        &shift - y,
        x.scale(&Rational::from_integer(BigInt::from(6))),
        k.clone(),
    )
}

/// Outcome of pushing a `K`-point down to `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QPointImage {
    /// A point on `y^2 = x^3 - 432 d^3 k^2` over `Q`.
    Point(CurvePoint<Rational>),
    /// `P` is fixed by conjugation, so `P - sigma(P)` is the point at
    /// infinity and no image is produced. Carries `P` itself.
    SigmaInvariant(CurvePoint<Rational>),
}

/// Sends `(r, s√d)` to `(rd, sd^2)`. Points of any other shape are first
/// replaced by `P - sigma(P)`, which always has that shape.
pub fn kpoint_to_qpoint(p: &CurvePoint<QuadElem>, k: &BigInt) -> Result<QPointImage, CorrespondenceError> {
    let (x, _) = p.coords().ok_or(CorrespondenceError::PointAtInfinity)?;
    let field = x.field().clone();
    let k_curve = MordellCurve::fermat_k_curve(&field, k)?;
    if !k_curve.contains(p)? {
        return Err(CurveError::NotOnCurve(p.to_string()).into());
    }

    let anti_invariant = if has_anti_invariant_shape(p) {
        p.clone()
    } else {
        let q = k_curve.sub(p, &p.conjugate())?;
        if q.is_infinity() {
            let rational = p.to_rational().expect("sigma-invariant points are rational");
            return Ok(QPointImage::SigmaInvariant(rational));
        }
        if !has_anti_invariant_shape(&q) {
            return Err(CorrespondenceError::UnexpectedShape(q.to_string()));
        }
        q
    };

    let (x, y) = anti_invariant.coords().expect("affine");
    let d = Rational::from_integer(field.d().clone());
    let qx = x.rational_part() * &d;
    let qy = y.sqrt_part() * &d * &d;
    let q_curve = MordellCurve::fermat_q_curve(field.d(), k)?;
    Ok(QPointImage::Point(q_curve.point(qx, qy)?))
}

fn has_anti_invariant_shape(p: &CurvePoint<QuadElem>) -> bool {
    p.coords()
        .is_some_and(|(x, y)| x.is_rational() && y.is_pure_sqrt())
}

/// `(X/d, (Y/d^2)√d)` on `y^2 = x^3 - 432k^2` over `Q(√d)`.
pub fn qpoint_to_kpoint(
    p: &CurvePoint<Rational>,
    field: &QuadField,
    k: &BigInt,
) -> Result<CurvePoint<QuadElem>, CorrespondenceError> {
    let (x, y) = p.coords().ok_or(CorrespondenceError::PointAtInfinity)?;
    let q_curve = MordellCurve::fermat_q_curve(field.d(), k)?;
    if !q_curve.contains(p)? {
        return Err(CurveError::NotOnCurve(p.to_string()).into());
    }
    let d = Rational::from_integer(field.d().clone());
    let kx = field.rational(x / &d);
    let ky = field.elem(Rational::zero(), y / (&d * &d));
    let k_curve = MordellCurve::fermat_k_curve(field, k)?;
    Ok(k_curve.point(kx, ky)?)
}

/// `(36k + (Y/d^2)√d, 36k - (Y/d^2)√d, 6X/d)`, which is always nontrivial
/// once `d` is not `1` or `-3`; that is re-checked here.
pub fn qpoint_to_solution(
    p: &CurvePoint<Rational>,
    field: &QuadField,
    k: &BigInt,
) -> Result<FermatSolution, CorrespondenceError> {
    if *field.d() == BigInt::from(-3) {
        return Err(CorrespondenceError::ExcludedD(field.d().clone()));
    }
    let solution = qpoint_to_kpoint(p, field, k).and_then(|kp| kpoint_to_solution(&kp, k))?;
    match classify_solution(&solution)? {
        TrivialityClass::Nontrivial => Ok(solution),
        _ => Err(CorrespondenceError::UnexpectedTrivial(p.to_string())),
    }
}
