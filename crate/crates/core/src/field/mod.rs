//! Exact coefficient fields with a derivation: the rationals (where the
//! derivation is zero) and rational functions in one indeterminate `t`
//! (where it is d/dt).

mod upoly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use upoly::UPoly;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldTag {
    Rationals,
    RationalFunctionsInT,
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rationals => write!(f, "Q"),
            FieldTag::RationalFunctionsInT => write!(f, "Q(t)"),
        }
    }
}

/// A rational function `num/den` in `t`, with `den` monic and coprime to `num`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFun {
    num: UPoly,
    den: UPoly,
}

impl RatFun {
    /// Canonicalizes; errors when `den` is zero.
    pub fn new(num: UPoly, den: UPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lead = den.leading().expect("nonzero").clone();
        if !lead.is_one() {
            let inv = lead.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RatFun { num, den })
    }

    pub fn zero() -> Self {
        RatFun {
            num: UPoly::zero(),
            den: UPoly::one(),
        }
    }

    pub fn from_poly(p: UPoly) -> Self {
        RatFun {
            num: p,
            den: UPoly::one(),
        }
    }

    pub fn numer(&self) -> &UPoly {
        &self.num
    }

    pub fn denom(&self) -> &UPoly {
        &self.den
    }

    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone()).expect("nonzero den");
        }
        Self::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
        .expect("nonzero den")
    }

    fn mul(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return Self::zero();
        }
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero den")
    }

    fn neg(&self) -> Self {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Quotient rule: (p/q)' = (p'q - pq')/q².
    fn derive(&self) -> Self {
        let n = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        Self::new(n, self.den.mul(&self.den)).expect("nonzero den")
    }
}

/// An element of the coefficient field. All elements taking part in one
/// computation carry the same [`FieldTag`].
///
/// The operator impls panic on a tag mismatch; use [`field_arith`] for the
/// checked form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Rational(BigRational),
    Function(RatFun),
}

impl FieldElement {
    pub fn zero(tag: FieldTag) -> Self {
        match tag {
            FieldTag::Rationals => FieldElement::Rational(BigRational::zero()),
            FieldTag::RationalFunctionsInT => FieldElement::Function(RatFun::zero()),
        }
    }

    pub fn one(tag: FieldTag) -> Self {
        Self::from_rational(tag, BigRational::one())
    }

    pub fn from_int(tag: FieldTag, n: i64) -> Self {
        Self::from_rational(tag, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(tag: FieldTag, c: BigRational) -> Self {
        match tag {
            FieldTag::Rationals => FieldElement::Rational(c),
            FieldTag::RationalFunctionsInT => {
                FieldElement::Function(RatFun::from_poly(UPoly::constant(c)))
            }
        }
    }

    /// `n/d` over the rationals; errors when `d` is zero.
    pub fn ratio(tag: FieldTag, n: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_rational(
            tag,
            BigRational::new(BigInt::from(n), BigInt::from(d)),
        ))
    }

    /// The indeterminate `t` of Q(t).
    pub fn t() -> Self {
        FieldElement::Function(RatFun::from_poly(UPoly::t()))
    }

    pub fn tag(&self) -> FieldTag {
        match self {
            FieldElement::Rational(_) => FieldTag::Rationals,
            FieldElement::Function(_) => FieldTag::RationalFunctionsInT,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(c) => c.is_zero(),
            FieldElement::Function(f) => f.num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(c) => c.is_one(),
            FieldElement::Function(f) => f.num.is_one() && f.den.is_one(),
        }
    }

    /// The value as a rational number, when it is a constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            FieldElement::Rational(c) => Some(c.clone()),
            FieldElement::Function(f) if f.den.is_one() => f.num.as_constant(),
            FieldElement::Function(_) => None,
        }
    }

    /// Sign used when printing: the sign of the leading numerator coefficient.
    pub fn is_negative(&self) -> bool {
        match self {
            FieldElement::Rational(c) => c.is_negative(),
            FieldElement::Function(f) => f.num.leading().is_some_and(|l| l.is_negative()),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.tag() == other.tag() {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.tag(), other.tag()))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a + b),
            (FieldElement::Function(a), FieldElement::Function(b)) => FieldElement::Function(a.add(b)),
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a * b),
            (FieldElement::Function(a), FieldElement::Function(b)) => FieldElement::Function(a.mul(b)),
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Self> {
        match self {
            FieldElement::Rational(c) if c.is_zero() => Err(Error::DivisionByZero),
            FieldElement::Rational(c) => Ok(FieldElement::Rational(c.recip())),
            FieldElement::Function(f) => f.inv().map(FieldElement::Function),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.tag());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Whether the printed form must be parenthesized when followed by `*`.
    pub(crate) fn needs_parens(&self) -> bool {
        match self {
            FieldElement::Rational(_) => false,
            FieldElement::Function(f) => !f.den.is_one() || f.num.is_compound(),
        }
    }
}

/// Field operation selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked arithmetic: errors on a tag mismatch or division by zero.
pub fn field_arith(a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement> {
    match op {
        FieldOp::Add => a.try_add(b),
        FieldOp::Sub => a.try_sub(b),
        FieldOp::Mul => a.try_mul(b),
        FieldOp::Div => a.try_div(b),
    }
}

/// The derivation on coefficients: zero on the rationals, d/dt on Q(t).
pub fn field_derive(a: &FieldElement) -> FieldElement {
    match a {
        FieldElement::Rational(_) => FieldElement::zero(FieldTag::Rationals),
        FieldElement::Function(f) => FieldElement::Function(f.derive()),
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field tag mismatch")
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("field tag mismatch")
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field tag mismatch")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Rational(c) => FieldElement::Rational(-c),
            FieldElement::Function(f) => FieldElement::Function(f.neg()),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(c) => upoly::fmt_rational(c, f),
            FieldElement::Function(r) => {
                if r.den.is_one() {
                    write!(f, "{}", r.num)
                } else {
                    if r.num.is_compound() {
                        write!(f, "({})", r.num)?;
                    } else {
                        write!(f, "{}", r.num)?;
                    }
                    if r.den.is_compound() || r.den.degree() == Some(0) {
                        write!(f, "/({})", r.den)
                    } else {
                        write!(f, "/{}", r.den)
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldTag = FieldTag::Rationals;
    const QT: FieldTag = FieldTag::RationalFunctionsInT;

    fn tpoly(v: &[i64]) -> FieldElement {
        FieldElement::Function(RatFun::from_poly(UPoly::from_vec(
            v.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        )))
    }

    #[test]
    fn rational_sum() {
        let a = FieldElement::ratio(Q, 1, 2).unwrap();
        let b = FieldElement::ratio(Q, 1, 3).unwrap();
        assert_eq!(
            field_arith(&a, &b, FieldOp::Add).unwrap(),
            FieldElement::ratio(Q, 5, 6).unwrap()
        );
    }

    #[test]
    fn t_times_inverse() {
        let t = FieldElement::t();
        let inv = field_arith(&FieldElement::one(QT), &t, FieldOp::Div).unwrap();
        assert!(field_arith(&t, &inv, FieldOp::Mul).unwrap().is_one());
    }

    #[test]
    fn cancels_common_factor() {
        // (t^2 - 1)/(t - 1) = t + 1; the oracle is the exact quotient from div_rem
        let num = tpoly(&[-1, 0, 1]);
        let den = tpoly(&[-1, 1]);
        let q = field_arith(&num, &den, FieldOp::Div).unwrap();
        let (uq, ur) = UPoly::from_vec(vec![(-1).into(), 0.into(), 1.into()].into_iter().map(|c: BigInt| BigRational::from_integer(c)).collect())
            .div_rem(&UPoly::from_vec(vec![BigRational::from_integer((-1).into()), BigRational::one()]));
        assert!(ur.is_zero());
        assert_eq!(q, FieldElement::Function(RatFun::from_poly(uq)));
        assert_eq!(q, tpoly(&[1, 1]));
    }

    #[test]
    fn errors() {
        let a = FieldElement::one(Q);
        assert_eq!(
            field_arith(&a, &FieldElement::zero(Q), FieldOp::Div),
            Err(Error::DivisionByZero)
        );
        assert!(matches!(
            field_arith(&a, &FieldElement::t(), FieldOp::Add),
            Err(Error::FieldMismatch(..))
        ));
        assert!(FieldElement::ratio(Q, 1, 0).is_err());
    }

    #[test]
    fn derivations() {
        assert!(field_derive(&FieldElement::ratio(Q, 7, 3).unwrap()).is_zero());
        assert_eq!(field_derive(&tpoly(&[0, 0, 1])), tpoly(&[0, 2]));
        assert!(field_derive(&FieldElement::t()).is_one());
        // 1/t: quotient rule (0*t - 1*1)/t^2
        let inv_t = FieldElement::t().inv().unwrap();
        let expected = field_arith(&tpoly(&[-1]), &tpoly(&[0, 0, 1]), FieldOp::Div).unwrap();
        assert_eq!(field_derive(&inv_t), expected);
    }

    #[test]
    fn canonical_denominator_is_monic() {
        let r = RatFun::new(
            UPoly::from_vec(vec![BigRational::from_integer(4.into())]),
            UPoly::from_vec(vec![BigRational::from_integer(2.into()), BigRational::from_integer(2.into())]),
        )
        .unwrap();
        assert!(r.denom().leading().unwrap().is_one());
        assert_eq!(r.numer().as_constant().unwrap(), BigRational::from_integer(2.into()));
        assert_eq!(FieldElement::Function(r).to_string(), "2/(t + 1)");
    }
}
