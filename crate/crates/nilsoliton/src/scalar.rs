//! Scalar arithmetic backends.
//!
//! Two scalar types drive every computation in this crate:
//!
//! * [`Exact`] — arbitrary-precision rationals, optionally extended by a
//!   single square root `a + b*sqrt(d)` with `d` a fixed square-free
//!   positive integer. All catalog constructions have rational structure
//!   constants, so exact mode decides soliton verdicts with no rounding
//!   at all.
//! * [`Dd`] — an unevaluated double-double (~32 significant decimal
//!   digits), used when a spec involves genuinely irrational data or as a
//!   fast cross-check of the exact path.
//!
//! Algorithms are written against the [`Scalar`] trait so the two modes
//! share one code path.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Field operations needed by the linear-algebra and geometry kernels.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;

    /// Exact zero test for exact types; a tight threshold test for floats.
    fn is_zero(&self) -> bool;
    /// True when arithmetic in this type is exact.
    fn exact() -> bool;
    /// Best-effort numeric value, for reporting and for float pivoting.
    fn to_f64(&self) -> f64;
    /// Multiplicative inverse. Panics on zero.
    fn recip(&self) -> Self;
    /// Sign: -1, 0, or 1. Exact for exact types.
    fn signum(&self) -> i32;
    /// Square root when representable in this type.
    fn try_sqrt(&self) -> Option<Self>;
    /// Render for reports: exact types print exactly, floats in decimal.
    fn render(&self) -> String;

    fn is_one(&self) -> bool {
        self.clone().sub(Self::one()).is_zero()
    }
    fn is_positive(&self) -> bool {
        self.signum() > 0
    }
    fn is_negative(&self) -> bool {
        self.signum() < 0
    }
}

// ---------------------------------------------------------------------------
// Exact scalars: Q or Q(sqrt(d))
// ---------------------------------------------------------------------------

/// Exact scalar: `a + b*sqrt(d)`.
///
/// The radicand `d` is carried per value; `b == 0` values are plain
/// rationals with `d == 0`. Mixing two values with distinct nonzero
/// radicands is a construction error and panics: each metric Lie algebra
/// fixes one quadratic extension.
#[derive(Clone, PartialEq, Eq)]
pub struct Exact {
    a: BigRational,
    b: BigRational,
    d: u64,
}

impl Exact {
    pub fn rational(a: BigRational) -> Self {
        Exact {
            a,
            b: BigRational::zero(),
            d: 0,
        }
    }

    /// `a + b*sqrt(d)`; `d` must be square-free and positive when `b != 0`.
    pub fn quadratic(a: BigRational, b: BigRational, d: u64) -> Self {
        if b.is_zero() {
            return Exact::rational(a);
        }
        debug_assert!(d > 1 && is_squarefree(d), "radicand must be square-free > 1");
        Exact { a, b, d }
    }

    pub fn from_int(n: i64) -> Self {
        Exact::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exact::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Rational part.
    pub fn rat_part(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of `sqrt(d)`.
    pub fn quad_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The rational value, if this scalar lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    fn join_radicand(&self, other: &Exact) -> u64 {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, true) => 0,
            (false, true) => self.d,
            (true, false) => other.d,
            (false, false) => {
                assert_eq!(
                    self.d, other.d,
                    "mixed quadratic extensions: sqrt({}) vs sqrt({})",
                    self.d, other.d
                );
                self.d
            }
        }
    }
}

/// Square-free factorization helper: `n = s^2 * f` with `f` square-free.
/// Returns `(s, f)`. Trial division is fine at the magnitudes seen here.
pub fn squarefree_part(n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut f = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            f *= p;
        }
        p += 1;
    }
    f *= m;
    (s, f)
}

fn is_squarefree(n: u64) -> bool {
    squarefree_part(n).0 == 1
}

/// Square-free part of a positive rational `p/q`: the unique square-free
/// integer `f` with `p/q = f * r^2` for rational `r`. Also returns `r`.
pub fn rational_squarefree_part(x: &BigRational) -> Option<(u64, BigRational)> {
    if !x.is_positive() {
        return None;
    }
    let num = x.numer().to_u64()?;
    let den = x.denom().to_u64()?;
    let (sn, fn_) = squarefree_part(num);
    let (sd, fd) = squarefree_part(den);
    // p/q = (fn*sn^2)/(fd*sd^2) = fn*fd * (sn/(sd*fd))^2
    let f = fn_ * fd;
    let r = BigRational::new(BigInt::from(sn), BigInt::from(sd * fd));
    Some((f, r))
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        let d = self.join_radicand(&rhs);
        Exact::quadratic(self.a + rhs.a, self.b + rhs.b, d.max(0))
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        let d = self.join_radicand(&rhs);
        Exact::quadratic(self.a - rhs.a, self.b - rhs.b, d)
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        let d = self.join_radicand(&rhs);
        if d == 0 {
            return Exact::rational(self.a * rhs.a);
        }
        let dd = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &rhs.a + &self.b * &rhs.b * &dd;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Exact::quadratic(a, b, d)
    }
}

impl Div for Exact {
    type Output = Exact;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Exact) -> Exact {
        self * rhs.recip()
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl AddAssign<&Exact> for Exact {
    fn add_assign(&mut self, rhs: &Exact) {
        let d = self.join_radicand(rhs);
        self.a += &rhs.a;
        self.b += &rhs.b;
        self.d = if self.b.is_zero() { 0 } else { d };
    }
}

impl SubAssign<&Exact> for Exact {
    fn sub_assign(&mut self, rhs: &Exact) {
        let d = self.join_radicand(rhs);
        self.a -= &rhs.a;
        self.b -= &rhs.b;
        self.d = if self.b.is_zero() { 0 } else { d };
    }
}

impl MulAssign<&Exact> for Exact {
    fn mul_assign(&mut self, rhs: &Exact) {
        *self = self.clone() * rhs.clone();
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        Exact::rational(BigRational::zero())
    }
    fn one() -> Self {
        Exact::rational(BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        Exact::from_int(n)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Exact::ratio(num, den)
    }
    fn from_rational(r: &BigRational) -> Self {
        Exact::rational(r.clone())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn exact() -> bool {
        true
    }
    fn to_f64(&self) -> f64 {
        let mut v = self.a.to_f64().unwrap_or(f64::NAN);
        if !self.b.is_zero() {
            v += self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt();
        }
        v
    }
    fn recip(&self) -> Self {
        assert!(!Scalar::is_zero(self), "division by zero");
        if self.b.is_zero() {
            return Exact::rational(self.a.recip());
        }
        // 1/(a + b sqrt d) = (a - b sqrt d)/(a^2 - b^2 d)
        let dd = BigRational::from_integer(BigInt::from(self.d));
        let norm = &self.a * &self.a - &self.b * &self.b * &dd;
        assert!(!norm.is_zero(), "zero norm in quadratic field (d not square-free?)");
        Exact::quadratic(&self.a / &norm, -(&self.b / &norm), self.d)
    }
    fn signum(&self) -> i32 {
        let sa = rat_sign(&self.a);
        if self.b.is_zero() {
            return sa;
        }
        let sb = rat_sign(&self.b);
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: compare a^2 against b^2 d.
        let dd = BigRational::from_integer(BigInt::from(self.d));
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * &dd;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }
    fn try_sqrt(&self) -> Option<Self> {
        if !self.b.is_zero() || self.a.is_negative() {
            return None;
        }
        let (f, r) = rational_squarefree_part(&self.a)?;
        if self.a.is_zero() {
            return Some(Exact::zero());
        }
        if f == 1 {
            Some(Exact::rational(r))
        } else {
            Some(Exact::quadratic(BigRational::zero(), r, f))
        }
    }
    fn render(&self) -> String {
        if self.b.is_zero() {
            format!("{}", self.a)
        } else if self.a.is_zero() {
            format!("{}*s{}", self.b, self.d)
        } else {
            format!("{}+{}*s{}", self.a, self.b, self.d)
        }
    }
}

/// Embed an [`Exact`] value into any scalar type (identity on `Exact`,
/// numeric evaluation on floats).
pub fn lift<S: Scalar>(x: &Exact) -> S {
    let mut v = S::from_rational(x.rat_part());
    if !x.is_rational() {
        let sq = S::from_i64(x.radicand() as i64)
            .try_sqrt()
            .expect("radicand has a square root in the target type");
        v = v + S::from_rational(x.quad_part()) * sq;
    }
    v
}

fn rat_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

// ---------------------------------------------------------------------------
// Double-double floats
// ---------------------------------------------------------------------------

/// Unevaluated sum of two `f64`s giving ~32 significant decimal digits.
///
/// Classic error-free transformations (Dekker / Knuth, products via FMA).
/// No pre-fetched crate provides this, so it is implemented here; the
/// sixteen-line core is standard.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn abs(&self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -*self
        } else {
            *self
        }
    }

    pub fn sqrt(&self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::new(0.0, 0.0);
        }
        assert!(self.hi > 0.0, "sqrt of negative double-double");
        let s = self.hi.sqrt();
        let s_dd = Dd::from_f64(s);
        // One Newton step: s + (x - s^2) / (2s)
        let diff = *self - s_dd * s_dd;
        s_dd + Dd::new(diff.hi / (2.0 * s), diff.lo / (2.0 * s))
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        assert!(rhs.hi != 0.0, "division by zero double-double");
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl AddAssign<&Dd> for Dd {
    fn add_assign(&mut self, rhs: &Dd) {
        *self = *self + *rhs;
    }
}

impl SubAssign<&Dd> for Dd {
    fn sub_assign(&mut self, rhs: &Dd) {
        *self = *self - *rhs;
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.hi)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e}", self.hi)
    }
}

/// Zero threshold for double-double pivot/verdict-internal decisions.
/// Residual thresholds for published verdicts are separate and larger.
const DD_ZERO_EPS: f64 = 1e-24;

impl Scalar for Dd {
    fn zero() -> Self {
        Dd::new(0.0, 0.0)
    }
    fn one() -> Self {
        Dd::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Dd::from_f64(n as f64)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Dd::from_f64(num as f64) / Dd::from_f64(den as f64)
    }
    fn from_rational(r: &BigRational) -> Self {
        // Split to keep precision for big numerators/denominators.
        let n = r.numer();
        let d = r.denom();
        let nf = n.to_f64().unwrap_or(f64::NAN);
        let df = d.to_f64().unwrap_or(f64::NAN);
        let approx = Dd::from_f64(nf) / Dd::from_f64(df);
        // One correction step using the residual n - approx*d in BigRational.
        let af = approx.hi;
        if af.is_finite() {
            let res = r - BigRational::from_float(af).unwrap_or_else(BigRational::zero);
            let corr = res.to_f64().unwrap_or(0.0);
            return Dd::from_f64(af) + Dd::from_f64(corr);
        }
        approx
    }
    fn is_zero(&self) -> bool {
        self.hi.abs() <= DD_ZERO_EPS
    }
    fn exact() -> bool {
        false
    }
    fn to_f64(&self) -> f64 {
        self.hi
    }
    fn recip(&self) -> Self {
        Dd::one() / *self
    }
    fn signum(&self) -> i32 {
        if Scalar::is_zero(self) {
            0
        } else if self.hi > 0.0 {
            1
        } else {
            -1
        }
    }
    fn try_sqrt(&self) -> Option<Self> {
        if self.hi < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }
    fn render(&self) -> String {
        format!("{:.20e}", self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rational_ops() {
        let a = Exact::ratio(1, 3);
        let b = Exact::ratio(1, 6);
        assert_eq!(a.clone() + b.clone(), Exact::ratio(1, 2));
        assert_eq!(a.clone() * b.clone(), Exact::ratio(1, 18));
        assert_eq!(a / b, Exact::from_int(2));
    }

    #[test]
    fn quadratic_field_arithmetic() {
        // (1 + sqrt2)(1 - sqrt2) = -1
        let one = BigRational::one();
        let p = Exact::quadratic(one.clone(), one.clone(), 2);
        let q = Exact::quadratic(one.clone(), -one.clone(), 2);
        assert_eq!(p.clone() * q, Exact::from_int(-1));
        // 1/(1+sqrt2) = sqrt2 - 1
        let r = p.recip();
        assert_eq!(r, Exact::quadratic(-one.clone(), one, 2));
    }

    #[test]
    fn quadratic_sign() {
        let one = BigRational::one();
        // 3 - 2*sqrt2 > 0 (since 9 > 8)
        let x = Exact::quadratic(
            BigRational::from_integer(3.into()),
            BigRational::from_integer((-2).into()),
            2,
        );
        assert_eq!(x.signum(), 1);
        // 1 - sqrt2 < 0
        let y = Exact::quadratic(one.clone(), -one, 2);
        assert_eq!(y.signum(), -1);
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(12), (2, 3));
        assert_eq!(squarefree_part(49), (7, 1));
        assert_eq!(squarefree_part(1), (1, 1));
        let (f, r) = rational_squarefree_part(&BigRational::new(9.into(), 2.into())).unwrap();
        // 9/2 = 2 * (3/2)^2
        assert_eq!(f, 2);
        assert_eq!(r, BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(
            Exact::ratio(9, 4).try_sqrt().unwrap(),
            Exact::ratio(3, 2)
        );
        let s2 = Exact::from_int(2).try_sqrt().unwrap();
        assert_eq!(s2.clone() * s2, Exact::from_int(2));
    }

    #[test]
    fn dd_precision() {
        // (1/3) * 3 = 1 to double-double accuracy
        let third = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        let one = third * Dd::from_f64(3.0);
        assert!((one - Dd::one()).abs().hi() < 1e-30);
        // sqrt(2)^2 = 2
        let s2 = Dd::from_f64(2.0).sqrt();
        assert!((s2 * s2 - Dd::from_f64(2.0)).abs().hi() < 1e-30);
    }

    #[test]
    fn dd_from_rational_is_correctly_rounded() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(10));
        let x = <Dd as Scalar>::from_rational(&r);
        let err = x - Dd::from_f64(1.0) / Dd::from_f64(10.0);
        assert!(err.abs().hi() < 1e-32);
    }
}
