use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Constant, Round, Special};
use rug::ops::AssignRound;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Precision of every radius. Radii are always rounded towards +inf.
pub const RAD_PREC: u32 = 64;

/// Midpoint-radius real enclosure. The represented set is `[mid - rad, mid + rad]`.
///
/// Every operation returns a ball containing the exact image of its inputs: the
/// midpoint is rounded to nearest at the working precision and the rounding
/// error is folded into the radius, which is itself computed with upward rounding.
#[derive(Clone)]
pub struct Ball {
    mid: Float,
    rad: Float,
}

fn rad_zero() -> Float {
    Float::new(RAD_PREC)
}

fn rad_inf() -> Float {
    Float::with_val(RAD_PREC, Special::Infinity)
}

/// Upper bound for the rounding error of a correctly rounded result `x`.
pub(crate) fn ulp_err(x: &Float, ord: Ordering) -> Float {
    if ord == Ordering::Equal {
        return rad_zero();
    }
    match x.get_exp() {
        Some(e) => Float::with_val(RAD_PREC, 1) << (e - x.prec() as i32),
        None if x.is_zero() => {
            // underflow to zero; MPFR's minimum exponent is far below anything we use
            Float::with_val(RAD_PREC, 1) << rug::float::exp_min()
        }
        None => rad_inf(),
    }
}

pub(crate) fn up<T>(v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, v, Round::Up).0
}

pub(crate) fn down<T>(v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, v, Round::Down).0
}

pub(crate) fn abs_up(x: &Float) -> Float {
    Float::with_val_round(RAD_PREC, x.abs_ref(), Round::Up).0
}

impl Ball {
    pub fn zero(prec: u32) -> Ball {
        Ball { mid: Float::new(prec), rad: rad_zero() }
    }

    pub fn one(prec: u32) -> Ball {
        Ball::from_int(1, prec)
    }

    pub fn from_int(v: i64, prec: u32) -> Ball {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = ulp_err(&mid, ord);
        Ball { mid, rad }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Ball {
        let (mid, ord) = Float::with_val_round(prec, q, Round::Nearest);
        let rad = ulp_err(&mid, ord);
        Ball { mid, rad }
    }

    pub fn from_integer(q: &Integer, prec: u32) -> Ball {
        let (mid, ord) = Float::with_val_round(prec, q, Round::Nearest);
        let rad = ulp_err(&mid, ord);
        Ball { mid, rad }
    }

    /// Ball `[mid - rad, mid + rad]` from explicit parts; `rad` is rounded up.
    pub fn with_rad(mid: Float, rad: &Float) -> Ball {
        let rad = abs_up(rad);
        Ball { mid, rad }
    }

    /// The exact value of an `f64`, for test inputs and oracle comparisons.
    pub fn from_f64(v: f64, prec: u32) -> Ball {
        let (mid, ord) = Float::with_val_round(prec.max(53), v, Round::Nearest);
        let rad = ulp_err(&mid, ord);
        Ball { mid, rad }.with_prec(prec)
    }

    /// Ball covering the closed interval `[lo, hi]`.
    pub fn from_endpoints(lo: &Float, hi: &Float, prec: u32) -> Ball {
        let (mid, ord) = Float::with_val_round(prec, lo + hi, Round::Nearest);
        let mut mid = mid;
        mid /= 2;
        let e = ulp_err(&mid, ord);
        let half = up(hi - lo) / 2u32;
        let rad = up(&half + &e);
        Ball { mid, rad }
    }

    pub fn pi(prec: u32) -> Ball {
        let (mid, ord) = Float::with_val_round(prec, Constant::Pi, Round::Nearest);
        let rad = ulp_err(&mid, ord);
        Ball { mid, rad }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Rounds the midpoint to `prec` bits, widening the radius by the rounding error.
    pub fn with_prec(&self, prec: u32) -> Ball {
        let (mid, ord) = Float::with_val_round(prec, &self.mid, Round::Nearest);
        let rad = up(&self.rad + &ulp_err(&mid, ord));
        Ball { mid, rad }
    }

    pub fn add_error(&self, err: &Float) -> Ball {
        Ball { mid: self.mid.clone(), rad: up(&self.rad + &abs_up(err)) }
    }

    pub fn add_error_rational(&self, err: &Rational) -> Ball {
        let e = Float::with_val_round(RAD_PREC, err, Round::Up).0;
        self.add_error(&e)
    }

    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec().max(RAD_PREC), &self.mid - &self.rad, Round::Down).0
    }

    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec().max(RAD_PREC), &self.mid + &self.rad, Round::Up).0
    }

    /// Upper bound for `|x|` over the ball.
    pub fn abs_upper(&self) -> Float {
        up(&abs_up(&self.mid) + &self.rad)
    }

    /// Lower bound for `|x|` over the ball (zero if the ball straddles zero).
    pub fn abs_lower(&self) -> Float {
        let am = down(self.mid.abs_ref());
        let v = down(&am - &self.rad);
        if v.is_sign_negative() {
            rad_zero()
        } else {
            v
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower().is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.lower() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.upper() < 0
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lower() <= *q && self.upper() >= *q
    }

    pub fn contains_float(&self, x: &Float) -> bool {
        self.lower() <= *x && self.upper() >= *x
    }

    pub fn contains(&self, other: &Ball) -> bool {
        self.lower() <= other.lower() && self.upper() >= other.upper()
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    /// Certified `x <= q` for every point of the ball.
    pub fn le_rational(&self, q: &Rational) -> bool {
        self.upper() <= *q
    }

    pub fn lt_rational(&self, q: &Rational) -> bool {
        self.upper() < *q
    }

    /// Certified `x >= q` for every point of the ball.
    pub fn ge_rational(&self, q: &Rational) -> bool {
        self.lower() >= *q
    }

    /// Certified `self < other` pointwise.
    pub fn lt(&self, other: &Ball) -> bool {
        self.upper() < other.lower()
    }

    pub fn le(&self, other: &Ball) -> bool {
        self.upper() <= other.lower()
    }

    /// Ball whose upper end is `|x|`'s upper bound and whose lower end is `|x|`'s lower bound.
    pub fn abs(&self) -> Ball {
        if !self.contains_zero() {
            if self.mid.is_sign_negative() {
                -self.clone()
            } else {
                self.clone()
            }
        } else {
            Ball::from_endpoints(&Float::new(RAD_PREC), &self.abs_upper(), self.prec())
        }
    }

    /// Smallest ball (at this precision) containing both inputs.
    pub fn hull(&self, other: &Ball) -> Ball {
        let lo = self.lower().min(&other.lower());
        let hi = self.upper().max(&other.upper());
        Ball::from_endpoints(&lo, &hi, self.prec().max(other.prec()))
    }

    /// Ball `[0, max upper]` style maximum: a ball whose upper end bounds both uppers.
    pub fn max(&self, other: &Ball) -> Ball {
        if self.upper() >= other.upper() {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn sqr(&self) -> Ball {
        self * self
    }

    pub fn recip(&self) -> Ball {
        self.try_recip().unwrap_or_else(|_| Ball { mid: Float::new(self.prec()), rad: rad_inf() })
    }

    pub fn try_recip(&self) -> Result<Ball> {
        if self.contains_zero() {
            return Err(Error::Domain("reciprocal of a ball containing zero".into()));
        }
        let prec = self.prec();
        let (mid, ord) = Float::with_val_round(prec, 1 / &self.mid, Round::Nearest);
        let e = ulp_err(&mid, ord);
        // |1/x - 1/m| <= r / (|m| (|m| - r))
        let am = down(self.mid.abs_ref());
        let gap = down(&am - &self.rad);
        let den = down(&am * &gap);
        let prop = up(&self.rad / &den);
        Ok(Ball { mid, rad: up(&prop + &e) })
    }

    pub fn div_ball(&self, other: &Ball) -> Result<Ball> {
        Ok(self * &other.try_recip()?)
    }

    pub fn powi(&self, n: i64) -> Ball {
        if n == 0 {
            return Ball::one(self.prec());
        }
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self.clone();
        let mut acc: Option<Ball> = None;
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        acc.unwrap()
    }

    pub fn sqrt(&self) -> Result<Ball> {
        if self.lower() < 0 {
            return Err(Error::Domain("sqrt of a ball with negative part".into()));
        }
        let prec = self.prec();
        let (mid, ord) = Float::with_val_round(prec, self.mid.sqrt_ref(), Round::Nearest);
        let e = ulp_err(&mid, ord);
        if self.rad.is_zero() {
            return Ok(Ball { mid, rad: e });
        }
        let lo = down(&self.mid - &self.rad);
        if lo <= 0 {
            // sqrt is only Hoelder continuous at 0: enclose [0, sqrt(upper)]
            let hi = Float::with_val_round(RAD_PREC, self.upper().sqrt_ref(), Round::Up).0;
            return Ok(Ball::from_endpoints(&Float::new(RAD_PREC), &hi, prec));
        }
        let s_lo = down(lo.sqrt_ref());
        let s_m = down(self.mid.sqrt_ref());
        let den = down(&s_lo + &s_m);
        let prop = up(&self.rad / &den);
        Ok(Ball { mid, rad: up(&prop + &e) })
    }

    /// Principal `k`-th root of a positive ball.
    pub fn root(&self, k: u32) -> Result<Ball> {
        if k == 0 {
            return Err(Error::Domain("zeroth root".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        if !self.is_positive() {
            return Err(Error::Domain("root of a ball touching or crossing zero".into()));
        }
        let prec = self.prec();
        let mut mid = self.mid.clone();
        let ord = mid.root_round(k, Round::Nearest);
        let e = ulp_err(&mid, ord);
        if self.rad.is_zero() {
            return Ok(Ball { mid, rad: e });
        }
        // derivative bound at the left end: (1/k) lo^(1/k - 1) = lo^(1/k) / (k lo)
        let lo = down(&self.mid - &self.rad);
        let mut rl = Float::with_val_round(RAD_PREC, &lo, Round::Up).0;
        rl.root_round(k, Round::Up);
        let den = down(&lo * k);
        let deriv = up(&rl / &den);
        let prop = up(&deriv * &self.rad);
        let mut out = Ball { mid, rad: up(&prop + &e) };
        if out.prec() != prec {
            out = out.with_prec(prec);
        }
        Ok(out)
    }

    /// `x^p` for a positive ball and rational exponent, via an exact root and an integer power.
    pub fn pow_rational(&self, p: &Rational) -> Result<Ball> {
        if !self.is_positive() {
            return Err(Error::Domain(format!("x^({p}) needs a strictly positive base")));
        }
        let num = p.numer().to_i64().ok_or_else(|| Error::Domain("exponent numerator too large".into()))?;
        let den = p.denom().to_u32().ok_or_else(|| Error::Domain("exponent denominator too large".into()))?;
        if den == 1 {
            return Ok(self.powi(num));
        }
        Ok(self.root(den)?.powi(num))
    }

    pub fn exp(&self) -> Ball {
        let prec = self.prec();
        let (mid, ord) = Float::with_val_round(prec, self.mid.exp_ref(), Round::Nearest);
        let e = ulp_err(&mid, ord);
        if self.rad.is_zero() {
            return Ball { mid, rad: e };
        }
        let mut em = Float::with_val_round(RAD_PREC, &self.mid, Round::Up).0;
        em.exp_round(Round::Up);
        let mut g = self.rad.clone();
        g.exp_m1_round(Round::Up);
        let prop = up(&em * &g);
        Ball { mid, rad: up(&prop + &e) }
    }

    pub fn ln(&self) -> Result<Ball> {
        if !self.is_positive() {
            return Err(Error::Domain("log of a ball touching or crossing zero".into()));
        }
        let prec = self.prec();
        let (mid, ord) = Float::with_val_round(prec, self.mid.ln_ref(), Round::Nearest);
        let e = ulp_err(&mid, ord);
        if self.rad.is_zero() {
            return Ok(Ball { mid, rad: e });
        }
        let lo = down(&self.mid - &self.rad);
        let prop = up(&self.rad / &lo);
        Ok(Ball { mid, rad: up(&prop + &e) })
    }

    pub fn sin_cos(&self) -> (Ball, Ball) {
        let prec = self.prec();
        let mut s = Float::with_val(prec, &self.mid);
        let mut c = Float::new(prec);
        let (os, oc) = s.sin_cos_round(&mut c, Round::Nearest);
        let es = up(&ulp_err(&s, os) + &self.rad);
        let ec = up(&ulp_err(&c, oc) + &self.rad);
        (Ball { mid: s, rad: es }, Ball { mid: c, rad: ec })
    }

    pub fn mul_rational(&self, q: &Rational) -> Ball {
        self * &Ball::from_rational(q, self.prec())
    }

    pub fn add_rational(&self, q: &Rational) -> Ball {
        self + &Ball::from_rational(q, self.prec())
    }

    pub fn mul_int(&self, k: i64) -> Ball {
        self * &Ball::from_int(k, self.prec())
    }

    pub fn div_int(&self, k: i64) -> Ball {
        self * &Ball::from_rational(&Rational::from((1, k)), self.prec())
    }

    /// Midpoint as a decimal string with `digits` significant digits.
    pub fn mid_decimal(&self, digits: usize) -> String {
        self.mid.to_string_radix(10, Some(digits))
    }

    /// Radius as a decimal string, rounded up.
    pub fn rad_decimal(&self) -> String {
        if self.rad.is_zero() {
            return "0".into();
        }
        self.rad.to_string_radix_round(10, Some(6), Round::Up)
    }

    /// Upper end as a decimal string, rounded up.
    pub fn upper_decimal(&self, digits: usize) -> String {
        self.upper().to_string_radix_round(10, Some(digits), Round::Up)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Upper bound as an exact rational (`None` for infinite balls).
    pub fn upper_rational(&self) -> Option<Rational> {
        self.upper().to_rational()
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} +/- {}]", self.mid_decimal(20), self.rad_decimal())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} +/- {}]", self.mid_decimal(17), self.rad_decimal())
    }
}

fn add_impl(a: &Ball, b: &Ball, negate_b: bool) -> Ball {
    let prec = a.prec().max(b.prec());
    let (mid, ord) = if negate_b {
        Float::with_val_round(prec, &a.mid - &b.mid, Round::Nearest)
    } else {
        Float::with_val_round(prec, &a.mid + &b.mid, Round::Nearest)
    };
    let e = ulp_err(&mid, ord);
    let rad = up(&up(&a.rad + &b.rad) + &e);
    Ball { mid, rad }
}

fn mul_impl(a: &Ball, b: &Ball) -> Ball {
    let prec = a.prec().max(b.prec());
    let (mid, ord) = Float::with_val_round(prec, &a.mid * &b.mid, Round::Nearest);
    let e = ulp_err(&mid, ord);
    if a.rad.is_zero() && b.rad.is_zero() {
        return Ball { mid, rad: e };
    }
    let t1 = up(&abs_up(&a.mid) * &b.rad);
    let t2 = up(&abs_up(&b.mid) * &a.rad);
    let t3 = up(&a.rad * &b.rad);
    let rad = up(&up(&up(&t1 + &t2) + &t3) + &e);
    Ball { mid, rad }
}

impl Add<&Ball> for &Ball {
    type Output = Ball;
    fn add(self, rhs: &Ball) -> Ball {
        add_impl(self, rhs, false)
    }
}

impl Sub<&Ball> for &Ball {
    type Output = Ball;
    fn sub(self, rhs: &Ball) -> Ball {
        add_impl(self, rhs, true)
    }
}

impl Mul<&Ball> for &Ball {
    type Output = Ball;
    fn mul(self, rhs: &Ball) -> Ball {
        mul_impl(self, rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Ball> for Ball {
            type Output = Ball;
            fn $m(self, rhs: Ball) -> Ball {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Ball> for Ball {
            type Output = Ball;
            fn $m(self, rhs: &Ball) -> Ball {
                (&self).$m(rhs)
            }
        }
        impl $tr<Ball> for &Ball {
            type Output = Ball;
            fn $m(self, rhs: Ball) -> Ball {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball { mid: -self.mid, rad: self.rad }
    }
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        -self.clone()
    }
}

impl std::iter::Sum for Ball {
    fn sum<I: Iterator<Item = Ball>>(iter: I) -> Ball {
        let mut acc: Option<Ball> = None;
        for b in iter {
            acc = Some(match acc {
                None => b,
                Some(a) => a + b,
            });
        }
        acc.unwrap_or_else(|| Ball::zero(crate::exact_scalars::DEFAULT_PREC))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn exact_small_integers_have_zero_radius() {
        let b = Ball::from_int(12345, 128);
        assert!(b.is_exact());
        assert!(b.contains_rational(&q(12345, 1)));
    }

    #[test]
    fn rational_enclosure_contains_value() {
        let b = Ball::from_rational(&q(7, 10), 128);
        assert!(b.contains_rational(&q(7, 10)));
        assert!(!b.is_exact());
        assert!(b.rad().to_f64() < 1e-38);
    }

    #[test]
    fn reciprocal_of_zero_ball_is_domain_error() {
        let b = Ball::from_endpoints(&Float::with_val(64, -1), &Float::with_val(64, 1), 64);
        assert!(b.try_recip().is_err());
        assert!(!b.recip().is_finite());
    }

    #[test]
    fn sqrt_and_square_round_trip() {
        let two = Ball::from_int(2, 256);
        let s = two.sqrt().unwrap();
        assert!(s.sqr().contains_rational(&q(2, 1)));
    }

    #[test]
    fn exp_ln_inverse() {
        let x = Ball::from_rational(&q(11, 2), 200);
        let y = x.ln().unwrap().exp();
        assert!(y.contains_rational(&q(11, 2)));
        assert!(y.rad().to_f64() < 1e-50);
    }

    #[test]
    fn root_then_power_recovers_base() {
        let x = Ball::from_int(24, 256);
        let r4 = x.root(4).unwrap();
        assert!(r4.powi(4).contains_rational(&q(24, 1)));
        assert!((r4.to_f64() - 24f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn pow_rational_rejects_nonpositive_base() {
        let x = Ball::from_endpoints(&Float::with_val(64, 0), &Float::with_val(64, 1), 64);
        assert!(x.pow_rational(&q(1, 2)).is_err());
        assert!(Ball::from_int(-2, 64).pow_rational(&q(3, 1)).is_err());
    }

    #[test]
    fn sin_cos_of_pi() {
        let (s, c) = Ball::pi(128).sin_cos();
        assert!(s.contains_rational(&q(0, 1)));
        assert!(c.contains_rational(&q(-1, 1)));
    }

    #[test]
    fn sqrt_of_ball_touching_zero_is_hull() {
        let x = Ball::from_endpoints(&Float::with_val(64, 0), &Float::with_val(64, 4), 64);
        let s = x.sqrt().unwrap();
        assert!(s.contains_rational(&q(0, 1)));
        assert!(s.contains_rational(&q(2, 1)));
    }

    #[test]
    fn comparisons_are_certified() {
        let x = Ball::from_rational(&q(1, 3), 128);
        assert!(x.le_rational(&q(334, 1000)));
        assert!(!x.le_rational(&q(1, 3)) || x.is_exact());
        assert!(x.ge_rational(&q(333, 1000)));
    }
}
