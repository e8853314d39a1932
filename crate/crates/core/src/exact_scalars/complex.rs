use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Rational;

use super::ball::Ball;
use crate::error::{Error, Result};

/// Rectangular complex enclosure: containment holds componentwise.
#[derive(Clone, Debug)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> ComplexBall {
        ComplexBall { re, im }
    }

    pub fn from_real(re: Ball) -> ComplexBall {
        let p = re.prec();
        ComplexBall { re, im: Ball::zero(p) }
    }

    pub fn zero(prec: u32) -> ComplexBall {
        ComplexBall { re: Ball::zero(prec), im: Ball::zero(prec) }
    }

    pub fn one(prec: u32) -> ComplexBall {
        ComplexBall { re: Ball::one(prec), im: Ball::zero(prec) }
    }

    /// The imaginary unit.
    pub fn i(prec: u32) -> ComplexBall {
        ComplexBall { re: Ball::zero(prec), im: Ball::one(prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_exact() && self.im.mid().is_zero()
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, k: &Ball) -> ComplexBall {
        ComplexBall { re: &self.re * k, im: &self.im * k }
    }

    pub fn scale_rational(&self, q: &Rational) -> ComplexBall {
        ComplexBall { re: self.re.mul_rational(q), im: self.im.mul_rational(q) }
    }

    /// Multiply by `i`.
    pub fn mul_i(&self) -> ComplexBall {
        ComplexBall { re: -&self.im, im: self.re.clone() }
    }

    pub fn norm_sqr(&self) -> Ball {
        &self.re.sqr() + &self.im.sqr()
    }

    /// Enclosure of `|z|`.
    pub fn abs(&self) -> Ball {
        let n = self.norm_sqr();
        // the lower end may dip below zero through rounding; clamp via sqrt's hull branch
        n.sqrt().unwrap_or_else(|_| {
            let hi = n.abs_upper();
            Ball::from_endpoints(&rug::Float::new(64), &hi, n.prec()).sqrt().expect("nonnegative hull")
        })
    }

    pub fn recip(&self) -> Result<ComplexBall> {
        let n = self.norm_sqr();
        let inv = n.try_recip()?;
        Ok(ComplexBall { re: &self.re * &inv, im: -(&self.im * &inv) })
    }

    pub fn powi(&self, n: i64) -> Result<ComplexBall> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut acc = ComplexBall::one(self.prec());
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// `exp(z)`; `|result|` is `exp(Re z)` up to the enclosure widths.
    pub fn exp(&self) -> ComplexBall {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        ComplexBall { re: &m * &c, im: &m * &s }
    }

    /// `exp(z)` with a blow-up guard on the output radius.
    pub fn exp_checked(&self, max_rad: f64) -> Result<ComplexBall> {
        let out = self.exp();
        let worst = out.re.rad().to_f64().max(out.im.rad().to_f64());
        if !out.re.is_finite() || !out.im.is_finite() || worst > max_rad {
            return Err(Error::PrecisionOverflow(format!("exp radius {worst:e} above {max_rad:e}")));
        }
        Ok(out)
    }

    /// Principal square root for `z` in the open right half-plane.
    pub fn sqrt(&self) -> Result<ComplexBall> {
        if !self.re.is_positive() {
            return Err(Error::Domain("complex sqrt needs Re z > 0 on the whole ball".into()));
        }
        // sqrt(z) = u + i v with u = sqrt((|z| + x)/2), v = y / (2u)
        let m = self.abs();
        let u = (&(&m + &self.re)).div_int(2).sqrt()?;
        let v = &self.im * &u.mul_int(2).try_recip()?;
        Ok(ComplexBall { re: u, im: v })
    }

    /// Principal power `z^p` for `p` with denominator 1 or 2 (Re z > 0 for the half-integer case).
    pub fn pow_rational(&self, p: &Rational) -> Result<ComplexBall> {
        let den = p.denom().to_u32().unwrap_or(0);
        let num = p.numer().to_i64().ok_or_else(|| Error::Domain("exponent too large".into()))?;
        match den {
            1 => self.powi(num),
            2 => self.sqrt()?.powi(num),
            _ => {
                if self.is_real() && self.re.is_positive() {
                    Ok(ComplexBall::from_real(self.re.pow_rational(p)?))
                } else {
                    Err(Error::Domain(format!("complex power {p} off the positive axis")))
                }
            }
        }
    }

    pub fn abs_upper_f64(&self) -> f64 {
        self.abs().upper().to_f64()
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}

impl Add<&ComplexBall> for &ComplexBall {
    type Output = ComplexBall;
    fn add(self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub<&ComplexBall> for &ComplexBall {
    type Output = ComplexBall;
    fn sub(self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul<&ComplexBall> for &ComplexBall {
    type Output = ComplexBall;
    fn mul(self, o: &ComplexBall) -> ComplexBall {
        if o.is_real() {
            return self.scale(&o.re);
        }
        if self.is_real() {
            return o.scale(&self.re);
        }
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        ComplexBall { re, im }
    }
}

impl Neg for &ComplexBall {
    type Output = ComplexBall;
    fn neg(self) -> ComplexBall {
        ComplexBall { re: -&self.re, im: -&self.im }
    }
}

impl Add for ComplexBall {
    type Output = ComplexBall;
    fn add(self, o: ComplexBall) -> ComplexBall {
        &self + &o
    }
}

impl Mul for ComplexBall {
    type Output = ComplexBall;
    fn mul(self, o: ComplexBall) -> ComplexBall {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_one() {
        let z = ComplexBall::zero(128).exp();
        assert!(z.re.contains_rational(&Rational::from(1)));
        assert!(z.im.contains_rational(&Rational::from(0)));
    }

    #[test]
    fn euler_identity() {
        let z = ComplexBall::new(Ball::zero(128), Ball::pi(128)).exp();
        assert!(z.re.contains_rational(&Rational::from(-1)));
        assert!(z.im.contains_rational(&Rational::from(0)));
    }

    #[test]
    fn sqrt_squares_back() {
        let z = ComplexBall::new(Ball::from_int(1, 128), Ball::from_int(3, 128));
        let s = z.sqrt().unwrap();
        let back = &s * &s;
        assert!(back.re.contains_rational(&Rational::from(1)));
        assert!(back.im.contains_rational(&Rational::from(3)));
        assert!(s.re.is_positive());
    }

    #[test]
    fn half_integer_power_matches_f64() {
        let z = ComplexBall::new(Ball::from_int(1, 128), Ball::from_int(2, 128));
        let p = Rational::from((-15, 2));
        let w = z.pow_rational(&p).unwrap();
        let c = num_complex::Complex64::new(1.0, 2.0).powf(-7.5);
        assert!((w.re.to_f64() - c.re).abs() < 1e-14);
        assert!((w.im.to_f64() - c.im).abs() < 1e-14);
    }

    #[test]
    fn exp_guard_trips_on_wide_input() {
        let wide = Ball::from_endpoints(&rug::Float::with_val(64, 0), &rug::Float::with_val(64, 100), 64);
        let z = ComplexBall::new(wide, Ball::zero(64));
        assert!(z.exp_checked(1.0).is_err());
    }
}
