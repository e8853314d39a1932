use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact_scalars::{Ball, ComplexBall};

/// Finite sum `sum_k c_k (x - center)^k` with exact rational coefficients; `k` may be negative.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    pub center: Rational,
    coeffs: BTreeMap<i32, Rational>,
}

/// Antiderivative split into its Laurent part and the coefficient of `ln(x - center)`.
#[derive(Clone, Debug)]
pub struct Antiderivative {
    pub poly: LaurentPoly,
    pub log_coeff: Rational,
}

impl LaurentPoly {
    pub fn zero(center: Rational) -> LaurentPoly {
        LaurentPoly { center, coeffs: BTreeMap::new() }
    }

    pub fn monomial(center: Rational, k: i32, c: Rational) -> LaurentPoly {
        let mut p = LaurentPoly::zero(center);
        p.add_term(k, c);
        p
    }

    pub fn constant(center: Rational, c: Rational) -> LaurentPoly {
        LaurentPoly::monomial(center, 0, c)
    }

    /// Polynomial with `coeffs[k]` the coefficient of `t^k`.
    pub fn from_coeffs(center: Rational, coeffs: &[Rational]) -> LaurentPoly {
        let mut p = LaurentPoly::zero(center);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(k as i32, c.clone());
        }
        p
    }

    pub fn add_term(&mut self, k: i32, c: Rational) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry(k).or_insert_with(Rational::new);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeff(&self, k: i32) -> Rational {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_center(&self, other: &LaurentPoly) {
        assert_eq!(self.center, other.center, "Laurent polynomials about different centers");
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        self.check_center(other);
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, s: &Rational) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.center.clone());
        for (k, c) in self.terms() {
            out.add_term(k, Rational::from(c * s));
        }
        out
    }

    /// Multiply by `(x - center)^j`.
    pub fn shift(&self, j: i32) -> LaurentPoly {
        LaurentPoly { center: self.center.clone(), coeffs: self.coeffs.iter().map(|(k, c)| (k + j, c.clone())).collect() }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        self.check_center(other);
        let mut out = LaurentPoly::zero(self.center.clone());
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                out.add_term(i + j, Rational::from(a * b));
            }
        }
        out
    }

    pub fn square(&self) -> LaurentPoly {
        self.mul(self)
    }

    pub fn derivative(&self) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.center.clone());
        for (k, c) in self.terms() {
            if k != 0 {
                out.add_term(k - 1, Rational::from(c * k));
            }
        }
        out
    }

    pub fn nth_derivative(&self, n: u32) -> LaurentPoly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Exact antiderivative; the `(x - center)^-1` term goes to `log_coeff`.
    pub fn antiderivative(&self) -> Antiderivative {
        let mut poly = LaurentPoly::zero(self.center.clone());
        let mut log_coeff = Rational::new();
        for (k, c) in self.terms() {
            if k == -1 {
                log_coeff = c.clone();
            } else {
                poly.add_term(k + 1, Rational::from(c / (k + 1)));
            }
        }
        Antiderivative { poly, log_coeff }
    }

    /// Exact value at local coordinate `t = x - center` (`t != 0` when negative powers are present).
    pub fn eval_local(&self, t: &Rational) -> Result<Rational> {
        if *t == 0 && self.min_exp().is_some_and(|k| k < 0) {
            return Err(Error::Domain("Laurent polynomial evaluated at its pole".into()));
        }
        let (lo, hi) = match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Ok(Rational::new()),
        };
        // Horner in t over [lo, hi], then scale by t^lo
        let mut acc = Rational::new();
        for k in (lo..=hi).rev() {
            acc *= t;
            if let Some(c) = self.coeffs.get(&k) {
                acc += c;
            }
        }
        Ok(acc * pow_rat(t, lo))
    }

    pub fn eval_x(&self, x: &Rational) -> Result<Rational> {
        self.eval_local(&Rational::from(x - &self.center))
    }

    /// Ball evaluation at local coordinate `t` (must avoid 0 when negative powers are present).
    pub fn eval_ball(&self, t: &Ball) -> Result<Ball> {
        let prec = t.prec();
        let (lo, hi) = match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Ok(Ball::zero(prec)),
        };
        let mut acc = Ball::zero(prec);
        for k in (lo..=hi).rev() {
            acc = &acc * t;
            if let Some(c) = self.coeffs.get(&k) {
                acc = &acc + &Ball::from_rational(c, prec);
            }
        }
        if lo < 0 {
            Ok(&acc * &t.try_recip()?.powi(-lo as i64))
        } else {
            Ok(&acc * &t.powi(lo as i64))
        }
    }

    pub fn eval_complex(&self, t: &ComplexBall) -> Result<ComplexBall> {
        let prec = t.prec();
        let (lo, hi) = match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Ok(ComplexBall::zero(prec)),
        };
        let mut acc = ComplexBall::zero(prec);
        for k in (lo..=hi).rev() {
            acc = &acc * t;
            if let Some(c) = self.coeffs.get(&k) {
                acc = &acc + &ComplexBall::from_real(Ball::from_rational(c, prec));
            }
        }
        Ok(&acc * &t.powi(lo as i64)?)
    }

    /// `p(alpha t + beta)` as a polynomial in `t` (only for nonnegative exponents).
    pub fn compose_affine(coeffs: &[Rational], alpha: &Rational, beta: &Rational, center: Rational) -> LaurentPoly {
        // Horner: p = c_n; p = p*(alpha t + beta) + c_k
        let lin = {
            let mut l = LaurentPoly::zero(center.clone());
            l.add_term(0, beta.clone());
            l.add_term(1, alpha.clone());
            l
        };
        let mut acc = LaurentPoly::zero(center.clone());
        for c in coeffs.iter().rev() {
            acc = acc.mul(&lin);
            acc.add_term(0, c.clone());
        }
        acc
    }

    /// Sum of `|c_k| r^k`, an exact majorant of `sup_{|t| = r} |p(t)|`.
    pub fn abs_sum_on_circle(&self, r: &Rational) -> Rational {
        let mut s = Rational::new();
        for (k, c) in self.terms() {
            s += Rational::from(c.abs_ref()) * pow_rat(r, k);
        }
        s
    }
}

impl Antiderivative {
    /// `int_a^b` of the original Laurent polynomial, local coordinates `0 < a, b`.
    pub fn definite(&self, a: &Rational, b: &Rational, prec: u32) -> Result<Ball> {
        let exact = Rational::from(self.poly.eval_local(b)? - self.poly.eval_local(a)?);
        let mut out = Ball::from_rational(&exact, prec);
        if self.log_coeff != 0 {
            if *a <= 0 || *b <= 0 {
                return Err(Error::NonIntegrable("log term across the expansion point".into()));
            }
            let ratio = Ball::from_rational(&Rational::from(b / a), prec);
            out = &out + &ratio.ln()?.mul_rational(&self.log_coeff);
        }
        Ok(out)
    }

    /// Value at local coordinate `t > 0` (log term uses `ln t`).
    pub fn eval(&self, t: &Rational, prec: u32) -> Result<Ball> {
        let mut out = Ball::from_rational(&self.poly.eval_local(t)?, prec);
        if self.log_coeff != 0 {
            if *t <= 0 {
                return Err(Error::NonIntegrable("log term at nonpositive argument".into()));
            }
            out = &out + &Ball::from_rational(t, prec).ln()?.mul_rational(&self.log_coeff);
        }
        Ok(out)
    }
}

/// `t^k` for a rational and any integer `k`.
pub fn pow_rat(t: &Rational, k: i32) -> Rational {
    if k >= 0 {
        let (n, d) = t.clone().into_numer_denom();
        Rational::from((Integer::from(n.pow(k as u32)), Integer::from(d.pow(k as u32))))
    } else {
        Rational::from(pow_rat(t, -k).recip_ref())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly(center={}, ", self.center)?;
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*t^{}", c.to_f64(), k)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_scalars::q;

    #[test]
    fn antiderivative_inverts_derivative() {
        let mut p = LaurentPoly::zero(q(0, 1));
        p.add_term(-3, q(2, 7));
        p.add_term(-1, q(5, 1));
        p.add_term(4, q(-1, 3));
        let ad = p.antiderivative();
        assert_eq!(ad.log_coeff, q(5, 1));
        let mut back = ad.poly.derivative();
        back.add_term(-1, ad.log_coeff.clone());
        assert_eq!(back, p);
    }

    #[test]
    fn compose_affine_matches_direct_eval() {
        let coeffs = vec![q(1, 2), q(-3, 5), q(7, 11)];
        let p = LaurentPoly::compose_affine(&coeffs, &q(2, 3), &q(-1, 4), q(0, 1));
        let t = q(5, 9);
        let tau = Rational::from(&t * q(2, 3)) + q(-1, 4);
        let direct = q(1, 2) + q(-3, 5) * tau.clone() + q(7, 11) * tau.clone() * tau;
        assert_eq!(p.eval_local(&t).unwrap(), direct);
    }

    #[test]
    fn eval_at_pole_is_domain_error() {
        let p = LaurentPoly::monomial(q(0, 1), -2, q(1, 1));
        assert!(p.eval_local(&q(0, 1)).is_err());
    }

    #[test]
    fn ball_and_exact_eval_agree() {
        let mut p = LaurentPoly::zero(q(0, 1));
        p.add_term(-2, q(-1, 1));
        p.add_term(3, q(13, 17));
        let t = q(7, 10);
        let exact = p.eval_local(&t).unwrap();
        let b = p.eval_ball(&Ball::from_rational(&t, 128)).unwrap();
        assert!(b.contains_rational(&exact));
    }

    #[test]
    fn definite_integral_of_reciprocal_is_log() {
        let p = LaurentPoly::monomial(q(0, 1), -1, q(1, 1));
        let v = p.antiderivative().definite(&q(1, 1), &q(2, 1), 128).unwrap();
        assert!((v.to_f64() - 2f64.ln()).abs() < 1e-15);
    }
}
