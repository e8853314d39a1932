use std::collections::BTreeMap;

use rug::Rational;

use super::laurent::LaurentPoly;
use crate::error::{Error, Result};
use crate::exact_scalars::Ball;

/// Finite sum of `c z^e ln^m z` with ball coefficients and rational exponents, for `z > 0`.
#[derive(Clone, Debug)]
pub struct PowLog {
    prec: u32,
    terms: BTreeMap<(Rational, u32), Ball>,
}

/// Precomputed `z^e` and `ln z` at one point.
struct PointCache {
    z: Ball,
    ln: Option<Ball>,
    pows: BTreeMap<Rational, Ball>,
}

impl PointCache {
    fn new(z: Ball) -> PointCache {
        PointCache { z, ln: None, pows: BTreeMap::new() }
    }

    fn pow(&mut self, e: &Rational) -> Result<Ball> {
        if let Some(v) = self.pows.get(e) {
            return Ok(v.clone());
        }
        let v = if *e.denom() == 1 {
            let k = e.numer().to_i64().ok_or_else(|| Error::Domain("exponent too large".into()))?;
            if k < 0 {
                self.z.try_recip()?.powi(-k)
            } else {
                self.z.powi(k)
            }
        } else {
            self.z.pow_rational(e)?
        };
        self.pows.insert(e.clone(), v.clone());
        Ok(v)
    }

    fn ln(&mut self) -> Result<Ball> {
        if self.ln.is_none() {
            self.ln = Some(self.z.ln()?);
        }
        Ok(self.ln.clone().unwrap())
    }
}

impl PowLog {
    pub fn zero(prec: u32) -> PowLog {
        PowLog { prec, terms: BTreeMap::new() }
    }

    pub fn term(prec: u32, c: Ball, e: Rational, m: u32) -> PowLog {
        let mut p = PowLog::zero(prec);
        p.add_term(c, e, m);
        p
    }

    /// Laurent polynomial in the local variable (its center is dropped).
    pub fn from_laurent(p: &LaurentPoly, prec: u32) -> PowLog {
        let mut out = PowLog::zero(prec);
        for (k, c) in p.terms() {
            out.add_term(Ball::from_rational(c, prec), Rational::from(k), 0);
        }
        out
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, u32, &Ball)> {
        self.terms.iter().map(|((e, m), c)| (e, *m, c))
    }

    pub fn max_log_power(&self) -> u32 {
        self.terms.keys().map(|(_, m)| *m).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, c: Ball, e: Rational, m: u32) {
        if c.is_exact() && c.mid().is_zero() {
            return;
        }
        match self.terms.get_mut(&(e.clone(), m)) {
            Some(v) => *v = &*v + &c,
            None => {
                self.terms.insert((e, m), c);
            }
        }
    }

    pub fn add(&self, other: &PowLog) -> PowLog {
        let mut out = self.clone();
        for (e, m, c) in other.terms() {
            out.add_term(c.clone(), e.clone(), m);
        }
        out
    }

    pub fn sub(&self, other: &PowLog) -> PowLog {
        self.add(&other.scale(&Ball::from_int(-1, self.prec)))
    }

    pub fn scale(&self, s: &Ball) -> PowLog {
        let mut out = PowLog::zero(self.prec);
        for (e, m, c) in self.terms() {
            out.add_term(c * s, e.clone(), m);
        }
        out
    }

    pub fn scale_rational(&self, s: &Rational) -> PowLog {
        let mut out = PowLog::zero(self.prec);
        for (e, m, c) in self.terms() {
            out.add_term(c.mul_rational(s), e.clone(), m);
        }
        out
    }

    /// Multiply by `z^j`.
    pub fn shift(&self, j: &Rational) -> PowLog {
        let mut out = PowLog::zero(self.prec);
        for (e, m, c) in self.terms() {
            out.add_term(c.clone(), Rational::from(e + j), m);
        }
        out
    }

    pub fn mul(&self, other: &PowLog) -> PowLog {
        let mut out = PowLog::zero(self.prec);
        for (e1, m1, c1) in self.terms() {
            for (e2, m2, c2) in other.terms() {
                out.add_term(c1 * c2, Rational::from(e1 + e2), m1 + m2);
            }
        }
        out
    }

    pub fn square(&self) -> PowLog {
        // symmetric products once, doubled
        let v: Vec<_> = self.terms().collect();
        let mut out = PowLog::zero(self.prec);
        for i in 0..v.len() {
            let (e1, m1, c1) = v[i];
            out.add_term(c1.sqr(), Rational::from(e1 * 2u32), m1 * 2);
            for &(e2, m2, c2) in &v[i + 1..] {
                out.add_term((c1 * c2).mul_int(2), Rational::from(e1 + e2), m1 + m2);
            }
        }
        out
    }

    pub fn derivative(&self) -> PowLog {
        let mut out = PowLog::zero(self.prec);
        for (e, m, c) in self.terms() {
            let e1 = Rational::from(e - 1u32);
            if *e != 0 {
                out.add_term(c.mul_rational(e), e1.clone(), m);
            }
            if m > 0 {
                out.add_term(c.mul_int(m as i64), e1, m - 1);
            }
        }
        out
    }

    /// Closed-form antiderivative (no constant).
    pub fn antiderivative(&self) -> PowLog {
        let mut out = PowLog::zero(self.prec);
        for (e, m, c) in self.terms() {
            if *e == -1 {
                out.add_term(c.div_int(m as i64 + 1), Rational::new(), m + 1);
                continue;
            }
            // z^{e+1} sum_j (-1)^j m!/(m-j)! ln^{m-j} z / (e+1)^{j+1}
            let e1 = Rational::from(e + 1u32);
            let mut fall = Rational::from(1);
            let mut pw = e1.clone();
            for j in 0..=m {
                let mut k = Rational::from(&fall / &pw);
                if j % 2 == 1 {
                    k = -k;
                }
                out.add_term(c.mul_rational(&k), e1.clone(), m - j);
                fall *= m - j;
                pw *= &e1;
            }
        }
        out
    }

    fn eval_cached(&self, cache: &mut PointCache) -> Result<Ball> {
        let mut acc = Ball::zero(self.prec);
        for (e, m, c) in self.terms() {
            let mut t = c * &cache.pow(e)?;
            if m > 0 {
                t = &t * &cache.ln()?.powi(m as i64);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    pub fn eval(&self, z: &Ball) -> Result<Ball> {
        if !z.is_positive() {
            return Err(Error::Domain("power-log sum evaluated at z <= 0".into()));
        }
        self.eval_cached(&mut PointCache::new(z.clone()))
    }

    pub fn eval_rational(&self, z: &Rational) -> Result<Ball> {
        self.eval(&Ball::from_rational(z, self.prec))
    }

    /// `int_a^b`, both endpoints positive.
    pub fn definite(&self, a: &Rational, b: &Rational) -> Result<Ball> {
        let f = self.antiderivative();
        Ok(&f.eval_rational(b)? - &f.eval_rational(a)?)
    }

    /// `int_z^{z0}` as a function of `z`: `F(z0) - F(z)`.
    pub fn integral_to(&self, z0: &Rational) -> Result<PowLog> {
        let f = self.antiderivative();
        let c = f.eval_rational(z0)?;
        let mut out = f.scale(&Ball::from_int(-1, self.prec));
        out.add_term(c, Rational::new(), 0);
        Ok(out)
    }

    /// `int_{z0}^z` as a function of `z`.
    pub fn integral_from(&self, z0: &Rational) -> Result<PowLog> {
        Ok(self.integral_to(z0)?.scale(&Ball::from_int(-1, self.prec)))
    }

    /// Largest coefficient radius, to judge whether precision suffices.
    pub fn max_rad(&self) -> f64 {
        self.terms.values().map(|c| c.rad().to_f64()).fold(0.0, f64::max)
    }
}
