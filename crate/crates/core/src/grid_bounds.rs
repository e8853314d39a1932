//! Sup-norm and positivity bounds from endpoint values and the `L^2` norm of the derivative.
//!
//! On `[a, b]`: `|f(x) - (f(a)+f(b))/2| <= sqrt(b-a)/2 ||f'||_{L^2(a,b)}`.

use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_scalars::{Ball, RAD_PREC};
use crate::par;
use crate::pieces::{Antiderivative, LaurentPoly, PowLog};

/// A C^1 function with exact point values and exact `int_a^b (f')^2`.
pub trait GridFunction: Sync {
    fn value(&self, x: &Rational, prec: u32) -> Result<Ball>;
    fn deriv_l2_sq(&self, a: &Rational, b: &Rational, prec: u32) -> Result<Ball>;
    /// Closed interval on which both handles are valid.
    fn domain(&self) -> (Rational, Rational);
}

#[derive(Clone, Debug, Serialize)]
pub struct GridBound {
    pub n: usize,
    /// Upper bound on `sup |f|` over `[a, b]`.
    #[serde(skip)]
    pub bound: Ball,
    #[serde(skip)]
    pub per_interval: Vec<Ball>,
}

#[derive(Clone, Debug)]
pub struct GridPositivity {
    pub n: usize,
    /// Smallest certified lower bound over the subintervals.
    pub min_lower: Ball,
    pub per_interval: Vec<Ball>,
}

fn nodes(a: &Rational, b: &Rational, n: usize) -> Vec<Rational> {
    let h = Rational::from(b - a) / n as u32;
    (0..=n).map(|k| Rational::from(&h * k as u32) + a).collect()
}

/// Ball whose every point is at least `sqrt(max(0, upper(x)))`.
fn sqrt_of_upper(x: &Ball) -> Result<Ball> {
    let u = x.upper();
    if u.is_sign_negative() {
        return Ok(Ball::zero(x.prec()));
    }
    let prec = x.prec().max(RAD_PREC);
    Ball::with_rad(Float::with_val(prec, &u), &Float::new(RAD_PREC)).sqrt()
}

fn check_domain<F: GridFunction + ?Sized>(f: &F, a: &Rational, b: &Rational, n: usize) -> Result<()> {
    if n == 0 || a >= b {
        return Err(Error::HandleDomain(format!("empty grid [{a}, {b}] with n = {n}")));
    }
    let (lo, hi) = f.domain();
    if *a < lo || *b > hi {
        return Err(Error::HandleDomain(format!("[{a}, {b}] outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// Per-subinterval `(midvalue, half-oscillation)` pairs.
fn interval_terms<F: GridFunction + ?Sized>(f: &F, a: &Rational, b: &Rational, n: usize, prec: u32) -> Result<Vec<(Ball, Ball)>> {
    check_domain(f, a, b, n)?;
    let xs = nodes(a, b, n);
    let vals: Vec<Result<Ball>> = par::map(&xs, |x| f.value(x, prec));
    let vals: Vec<Ball> = vals.into_iter().collect::<Result<_>>()?;
    let h = Rational::from(b - a) / n as u32;
    let sqrt_h = Ball::from_rational(&h, prec).sqrt()?;
    let idx: Vec<usize> = (0..n).collect();
    let out: Vec<Result<(Ball, Ball)>> = par::map(&idx, |&k| {
        let l2 = f.deriv_l2_sq(&xs[k], &xs[k + 1], prec)?;
        let osc = (&sqrt_h * &sqrt_of_upper(&l2)?).div_int(2);
        let mean = (&vals[k] + &vals[k + 1]).div_int(2);
        Ok((mean, osc))
    });
    out.into_iter().collect()
}

/// `max_k |f(x_k)+f(x_{k+1})|/2 + sqrt(h)/2 ||f'||_{L^2[x_k, x_{k+1}]}`.
pub fn sup_bound<F: GridFunction + ?Sized>(f: &F, a: &Rational, b: &Rational, n: usize, prec: u32) -> Result<GridBound> {
    let terms = interval_terms(f, a, b, n, prec)?;
    let per_interval: Vec<Ball> = terms.iter().map(|(m, o)| &m.abs() + o).collect();
    let bound = per_interval.iter().skip(1).fold(per_interval[0].clone(), |acc, v| acc.max(v));
    Ok(GridBound { n, bound, per_interval })
}

/// Certifies `f > 0` on `[a, b]`; fails with the first subinterval whose lower bound is not positive.
pub fn lower_bound_positive<F: GridFunction + ?Sized>(
    f: &F,
    a: &Rational,
    b: &Rational,
    n: usize,
    prec: u32,
) -> Result<GridPositivity> {
    let terms = interval_terms(f, a, b, n, prec)?;
    let per_interval: Vec<Ball> = terms.iter().map(|(m, o)| m - o).collect();
    if let Some(k) = per_interval.iter().position(|v| !v.is_positive()) {
        return Err(Error::CertificateFailed(format!(
            "positivity on subinterval {k} of {n}: lower bound {}",
            per_interval[k].mid_decimal(8)
        )));
    }
    let min_lower = per_interval
        .iter()
        .skip(1)
        .fold(per_interval[0].clone(), |acc, v| if v.lower() < acc.lower() { v.clone() } else { acc });
    Ok(GridPositivity { n, min_lower, per_interval })
}

/// `int_a^b (g')^2` for a Laurent polynomial, exact except for a log term.
pub fn l2_deriv_laurent(g: &LaurentPoly, a: &Rational, b: &Rational, prec: u32) -> Result<Ball> {
    let ta = Rational::from(a - &g.center);
    let tb = Rational::from(b - &g.center);
    let d = g.derivative();
    if d.min_exp().is_some_and(|k| k < 0) && (ta == 0 || tb == 0 || (ta < 0) != (tb < 0)) {
        return Err(Error::NonIntegrable(format!("(g')^2 has a pole in [{a}, {b}]")));
    }
    let sq: Antiderivative = d.square().antiderivative();
    if sq.log_coeff != 0 && (ta <= 0 || tb <= 0) {
        return Err(Error::NonIntegrable("log term on the negative side".into()));
    }
    sq.definite(&ta, &tb, prec)
}

/// `int_a^b (g')^2` for a power-log sum in its own variable (`0 < a < b`).
pub fn l2_deriv_exact(g: &PowLog, a: &Rational, b: &Rational) -> Result<Ball> {
    if *a <= 0 {
        return Err(Error::NonIntegrable(format!("power-log integrand at nonpositive {a}")));
    }
    g.derivative().square().definite(a, b)
}

/// Laurent polynomial in `x` on a fixed interval.
pub struct LaurentFn {
    pub f: LaurentPoly,
    pub lo: Rational,
    pub hi: Rational,
}

impl GridFunction for LaurentFn {
    fn value(&self, x: &Rational, prec: u32) -> Result<Ball> {
        Ok(Ball::from_rational(&self.f.eval_x(x)?, prec))
    }

    fn deriv_l2_sq(&self, a: &Rational, b: &Rational, prec: u32) -> Result<Ball> {
        l2_deriv_laurent(&self.f, a, b, prec)
    }

    fn domain(&self) -> (Rational, Rational) {
        (self.lo.clone(), self.hi.clone())
    }
}

/// `sign * int_base^x g(t) dt` for a Laurent polynomial `g`; derivative is `sign * g`.
pub struct IntegralFn {
    pub integrand: LaurentPoly,
    pub base: Rational,
    pub negate: bool,
    pub lo: Rational,
    pub hi: Rational,
    anti: Antiderivative,
    sq_anti: Antiderivative,
}

impl IntegralFn {
    pub fn new(integrand: LaurentPoly, base: Rational, negate: bool, lo: Rational, hi: Rational) -> IntegralFn {
        let anti = integrand.antiderivative();
        let sq_anti = integrand.square().antiderivative();
        IntegralFn { integrand, base, negate, lo, hi, anti, sq_anti }
    }
}

impl GridFunction for IntegralFn {
    fn value(&self, x: &Rational, prec: u32) -> Result<Ball> {
        let c = &self.integrand.center;
        let v = self.anti.definite(&Rational::from(&self.base - c), &Rational::from(x - c), prec)?;
        Ok(if self.negate { -v } else { v })
    }

    fn deriv_l2_sq(&self, a: &Rational, b: &Rational, prec: u32) -> Result<Ball> {
        let c = &self.integrand.center;
        self.sq_anti.definite(&Rational::from(a - c), &Rational::from(b - c), prec)
    }

    fn domain(&self) -> (Rational, Rational) {
        (self.lo.clone(), self.hi.clone())
    }
}

/// Power-log sum with its squared derivative pre-integrated.
pub struct PowLogFn {
    pub f: PowLog,
    df2: PowLog,
    pub lo: Rational,
    pub hi: Rational,
}

impl PowLogFn {
    pub fn new(f: PowLog, lo: Rational, hi: Rational) -> PowLogFn {
        let df2 = f.derivative().square().antiderivative();
        PowLogFn { f, df2, lo, hi }
    }
}

impl GridFunction for PowLogFn {
    // The sum carries its own working precision.
    fn value(&self, x: &Rational, _prec: u32) -> Result<Ball> {
        self.f.eval_rational(x)
    }

    fn deriv_l2_sq(&self, a: &Rational, b: &Rational, _prec: u32) -> Result<Ball> {
        Ok(&self.df2.eval_rational(b)? - &self.df2.eval_rational(a)?)
    }

    fn domain(&self) -> (Rational, Rational) {
        (self.lo.clone(), self.hi.clone())
    }
}
