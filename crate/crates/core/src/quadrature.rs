//! Rigorous integration of `e^{lambda s} sum_k w_k (alpha_k + beta_k s)^{p_k}` over real `s`.
//!
//! Each panel `[c - h, c + h]` uses the Taylor expansion about `c` truncated at order `N`;
//! the remainder is bounded through Cauchy's estimate on the disk of radius `rho`.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::exact_scalars::{Ball, ComplexBall, RAD_PREC};
use crate::par;

#[derive(Clone, Debug)]
pub struct PowTerm {
    pub weight: ComplexBall,
    pub alpha: ComplexBall,
    pub beta: ComplexBall,
    /// Half-integer or integer exponent (principal branch).
    pub p: Rational,
}

#[derive(Clone, Debug)]
pub struct ExpPowSum {
    pub lambda: ComplexBall,
    pub terms: Vec<PowTerm>,
}

#[derive(Clone, Debug)]
pub struct PanelConfig {
    /// Panel half-width.
    pub h: Rational,
    /// Cauchy radius, `> h`.
    pub rho: Rational,
    pub order: usize,
}

impl PanelConfig {
    pub fn laplace() -> PanelConfig {
        PanelConfig { h: Rational::from((1, 16)), rho: Rational::from((1, 2)), order: 30 }
    }

    pub fn oscillatory() -> PanelConfig {
        PanelConfig { h: Rational::from((1, 2)), rho: Rational::from(2), order: 40 }
    }
}

/// Quadrature result plus the bookkeeping needed for the report.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: ComplexBall,
    /// Where the panel sum stopped.
    pub cutoff: Rational,
    pub panels: usize,
    /// Bound on the discarded tail beyond `cutoff`.
    pub tail: Ball,
}

fn binom_series(p: &Rational, n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n);
    let mut c = Rational::from(1);
    for j in 0..n {
        out.push(c.clone());
        c *= Rational::from(p - j as u32) / (j as u32 + 1);
    }
    out
}

fn cmul_rational_ball(z: &ComplexBall, q: &Rational) -> ComplexBall {
    z.scale_rational(q)
}

impl ExpPowSum {
    fn prec(&self) -> u32 {
        self.lambda.prec()
    }

    /// Taylor coefficients of the integrand about real `c`, orders `0..n`.
    pub fn taylor(&self, c: &Rational, n: usize) -> Result<Vec<ComplexBall>> {
        let prec = self.prec();
        let cb = Ball::from_rational(c, prec);
        // e^{lambda c} sum (lambda t)^j / j!
        let e0 = self.lambda.scale(&cb).exp();
        let mut exp_series = Vec::with_capacity(n);
        let mut cur = e0;
        for j in 0..n {
            exp_series.push(cur.clone());
            cur = (&cur * &self.lambda).scale_rational(&Rational::from((1, j as u32 + 1)));
        }
        let mut pow_series = vec![ComplexBall::zero(prec); n];
        for term in &self.terms {
            let v = &term.alpha + &term.beta.scale(&cb);
            let lead = &term.weight * &v.pow_rational(&term.p)?;
            let ratio = &term.beta * &v.recip()?;
            let bin = binom_series(&term.p, n);
            let mut rp = lead;
            for (j, bj) in bin.iter().enumerate() {
                pow_series[j] = &pow_series[j] + &cmul_rational_ball(&rp, bj);
                rp = &rp * &ratio;
            }
        }
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = ComplexBall::zero(prec);
            for j in 0..=k {
                acc = &acc + &(&exp_series[j] * &pow_series[k - j]);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Upper bound of `|f|` on the closed disk of radius `rho` about real `c`.
    pub fn disk_majorant(&self, c: &Rational, rho: &Rational) -> Result<Ball> {
        let prec = self.prec();
        let cb = Ball::from_rational(c, prec);
        let rb = Ball::from_rational(rho, prec);
        let lam_abs = self.lambda.abs();
        let expo = &(&self.lambda.re * &cb) + &(&lam_abs * &rb);
        let mut sum = Ball::zero(prec);
        for term in &self.terms {
            let v = &term.alpha + &term.beta.scale(&cb);
            let br = &term.beta.abs() * &rb;
            // disk must stay in the right half-plane for the principal branch
            if !(&v.re - &br).is_positive() {
                return Err(Error::Domain(format!("panel disk at {c} reaches the branch cut")));
            }
            let vabs = v.abs();
            let base = if term.p < 0 { &vabs - &br } else { &vabs + &br };
            let lower = Ball::from_endpoints(&base.lower(), &base.lower(), prec);
            let upper = Ball::from_endpoints(&base.upper(), &base.upper(), prec);
            let b = if term.p < 0 { lower } else { upper };
            let m = b.pow_rational(&term.p)?;
            sum = &sum + &(&term.weight.abs() * &m);
        }
        let e = expo.exp();
        Ok(point_upper(&(&e * &sum)))
    }

    /// One panel `[c - h, c + h]`.
    fn panel(&self, c: &Rational, cfg: &PanelConfig) -> Result<ComplexBall> {
        let prec = self.prec();
        let coeffs = self.taylor(c, cfg.order)?;
        let hb = Ball::from_rational(&cfg.h, prec);
        let mut acc = ComplexBall::zero(prec);
        let mut hp = hb.clone();
        for (n, a) in coeffs.iter().enumerate() {
            if n % 2 == 0 {
                acc = &acc + &a.scale(&hp.mul_rational(&Rational::from((2, n as u32 + 1))));
            }
            hp = &hp * &hb;
        }
        // 2 h M q^N / (1 - q), q = h / rho
        let q = Rational::from(&cfg.h / &cfg.rho);
        if q >= 1 {
            return Err(Error::Domain("panel half-width must be below the Cauchy radius".into()));
        }
        let m = self.disk_majorant(c, &cfg.rho)?;
        let qn = Ball::from_rational(&q, prec).powi(cfg.order as i64);
        let one_minus = Ball::from_rational(&Rational::from(1 - &q), prec);
        let rem = (&(&m * &qn) * &hb).mul_int(2).div_ball(&one_minus)?;
        let r = rem.abs_upper();
        Ok(ComplexBall::new(acc.re.add_error(&r), acc.im.add_error(&r)))
    }

    /// `int_a^b` with equal panels of half-width at most `cfg.h`.
    pub fn integrate(&self, a: &Rational, b: &Rational, cfg: &PanelConfig) -> Result<(ComplexBall, usize)> {
        if a >= b {
            return Ok((ComplexBall::zero(self.prec()), 0));
        }
        let len = Rational::from(b - a);
        let per = Rational::from(&cfg.h * 2u32);
        let m = Rational::from(&len / &per).ceil().numer().to_u32().unwrap_or(1).max(1) as usize;
        let h = Rational::from(&len / (2 * m as u32));
        let local = PanelConfig { h: h.clone(), ..cfg.clone() };
        let centers: Vec<Rational> = (0..m).map(|k| Rational::from(&h * (2 * k as u32 + 1)) + a).collect();
        let parts: Vec<Result<ComplexBall>> = par::map(&centers, |c| self.panel(c, &local));
        let mut acc = ComplexBall::zero(self.prec());
        for p in parts {
            acc = &acc + &p?;
        }
        Ok((acc, m))
    }

    /// Bound on `|int_s^inf|` for decaying `e^{lambda s}` and nonincreasing powers.
    pub fn tail_bound(&self, s: &Rational) -> Result<Ball> {
        let prec = self.prec();
        if !self.lambda.re.is_negative() {
            return Err(Error::Domain("tail bound needs Re(lambda) < 0".into()));
        }
        let sb = Ball::from_rational(s, prec);
        let mut sum = Ball::zero(prec);
        for term in &self.terms {
            if term.p > 0 {
                return Err(Error::Domain("tail bound needs nonpositive exponents".into()));
            }
            // |alpha + beta s|^2 must be nondecreasing beyond s
            let slope = &(&term.alpha.re * &term.beta.re) + &(&term.alpha.im * &term.beta.im);
            let grow = &slope + &(&term.beta.norm_sqr() * &sb);
            if grow.lower() < 0 {
                return Err(Error::Domain("base modulus decreasing past the tail cutoff".into()));
            }
            let v = &term.alpha + &term.beta.scale(&sb);
            let m = v.abs().pow_rational(&term.p)?;
            sum = &sum + &(&term.weight.abs() * &m);
        }
        let decay = self.lambda.re.mul_rational(s).exp();
        let inv = (-&self.lambda.re).try_recip()?;
        Ok(point_upper(&(&(&sum * &decay) * &inv)))
    }

    /// `int_0^inf`: panels up to the first multiple of the panel width where the tail is below
    /// the working precision, never beyond `s_max`.
    pub fn integrate_laplace(&self, s_max: &Rational, cfg: &PanelConfig) -> Result<QuadResult> {
        let prec = self.prec();
        let step = Rational::from(&cfg.h * 2u32);
        let scale = self.tail_bound(&Rational::new())?;
        let negligible = {
            let mut e = Float::with_val(RAD_PREC, 1);
            e >>= prec + 16;
            Ball::with_rad(Float::with_val(prec, &e), &Float::new(RAD_PREC))
        };
        let mut cut = step.clone();
        loop {
            if cut >= *s_max {
                cut = s_max.clone();
                break;
            }
            let t = self.tail_bound(&cut)?;
            if t.upper() <= (&negligible * &scale).upper() {
                break;
            }
            cut += &step;
        }
        let (v, panels) = self.integrate(&Rational::new(), &cut, cfg)?;
        let tail = self.tail_bound(&cut)?;
        let r = tail.upper();
        Ok(QuadResult {
            value: ComplexBall::new(v.re.add_error(&r), v.im.add_error(&r)),
            cutoff: cut,
            panels,
            tail,
        })
    }
}

/// Exact ball at the upper end of `b`.
fn point_upper(b: &Ball) -> Ball {
    let u = b.upper();
    Ball::with_rad(Float::with_val(b.prec().max(RAD_PREC), &u), &Float::new(RAD_PREC))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_scalars::q;

    fn real(v: i64) -> ComplexBall {
        ComplexBall::from_real(Ball::from_int(v, 128))
    }

    #[test]
    fn pure_exponential() {
        // int_0^inf e^{-3s} ds = 1/3
        let f = ExpPowSum {
            lambda: real(-3),
            terms: vec![PowTerm { weight: real(1), alpha: real(1), beta: real(0), p: q(0, 1) }],
        };
        let r = f.integrate_laplace(&q(50, 1), &PanelConfig::laplace()).unwrap();
        assert!(r.value.re.contains_rational(&q(1, 3)));
        assert!(r.value.re.rad().to_f64() < 1e-25);
        assert!(r.cutoff < 50);
    }

    #[test]
    fn half_integer_power() {
        // int_0^1 (1+s)^{-1/2} = 2(sqrt2 - 1)
        let f = ExpPowSum {
            lambda: real(0),
            terms: vec![PowTerm { weight: real(1), alpha: real(1), beta: real(1), p: q(-1, 2) }],
        };
        let (v, _) = f.integrate(&q(0, 1), &q(1, 1), &PanelConfig::laplace()).unwrap();
        let want = 2.0 * (2f64.sqrt() - 1.0);
        assert!((v.re.to_f64() - want).abs() < 1e-15);
        assert!(v.re.rad().to_f64() < 1e-20);
    }

    #[test]
    fn complex_base() {
        // int_0^1 (1+is)^{-2} ds = [i (1+is)^{-1}]_0^1 = i/(1+i) - i = (1 - i)/2 - ... check numerically
        let f = ExpPowSum {
            lambda: real(0),
            terms: vec![PowTerm { weight: real(1), alpha: real(1), beta: ComplexBall::i(128), p: q(-2, 1) }],
        };
        let (v, _) = f.integrate(&q(0, 1), &q(1, 1), &PanelConfig::laplace()).unwrap();
        // i/(1+i) - i = (1+i)/2 - i = 1/2 - i/2
        assert!(v.re.contains_rational(&q(1, 2)));
        assert!(v.im.contains_rational(&q(-1, 2)));
    }

    #[test]
    fn branch_cut_rejected() {
        let f = ExpPowSum {
            lambda: real(0),
            terms: vec![PowTerm { weight: real(1), alpha: real(0), beta: real(1), p: q(-1, 2) }],
        };
        assert!(f.integrate(&q(0, 1), &q(1, 1), &PanelConfig::laplace()).is_err());
    }
}
