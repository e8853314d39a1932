//! The far domain `[L, inf)`: `N0`, the oscillatory kernels, `w0` and the contraction there.

use rug::Rational;

use crate::certificate::{Certificate, Check, ContractionCertificate};
use crate::error::{Error, Result};
use crate::exact_scalars::{decimal, q, Ball, ComplexBall};
use crate::pieces::{a_ball, b_ball, big_l, sqrt6};
use crate::quadrature::{ExpPowSum, PanelConfig, PowTerm};

/// `K = 4412401 / (98304 sqrt 6)`, the limit of `x^{19/2} |N0|`.
pub fn k_const(prec: u32) -> Ball {
    sqrt6(prec).recip().mul_rational(&q(4412401, 98304))
}

fn c1(prec: u32) -> Ball {
    sqrt6(prec).recip().mul_rational(&q(1225, 90049))
}

fn c2() -> Rational {
    q(30625, 2161176)
}

fn check_domain(x: &Ball) -> Result<()> {
    if x.lower() < big_l() {
        return Err(Error::Domain(format!("x = {} lies left of L", x.mid_decimal(12))));
    }
    Ok(())
}

/// `1 - c1 x^{-5/2} + c2 x^{-5}`.
pub fn n0_bracket(x: &Ball) -> Result<Ball> {
    let prec = x.prec();
    let u = x.pow_rational(&q(-5, 2))?;
    let lin = &c1(prec) * &u;
    let quad = u.sqr().mul_rational(&c2());
    Ok(&(&Ball::one(prec) - &lin) + &quad)
}

pub fn n0_eval(x: &Ball) -> Result<Ball> {
    check_domain(x)?;
    let prec = x.prec();
    let p = x.pow_rational(&q(-19, 2))?;
    Ok(-&(&(&k_const(prec) * &p) * &n0_bracket(x)?))
}

/// `[x^{1/8} N0]'`, positive on the whole domain.
pub fn n0_weighted_derivative(x: &Ball) -> Result<Ball> {
    let prec = x.prec();
    let u = x.pow_rational(&q(-5, 2))?;
    let inner = &(&Ball::from_rational(&q(75, 8), prec) - &(&c1(prec) * &u).mul_rational(&q(95, 8)))
        + &u.sqr().mul_rational(&(c2() * q(115, 8)));
    Ok(&(&k_const(prec) * &x.pow_rational(&q(-83, 8))?) * &inner)
}

/// `G_j(x) = x^{-5/8} e^{-ib x^{5/4}}` for `j = 1` and the conjugate for `j = 2`.
pub fn kernel(j: u8, x: &Ball) -> Result<ComplexBall> {
    let prec = x.prec();
    let phase = &b_ball(prec) * &x.pow_rational(&q(5, 4))?;
    let phase = if j == 1 { -&phase } else { phase };
    let e = ComplexBall::new(Ball::zero(prec), phase).exp();
    Ok(e.scale(&x.pow_rational(&q(-5, 8))?))
}

/// The Laplace integrand of `w0` and of `dw0/dz`, with `z = x^{5/4}`.
#[derive(Clone, Debug)]
pub struct LaplaceIntegrand {
    pub z: Ball,
    pub value: ExpPowSum,
    pub z_derivative: ExpPowSum,
}

/// `(prefactor, power of z, exponent of 1 + is)`.
fn w0_terms(prec: u32) -> [(Ball, i64, Rational); 3] {
    let s6 = sqrt6(prec);
    let c = (&s6 * &a_ball(prec).recip()).mul_rational(&q(-4412401, 368640));
    let k1 = s6.mul_rational(&q(1225, 540294));
    let k2 = q(30625, 2161176);
    [
        (c.clone(), -7, q(-15, 2)),
        (-&(&c * &k1), -9, q(-19, 2)),
        (c.mul_rational(&k2), -11, q(-23, 2)),
    ]
}

impl LaplaceIntegrand {
    pub fn new(x: &Ball) -> Result<LaplaceIntegrand> {
        check_domain(x)?;
        let prec = x.prec();
        let z = x.pow_rational(&q(5, 4))?;
        let b = b_ball(prec);
        let one = ComplexBall::one(prec);
        let i = ComplexBall::i(prec);
        let term = |w: Ball, p: Rational| PowTerm {
            weight: ComplexBall::from_real(w),
            alpha: one.clone(),
            beta: i.clone(),
            p,
        };
        let cterm = |w: ComplexBall, p: Rational| PowTerm { weight: w, alpha: one.clone(), beta: i.clone(), p };
        let mut value = Vec::new();
        let mut deriv = Vec::new();
        for (pre, e, p) in w0_terms(prec) {
            let w = &pre * &z.powi(e);
            value.push(term(w.clone(), p.clone()));
            // d/dz of the power of z
            deriv.push(term((&pre * &z.powi(e - 1)).mul_int(e), p.clone()));
            // -s b w (1+is)^p = i b w (1+is)^{p+1} - i b w (1+is)^p
            let ibw = ComplexBall::new(Ball::zero(prec), &b * &w);
            deriv.push(cterm(ibw.clone(), Rational::from(&p + 1u32)));
            deriv.push(cterm(-&ibw, p));
        }
        let lambda = ComplexBall::from_real(-&(&b * &z));
        Ok(LaplaceIntegrand {
            z,
            value: ExpPowSum { lambda: lambda.clone(), terms: value },
            z_derivative: ExpPowSum { lambda, terms: deriv },
        })
    }
}

#[derive(Clone, Debug)]
pub struct W0Value {
    pub w0: Ball,
    pub w0_prime: Ball,
    /// Where the panel sum stopped (never beyond the requested `S`).
    pub cutoff: Rational,
    pub panels: usize,
    pub tail: Ball,
}

/// `w0` and `w0'` by quadrature of the Laplace integral on `[0, S]` plus an exponential tail bound.
pub fn w0_laplace(x: &Ball, tail_s: &Rational) -> Result<W0Value> {
    let li = LaplaceIntegrand::new(x)?;
    // shrink panels with |lambda| so the Cauchy majorant e^{|lambda| rho} stays at its size at L
    let lam = li.value.lambda.abs().upper();
    let k = (lam / 15u32).ceil().to_integer().map_or(1, |v| v.to_u32().unwrap_or(u32::MAX)).max(1);
    let base = PanelConfig::laplace();
    let cfg = PanelConfig { h: base.h / k, rho: base.rho / k, order: base.order };
    let v = li.value.integrate_laplace(tail_s, &cfg)?;
    let d = li.z_derivative.integrate_laplace(tail_s, &cfg)?;
    // dz/dx = (5/4) x^{1/4}
    let dz = x.pow_rational(&q(1, 4))?.mul_rational(&q(5, 4));
    let w0 = v.value.re;
    let w0_prime = &d.value.re * &dz;
    if !w0.is_finite() || !w0_prime.is_finite() {
        return Err(Error::PrecisionExhausted { bits: x.prec(), last: Box::new(w0) });
    }
    Ok(W0Value { w0, w0_prime, cutoff: v.cutoff, panels: v.panels + d.panels, tail: &v.tail + &d.tail })
}

/// Default tail cutoff for the Laplace integral.
pub fn default_tail_s() -> Rational {
    q(50, 1)
}

/// `(w0(x), w0'(x))` at the precision of `x`.
pub fn w0_eval(x: &Ball) -> Result<(Ball, Ball)> {
    let v = w0_laplace(x, &default_tail_s())?;
    Ok((v.w0, v.w0_prime))
}

/// Independent route: integration by parts of the variation-of-parameters formula.
///
/// `w0 = 8/(5ab) x^{-1/2} N0 + 8/(5ab) Re[G_1(x) I(x)]`, `I = int_x^inf [t^{1/8} N0]' e^{ib t^{5/4}} dt`.
/// `I` is integrated in `u = t^{5/4}` up to `u >= 182` (so `t >= 64`); past that,
/// `|int| <= |T^{1/8} N0(T)|` since `[t^{1/8} N0]' > 0` and `t^{1/8} N0 -> 0`.
pub fn w0_ibp(x: &Ball) -> Result<(Ball, Ball)> {
    check_domain(x)?;
    let prec = x.prec();
    let b = b_ball(prec);
    let k = k_const(prec);
    let c1b = c1(prec);
    let u0 = x.pow_rational(&q(5, 4))?;
    let lo = u0.lower();
    let span = Rational::from(182) - lo.to_rational().ok_or_else(|| Error::Domain("x^{5/4} not finite".into()))?;
    let span = Rational::from(span.ceil().numer()).max(Rational::from(1));
    let base = ComplexBall::from_real(u0.clone());
    let one = ComplexBall::one(prec);
    let coef = |w: Ball, p: Rational| PowTerm {
        weight: ComplexBall::from_real(w.mul_rational(&q(4, 5))),
        alpha: base.clone(),
        beta: one.clone(),
        p,
    };
    let f = ExpPowSum {
        lambda: ComplexBall::new(Ball::zero(prec), b.clone()),
        terms: vec![
            coef(k.mul_rational(&q(75, 8)), q(-17, 2)),
            coef(-&(&k * &c1b).mul_rational(&q(95, 8)), q(-21, 2)),
            coef(k.mul_rational(&(c2() * q(115, 8))), q(-25, 2)),
        ],
    };
    let (j, _) = f.integrate(&Rational::new(), &span, &PanelConfig::oscillatory())?;
    let phase0 = ComplexBall::new(Ball::zero(prec), &b * &u0).exp();
    let mut i2 = &phase0 * &j;
    let t_end = (&u0 + &Ball::from_rational(&span, prec)).pow_rational(&q(4, 5))?;
    let tail = (&t_end.pow_rational(&q(1, 8))? * &n0_eval(&t_end)?).abs_upper();
    i2 = ComplexBall::new(i2.re.add_error(&tail), i2.im.add_error(&tail));

    let pref = (&a_ball(prec) * &b).recip().mul_rational(&q(8, 5));
    let g1 = kernel(1, x)?;
    let n0 = n0_eval(x)?;
    let w0 = &pref * &(&(&x.pow_rational(&q(-1, 2))? * &n0) + &(&g1 * &i2).re);

    // G_1' = G_1 (-5/(8x) - i (5/4) b x^{1/4})
    let dg = ComplexBall::new(
        x.recip().mul_rational(&q(-5, 8)),
        (&b * &x.pow_rational(&q(1, 4))?).mul_rational(&q(-5, 4)),
    );
    let g1p = &g1 * &dg;
    // [x^{-1/2} N0]' = -K [-10 x^{-11} + (25/2) c1 x^{-27/2} - 15 c2 x^{-16}]
    let dn = -&(&k
        * &(&(&x.powi(-11).mul_int(-10) + &(&c1b * &x.pow_rational(&q(-27, 2))?).mul_rational(&q(25, 2)))
            - &x.powi(-16).mul_rational(&(c2() * 15u32))));
    let boundary = &x.pow_rational(&q(-5, 8))? * &n0_weighted_derivative(x)?;
    let w0p = &pref * &(&(&dn + &(&g1p * &i2).re) - &boundary);
    Ok((w0, w0p))
}

/// `||w0||_{10} <= 15/2` and `|w0'| <= 8.85 x^{-39/4}`.
pub fn w0_norm() -> Rational {
    q(15, 2)
}

pub fn w0_prime_coeff() -> Rational {
    decimal("8.85")
}

fn k_bound() -> Rational {
    decimal("18.33")
}

/// The inequality chain behind `||w0||_{10} <= 15/2`.
pub fn certify_w0_norms(prec: u32) -> Result<Certificate> {
    let a = a_ball(prec);
    let b = b_ball(prec);
    let lb = Ball::from_rational(&big_l(), prec);
    let k = k_const(prec);
    let c1b = c1(prec);
    let u_l = lb.pow_rational(&q(-5, 2))?;
    let mut checks = Vec::new();

    // |e^{i theta}| = 1 exactly; the enclosure must contain it
    let g = &kernel(1, &lb)?.abs() * &lb.pow_rational(&q(5, 8))?;
    checks.push(Check::contains("|G_1(L)| L^{5/8} = 1", g, q(1, 1)));

    // x^{19/2}|N0| = K(1 - c1 u + c2 u^2), u = x^{-5/2}; d/du = K(2 c2 u - c1) < 0 for u <= L^{-5/2}
    let slope = &c1b - &u_l.mul_rational(&(c2() * 2u32));
    checks.push(Check::gt("x^{19/2}|N0| increasing: c1 - 2 c2 L^{-5/2} > 0", slope, q(0, 1)));
    let low = &Ball::one(prec) - &(&c1b * &u_l);
    checks.push(Check::gt("N0 < 0: 1 - c1 L^{-5/2} > 0", low, q(0, 1)));
    let lead = &Ball::from_rational(&q(75, 8), prec) - &(&c1b * &u_l).mul_rational(&q(95, 8));
    checks.push(Check::gt("[x^{1/8} N0]' > 0: 75/8 - (95/8) c1 L^{-5/2} > 0", lead, q(0, 1)));
    checks.push(Check::le("lim x^{19/2}|N0| = K <= 18.33", k.clone(), k_bound()));
    checks.push(Check::contains(
        "K encloses 18.324",
        k.add_error_rational(&decimal("1e-3")),
        decimal("18.324"),
    ));
    let at_l = &lb.pow_rational(&q(19, 2))? * &n0_eval(&lb)?.abs();
    checks.push(Check::lt("L^{19/2}|N0(L)| < 18.33", at_l, k_bound()));

    let kb = Ball::from_rational(&k_bound(), prec);
    let ab = &a * &b;
    let norm = (&kb * &ab.recip()).mul_rational(&q(16, 5));
    checks.push(Check::le("16/(5ab) 18.33 <= 15/2", norm, w0_norm()));
    let bl = &b * &lb.pow_rational(&q(5, 4))?;
    let dcoef = &(&kb * &a.recip()).mul_int(2) * &(&Ball::one(prec) + &bl.recip());
    checks.push(Check::le("(2 18.33/a)(1 + 1/(b L^{5/4})) <= 8.85", dcoef, w0_prime_coeff()));
    Ok(Certificate::new("w0 norms", checks))
}

/// Coefficients of `d/du (1 - c1 u + c2 u^2)`, `u = x^{-5/2}`, with the `1/sqrt 6` of `c1` dropped.
pub fn n0_bracket_u_derivative() -> (Rational, Rational) {
    (q(-1225, 90049), c2() * 2u32)
}

/// The inequality chain of the contraction on `[L, inf)` and the resulting bounds on `E` at `L+`.
pub fn certify_d1_contraction(prec: u32) -> Result<ContractionCertificate> {
    let delta = q(2, 1000);
    let w = Ball::from_rational(&w0_norm(), prec);
    let a = a_ball(prec);
    let b = b_ball(prec);
    let s6 = sqrt6(prec);
    let lb = Ball::from_rational(&big_l(), prec);
    let one_d = Ball::from_rational(&(Rational::from(1) + &delta), prec);
    let inv_a = a.recip();
    let l_54 = lb.pow_rational(&q(-5, 4))?;
    let l_354 = lb.pow_rational(&q(-35, 4))?;
    let l_152 = lb.pow_rational(&q(-15, 2))?;
    let mut checks = Vec::new();

    // the constants 5/68 and 16 sqrt6/145 come from integrating t^{-45/4}, t^{-149/8} against the kernels
    checks.push(Check::exact("5/68 = 2 (25/64)(8/85)", q(5, 68) == q(2, 1) * q(25, 64) * q(8, 85), q(5, 68)));
    checks.push(Check::exact("16/145 = 2 (8/145)", q(16, 145) == q(2, 1) * q(8, 145), q(16, 145)));
    // the bracket [1 - 49/(25 sqrt6) x^{-5/2} + 49/12 x^{-5}] lies in [0, 1] once x^{5/2} >= 25 sqrt6/12
    let u_l = lb.pow_rational(&q(-5, 2))?;
    let brk_room = &s6.recip().mul_rational(&q(49, 25)) - &u_l.mul_rational(&q(49, 12));
    checks.push(Check::gt("bracket <= 1 on D1", brk_room, q(0, 1)));
    let brk = &(&Ball::one(prec) - &(&s6.recip() * &u_l).mul_rational(&q(49, 25))) + &u_l.sqr().mul_rational(&q(49, 12));
    checks.push(Check::gt("bracket > 0 at L", brk, q(0, 1)));

    let t1 = (&one_d * &inv_a).mul_rational(&q(5, 68));
    let t2 = (&(&(&s6 * &one_d.sqr()) * &w) * &inv_a).mul_rational(&q(16, 145));
    let ball_map = &(&t1 * &l_54) + &(&t2 * &l_354);
    checks.push(Check::le("ball map at L <= delta", ball_map.clone(), delta.clone()));
    let f1 = inv_a.mul_rational(&q(5, 68));
    let f2 = (&(&(&s6 * &one_d) * &w) * &inv_a).mul_rational(&q(32, 145));
    let factor = &(&f1 * &l_54) + &(&f2 * &l_354);
    checks.push(Check::le("contraction factor <= 0.002", factor.clone(), delta.clone()));

    // |w - w0| <= 0.0167 ||w0|| x^{-45/4}
    let c0167 = &t1 + &(&t2 * &l_152);
    checks.push(Check::le("|w - w0| coefficient <= 0.0167", c0167, decimal("0.0167")));
    let c294 = (&one_d * &w).mul_rational(&q(25, 64));
    checks.push(Check::le("(25/64)(1+delta)||w0|| <= 2.94", c294, decimal("2.94")));
    let c139 = &(&s6 * &one_d.sqr()) * &w.sqr();
    checks.push(Check::le("sqrt6 (1+delta)^2 ||w0||^2 <= 139", c139, decimal("139")));
    let gp = &b.mul_rational(&q(5, 4)) + &l_54.mul_rational(&q(5, 8));
    let inner = &Ball::from_rational(&(decimal("2.94") * q(8, 85)), prec)
        + &l_152.mul_rational(&(decimal("139") * q(8, 145)));
    let c029 = &(&inv_a.mul_int(2) * &gp) * &inner;
    checks.push(Check::le("|w' - w0'| coefficient <= 0.29", c029, decimal("0.29")));

    // E = sqrt(x/6)(w - w0); E' picks up the derivative of sqrt(x/6)
    let s6inv = s6.recip();
    let c00682 = s6inv.mul_rational(&decimal("0.0167"));
    checks.push(Check::le("0.0167/sqrt6 <= 0.00682", c00682, decimal("0.00682")));
    let c0126 = &s6inv.mul_rational(&decimal("0.29"))
        + &(&(&s6inv * &w) * &l_54).mul_rational(&(decimal("0.0167") / 2u32));
    checks.push(Check::le("0.29/sqrt6 + 0.0167 ||w0|| L^{-5/4}/(2 sqrt6) <= 0.126", c0126.clone(), decimal("0.126")));
    let e_l = (&w * &lb.pow_rational(&q(-43, 4))?).mul_rational(&decimal("0.00682"));
    checks.push(Check::le("|E(L+)| <= 5.625e-10", e_l.clone(), decimal("5.625e-10")));
    // the rounded 0.126 gives 2.1211e-9 at L, just above 2.12e-9; the unrounded coefficient is used
    let ep_l = &lb.pow_rational(&q(-21, 2))? * &c0126;
    checks.push(
        Check::le("|E'(L+)| <= 2.12e-9", ep_l.clone(), decimal("2.12e-9"))
            .with_note("coefficient taken before rounding to 0.126"),
    );

    Ok(ContractionCertificate {
        domain: "D1".into(),
        norm: "x^10".into(),
        delta,
        ball_map,
        contraction_factor: factor,
        e_bound: e_l,
        e_prime_bound: ep_l,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(x: Rational) -> Ball {
        Ball::from_rational(&x, 128)
    }

    #[test]
    fn n0_negative_and_bracket_in_unit_interval() {
        let l = at(big_l());
        assert!(n0_eval(&l).unwrap().is_negative());
        let br = n0_bracket(&l).unwrap();
        assert!(br.is_positive() && br.le_rational(&q(1, 1)));
    }

    #[test]
    fn left_of_l_rejected() {
        assert!(n0_eval(&at(q(5, 1))).is_err());
        assert!(w0_eval(&at(q(5, 1))).is_err());
    }

    #[test]
    fn kernels_are_conjugate() {
        let x = at(q(7, 1));
        let g1 = kernel(1, &x).unwrap();
        let g2 = kernel(2, &x).unwrap();
        assert!(g1.re.overlaps(&g2.re));
        assert!(g1.im.overlaps(&-&g2.im));
    }

    #[test]
    fn norm_chain_passes() {
        let c = certify_w0_norms(128).unwrap();
        assert!(c.passed(), "{:?}", crate::certificate::first_failure(&c.checks));
    }

    #[test]
    fn contraction_chain_passes() {
        let c = certify_d1_contraction(128).unwrap();
        assert!(c.passed(), "{:?}", crate::certificate::first_failure(&c.checks));
    }

    #[test]
    fn w0_at_l_matches_remark() {
        let v = w0_laplace(&at(big_l()), &default_tail_s()).unwrap();
        assert!(v.w0.rad().to_f64() < 1e-20);
        assert!(v.w0.add_error_rational(&decimal("1e-12")).contains_rational(&decimal("-1.17414e-7")));
        // independent high-precision value -1.1741451381e-7, 2.0336141879e-7
        assert!((v.w0.to_f64() + 1.1741451381e-7).abs() < 1e-17);
        assert!((v.w0_prime.to_f64() - 2.0336141879e-7).abs() < 1e-17);
        assert!(v.w0_prime.add_error_rational(&decimal("1e-11")).contains_rational(&decimal("2.03367e-7")));
        assert!(v.cutoff < 50);
    }

    #[test]
    fn larger_cutoff_nests() {
        let x = at(big_l());
        let short = w0_laplace(&x, &q(2, 1)).unwrap();
        let long = w0_laplace(&x, &q(4, 1)).unwrap();
        assert!(long.w0.overlaps(&short.w0));
        assert!(long.w0.rad() < short.w0.rad());
        let s50 = w0_laplace(&x, &q(50, 1)).unwrap();
        let s100 = w0_laplace(&x, &q(100, 1)).unwrap();
        assert!(s100.w0.overlaps(&s50.w0));
        assert!(s100.w0.rad() <= s50.w0.rad());
    }

    #[test]
    fn laplace_and_parts_agree() {
        for x in [big_l(), big_l() * 2u32, big_l() * 10u32] {
            let xb = at(x);
            let (w, wp) = w0_eval(&xb).unwrap();
            let (wi, wpi) = w0_ibp(&xb).unwrap();
            assert!(w.overlaps(&wi), "{w} vs {wi}");
            assert!(wp.overlaps(&wpi), "{wp} vs {wpi}");
            assert!(wi.rad().to_f64() < 1e-15);
        }
    }
}
