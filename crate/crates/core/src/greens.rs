//! Bounds on the homogeneous solution pairs: energy identity on D2, monomials on D3, series on D4.

use std::collections::BTreeMap;

use rug::Rational;

use crate::approximant::{residual, DomainId};
use crate::certificate::{Check, Certificate};
use crate::error::{Error, Result};
use crate::exact_scalars::{decimal, q, Ball};
use crate::grid_bounds::{lower_bound_positive, sup_bound, GridBound, PowLogFn};
use crate::pieces::{
    a_series, ab_series, big_l, gamma, induction_constants, l0, pa_coeffs, pow_rat, pu_coeffs, pu_z_poly, r, x0,
    y0_d23_poly, y0_d4_poly, LaurentPoly, PowLog,
};

#[derive(Clone, Debug)]
pub struct GreensBoundSet {
    pub domain: DomainId,
    pub g1: Ball,
    pub g2: Ball,
    pub g1p: Ball,
    pub g2p: Ball,
    /// Domain-specific quantities (`gamma0`, `c_A`, ...).
    pub extras: BTreeMap<String, Ball>,
    pub checks: Vec<Check>,
}

impl GreensBoundSet {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// D2 pair from the energy identity, evaluated from `y0(L)` and `y0(gamma0)` only.
pub fn d2_energy_bounds(gamma0: &Rational, prec: u32) -> Result<GreensBoundSet> {
    if *gamma0 < l0() || *gamma0 > big_l() {
        return Err(Error::Domain(format!("gamma0 = {gamma0} outside D2")));
    }
    let y = y0_d23_poly();
    let yl = Ball::from_rational(&y.eval_x(&big_l())?, prec);
    let yg = Ball::from_rational(&y.eval_x(gamma0)?, prec);
    if !yg.is_positive() {
        return Err(Error::CertificateFailed(format!("y0({gamma0}) is not positive")));
    }
    let width = Ball::from_rational(&Rational::from(gamma0 - l0()), prec);
    let g1p = yl.mul_int(12).sqrt()?;
    let g1 = &(&width * &g1p) + &yl.div_ball(&yg)?.sqrt()?;
    let g2p = Ball::one(prec);
    let g2 = &yg.mul_int(12).sqrt()?.recip() + &width;
    let checks = vec![
        Check::le("||G1'|| <= sqrt(12 y0(L)) <= 3.391", g1p.clone(), decimal("3.391")),
        Check::le("||G1|| <= 3.775", g1.clone(), decimal("3.775")),
        Check::le("||G2'|| <= 1", g2p.clone(), q(1, 1)),
        Check::le("||G2|| <= 1.114", g2.clone(), decimal("1.114")),
    ];
    let mut extras = BTreeMap::new();
    extras.insert("gamma0".into(), Ball::from_rational(gamma0, prec));
    extras.insert("y0(L)".into(), yl);
    extras.insert("y0(gamma0)".into(), yg);
    Ok(GreensBoundSet { domain: DomainId::D2, g1, g2, g1p, g2p, extras, checks })
}

/// `P_u > 0` on `tau in [-1, 1]` through the cubic model `P_a`.
pub fn certify_pu_positive(prec: u32) -> Certificate {
    let pa = pa_coeffs();
    let mut dsum = Rational::new();
    for (k, c) in pu_coeffs().iter().enumerate() {
        let d = if k < 4 { Rational::from(c - &pa[k]) } else { c.clone() };
        dsum += d.abs();
    }
    // P_a(-1)
    let pa_m1 = pa[0].clone() - &pa[1] + &pa[2] - &pa[3];
    let slack = Rational::from(&pa_m1 - &dsum);
    Certificate::new(
        "P_u > 0",
        vec![
            Check::le("sum |d_k| <= 0.039", Ball::from_rational(&dsum, prec), decimal("0.039")),
            Check::gt("P_a(-1) > 0.063", Ball::from_rational(&pa_m1, prec), decimal("0.063")),
            Check::gt("P_a(-1) - sum |d_k| > 0", Ball::from_rational(&slack, prec), q(0, 1)),
        ],
    )
}

/// `z0 = L0 - x0`, the right end of D3 in `z = x - x0`.
pub fn z0() -> Rational {
    l0() - x0()
}

fn pu_powlog(prec: u32) -> PowLog {
    PowLog::from_laurent(pu_z_poly(), prec)
}

/// `(1/7)[z^{g+4} int_z^{z0} c t^{-3-g'} f + z^{g-3} int_z^{z0} c t^{4-g'} f]`, the shape shared by `Q` and `T`.
fn weighted_green(f: &PowLog, shift: &Rational, coef: i64) -> Result<PowLog> {
    let g = gamma();
    let z0 = z0();
    let c = q(coef, 1);
    let i1 = f.shift(&Rational::from(-3 - shift.clone())).scale_rational(&c).integral_to(&z0)?;
    let i2 = f.shift(&Rational::from(4 - shift.clone())).scale_rational(&c).integral_to(&z0)?;
    let out = i1.shift(&Rational::from(&g + 4u32)).add(&i2.shift(&Rational::from(&g - 3u32)));
    Ok(out.scale_rational(&q(1, 7)))
}

/// `(1/7)[4 z^3 I1 + 3 z^{-4} I2]`: the `|G_j'|` analogue used for `E'`.
fn weighted_green_deriv(f: &PowLog, shift: &Rational, coef: i64) -> Result<PowLog> {
    let z0 = z0();
    let c = q(coef, 1);
    let i1 = f.shift(&Rational::from(-3 - shift.clone())).scale_rational(&c).integral_to(&z0)?;
    let i2 = f.shift(&Rational::from(4 - shift.clone())).scale_rational(&c).integral_to(&z0)?;
    let out = i1.shift(&q(3, 1)).scale_rational(&q(4, 1)).add(&i2.shift(&q(-4, 1)).scale_rational(&q(3, 1)));
    Ok(out.scale_rational(&q(1, 7)))
}

/// `Q(z)` with `12 P_u t^{-g}` and `T(z)` with `6 t^{-2g}`, as closed-form power-log sums in `z`.
pub fn q_t_functions(prec: u32) -> Result<(PowLog, PowLog)> {
    let g = gamma();
    let qf = weighted_green(&pu_powlog(prec), &g, 12)?;
    let one = PowLog::term(prec, Ball::one(prec), Rational::new(), 0);
    let tf = weighted_green(&one, &Rational::from(&g * 2u32), 6)?;
    Ok((qf, tf))
}

/// `K1` and `K2`, the coefficients of `||E||` and `||E||^2` in the `E'` bound on D3.
pub fn k_functions(prec: u32) -> Result<(PowLog, PowLog)> {
    let g = gamma();
    let k1 = weighted_green_deriv(&pu_powlog(prec), &g, 12)?;
    let one = PowLog::term(prec, Ball::one(prec), Rational::new(), 0);
    let k2 = weighted_green_deriv(&one, &Rational::from(&g * 2u32), 6)?;
    Ok((k1, k2))
}

#[derive(Clone, Debug)]
pub struct QtBounds {
    pub n: usize,
    pub q_bound: Ball,
    pub t_bound: Ball,
    pub k1: Ball,
    pub k2: Ball,
    /// `Q(r)`, `T(r)` for the pointwise endpoint bound.
    pub q_at_r: Ball,
    pub t_at_r: Ball,
    pub checks: Vec<Check>,
}

/// Certifies that `f` is decreasing on `[lo, hi]` through positivity of `-f'`, doubling `n` up to 8 times.
fn certify_decreasing(f: &PowLog, lo: &Rational, hi: &Rational, n: usize, prec: u32) -> Result<usize> {
    let neg = PowLogFn::new(f.derivative().scale_rational(&q(-1, 1)), lo.clone(), hi.clone());
    let mut n = n;
    for _ in 0..=8 {
        match lower_bound_positive(&neg, lo, hi, n, prec) {
            Ok(_) => return Ok(n),
            Err(Error::CertificateFailed(m)) => {
                log::debug!("monotonicity at n = {n}: {m}");
                n *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::CertificateFailed("monotonicity of K not certified".into()))
}

pub fn d3_qt_bounds(n: usize, prec: u32) -> Result<QtBounds> {
    let (qf, tf) = q_t_functions(prec)?;
    let (k1f, k2f) = k_functions(prec)?;
    let (lo, hi) = (r(), z0());
    let qb: GridBound = sup_bound(&PowLogFn::new(qf.clone(), lo.clone(), hi.clone()), &lo, &hi, n, prec)?;
    let tb: GridBound = sup_bound(&PowLogFn::new(tf.clone(), lo.clone(), hi.clone()), &lo, &hi, n, prec)?;
    let n1 = certify_decreasing(&k1f, &lo, &hi, n, prec)?;
    let n2 = certify_decreasing(&k2f, &lo, &hi, n, prec)?;
    let k1 = k1f.eval_rational(&lo)?;
    let k2 = k2f.eval_rational(&lo)?;
    let checks = vec![
        Check::le("||Q|| <= 0.49", qb.bound.clone(), decimal("0.49")),
        Check::le("||T|| <= 1", tb.bound.clone(), q(1, 1)),
        Check::le("K1 = sup (1/7) sum |G_j'| int 12 P_u G t^{-g} <= 6.3", k1.clone(), decimal("6.3"))
            .with_note(format!("maximum at x0 + r, monotone on grid n = {n1}")),
        Check::le("K2 = sup (1/7) sum |G_j'| int 6 G t^{-2g} <= 12.3", k2.clone(), decimal("12.3"))
            .with_note(format!("maximum at x0 + r, monotone on grid n = {n2}")),
    ];
    Ok(QtBounds {
        n,
        q_at_r: qf.eval_rational(&lo)?,
        t_at_r: tf.eval_rational(&lo)?,
        q_bound: qb.bound,
        t_bound: tb.bound,
        k1,
        k2,
        checks,
    })
}

/// `E_{0,2}` on D3 and its derivative, in `z`.
pub fn e02_functions(prec: u32) -> Result<(PowLog, PowLog)> {
    let res = PowLog::from_laurent(&residual(DomainId::D3)?.poly, prec);
    let z0 = z0();
    let j1 = res.shift(&q(-3, 1)).integral_from(&z0)?;
    let j2 = res.shift(&q(4, 1)).integral_from(&z0)?;
    let e = j1.shift(&q(4, 1)).sub(&j2.shift(&q(-3, 1))).scale_rational(&q(1, 7));
    let ep = j1.shift(&q(3, 1)).scale_rational(&q(4, 1)).add(&j2.shift(&q(-4, 1)).scale_rational(&q(3, 1)));
    Ok((e, ep.scale_rational(&q(1, 7))))
}

#[derive(Clone, Debug)]
pub struct E02Bounds {
    pub n: usize,
    /// `sup |z^g E02|` and `sup |E02'|`.
    pub weighted: Ball,
    pub deriv: Ball,
    pub weighted_at_r: Ball,
}

pub fn d3_e02_bounds(n: usize, prec: u32) -> Result<E02Bounds> {
    let (e, ep) = e02_functions(prec)?;
    let ew = e.shift(&gamma());
    let (lo, hi) = (r(), z0());
    let a = sup_bound(&PowLogFn::new(ew.clone(), lo.clone(), hi.clone()), &lo, &hi, n, prec)?;
    let b = sup_bound(&PowLogFn::new(ep, lo.clone(), hi.clone()), &lo, &hi, n, prec)?;
    Ok(E02Bounds { n, weighted: a.bound, deriv: b.bound, weighted_at_r: ew.eval_rational(&lo)? })
}

/// `c_A`, `c_B`.
pub fn c_a() -> Rational {
    decimal("0.21")
}

pub fn c_b() -> Rational {
    decimal("0.85")
}

/// D4 pair from the `A_n`, `B_n` series with geometric tails.
pub fn d4_series_bounds(prec: u32) -> Result<GreensBoundSet> {
    let mut checks = Vec::new();
    let a = a_series();
    let a_ok = (0..a.len()).all(|j| Rational::from(a.get(j).abs_ref()) <= pow_rat(&q(1, 2), j as i32));
    checks.push(Check::exact("|a_j| <= 2^{-j}, j <= 17", a_ok, q(1, 2)));
    let (big_a, big_b) = ab_series(22);
    let qq = q(3, 4);
    let first_bad_a = (1..=22).find(|&n| Rational::from(big_a.get(n).abs_ref()) > c_a() * pow_rat(&qq, n as i32));
    let first_bad_b = (1..=22).find(|&n| Rational::from(big_b.get(n).abs_ref()) > c_b() * pow_rat(&qq, n as i32));
    let ratio_a = (1..=22).map(|n| Rational::from(big_a.get(n).abs_ref()) / pow_rat(&qq, n as i32)).max().unwrap();
    let ratio_b = (1..=22).map(|n| Rational::from(big_b.get(n).abs_ref()) / pow_rat(&qq, n as i32)).max().unwrap();
    checks.push(
        Check::le("|A_n| <= 0.21 (3/4)^n, n <= 22", Ball::from_rational(&ratio_a, prec), c_a())
            .with_note(first_bad_a.map(|n| format!("first failure at n = {n}")).unwrap_or_default()),
    );
    checks.push(
        Check::le("|B_n| <= 0.85 (3/4)^n, n <= 22", Ball::from_rational(&ratio_b, prec), c_b())
            .with_note(first_bad_b.map(|n| format!("first failure at n = {n}")).unwrap_or_default()),
    );
    let (ia, ib) = induction_constants(22);
    checks.push(Check::le("36/(23 30) (4/3)^4 <= 1", Ball::from_rational(&ia, prec), q(1, 1)));
    checks.push(Check::le("36/(23 16) (4/3)^4 <= 1", Ball::from_rational(&ib, prec), q(1, 1)));

    let rr = r();
    let den = Rational::from(256 - Rational::from(&rr * 192u32));
    let four_m = Rational::from(4 - Rational::from(&rr * 3u32));
    let four_m2 = Rational::from(four_m.square_ref());
    let g1 = pow_rat(&rr, 4) + c_a() * 81u32 * pow_rat(&rr, 8) / &den;
    let g2 = pow_rat(&rr, -3) + c_b() * 81u32 * &rr / &den;
    let g1p = pow_rat(&rr, 3) * 4u32
        + c_a() * 81u32 * pow_rat(&rr, 7) * Rational::from(32 - Rational::from(&rr * 21u32)) / (Rational::from(64) * &four_m2);
    let g2p = pow_rat(&rr, -4) * 3u32 + c_b() * 81u32 / (Rational::from(16) * &four_m2);
    let (g1, g2, g1p, g2p) = (
        Ball::from_rational(&g1, prec),
        Ball::from_rational(&g2, prec),
        Ball::from_rational(&g1p, prec),
        Ball::from_rational(&g2p, prec),
    );
    checks.push(Check::le("||G1|| <= 0.249", g1.clone(), decimal("0.249")));
    checks.push(Check::le("||G2|| <= 3.32", g2.clone(), decimal("3.32")));
    checks.push(Check::le("||G1'|| <= 1.48", g1p.clone(), decimal("1.48")));
    checks.push(Check::le("||G2'|| <= 13.7", g2p.clone(), decimal("13.7")));
    let mut extras = BTreeMap::new();
    extras.insert("c_A".into(), Ball::from_rational(&c_a(), prec));
    extras.insert("c_B".into(), Ball::from_rational(&c_b(), prec));
    Ok(GreensBoundSet { domain: DomainId::D4, g1, g2, g1p, g2p, extras, checks })
}

/// `G1`, `G2` truncated after `n` terms, as Laurent polynomials in `zeta`.
pub fn d4_truncated_pair(n: usize) -> (LaurentPoly, LaurentPoly) {
    let (a, b) = ab_series(n);
    let mut g1 = LaurentPoly::zero(x0());
    let mut g2 = LaurentPoly::zero(x0());
    for k in 0..=n {
        g1.add_term(k as i32 + 4, a.get(k));
        g2.add_term(k as i32 - 3, b.get(k));
    }
    (g1, g2)
}

#[derive(Clone, Debug)]
pub struct WronskianCertificate {
    pub n_trunc: usize,
    pub constant: Rational,
    /// Largest exact coefficient index that was checked to vanish.
    pub checked_through: usize,
    /// Bound on `|W - W_N|` for `|zeta| = r`.
    pub tail: Rational,
    pub checks: Vec<Check>,
}

/// Exact low-order coefficients of `G1 G2' - G2 G1'` plus a geometric bound on the rest.
///
/// With `A_0 = B_0 = 1` and `c_A, c_B <= 1`, `|A_n|, |B_n| <= (3/4)^n` for all `n >= 0`, so the
/// coefficient of `zeta^k` is at most `(k+1)(k+7)(3/4)^k`.
pub fn wronskian_certify(n_trunc: usize, prec: u32) -> Result<WronskianCertificate> {
    if n_trunc < 22 {
        return Err(Error::Domain("Wronskian needs at least 22 terms".into()));
    }
    let (g1, g2) = d4_truncated_pair(n_trunc);
    let w = g1.mul(&g2.derivative()).sub(&g2.mul(&g1.derivative()));
    let constant = w.coeff(0);
    let nonzero_low = w.terms().find(|(k, c)| *k != 0 && *k <= n_trunc as i32 && **c != 0).map(|(k, _)| k);
    // tail over k > n_trunc: ratio of consecutive majorant terms is decreasing in k
    let qr = q(3, 4) * r();
    let k0 = n_trunc as i64 + 1;
    let term = |k: i64| Rational::from((k + 1) * (k + 7)) * pow_rat(&qr, k as i32);
    let ratio = Rational::from((k0 + 2) * (k0 + 8)) / Rational::from((k0 + 1) * (k0 + 7)) * &qr;
    if ratio >= 1 {
        return Err(Error::CertificateFailed("Wronskian tail ratio not below 1".into()));
    }
    let tail = term(k0) / (Rational::from(1) - ratio);
    let checks = vec![
        Check::exact("Wronskian constant term = -7", constant == -7, constant.clone()),
        Check::exact(
            "Wronskian coefficients 1..N vanish",
            nonzero_low.is_none(),
            Rational::from(nonzero_low.unwrap_or(0)),
        )
        .with_note(format!("N = {n_trunc}")),
        Check::le("Wronskian tail on |zeta| = r < 1e-3", Ball::from_rational(&tail, prec), decimal("1e-3")),
    ];
    Ok(WronskianCertificate { n_trunc, constant, checked_through: n_trunc, tail, checks })
}

/// `G1(r), G1'(r), G2(r), G2'(r)` from `n` terms plus geometric tails.
pub fn d4_values_at_r(n: usize, prec: u32) -> Result<[Ball; 4]> {
    let (g1, g2) = d4_truncated_pair(n);
    let rr = r();
    let qr = q(3, 4) * &rr;
    let from = n as u32 + 1;
    let ta = crate::pieces::geometric_tail(&c_a(), &qr, from, crate::pieces::TailWeight::None)? * pow_rat(&rr, 4);
    let tap = {
        // sum (k+4) c_A (3/4)^k r^{k+3} = r^3 [4 S0 + r S1'] with S1' the linear-weight sum in qr times 3/4
        let s0 = crate::pieces::geometric_tail(&c_a(), &qr, from, crate::pieces::TailWeight::None)?;
        let s1 = crate::pieces::geometric_tail(&c_a(), &qr, from, crate::pieces::TailWeight::Linear)? * &qr;
        pow_rat(&rr, 3) * (s0 * 4u32 + s1)
    };
    let tb = crate::pieces::geometric_tail(&c_b(), &qr, from, crate::pieces::TailWeight::None)? * pow_rat(&rr, -3);
    let tbp = {
        let s0 = crate::pieces::geometric_tail(&c_b(), &qr, from, crate::pieces::TailWeight::None)?;
        let s1 = crate::pieces::geometric_tail(&c_b(), &qr, from, crate::pieces::TailWeight::Linear)? * &qr;
        pow_rat(&rr, -4) * (s1 + s0 * 3u32)
    };
    let v = |p: &LaurentPoly, d: bool, tail: &Rational| -> Result<Ball> {
        let p = if d { p.derivative() } else { p.clone() };
        Ok(Ball::from_rational(&p.eval_local(&rr)?, prec).add_error_rational(tail))
    };
    Ok([v(&g1, false, &ta)?, v(&g1, true, &tap)?, v(&g2, false, &tb)?, v(&g2, true, &tbp)?])
}

/// `G'' + 12 Y0 G` for the truncated `G1`: lowest surviving power.
pub fn d4_ode_defect_lowest(n: usize) -> Option<i32> {
    let (g1, _) = d4_truncated_pair(n);
    let d = g1.nth_derivative(2).add(&y0_d4_poly().mul(&g1).scale(&q(12, 1)));
    d.min_exp()
}


#[cfg(test)]
mod d3_grid_tests {
    use super::*;

    #[test]
    fn d3_q_t_k() {
        let b = d3_qt_bounds(5, 128).unwrap();
        for c in &b.checks {
            eprintln!("{} {} {}", c.name, c.computed.upper_decimal(8), c.pass);
        }
        eprintln!("Q(r) {} T(r) {}", b.q_at_r, b.t_at_r);
        assert!(b.checks.iter().all(|c| c.pass));
        assert!((b.k1.to_f64() - 6.2826).abs() < 1e-3);
        assert!((b.k2.to_f64() - 12.2765).abs() < 1e-3);
    }

    #[test]
    fn d3_e02() {
        let e = d3_e02_bounds(5, 128).unwrap();
        eprintln!("{} {} {}", e.weighted, e.deriv, e.weighted_at_r);
        assert!(e.weighted.le_rational(&decimal("2.3e-9")));
        assert!(e.deriv.le_rational(&decimal("3.8e-8")));
    }
}
