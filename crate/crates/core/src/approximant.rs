//! The piecewise approximant `y0`, its residual `R = y0'' + 6 y0^2 - x`, and the jumps between pieces.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check};
use crate::d1_certificates::{w0_laplace, default_tail_s};
use crate::error::{Error, Result};
use crate::exact_scalars::{decimal, q, Ball, ComplexBall};
use crate::grid_bounds::{lower_bound_positive, GridPositivity, IntegralFn, LaurentFn};
use crate::pieces::{big_l, l0, pu_coeffs, r, sqrt6, tau, x0, x0_plus_r, y0_d23_poly, y0_d4_poly, LaurentPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DomainId {
    D1,
    D2,
    D3,
    D4,
}

impl DomainId {
    pub const ALL: [DomainId; 4] = [DomainId::D1, DomainId::D2, DomainId::D3, DomainId::D4];
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for DomainId {
    type Err = Error;

    fn from_str(s: &str) -> Result<DomainId> {
        match s.to_ascii_uppercase().as_str() {
            "D1" => Ok(DomainId::D1),
            "D2" => Ok(DomainId::D2),
            "D3" => Ok(DomainId::D3),
            "D4" => Ok(DomainId::D4),
            _ => Err(Error::Domain(format!("unknown domain {s:?}"))),
        }
    }
}

/// Real domain containing `x`, if any. D4 is the circle and never contains a real point here.
pub fn classify(x: &Rational) -> Option<DomainId> {
    if *x >= big_l() {
        Some(DomainId::D1)
    } else if *x >= l0() {
        Some(DomainId::D2)
    } else if *x >= x0_plus_r() {
        Some(DomainId::D3)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainPoint {
    /// Real `x` in D1, D2 or D3.
    Real { domain: DomainId, x: Rational },
    /// `zeta = r e^{i nu pi}` with `0 < nu <= 2`.
    Circle { nu: Rational },
}

impl DomainPoint {
    pub fn real(x: Rational) -> Result<DomainPoint> {
        let domain = classify(&x).ok_or_else(|| Error::Domain(format!("x = {x} is left of x0 + r")))?;
        Ok(DomainPoint::Real { domain, x })
    }

    /// Fails when `x` is not in `domain`.
    pub fn in_domain(domain: DomainId, x: Rational) -> Result<DomainPoint> {
        if domain == DomainId::D4 || classify(&x) != Some(domain) {
            return Err(Error::Domain(format!("x = {x} is not in {domain}")));
        }
        Ok(DomainPoint::Real { domain, x })
    }

    pub fn circle(nu: Rational) -> Result<DomainPoint> {
        if nu <= 0 || nu > 2 {
            return Err(Error::Domain(format!("angle {nu} pi outside (0, 2pi]")));
        }
        Ok(DomainPoint::Circle { nu })
    }

    pub fn domain(&self) -> DomainId {
        match self {
            DomainPoint::Real { domain, .. } => *domain,
            DomainPoint::Circle { .. } => DomainId::D4,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Value {
    Real(Ball),
    Complex(ComplexBall),
}

impl Value {
    pub fn real(self) -> Option<Ball> {
        match self {
            Value::Real(b) => Some(b),
            Value::Complex(_) => None,
        }
    }

    pub fn complex(self) -> ComplexBall {
        match self {
            Value::Real(b) => ComplexBall::from_real(b),
            Value::Complex(c) => c,
        }
    }
}

/// `zeta = r e^{i nu pi}`; exact at the real points `nu = 1, 2`.
pub fn zeta(nu: &Rational, prec: u32) -> ComplexBall {
    if *nu == 1 || *nu == 2 {
        let s = if *nu == 1 { -r() } else { r() };
        return ComplexBall::from_real(Ball::from_rational(&s, prec));
    }
    let theta = Ball::pi(prec).mul_rational(nu);
    let (s, c) = theta.sin_cos();
    ComplexBall::new(c, s).scale_rational(&r())
}

/// `sqrt(x/6)` times the four asymptotic terms plus `w0`, and the derivative.
fn y0_d1(x: &Rational, order: u8, prec: u32) -> Result<Ball> {
    if order > 1 {
        return Err(Error::Domain("second derivative on D1 is not provided".into()));
    }
    let xb = Ball::from_rational(x, prec);
    let w = w0_laplace(&xb, &default_tail_s())?;
    let s6 = sqrt6(prec);
    let inv6 = s6.recip();
    let u = xb.pow_rational(&q(-5, 2))?;
    let series = &(&(&Ball::one(prec) + &(&u * &inv6).mul_rational(&q(1, 8))) - &u.sqr().mul_rational(&q(49, 768)))
        + &(&u.powi(3) * &inv6).mul_rational(&q(1225, 1536));
    let s = &series + &w.w0;
    let root = (&xb * &Ball::from_rational(&q(1, 6), prec)).sqrt()?;
    if order == 0 {
        return Ok(&root * &s);
    }
    // d/dx of the series: u' = -(5/2) u / x
    let inv_x = xb.recip();
    let ds = &(&(&(&u * &inv6).mul_rational(&q(-5, 16)) + &u.sqr().mul_rational(&q(5 * 49, 768)))
        - &(&u.powi(3) * &inv6).mul_rational(&q(15 * 1225, 2 * 1536)))
        * &inv_x;
    let sp = &ds + &w.w0_prime;
    let droot = &root * &inv_x.div_int(2);
    Ok(&(&droot * &s) + &(&root * &sp))
}

/// `y0^{(order)}` at a domain point; exact rational core on D2, D3 and at real points of D4.
pub fn y0_eval(p: &DomainPoint, order: u8, prec: u32) -> Result<Value> {
    if order > 2 {
        return Err(Error::Domain(format!("derivative order {order} not provided")));
    }
    match p {
        DomainPoint::Real { domain: DomainId::D1, x } => Ok(Value::Real(y0_d1(x, order, prec)?)),
        DomainPoint::Real { domain: DomainId::D4, .. } => Err(Error::Domain("D4 points are on the circle".into())),
        DomainPoint::Real { x, .. } => {
            let v = y0_d23_poly().nth_derivative(order as u32).eval_x(x)?;
            Ok(Value::Real(Ball::from_rational(&v, prec)))
        }
        DomainPoint::Circle { nu } => {
            let poly = y0_d4_poly().nth_derivative(order as u32);
            if *nu == 1 || *nu == 2 {
                let t = if *nu == 1 { -r() } else { r() };
                return Ok(Value::Complex(ComplexBall::from_real(Ball::from_rational(&poly.eval_local(&t)?, prec))));
            }
            Ok(Value::Complex(poly.eval_complex(&zeta(nu, prec))?))
        }
    }
}

/// D2/D3 value through the `tau` route: `-(x - x0)^{-2} + sum c_k tau^k`.
pub fn y0_d23_via_tau(x: &Rational) -> Result<Rational> {
    let t = tau(x);
    let mut acc = Rational::new();
    for c in pu_coeffs().iter().rev() {
        acc *= &t;
        acc += c;
    }
    let z = Rational::from(x - x0());
    if z == 0 {
        return Err(Error::Domain("pole".into()));
    }
    Ok(acc - Rational::from(z.square_ref()).recip())
}

#[derive(Clone, Debug)]
pub struct Residual {
    pub domain: DomainId,
    /// Exact `R` in `z = x - x0` (or `zeta` on D4).
    pub poly: LaurentPoly,
    /// Coefficient of `z^{-1}`, the only source of a log in `int R`.
    pub log_coeff: Rational,
}

fn raw_residual(y: &LaurentPoly) -> LaurentPoly {
    let mut out = y.nth_derivative(2).add(&y.square().scale(&q(6, 1)));
    // x = x0 + z
    out.add_term(0, -x0());
    out.add_term(1, q(-1, 1));
    out
}

fn build_residual(domain: DomainId) -> Result<Residual> {
    let (poly, lowest_allowed) = match domain {
        DomainId::D2 | DomainId::D3 => (raw_residual(y0_d23_poly()), -2),
        DomainId::D4 => (raw_residual(y0_d4_poly()), 18),
        DomainId::D1 => return Err(Error::Domain("D1 residual is not polynomial".into())),
    };
    for (k, c) in poly.terms() {
        if k < lowest_allowed && *c != 0 {
            return Err(Error::AlgebraMismatch(format!("{domain}: coefficient of z^{k} is {c}, expected 0")));
        }
    }
    if domain == DomainId::D4 && poly.max_exp().is_some_and(|k| k > 38) {
        return Err(Error::AlgebraMismatch("D4 residual has powers above 38".into()));
    }
    let log_coeff = poly.coeff(-1);
    Ok(Residual { domain, poly, log_coeff })
}

/// Exact residual; D2 and D3 share one formula.
pub fn residual(domain: DomainId) -> Result<Residual> {
    static D23: OnceLock<std::result::Result<Residual, String>> = OnceLock::new();
    static D4: OnceLock<std::result::Result<Residual, String>> = OnceLock::new();
    let cell = match domain {
        DomainId::D2 | DomainId::D3 => &D23,
        DomainId::D4 => &D4,
        DomainId::D1 => return Err(Error::Domain("D1 residual is not polynomial".into())),
    };
    let r = cell.get_or_init(|| build_residual(domain).map_err(|e| e.to_string()));
    match r {
        Ok(v) => Ok(Residual { domain, ..v.clone() }),
        Err(m) => Err(Error::AlgebraMismatch(m.clone())),
    }
}

/// `-int_L^x R` as a grid handle on D2.
pub fn calr_fn() -> Result<IntegralFn> {
    let res = residual(DomainId::D2)?;
    Ok(IntegralFn::new(res.poly, big_l(), true, l0(), big_l()))
}

/// `calR(x) = int_L^x (-R)` for `L0 <= x <= L`.
pub fn calr(x: &Rational, prec: u32) -> Result<Ball> {
    if *x < l0() || *x > big_l() {
        return Err(Error::Domain(format!("calR needs L0 <= x <= L, got {x}")));
    }
    use crate::grid_bounds::GridFunction;
    calr_fn()?.value(x, prec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Junction {
    /// `x = L` between D1 and D2.
    L,
    /// `x = L0` between D2 and D3.
    L0,
    /// `x = x0 + r` between D3 and the circle.
    X0PlusR,
}

/// `(y0(x_e+) - y0(x_e-), y0'(x_e+) - y0'(x_e-))`.
pub fn boundary_mismatch(j: Junction, prec: u32) -> Result<(Ball, Ball)> {
    match j {
        Junction::L0 => Ok((Ball::zero(prec), Ball::zero(prec))),
        Junction::L => {
            let right = (y0_d1(&big_l(), 0, prec)?, y0_d1(&big_l(), 1, prec)?);
            let left0 = Ball::from_rational(&y0_d23_poly().eval_x(&big_l())?, prec);
            let left1 = Ball::from_rational(&y0_d23_poly().derivative().eval_x(&big_l())?, prec);
            Ok((&right.0 - &left0, &right.1 - &left1))
        }
        Junction::X0PlusR => {
            let x = x0_plus_r();
            let d3 = y0_d23_poly();
            let d4 = y0_d4_poly();
            let dy = Rational::from(d3.eval_x(&x)? - d4.eval_local(&r())?);
            let dyp = Rational::from(d3.derivative().eval_x(&x)? - d4.derivative().eval_local(&r())?);
            Ok((Ball::from_rational(&dy, prec), Ball::from_rational(&dyp, prec)))
        }
    }
}

/// The four jump bounds of the remark on discontinuities of `y0`.
pub fn certify_mismatch(prec: u32) -> Result<Certificate> {
    let (dl, dlp) = boundary_mismatch(Junction::L, prec)?;
    let (dr, drp) = boundary_mismatch(Junction::X0PlusR, prec)?;
    Ok(Certificate::new(
        "y0 jumps",
        vec![
            Check::le("|jump y0| at L <= 5e-14", dl.abs(), decimal("5e-14")),
            Check::le("|jump y0'| at L <= 7.5e-14", dlp.abs(), decimal("7.5e-14")),
            Check::le("|jump y0| at x0+r <= 4e-10", dr.abs(), decimal("4e-10")),
            Check::le("|jump y0'| at x0+r <= 7e-8", drp.abs(), decimal("7e-8")),
        ],
    ))
}

/// `y0 > 0` and `y0' > 0` on D2, doubling the grid until both certify (at most 8 doublings).
pub fn certify_d2_positivity(n: usize, prec: u32) -> Result<(GridPositivity, GridPositivity)> {
    let y = y0_d23_poly().clone();
    let f = LaurentFn { f: y.clone(), lo: l0(), hi: big_l() };
    let fp = LaurentFn { f: y.derivative(), lo: l0(), hi: big_l() };
    let mut n = n.max(1);
    let mut last = None;
    for _ in 0..=8 {
        match (lower_bound_positive(&f, &l0(), &big_l(), n, prec), lower_bound_positive(&fp, &l0(), &big_l(), n, prec)) {
            (Ok(a), Ok(b)) => return Ok((a, b)),
            (Err(e), _) | (_, Err(e)) => {
                log::debug!("D2 positivity at n = {n}: {e}");
                last = Some(e);
                n *= 2;
            }
        }
    }
    Err(last.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d23_residual_is_cancelled_at_the_pole() {
        let res = residual(DomainId::D2).unwrap();
        assert!(res.poly.min_exp().unwrap() >= -2);
        assert_eq!(res.poly.coeff(-4), 0);
        assert_eq!(res.poly.coeff(-3), 0);
    }

    #[test]
    fn d4_residual_powers() {
        let res = residual(DomainId::D4).unwrap();
        assert_eq!(res.poly.min_exp(), Some(18));
        assert_eq!(res.poly.max_exp(), Some(38));
        let s = res.poly.abs_sum_on_circle(&r());
        assert!(s <= decimal("1.311e-6"));
    }

    #[test]
    fn calr_vanishes_at_l() {
        assert!(calr(&big_l(), 128).unwrap().contains_rational(&q(0, 1)));
        assert!(calr(&q(6, 1), 128).is_err());
    }

    #[test]
    fn junctions() {
        let (a, b) = boundary_mismatch(Junction::L0, 128).unwrap();
        assert!(a.is_exact() && b.is_exact());
        let c = certify_mismatch(128).unwrap();
        assert!(c.passed(), "{:?}", crate::certificate::first_failure(&c.checks));
    }

    #[test]
    fn d4_at_pi_is_real_rational() {
        let v = y0_eval(&DomainPoint::circle(q(1, 1)).unwrap(), 0, 128).unwrap().complex();
        assert!(v.im.is_exact());
        let want = y0_d4_poly().eval_local(&-r()).unwrap();
        assert!(v.re.contains_rational(&want));
    }

    #[test]
    fn domain_points() {
        assert!(DomainPoint::real(q(-3, 1)).is_err());
        assert_eq!(DomainPoint::real(l0()).unwrap().domain(), DomainId::D2);
        assert_eq!(DomainPoint::real(big_l()).unwrap().domain(), DomainId::D1);
        assert_eq!(DomainPoint::real(x0_plus_r()).unwrap().domain(), DomainId::D3);
        assert!(DomainPoint::circle(q(0, 1)).is_err());
        assert!(DomainPoint::in_domain(DomainId::D3, q(1, 1)).is_err());
    }

    #[test]
    fn d2_positive() {
        let (p, pp) = certify_d2_positivity(20, 128).unwrap();
        assert!(p.min_lower.is_positive() && pp.min_lower.is_positive());
    }
}
