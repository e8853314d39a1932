//! Non-rigorous double-precision Painleve-I machinery used only to cross-check the certificates.
//!
//! Nothing here feeds a certificate.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C;
use rug::Rational;
use serde::Serialize;

use crate::approximant::{y0_eval, DomainPoint};
use crate::error::{Error, Result};
use crate::exact_scalars::{decimal, Ball};
use crate::pieces::{big_l, r, x0, y0_d23_poly, y0_d4_poly};

pub const ORDER: usize = 30;
pub const TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug)]
pub struct TrajPoint {
    pub x: C,
    pub y: C,
    pub yp: C,
    /// Accumulated local truncation estimate.
    pub err: f64,
}

/// Seed on D1: `y0` including `w0`, widened by the certified band `0.00682 ||w0|| x^{-43/4}`, `0.126 x^{-21/2}`.
pub fn seed_asymptotic(x_start: &Rational, prec: u32) -> Result<(Ball, Ball)> {
    if *x_start < big_l() {
        return Err(Error::Domain(format!("seed needs x >= L, got {x_start}")));
    }
    let p = DomainPoint::real(x_start.clone())?;
    let y = y0_eval(&p, 0, prec)?.real().expect("real on D1");
    let yp = y0_eval(&p, 1, prec)?.real().expect("real on D1");
    let xb = Ball::from_rational(x_start, prec);
    let band = xb.pow_rational(&Rational::from((-43, 4)))?.mul_rational(&(decimal("0.00682") * decimal("7.5")));
    let band_p = xb.pow_rational(&Rational::from((-21, 2)))?.mul_rational(&decimal("0.126"));
    Ok((y.add_error(&band.upper()), yp.add_error(&band_p.upper())))
}

/// Taylor coefficients of `y` about `xc` for `y'' = x - 6 y^2`.
pub fn taylor_coeffs(xc: C, y: C, yp: C, order: usize) -> Vec<C> {
    let mut c = vec![C::new(0.0, 0.0); order + 1];
    c[0] = y;
    if order >= 1 {
        c[1] = yp;
    }
    for k in 0..order.saturating_sub(1) {
        let mut sq = C::new(0.0, 0.0);
        for j in 0..=k {
            sq += c[j] * c[k - j];
        }
        let xk = match k {
            0 => xc,
            1 => C::new(1.0, 0.0),
            _ => C::new(0.0, 0.0),
        };
        c[k + 2] = (xk - 6.0 * sq) / ((k + 2) * (k + 1)) as f64;
    }
    c
}

fn eval_series(c: &[C], h: C) -> (C, C) {
    let mut y = C::new(0.0, 0.0);
    let mut yp = C::new(0.0, 0.0);
    for k in (0..c.len()).rev() {
        y = y * h + c[k];
        if k >= 1 {
            yp = yp * h + c[k] * k as f64;
        }
    }
    (y, yp)
}

/// Straight-line integration from `seed` to `x_end`.
pub fn taylor_integrate(seed: TrajPoint, x_end: C, order: usize, tol: f64) -> Result<Vec<TrajPoint>> {
    let mut out = vec![seed];
    let mut cur = seed;
    let total = (x_end - seed.x).norm();
    if total == 0.0 {
        return Ok(out);
    }
    let dir = (x_end - seed.x) / total;
    let mut left = total;
    while left > 0.0 {
        let c = taylor_coeffs(cur.x, cur.y, cur.yp, order);
        // step so that the last two retained terms stay below tol/10
        let mut h = left;
        for k in [order - 1, order] {
            let a = c[k].norm();
            if a > 0.0 {
                h = h.min((tol / 10.0 / a).powf(1.0 / k as f64));
            }
        }
        if h < 1e-9 * (1.0 + cur.x.norm()) {
            return Err(Error::PoleEncountered(format!("{:.10}", cur.x)));
        }
        let step = dir * h;
        let (y, yp) = eval_series(&c, step);
        let local = c[order].norm() * h.powi(order as i32);
        left -= h;
        let x = if left <= 0.0 { x_end } else { cur.x + step };
        cur = TrajPoint { x, y, yp, err: cur.err + local + f64::EPSILON * y.norm() };
        out.push(cur);
    }
    Ok(out)
}

/// Integrates through `stops` in order and returns the state at each stop.
pub fn integrate_through(seed: TrajPoint, stops: &[C], order: usize, tol: f64) -> Result<Vec<TrajPoint>> {
    let mut cur = seed;
    let mut out = Vec::with_capacity(stops.len());
    for &s in stops {
        cur = *taylor_integrate(cur, s, order, tol)?.last().unwrap();
        out.push(cur);
    }
    Ok(out)
}

pub fn seed_point(x_start: &Rational, prec: u32) -> Result<TrajPoint> {
    let (y, yp) = seed_asymptotic(x_start, prec)?;
    Ok(TrajPoint {
        x: C::new(x_start.to_f64(), 0.0),
        y: C::new(y.to_f64(), 0.0),
        yp: C::new(yp.to_f64(), 0.0),
        err: y.rad().to_f64(),
    })
}

/// `(x, y_mid, y_rad, yprime_mid, yprime_rad)` rows, real parts only.
/// Oracle trajectory from `L` down to `x0 + r`.
pub fn trajectory_to_junction() -> Result<Vec<TrajPoint>> {
    let seed = seed_point(&big_l(), 128)?;
    taylor_integrate(seed, C::new((x0() + r()).to_f64(), 0.0), ORDER, TOL)
}

pub fn write_csv<W: Write>(traj: &[TrajPoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "x,y_mid,y_rad,yprime_mid,yprime_rad")?;
    for p in traj {
        writeln!(w, "{:.17e},{:.17e},{:.3e},{:.17e},{:.3e}", p.x.re, p.y.re, p.err, p.yp.re, p.err)?;
    }
    Ok(())
}

/// Local series `-t^{-2} + sum_{n>=2} b_n t^n` at a double pole `xp`, with `b_4 = a2` free.
pub fn pole_series(xp: C, a2: C, n: usize) -> Vec<C> {
    let mut b = vec![C::new(0.0, 0.0); n + 1];
    for k in 2..=n {
        if k == 4 {
            b[4] = a2;
            continue;
        }
        let m = k - 2;
        let mut sq = C::new(0.0, 0.0);
        for j in 0..=m {
            sq += b[j] * b[m - j];
        }
        let xk = match m {
            0 => xp,
            1 => C::new(1.0, 0.0),
            _ => C::new(0.0, 0.0),
        };
        b[k] = (xk - 6.0 * sq) / ((k as f64 - 4.0) * (k as f64 + 3.0));
    }
    b
}

pub fn pole_series_eval(xp: C, a2: C, x: C, n: usize) -> (C, C) {
    let t = x - xp;
    let b = pole_series(xp, a2, n);
    let (s, sp) = eval_series(&b, t);
    (s - 1.0 / (t * t), sp + 2.0 / (t * t * t))
}

const FIT_TERMS: usize = 80;

/// Newton fit of `(xp, a2)` to a state `(x, y, y')` near a pole.
pub fn fit_pole(p: &TrajPoint, guess: C) -> Result<(C, C, f64)> {
    let mut xp = guess;
    let mut a2 = C::new(0.06, 0.0);
    let resid = |xp: C, a2: C| {
        let (y, yp) = pole_series_eval(xp, a2, p.x, FIT_TERMS);
        (y - p.y, yp - p.yp)
    };
    for _ in 0..60 {
        let (f1, f2) = resid(xp, a2);
        let e = 1e-7;
        let (g1, g2) = resid(xp + e, a2);
        let (h1, h2) = resid(xp, a2 + e);
        let (j11, j21) = ((g1 - f1) / e, (g2 - f2) / e);
        let (j12, j22) = ((h1 - f1) / e, (h2 - f2) / e);
        let det = j11 * j22 - j12 * j21;
        if det.norm() < 1e-300 {
            return Err(Error::FitDiverged("singular Jacobian".into()));
        }
        let dx = (f1 * j22 - f2 * j12) / det;
        let da = (j11 * f2 - j21 * f1) / det;
        xp -= dx;
        a2 -= da;
        if !xp.re.is_finite() || (xp - guess).norm() > 1.0 {
            return Err(Error::FitDiverged(format!("iterate left the search disk at {xp}")));
        }
        if dx.norm() < 1e-15 && da.norm() < 1e-13 {
            break;
        }
    }
    let (f1, f2) = resid(xp, a2);
    Ok((xp, a2, f1.norm() + f2.norm()))
}

/// Pole location and free coefficient from a trajectory started at `seed`, stopping half a unit short of `guess`.
pub fn pole_hunt_from(seed: TrajPoint, guess: f64) -> Result<(Ball, Ball)> {
    let stop = C::new(guess, 0.0) + (seed.x - C::new(guess, 0.0)) / (seed.x - C::new(guess, 0.0)).norm() * 0.5;
    let at = *taylor_integrate(seed, stop, ORDER, TOL)?.last().unwrap();
    let (xp, a2, res) = fit_pole(&at, C::new(guess, 0.0))?;
    // crude uncertainty: accumulated integration error amplified by the local conditioning
    let u = 1e3 * (at.err + res) + 1e-12;
    let prec = 64;
    Ok((Ball::from_f64(xp.re, prec).add_error_rational(&f64_rat(u)), Ball::from_f64(a2.re, prec).add_error_rational(&f64_rat(u))))
}

pub fn pole_hunt(guess: &Rational) -> Result<(Ball, Ball)> {
    pole_hunt_from(seed_point(&big_l(), 128)?, guess.to_f64())
}

fn f64_rat(v: f64) -> Rational {
    Rational::from_f64(v).unwrap_or_default()
}

/// States at `m` equally spaced angles on `|x - x0| = r`, starting and ending at `x0 + r`.
pub fn circle_traverse(start: TrajPoint, m: usize, tol: f64) -> Result<Vec<TrajPoint>> {
    let c0 = C::new(x0().to_f64(), 0.0);
    let rr = r().to_f64();
    let stops: Vec<C> = (1..=m).map(|k| c0 + C::from_polar(rr, 2.0 * PI * k as f64 / m as f64)).collect();
    let mut pts = vec![start];
    pts.extend(integrate_through(start, &stops, ORDER, tol)?);
    Ok(pts)
}

/// Trapezoid value of `(1/2 pi i) int zeta^k y dzeta` on the samples of `circle_traverse`.
pub fn contour_moment(pts: &[TrajPoint], k: i32) -> C {
    let c0 = C::new(x0().to_f64(), 0.0);
    let m = pts.len() - 1;
    let mut s = C::new(0.0, 0.0);
    for p in &pts[..m] {
        let z = p.x - c0;
        // dzeta = i zeta dnu
        s += z.powi(k + 1) * p.y;
    }
    s / m as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub nodes_checked: usize,
    pub max_excess_d2: String,
    pub max_excess_d3: String,
    pub band_ok: bool,
    pub xp: String,
    pub a2: String,
    pub xp_ok: bool,
    pub a2_ok: bool,
    pub circle_return: String,
    pub circle_ok: bool,
    pub residue_zeta: String,
    pub residue_ok: bool,
}

/// `|y_oracle - y0|` minus the certified band at `n` points across D2 and D3.
pub fn band_excess(n: usize) -> Result<(Vec<(f64, f64)>, TrajPoint)> {
    let seed = seed_point(&big_l(), 128)?;
    let hi = big_l().to_f64();
    let lo = (x0() + r()).to_f64();
    let stops: Vec<C> = (1..=n).map(|k| C::new(hi + (lo - hi) * k as f64 / n as f64, 0.0)).collect();
    let pts = integrate_through(seed, &stops, ORDER, TOL)?;
    let l0 = crate::pieces::l0().to_f64();
    let x0f = x0().to_f64();
    let mut out = Vec::new();
    for p in &pts {
        let x = p.x.re;
        let xr = f64_rat(x);
        let y0 = y0_d23_poly().eval_x(&xr)?.to_f64();
        let band = if x >= l0 { 1.75e-7 } else { 4.01e-6 * (x - x0f).powf(-3.2) };
        out.push((x, (p.y.re - y0).abs() - band));
    }
    Ok((out, *pts.last().unwrap()))
}

pub fn oracle_check() -> Result<OracleReport> {
    let (ex, end) = band_excess(50)?;
    let l0 = crate::pieces::l0().to_f64();
    let mx = |f: &dyn Fn(f64) -> bool| {
        ex.iter().filter(|(x, _)| f(*x)).map(|(_, e)| *e).fold(f64::NEG_INFINITY, f64::max)
    };
    let d2 = mx(&|x| x >= l0);
    let d3 = mx(&|x| x < l0);
    let (xp, a2) = pole_hunt(&decimal("-2.384"))?;
    let xp_err = (xp.to_f64() - (-2.3841687675)).abs();
    let a2_err = (a2.to_f64() - 19949.0 / 321055.0).abs();
    let circ = circle_traverse(end, 128, TOL)?;
    let first = circ[0];
    let last = *circ.last().unwrap();
    let ret = (last.y - first.y).norm() + (last.yp - first.yp).norm();
    let res = contour_moment(&circ, 1);
    Ok(OracleReport {
        nodes_checked: ex.len(),
        max_excess_d2: format!("{d2:.6e}"),
        max_excess_d3: format!("{d3:.6e}"),
        band_ok: d2 <= 1e-8 && d3 <= 1e-8,
        xp: format!("{:.12}", xp.to_f64()),
        a2: format!("{:.10}", a2.to_f64()),
        xp_ok: xp_err <= 4.1e-6,
        a2_ok: a2_err <= 1e-4,
        circle_return: format!("{ret:.3e}"),
        circle_ok: ret <= 10.0 * last.err.max(TOL),
        residue_zeta: format!("{:.12}{:+.3e}i", res.re, res.im),
        residue_ok: (res - C::new(-1.0, 0.0)).norm() <= 1e-6,
    })
}

/// Exact value of `y0` on the circle, for comparisons.
pub fn y0_circle(nu: f64) -> Result<C> {
    let z = C::from_polar(r().to_f64(), nu);
    let p = y0_d4_poly();
    let mut s = C::new(0.0, 0.0);
    for (k, c) in p.terms() {
        s += z.powi(k) * c.to_f64();
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_band_and_leading_term() {
        let (y, _) = seed_asymptotic(&big_l(), 128).unwrap();
        assert!(y.rad().to_f64() <= 5.626e-10);
        let lead = (big_l().to_f64() / 6.0).sqrt();
        let d = (y.to_f64() - lead).abs();
        assert!(d > 1e-4 && d < 1e-2, "{d}");
        let (y10, _) = seed_asymptotic(&(big_l() * 10u32), 128).unwrap();
        let ratio = y10.rad().to_f64() / y.rad().to_f64();
        assert!((ratio / 10f64.powf(-43.0 / 4.0) - 1.0).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn recurrence_matches_manufactured_residual() {
        // u = 1 + x^2: u'' + 6u^2 - x has value 2 + 6(1+x^2)^2 - x; the series' y'' drops the residual
        let xc = 0.3;
        let u = 1.0 + xc * xc;
        let c = taylor_coeffs(C::new(xc, 0.0), C::new(u, 0.0), C::new(2.0 * xc, 0.0), 6);
        let series_ypp = 2.0 * c[2].re;
        let exact_resid = 2.0 + 6.0 * u * u - xc;
        assert!((2.0 - series_ypp - exact_resid).abs() < 1e-14);
    }

    #[test]
    fn pole_series_matches_exact_table() {
        let b = pole_series(C::new(x0().to_f64(), 0.0), C::new(19949.0 / 321055.0, 0.0), 21);
        let a = crate::pieces::a_series();
        for k in 0..=17 {
            assert!((b[k + 2].re - a.get(k).to_f64()).abs() < 1e-14, "{k}");
        }
    }

    #[test]
    fn manufactured_pole_recovered() {
        let xp = C::new(-3.1, 0.0);
        let a2 = C::new(0.2, 0.0);
        let x = xp + 0.9;
        let (y, yp) = pole_series_eval(xp, a2, x, FIT_TERMS);
        let seed = TrajPoint { x, y, yp, err: 0.0 };
        let (hx, ha) = pole_hunt_from(seed, -3.0).unwrap();
        assert!((hx.to_f64() + 3.1).abs() < 1e-9, "{hx}");
        assert!((ha.to_f64() - 0.2).abs() < 1e-6, "{ha}");
    }

    #[test]
    fn blow_up_reported() {
        let xp = C::new(-3.1, 0.0);
        let x = xp + 0.5;
        let (y, yp) = pole_series_eval(xp, C::new(0.0, 0.0), x, FIT_TERMS);
        let e = taylor_integrate(TrajPoint { x, y, yp, err: 0.0 }, C::new(-3.5, 0.0), ORDER, TOL);
        assert!(matches!(e, Err(Error::PoleEncountered(_))));
    }

    #[test]
    fn oracle_agrees_with_certificates() {
        let rep = oracle_check().unwrap();
        assert!(rep.band_ok, "{rep:?}");
        assert!(rep.xp_ok && rep.a2_ok, "{rep:?}");
        assert!(rep.circle_ok, "{rep:?}");
        assert!(rep.residue_ok, "{rep:?}");
    }

    #[test]
    fn circle_matches_d4_formula() {
        let (_, end) = band_excess(10).unwrap();
        let pts = circle_traverse(end, 16, TOL).unwrap();
        for (k, p) in pts.iter().enumerate() {
            let y0 = y0_circle(2.0 * PI * k as f64 / 16.0).unwrap();
            assert!((p.y - y0).norm() < 2.35e-5 + 1e-8, "{k}");
        }
    }

    #[test]
    fn halving_tol_shrinks_error() {
        let seed = seed_point(&big_l(), 128).unwrap();
        let end = C::new(crate::pieces::l0().to_f64(), 0.0);
        let reference = taylor_integrate(seed, end, 12, 1e-15).unwrap().last().unwrap().y;
        let mut ratios = Vec::new();
        let mut prev = None;
        for k in 0..5 {
            let tol = 1e-4 / 2f64.powi(k);
            let y = taylor_integrate(seed, end, 4, tol).unwrap().last().unwrap().y;
            let e = (y - reference).norm();
            if let Some(p) = prev {
                ratios.push(p / e);
            }
            prev = Some(e);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!(mean >= 2.0, "{ratios:?}");
    }
}
