//! Junction handoffs, `E0` bounds and the fixed-point inequalities on D2, D3, D4.
//!
//! Downstream steps take the rounded published constants (as balls rounded up) rather than the
//! raw enclosures, so each step certifies exactly the displayed chain.

use rug::Rational;
use serde::Serialize;

use crate::approximant::Junction;
use crate::certificate::{Check, ContractionCertificate};
use crate::error::{Error, Result};
use crate::exact_scalars::{ball_up, decimal, q, Ball};
use crate::greens::{z0, GreensBoundSet};
use crate::pieces::{big_l, gamma, l0, r};

/// Published constant `s` as a ball whose upper end is `>= s`.
pub fn pc(s: &str, prec: u32) -> Ball {
    ball_up(&decimal(s), prec)
}

fn rat(x: &Rational, prec: u32) -> Ball {
    Ball::from_rational(x, prec)
}

/// `(|alpha|, |beta|)` for the next domain from `|E|`, `|E'|` on the previous side and the jump of `y0`.
///
/// `g_at_r` holds `G1(r), G1'(r), G2(r), G2'(r)` and is only read at `x0 + r`.
pub fn handoff(
    prev_e: &Ball,
    prev_ep: &Ball,
    mismatch: (&Ball, &Ball),
    junction: Junction,
    g_at_r: Option<&[Ball; 4]>,
    prec: u32,
) -> Result<(Ball, Ball)> {
    // E(x_e-) = E(x_e+) + y0(x_e+) - y0(x_e-)
    let e = &prev_e.abs() + &mismatch.0.abs();
    let ep = &prev_ep.abs() + &mismatch.1.abs();
    match junction {
        // G1(L) = 1, G1'(L) = 0, G2(L) = 0, G2'(L) = 1
        Junction::L => Ok((e, ep)),
        // G1 = z^4, G2 = z^{-3}, Wronskian -7
        Junction::L0 => {
            let z = rat(&z0(), prec);
            let a = &(&z.powi(-3) * &ep) + &(&z.powi(-4).mul_int(3) * &e);
            let b = &(&z.powi(4) * &ep) + &(&z.powi(3).mul_int(4) * &e);
            Ok((a.div_int(7), b.div_int(7)))
        }
        Junction::X0PlusR => {
            let g = g_at_r.ok_or_else(|| Error::Domain("handoff at x0 + r needs G values at r".into()))?;
            let [g1, g1p, g2, g2p] = g;
            let w = &(g1 * g2p) - &(g2 * g1p);
            if w.contains_zero() {
                return Err(Error::SingularSystem("x0 + r".into()));
            }
            let wabs = w.abs_lower();
            let wb = Ball::from_endpoints(&wabs, &wabs, prec);
            let a = &(&e * &g2p.abs()) + &(&ep * &g2.abs());
            let b = &(&ep * &g1.abs()) + &(&e * &g1p.abs());
            Ok((a.div_ball(&wb)?, b.div_ball(&wb)?))
        }
    }
}

#[derive(Clone, Debug)]
pub struct E0Bound {
    pub e0: Ball,
    pub e0p: Ball,
    pub checks: Vec<Check>,
}

/// `E0` on D2 from the integrated-by-parts form.
pub fn e0_d2(g: &GreensBoundSet, calr: &Ball, alpha1: &Ball, beta1: &Ball, prec: u32) -> E0Bound {
    let w = rat(&Rational::from(big_l() - l0()), prec);
    let cross = &(&g.g1p * &g.g2) + &(&g.g1 * &g.g2p);
    let e0 = &(&(&(&cross * &w) * calr) + &(alpha1 * &g.g1)) + &(beta1 * &g.g2);
    let e0p = &(&(calr + &(&(&(&g.g1p * &g.g2p) * &w) * calr).mul_int(2)) + &(alpha1 * &g.g1p)) + &(beta1 * &g.g2p);
    let checks = vec![
        Check::le("D2 ||E0|| <= 1.745e-7", e0.clone(), decimal("1.745e-7")),
        Check::le("D2 ||E0'|| <= 1.605e-7", e0p.clone(), decimal("1.605e-7")),
    ];
    E0Bound { e0, e0p, checks }
}

pub fn fixed_point_d2(g: &GreensBoundSet, e0: &Ball, e0p: &Ball, delta: &Rational, prec: u32) -> ContractionCertificate {
    let w = rat(&Rational::from(big_l() - l0()), prec);
    let d1 = rat(&Rational::from(delta + 1u32), prec);
    let kk = &(&g.g1 * &g.g2).mul_int(2) * &w;
    let ball_map = &(&kk.mul_int(6) * &d1.sqr()) * &e0.sqr();
    let rhs = e0.mul_rational(delta);
    let factor = &(&kk.mul_int(12) * &d1) * e0;
    let e = &d1 * e0;
    let cross = &(&g.g1p * &g.g2) + &(&g.g2p * &g.g1);
    let ep = e0p + &(&(&cross * &w).mul_int(6) * &e.sqr());
    let checks = vec![
        Check::le("D2 ball map <= delta ||E0||", &ball_map - &rhs, q(0, 1)),
        Check::le("D2 contraction factor <= 1.1e-4", factor.clone(), decimal("1.1e-4")),
        Check::le("D2 ||E|| <= 1.75e-7", e.clone(), decimal("1.75e-7")),
        Check::le("D2 ||E'|| <= 1.61e-7", ep.clone(), decimal("1.61e-7")),
    ];
    ContractionCertificate {
        domain: "D2".into(),
        norm: "sup".into(),
        delta: delta.clone(),
        ball_map,
        contraction_factor: factor,
        e_bound: e,
        e_prime_bound: ep,
        checks,
    }
}

/// `z^g (a z^4 + b z^{-3})` at `z0` and `4 a z^3 + 3 b z^{-4}` at `r`, with the sign analysis placing the maxima there.
pub fn e01_d3(alpha2: &Ball, beta2: &Ball, prec: u32) -> Result<(Ball, Ball, Vec<Check>)> {
    let g = gamma();
    let z0r = z0();
    let zb = rat(&z0r, prec);
    let zg = zb.pow_rational(&g)?;
    let w = &zg * &(&(alpha2 * &zb.powi(4)) + &(beta2 * &zb.powi(-3)));
    let rb = rat(&r(), prec);
    let wp = &(alpha2 * &rb.powi(3)).mul_int(4) + &(beta2 * &rb.powi(-4)).mul_int(3);
    // weighted E01: both exponents g + 4, g - 3 positive, so it increases in z
    let inc = g > 3;
    // derivative of 4 a z^3 + 3 b z^{-4} is 12 z^{-5}(a z^7 - b); negative on (0, z0] iff a z0^7 < b
    let slack = beta2 - &(alpha2 * &zb.powi(7));
    let checks = vec![
        Check::exact("z^g E01 increasing on D3 (g > 3)", inc, g.clone()),
        Check::gt("E01' decreasing on D3: beta - alpha z0^7 > 0", slack, q(0, 1)),
        Check::le("D3 ||E01||_g at L0 <= 2.03e-6", w.clone(), decimal("2.03e-6")),
        Check::le("D3 ||E01'|| at x0 + r <= 1.2245e-5", wp.clone(), decimal("1.2245e-5")),
    ];
    Ok((w, wp, checks))
}

pub fn e02_checks(e02: &Ball, e02p: &Ball) -> Vec<Check> {
    vec![
        Check::le("D3 ||E02||_g <= 2.3e-9", e02.clone(), decimal("2.3e-9")),
        Check::le("D3 ||E02'|| <= 3.8e-8", e02p.clone(), decimal("3.8e-8")),
    ]
}

pub fn e0_d3(e01: &Ball, e01p: &Ball, e02: &Ball, e02p: &Ball) -> E0Bound {
    let e0 = e01 + e02;
    let e0p = e01p + e02p;
    let checks = vec![
        Check::le("D3 ||E0||_g <= 2.04e-6", e0.clone(), decimal("2.04e-6")),
        Check::le("D3 ||E0'|| <= 1.23e-5", e0p.clone(), decimal("1.23e-5")),
    ];
    E0Bound { e0, e0p, checks }
}

/// D3 in the weighted norm `sup |z^g E|`; `qb`, `tb` bound `Q`, `T` and `k1`, `k2` the `E'` coefficients.
#[allow(clippy::too_many_arguments)]
pub fn fixed_point_d3(
    qb: &Ball,
    tb: &Ball,
    k1: &Ball,
    k2: &Ball,
    e0: &Ball,
    e0p: &Ball,
    delta: &Rational,
    prec: u32,
) -> ContractionCertificate {
    let d1 = rat(&Rational::from(delta + 1u32), prec);
    let ball_map = &(&d1 * qb) + &(&d1.sqr() * e0);
    let c122 = pc("12.2", prec);
    let factor = qb + &(&c122 * &d1) * e0;
    // the factor's second term is 2 T (1 + delta) ||E0|| <= 12.2 (1 + delta) ||E0||
    let e = &d1 * e0;
    let ep = &(e0p + &(k1 * &e)) + &(k2 * &e.sqr());
    let checks = vec![
        Check::le("D3 ball map (1+d) 0.49 + (1+d)^2 ||E0||_g <= delta", ball_map.clone(), delta.clone()),
        Check::le("2 ||T|| <= 12.2", tb.mul_int(2), decimal("12.2")),
        Check::le("D3 contraction factor 0.49 + 12.2 (1+d) ||E0||_g <= 1/2", factor.clone(), q(1, 2)),
        Check::le("D3 ||E||_g <= 4.01e-6", e.clone(), decimal("4.01e-6")),
        Check::le("D3 ||E'|| <= ||E0'|| + 6.3 ||E||_g + 12.3 ||E||_g^2 <= 3.76e-5", ep.clone(), decimal("3.76e-5")),
    ];
    ContractionCertificate {
        domain: "D3".into(),
        norm: "(x-x0)^{16/5}".into(),
        delta: delta.clone(),
        ball_map,
        contraction_factor: factor,
        e_bound: e,
        e_prime_bound: ep,
        checks,
    }
}

/// `|E(x0 + r)|` from the values of the weighted terms at `r` instead of their suprema.
pub fn d3_endpoint_pointwise(
    e01_at_r: &Ball,
    e02_at_r: &Ball,
    q_at_r: &Ball,
    t_at_r: &Ball,
    e_weighted: &Ball,
    prec: u32,
) -> Result<Ball> {
    let rb = rat(&r(), prec);
    let s = &(&(e01_at_r.abs() + e02_at_r.abs()) + &(q_at_r * e_weighted)) + &(t_at_r * &e_weighted.sqr());
    Ok(&s * &rb.pow_rational(&Rational::from(-gamma()))?)
}

/// `z^g (a z^4 + b z^{-3})` at `z = r`.
pub fn e01_weighted_at_r(alpha2: &Ball, beta2: &Ball, prec: u32) -> Result<Ball> {
    let rb = rat(&r(), prec);
    Ok(&rb.pow_rational(&gamma())? * &(&(alpha2 * &rb.powi(4)) + &(beta2 * &rb.powi(-3))))
}

pub fn e0_d4(g: &GreensBoundSet, rsum: &Ball, alpha3: &Ball, beta3: &Ball, prec: u32) -> E0Bound {
    let pr = &Ball::pi(prec) * &rat(&r(), prec);
    let e0 = &(&(&(&pr.mul_int(4).div_int(7) * &g.g1) * &g.g2) * rsum) + &(&(alpha3 * &g.g1) + &(beta3 * &g.g2));
    let cross = &(&g.g1 * &g.g2p) + &(&g.g2 * &g.g1p);
    let e0p = &(&(&pr.mul_int(2).div_int(7) * &cross) * rsum) + &(&(alpha3 * &g.g1p) + &(beta3 * &g.g2p));
    let checks = vec![
        Check::le("D4 ||E0|| <= 2.34e-5", e0.clone(), decimal("2.34e-5")),
        Check::le("D4 ||E0'|| <= 1.15e-4", e0p.clone(), decimal("1.15e-4")),
    ];
    E0Bound { e0, e0p, checks }
}

pub fn fixed_point_d4(g: &GreensBoundSet, e0: &Ball, e0p: &Ball, delta: &Rational, prec: u32) -> ContractionCertificate {
    let pr7 = (&Ball::pi(prec) * &rat(&r(), prec)).div_int(7);
    let d1 = rat(&Rational::from(delta + 1u32), prec);
    let gg = &g.g1 * &g.g2;
    let ball_map = &(&(&pr7.mul_int(24) * &gg) * &d1.sqr()) * &e0.sqr();
    let rhs = e0.mul_rational(delta);
    let factor = &(&(&pr7.mul_int(48) * &gg) * &d1) * e0;
    let e = &d1 * e0;
    let cross = &(&g.g1p * &g.g2) + &(&g.g2p * &g.g1);
    let ep = e0p + &(&(&pr7.mul_int(12) * &cross) * &(&d1.sqr() * &e0.sqr()));
    let checks = vec![
        Check::le("D4 ball map <= delta ||E0||", &ball_map - &rhs, q(0, 1)),
        Check::le("D4 contraction factor <= 3e-4", factor.clone(), decimal("3e-4")),
        Check::le("D4 ||E|| <= 2.35e-5", e.clone(), decimal("2.35e-5")),
        Check::le("D4 ||E'|| <= 1.16e-4", ep.clone(), decimal("1.16e-4")),
    ];
    ContractionCertificate {
        domain: "D4".into(),
        norm: "sup".into(),
        delta: delta.clone(),
        ball_map,
        contraction_factor: factor,
        e_bound: e,
        e_prime_bound: ep,
        checks,
    }
}

/// Published `delta` per domain.
pub fn paper_delta(domain: &str) -> Option<Rational> {
    match domain {
        "D1" => Some(decimal("0.002")),
        "D2" => Some(decimal("5.5e-5")),
        "D3" => Some(decimal("0.963")),
        "D4" => Some(decimal("2e-4")),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaProbe {
    pub domain: String,
    pub delta: String,
    pub half_delta_ball_map_holds: bool,
    pub half_delta_all_checks_hold: bool,
}

/// Re-runs each fixed-point inequality with half the published `delta`; informational only.
pub fn delta_halving_probe(
    d2: (&GreensBoundSet, &Ball, &Ball),
    d3: (&Ball, &Ball, &Ball, &Ball, &Ball, &Ball),
    d4: (&GreensBoundSet, &Ball, &Ball),
    prec: u32,
) -> Vec<DeltaProbe> {
    let half = |d: &str| paper_delta(d).unwrap() / 2u32;
    let certs = [
        fixed_point_d2(d2.0, d2.1, d2.2, &half("D2"), prec),
        fixed_point_d3(d3.0, d3.1, d3.2, d3.3, d3.4, d3.5, &half("D3"), prec),
        fixed_point_d4(d4.0, d4.1, d4.2, &half("D4"), prec),
    ];
    certs
        .iter()
        .map(|c| DeltaProbe {
            domain: c.domain.clone(),
            delta: crate::exact_scalars::rational_string(&c.delta),
            half_delta_ball_map_holds: c.checks[0].pass,
            half_delta_all_checks_hold: c.passed(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::{d2_energy_bounds, d4_series_bounds, d4_values_at_r};
    use crate::pieces::gamma0;

    const P: u32 = 128;

    #[test]
    fn d2_chain_from_published_inputs() {
        let g = d2_energy_bounds(&gamma0(), P).unwrap();
        let (a1, b1) = handoff(
            &pc("5.625e-10", P),
            &pc("2.12e-9", P),
            (&pc("5e-14", P), &pc("7.5e-14", P)),
            Junction::L,
            None,
            P,
        )
        .unwrap();
        assert!(a1.le_rational(&decimal("5.63e-10")) && b1.le_rational(&decimal("2.13e-9")));
        let e0 = e0_d2(&g, &pc("3.75e-9", P), &pc("5.63e-10", P), &pc("2.13e-9", P), P);
        assert!(e0.checks.iter().all(|c| c.pass), "{:?}", crate::certificate::first_failure(&e0.checks));
        let fp = fixed_point_d2(&g, &pc("1.745e-7", P), &pc("1.605e-7", P), &paper_delta("D2").unwrap(), P);
        assert!(fp.passed(), "{:?}", crate::certificate::first_failure(&fp.checks));
    }

    #[test]
    fn d3_handoff_and_e01() {
        let (a2, b2) =
            handoff(&pc("1.75e-7", P), &pc("1.61e-7", P), (&Ball::zero(P), &Ball::zero(P)), Junction::L0, None, P)
                .unwrap();
        assert!((a2.to_f64() - 9.207e-9).abs() < 1e-11, "{a2}");
        assert!((b2.to_f64() - 9.7576e-7).abs() < 1e-10, "{b2}");
        let (w, wp, checks) = e01_d3(&pc("9.22e-9", P), &pc("9.76e-7", P), P).unwrap();
        assert!(checks.iter().all(|c| c.pass));
        assert!((w.to_f64() - 2.0263e-6).abs() < 1e-9);
        assert!((wp.to_f64() - 1.22076e-5).abs() < 1e-9);
    }

    #[test]
    fn d3_fixed_point_from_published_inputs() {
        let fp = fixed_point_d3(
            &pc("0.49", P),
            &pc("1", P),
            &pc("6.3", P),
            &pc("12.3", P),
            &pc("2.04e-6", P),
            &pc("1.23e-5", P),
            &paper_delta("D3").unwrap(),
            P,
        );
        assert!(fp.passed(), "{:?}", crate::certificate::first_failure(&fp.checks));
    }

    #[test]
    fn d4_handoff_pointwise_and_sup_routes() {
        let g = d4_values_at_r(60, P).unwrap();
        let jumps = (pc("4e-10", P), pc("7e-8", P));
        let (a_sup, b_sup) =
            handoff(&pc("1.26e-5", P), &pc("3.76e-5", P), (&jumps.0, &jumps.1), Junction::X0PlusR, Some(&g), P)
                .unwrap();
        // the sup-norm route lands just above the published alpha3
        assert!((a_sup.to_f64() - 3.857e-5).abs() < 2e-8, "{a_sup}");
        assert!(b_sup.le_rational(&decimal("3.76e-6")));
        let e_r = d3_endpoint_pointwise(
            &e01_weighted_at_r(&pc("9.22e-9", P), &pc("9.76e-7", P), P).unwrap(),
            &pc("2.3e-9", P),
            &pc("0.4629", P),
            &pc("0.8628", P),
            &pc("4.01e-6", P),
            P,
        )
        .unwrap();
        assert!((e_r.to_f64() - 8.665e-6).abs() < 5e-9, "{e_r}");
        let (a, b) = handoff(&e_r, &pc("3.76e-5", P), (&jumps.0, &jumps.1), Junction::X0PlusR, Some(&g), P).unwrap();
        assert!(a.le_rational(&decimal("3.82e-5")) && b.le_rational(&decimal("3.76e-6")));
    }

    #[test]
    fn d4_chain_from_published_inputs() {
        let g = d4_series_bounds(P).unwrap();
        let e0 = e0_d4(&g, &pc("1.311e-6", P), &pc("3.82e-5", P), &pc("3.76e-6", P), P);
        assert!(e0.checks.iter().all(|c| c.pass), "{:?}", crate::certificate::first_failure(&e0.checks));
        let fp = fixed_point_d4(&g, &pc("2.34e-5", P), &pc("1.15e-4", P), &paper_delta("D4").unwrap(), P);
        assert!(fp.passed(), "{:?}", crate::certificate::first_failure(&fp.checks));
    }

    #[test]
    fn singular_system_detected() {
        let z = Ball::zero(P);
        let g = [z.clone(), z.clone(), z.clone(), z.clone()];
        let e = handoff(&z, &z, (&z, &z), Junction::X0PlusR, Some(&g), P);
        assert!(matches!(e, Err(Error::SingularSystem(_))));
    }
}
