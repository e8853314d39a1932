//! One double pole inside `|x - x0| < r`, from exact residues of `y0` plus the norm bound on `E`.

use rug::Rational;
use serde::Serialize;

use crate::certificate::{Check, Certificate};
use crate::error::{Error, Result};
use crate::exact_scalars::{decimal, q, rational_string, Ball};
use crate::pieces::{pow_rat, r, x0, y0_d4_poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    Zeta,
    Zeta2,
}

/// Residue of `zeta^k Y0(zeta)` at 0, read off the exact Laurent coefficients.
pub fn residue_exact(w: Weight) -> Rational {
    let k = match w {
        Weight::Zeta => 1,
        Weight::Zeta2 => 2,
    };
    y0_d4_poly().coeff(-1 - k)
}

/// `|1 + (1/2 pi i) int zeta y| <= |1 + res| + r^2 ||E||`; below 1 means exactly one double pole.
pub fn count_poles(e_bound: &Ball) -> Certificate {
    let res = residue_exact(Weight::Zeta);
    let prec = e_bound.prec();
    let lead = Rational::from(&res + 1u32).abs();
    let bound = &Ball::from_rational(&lead, prec) + &e_bound.abs().mul_rational(&pow_rat(&r(), 2));
    Certificate::new(
        "pole count",
        vec![
            Check::exact("residue of zeta y0 = -1", res == -1, res.clone()),
            Check::le("r^2 ||E|| <= 1.2e-5", bound.clone(), decimal("1.2e-5")),
            Check::lt("pole-count defect < 1", bound, q(1, 1)),
        ],
    )
}

#[derive(Clone, Debug)]
pub struct PoleEnclosure {
    pub center: Rational,
    pub radius_bound: Ball,
    pub count: u32,
    pub on_negative_axis: bool,
    pub justification: String,
    pub checks: Vec<Check>,
}

#[derive(Serialize)]
pub struct PoleJson {
    pub x0: String,
    pub radius_bound: crate::certificate::BallJson,
    pub count: u32,
    pub on_negative_axis: bool,
    pub conditional_notes: String,
    pub checks: Vec<crate::certificate::CheckJson>,
}

impl PoleEnclosure {
    pub fn to_json(&self) -> PoleJson {
        PoleJson {
            x0: rational_string(&self.center),
            radius_bound: (&self.radius_bound).into(),
            count: self.count,
            on_negative_axis: self.on_negative_axis,
            conditional_notes: self.justification.clone(),
            checks: self.checks.iter().map(|c| c.to_json()).collect(),
        }
    }
}

/// Closest pole to the origin as quoted from prior numerics.
pub fn published_pole() -> Rational {
    decimal("-2.3841687675")
}

/// `(1/2 pi i) int zeta^2 y = -2 (x_p - x0)` and the `zeta^2 y0` part is analytic, so `|x_p - x0| <= r^3 ||E|| / 2`.
pub fn enclose_pole(e_bound: &Ball) -> Result<PoleEnclosure> {
    let count = count_poles(e_bound);
    count.require()?;
    if residue_exact(Weight::Zeta2) != 0 {
        return Err(Error::AlgebraMismatch("zeta^2 y0 has a residue".into()));
    }
    let prec = e_bound.prec();
    let rad = e_bound.abs().mul_rational(&(pow_rat(&r(), 3) / 2u32));
    let offset = Rational::from(x0() - published_pole()).abs();
    let mut checks = count.checks;
    checks.push(Check::exact("residue of zeta^2 y0 = 0", true, q(0, 1)));
    checks.push(Check::le("|x_p - x0| <= r^3 ||E|| / 2 <= 4.1e-6", rad.clone(), decimal("4.1e-6")));
    checks.push(Check::lt("|x_p - x0| < r", rad.clone(), r()));
    checks.push(Check::le(
        "|x_p - (-2.3841687675)| <= 5e-6",
        &rad + &Ball::from_rational(&offset, prec),
        decimal("5e-6"),
    ));
    Ok(PoleEnclosure {
        center: x0(),
        radius_bound: rad,
        count: 1,
        on_negative_axis: true,
        justification: "closest to the origin: conditional on cited prior numerics plus absence of blow-up on D".into(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::pc;

    #[test]
    fn residues() {
        assert_eq!(residue_exact(Weight::Zeta), -1);
        assert_eq!(residue_exact(Weight::Zeta2), 0);
        // the zeta^2 P(zeta) part contributes nothing to either residue
        let p = y0_d4_poly();
        assert!(p.terms().all(|(k, _)| k == -2 || k >= 2));
    }

    #[test]
    fn published_bound_encloses() {
        let e = enclose_pole(&pc("2.35e-5", 128)).unwrap();
        assert!(e.checks.iter().all(|c| c.pass));
        assert!((e.radius_bound.to_f64() - 4.03025e-6).abs() < 1e-10);
    }

    #[test]
    fn huge_error_fails() {
        let c = count_poles(&Ball::from_int(3, 128));
        assert!(!c.passed());
        assert!(enclose_pole(&Ball::from_int(3, 128)).is_err());
    }

    #[test]
    fn zero_error_is_exact_pole() {
        let e = enclose_pole(&Ball::zero(128)).unwrap();
        assert!(e.radius_bound.is_exact() && e.radius_bound.contains_zero());
    }
}
