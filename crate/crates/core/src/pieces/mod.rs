//! Exact constants, stored polynomials and series recurrences.

mod coeffs;
pub mod fixture;
pub mod laurent;
pub mod powlog;
pub mod recurrence;
pub mod tail;

pub use coeffs::{
    a2, a_series, ab_series, induction_constants, p_poly, pa_coeffs, pa_prime_factored, pu_coeffs, pu_tau_poly, pu_z_poly,
    y0_d23_poly, y0_d4_poly,
};
pub use laurent::{pow_rat, Antiderivative, LaurentPoly};
pub use powlog::PowLog;
pub use recurrence::{ab_recurrences, a_coeffs, hat_a_recurrence, verify_recurrence, SeriesCoeffs, SeriesKind};
pub use tail::{geometric_tail, TailWeight};

use rug::Rational;

use crate::exact_scalars::{q, Ball};

/// Radius of the circle around `x0`.
pub fn r() -> Rational {
    q(7, 10)
}

/// Pole estimate.
pub fn x0() -> Rational {
    q(-770766, 323285)
}

pub fn big_l() -> Rational {
    q(11, 2)
}

pub fn l0() -> Rational {
    q(-49, 100)
}

/// Split point for the two-piece `G` bounds on D2.
pub fn gamma0() -> Rational {
    q(-16, 100)
}

/// Exponent of the weighted norm on D3.
pub fn gamma() -> Rational {
    q(16, 5)
}

/// `x0 + r`, left end of the real domains.
pub fn x0_plus_r() -> Rational {
    x0() + r()
}

fn tau_mid() -> Rational {
    (big_l() + x0() + r()) / 2
}

fn tau_half() -> Rational {
    (big_l() - x0() - r()) / 2
}

/// Affine map taking `[x0 + r, L]` onto `[-1, 1]`.
pub fn tau(x: &Rational) -> Rational {
    Rational::from(x - tau_mid()) / tau_half()
}

/// `dtau/dx`.
pub fn tau_slope() -> Rational {
    tau_half().recip()
}

/// `b = (4/5) 24^{1/4}`.
pub fn b_ball(prec: u32) -> Ball {
    Ball::from_int(24, prec).root(4).expect("24 > 0").mul_rational(&q(4, 5))
}

/// `a = (5/2) b`.
pub fn a_ball(prec: u32) -> Ball {
    b_ball(prec).mul_rational(&q(5, 2))
}

pub fn sqrt6(prec: u32) -> Ball {
    Ball::from_int(6, prec).sqrt().expect("6 > 0")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_endpoints() {
        assert_eq!(tau(&big_l()), 1);
        assert_eq!(tau(&x0_plus_r()), -1);
        let t = tau(&l0());
        let direct = (l0() - (big_l() + x0() + r()) / 2) / ((big_l() - x0() - r()) / 2);
        assert_eq!(t, direct);
        assert!(t > -1 && t < 1);
    }

    #[test]
    fn ab_product_is_eight_fifths_sqrt24() {
        let prec = 256;
        let ab = &a_ball(prec) * &b_ball(prec);
        let exact = Ball::from_int(24, prec).sqrt().unwrap().mul_rational(&q(8, 5));
        assert!(ab.overlaps(&exact));
        assert!(ab.rad().to_f64() < 1e-60);
    }
}
