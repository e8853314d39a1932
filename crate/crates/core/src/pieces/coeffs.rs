use std::sync::OnceLock;

use rug::Rational;

use super::laurent::LaurentPoly;
use super::recurrence::{a_coeffs, ab_recurrences, SeriesCoeffs};
use super::{tau_half, tau_mid, x0};
use crate::exact_scalars::q;

const PU: [(i64, i64); 23] = [
    (335867, 539062),
    (419712, 989125),
    (-352463, 3539236),
    (60789, 1703279),
    (-132842, 11825541),
    (43961, 54574472),
    (39599, 12036926),
    (-213665, 48625258),
    (61644, 14973337),
    (-107283, 33444500),
    (44761, 18892011),
    (-28249, 13550715),
    (20641, 14839893),
    (13459, 92774551),
    (-4992, 34838093),
    (-11771, 8149937),
    (24115, 27631671),
    (42106, 39550107),
    (-21163, 32637441),
    (-9782, 15918509),
    (11581, 32652169),
    (14692, 88640147),
    (-12278, 123249611),
];

/// The 23 coefficients `c_k` of `P_u` in the variable `tau`.
pub fn pu_coeffs() -> &'static [Rational] {
    static C: OnceLock<Vec<Rational>> = OnceLock::new();
    C.get_or_init(|| PU.iter().map(|&(n, d)| q(n, d)).collect())
}

/// Cubic lower model of `P_u` used in the positivity argument on D3.
pub fn pa_coeffs() -> [Rational; 4] {
    [
        q(335867, 539062),
        Rational::from((835179584688i64, 1968351794375i64)),
        q(-7294680, 73240997),
        q(60789, 1703279),
    ]
}

/// `(k, c, s)` with `P_a'(tau) = k((tau - c)^2 + s^2)`.
pub fn pa_prime_factored() -> (Rational, Rational, Rational) {
    (q(182367, 1703279), q(40, 43), q(44, 25))
}

pub fn pu_tau_poly() -> LaurentPoly {
    LaurentPoly::from_coeffs(Rational::new(), pu_coeffs())
}

/// `P_u(tau(x))` in powers of `z = x - x0`.
pub fn pu_z_poly() -> &'static LaurentPoly {
    static P: OnceLock<LaurentPoly> = OnceLock::new();
    P.get_or_init(|| {
        let alpha = tau_half().recip();
        let beta = (x0() - tau_mid()) / tau_half();
        LaurentPoly::compose_affine(pu_coeffs(), &alpha, &beta, x0())
    })
}

/// `y0 = -z^{-2} + P_u(tau)` on D2 and D3, as a Laurent polynomial about `x0`.
pub fn y0_d23_poly() -> &'static LaurentPoly {
    static P: OnceLock<LaurentPoly> = OnceLock::new();
    P.get_or_init(|| {
        let mut p = pu_z_poly().clone();
        p.add_term(-2, q(-1, 1));
        p
    })
}

pub fn a2() -> Rational {
    q(19949, 321055)
}

/// `a_0..a_17` for the stored pole estimate.
pub fn a_series() -> &'static SeriesCoeffs {
    static A: OnceLock<SeriesCoeffs> = OnceLock::new();
    A.get_or_init(|| a_coeffs(&x0(), &a2()))
}

/// `A_n`, `B_n` up to `n_max` for the stored `a` sequence.
pub fn ab_series(n_max: usize) -> (SeriesCoeffs, SeriesCoeffs) {
    ab_recurrences(a_series(), n_max)
}

/// `P(z) = sum_{k<=17} a_k z^k` about `x0`.
pub fn p_poly() -> LaurentPoly {
    LaurentPoly::from_coeffs(x0(), &a_series().values)
}

/// `y0(x0 + z) = -z^{-2} + z^2 P(z)` on D4.
pub fn y0_d4_poly() -> &'static LaurentPoly {
    static P: OnceLock<LaurentPoly> = OnceLock::new();
    P.get_or_init(|| {
        let mut p = p_poly().shift(2);
        p.add_term(-2, q(-1, 1));
        p
    })
}

/// The two induction constants at `n0`: `36/((n0+1)(n0+8)) (4/3)^4` and `36/((n0+1)(n0-6)) (4/3)^4`.
pub fn induction_constants(n0: i64) -> (Rational, Rational) {
    let f = q(256, 81) * q(36, 1);
    (f.clone() / Rational::from((n0 + 1) * (n0 + 8)), f / Rational::from((n0 + 1) * (n0 - 6)))
}
