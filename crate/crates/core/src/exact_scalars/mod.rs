//! Exact rationals and outward-rounded ball arithmetic.

mod ball;
mod complex;

pub use ball::{Ball, RAD_PREC};
pub use complex::ComplexBall;
#[allow(unused_imports)]
pub(crate) use ball::{abs_up, down, up};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

pub const DEFAULT_PREC: u32 = 128;
pub const MAX_PREC: u32 = 4096;

/// `p/q` shorthand for exact constants.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Exact value of a decimal literal such as `"-1.17414e-7"` or `"3.391"`.
pub fn decimal(s: &str) -> Rational {
    try_decimal(s).unwrap_or_else(|e| panic!("bad decimal literal {s:?}: {e}"))
}

pub fn try_decimal(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|e| Error::Fixture(e.to_string()))?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(Error::Fixture(format!("empty mantissa in {s:?}")));
    }
    let digits: String = format!("{int}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Fixture(format!("not a decimal: {s:?}")));
    }
    let n = Integer::from_str_radix(&digits, 10).map_err(|e| Error::Fixture(e.to_string()))?;
    let scale = exp - frac.len() as i32;
    let ten = Integer::from(10);
    let mut v = Rational::from(n);
    if scale >= 0 {
        v *= Rational::from(ten.pow(scale as u32));
    } else {
        v /= Rational::from(ten.pow((-scale) as u32));
    }
    if neg {
        v = -v;
    }
    Ok(v)
}

/// Parse `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.contains('.') || t.contains('e') || t.contains('E') {
        return try_decimal(t);
    }
    t.parse::<Rational>().map_err(|e| Error::Fixture(format!("{s:?}: {e}")))
}

pub fn rational_string(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Re-runs `compute` at doubling precision until the radius drops to `target`.
///
/// Radius is compared by upper bound; the last (too wide) ball is returned in the error.
pub fn refine_to_radius<F>(compute: F, target: &Rational, start_bits: u32, max_bits: u32) -> Result<Ball>
where
    F: Fn(u32) -> Result<Ball>,
{
    let mut bits = start_bits.max(16);
    loop {
        let b = compute(bits)?;
        if b.is_finite() && *b.rad() <= *target {
            return Ok(b);
        }
        if bits >= max_bits {
            return Err(Error::PrecisionExhausted { bits, last: Box::new(b) });
        }
        log::debug!("radius {} above target at {bits} bits, doubling", b.rad_decimal());
        bits = (bits * 2).min(max_bits);
    }
}

/// Ball whose upper end is the rational `q` rounded upward; used for paper bounds fed downstream.
pub fn ball_up(q: &Rational, prec: u32) -> Ball {
    let (f, _) = Float::with_val_round(prec, q, rug::float::Round::Up);
    Ball::with_rad(f, &Float::new(RAD_PREC))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(decimal("3.391"), q(3391, 1000));
        assert_eq!(decimal("-1.17414e-7"), Rational::from((-117414, 1)) / Rational::from(Integer::from(10).pow(12)));
        assert_eq!(decimal("5.5e-5"), q(55, 1_000_000));
        assert_eq!(decimal("2"), q(2, 1));
    }

    #[test]
    fn refine_constant_is_exact() {
        let b = refine_to_radius(|p| Ok(Ball::from_rational(&q(7, 10), p)), &decimal("1e-30"), 128, 4096).unwrap();
        assert!(b.contains_rational(&q(7, 10)));
        assert!(b.rad().to_f64() <= 1e-30);
    }

    #[test]
    fn refine_exhaustion_reports_last_ball() {
        let r = refine_to_radius(
            |p| Ok(Ball::from_rational(&q(1, 3), p).add_error_rational(&q(1, 1000))),
            &q(1, 1_000_000),
            128,
            512,
        );
        match r {
            Err(Error::PrecisionExhausted { bits, last }) => {
                assert_eq!(bits, 512);
                assert!(last.rad().to_f64() >= 1e-3);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn parse_round_trip() {
        let v = q(-770766, 323285);
        assert_eq!(parse_rational(&rational_string(&v)).unwrap(), v);
    }
}
