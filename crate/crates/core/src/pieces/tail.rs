use rug::Rational;

use super::laurent::pow_rat;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailWeight {
    /// `sum_{n >= from} c q^n`
    None,
    /// `sum_{n >= from} n c q^{n-1}`
    Linear,
}

/// Exact closed form of a geometric tail with ratio `0 < q < 1`.
pub fn geometric_tail(c: &Rational, ratio: &Rational, from_n: u32, weight: TailWeight) -> Result<Rational> {
    if *ratio <= 0 || *ratio >= 1 {
        return Err(Error::Domain(format!("geometric ratio {ratio} outside (0, 1)")));
    }
    let one_minus = Rational::from(1 - ratio);
    let qn = pow_rat(ratio, from_n as i32);
    let v = match weight {
        TailWeight::None => qn / &one_minus,
        TailWeight::Linear => {
            // sum_{n>=m} n q^{n-1} = m q^{m-1}/(1-q) + q^m/(1-q)^2
            let lead = if from_n == 0 {
                Rational::new()
            } else {
                Rational::from(from_n) * pow_rat(ratio, from_n as i32 - 1) / &one_minus
            };
            lead + qn / Rational::from(one_minus.square_ref())
        }
    };
    Ok(v * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_scalars::q;

    #[test]
    fn plain_geometric() {
        assert_eq!(geometric_tail(&q(1, 1), &q(1, 2), 0, TailWeight::None).unwrap(), q(2, 1));
    }

    #[test]
    fn linear_weight() {
        assert_eq!(geometric_tail(&q(1, 1), &q(1, 2), 0, TailWeight::Linear).unwrap(), q(4, 1));
        assert_eq!(geometric_tail(&q(1, 1), &q(1, 2), 1, TailWeight::Linear).unwrap(), q(4, 1));
        // from 2: 4 - 1
        assert_eq!(geometric_tail(&q(1, 1), &q(1, 2), 2, TailWeight::Linear).unwrap(), q(3, 1));
    }

    #[test]
    fn rejects_bad_ratio() {
        assert!(geometric_tail(&q(1, 1), &q(1, 1), 0, TailWeight::None).is_err());
    }
}
