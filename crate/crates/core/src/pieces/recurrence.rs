use rug::Rational;
use serde::Serialize;

/// Which recurrence produced a coefficient sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeriesKind {
    HatA,
    A,
    BigA,
    BigB,
}

#[derive(Clone, Debug)]
pub struct SeriesCoeffs {
    pub kind: SeriesKind,
    pub values: Vec<Rational>,
    /// Highest index of the `a` sequence that enters a convolution (17 for `P`).
    pub truncation: usize,
}

impl SeriesCoeffs {
    pub fn get(&self, n: usize) -> Rational {
        self.values.get(n).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn conv_aa(v: &[Rational], n: usize) -> Rational {
    let mut s = Rational::new();
    for k in 0..=n - 4 {
        s += Rational::from(&v[k] * &v[n - 4 - k]);
    }
    s
}

/// Local pole-series coefficients: `a_0 = -xp/10`, `a_1 = -1/6`, `a_2` free, `a_3 = 0`, then
/// `a_n = -6/((n+5)(n-2)) sum_{k=0}^{n-4} a_k a_{n-4-k}`.
pub fn hat_a_recurrence(xp: &Rational, a2: &Rational, n_max: usize) -> SeriesCoeffs {
    let mut v: Vec<Rational> = vec![Rational::from(-xp) / 10, Rational::from((-1, 6)), a2.clone(), Rational::new()];
    for n in 4..=n_max {
        let f = Rational::from((-6, ((n + 5) * (n - 2)) as i64));
        let s = conv_aa(&v, n);
        v.push(f * s);
    }
    v.truncate(n_max + 1);
    SeriesCoeffs { kind: SeriesKind::HatA, values: v, truncation: n_max }
}

/// The `a_0..a_17` coefficients of `P` for the given pole estimate.
pub fn a_coeffs(x0: &Rational, a2: &Rational) -> SeriesCoeffs {
    let mut s = hat_a_recurrence(x0, a2, 17);
    s.kind = SeriesKind::A;
    s
}

/// Series coefficients of the two homogeneous solutions on the circle around `x0`:
/// `G_1 = sum A_n z^{n+4}`, `G_2 = sum B_n z^{n-3}`.
pub fn ab_recurrences(a: &SeriesCoeffs, n_max: usize) -> (SeriesCoeffs, SeriesCoeffs) {
    let trunc = a.truncation;
    let mut big_a: Vec<Rational> = vec![Rational::from(1), Rational::new(), Rational::new(), Rational::new()];
    let mut big_b = big_a.clone();
    for n in 4..=n_max {
        let upper = (n - 4).min(trunc);
        let mut sa = Rational::new();
        let mut sb = Rational::new();
        for k in 0..=upper {
            let ak = a.get(k);
            sa += Rational::from(&ak * &big_a[n - 4 - k]);
            sb += ak * &big_b[n - 4 - k];
        }
        let n_i = n as i64;
        big_a.push(Rational::from((-12, n_i * (n_i + 7))) * sa);
        if n == 7 {
            big_b.push(Rational::new());
        } else {
            big_b.push(Rational::from((-12, n_i * (n_i - 7))) * sb);
        }
    }
    big_a.truncate(n_max + 1);
    big_b.truncate(n_max + 1);
    (
        SeriesCoeffs { kind: SeriesKind::BigA, values: big_a, truncation: trunc },
        SeriesCoeffs { kind: SeriesKind::BigB, values: big_b, truncation: trunc },
    )
}

/// Checks the defining recurrence at every stored index; returns the first bad index.
pub fn verify_recurrence(s: &SeriesCoeffs, a: Option<&SeriesCoeffs>) -> Result<(), usize> {
    match s.kind {
        SeriesKind::HatA | SeriesKind::A => {
            if s.values.len() > 3 && s.values[3] != 0 {
                return Err(3);
            }
            for n in 4..s.values.len() {
                let want = Rational::from((-6, ((n + 5) * (n - 2)) as i64)) * conv_aa(&s.values, n);
                if want != s.values[n] {
                    return Err(n);
                }
            }
        }
        SeriesKind::BigA | SeriesKind::BigB => {
            let a = a.expect("A/B verification needs the a sequence");
            for n in 1..4.min(s.values.len()) {
                if s.values[n] != 0 {
                    return Err(n);
                }
            }
            for n in 4..s.values.len() {
                let mut sum = Rational::new();
                for k in 0..=(n - 4).min(s.truncation) {
                    sum += a.get(k) * &s.values[n - 4 - k];
                }
                let n_i = n as i64;
                let want = match s.kind {
                    SeriesKind::BigA => Rational::from((-12, n_i * (n_i + 7))) * sum,
                    _ if n == 7 => Rational::new(),
                    _ => Rational::from((-12, n_i * (n_i - 7))) * sum,
                };
                if want != s.values[n] {
                    return Err(n);
                }
            }
        }
    }
    Ok(())
}
