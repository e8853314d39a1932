//! One certified inequality and its report form.

use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_scalars::{rational_string, Ball};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// computed upper end `<=` paper value
    Le,
    /// computed upper end `<` paper value
    Lt,
    /// computed lower end `>` paper value
    Gt,
    /// enclosure contains the paper value
    Contains,
    /// enclosure, widened to the tolerance, contains the paper value
    Near,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    UnverifiedDependency,
    Disabled,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallJson {
    pub mid: String,
    pub rad: String,
}

impl From<&Ball> for BallJson {
    fn from(b: &Ball) -> BallJson {
        BallJson { mid: b.mid_decimal(20), rad: b.rad_decimal() }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub paper_value: Rational,
    pub computed: Ball,
    pub tolerance: Option<Rational>,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckJson {
    pub name: String,
    pub relation: Relation,
    pub paper_value: String,
    pub computed: BallJson,
    /// `(paper - upper) / |paper|` for upper-bound checks.
    pub margin: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: &str, relation: Relation, computed: Ball, paper: Rational, tol: Option<Rational>) -> Check {
        let pass = match relation {
            Relation::Le => computed.le_rational(&paper),
            Relation::Lt => computed.lt_rational(&paper),
            Relation::Gt => computed.lower() > paper,
            Relation::Contains => computed.contains_rational(&paper),
            Relation::Near => computed.add_error_rational(tol.as_ref().expect("tolerance")).contains_rational(&paper),
        };
        Check { name: name.to_string(), relation, paper_value: paper, computed, tolerance: tol, pass, note: None }
    }

    pub fn le(name: &str, computed: Ball, paper: Rational) -> Check {
        Check::new(name, Relation::Le, computed, paper, None)
    }

    pub fn lt(name: &str, computed: Ball, paper: Rational) -> Check {
        Check::new(name, Relation::Lt, computed, paper, None)
    }

    pub fn gt(name: &str, computed: Ball, paper: Rational) -> Check {
        Check::new(name, Relation::Gt, computed, paper, None)
    }

    pub fn contains(name: &str, computed: Ball, paper: Rational) -> Check {
        Check::new(name, Relation::Contains, computed, paper, None)
    }

    pub fn near(name: &str, computed: Ball, paper: Rational, tol: Rational) -> Check {
        Check::new(name, Relation::Near, computed, paper, Some(tol))
    }

    /// An exact rational identity or inequality decided without rounding.
    pub fn exact(name: &str, holds: bool, value: Rational) -> Check {
        let computed = Ball::from_rational(&value, 128);
        Check {
            name: name.to_string(),
            relation: Relation::Contains,
            paper_value: value,
            computed,
            tolerance: None,
            pass: holds,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Check {
        self.note = Some(note.into());
        self
    }

    /// Relative slack of an upper-bound check, as a float for display and tests.
    pub fn margin(&self) -> Option<f64> {
        match self.relation {
            Relation::Le | Relation::Lt => {
                let p = Float::with_val(128, &self.paper_value);
                let u = self.computed.upper();
                Some((Float::with_val(128, &p - &u) / p.clone().abs()).to_f64())
            }
            Relation::Gt => {
                if self.paper_value == 0 {
                    return None;
                }
                let p = Float::with_val(128, &self.paper_value);
                let l = self.computed.lower();
                Some((Float::with_val(128, &l - &p) / p.clone().abs()).to_f64())
            }
            _ => None,
        }
    }

    pub fn status(&self) -> Status {
        if self.pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn to_json(&self) -> CheckJson {
        CheckJson {
            name: self.name.clone(),
            relation: self.relation,
            paper_value: rational_string(&self.paper_value),
            computed: (&self.computed).into(),
            margin: self.margin().map(|m| format!("{m:.6e}")),
            status: self.status(),
            note: self.note.clone(),
        }
    }
}

/// A named list of checks that must all pass.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn new(name: &str, checks: Vec<Check>) -> Certificate {
        Certificate { name: name.to_string(), checks }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn require(&self) -> Result<()> {
        match first_failure(&self.checks) {
            None => Ok(()),
            Some(m) => Err(Error::CertificateFailed(format!("{}: {m}", self.name))),
        }
    }
}

/// Outcome of one Banach fixed-point argument.
#[derive(Clone, Debug)]
pub struct ContractionCertificate {
    pub domain: String,
    /// How the error is weighted in the norm, e.g. `x^10` or `z^{16/5}`.
    pub norm: String,
    pub delta: Rational,
    /// Left side of the ball-map inequality.
    pub ball_map: Ball,
    pub contraction_factor: Ball,
    /// Certified `sup |E|` (or its weighted analogue) and `sup |E'|`.
    pub e_bound: Ball,
    pub e_prime_bound: Ball,
    pub checks: Vec<Check>,
}

impl ContractionCertificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn require(&self) -> Result<()> {
        match first_failure(&self.checks) {
            None => Ok(()),
            Some(m) => Err(Error::CertificateFailed(format!("{} fixed point: {m}", self.domain))),
        }
    }
}

/// First failing check, as an error message.
pub fn first_failure(checks: &[Check]) -> Option<String> {
    checks.iter().find(|c| !c.pass).map(|c| {
        format!("{}: computed {} vs {}", c.name, c.computed.upper_decimal(10), rational_string(&c.paper_value))
    })
}
