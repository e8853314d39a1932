//! Coefficient tables as exact numerator/denominator string pairs.

use indexmap::IndexMap;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::coeffs::{a_series, pa_coeffs, pu_coeffs};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub tables: IndexMap<String, Vec<[String; 2]>>,
}

fn pairs(v: &[Rational]) -> Vec<[String; 2]> {
    v.iter().map(|c| [c.numer().to_string(), c.denom().to_string()]).collect()
}

impl Fixture {
    /// `P_u`, `P_a` and the `a` sequence of `P`.
    pub fn stored() -> Fixture {
        let mut tables = IndexMap::new();
        tables.insert("P_u".to_string(), pairs(pu_coeffs()));
        tables.insert("P_a".to_string(), pairs(&pa_coeffs()));
        tables.insert("a".to_string(), pairs(&a_series().values));
        Fixture { tables }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture serializes")
    }

    pub fn from_json(s: &str) -> Result<Fixture> {
        serde_json::from_str(s).map_err(|e| Error::Fixture(e.to_string()))
    }

    pub fn table(&self, name: &str) -> Result<Vec<Rational>> {
        let t = self.tables.get(name).ok_or_else(|| Error::Fixture(format!("no table {name}")))?;
        t.iter()
            .map(|[n, d]| {
                let n: Integer = n.parse().map_err(|_| Error::Fixture(format!("bad numerator {n}")))?;
                let d: Integer = d.parse().map_err(|_| Error::Fixture(format!("bad denominator {d}")))?;
                if d <= 0 {
                    return Err(Error::Fixture(format!("nonpositive denominator {d}")));
                }
                Ok(Rational::from((n, d)))
            })
            .collect()
    }
}
