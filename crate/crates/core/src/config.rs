//! Run-time knobs shared by the certificate graph and the CLI.

use std::collections::BTreeSet;

use rug::Rational;

use crate::exact_scalars::{q, DEFAULT_PREC, MAX_PREC};
use crate::pieces::gamma0;

#[derive(Clone, Debug)]
pub struct Config {
    pub prec: u32,
    pub max_prec: u32,
    pub grid_n_d2: usize,
    pub grid_n_d3: usize,
    /// Laplace cutoff `S` for `w0`.
    pub tail_s: Rational,
    pub gamma0: Rational,
    /// Node ids to skip; their descendants report an unverified dependency.
    pub disabled: BTreeSet<String>,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            prec: DEFAULT_PREC,
            max_prec: MAX_PREC,
            grid_n_d2: 20,
            grid_n_d3: 5,
            tail_s: q(50, 1),
            gamma0: gamma0(),
            disabled: BTreeSet::new(),
        }
    }
}
