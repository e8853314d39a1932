//! Certified evaluation of the Painleve-I tritronquee approximant, its error bounds, and the
//! enclosure of its first pole.

pub mod approximant;
pub mod certificate;
pub mod config;
pub mod contraction;
pub mod dag;
pub mod d1_certificates;
pub mod error;
pub mod exact_scalars;
pub mod greens;
pub mod grid_bounds;
pub mod oracle;
pub mod par;
pub mod pieces;
pub mod pole_certificate;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
pub use exact_scalars::{Ball, ComplexBall};
pub use rug::Rational;
