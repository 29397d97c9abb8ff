//! Screening and ranking of foreign-funded companies as investment-attraction
//! targets for a local district.
//!
//! The method runs in two stages:
//!
//! 1. **Industry suitability.** Filter the district registry and the world
//!    listed-company dataset, map SIC codes onto national-standard categories
//!    ([`crosswalk`]), and measure concentration per category with the
//!    Herfindahl-Hirschman index ([`concentration`]). The top decile of each
//!    focus category by HHI forms the shortlist.
//! 2. **Proximity scoring.** Compute each shortlisted company's great-circle
//!    distance to the target region ([`geo`]), turn HHI and distance into 0–10
//!    decile scores, sum them and keep the top K per category ([`scoring`]).
//!
//! [`pipeline`] wires both stages together and writes a deterministic report;
//! [`network`] exports the category co-classification graph. The `examples/`
//! directory has one runnable program per capability.

pub mod cli;
pub mod concentration;
pub mod crosswalk;
pub mod geo;
pub mod ingest;
pub mod network;
pub mod pipeline;
pub mod scoring;

pub use concentration::{IndustryMarket, ShareEntry};
pub use crosswalk::{CrosswalkTable, GbCategory, SicPrimary};
pub use geo::{EarthModel, Gazetteer, GeoPoint};
pub use ingest::{FilterReport, GlobalCompany, LocalEnterprise};
pub use scoring::{ScoredCandidate, ScoringConfig};

/// A fraction in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fraction(f64);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("fraction {0} outside (0, 1]")]
pub struct FractionError(pub f64);

impl Fraction {
    pub fn new(value: f64) -> Result<Self, FractionError> {
        if value > 0.0 && value <= 1.0 {
            Ok(Fraction(value))
        } else {
            Err(FractionError(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `ceil(self * n)`, treating products within 1e-9 of an integer as that
    /// integer so that e.g. `0.1 * 30` selects 3 rather than 4.
    pub fn count_of(self, n: usize) -> usize {
        let x = self.0 * n as f64;
        let nearest = x.round();
        let k = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) { nearest } else { x.ceil() };
        (k as usize).min(n)
    }
}
