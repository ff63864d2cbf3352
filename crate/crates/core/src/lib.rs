//! Simultaneous single-item auctions with personalized entry fees and
//! reserve prices, for bidders whose valuations are subadditive over
//! independent items.
//!
//! The crate computes ε-Bayes-Nash equilibria on finite bid grids, the
//! optimal BIC revenue by linear programming, the Single / Tail / Core
//! revenue decomposition, and numerical checks of the inequalities that tie
//! these quantities together. Everything is exact enumeration at desk scale.

pub mod benchmarks;
pub mod duality;
pub mod equilibrium;
pub mod error;
pub mod instance;
pub mod lp;
pub mod mechanisms;
pub mod report;
pub mod sets;
pub mod valuations;

pub use error::{Error, Result};
pub use instance::{BidderModel, BidderSpec, Instance};
pub use sets::ItemSet;
