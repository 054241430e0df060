//! Dense linear-programming toolkit built around the question of where the
//! simplex method should *start*.
//!
//! The crate provides:
//!
//! * a small dense model layer for linear programs in standard form
//!   `min c'x  s.t.  Ax = b, x >= 0` ([`model`]),
//! * textbook primal and dual simplex engines that refactorize on every pivot
//!   and log each iteration ([`engine`]),
//! * a catalogue of basis / starting-point construction strategies, from the
//!   classical artificial-variable schemes through structural crashes to
//!   penalty-function and search-based starting points ([`init`]),
//! * crossover helpers for network-structured problems ([`network`]).
//!
//! Everything is dense and intended for desk-scale instances (tens of rows);
//! clarity and verifiability take priority over speed.

pub mod engine;
pub mod error;
pub mod init;
pub mod linalg;
pub mod mat;
pub mod model;
pub mod network;
pub mod settings;

pub use error::Error;
pub use mat::Mat;
pub use settings::Settings;
