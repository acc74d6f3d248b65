//! Numerical laboratory for weighted inequalities on finite dyadic models.
//!
//! The crate builds weights and Haar shift operators on the dyadic grid
//! over `[0,1)`, computes their Muckenhoupt and A-infinity characteristics
//! exactly, measures weighted operator norms (exactly on `L^2(w)`, as
//! certified lower bounds elsewhere), and evaluates the right-hand sides
//! of the sharp mixed bounds those quantities are supposed to satisfy.
//! The `verify` module packages the whole battery of checks.
//!
//! Data-parallel sweeps run on rayon under the `parallel` feature
//! (enabled by default); disabling it yields the same results
//! sequentially.

pub mod bounds;
pub mod config;
pub mod constants;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod maximal;
pub mod norms;
pub mod par;
pub mod sampling;
pub mod shift;
pub mod stopping;
pub mod verify;
pub mod weight;

pub use error::LabError;
