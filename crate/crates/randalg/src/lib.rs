//! Random algebraic bipartite graphs over finite fields.
//!
//! The crate builds bipartite graphs whose adjacency is cut out by random
//! low-degree polynomials over F_q (left vertices are polynomials, right
//! vertices are the points of F_q^k, with an edge where the polynomial
//! vanishes). Around that core it provides:
//!
//! - exact arithmetic and uniform sampling in F_q for prime-power q ([`field`]),
//! - dense bounded-degree multivariate polynomials with exhaustive
//!   enumeration and brute-force zero sets ([`mpoly`]),
//! - the threshold and panchromatic graph samplers with their exact
//!   parameter recipes ([`construct`]),
//! - exhaustive and Monte Carlo verifiers for the defining
//!   completeness/soundness properties, plus a random-polynomial zero-set
//!   laboratory ([`verify`]),
//! - set-system instances with exhaustive ground-truth solvers ([`setsys`]),
//! - the gap-amplification compositions between them ([`reduce`]).
//!
//! All randomized operations consume seeded streams with a documented
//! substream discipline ([`rng`]), so every result is reproducible and
//! independent of thread count. The `parallel` feature (on by default)
//! runs the data-parallel inner loops on rayon; disabling it yields a
//! sequential build with bit-identical outputs.

pub mod bigraph;
pub mod bits;
pub mod construct;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod mpoly;
pub mod reduce;
pub mod rng;
pub mod setsys;
pub mod verify;

mod par;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Cap on elementary operations (point evaluations, tuple inspections)
/// for exhaustive-mode operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Budget {
    /// Default cap: 10^8 elementary operations.
    pub const DEFAULT: Budget = Budget(100_000_000);

    /// Errors with the offending bound when `required` exceeds the cap.
    pub fn check(self, required: u128) -> Result<()> {
        if required > self.0 as u128 {
            Err(Error::BudgetExceeded {
                required,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}
