//! Sampling designs and recovery of functions from point evaluations.
//!
//! The crate is organized around two kinds of objects. A [`model::SampledDesign`]
//! is a finite multiset of domain points with positive weights; every
//! construction in [`subsample`] and [`random_designs`] produces one, and every
//! recovery routine in [`leastsq`], [`multilevel`] and [`sparse`] consumes one.
//! A [`model::Basis`] is an indexed family of scalar functions with an
//! orthonormality contract against a reference [`model::Measure`].
//!
//! Design constructions come with spectral certificates: eigenvalue bounds on
//! the Gram matrix of the design that prove a discretization inequality held,
//! so a consumer can check the guarantees of a design without trusting the
//! construction. The [`lipschitz`] module provides exact closed forms for the
//! periodic Lipschitz class that serve as ground truth in tests and
//! experiments. The [`scattered`] module recovers from arbitrary point clouds
//! on the unit cube via adaptive cube splitting and local polynomial fits.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the command
//! line live in the companion `optsample-cli` crate.

#![no_std]
#![forbid(unsafe_code)]
// Negated float comparisons like `!(x > 0.0)` are used on purpose: they
// reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod leastsq;
pub mod lipschitz;
pub mod model;
pub mod multilevel;
pub mod random_designs;
pub mod scattered;
pub mod sparse;
pub mod subsample;

mod linalg;

pub use error::{Error, Result};
pub use num_complex::Complex64;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded RNG used throughout the crate. All randomized operations take an
/// explicit seed; there is no global RNG state.
pub type Rng = ChaCha8Rng;

/// RNG for a given master seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent RNG stream `stream` derived from a master seed, for parallel
/// trials that must not share randomness.
pub fn rng_stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
