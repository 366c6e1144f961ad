//! Secure multiplex coding with a common message.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: prime-field arithmetic and `GL(k, q)` sampling/enumeration.
//! - [`layout`] and [`hash`]: message-space factorizations and the bijection
//!   families whose projections are two-universal, with exhaustive checks.
//! - [`dist`], [`channel`]: distributions, channels, the Markov chain
//!   `U -> V -> X -> (Y, Z)`.
//! - [`info`]: entropies, mutual informations and the `psi` / `phi`
//!   functionals.
//! - [`pa`]: the strengthened privacy-amplification bound and its exact
//!   left-hand side.
//! - [`region`]: rate-region membership, boundary scans and leakage
//!   exponents.
//! - [`sim`]: an exact desk-scale encoder / channel / leakage simulator.
//! - [`cli`]: the `secmux` command-line front end.
//!
//! All information quantities are in nats.

pub mod channel;
pub mod cli;
pub mod dist;
pub mod error;
pub mod field;
pub mod guard;
pub mod hash;
pub mod info;
pub mod layout;
pub mod pa;
pub mod region;
pub mod report;
pub mod sim;

pub use channel::{joint_from_spec, Channel, MarkovSpec};
pub use dist::{Distribution, JointDist};
pub use error::{Error, Result};
pub use field::{enumerate_gl, sample_gl, FieldElement, GfMatrix, GfVector, PrimeField};
pub use hash::{Bijection, FamilyKind, HashFamily};
pub use layout::{MessageLayout, SubsetIndex};
