//! # apm-lab
//!
//! A laboratory for the α-partial-matching problem: Alice holds `x ∈ {0,1}^n`,
//! Bob holds a matching `M` of `m = αn` disjoint edges, and the edge parities
//! `z = Mx` form an extractor output that is close to uniform against short
//! classical messages but leaks a bit to a `log n`-qubit quantum message.
//!
//! The crate provides
//!
//! * [`bits`] and [`matching`]: packed bit strings, canonical matchings
//!   (counting, enumeration, uniform sampling) and the extractor `z(x, M)`;
//! * [`spectral`]: the Walsh–Hadamard transform on the Boolean cube, level
//!   weights and the KKL inequality check;
//! * [`analysis`]: conditional distributions `p_M`, total variation distance,
//!   exact and Monte Carlo oracles for `E_M ‖p_M − U‖`, and the matching
//!   combinatorics used in the closeness bound;
//! * [`qsim`]: statevector simulation of the fingerprint state, the matching
//!   measurement and the streaming algorithm;
//! * [`protocols`]: the hard input distribution and the quantum and
//!   birthday-paradox solvers;
//! * [`adversary`]: exact classical-memory advantage versus the quantum-memory
//!   attack in the privacy-amplification / bounded-storage setting;
//! * [`cli`] and [`report`]: the `apm-lab` command line and report encoders.
//!
//! Bit and vertex indices are 0-based throughout, including file formats.
//! Run `cargo run --example <name>` for a tour of each capability.

pub mod adversary;
pub mod analysis;
pub mod bits;
pub mod cli;
mod error;
pub mod matching;
pub mod protocols;
pub mod qsim;
pub mod report;
pub mod rng;
pub mod spectral;

pub use bits::BitString;
pub use error::{Error, Result};
pub use matching::Matching;
pub use rng::SeededRng;
