//! Channel-coding laboratory for short rate-1/2 LDPC codes.
//!
//! The crate builds the IEEE 802.16e rate-1/2 quasi-cyclic LDPC codes and
//! progressive edge-growth (PEG) codes, derives alternative parity-check
//! matrices of the same code from low-weight redundant checks, and decodes
//! with flooding sum-product belief propagation, its Leaking variant, and
//! multiple-bases belief propagation (MBBP): a bank of non-communicating
//! decoders on different parity-check matrices whose syndrome-valid outputs
//! are compared by Euclidean distance to the received vector.
//!
//! Link-level performance over the AWGN channel is estimated by
//! reproducible Monte-Carlo campaigns ([`sim`]) and compared with the
//! random-coding bound ([`bounds`]).

pub mod alist;
pub mod bounds;
pub mod bp;
pub mod error;
pub mod gf2;
pub mod mbbp;
pub mod peg;
pub mod qc;
pub mod redundancy;
pub mod seeds;
pub mod sim;
pub mod tanner;

pub use error::{Error, Result};
pub use gf2::{GeneratorForm, SparseBinaryMatrix};
pub use qc::BaseMatrix;
