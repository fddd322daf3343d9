//! Cutoff-rate and random-coding-exponent numerics for discrete memoryless
//! channels, together with the machinery for combining `n` copies of a base
//! channel through a bijective label map and splitting the result into
//! successively decoded subchannels.
//!
//! Module map:
//!
//! * [`gf2`]: dense bit matrices over GF(2) (label maps, Kronecker powers,
//!   systematic block-code maps, dual spaces).
//! * [`dmc`]: channels, input distributions, `E0`, cutoff rate, mutual
//!   information and capacity.
//! * [`exponents`]: random-coding exponents, the M-ary erasure channel closed
//!   form and the QEC-versus-split-BEC comparison series.
//! * [`combine`]: synthesis of the combined channel from a label map.
//! * [`split`]: conditional cutoff rates along a successive-cancellation
//!   chain, by brute force and by a Walsh–Hadamard fast path for BSCs.
//!
//! All rates are in bits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combine;
pub mod csv;
pub mod dmc;
mod error;
pub mod exponents;
pub mod gf2;
pub mod numeric;
pub mod split;

pub use combine::{LabelMap, SynthChannel};
pub use dmc::{Channel, InputDist};
pub use error::{Error, Result};
pub use exponents::{ExponentCurve, TradeoffFigures};
pub use gf2::BitMatrix;
pub use split::{ChainModel, RateAllocation};
