//! Thurston-type asymmetric distances, Finsler norms and entropies.
//!
//! Two settings share the same machinery:
//!
//! * suspension flows over subshifts of finite type, where a flow is a
//!   strictly positive roof function on the edges of a transition graph
//!   ([`sft`], [`flow`]);
//! * marked length spectra of representations of free groups into
//!   `PGL(d, ℝ)` ([`words`], [`rep`], [`repmetrics`]).
//!
//! Every supremum over periodic orbits is exposed together with the orbit
//! attaining it, and suprema over infinitely many conjugacy classes are
//! reported as lower bounds at an explicit word-length cutoff.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod flow;
pub mod io;
pub mod linalg;
pub mod random;
pub mod rep;
pub mod repmetrics;
pub mod report;
pub mod selftest;
pub mod sft;
pub mod words;

pub use error::{Error, Result};
