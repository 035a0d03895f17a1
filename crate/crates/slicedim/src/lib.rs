//! Exact-overlap counting for projections of the Sierpinski measure along
//! rational slopes, and the thermodynamic machinery built on top of it:
//! overlap automata and their growth rates, transfer-matrix cocycles,
//! pressure on the line subshift, Hilbert-metric contraction, Fourier
//! non-decay, weak-Gibbs diagnostics, and per-slope dimension bounds.
//!
//! The projected measure for a co-prime slope `p/q` is the self-similar
//! measure of the maps `x -> (x + d) / 2`, `d in {0, 1, p/q}`, with equal
//! weights. Everything that feeds a counting identity is computed in exact
//! integer or rational arithmetic; floating point enters only at logs,
//! eigenvalue enclosures and report assembly.
//!
//! Quick tour:
//!
//! ```
//! use slicedim::arith::make_slope;
//! use slicedim::{automaton, cocycle, oracle};
//!
//! let slope = make_slope(1, 2).unwrap();
//! let a = automaton::build_overlap_automaton(&slope);
//! assert_eq!(a.count_via_paths(2), oracle::overlap_count_exact(&slope, 2).unwrap());
//! assert_eq!(a.count_via_paths(2), cocycle::count_via_cocycle(&slope, 2).unwrap());
//! ```

pub mod arith;
pub mod automaton;
pub mod cocycle;
pub mod dimension;
pub mod error;
pub mod gibbs;
pub mod oracle;
pub mod simplex;
pub mod spectral;
pub mod subshift;

pub use arith::{make_slope, SlopeParam};
pub use error::{Error, Result};
pub use spectral::Enclosure;
