//! Deconvolution-based quantum state preparation for bell-shaped distributions.
//!
//! A target probability mass function is split classically into smaller factor
//! PMFs, either by trust-region minimisation of the Jensen–Shannon cost
//! ([`deconv::opt`]) or by factorising its probability-generating polynomial
//! ([`deconv::poly`]). Each factor is then loaded on its own register with a
//! Grover–Rudolph circuit and the registers are summed with a ripple adder
//! ([`prep`]); adding basis states convolves their distributions, so the sum
//! register measures the target.
//!
//! The crate is `no_std` and only needs `alloc`. Floating-point special
//! functions go through `libm`, which keeps results bit-identical across
//! platforms.
//!
//! Bit ordering: qubit 0 is the least significant bit of every register.

#![no_std]
#![forbid(unsafe_code)]
// negated comparisons are deliberate: NaN must fail every positivity check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod deconv;
pub mod linalg;
mod math;
pub mod pmf;
pub mod prep;
pub mod rng;
pub mod sim;

pub use circuit::{Circuit, Gate, GateBasis, McryLowering, McryMode, Register};
pub use deconv::opt::{DeconvProblem, DeconvResult, OptimizerConfig};
pub use deconv::poly::PolyFactorization;
pub use pmf::{DiscretizationRule, DistributionSpec, Family, Pmf};
pub use sim::{EmpiricalPmf, StateVector};
