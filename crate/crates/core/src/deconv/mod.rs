//! Splitting a target PMF into factor PMFs whose convolution reproduces it.
//!
//! [`opt`] minimises the Jensen–Shannon cost over two factors with an
//! exact-Hessian trust-region method. [`poly`] factorises the
//! probability-generating polynomial into positive-coefficient pieces and can
//! return more than two factors.

pub mod opt;
pub mod poly;
