//! Multi-restart deconvolution on the rayon pool.
//!
//! Each restart owns the RNG stream `(seed, restart)` and the winner is picked
//! by restart index on ties, so results do not depend on scheduling.

use qdeconv_core::deconv::opt::{trust_region_restart, DeconvError};
use qdeconv_core::deconv::poly::{select_best, PolyDeconvolver, PolyError};
use qdeconv_core::{DeconvProblem, DeconvResult, OptimizerConfig, Pmf, PolyFactorization};
use rayon::prelude::*;

/// Lowest final cost over `restarts` trust-region solves.
pub fn trust_region_parallel(
    problem: &DeconvProblem,
    config: &OptimizerConfig,
    restarts: usize,
) -> Result<DeconvResult, DeconvError> {
    let results: Vec<DeconvResult> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| trust_region_restart(problem, config, r))
        .collect::<Result<_, _>>()?;
    // the first minimum in restart order
    let best = results
        .into_iter()
        .reduce(|best, r| if r.final_cost < best.final_cost { r } else { best });
    Ok(best.expect("at least one restart"))
}

/// Best factorization over `restarts` recombination passes.
pub fn factorize_parallel(target: &Pmf, restarts: usize, seed: u64) -> Result<PolyFactorization, PolyError> {
    let solver = PolyDeconvolver::new(target)?;
    let candidates: Vec<(u64, PolyFactorization)> = (0..restarts as u64)
        .into_par_iter()
        .filter_map(|r| solver.attempt(seed, r).ok().map(|f| (r, f)))
        .collect();
    select_best(candidates).ok_or(PolyError::NoFactorization)
}
