//! Multi-factor deconvolution by factorising the probability-generating
//! polynomial `Σ P_i x^i` into polynomials with positive coefficients.
//!
//! Roots come in conjugate pairs plus non-positive real roots. Pairs with a
//! positive real part produce a negative linear coefficient on their own, so
//! each of them is merged with randomly drawn left-half-plane groups until the
//! merged product has only positive coefficients. Every group left over at the
//! end becomes one factor.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::math;
use crate::pmf::{self, Pmf, PmfError};
use crate::rng::{stream_rng, ChaCha8Rng};

/// Roots with `|im|` below this are treated as real.
pub const REAL_TOLERANCE: f64 = 1e-9;
/// Relative tolerance for matching a root with its conjugate.
pub const PAIRING_TOLERANCE: f64 = 1e-8;
/// Merged monic coefficients must exceed this to count as positive.
pub const POSITIVITY_THRESHOLD: f64 = 1e-12;
/// Near-real roots within this relative distance of the axis are snapped to
/// it when the projection is itself an acceptable root. Multiple real roots
/// only converge to about `√ε` and otherwise come back as spurious pairs.
pub const SNAP_TOLERANCE: f64 = 1e-6;
/// Maximum backward error accepted for a root.
pub const ROOT_RESIDUAL: f64 = 1e-10;
/// Per-entry tolerance of the product of factors against the target.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-8;

const ABERTH_ITERATIONS: usize = 200;
const POLISH_STEPS: usize = 5;
const START_SEED: u64 = 0x5eed_a6e7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("polynomial must have degree at least 1 and a nonzero leading coefficient")]
    Degree,
    #[error("root finding did not converge (worst backward error {residual:e})")]
    RootsNotConverged { residual: f64 },
    #[error("complex root {re} + {im}i has no conjugate partner")]
    Unpaired { re: f64, im: f64 },
    #[error("positive real root {0} (coefficients cannot all be positive)")]
    PositiveRealRoot(f64),
    #[error("target entries must be strictly positive")]
    NonPositiveTarget,
    #[error("ran out of groups before the merged factor became positive")]
    Exhausted,
    #[error("a factor has a non-positive coefficient")]
    NonPositiveFactor,
    #[error("product of factors misses the target by {error:e}")]
    RoundTrip { error: f64 },
    #[error("no restart produced a factorization")]
    NoFactorization,
    #[error(transparent)]
    Pmf(#[from] PmfError),
}

/// `(p(z), p'(z))` by Horner, coefficients lowest degree first.
fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `|p(z)| / Σ|c_i||z|^i`, the relative backward error of `z` as a root.
pub fn backward_error(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    let scale = coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + math::abs(c));
    let (p, _) = horner(coeffs, z);
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// All complex roots of `Σ c_i x^i` by Aberth–Ehrlich iteration followed by
/// Newton polishing.
pub fn find_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, PolyError> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 || coeffs[n] == 0.0 || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(PolyError::Degree);
    }
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();

    // Cauchy bound, with a seeded angular jitter to break symmetry
    let radius = 1.0 + monic[..n].iter().fold(0.0_f64, |m, c| m.max(math::abs(*c)));
    let mut rng = stream_rng(START_SEED, n as u64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let jitter = 0.2 * (rng.random::<f64>() - 0.5);
            let angle = 2.0 * PI * (k as f64 + 0.25 + jitter) / n as f64;
            Complex64::new(radius * math::cos(angle), radius * math::sin(angle))
        })
        .collect();

    let mut done = vec![false; n];
    for _ in 0..ABERTH_ITERATIONS {
        let mut moved = false;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(&monic, z[k]);
            if p.norm() == 0.0 {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[k] -= step;
            moved = true;
            if step.norm() <= f64::EPSILON * z[k].norm().max(1.0) {
                done[k] = true;
            }
        }
        if !moved || done.iter().all(|&d| d) {
            break;
        }
    }

    for root in z.iter_mut() {
        for _ in 0..POLISH_STEPS {
            let (p, dp) = horner(&monic, *root);
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                break;
            }
            let candidate = *root - p / dp;
            if horner(&monic, candidate).0.norm() < p.norm() {
                *root = candidate;
            } else {
                break;
            }
        }
    }

    for root in z.iter_mut() {
        let real = Complex64::new(root.re, 0.0);
        if math::abs(root.im) < SNAP_TOLERANCE * root.norm().max(1.0)
            && backward_error(&monic, real) < ROOT_RESIDUAL
        {
            *root = real;
        }
    }

    let residual = z
        .iter()
        .map(|&r| backward_error(&monic, r))
        .fold(0.0, f64::max);
    if residual.is_nan() || residual >= ROOT_RESIDUAL {
        return Err(PolyError::RootsNotConverged { residual });
    }
    Ok(z)
}

/// A real root or a conjugate pair, stored by its upper-half-plane member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootGroup {
    Real(f64),
    Pair(Complex64),
}

impl RootGroup {
    pub fn degree(&self) -> usize {
        match self {
            RootGroup::Real(_) => 1,
            RootGroup::Pair(_) => 2,
        }
    }

    pub fn re(&self) -> f64 {
        match *self {
            RootGroup::Real(r) => r,
            RootGroup::Pair(z) => z.re,
        }
    }

    pub fn roots(&self) -> Vec<Complex64> {
        match *self {
            RootGroup::Real(r) => vec![Complex64::new(r, 0.0)],
            RootGroup::Pair(z) => vec![z, z.conj()],
        }
    }

    /// Real monic factor `x - r` or `x² - 2 Re(z) x + |z|²`, lowest degree first.
    pub fn monic(&self) -> Vec<f64> {
        match *self {
            RootGroup::Real(r) => vec![-r, 1.0],
            RootGroup::Pair(z) => vec![z.norm_sqr(), -2.0 * z.re, 1.0],
        }
    }

    fn order(a: &RootGroup, b: &RootGroup) -> Ordering {
        let im = |g: &RootGroup| match g {
            RootGroup::Real(_) => 0.0,
            RootGroup::Pair(z) => z.im,
        };
        a.re().total_cmp(&b.re()).then(im(a).total_cmp(&im(b)))
    }
}

/// A list of root groups (one basket of the grouping step).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexRootSet {
    pub groups: Vec<RootGroup>,
}

impl ComplexRootSet {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.groups.iter().map(RootGroup::degree).sum()
    }
}

/// Splits roots into `basket1` (pairs with positive real part, ascending by
/// real part) and `basket2` (every other pair and all real roots).
pub fn group_roots(roots: &[Complex64]) -> Result<(ComplexRootSet, ComplexRootSet), PolyError> {
    let mut reals = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for &z in roots {
        if math::abs(z.im) < REAL_TOLERANCE {
            if z.re > 0.0 {
                return Err(PolyError::PositiveRealRoot(z.re));
            }
            reals.push(RootGroup::Real(z.re));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(Some(z));
        }
    }

    let mut basket1 = Vec::new();
    let mut basket2 = reals;
    for z in upper {
        let tolerance = PAIRING_TOLERANCE * z.norm().max(1.0);
        let partner = lower
            .iter()
            .enumerate()
            .filter_map(|(j, w)| w.map(|w| (j, (z - w.conj()).norm())))
            .filter(|&(_, d)| d <= tolerance)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, _)) = partner else {
            return Err(PolyError::Unpaired { re: z.re, im: z.im });
        };
        let w = lower[j].take().expect("unmatched");
        let group = RootGroup::Pair((z + w.conj()) * 0.5);
        if group.re() > 0.0 {
            basket1.push(group);
        } else {
            basket2.push(group);
        }
    }
    if let Some(w) = lower.into_iter().flatten().next() {
        return Err(PolyError::Unpaired { re: w.re, im: w.im });
    }
    basket1.sort_by(RootGroup::order);
    basket2.sort_by(RootGroup::order);
    Ok((
        ComplexRootSet { groups: basket1 },
        ComplexRootSet { groups: basket2 },
    ))
}

/// Monic polynomial with the given roots, lowest degree first. The imaginary
/// residue left by rounding is discarded.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        c.push(Complex64::new(0.0, 0.0));
        for i in (0..c.len()).rev() {
            let lower = if i > 0 { c[i - 1] } else { Complex64::new(0.0, 0.0) };
            c[i] = lower - r * c[i];
        }
    }
    c.into_iter().map(|x| x.re).collect()
}

/// Product of the real monic factors of `groups`.
pub fn poly_from_groups(groups: &[RootGroup]) -> Vec<f64> {
    groups
        .iter()
        .fold(vec![1.0], |acc, g| pmf::convolve_slices(&acc, &g.monic()))
}

fn all_positive(coeffs: &[f64]) -> bool {
    coeffs.iter().all(|&c| c > POSITIVITY_THRESHOLD)
}

/// Factor PMFs with their polynomial degrees.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolyFactorization {
    pub degrees: Vec<usize>,
    pub factors: Vec<Pmf>,
}

impl PolyFactorization {
    fn from_groups(groups: Vec<Vec<RootGroup>>) -> Result<Self, PolyError> {
        let mut factors = Vec::with_capacity(groups.len());
        for group in &groups {
            let monic = poly_from_groups(group);
            if !all_positive(&monic) {
                return Err(PolyError::NonPositiveFactor);
            }
            let total: f64 = monic.iter().sum();
            factors.push(Pmf::new(monic.iter().map(|c| c / total).collect())?);
        }
        factors.sort_by_key(|f| f.len());
        let degrees = factors.iter().map(|f| f.len() - 1).collect();
        Ok(PolyFactorization { degrees, factors })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Left-fold convolution of the factors.
    pub fn product(&self) -> Pmf {
        pmf::convolve_all(&self.factors).unwrap_or_else(|| Pmf::delta(1, 0))
    }

    /// True if `self` ranks above `other`: more factors, then a smaller
    /// largest degree.
    pub fn better_than(&self, other: &PolyFactorization) -> bool {
        (self.len(), core::cmp::Reverse(self.max_degree()))
            > (other.len(), core::cmp::Reverse(other.max_degree()))
    }
}

/// One pass of the randomised recombination: `basket2` is shuffled, then
/// groups are drawn uniformly at random.
pub fn recombine<R: Rng + ?Sized>(
    basket1: &ComplexRootSet,
    basket2: &ComplexRootSet,
    rng: &mut R,
) -> Result<PolyFactorization, PolyError> {
    let mut shuffled = basket2.clone();
    shuffled.groups.shuffle(rng);
    recombine_with(basket1, &shuffled, &mut |n| rng.random_range(0..n))
}

/// Recombination with caller-chosen draws: `draw(n)` picks an index below
/// `n` into the current pool, which starts in `basket2` order. Each merged
/// group is appended to the pool, so later groups may absorb it.
pub fn recombine_with(
    basket1: &ComplexRootSet,
    basket2: &ComplexRootSet,
    draw: &mut dyn FnMut(usize) -> usize,
) -> Result<PolyFactorization, PolyError> {
    let mut pool: Vec<Vec<RootGroup>> = basket2.groups.iter().map(|&g| vec![g]).collect();
    for &lead in &basket1.groups {
        let mut merged = vec![lead];
        loop {
            if pool.is_empty() {
                return Err(PolyError::Exhausted);
            }
            let idx = draw(pool.len());
            merged.extend(pool.remove(idx));
            if all_positive(&poly_from_groups(&merged)) {
                break;
            }
        }
        pool.push(merged);
    }
    PolyFactorization::from_groups(pool)
}

/// Searches for draws under which [`recombine_with`] ends with exactly the
/// partition given by `block` (every group of a block merged into one
/// factor). Returns the draw indices in order, or `None` if the merge rule
/// cannot produce that partition.
pub fn draws_for_partition(
    basket1: &ComplexRootSet,
    basket2: &ComplexRootSet,
    block: &dyn Fn(&RootGroup) -> usize,
) -> Option<Vec<usize>> {
    let pool: Vec<Vec<RootGroup>> = basket2.groups.iter().map(|&g| vec![g]).collect();
    let mut draws = Vec::new();
    search_draws(&basket1.groups, pool, None, &mut draws, block).then_some(draws)
}

fn search_draws(
    leads: &[RootGroup],
    pool: Vec<Vec<RootGroup>>,
    merged: Option<Vec<RootGroup>>,
    draws: &mut Vec<usize>,
    block: &dyn Fn(&RootGroup) -> usize,
) -> bool {
    let merged = match merged {
        Some(m) => m,
        None => match leads.first() {
            Some(&lead) => vec![lead],
            None => {
                // every pool group must be one whole block
                let mut seen: Vec<usize> = pool.iter().map(|g| block(&g[0])).collect();
                seen.sort_unstable();
                return seen.windows(2).all(|w| w[0] != w[1]);
            }
        },
    };
    let home = block(&merged[0]);
    for idx in 0..pool.len() {
        if block(&pool[idx][0]) != home {
            continue;
        }
        let mut rest = pool.clone();
        let mut next = merged.clone();
        next.extend(rest.remove(idx));
        draws.push(idx);
        let found = if all_positive(&poly_from_groups(&next)) {
            rest.push(next);
            search_draws(&leads[1..], rest, None, draws, block)
        } else {
            search_draws(leads, rest, Some(next), draws, block)
        };
        if found {
            return true;
        }
        draws.pop();
    }
    false
}

/// [`recombine`] driven by stream 0 of `seed`.
pub fn recombine_seeded(
    basket1: &ComplexRootSet,
    basket2: &ComplexRootSet,
    seed: u64,
) -> Result<PolyFactorization, PolyError> {
    recombine(basket1, basket2, &mut stream_rng(seed, 0))
}

/// Roots of a target PMF grouped once, ready for many recombination restarts.
#[derive(Debug, Clone)]
pub struct PolyDeconvolver {
    target: Pmf,
    basket1: ComplexRootSet,
    basket2: ComplexRootSet,
}

impl PolyDeconvolver {
    pub fn new(target: &Pmf) -> Result<Self, PolyError> {
        if target.len() < 2 {
            return Err(PolyError::Degree);
        }
        if target.iter().any(|&p| p <= 0.0) {
            return Err(PolyError::NonPositiveTarget);
        }
        let roots = find_roots(target)?;
        let (basket1, basket2) = group_roots(&roots)?;
        Ok(PolyDeconvolver {
            target: target.clone(),
            basket1,
            basket2,
        })
    }

    pub fn baskets(&self) -> (&ComplexRootSet, &ComplexRootSet) {
        (&self.basket1, &self.basket2)
    }

    /// Restart `restart` on the RNG stream `(seed, restart)`, verified
    /// against the target.
    pub fn attempt(&self, seed: u64, restart: u64) -> Result<PolyFactorization, PolyError> {
        let mut rng: ChaCha8Rng = stream_rng(seed, restart);
        let result = recombine(&self.basket1, &self.basket2, &mut rng)?;
        self.verify(result)
    }

    /// Checks the round trip of a factorization against the target.
    pub fn verify(&self, result: PolyFactorization) -> Result<PolyFactorization, PolyError> {
        let error = max_abs_diff(result.product().values(), self.target.values());
        if !(error <= ROUND_TRIP_TOLERANCE) {
            return Err(PolyError::RoundTrip { error });
        }
        Ok(result)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| math::abs(x - y))
        .fold(0.0, f64::max)
}

/// Keeps the best of `(restart, result)` candidates; ties go to the lowest
/// restart index.
pub fn select_best<I>(candidates: I) -> Option<PolyFactorization>
where
    I: IntoIterator<Item = (u64, PolyFactorization)>,
{
    let mut best: Option<(u64, PolyFactorization)> = None;
    for (restart, candidate) in candidates {
        let replace = match &best {
            None => true,
            Some((r, b)) => {
                candidate.better_than(b) || (!b.better_than(&candidate) && restart < *r)
            }
        };
        if replace {
            best = Some((restart, candidate));
        }
    }
    best.map(|(_, f)| f)
}

/// Runs `restarts` recombination passes and keeps the best factorization.
pub fn factorize_pmf(target: &Pmf, restarts: usize, seed: u64) -> Result<PolyFactorization, PolyError> {
    let solver = PolyDeconvolver::new(target)?;
    let candidates = (0..restarts as u64)
        .filter_map(|r| solver.attempt(seed, r).ok().map(|f| (r, f)));
    select_best(candidates).ok_or(PolyError::NoFactorization)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn double_root() {
        for coeffs in [[1.0, 2.0, 1.0], [0.25, 0.5, 0.25]] {
            let roots = find_roots(&coeffs).unwrap();
            assert_eq!(roots.len(), 2);
            for r in roots {
                assert!(close(r, Complex64::new(-1.0, 0.0), 1e-6), "{r}");
            }
        }
    }

    #[test]
    fn degree_errors() {
        assert_eq!(find_roots(&[1.0]), Err(PolyError::Degree));
        assert_eq!(find_roots(&[1.0, 0.0]), Err(PolyError::Degree));
        assert_eq!(find_roots(&[]), Err(PolyError::Degree));
    }

    #[test]
    fn grouping_examples() {
        let (b1, b2) = group_roots(&[Complex64::new(-1.0, 0.0)]).unwrap();
        assert!(b1.is_empty());
        assert_eq!(b2.groups, vec![RootGroup::Real(-1.0)]);

        let roots = [
            Complex64::new(0.2, 0.9),
            Complex64::new(-0.5, -0.8),
            Complex64::new(0.2, -0.9),
            Complex64::new(-0.5, 0.8),
        ];
        let (b1, b2) = group_roots(&roots).unwrap();
        assert_eq!(b1.groups, vec![RootGroup::Pair(Complex64::new(0.2, 0.9))]);
        assert_eq!(b2.groups, vec![RootGroup::Pair(Complex64::new(-0.5, 0.8))]);
    }

    #[test]
    fn grouping_errors() {
        assert!(matches!(
            group_roots(&[Complex64::new(0.5, 0.0)]),
            Err(PolyError::PositiveRealRoot(_))
        ));
        assert!(matches!(
            group_roots(&[Complex64::new(-0.5, 0.3)]),
            Err(PolyError::Unpaired { .. })
        ));
        assert!(matches!(
            group_roots(&[Complex64::new(-0.5, 0.3), Complex64::new(-0.5, -0.31)]),
            Err(PolyError::Unpaired { .. })
        ));
    }

    #[test]
    fn poly_from_roots_examples() {
        let m1 = Complex64::new(-1.0, 0.0);
        assert_eq!(poly_from_roots(&[m1, m1]), vec![1.0, 2.0, 1.0]);
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(poly_from_roots(&[i, i.conj()]), vec![1.0, 0.0, 1.0]);
        assert_eq!(poly_from_groups(&[RootGroup::Pair(i)]), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn poly_from_roots_matches_incremental_product() {
        let mut rng = stream_rng(9, 0);
        let mut roots = Vec::new();
        for _ in 0..3 {
            let z = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() + 0.1);
            roots.push(z);
            roots.push(z.conj());
        }
        // oracle: multiply real quadratics (x - z)(x - z̄) term by term
        let mut oracle = vec![1.0];
        for z in roots.iter().filter(|z| z.im > 0.0) {
            let quad = [z.norm_sqr(), -2.0 * z.re, 1.0];
            let mut next = vec![0.0; oracle.len() + 2];
            for (i, a) in oracle.iter().enumerate() {
                for (j, b) in quad.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            oracle = next;
        }
        let got = poly_from_roots(&roots);
        assert_eq!(got.len(), 7);
        for (g, o) in got.iter().zip(&oracle) {
            assert!((g - o).abs() < 1e-12, "{got:?} vs {oracle:?}");
        }
    }

    #[test]
    fn recombine_trivial() {
        let b1 = ComplexRootSet::default();
        let b2 = ComplexRootSet {
            groups: vec![RootGroup::Real(-1.0)],
        };
        let f = recombine_seeded(&b1, &b2, 0).unwrap();
        assert_eq!(f.degrees, vec![1]);
        assert_eq!(f.factors[0].values(), &[0.5, 0.5]);
    }

    #[test]
    fn recombine_exhaustion() {
        // x² - x + 1 (roots at 60°) cannot be fixed by a single x + 0.01
        let b1 = ComplexRootSet {
            groups: vec![RootGroup::Pair(Complex64::new(0.5, 0.75f64.sqrt()))],
        };
        let b2 = ComplexRootSet {
            groups: vec![RootGroup::Real(-0.01)],
        };
        assert_eq!(recombine_seeded(&b1, &b2, 3), Err(PolyError::Exhausted));
    }

    #[test]
    fn binomial_splits_into_coins() {
        let target = Pmf::new(vec![0.25, 0.5, 0.25]).unwrap();
        let f = factorize_pmf(&target, 1, 0).unwrap();
        assert_eq!(f.degrees, vec![1, 1]);
        for factor in &f.factors {
            assert!((factor[0] - 0.5).abs() < 1e-7 && (factor[1] - 0.5).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_non_positive_targets() {
        assert!(matches!(
            PolyDeconvolver::new(&Pmf::new(vec![0.5, 0.0, 0.5]).unwrap()),
            Err(PolyError::NonPositiveTarget)
        ));
        assert!(matches!(
            PolyDeconvolver::new(&Pmf::new(vec![1.0]).unwrap()),
            Err(PolyError::Degree)
        ));
    }

    #[test]
    fn selection_order() {
        let make = |degrees: &[usize]| PolyFactorization {
            degrees: degrees.to_vec(),
            factors: degrees.iter().map(|&d| Pmf::uniform(d + 1)).collect(),
        };
        let best = select_best([
            (0, make(&[2, 5])),
            (1, make(&[1, 2, 4])),
            (2, make(&[2, 2, 3])),
            (3, make(&[1, 3, 3])),
        ])
        .unwrap();
        assert_eq!(best.degrees, vec![2, 2, 3]);
        assert!(select_best(core::iter::empty()).is_none());
    }
}
