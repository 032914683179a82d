//! Probability machinery: Monte Carlo and exact estimates of
//! `Pr(P ∩ P^x = 1)`, the law of the rank statistic `W`, the Poisson(1/2)
//! reference, and the exact class-sum expectation `E|P ∩ P^x ∖ A|`.
//!
//! Sampling is reproducible and independent of worker count: each sample
//! index owns a counter-based stream keyed by `(seed, index)`, and success
//! counts are summed, so scheduling cannot change the result.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{self, CensusError, Subset};
use crate::forest::SylowForest;
use crate::intersect::{
    self, common_matching_rank, intersection_p_exact_with, trivial_in_alternating,
};
use crate::perm::{random_permutation, Parity, Permutation};
use crate::util::{ratio, rational_to_f64};

/// `e^{-1/2}`: the limit of `Pr(P ∩ P^x = 1)` in Sₙ.
pub const REF_SYMMETRIC: f64 = 0.6065306597126334;
/// `(3/2) e^{-1/2}`: the limit in the Aₙ case.
pub const REF_ALTERNATING: f64 = 0.9097959895689501;

/// Exhaustive runs enumerate all n! conjugators.
pub const EXHAUSTIVE_DEGREE_CUTOFF: usize = 10;
/// Exact W pmfs keep factorial-ratio arithmetic exact up to this degree.
pub const W_PMF_DEGREE_CUTOFF: u64 = 4000;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("samples must be positive")]
    ZeroSamples,
    #[error("degree {0} exceeds cutoff {1}")]
    DegreeCutoff(usize, usize),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Forest(#[from] crate::forest::ForestError),
    #[error(transparent)]
    Intersect(#[from] intersect::IntersectError),
    #[error(transparent)]
    Perm(#[from] crate::perm::PermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symmetric,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Fast,
    Exact,
}

#[derive(Debug, Clone)]
pub struct EstimateConfig {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub mode: Mode,
    pub backend: Backend,
    /// Alternating mode only: sample `x` uniformly from Aₙ (by parity
    /// rejection) instead of Sₙ.
    pub x_in_alternating: bool,
    /// 0 means the rayon default.
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n: usize,
    pub mode: Mode,
    pub backend: Backend,
    pub samples: u64,
    pub successes: u64,
    /// Exact rational `successes/samples`.
    pub estimate: String,
    pub estimate_float: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub reference_value: f64,
    pub abs_error: f64,
    /// Bound on the bias of the fast W-criterion relative to full
    /// triviality: `expected_non_a(n)` when computable, else `C/n` with the
    /// calibrated constant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias_bound: Option<f64>,
}

/// The per-sample stream: all randomness for sample `index` of a run.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

fn draw_x<R: Rng>(n: usize, rng: &mut R, force_even: bool) -> Permutation {
    loop {
        let x = random_permutation(n, rng).expect("n >= 1");
        if !force_even || x.parity() == Parity::Even {
            return x;
        }
    }
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        job()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
            .install(job)
    }
}

/// 95% Wilson score interval for `successes` out of `samples`.
pub fn wilson_interval(successes: u64, samples: u64) -> (f64, f64) {
    let z = 1.959963984540054_f64;
    let m = samples as f64;
    let p = successes as f64 / m;
    let z2 = z * z;
    let denom = 1.0 + z2 / m;
    let center = (p + z2 / (2.0 * m)) / denom;
    let half = z * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Monte Carlo estimate of `Pr(P ∩ P^x = 1)` (or of triviality inside Aₙ).
///
/// Fast backend: success is `W = 0` (symmetric) or `W ≤ 1` (alternating).
/// Exact backend: success is triviality of the fully enumerated
/// intersection (or of its even part).
pub fn estimate_trivial(cfg: &EstimateConfig) -> Result<EstimateReport, EstimatorError> {
    if cfg.samples == 0 {
        return Err(EstimatorError::ZeroSamples);
    }
    let forest = SylowForest::build(cfg.n)?;
    let force_even = cfg.mode == Mode::Alternating && cfg.x_in_alternating;
    let successes = match cfg.backend {
        Backend::Fast => {
            let matching = forest.matching();
            with_workers(cfg.workers, || {
                (0..cfg.samples)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = sample_rng(cfg.seed, i);
                        let x = draw_x(cfg.n, &mut rng, force_even);
                        let w = common_matching_rank(matching, &x).expect("equal degree");
                        let ok = match cfg.mode {
                            Mode::Symmetric => w == 0,
                            Mode::Alternating => w <= 1,
                        };
                        ok as u64
                    })
                    .sum::<u64>()
            })
        }
        Backend::Exact => {
            let elements = forest.enumerate_perms()?;
            with_workers(cfg.workers, || {
                (0..cfg.samples)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = sample_rng(cfg.seed, i);
                        let x = draw_x(cfg.n, &mut rng, force_even);
                        let r = intersection_p_exact_with(&forest, &elements, &x)
                            .expect("equal degree");
                        let ok = match cfg.mode {
                            Mode::Symmetric => r.is_trivial(),
                            Mode::Alternating => trivial_in_alternating(&r),
                        };
                        ok as u64
                    })
                    .sum::<u64>()
            })
        }
    };
    Ok(build_report(cfg, successes, cfg.samples))
}

fn build_report(cfg: &EstimateConfig, successes: u64, samples: u64) -> EstimateReport {
    let estimate_float = successes as f64 / samples as f64;
    let (ci_low, ci_high) = wilson_interval(successes, samples);
    let reference = match cfg.mode {
        Mode::Symmetric => REF_SYMMETRIC,
        Mode::Alternating => REF_ALTERNATING,
    };
    EstimateReport {
        n: cfg.n,
        mode: cfg.mode,
        backend: cfg.backend,
        samples,
        successes,
        estimate: format!("{successes}/{samples}"),
        estimate_float,
        ci_low,
        ci_high,
        seed: cfg.seed,
        reference_value: reference,
        abs_error: (estimate_float - reference).abs(),
        bias_bound: match cfg.backend {
            Backend::Fast => Some(bias_bound(cfg.n as u64)),
            Backend::Exact => None,
        },
    }
}

/// Exhaustive statistics over all n! conjugators `x`, exact mode.
#[derive(Debug, Clone)]
pub struct ExhaustiveStats {
    pub n: usize,
    /// `Pr(P ∩ P^x = 1)`.
    pub pr_trivial: BigRational,
    /// `Pr(P ∩ P^x ∩ Aₙ = 1)`.
    pub pr_trivial_alternating: BigRational,
    /// `Pr(W = 0)`.
    pub pr_w_zero: BigRational,
    /// `Pr(P ∩ P^x ≠ A ∩ A^x)`.
    pub pr_not_equal: BigRational,
    /// Exhaustive mean of `|P ∩ P^x ∖ A|`.
    pub mean_non_a: BigRational,
}

/// Runs the full exact pipeline over every `x ∈ Sₙ`.
pub fn exhaustive_stats(n: usize) -> Result<ExhaustiveStats, EstimatorError> {
    if n > EXHAUSTIVE_DEGREE_CUTOFF {
        return Err(EstimatorError::DegreeCutoff(n, EXHAUSTIVE_DEGREE_CUTOFF));
    }
    let forest = SylowForest::build(n)?;
    let elements = forest.enumerate_perms()?;
    let matching = forest.matching();
    let mut trivial = 0u64;
    let mut trivial_alt = 0u64;
    let mut w_zero = 0u64;
    let mut not_equal = 0u64;
    let mut non_a_total = 0u64;
    let mut total = 0u64;
    for x in all_permutations(n) {
        let r = intersection_p_exact_with(&forest, &elements, &x)?;
        let full = r.full_intersection.as_ref().expect("exact mode");
        total += 1;
        trivial += (full.len() == 1) as u64;
        trivial_alt += trivial_in_alternating(&r) as u64;
        w_zero += (r.w == 0) as u64;
        // A ∩ A^x ⊆ P ∩ P^x always, so equality is a size comparison
        not_equal += (full.len() != 1usize << r.w) as u64;
        non_a_total += full
            .iter()
            .filter(|g| !perm_in_matching_span(matching, g))
            .count() as u64;
    }
    debug_assert_eq!(total, (1..=n as u64).product::<u64>());
    let frac = |k: u64| ratio(BigUint::from(k), BigUint::from(total));
    Ok(ExhaustiveStats {
        n,
        pr_trivial: frac(trivial),
        pr_trivial_alternating: frac(trivial_alt),
        pr_w_zero: frac(w_zero),
        pr_not_equal: frac(not_equal),
        mean_non_a: frac(non_a_total),
    })
}

/// Exact probability of triviality by enumerating every `x ∈ Sₙ`.
///
/// With the fast backend the success predicate is the W criterion; with the
/// exact backend it is triviality of the enumerated intersection (even part
/// for alternating mode). `samples` in the report is `n!`.
pub fn estimate_exhaustive(
    n: usize,
    mode: Mode,
    backend: Backend,
) -> Result<EstimateReport, EstimatorError> {
    if n > EXHAUSTIVE_DEGREE_CUTOFF {
        return Err(EstimatorError::DegreeCutoff(n, EXHAUSTIVE_DEGREE_CUTOFF));
    }
    let forest = SylowForest::build(n)?;
    let elements = match backend {
        Backend::Exact => Some(forest.enumerate_perms()?),
        Backend::Fast => None,
    };
    let matching = forest.matching();
    let mut successes = 0u64;
    let mut total = 0u64;
    for x in all_permutations(n) {
        total += 1;
        let ok = match (&elements, mode) {
            (None, Mode::Symmetric) => common_matching_rank(matching, &x)? == 0,
            (None, Mode::Alternating) => common_matching_rank(matching, &x)? <= 1,
            (Some(els), _) => {
                let r = intersection_p_exact_with(&forest, els, &x)?;
                match mode {
                    Mode::Symmetric => r.is_trivial(),
                    Mode::Alternating => trivial_in_alternating(&r),
                }
            }
        };
        successes += ok as u64;
    }
    let cfg = EstimateConfig {
        n,
        samples: total,
        seed: 0,
        mode,
        backend,
        x_in_alternating: false,
        workers: 1,
    };
    Ok(build_report(&cfg, successes, total))
}

/// Is `g` a product of matching transpositions (an element of `A`)?
pub fn perm_in_matching_span(m: &crate::forest::Matching, g: &Permutation) -> bool {
    (0..g.degree()).all(|i| {
        let v = g.apply0(i);
        v == i || m.partner0(i) == Some(v)
    })
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut images: Vec<usize> = (1..=n).collect();
    fn heap(v: &mut Vec<usize>, k: usize, out: &mut Vec<Permutation>) {
        if k == 1 {
            out.push(Permutation::from_images(v).expect("permutation"));
            return;
        }
        for i in 0..k {
            heap(v, k - 1, out);
            if k % 2 == 0 {
                v.swap(i, k - 1);
            } else {
                v.swap(0, k - 1);
            }
        }
    }
    heap(&mut images, n, &mut out);
    out
}

/// A probability mass function on nonnegative integers. Exact pmfs carry
/// rationals; empirical and reference pmfs are floating.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: BTreeMap<u64, f64>,
    exact: Option<BTreeMap<u64, BigRational>>,
}

impl Pmf {
    pub fn from_exact(exact: BTreeMap<u64, BigRational>) -> Self {
        let probs = exact
            .iter()
            .map(|(&k, v)| (k, rational_to_f64(v)))
            .collect();
        Pmf {
            probs,
            exact: Some(exact),
        }
    }

    pub fn from_float(probs: BTreeMap<u64, f64>) -> Self {
        Pmf { probs, exact: None }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn prob(&self, k: u64) -> f64 {
        self.probs.get(&k).copied().unwrap_or(0.0)
    }

    pub fn exact_prob(&self, k: u64) -> Option<BigRational> {
        self.exact
            .as_ref()
            .map(|m| m.get(&k).cloned().unwrap_or_else(BigRational::zero))
    }

    pub fn probs(&self) -> &BTreeMap<u64, f64> {
        &self.probs
    }

    pub fn exact_probs(&self) -> Option<&BTreeMap<u64, BigRational>> {
        self.exact.as_ref()
    }

    pub fn float_total(&self) -> f64 {
        self.probs.values().sum()
    }
}

/// Empirical law of `W` over uniform `x`.
pub fn w_pmf_empirical(n: usize, samples: u64, seed: u64) -> Result<Pmf, EstimatorError> {
    if samples == 0 {
        return Err(EstimatorError::ZeroSamples);
    }
    let forest = SylowForest::build(n)?;
    let matching = forest.matching();
    let hist: BTreeMap<u64, u64> = (0..samples)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<u64, u64>, i| {
            let mut rng = sample_rng(seed, i);
            let x = random_permutation(n, &mut rng).expect("n >= 1");
            let w = common_matching_rank(matching, &x).expect("equal degree") as u64;
            *acc.entry(w).or_default() += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let exact = hist
        .into_iter()
        .map(|(k, c)| (k, ratio(BigUint::from(c), BigUint::from(samples))))
        .collect();
    Ok(Pmf::from_exact(exact))
}

/// Exact law of `W` for uniform `x ∈ Sₙ`, by inclusion–exclusion over the
/// `f = ⌊n/2⌋` matched pairs.
///
/// With `B_j = C(f,j) · f·(f−1)⋯(f−j+1) · 2^j · (n−2j)!/n!` the probability
/// that `j` specified pairs all map onto pairs, the sieve gives
/// `Pr(W = w) = Σ_{j≥w} (−1)^{j−w} C(j,w) B_j`.
pub fn w_pmf_exact(n: u64) -> Result<Pmf, EstimatorError> {
    if n == 0 {
        return Err(EstimatorError::ZeroSamples);
    }
    if n > W_PMF_DEGREE_CUTOFF {
        return Err(EstimatorError::DegreeCutoff(
            n as usize,
            W_PMF_DEGREE_CUTOFF as usize,
        ));
    }
    let f = n / 2;
    // B_j as exact rationals, with (n−2j)!/n! folded into a falling factorial
    let mut b = Vec::with_capacity(f as usize + 1);
    for j in 0..=f {
        let mut numer = census::binomial(f, j);
        for i in 0..j {
            numer *= BigUint::from(f - i);
        }
        numer <<= j as usize; // 2^j
        let mut denom = BigUint::one();
        for i in 0..2 * j {
            denom *= BigUint::from(n - i);
        }
        b.push(ratio(numer, denom));
    }
    let mut exact = BTreeMap::new();
    for w in 0..=f {
        let mut p = BigRational::zero();
        for j in w..=f {
            let term = BigRational::from(BigInt::from(census::binomial(j, w)))
                * &b[j as usize];
            if (j - w) % 2 == 0 {
                p += term;
            } else {
                p -= term;
            }
        }
        assert!(!p.is_negative(), "sieve produced a negative mass at W={w}");
        if !p.is_zero() {
            exact.insert(w, p);
        }
    }
    let total: BigRational = exact.values().sum();
    assert!(total.is_one(), "exact pmf must sum to 1");
    Ok(Pmf::from_exact(exact))
}

/// Poisson(1/2) masses up to `k_max`.
pub fn poisson_reference(k_max: u64) -> Pmf {
    let mut probs = BTreeMap::new();
    let mut mass = (-0.5f64).exp();
    for k in 0..=k_max {
        probs.insert(k, mass);
        mass *= 0.5 / (k + 1) as f64;
    }
    Pmf::from_float(probs)
}

/// Total-variation distance `½ Σ |p − q|`, with any unlisted tail mass of
/// either pmf treated as its own point.
pub fn tv_distance(p: &Pmf, q: &Pmf) -> f64 {
    let keys: std::collections::BTreeSet<u64> = p
        .probs
        .keys()
        .chain(q.probs.keys())
        .copied()
        .collect();
    let sum: f64 = keys.iter().map(|&k| (p.prob(k) - q.prob(k)).abs()).sum();
    let tail_p = (1.0 - p.float_total()).max(0.0);
    let tail_q = (1.0 - q.float_total()).max(0.0);
    0.5 * (sum + (tail_p - tail_q).abs())
}

/// Exact class-sum expectation `E|P ∩ P^x ∖ A| = Σ_λ |C_λ∩P|·|C_λ∩(P∖A)|/|C_λ|`.
pub fn expected_non_a(n: u64) -> Result<BigRational, EstimatorError> {
    let p = census::cycle_type_census(n, Subset::P)?;
    let d = census::cycle_type_census(n, Subset::PMinusA)?;
    let mut e = BigRational::zero();
    for (lambda, count_d) in d.counts() {
        let count_p = p.count(lambda);
        if count_p.is_zero() {
            continue;
        }
        e += ratio(count_p * count_d, census::class_size(lambda));
    }
    Ok(e)
}

/// `sup n·E|P ∩ P^x ∖ A|` over the calibration degrees, used for the fast
/// backend's bias bound at degrees beyond the cycle-type guard.
static BIAS_CONSTANT: Lazy<f64> = Lazy::new(|| {
    [8u64, 16, 32, 64]
        .iter()
        .map(|&n| n as f64 * rational_to_f64(&expected_non_a(n).expect("within guard")))
        .fold(0.0, f64::max)
});

/// Bound on `Pr(P ∩ P^x ≠ A ∩ A^x)` at degree `n`: the exact expectation
/// when the census guard allows it, otherwise `C/n`.
pub fn bias_bound(n: u64) -> f64 {
    match expected_non_a(n) {
        Ok(e) => rational_to_f64(&e),
        Err(_) => *BIAS_CONSTANT / n as f64,
    }
}
