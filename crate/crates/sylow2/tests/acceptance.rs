//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured quantities (visible with `--nocapture`).
//!
//! Run with `cargo test --test acceptance`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use sylow2::bounds;
use sylow2::census::{self, Subset};
use sylow2::estimator::{
    estimate_exhaustive, estimate_trivial, exhaustive_stats, expected_non_a, w_pmf_exact, Backend,
    EstimateConfig, Mode, REF_ALTERNATING, REF_SYMMETRIC,
};
use sylow2::forest::SylowForest;
use sylow2::util::{ln_biguint, rational_to_f64};

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn base_config() -> EstimateConfig {
    EstimateConfig {
        n: 1000,
        samples: 1_000_000,
        seed: 7,
        mode: Mode::Symmetric,
        backend: Backend::Fast,
        x_in_alternating: false,
        workers: 0,
    }
}

/// Theorem, Sₙ: the million-sample estimate at n = 1000 lands within
/// 0.005 of e^{−1/2}.
#[test]
fn criterion_1_symmetric_limit() {
    let report = estimate_trivial(&base_config()).unwrap();
    let err = (report.estimate_float - REF_SYMMETRIC).abs();
    assert!(err < 0.005, "estimate {} err {err}", report.estimate_float);
    println!(
        "criterion 1: PASS  estimate={} |err|={err:.6} < 0.005",
        report.estimate_float
    );
}

/// Theorem, Aₙ: same run in alternating mode lands within 0.005 of
/// (3/2)e^{−1/2}.
#[test]
fn criterion_2_alternating_limit() {
    let mut cfg = base_config();
    cfg.mode = Mode::Alternating;
    let report = estimate_trivial(&cfg).unwrap();
    let err = (report.estimate_float - REF_ALTERNATING).abs();
    assert!(err < 0.005, "estimate {} err {err}", report.estimate_float);
    println!(
        "criterion 2: PASS  estimate={} |err|={err:.6} < 0.005",
        report.estimate_float
    );
}

/// Exactness anchor at n = 8: the exhaustive mean of |P∩P^x∖A| over all
/// 40320 conjugators equals the class-sum expectation as a rational, and
/// Pr(P∩P^x ≠ A∩A^x) is within the Markov bound.
#[test]
fn criterion_3_exhaustive_anchor_n8() {
    let stats = exhaustive_stats(8).unwrap();
    let class_sum = expected_non_a(8).unwrap();
    assert_eq!(stats.mean_non_a, class_sum, "class-sum mismatch");
    assert!(stats.pr_not_equal <= class_sum);
    println!(
        "criterion 3: PASS  Pr(trivial)={} Pr(W=0)={} Pr(P∩Px≠A∩Ax)={} mean|P∩Px∖A|={}",
        stats.pr_trivial, stats.pr_w_zero, stats.pr_not_equal, stats.mean_non_a
    );
}

/// Worked rational fixtures, all exact equalities.
#[test]
fn criterion_4_rational_fixtures() {
    assert_eq!(expected_non_a(4).unwrap(), rat(8, 3));
    let pmf4 = w_pmf_exact(4).unwrap();
    assert_eq!(pmf4.exact_prob(0).unwrap(), rat(2, 3));
    assert_eq!(pmf4.exact_prob(1).unwrap(), BigRational::zero());
    assert_eq!(pmf4.exact_prob(2).unwrap(), rat(1, 3));
    assert_eq!(w_pmf_exact(6).unwrap().exact_prob(0).unwrap(), rat(8, 15));
    let exhaustive4 = estimate_exhaustive(4, Mode::Symmetric, Backend::Exact).unwrap();
    assert_eq!(exhaustive4.successes, 0);
    println!("criterion 4: PASS  E(4)=8/3, W-pmf(4)={{0:2/3,2:1/3}}, Pr(W=0|6)=8/15, exact(4)=0");
}

/// Census equivalence with exhaustive enumeration.
#[test]
fn criterion_5_census_equivalence() {
    for e in 1..=4u32 {
        let n = 1usize << e;
        let f = SylowForest::build(n).unwrap();
        let mut support_tally = std::collections::BTreeMap::new();
        let mut cycle_tally = std::collections::BTreeMap::new();
        for p in f.enumerate_perms().unwrap() {
            *support_tally.entry(p.support_size() as u64).or_insert(0u64) += 1;
            *cycle_tally.entry(p.cycle_type()).or_insert(0u64) += 1;
        }
        let poly = census::support_poly_tree(e);
        for (s, c) in &support_tally {
            assert_eq!(poly.coeff(*s), (*c).into(), "support e={e} s={s}");
        }
        assert_eq!(poly.coeffs().len(), support_tally.len());
        let census = census::cycle_type_census_tree(e).unwrap();
        for (l, c) in &cycle_tally {
            assert_eq!(census.count(l), (*c).into(), "cycle type e={e} {l}");
        }
        assert_eq!(census.counts().len(), cycle_tally.len());
    }
    for n in [5u64, 6, 7, 12] {
        let poly = census::support_census(n, Subset::P).unwrap();
        let order = num_bigint::BigUint::one() << (n - n.count_ones() as u64) as usize;
        assert_eq!(poly.total(), order, "order at n={n}");
        let f = SylowForest::build(n as usize).unwrap();
        let mut tally = std::collections::BTreeMap::new();
        for p in f.enumerate_perms().unwrap() {
            *tally.entry(p.support_size() as u64).or_insert(0u64) += 1;
        }
        for (s, c) in &tally {
            assert_eq!(poly.coeff(*s), (*c).into(), "n={n} s={s}");
        }
        assert_eq!(poly.coeffs().len(), tally.len());
    }
    println!("criterion 5: PASS  tree censuses (e ≤ 4) and forest censuses (n ∈ {{5,6,7,12}}) equal enumeration");
}

/// O(1/n) decay of the expectation: n·E|P∩P^x∖A| at n ∈ {8,16,32,64} is
/// bounded by twice its value at n = 8, all rationals exact.
#[test]
fn criterion_6_expectation_decay() {
    let bound = rat(2 * 8, 1) * expected_non_a(8).unwrap();
    let mut values = Vec::new();
    for n in [8u64, 16, 32, 64] {
        let scaled = rat(n as i64, 1) * expected_non_a(n).unwrap();
        assert!(scaled <= bound, "n·E at n={n} exceeds 2·(8·E(8))");
        values.push(format!("{:.4}", rational_to_f64(&scaled)));
    }
    println!(
        "criterion 6: PASS  n·E = [{}] all ≤ 2·(8·E(8)) = {:.4}",
        values.join(", "),
        rational_to_f64(&bound)
    );
}

/// O(1/n) decay of the Poisson approximation, and exactness of the sieve
/// pmf against exhaustive enumeration for n ≤ 8.
#[test]
fn criterion_7_poisson_rate() {
    // sieve pmf equals exhaustive enumeration for n ≤ 8
    for n in 2u64..=8 {
        let pmf = w_pmf_exact(n).unwrap();
        let f = SylowForest::build(n as usize).unwrap();
        let mut hist: std::collections::BTreeMap<u64, u64> = Default::default();
        let mut total = 0u64;
        permute(n as usize, &mut |x| {
            let w =
                sylow2::intersect::common_matching_rank(f.matching(), x).unwrap() as u64;
            *hist.entry(w).or_default() += 1;
            total += 1;
        });
        for (k, c) in hist {
            assert_eq!(
                pmf.exact_prob(k).unwrap(),
                rat(c as i64, total as i64),
                "n={n} k={k}"
            );
        }
    }
    let scaled: Vec<f64> = [10u64, 20, 40, 80, 160, 320]
        .iter()
        .map(|&n| {
            let p0 = rational_to_f64(&w_pmf_exact(n).unwrap().exact_prob(0).unwrap());
            n as f64 * (p0 - REF_SYMMETRIC).abs()
        })
        .collect();
    let bound = 2.0 * scaled[0].max(scaled[1]);
    for (i, v) in scaled.iter().enumerate() {
        assert!(*v <= bound, "index {i}: {v} > {bound}");
    }
    println!(
        "criterion 7: PASS  n·|Pr(W=0)−e^(−1/2)| = {scaled:.4?} all ≤ {bound:.4}"
    );
}

fn permute(n: usize, visit: &mut impl FnMut(&sylow2::perm::Permutation)) {
    let mut images: Vec<usize> = (1..=n).collect();
    fn heap(
        v: &mut Vec<usize>,
        k: usize,
        visit: &mut impl FnMut(&sylow2::perm::Permutation),
    ) {
        if k == 1 {
            visit(&sylow2::perm::Permutation::from_images(v).unwrap());
            return;
        }
        for i in 0..k {
            heap(v, k - 1, visit);
            if k % 2 == 0 {
                v.swap(i, k - 1);
            } else {
                v.swap(0, k - 1);
            }
        }
    }
    heap(&mut images, n, visit);
}

/// The bound sandwich and the partition-count and A-census bounds.
#[test]
fn criterion_8_bound_sandwich() {
    for n in 4..=64u64 {
        let d = census::support_census(n, Subset::PMinusA).unwrap();
        for s in (4..=n).step_by(2) {
            let exact = bounds::big_sum(n, s).unwrap();
            assert!(
                BigRational::from_integer(d.coeff(s).into()) <= exact,
                "census > big_sum at n={n} s={s}"
            );
            let ln_exact = if exact.is_zero() {
                f64::NEG_INFINITY
            } else {
                ln_biguint(exact.numer().magnitude()) - ln_biguint(exact.denom().magnitude())
            };
            let (_, ln_gf) = bounds::bound_gf(n, s).unwrap();
            assert!(ln_exact <= ln_gf + 1e-9, "big_sum > gf at n={n} s={s}");
            if let Some(small) = bounds::bound_small_s(n, s).unwrap() {
                assert!(ln_exact <= small.ln() + 1e-9, "big_sum > small_s at n={n} s={s}");
            }
        }
    }
    for n in 1..=40u64 {
        for s in (0..=n).filter(|&s| s != 1) {
            let count = census::partitions_with_support(n, s, false).len() as u64;
            let cap = 1u64.checked_shl(s as u32).unwrap_or(u64::MAX);
            assert!(count <= cap, "partition count at n={n} s={s}");
        }
    }
    for n in 2..=200u64 {
        let a = census::support_census(n, Subset::A).unwrap();
        for (&s, c) in a.coeffs() {
            if s == 0 {
                continue;
            }
            let ln_bound = s as f64 / 2.0 * (std::f64::consts::E * n as f64 / s as f64).ln();
            assert!(ln_biguint(c) <= ln_bound + 1e-9, "A census at n={n} s={s}");
        }
    }
    println!("criterion 8: PASS  census ≤ big_sum ≤ gf (n ≤ 64), #partitions ≤ 2^s (n ≤ 40), census(A) ≤ (en/s)^(s/2) (n ≤ 200)");
}

/// Worker-count independence: the criterion-1 run through the CLI gives
/// byte-identical JSON for --workers ∈ {1, 4, 16}.
#[test]
fn criterion_9_worker_determinism() {
    let bin = env!("CARGO_BIN_EXE_sylow2");
    let mut outputs = Vec::new();
    for workers in ["1", "4", "16"] {
        let out = std::process::Command::new(bin)
            .args([
                "estimate",
                "--n",
                "1000",
                "--samples",
                "1000000",
                "--mode",
                "symmetric",
                "--backend",
                "fast",
                "--seed",
                "7",
                "--workers",
                workers,
            ])
            .output()
            .expect("run cli");
        assert!(out.status.success(), "workers={workers}: {:?}", out.status);
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1], "workers 1 vs 4 differ");
    assert_eq!(outputs[0], outputs[2], "workers 1 vs 16 differ");
    println!("criterion 9: PASS  byte-identical JSON for --workers 1/4/16");
}
