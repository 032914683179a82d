//! Exact censuses of the Sylow 2-subgroup `P`, its bottom layer `A`, and
//! `P ∖ A`, by support and by cycle type, plus partition utilities and
//! conjugacy-class sizes in Sₙ.
//!
//! Tree-level censuses follow the wreath recursion. Writing `G_e` for the
//! support census of the height-`e` tree automorphism group:
//!
//! ```text
//! G₀ = 1,    G_e = G_{e−1}² + 2^{2^e − 2} · X^{2^e}
//! ```
//!
//! (non-swapping elements split over the two branches; branch-swapping
//! elements number `2^{2^e−2}` and have full support). The cycle-type
//! census `D_e` satisfies the analogous recursion with partition
//! concatenation in place of the product and part-doubling for the
//! swapping term.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use thiserror::Error;

use crate::perm::Partition;

/// Cycle-type censuses are guarded at tree height 6 (binary partitions of 64).
pub const CYCLE_TYPE_HEIGHT_GUARD: u32 = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CensusError {
    #[error("tree height {0} exceeds cycle-type guard {CYCLE_TYPE_HEIGHT_GUARD}")]
    HeightGuard(u32),
    #[error("degree must be positive")]
    ZeroDegree,
}

/// Which subset of `P` a census describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subset {
    A,
    P,
    PMinusA,
}

impl Subset {
    pub fn label(self) -> &'static str {
        match self {
            Subset::A => "A",
            Subset::P => "P",
            Subset::PMinusA => "PminusA",
        }
    }
}

/// Exact element counts keyed by (even) support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPolynomial {
    coeffs: BTreeMap<u64, BigUint>,
}

impl SupportPolynomial {
    pub fn one() -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, BigUint::one());
        SupportPolynomial { coeffs }
    }

    pub fn coeff(&self, s: u64) -> BigUint {
        self.coeffs.get(&s).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, BigUint> {
        &self.coeffs
    }

    pub fn total(&self) -> BigUint {
        self.coeffs.values().sum()
    }

    pub fn mul(&self, other: &SupportPolynomial) -> SupportPolynomial {
        let mut coeffs: BTreeMap<u64, BigUint> = BTreeMap::new();
        for (s1, c1) in &self.coeffs {
            for (s2, c2) in &other.coeffs {
                *coeffs.entry(s1 + s2).or_default() += c1 * c2;
            }
        }
        SupportPolynomial { coeffs }
    }

    fn add_term(&mut self, s: u64, c: BigUint) {
        *self.coeffs.entry(s).or_default() += c;
    }

    /// Coefficientwise subtraction; panics if any coefficient would go negative.
    pub fn sub(&self, other: &SupportPolynomial) -> SupportPolynomial {
        let mut coeffs = self.coeffs.clone();
        for (s, c) in &other.coeffs {
            let entry = coeffs.entry(*s).or_default();
            assert!(*entry >= *c, "negative census coefficient at support {s}");
            *entry -= c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        SupportPolynomial { coeffs }
    }
}

/// Exact element counts keyed by cycle type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleTypeCensus {
    degree: u64,
    counts: BTreeMap<Partition, BigUint>,
}

impl CycleTypeCensus {
    fn point(degree: u64, lambda: Partition) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(lambda, BigUint::one());
        CycleTypeCensus { degree, counts }
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn counts(&self) -> &BTreeMap<Partition, BigUint> {
        &self.counts
    }

    pub fn count(&self, lambda: &Partition) -> BigUint {
        self.counts.get(lambda).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// Concatenation convolution: disjoint-union of cycle types across
    /// independent factors, counts multiplied.
    pub fn convolve(&self, other: &CycleTypeCensus) -> CycleTypeCensus {
        let mut counts: BTreeMap<Partition, BigUint> = BTreeMap::new();
        for (l1, c1) in &self.counts {
            for (l2, c2) in &other.counts {
                *counts.entry(l1.concat(l2)).or_default() += c1 * c2;
            }
        }
        CycleTypeCensus {
            degree: self.degree + other.degree,
            counts,
        }
    }

    pub fn sub(&self, other: &CycleTypeCensus) -> CycleTypeCensus {
        assert_eq!(self.degree, other.degree);
        let mut counts = self.counts.clone();
        for (l, c) in &other.counts {
            let entry = counts.entry(l.clone()).or_default();
            assert!(*entry >= *c, "negative census count at {l}");
            *entry -= c;
        }
        counts.retain(|_, c| !c.is_zero());
        CycleTypeCensus {
            degree: self.degree,
            counts,
        }
    }

    /// Marginalizes to a support census via partition support.
    pub fn support_marginal(&self) -> SupportPolynomial {
        let mut poly = SupportPolynomial {
            coeffs: BTreeMap::new(),
        };
        for (l, c) in &self.counts {
            poly.add_term(l.support(), c.clone());
        }
        poly
    }
}

static SUPPORT_MEMO: Lazy<Mutex<HashMap<u32, SupportPolynomial>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));
static CYCLE_MEMO: Lazy<Mutex<HashMap<u32, CycleTypeCensus>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Support census of the automorphism group of the complete binary tree of
/// height `e` (order `2^{2^e − 1}`).
pub fn support_poly_tree(e: u32) -> SupportPolynomial {
    if let Some(p) = SUPPORT_MEMO.lock().unwrap().get(&e) {
        return p.clone();
    }
    let result = if e == 0 {
        SupportPolynomial::one()
    } else {
        let prev = support_poly_tree(e - 1);
        let mut poly = prev.mul(&prev);
        // swapping elements: pairs (a, b) of branch automorphisms up to the
        // twist, 2^(2^e - 2) of them, all of full support 2^e
        poly.add_term(1u64 << e, BigUint::one() << ((1usize << e) - 2));
        poly
    };
    SUPPORT_MEMO
        .lock()
        .unwrap()
        .insert(e, result.clone());
    result
}

/// Cycle-type census of the height-`e` tree automorphism group.
///
/// A swapping element with branch pair `(a, b)` has the cycle type of `a∘b`
/// with every part doubled, and as `b` varies the product is uniform over
/// the branch group, giving the `|Aut(T_{e−1})| · double(D_{e−1})` term.
pub fn cycle_type_census_tree(e: u32) -> Result<CycleTypeCensus, CensusError> {
    if e > CYCLE_TYPE_HEIGHT_GUARD {
        return Err(CensusError::HeightGuard(e));
    }
    if let Some(c) = CYCLE_MEMO.lock().unwrap().get(&e) {
        return Ok(c.clone());
    }
    let result = if e == 0 {
        CycleTypeCensus::point(1, Partition::from_sorted(vec![1]))
    } else {
        let prev = cycle_type_census_tree(e - 1)?;
        let mut census = prev.convolve(&prev);
        let branch_order = BigUint::one() << ((1usize << (e - 1)) - 1);
        for (l, c) in prev.counts() {
            *census.counts.entry(l.doubled()).or_default() += c * &branch_order;
        }
        census
    };
    CYCLE_MEMO.lock().unwrap().insert(e, result.clone());
    Ok(result)
}

fn tree_heights(n: u64) -> Vec<u32> {
    (0..64).rev().filter(|&e| n >> e & 1 == 1).collect()
}

pub fn factorial(n: u64) -> BigUint {
    let mut f = BigUint::one();
    for k in 2..=n {
        f *= BigUint::from(k);
    }
    f
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut num = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
    }
    num / factorial(k)
}

/// Exact support census of `A`, `P`, or `P ∖ A` inside S_n.
///
/// `A` is generated by ⌊n/2⌋ disjoint transpositions, so its count at
/// support `s` is exactly `C(⌊n/2⌋, s/2)`. `P` is the product of the tree
/// censuses; `P ∖ A` is the coefficientwise difference.
pub fn support_census(n: u64, which: Subset) -> Result<SupportPolynomial, CensusError> {
    if n == 0 {
        return Err(CensusError::ZeroDegree);
    }
    let a = || {
        let f = n / 2;
        let mut poly = SupportPolynomial {
            coeffs: BTreeMap::new(),
        };
        for k in 0..=f {
            poly.add_term(2 * k, binomial(f, k));
        }
        poly
    };
    let p = || {
        tree_heights(n)
            .into_iter()
            .map(support_poly_tree)
            .fold(SupportPolynomial::one(), |acc, g| acc.mul(&g))
    };
    Ok(match which {
        Subset::A => a(),
        Subset::P => p(),
        Subset::PMinusA => p().sub(&a()),
    })
}

/// Exact cycle-type census of `A`, `P`, or `P ∖ A` inside S_n.
pub fn cycle_type_census(n: u64, which: Subset) -> Result<CycleTypeCensus, CensusError> {
    if n == 0 {
        return Err(CensusError::ZeroDegree);
    }
    let a = || {
        let f = n / 2;
        let mut counts = BTreeMap::new();
        for k in 0..=f {
            let mut parts = vec![2u32; k as usize];
            parts.extend(std::iter::repeat(1u32).take((n - 2 * k) as usize));
            counts.insert(Partition::from_sorted(parts), binomial(f, k));
        }
        CycleTypeCensus { degree: n, counts }
    };
    let p = || -> Result<CycleTypeCensus, CensusError> {
        let mut acc: Option<CycleTypeCensus> = None;
        for e in tree_heights(n) {
            let d = cycle_type_census_tree(e)?;
            acc = Some(match acc {
                None => d,
                Some(prev) => prev.convolve(&d),
            });
        }
        Ok(acc.expect("n > 0"))
    };
    Ok(match which {
        Subset::A => a(),
        Subset::P => p()?,
        Subset::PMinusA => p()?.sub(&a()),
    })
}

/// `|C_λ|` in S_n: `n! / ∏ᵢ i^{mᵢ} mᵢ!`.
pub fn class_size(lambda: &Partition) -> BigUint {
    let n = lambda.n();
    let mut denom = BigUint::one();
    let mut mult: BTreeMap<u32, u64> = BTreeMap::new();
    for &p in lambda.parts() {
        *mult.entry(p).or_default() += 1;
    }
    for (part, m) in mult {
        denom *= BigUint::from(part).pow(m as u32);
        denom *= factorial(m);
    }
    factorial(n) / denom
}

/// Sum of the nonunit parts.
pub fn partition_support(lambda: &Partition) -> u64 {
    lambda.support()
}

/// All partitions of `n` with support exactly `s`, i.e. partitions of `s`
/// with no part 1, padded with `n − s` units. With `power_of_two_parts`,
/// nonunit parts are restricted to powers of 2. There are at most `2^s`.
pub fn partitions_with_support(n: u64, s: u64, power_of_two_parts: bool) -> Vec<Partition> {
    assert!(s <= n && s != 1, "support must satisfy 0 ≤ s ≤ n, s ≠ 1");
    let mut out = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    fn rec(
        remaining: u64,
        max_part: u32,
        power_of_two: bool,
        stack: &mut Vec<u32>,
        pad: u64,
        out: &mut Vec<Partition>,
    ) {
        if remaining == 0 {
            let mut parts = stack.clone();
            parts.extend(std::iter::repeat(1u32).take(pad as usize));
            out.push(Partition::from_sorted(parts));
            return;
        }
        let mut part = max_part.min(remaining as u32);
        while part >= 2 {
            let ok = !power_of_two || part.is_power_of_two();
            // avoid leaving a remainder of 1, which cannot be a nonunit part
            if ok && remaining - part as u64 != 1 {
                stack.push(part);
                rec(remaining - part as u64, part, power_of_two, stack, pad, out);
                stack.pop();
            }
            part -= 1;
        }
    }
    rec(s, s.min(u32::MAX as u64) as u32, power_of_two_parts, &mut stack, n - s, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::SylowForest;

    fn poly(entries: &[(u64, u64)]) -> SupportPolynomial {
        let mut coeffs = BTreeMap::new();
        for &(s, c) in entries {
            coeffs.insert(s, BigUint::from(c));
        }
        SupportPolynomial { coeffs }
    }

    #[test]
    fn support_tree_small() {
        assert_eq!(support_poly_tree(0), poly(&[(0, 1)]));
        assert_eq!(support_poly_tree(1), poly(&[(0, 1), (2, 1)]));
        assert_eq!(support_poly_tree(2), poly(&[(0, 1), (2, 2), (4, 5)]));
        assert_eq!(
            support_poly_tree(3),
            poly(&[(0, 1), (2, 4), (4, 14), (6, 20), (8, 89)])
        );
        assert_eq!(support_poly_tree(3).total(), BigUint::from(128u32));
    }

    /// Brute-force oracle: tally supports over an exhaustive enumeration of
    /// Aut(T_e) realized as leaf permutations.
    fn enumeration_support_tally(n: usize) -> SupportPolynomial {
        let f = SylowForest::build(n).unwrap();
        let mut coeffs: BTreeMap<u64, BigUint> = BTreeMap::new();
        for p in f.enumerate_perms().unwrap() {
            *coeffs.entry(p.support_size() as u64).or_default() += BigUint::one();
        }
        SupportPolynomial { coeffs }
    }

    fn enumeration_cycle_tally(n: usize) -> CycleTypeCensus {
        let f = SylowForest::build(n).unwrap();
        let mut counts: BTreeMap<Partition, BigUint> = BTreeMap::new();
        for p in f.enumerate_perms().unwrap() {
            *counts.entry(p.cycle_type()).or_default() += BigUint::one();
        }
        CycleTypeCensus {
            degree: n as u64,
            counts,
        }
    }

    #[test]
    fn support_tree_matches_enumeration() {
        for e in 1..=4u32 {
            assert_eq!(
                support_poly_tree(e),
                enumeration_support_tally(1 << e),
                "height {e}"
            );
        }
    }

    #[test]
    fn cycle_tree_small() {
        let d1 = cycle_type_census_tree(1).unwrap();
        assert_eq!(d1.count(&Partition::new(vec![1, 1])), BigUint::one());
        assert_eq!(d1.count(&Partition::new(vec![2])), BigUint::one());
        let d2 = cycle_type_census_tree(2).unwrap();
        assert_eq!(d2.count(&Partition::new(vec![1, 1, 1, 1])), BigUint::one());
        assert_eq!(d2.count(&Partition::new(vec![2, 1, 1])), BigUint::from(2u32));
        assert_eq!(d2.count(&Partition::new(vec![2, 2])), BigUint::from(3u32));
        assert_eq!(d2.count(&Partition::new(vec![4])), BigUint::from(2u32));
    }

    #[test]
    fn cycle_tree_matches_enumeration() {
        for e in 1..=4u32 {
            assert_eq!(
                cycle_type_census_tree(e).unwrap(),
                enumeration_cycle_tally(1 << e),
                "height {e}"
            );
        }
    }

    #[test]
    fn cycle_tree_e3_support_marginal() {
        let d3 = cycle_type_census_tree(3).unwrap();
        assert_eq!(d3.total(), BigUint::from(128u32));
        assert_eq!(d3.support_marginal(), support_poly_tree(3));
    }

    #[test]
    fn cycle_tree_guard() {
        assert_eq!(
            cycle_type_census_tree(7).err(),
            Some(CensusError::HeightGuard(7))
        );
    }

    #[test]
    fn support_census_examples() {
        // n=10, A, s=4 → C(5,2) = 10
        assert_eq!(
            support_census(10, Subset::A).unwrap().coeff(4),
            BigUint::from(10u32)
        );
        // n=6, P = G₂·G₁
        assert_eq!(
            support_census(6, Subset::P).unwrap(),
            poly(&[(0, 1), (2, 3), (4, 7), (6, 5)])
        );
        // n=6, P∖A
        assert_eq!(
            support_census(6, Subset::PMinusA).unwrap(),
            poly(&[(4, 4), (6, 4)])
        );
    }

    #[test]
    fn support_census_matches_enumeration() {
        for n in [5u64, 6, 7, 12] {
            let p = support_census(n, Subset::P).unwrap();
            assert_eq!(
                p.total(),
                BigUint::one() << (n - n.count_ones() as u64) as usize
            );
            assert_eq!(p, enumeration_support_tally(n as usize), "n={n}");
            let a = support_census(n, Subset::A).unwrap();
            let d = support_census(n, Subset::PMinusA).unwrap();
            for (s, c) in p.coeffs() {
                assert_eq!(a.coeff(*s) + d.coeff(*s), *c);
            }
        }
    }

    #[test]
    fn cycle_type_census_examples() {
        let d = cycle_type_census(4, Subset::PMinusA).unwrap();
        assert_eq!(d.count(&Partition::new(vec![2, 2])), BigUint::from(2u32));
        assert_eq!(d.count(&Partition::new(vec![4])), BigUint::from(2u32));
        assert_eq!(d.counts().len(), 2);

        let a6 = cycle_type_census(6, Subset::A).unwrap();
        assert_eq!(
            a6.count(&Partition::new(vec![2, 2, 1, 1])),
            BigUint::from(3u32)
        );

        assert_eq!(
            cycle_type_census(8, Subset::P).unwrap().total(),
            BigUint::from(128u32)
        );
    }

    #[test]
    fn cycle_type_census_matches_enumeration() {
        for n in [5u64, 6, 7, 12] {
            assert_eq!(
                cycle_type_census(n, Subset::P).unwrap(),
                enumeration_cycle_tally(n as usize),
                "n={n}"
            );
        }
    }

    #[test]
    fn class_size_examples() {
        assert_eq!(class_size(&Partition::new(vec![1; 7])), BigUint::one());
        assert_eq!(
            class_size(&Partition::new(vec![2, 1, 1])),
            BigUint::from(6u32)
        );
        assert_eq!(class_size(&Partition::new(vec![2, 2])), BigUint::from(3u32));
    }

    #[test]
    fn class_sizes_sum_to_group_order() {
        let n = 7u64;
        let all = partitions_of(n);
        let total: BigUint = all.iter().map(class_size).sum();
        assert_eq!(total, factorial(n));
    }

    fn partitions_of(n: u64) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        fn rec(rem: u64, max: u32, stack: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition::from_sorted(stack.clone()));
                return;
            }
            for part in (1..=max.min(rem as u32)).rev() {
                stack.push(part);
                rec(rem - part as u64, part, stack, out);
                stack.pop();
            }
        }
        rec(n, n as u32, &mut stack, &mut out);
        out
    }

    #[test]
    fn partitions_with_support_examples() {
        // s=0 → only (1ⁿ)
        let ones = partitions_with_support(5, 0, false);
        assert_eq!(ones, vec![Partition::new(vec![1; 5])]);
        // n=8, s=8, power-of-two parts
        let p2: Vec<String> = partitions_with_support(8, 8, true)
            .iter()
            .map(|l| l.to_string())
            .collect();
        assert_eq!(p2.len(), 4);
        for want in ["8", "4+4", "4+2+2", "2+2+2+2"] {
            assert!(p2.contains(&want.to_string()), "{want}");
        }
        // n=8, s=4, all parts: {(4,1⁴), (2,2,1⁴)}
        let s4 = partitions_with_support(8, 4, false);
        assert_eq!(s4.len(), 2);
    }

    #[test]
    fn partitions_with_support_agrees_with_filter() {
        for n in [6u64, 9] {
            let all = partitions_of(n);
            for s in (0..=n).filter(|&s| s != 1) {
                let direct = partitions_with_support(n, s, false);
                let filtered: Vec<_> = all
                    .iter()
                    .filter(|l| l.support() == s)
                    .cloned()
                    .collect();
                assert_eq!(direct.len(), filtered.len(), "n={n} s={s}");
                for l in &filtered {
                    assert!(direct.contains(l));
                }
                assert!(direct.len() as u64 <= 1u64.checked_shl(s as u32).unwrap_or(u64::MAX));
            }
        }
    }

    #[test]
    fn a_census_within_binomial_bound() {
        // census(A)(s) = C(⌊n/2⌋, s/2) ≤ (en/s)^{s/2}
        for n in (2u64..=200).step_by(7) {
            let a = support_census(n, Subset::A).unwrap();
            for (&s, c) in a.coeffs() {
                if s == 0 {
                    continue;
                }
                let bound = ((std::f64::consts::E * n as f64 / s as f64).ln()) * (s as f64 / 2.0);
                let count_log = crate::util::ln_biguint(c);
                assert!(count_log <= bound + 1e-9, "n={n} s={s}");
            }
        }
    }
}
