//! Intersections of `P` with its conjugate `P^x = x⁻¹Px`.
//!
//! The fast path computes the statistic `W = rank(A ∩ A^x)`: the number of
//! matched pairs `{a, b}` with `{x(a), x(b)}` again a matched pair. The
//! exact path enumerates `P` and keeps the elements `g` with `x∘g∘x⁻¹ ∈ P`.

use thiserror::Error;

use crate::forest::{ForestError, Matching, SylowForest};
use crate::perm::{Parity, PermError, Permutation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntersectError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Debug, Clone)]
pub struct IntersectionResult {
    /// Rank of `A ∩ A^x`.
    pub w: usize,
    /// The matched pairs realizing it, one-based.
    pub common_pairs: Vec<(usize, usize)>,
    /// All of `P ∩ P^x`, exact mode only.
    pub full_intersection: Option<Vec<Permutation>>,
    /// Whether `P ∩ P^x` equals the subgroup generated by the common pairs.
    pub equals_a_part: Option<bool>,
}

impl IntersectionResult {
    pub fn intersection_order(&self) -> Option<usize> {
        self.full_intersection.as_ref().map(|v| v.len())
    }

    pub fn is_trivial(&self) -> bool {
        match &self.full_intersection {
            Some(v) => v.len() == 1,
            None => self.w == 0,
        }
    }
}

/// `W = #{{a,b} ∈ m : {x(a), x(b)} ∈ m}` in O(n).
pub fn common_matching_rank(m: &Matching, x: &Permutation) -> Result<usize, IntersectError> {
    if m.degree() != x.degree() {
        return Err(IntersectError::DegreeMismatch(m.degree(), x.degree()));
    }
    Ok(common_pairs(m, x).len())
}

fn common_pairs(m: &Matching, x: &Permutation) -> Vec<(usize, usize)> {
    m.pairs()
        .iter()
        .filter(|&&(a, b)| m.partner0(x.apply0(a - 1)) == Some(x.apply0(b - 1)))
        .copied()
        .collect()
}

/// `A ∩ A^x`: the elementary abelian subgroup generated by the common
/// transpositions, of order `2^W`.
pub fn intersection_a(m: &Matching, x: &Permutation) -> Result<IntersectionResult, IntersectError> {
    if m.degree() != x.degree() {
        return Err(IntersectError::DegreeMismatch(m.degree(), x.degree()));
    }
    let pairs = common_pairs(m, x);
    Ok(IntersectionResult {
        w: pairs.len(),
        common_pairs: pairs,
        full_intersection: None,
        equals_a_part: None,
    })
}

/// All `2^w` products of subsets of the common transpositions.
pub fn span_of_pairs(n: usize, pairs: &[(usize, usize)]) -> Vec<Permutation> {
    let mut out = Vec::with_capacity(1 << pairs.len());
    for mask in 0u64..1 << pairs.len() {
        let mut images: Vec<usize> = (1..=n).collect();
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                images.swap(a - 1, b - 1);
            }
        }
        out.push(Permutation::from_images(&images).expect("disjoint pairs"));
    }
    out
}

/// Exact `P ∩ P^x` by enumeration of `P` plus the membership test
/// `x∘g∘x⁻¹ ∈ P`. Respects the forest's enumeration cutoff.
pub fn intersection_p_exact(
    f: &SylowForest,
    x: &Permutation,
) -> Result<IntersectionResult, IntersectError> {
    if f.degree() != x.degree() {
        return Err(IntersectError::DegreeMismatch(f.degree(), x.degree()));
    }
    let elements = f.enumerate_perms()?;
    intersection_p_exact_with(f, &elements, x)
}

/// Same as [`intersection_p_exact`] with the enumeration of `P` precomputed,
/// for exhaustive sweeps over many `x`.
pub fn intersection_p_exact_with(
    f: &SylowForest,
    elements: &[Permutation],
    x: &Permutation,
) -> Result<IntersectionResult, IntersectError> {
    let xinv = x.inverse();
    let mut full = Vec::new();
    for g in elements {
        // g ∈ P^x ⇔ x∘g∘x⁻¹ ∈ P
        let conj = x.compose(g)?.compose(&xinv)?;
        if f.perm_in_sylow(&conj) {
            full.push(g.clone());
        }
    }
    let pairs = common_pairs(f.matching(), x);
    let span = span_of_pairs(f.degree(), &pairs);
    let equals = full.len() == span.len() && span.iter().all(|p| full.contains(p));
    Ok(IntersectionResult {
        w: pairs.len(),
        common_pairs: pairs,
        full_intersection: Some(full),
        equals_a_part: Some(equals),
    })
}

/// Whether the intersection meets Aₙ trivially.
///
/// Fast mode: an element of `A ∩ A^x` is even iff it multiplies an even
/// number of the `W` common transpositions, so the even part is trivial
/// iff `W ≤ 1`. Exact mode: check every even element.
pub fn trivial_in_alternating(result: &IntersectionResult) -> bool {
    match &result.full_intersection {
        Some(full) => full
            .iter()
            .all(|g| g.parity() == Parity::Odd || g.is_identity()),
        None => result.w <= 1,
    }
}
