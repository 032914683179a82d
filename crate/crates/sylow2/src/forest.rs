//! The forest model of a Sylow 2-subgroup of Sₙ.
//!
//! Write `n = 2^{e₁} + … + 2^{e_m}` with `e₁ > … > e_m ≥ 0`. The Sylow
//! 2-subgroup `P` is the automorphism group of a forest of complete binary
//! trees of those heights, acting on the leaves. Leaves are labelled
//! canonically: tree 1 owns `1..2^{e₁}`, tree 2 the next `2^{e₂}`, and so
//! on, with each subtree an aligned dyadic interval.
//!
//! An element of `P` is coded by one swap bit per internal node
//! ([`NodeSwapCode`]); a node's automorphism is "apply the two child
//! automorphisms, then optionally swap the two branches".

use rand::Rng;
use thiserror::Error;

use crate::perm::Permutation;

/// Hard guard for exhaustive enumeration: at most 2^22 elements.
pub const ENUMERATION_CUTOFF_BITS: usize = 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ForestError {
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("degree mismatch: forest degree {0}, permutation degree {1}")]
    DegreeMismatch(usize, usize),
    #[error("code length {0} does not match internal node count {1}")]
    CodeLength(usize, usize),
    #[error("permutation is not in the Sylow subgroup")]
    NotInSylow,
    #[error("enumeration cutoff exceeded: {0} bits > {ENUMERATION_CUTOFF_BITS}")]
    CutoffExceeded(usize),
}

/// An internal node: the aligned leaf interval it roots, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    /// First leaf of the subtree, zero-based.
    pub base: usize,
    /// Height of the subtree; the interval has length `2^height`.
    pub height: u32,
}

/// The ⌊n/2⌋ sibling leaf pairs at the bottom of the forest, one-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
    /// partner[i] = zero-based partner of zero-based point i, if matched.
    partner: Vec<Option<u32>>,
}

impl Matching {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.partner.len()
    }

    /// Zero-based partner lookup.
    #[inline]
    pub fn partner0(&self, i: usize) -> Option<usize> {
        self.partner[i].map(|p| p as usize)
    }
}

#[derive(Debug, Clone)]
pub struct SylowForest {
    n: usize,
    heights: Vec<u32>,
    /// Base leaf (zero-based) of each tree, in height order.
    tree_bases: Vec<usize>,
    /// All internal nodes, breadth-first within each tree, trees in height order.
    nodes: Vec<Node>,
    matching: Matching,
}

/// One swap bit per internal node of the forest, in node index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSwapCode {
    bits: Vec<bool>,
}

impl NodeSwapCode {
    pub fn all_false(len: usize) -> Self {
        NodeSwapCode {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        NodeSwapCode { bits }
    }

    /// Bit `k` of `index` becomes the swap flag of node `k`.
    pub fn from_index(index: u64, len: usize) -> Self {
        NodeSwapCode {
            bits: (0..len).map(|k| index >> k & 1 == 1).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl SylowForest {
    /// Builds the canonical forest for degree `n` from its binary expansion.
    pub fn build(n: usize) -> Result<Self, ForestError> {
        if n == 0 {
            return Err(ForestError::ZeroDegree);
        }
        let mut heights = Vec::new();
        for e in (0..usize::BITS).rev() {
            if n >> e & 1 == 1 {
                heights.push(e);
            }
        }
        let mut tree_bases = Vec::new();
        let mut nodes = Vec::new();
        let mut pairs = Vec::new();
        let mut partner: Vec<Option<u32>> = vec![None; n];
        let mut base = 0usize;
        for &e in &heights {
            tree_bases.push(base);
            // breadth-first: height e first, then e-1, ... down to 1
            for h in (1..=e).rev() {
                for j in 0..1usize << (e - h) {
                    nodes.push(Node {
                        base: base + (j << h),
                        height: h,
                    });
                }
            }
            for j in 0..1usize << e.saturating_sub(1) {
                if e >= 1 {
                    let a = base + 2 * j;
                    let b = a + 1;
                    pairs.push((a + 1, b + 1));
                    partner[a] = Some(b as u32);
                    partner[b] = Some(a as u32);
                }
            }
            base += 1 << e;
        }
        debug_assert_eq!(base, n);
        debug_assert_eq!(pairs.len(), n / 2);
        Ok(SylowForest {
            n,
            heights,
            tree_bases,
            nodes,
            matching: Matching { pairs, partner },
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Tree heights `e₁ > … > e_m` with `Σ 2^{eᵢ} = n`.
    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// `n − s₂(n)`: number of internal nodes, and the 2-adic valuation of |P|.
    pub fn code_len(&self) -> usize {
        self.nodes.len()
    }

    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    /// All leaf blocks (subtree leaf intervals), one-based inclusive, roots included.
    pub fn leaf_blocks(&self) -> Vec<(usize, usize)> {
        let mut blocks = Vec::new();
        for (t, &e) in self.heights.iter().enumerate() {
            let base = self.tree_bases[t];
            for h in (0..=e).rev() {
                for j in 0..1usize << (e - h) {
                    let lo = base + (j << h);
                    blocks.push((lo + 1, lo + (1 << h)));
                }
            }
        }
        blocks
    }

    /// Realizes a swap code as the leaf permutation it induces.
    ///
    /// Each node's automorphism applies the child automorphisms first, then
    /// the optional branch swap; decoding therefore walks heights bottom-up
    /// and xors the half-offset into the images inside a flagged node's block.
    pub fn element_to_perm(&self, code: &NodeSwapCode) -> Result<Permutation, ForestError> {
        if code.len() != self.nodes.len() {
            return Err(ForestError::CodeLength(code.len(), self.nodes.len()));
        }
        let mut images: Vec<u32> = (0..self.n as u32).collect();
        // nodes are stored top-down; iterate in reverse for bottom-up
        for (node, &bit) in self.nodes.iter().zip(code.bits()).rev() {
            if !bit {
                continue;
            }
            let half = 1u32 << (node.height - 1);
            let base = node.base as u32;
            for i in node.base..node.base + (1 << node.height) {
                images[i] = base + ((images[i] - base) ^ half);
            }
        }
        Ok(Permutation::from_zero_based(images))
    }

    /// True iff `p` maps every leaf block onto a leaf block.
    pub fn perm_in_sylow(&self, p: &Permutation) -> bool {
        if p.degree() != self.n {
            return false;
        }
        // Image of each node interval must be an aligned interval of the
        // same size inside a tree of sufficient height.
        for node in &self.nodes {
            let size = 1usize << node.height;
            let mut lo = usize::MAX;
            let mut hi = 0usize;
            for i in node.base..node.base + size {
                let v = p.apply0(i);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo != size - 1 || !self.is_block0(lo, size) {
                return false;
            }
        }
        true
    }

    /// Is `[lo, lo+size)` (zero-based) a leaf block of the forest?
    fn is_block0(&self, lo: usize, size: usize) -> bool {
        let t = match self.tree_bases.binary_search(&lo) {
            Ok(t) => t,
            Err(ins) => {
                if ins == 0 {
                    return false;
                }
                ins - 1
            }
        };
        let base = self.tree_bases[t];
        let tree_size = 1usize << self.heights[t];
        size <= tree_size && lo + size <= base + tree_size && (lo - base) % size == 0
    }

    /// Inverse of [`element_to_perm`]; errors iff `p ∉ P`.
    pub fn perm_to_element(&self, p: &Permutation) -> Result<NodeSwapCode, ForestError> {
        if p.degree() != self.n {
            return Err(ForestError::DegreeMismatch(self.n, p.degree()));
        }
        let mut work: Vec<u32> = (0..self.n).map(|i| p.apply0(i) as u32).collect();
        let mut bits = vec![false; self.nodes.len()];
        // Top-down: the node's swap is visible in where the left half lands;
        // undo it and recurse into the children (stored later in node order).
        for (k, node) in self.nodes.iter().enumerate() {
            let size = 1u32 << node.height;
            let half = size / 2;
            let base = node.base as u32;
            let img_first = work[node.base];
            if img_first < base || img_first >= base + size {
                return Err(ForestError::NotInSylow);
            }
            let swapped = (img_first - base) & half != 0;
            if swapped {
                bits[k] = true;
                for i in node.base..node.base + size as usize {
                    let v = work[i];
                    if v < base || v >= base + size {
                        return Err(ForestError::NotInSylow);
                    }
                    work[i] = base + ((v - base) ^ half);
                }
            }
            // each half must now map into itself
            for i in node.base..node.base + half as usize {
                let v = work[i];
                if v < base || v >= base + half {
                    return Err(ForestError::NotInSylow);
                }
            }
            for i in node.base + half as usize..node.base + size as usize {
                let v = work[i];
                if v < base + half || v >= base + size {
                    return Err(ForestError::NotInSylow);
                }
            }
        }
        // after all swaps are undone, nothing may move
        for (i, &v) in work.iter().enumerate() {
            if v as usize != i {
                return Err(ForestError::NotInSylow);
            }
        }
        Ok(NodeSwapCode { bits })
    }

    /// Uniform over `P`: one independent fair bit per node.
    pub fn sample_element<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeSwapCode {
        NodeSwapCode {
            bits: (0..self.nodes.len()).map(|_| rng.gen::<bool>()).collect(),
        }
    }

    /// Iterates all `2^{n−s₂(n)}` swap codes.
    pub fn enumerate_elements(
        &self,
    ) -> Result<impl Iterator<Item = NodeSwapCode> + '_, ForestError> {
        let len = self.nodes.len();
        if len > ENUMERATION_CUTOFF_BITS {
            return Err(ForestError::CutoffExceeded(len));
        }
        Ok((0..1u64 << len).map(move |idx| NodeSwapCode::from_index(idx, len)))
    }

    /// All elements of `P` as leaf permutations.
    pub fn enumerate_perms(&self) -> Result<Vec<Permutation>, ForestError> {
        self.enumerate_elements()?
            .map(|c| self.element_to_perm(&c))
            .collect()
    }
}
