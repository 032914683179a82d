//! Permutations of `{1..n}` and partitions of `n`.
//!
//! Composition convention, fixed for the whole crate: `compose(p, q)` applies
//! `q` first, so `compose(p, q)(i) = p(q(i))`. Conjugation is `g^x = x⁻¹∘g∘x`,
//! under which `x∘(a b)∘x⁻¹ = (x(a) x(b))`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("images are not a bijection of 1..{0}")]
    NotBijection(usize),
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("cannot parse cycle notation: {0}")]
    Parse(String),
}

/// A permutation of `{1..n}`, stored as zero-based images.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    /// Builds from one-based images: position `i` (1-based) holds `x(i)`.
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        let n = images.len();
        if n == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &v in images {
            if v < 1 || v > n || seen[v - 1] {
                return Err(PermError::NotBijection(n));
            }
            seen[v - 1] = true;
            out.push((v - 1) as u32);
        }
        Ok(Permutation { images: out })
    }

    /// Internal constructor from zero-based images, assumed valid.
    pub(crate) fn from_zero_based(images: Vec<u32>) -> Self {
        debug_assert!({
            let mut seen = vec![false; images.len()];
            images.iter().all(|&v| {
                let fresh = !seen[v as usize];
                seen[v as usize] = true;
                fresh
            })
        });
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a one-based point.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] as usize + 1
    }

    /// Image of a zero-based point.
    #[inline]
    pub fn apply0(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// `compose(p, q)(i) = p(q(i))`: right factor applied first.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != q.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), q.degree()));
        }
        let images = q.images.iter().map(|&i| self.images[i as usize]).collect();
        Ok(Permutation { images })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize] = i as u32;
        }
        Permutation { images }
    }

    /// `g^x = x⁻¹∘g∘x`.
    pub fn conjugate(&self, x: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != x.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), x.degree()));
        }
        let xinv = x.inverse();
        xinv.compose(self)?.compose(x)
    }

    pub fn cycle_type(&self) -> Partition {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut parts = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u32;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i] as usize;
                len += 1;
            }
            parts.push(len);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// Number of non-fixed points.
    pub fn support_size(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i as u32 != v)
            .count()
    }

    pub fn parity(&self) -> Parity {
        let cycles = self.cycle_type().parts.len();
        if (self.degree() - cycles) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Builds the permutation from disjoint cycles given as one-based points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        if n == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for w in 0..cycle.len() {
                let a = cycle[w];
                let b = cycle[(w + 1) % cycle.len()];
                if a < 1 || a > n || touched[a - 1] {
                    return Err(PermError::NotBijection(n));
                }
                touched[a - 1] = true;
                images[a - 1] = (b - 1) as u32;
            }
        }
        Ok(Permutation { images })
    }

    /// Disjoint cycle decomposition, nontrivial cycles only, one-based,
    /// each cycle starting from its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i] as usize;
            }
            out.push(cycle);
        }
        out
    }
}

/// Uniform over Sₙ via an unbiased Fisher–Yates shuffle.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation, PermError> {
    if n == 0 {
        return Err(PermError::ZeroDegree);
    }
    let mut images: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        images.swap(i, j);
    }
    Ok(Permutation { images })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (k, p) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[n={}] {}", self.degree(), self)
    }
}

/// Parses cycle notation such as `(1 2)(3 4)`, whitespace-insensitive.
/// The degree is the largest point mentioned; use [`parse_with_degree`]
/// to pad with fixed points.
impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cycles = parse_cycles(s)?;
        let n = cycles
            .iter()
            .flatten()
            .copied()
            .max()
            .unwrap_or(1);
        Permutation::from_cycles(n, &cycles)
    }
}

/// Parses cycle notation with an explicit ambient degree.
pub fn parse_with_degree(s: &str, n: usize) -> Result<Permutation, PermError> {
    let cycles = parse_cycles(s)?;
    Permutation::from_cycles(n, &cycles)
}

fn parse_cycles(s: &str) -> Result<Vec<Vec<usize>>, PermError> {
    let mut cycles = Vec::new();
    let mut current: Option<Vec<usize>> = None;
    let mut number = String::new();
    let flush =
        |number: &mut String, current: &mut Option<Vec<usize>>| -> Result<(), PermError> {
            if !number.is_empty() {
                let v: usize = number
                    .parse()
                    .map_err(|_| PermError::Parse(number.clone()))?;
                match current {
                    Some(c) => c.push(v),
                    None => return Err(PermError::Parse("point outside cycle".into())),
                }
                number.clear();
            }
            Ok(())
        };
    for ch in s.chars() {
        match ch {
            '(' => {
                if current.is_some() {
                    return Err(PermError::Parse("nested '('".into()));
                }
                current = Some(Vec::new());
            }
            ')' => {
                flush(&mut number, &mut current)?;
                let cycle = current
                    .take()
                    .ok_or_else(|| PermError::Parse("unmatched ')'".into()))?;
                if !cycle.is_empty() {
                    cycles.push(cycle);
                }
            }
            c if c.is_ascii_digit() => number.push(c),
            c if c.is_whitespace() || c == ',' => flush(&mut number, &mut current)?,
            c => return Err(PermError::Parse(format!("unexpected '{c}'"))),
        }
    }
    if current.is_some() {
        return Err(PermError::Parse("unterminated cycle".into()));
    }
    Ok(cycles)
}

/// A partition of `n`: weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&p| p > 0), "parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// Trusted constructor: `parts` already weakly decreasing.
    pub(crate) fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        Partition { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn n(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Sum of the nonunit parts.
    pub fn support(&self) -> u64 {
        self.parts
            .iter()
            .filter(|&&p| p > 1)
            .map(|&p| p as u64)
            .sum()
    }

    /// Multiplicity of `part`.
    pub fn multiplicity(&self, part: u32) -> usize {
        self.parts.iter().filter(|&&p| p == part).count()
    }

    /// Every part multiplied by two.
    pub fn doubled(&self) -> Partition {
        Partition {
            parts: self.parts.iter().map(|&p| p * 2).collect(),
        }
    }

    /// Disjoint union of two partitions (merge of sorted parts).
    pub fn concat(&self, other: &Partition) -> Partition {
        let mut parts = Vec::with_capacity(self.parts.len() + other.parts.len());
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() || j < other.parts.len() {
            let take_left = j >= other.parts.len()
                || (i < self.parts.len() && self.parts[i] >= other.parts[j]);
            if take_left {
                parts.push(self.parts[i]);
                i += 1;
            } else {
                parts.push(other.parts[j]);
                j += 1;
            }
        }
        Partition { parts }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, "+")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}
