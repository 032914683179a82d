//! Evaluates the counting bounds for elements of `P ∖ A` of a given
//! support `s`: the exact solution-enumeration sum, the small-`s` largest
//! term closed form, and the generating-function coefficient bound, with
//! the crossover near `s = √(2n)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::census::{self, Subset};
use crate::util::{ln_biguint, ratio};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("support must be even, got {0}")]
    OddSupport(u64),
}

/// A nonnegative solution `(m_h)_{h>0}` of `Σ 2^{h−1} m_h = s/2` with
/// `m₁ < s/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionVector {
    m: BTreeMap<u32, u64>,
    s: u64,
}

impl SolutionVector {
    pub fn multiplicities(&self) -> &BTreeMap<u32, u64> {
        &self.m
    }

    pub fn multiplicity(&self, h: u32) -> u64 {
        self.m.get(&h).copied().unwrap_or(0)
    }

    pub fn support(&self) -> u64 {
        self.s
    }

    /// `k = Σ m_h`: number of swap-rooted subtrees.
    pub fn k(&self) -> u64 {
        self.m.values().sum()
    }

    /// `t = s/2 − Σ m_h = Σ_{h>1} (2^{h−1} − 1) m_h`.
    pub fn t(&self) -> u64 {
        self.s / 2 - self.k()
    }
}

/// All solutions of the weighted equation for even support `s ≥ 2`.
pub fn enumerate_solutions(s: u64) -> Result<Vec<SolutionVector>, BoundsError> {
    if s % 2 != 0 {
        return Err(BoundsError::OddSupport(s));
    }
    let target = s / 2;
    let mut out = Vec::new();
    let mut stack: BTreeMap<u32, u64> = BTreeMap::new();
    // choose m_h for h from the largest usable height down to 1
    fn rec(
        h: u32,
        remaining: u64,
        s: u64,
        stack: &mut BTreeMap<u32, u64>,
        out: &mut Vec<SolutionVector>,
    ) {
        if h == 0 {
            if remaining == 0 {
                out.push(SolutionVector {
                    m: stack.clone(),
                    s,
                });
            }
            return;
        }
        let weight = 1u64 << (h - 1);
        let max_m = remaining / weight;
        for m in 0..=max_m {
            if h == 1 && m >= s / 2 {
                break;
            }
            if m > 0 {
                stack.insert(h, m);
            }
            rec(h - 1, remaining - m * weight, s, stack, out);
            stack.remove(&h);
        }
    }
    let mut h_max = 1u32;
    while 1u64 << (h_max - 1) < target.max(1) {
        h_max += 1;
    }
    rec(h_max, target, s, &mut stack, &mut out);
    Ok(out)
}

/// The exact value of `2^s Σ ∏_h n^{m_h}/m_h!` over the solution set.
pub fn big_sum(n: u64, s: u64) -> Result<BigRational, BoundsError> {
    let mut sum = BigRational::zero();
    for sol in enumerate_solutions(s)? {
        let mut num = BigUint::from(1u32);
        let mut den = BigUint::from(1u32);
        for (&h, &m) in sol.multiplicities() {
            let _ = h;
            num *= BigUint::from(n).pow(m as u32);
            den *= census::factorial(m);
        }
        sum += ratio(num, den);
    }
    Ok(sum * BigRational::from_integer((BigUint::from(1u32) << s as usize).into()))
}

/// The largest-term closed form `s·2^{s+1}·n^{s/2−1}/(s/2−2)!`, valid when
/// `2n⁻¹(s/2−2)(s/2−3) < 1` (with the convention `max(s/2−2, 0)!`).
pub fn bound_small_s(n: u64, s: u64) -> Result<Option<f64>, BoundsError> {
    if s % 2 != 0 {
        return Err(BoundsError::OddSupport(s));
    }
    let half = s as f64 / 2.0;
    let condition = 2.0 / n as f64 * (half - 2.0) * (half - 3.0);
    if condition >= 1.0 {
        return Ok(None);
    }
    let fact_arg = (s / 2).saturating_sub(2);
    let log = (s as f64).ln()
        + (s as f64 + 1.0) * std::f64::consts::LN_2
        + (half - 1.0) * (n as f64).ln()
        - ln_biguint(&census::factorial(fact_arg));
    Ok(Some(log.exp()))
}

/// The generating-function coefficient bound at the evaluation point
/// `x = s/(2n)`: `(2n/s)^{s/2} · 2^s · exp(Σ_h n x^{2^{h−1}})`.
///
/// Returns `(value, ln_value)`; the argument of the exponential is
/// asserted to be at most `s`.
pub fn bound_gf(n: u64, s: u64) -> Result<(f64, f64), BoundsError> {
    if s % 2 != 0 || s == 0 {
        return Err(BoundsError::OddSupport(s));
    }
    assert!(s <= n, "gf bound requires s ≤ n");
    let x = s as f64 / (2.0 * n as f64);
    let mut arg = 0.0f64;
    let mut exponent = 1u64; // 2^{h-1}
    loop {
        let term = n as f64 * x.powf(exponent as f64);
        if term < arg * 1e-30 && exponent > 1 {
            break;
        }
        arg += term;
        if exponent > 1 << 20 {
            break;
        }
        exponent *= 2;
        if term == 0.0 {
            break;
        }
    }
    assert!(
        arg <= s as f64 + 1e-9,
        "exponential argument {arg} exceeds s = {s}"
    );
    let ln = (s as f64 / 2.0) * (2.0 * n as f64 / s as f64).ln()
        + s as f64 * std::f64::consts::LN_2
        + arg;
    Ok((ln.exp(), ln))
}

/// Which bound regime applies at `(n, s)`.
pub fn regime(n: u64, s: u64) -> &'static str {
    if (s as f64) < (2.0 * n as f64).sqrt() {
        "small_s"
    } else {
        "gf"
    }
}

/// Calibrated constants for the two counting bounds.
#[derive(Debug, Clone)]
pub struct ConstantsReport {
    pub n_max: u64,
    /// `max census(A)(s)^{2/s} / (n/s)` over the grid.
    pub c_a: f64,
    /// `max (census(P∖A)(s) / (n/s)^{s/2−1})^{1/s}` over the grid.
    pub c_p: f64,
}

/// Sweeps `n ≤ n_max` and all even supports, extracting the per-element
/// constants hidden in the counting bounds.
pub fn calibrate_constants(n_max: u64) -> ConstantsReport {
    let mut c_a = 0.0f64;
    let mut c_p = 0.0f64;
    for n in 2..=n_max {
        let a = census::support_census(n, Subset::A).expect("n > 0");
        let d = census::support_census(n, Subset::PMinusA).expect("n > 0");
        for (&s, count) in a.coeffs() {
            if s < 2 {
                continue;
            }
            // count^{2/s} / (n/s)
            let v = (2.0 / s as f64 * ln_biguint(count)).exp() / (n as f64 / s as f64);
            c_a = c_a.max(v);
        }
        for (&s, count) in d.coeffs() {
            if s < 2 {
                continue;
            }
            let ln_target = ln_biguint(count)
                - (s as f64 / 2.0 - 1.0) * (n as f64 / s as f64).ln();
            let v = (ln_target / s as f64).exp();
            c_p = c_p.max(v);
        }
    }
    assert!(c_a.is_finite() && c_p.is_finite());
    ConstantsReport { n_max, c_a, c_p }
}
