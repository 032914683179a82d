//! Numeric helpers shared across modules.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Natural log of a positive big integer, via the top 64 bits.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "ln of zero");
    let bits = x.bits();
    if bits <= 63 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 63;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Converts an exact rational to f64 without overflowing huge numerators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let numer = r.numer().abs().to_biguint().unwrap();
    let denom = r.denom().abs().to_biguint().unwrap();
    if numer.is_zero() {
        return 0.0;
    }
    let shift = numer.bits().max(denom.bits()).saturating_sub(63);
    let n = (numer >> shift).to_u64().unwrap() as f64;
    let d = (&denom >> shift).to_u64().unwrap_or(0) as f64;
    if d == 0.0 {
        // denominator vanished under the shift: ratio is astronomically large
        return sign * f64::INFINITY;
    }
    sign * n / d
}

/// Shorthand for an exact nonnegative rational from integer parts.
pub fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
