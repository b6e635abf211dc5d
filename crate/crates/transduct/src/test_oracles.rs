//! Exact big-integer oracles for unit tests. Never part of the runtime
//! path; probabilities computed here come from integer arithmetic plus a
//! final high-precision logarithm.

use num_bigint::BigUint;

/// Product of the integers in [lo, hi], by halving the range.
pub fn range_product(lo: u64, hi: u64) -> BigUint {
    if lo > hi {
        return BigUint::from(1u64);
    }
    if hi - lo < 8 {
        let mut acc = BigUint::from(1u64);
        for k in lo..=hi {
            acc *= k;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    range_product(lo, mid) * range_product(mid + 1, hi)
}

pub fn factorial(n: u64) -> BigUint {
    range_product(1, n)
}

pub fn choose(n: u64, k: u64) -> BigUint {
    assert!(k <= n);
    let k = k.min(n - k);
    range_product(n - k + 1, n) / factorial(k)
}

/// ln of a big integer from its top 53 bits; accurate to ~1e-15 relative.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        let v = u64::try_from(x).expect("fits in u64") as f64;
        return v.ln();
    }
    let shift = bits - 53;
    let top = u64::try_from(&(x >> shift)).expect("53 bits fit") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// ln of the exact rational a/b.
pub fn ln_ratio(a: &BigUint, b: &BigUint) -> f64 {
    ln_biguint(a) - ln_biguint(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials_and_binomials() {
        assert_eq!(factorial(5), BigUint::from(120u64));
        assert_eq!(choose(5, 2), BigUint::from(10u64));
        assert_eq!(choose(100, 6), BigUint::from(1_192_052_400u64));
    }

    #[test]
    fn ln_biguint_agrees_with_f64_ln() {
        let x = BigUint::from(1_192_052_400u64);
        assert!((ln_biguint(&x) - 1_192_052_400f64.ln()).abs() < 1e-12);
        // 170! still fits in f64
        let f170 = factorial(170);
        let as_f64: f64 = f170.to_string().parse().unwrap();
        assert!(((ln_biguint(&f170) - as_f64.ln()) / as_f64.ln()).abs() < 1e-14);
    }
}
