use alloc::format;

use crate::error::{Error, Result};

/// Largest `n` for which [`binomial`] is exact in 64-bit arithmetic.
pub const MAX_BINOMIAL_N: u32 = 64;

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> Result<u64> {
    if k > n {
        return Err(Error::domain(format!("binomial C({n}, {k}) requires k <= n")));
    }
    if n > MAX_BINOMIAL_N {
        return Err(Error::Overflow { n, k });
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    // acc * (n - i) is divisible by (i + 1) at every step.
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    Ok(acc as u64)
}

/// `C(m, l) / C(n, l)` reduced as an exact fraction before one final rounding.
///
/// Returns 0 when `l > m`. Requires `m <= n` and `l <= n`.
pub fn binomial_ratio(m: u32, l: u32, n: u32) -> Result<f64> {
    if m > n || l > n {
        return Err(Error::domain(format!(
            "binomial ratio C({m}, {l}) / C({n}, {l}) requires m <= n and l <= n"
        )));
    }
    if l > m {
        return Ok(0.0);
    }
    let num = binomial(m, l)?;
    let den = binomial(n, l)?;
    let g = gcd(num, den);
    Ok((num / g) as f64 / (den / g) as f64)
}

/// Falling factorial `k (k - 1) ... (k - l + 1)` as a float; zero when `l > k`.
pub fn falling_factorial(k: u32, l: u32) -> f64 {
    if l > k {
        return 0.0;
    }
    (0..l).fold(1.0, |acc, i| acc * f64::from(k - i))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn pascal(rows: usize) -> Vec<Vec<u128>> {
        let mut tri: Vec<Vec<u128>> = vec![vec![1]];
        for n in 1..=rows {
            let prev = &tri[n - 1];
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            tri.push(row);
        }
        tri
    }

    #[test]
    fn boundary_values() {
        assert_eq!(binomial(8, 0).unwrap(), 1);
        assert_eq!(binomial(8, 8).unwrap(), 1);
        assert_eq!(binomial(0, 0).unwrap(), 1);
    }

    #[test]
    fn matches_pascal_triangle() {
        let tri = pascal(64);
        assert_eq!(tri[8][3], 56);
        assert_eq!(binomial(8, 3).unwrap(), 56);
        for n in 0..=64u32 {
            for k in 0..=n {
                assert_eq!(binomial(n, k).unwrap() as u128, tri[n as usize][k as usize]);
            }
        }
    }

    #[test]
    fn central_coefficient_of_64_fits() {
        assert_eq!(binomial(64, 32).unwrap(), 1_832_624_140_942_590_534);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(binomial(3, 4), Err(Error::Domain(_))));
        assert!(matches!(binomial(65, 2), Err(Error::Overflow { n: 65, k: 2 })));
    }

    #[test]
    fn ratio_is_reduced_exactly() {
        // C(6,2)/C(8,2) = 15/28
        assert_eq!(binomial_ratio(6, 2, 8).unwrap(), 15.0 / 28.0);
        assert_eq!(binomial_ratio(8, 5, 8).unwrap(), 1.0);
        assert_eq!(binomial_ratio(2, 3, 8).unwrap(), 0.0);
    }

    #[test]
    fn falling_factorials() {
        assert_eq!(falling_factorial(3, 2), 6.0);
        assert_eq!(falling_factorial(3, 0), 1.0);
        assert_eq!(falling_factorial(2, 3), 0.0);
        assert_eq!(falling_factorial(8, 8), 40320.0);
    }
}
