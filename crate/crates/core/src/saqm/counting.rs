//! Exact integer arithmetic of the counting axioms.

use super::{Result, SaqmError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HardyCounts {
    /// `K(N) = N^r`.
    pub k: u128,
    /// `K(N + 1) > K(N)`.
    pub monotone_ok: bool,
    /// `K(N₁N₂) = K(N₁) K(N₂)` for every factorization `N = N₁N₂`.
    pub composite_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealSpaceCounts {
    pub k_joint: u128,
    pub k_product: u128,
    pub violates: bool,
}

fn power(n: u64, r: u32) -> Result<u128> {
    (n as u128)
        .checked_pow(r)
        .ok_or_else(|| SaqmError::InvalidArgument(format!("{n}^{r} overflows")))
}

/// Counts of the polynomial law `K(N) = N^r`.
pub fn hardy_counts(n: u64, r: u32) -> Result<HardyCounts> {
    if n == 0 || r == 0 {
        return Err(SaqmError::InvalidArgument(format!(
            "need N >= 1 and r >= 1, got N = {n}, r = {r}"
        )));
    }
    let k = power(n, r)?;
    let monotone_ok = power(n + 1, r)? > k;
    let mut composite_ok = true;
    for a in (2..).take_while(|a| a * a <= n) {
        if n.is_multiple_of(a) {
            composite_ok &= power(a, r)? * power(n / a, r)? == k;
        }
    }
    Ok(HardyCounts {
        k,
        monotone_ok,
        composite_ok,
    })
}

fn real_count(n: u64) -> u128 {
    let n = n as u128;
    n * (n + 1) / 2
}

/// Real Hilbert spaces have `K = N(N + 1)/2`, so a composite system carries
/// more parameters than its parts.
pub fn real_space_violation(n1: u64, n2: u64) -> Result<RealSpaceCounts> {
    if n1 < 2 || n2 < 2 {
        return Err(SaqmError::InvalidArgument(format!(
            "need N1, N2 >= 2, got {n1}, {n2}"
        )));
    }
    let k_joint = real_count(n1 * n2);
    let k_product = real_count(n1) * real_count(n2);
    Ok(RealSpaceCounts {
        k_joint,
        k_product,
        violates: k_joint > k_product,
    })
}

/// `|g(N₁N₂) - g(N₁) - g(N₂) - g(N₁)g(N₂)|` with `g(N) = N^r - 1`.
pub fn wootters_g_identity(n1: u64, n2: u64, r: u32) -> Result<f64> {
    let g = |n: u64| -> Result<i128> { Ok(power(n, r)? as i128 - 1) };
    if n1 < 2 || n2 < 2 {
        return Err(SaqmError::InvalidArgument(format!(
            "need N1, N2 >= 2, got {n1}, {n2}"
        )));
    }
    let (a, b, ab) = (g(n1)?, g(n2)?, g(n1 * n2)?);
    Ok((ab - a - b - a * b).unsigned_abs() as f64)
}

/// The same identity for an arbitrary `g`, as a negative control.
pub fn wootters_g_identity_with(n1: u64, n2: u64, g: impl Fn(u64) -> i128) -> f64 {
    let (a, b, ab) = (g(n1), g(n2), g(n1 * n2));
    (ab - a - b - a * b).unsigned_abs() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardy_examples() {
        assert_eq!(
            hardy_counts(2, 2).unwrap(),
            HardyCounts {
                k: 4,
                monotone_ok: true,
                composite_ok: true
            }
        );
        assert_eq!(hardy_counts(2, 1).unwrap().k, 2);
        let four = hardy_counts(4, 2).unwrap();
        assert_eq!(four.k, 16);
        assert_eq!(four.k, hardy_counts(2, 2).unwrap().k.pow(2));
        assert!(four.composite_ok);
        assert!(hardy_counts(0, 2).is_err());
    }

    #[test]
    fn real_space_examples() {
        assert_eq!(
            real_space_violation(2, 2).unwrap(),
            RealSpaceCounts {
                k_joint: 10,
                k_product: 9,
                violates: true
            }
        );
        let r = real_space_violation(2, 3).unwrap();
        assert_eq!((r.k_joint, r.k_product, r.violates), (21, 18, true));
        assert_eq!(
            hardy_counts(4, 2).unwrap().k,
            hardy_counts(2, 2).unwrap().k.pow(2)
        );
    }

    #[test]
    fn g_identity() {
        for r in [1, 2] {
            for n1 in [2, 3, 5] {
                for n2 in [2, 3, 5] {
                    assert_eq!(wootters_g_identity(n1, n2, r).unwrap(), 0.0);
                }
            }
        }
        let wrong = wootters_g_identity_with(2, 2, |n| (n * n) as i128);
        assert_eq!(wrong, 8.0);
    }
}
