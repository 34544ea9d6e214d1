// SPDX-License-Identifier: MIT

//! Size bounds for compiled MLFP networks, in exact integer arithmetic.

use crate::ann::Arch;

/// Upper bounds on depth, maximal width and parameter count of `Φ_n^θ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeBounds {
    pub depth: u128,
    pub width: u128,
    pub params: u128,
}

/// Bounds from the architectures of `F` and `X`; `None` on `u128` overflow.
pub fn size_bounds(f: &Arch, x: &Arch, d: usize, a_count: usize, m: u64, n: usize) -> Option<SizeBounds> {
    let (lf, lx) = (f.depth() as u128, x.depth() as u128);
    let depth = (n as u128).checked_mul(lf + lx - 1)? + 1;
    let c = 2 * (f.max_width().max(x.max_width()).max(2 * d + 2 * a_count)) as u128;
    let base = 4u128.checked_mul(a_count as u128)?.checked_mul(m as u128)?;
    let pow = base.checked_pow(n as u32)?;
    let width = c.checked_mul(pow)?;
    let params = 2u128.checked_mul(depth)?.checked_mul(c.checked_mul(c)?)?.checked_mul(pow.checked_mul(pow)?)?;
    Some(SizeBounds { depth, width, params })
}

/// Number of `F` copies in one action block `Λ_n^{θ,a}`:
/// `N(n) = Σ_{l<n} M^{n−l} (1 + |A| N(l) + 𝟙_{l≥1} (1 + |A| N(l−1)))`.
pub fn f_copy_count(a_count: usize, m: u64, n: usize) -> Option<u128> {
    let (a, m) = (a_count as u128, m as u128);
    let mut v: Vec<u128> = vec![0];
    for k in 1..=n {
        let mut s: u128 = 0;
        for l in 0..k {
            let mut inner = 1 + a.checked_mul(v[l])?;
            if l >= 1 {
                inner = inner.checked_add(1 + a.checked_mul(v[l - 1])?)?;
            }
            s = s.checked_add(m.checked_pow((k - l) as u32)?.checked_mul(inner)?)?;
        }
        v.push(s);
    }
    Some(v[n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_counts() {
        assert_eq!(f_copy_count(3, 3, 0), Some(0));
        assert_eq!(f_copy_count(1, 2, 1), Some(2));
        assert_eq!(f_copy_count(3, 3, 4), Some(6828));
        assert_eq!(f_copy_count(2, 4, 4), Some(9000));
    }

    #[test]
    fn bounds_overflow_is_reported() {
        let f = Arch { dims: vec![3, 4, 1] };
        let x = Arch { dims: vec![2, 2] };
        assert!(size_bounds(&f, &x, 1, 2, 4, 3).is_some());
        assert!(size_bounds(&f, &x, 1, 2, u64::MAX, 40).is_none());
    }
}
