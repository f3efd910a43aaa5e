//! Square bit matrices over the two-element field, packed row-major into a `u64`.
//!
//! Entry `(r, c)` of an `n x n` matrix lives at bit `r * n + c`. Column vectors are
//! packed the same way as `XorVec` values: coordinate `r` is bit `r`.

pub(crate) const MAX_DIM: u32 = 8;

#[inline]
fn row_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
pub(crate) fn row(n: u32, m: u64, r: u32) -> u64 {
    (m >> (r * n)) & row_mask(n)
}

#[inline]
pub(crate) fn entry(n: u32, m: u64, r: u32, c: u32) -> bool {
    (m >> (r * n + c)) & 1 == 1
}

pub(crate) fn from_rows(n: u32, rows: &[u64]) -> u64 {
    rows.iter().enumerate().fold(0, |acc, (r, &bits)| {
        acc | ((bits & row_mask(n)) << (r as u32 * n))
    })
}

pub(crate) fn identity(n: u32) -> u64 {
    (0..n).fold(0, |acc, r| acc | 1u64 << (r * n + r))
}

pub(crate) fn mul(n: u32, a: u64, b: u64) -> u64 {
    let mut out = 0u64;
    for r in 0..n {
        let mut acc = 0u64;
        for k in 0..n {
            if entry(n, a, r, k) {
                acc ^= row(n, b, k);
            }
        }
        out |= acc << (r * n);
    }
    out
}

/// Matrix-vector product `m * v`.
pub(crate) fn apply(n: u32, m: u64, v: u64) -> u64 {
    (0..n).fold(0, |acc, r| {
        acc | (u64::from((row(n, m, r) & v).count_ones() & 1) << r)
    })
}

pub(crate) fn transpose(n: u32, m: u64) -> u64 {
    let mut out = 0u64;
    for r in 0..n {
        for c in 0..n {
            if entry(n, m, r, c) {
                out |= 1u64 << (c * n + r);
            }
        }
    }
    out
}

/// Gauss-Jordan inverse; `None` when singular.
pub(crate) fn inverse(n: u32, m: u64) -> Option<u64> {
    let size = n as usize;
    let mut left: Vec<u64> = (0..n).map(|r| row(n, m, r)).collect();
    let mut right: Vec<u64> = (0..n).map(|r| 1u64 << r).collect();
    for col in 0..size {
        let pivot = (col..size).find(|&r| (left[r] >> col) & 1 == 1)?;
        left.swap(col, pivot);
        right.swap(col, pivot);
        for r in 0..size {
            if r != col && (left[r] >> col) & 1 == 1 {
                left[r] ^= left[col];
                right[r] ^= right[col];
            }
        }
    }
    Some(from_rows(n, &right))
}

/// Kronecker product of an `n1`-matrix and an `n2`-matrix.
pub(crate) fn kronecker(n1: u32, a: u64, n2: u32, b: u64) -> u64 {
    let n = n1 * n2;
    let mut out = 0u64;
    for r1 in 0..n1 {
        for c1 in 0..n1 {
            if !entry(n1, a, r1, c1) {
                continue;
            }
            for r2 in 0..n2 {
                for c2 in 0..n2 {
                    if entry(n2, b, r2, c2) {
                        out |= 1u64 << ((r1 * n2 + r2) * n + c1 * n2 + c2);
                    }
                }
            }
        }
    }
    out
}
