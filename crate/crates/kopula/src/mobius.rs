//! Zeta and Möbius transforms over the superset order of the subset lattice.
//!
//! Tables are indexed by inclusion mask, so `values.len()` must be a power of
//! two. The kernels only need ring operations and therefore also run over
//! exact rationals.

use std::ops::{Add, Sub};

use num_traits::Zero;

fn check_len(len: usize) {
    assert!(len.is_power_of_two(), "table length {len} is not a power of two");
}

/// In place: `v[X] <- sum of v[Y] over Y ⊇ X`.
pub fn superset_sum<T>(values: &mut [T])
where
    T: Copy + Add<Output = T>,
{
    check_len(values.len());
    let mut bit = 1;
    while bit < values.len() {
        for mask in 0..values.len() {
            if mask & bit == 0 {
                values[mask] = values[mask] + values[mask | bit];
            }
        }
        bit <<= 1;
    }
}

/// In place inverse of [`superset_sum`]:
/// `v[X] <- sum of (-1)^{|Y|-|X|} v[Y] over Y ⊇ X`.
pub fn superset_diff<T>(values: &mut [T])
where
    T: Copy + Sub<Output = T>,
{
    check_len(values.len());
    let mut bit = 1;
    while bit < values.len() {
        for mask in 0..values.len() {
            if mask & bit == 0 {
                values[mask] = values[mask] - values[mask | bit];
            }
        }
        bit <<= 1;
    }
}

/// Direct O(4^N) superset summation, kept as a reference implementation.
pub fn superset_sum_naive<T>(values: &[T]) -> Vec<T>
where
    T: Copy + Zero + Add<Output = T>,
{
    check_len(values.len());
    (0..values.len())
        .map(|x| {
            (0..values.len())
                .filter(|y| y & x == x)
                .fold(T::zero(), |acc, y| acc + values[y])
        })
        .collect()
}

/// Direct O(4^N) inclusion–exclusion, kept as a reference implementation.
pub fn superset_diff_naive<T>(values: &[T]) -> Vec<T>
where
    T: Copy + Zero + Add<Output = T> + Sub<Output = T>,
{
    check_len(values.len());
    (0..values.len())
        .map(|x| {
            (0..values.len())
                .filter(|y| y & x == x)
                .fold(T::zero(), |acc, y| {
                    if (y ^ x).count_ones() % 2 == 0 {
                        acc + values[y]
                    } else {
                        acc - values[y]
                    }
                })
        })
        .collect()
}
