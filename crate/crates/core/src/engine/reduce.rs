//! Pairwise tree reduction over one value per PE.
//!
//! Each round folds the upper half onto the lower half (`buf[k] += buf[k +
//! half]`), the same shape as a shuffle-down warp reduction, so `p` values
//! take `⌈log2 p⌉` rounds and the summation order is fixed.

use std::ops::Add;

pub fn reduce_contributions<T>(values: &[T]) -> T
where
    T: Copy + Add<Output = T> + Default,
{
    let mut buf = values.to_vec();
    reduce_in_place(&mut buf)
}

/// Same as [`reduce_contributions`] but uses `buf` as scratch.
#[inline]
pub fn reduce_in_place<T>(buf: &mut [T]) -> T
where
    T: Copy + Add<Output = T> + Default,
{
    let mut len = buf.len();
    if len == 0 {
        return T::default();
    }
    while len > 1 {
        let half = len.div_ceil(2);
        for k in 0..len / 2 {
            buf[k] = buf[k] + buf[k + half];
        }
        len = half;
    }
    buf[0]
}

/// Number of folding rounds for `p` inputs.
pub fn reduction_depth(p: usize) -> u32 {
    if p <= 1 {
        0
    } else {
        usize::BITS - (p - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(reduce_contributions(&[0i64, 0, 0, 0]), 0);
        assert_eq!(reduce_contributions(&[1i64, 2, 3, 4]), 10);
        assert_eq!(reduce_contributions(&[1i64; 8]), 8);
        assert_eq!(reduction_depth(8), 3);
        assert_eq!(reduction_depth(1), 0);
        assert_eq!(reduction_depth(5), 3);
        assert_eq!(reduce_contributions::<f64>(&[]), 0.0);
        assert_eq!(reduce_contributions(&[2.5f64]), 2.5);
    }

    #[test]
    fn fixed_pairing_order() {
        // ((a + c) + (b + d)) for four inputs
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(reduce_contributions(&v), (v[0] + v[2]) + (v[1] + v[3]));
    }

    proptest! {
        #[test]
        fn integer_sum_is_exact(v in proptest::collection::vec(-1000i64..1000, 0..40)) {
            prop_assert_eq!(reduce_contributions(&v), v.iter().sum::<i64>());
        }

        #[test]
        fn real_sum_is_deterministic(v in proptest::collection::vec(-1e3f64..1e3, 1..40)) {
            let a = reduce_contributions(&v);
            prop_assert_eq!(a.to_bits(), reduce_contributions(&v).to_bits());
            let naive: f64 = v.iter().sum();
            prop_assert!((a - naive).abs() <= 1e-9 * (1.0 + naive.abs()));
        }
    }
}
