//! Elementary symmetric polynomials and their first derivatives.
//!
//! `S_k` is evaluated with the product expansion `prod_i (1 + λ_i t)`,
//! truncated at degree `k`, which costs `O(n k)` and never enumerates
//! subsets.

/// All elementary symmetric polynomials `S_0, …, S_k` of `values`.
pub fn elementary_all(values: &[f64], k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (count, &x) in values.iter().enumerate() {
        let top = k.min(count + 1);
        for j in (1..=top).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `S_k(values)`; zero when `k > values.len()`.
pub fn elementary(values: &[f64], k: usize) -> f64 {
    if k > values.len() {
        return 0.0;
    }
    elementary_all(values, k)[k]
}

/// `S_k` with entry `skip` removed.
pub fn elementary_without(values: &[f64], k: usize, skip: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    let mut count = 0;
    for (i, &x) in values.iter().enumerate() {
        if i == skip {
            continue;
        }
        let top = k.min(count + 1);
        for j in (1..=top).rev() {
            e[j] += x * e[j - 1];
        }
        count += 1;
    }
    if k > count {
        0.0
    } else {
        e[k]
    }
}

/// Gradient of `S_k`: `∂S_k/∂λ_i = S_{k-1}(λ | i)`.
pub fn elementary_gradient(values: &[f64], k: usize) -> Vec<f64> {
    if k == 0 {
        return vec![0.0; values.len()];
    }
    (0..values.len())
        .map(|i| elementary_without(values, k - 1, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Subset enumeration, kept as the independent oracle for small n.
    fn brute(values: &[f64], k: usize) -> f64 {
        let n = values.len();
        (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| {
                (0..n)
                    .filter(|i| m & (1 << i) != 0)
                    .map(|i| values[i])
                    .product::<f64>()
            })
            .sum()
    }

    #[test]
    fn matches_subset_enumeration() {
        let v = [0.3, -1.2, 2.5, 0.7, 1.1, -0.4];
        for k in 0..=6 {
            let a = elementary(&v, k);
            let b = brute(&v, k);
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn gradient_matches_brute_force_difference() {
        let v = [0.9, 1.7, 0.2, 3.1, 0.5];
        for k in 1..=5 {
            let g = elementary_gradient(&v, k);
            for i in 0..v.len() {
                let mut rest = v.to_vec();
                rest.remove(i);
                let want = brute(&rest, k - 1);
                assert!((g[i] - want).abs() < 1e-12 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn degree_above_length_is_zero() {
        assert_eq!(elementary(&[1.0, 2.0], 3), 0.0);
        assert_eq!(elementary_without(&[1.0, 2.0], 2, 0), 0.0);
    }

    #[test]
    fn all_ones() {
        let ones = [1.0; 16];
        // S_k(1,…,1) = C(16, k)
        assert_eq!(elementary(&ones, 8), 12870.0);
        assert_eq!(elementary(&ones, 16), 1.0);
    }
}
