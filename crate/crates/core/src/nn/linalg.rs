//! Row-major matrix kernels shared by the layers.
//!
//! Every output element is produced by exactly one worker with a fixed
//! internal summation order, so results are bit-identical for any thread
//! count. Parallelism only splits independent output rows.

use rayon::prelude::*;

/// Below this many multiply-adds the rayon dispatch overhead dominates.
const PAR_WORK_THRESHOLD: usize = 1 << 15;

/// y += a * x, elementwise.
#[inline]
pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}

/// Dot product with four fixed-order accumulators (vectorizes without
/// changing the summation order between runs).
#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; 4];
    let chunks = x.len() / 4;
    for i in 0..chunks {
        let b = i * 4;
        acc[0] += x[b] * y[b];
        acc[1] += x[b + 1] * y[b + 1];
        acc[2] += x[b + 2] * y[b + 2];
        acc[3] += x[b + 3] * y[b + 3];
    }
    let mut tail = 0.0;
    for i in chunks * 4..x.len() {
        tail += x[i] * y[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// C[m x n] = A[m x k] . B[k x n]
pub fn matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize, c: &mut [f64]) {
    assert_eq!(a.len(), m * k, "matmul: A size");
    assert_eq!(b.len(), k * n, "matmul: B size");
    assert_eq!(c.len(), m * n, "matmul: C size");
    let row = |i: usize, c_row: &mut [f64]| {
        c_row.fill(0.0);
        let a_row = &a[i * k..(i + 1) * k];
        for (kk, &aik) in a_row.iter().enumerate() {
            axpy(c_row, aik, &b[kk * n..(kk + 1) * n]);
        }
    };
    if m * k * n >= PAR_WORK_THRESHOLD && m > 1 {
        c.par_chunks_mut(n).enumerate().for_each(|(i, r)| row(i, r));
    } else {
        for (i, r) in c.chunks_mut(n).enumerate() {
            row(i, r);
        }
    }
}

/// C[m x n] = A[m x k] . B[n x k]^T  (rows of B are the columns of the product)
pub fn matmul_a_bt(a: &[f64], b: &[f64], m: usize, k: usize, n: usize, c: &mut [f64]) {
    assert_eq!(a.len(), m * k, "matmul_a_bt: A size");
    assert_eq!(b.len(), n * k, "matmul_a_bt: B size");
    assert_eq!(c.len(), m * n, "matmul_a_bt: C size");
    let row = |i: usize, c_row: &mut [f64]| {
        let a_row = &a[i * k..(i + 1) * k];
        for (j, cj) in c_row.iter_mut().enumerate() {
            *cj = dot(a_row, &b[j * k..(j + 1) * k]);
        }
    };
    if m * k * n >= PAR_WORK_THRESHOLD && m > 1 {
        c.par_chunks_mut(n).enumerate().for_each(|(i, r)| row(i, r));
    } else {
        for (i, r) in c.chunks_mut(n).enumerate() {
            row(i, r);
        }
    }
}

/// C[k x n] += A[m x k]^T . B[m x n]  (accumulating; used for weight gradients)
pub fn matmul_at_b_acc(a: &[f64], b: &[f64], m: usize, k: usize, n: usize, c: &mut [f64]) {
    assert_eq!(a.len(), m * k, "matmul_at_b_acc: A size");
    assert_eq!(b.len(), m * n, "matmul_at_b_acc: B size");
    assert_eq!(c.len(), k * n, "matmul_at_b_acc: C size");
    let row = |i: usize, c_row: &mut [f64]| {
        for mm in 0..m {
            axpy(c_row, a[mm * k + i], &b[mm * n..(mm + 1) * n]);
        }
    };
    if m * k * n >= PAR_WORK_THRESHOLD && k > 1 {
        c.par_chunks_mut(n).enumerate().for_each(|(i, r)| row(i, r));
    } else {
        for (i, r) in c.chunks_mut(n).enumerate() {
            row(i, r);
        }
    }
}

/// out[j] += sum over rows of x[m x n]
pub fn col_sums_acc(x: &[f64], m: usize, n: usize, out: &mut [f64]) {
    assert_eq!(x.len(), m * n);
    assert_eq!(out.len(), n);
    for row in x.chunks_exact(n) {
        axpy(out, 1.0, row);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
        let mut c = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut s = 0.0;
                for kk in 0..k {
                    s += a[i * k + kk] * b[kk * n + j];
                }
                c[i * n + j] = s;
            }
        }
        c
    }

    #[test]
    fn matmul_matches_naive() {
        let (m, k, n) = (7, 5, 9);
        let a: Vec<f64> = (0..m * k).map(|i| (i as f64) * 0.3 - 4.0).collect();
        let b: Vec<f64> = (0..k * n).map(|i| (i as f64) * -0.17 + 2.0).collect();
        let mut c = vec![0.0; m * n];
        matmul(&a, &b, m, k, n, &mut c);
        let want = naive_matmul(&a, &b, m, k, n);
        for (x, y) in c.iter().zip(&want) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn transposed_variants_match_naive() {
        let (m, k, n) = (6, 8, 4);
        let a: Vec<f64> = (0..m * k).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let bt: Vec<f64> = (0..n * k).map(|i| ((i * 3) % 13) as f64 * 0.25).collect();
        // b[k x n] from bt[n x k]
        let mut b = vec![0.0; k * n];
        for j in 0..n {
            for kk in 0..k {
                b[kk * n + j] = bt[j * k + kk];
            }
        }
        let mut c1 = vec![0.0; m * n];
        matmul_a_bt(&a, &bt, m, k, n, &mut c1);
        let want = naive_matmul(&a, &b, m, k, n);
        for (x, y) in c1.iter().zip(&want) {
            assert!((x - y).abs() < 1e-12);
        }

        // A^T . B with A[m x k], B[m x n]
        let b2: Vec<f64> = (0..m * n).map(|i| (i as f64).sin()).collect();
        let mut c2 = vec![0.0; k * n];
        matmul_at_b_acc(&a, &b2, m, k, n, &mut c2);
        for i in 0..k {
            for j in 0..n {
                let mut s = 0.0;
                for mm in 0..m {
                    s += a[mm * k + i] * b2[mm * n + j];
                }
                assert!((c2[i * n + j] - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parallel_path_is_bit_identical_to_serial() {
        // Large enough to take the rayon path.
        let (m, k, n) = (64, 48, 50);
        let a: Vec<f64> = (0..m * k).map(|i| ((i * 31 + 7) % 97) as f64 / 9.7).collect();
        let b: Vec<f64> = (0..k * n).map(|i| ((i * 17 + 3) % 89) as f64 / 8.3).collect();
        let mut par = vec![0.0; m * n];
        matmul(&a, &b, m, k, n, &mut par);
        // Serial reference with the same per-element order.
        let mut ser = vec![0.0; m * n];
        for (i, r) in ser.chunks_mut(n).enumerate() {
            r.fill(0.0);
            for kk in 0..k {
                axpy(r, a[i * k + kk], &b[kk * n..(kk + 1) * n]);
            }
        }
        for (x, y) in par.iter().zip(&ser) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
