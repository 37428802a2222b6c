// SPDX-License-Identifier: Apache-2.0

//! Small dense helpers.

use crate::scalar::Scalar;

/// Eigenvalues of a symmetric row-major `n × n` matrix, ascending.
///
/// Cyclic Jacobi rotations; intended for desk-scale matrices.
pub fn symmetric_eigenvalues<S: Scalar>(matrix: &[S], n: usize) -> Vec<S> {
    assert_eq!(matrix.len(), n * n, "matrix must be n × n");
    let mut a = matrix.to_vec();
    let scale: S = a.iter().map(|&x| x * x).sum::<S>().sqrt();
    let eps = S::epsilon() * scale.max(S::min_positive_value());
    for _sweep in 0..100 {
        let off: S = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<S>()
            .sqrt();
        if off <= eps {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= S::min_positive_value() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (S::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<S> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eig
}

/// Combinatorial Laplacian `D − W` of a symmetric weight matrix.
pub fn laplacian<S: Scalar>(weights: &[S], n: usize) -> Vec<S> {
    let mut l: Vec<S> = weights.iter().map(|&w| -w).collect();
    for i in 0..n {
        let degree: S = weights[i * n..(i + 1) * n].iter().copied().sum();
        l[i * n + i] = degree - weights[i * n + i];
    }
    l
}
