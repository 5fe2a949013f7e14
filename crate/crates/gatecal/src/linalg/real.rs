//! Real dense matrices sized for the response model (m settings x 15
//! parameters): one-sided Jacobi SVD for conditioning, LU with partial
//! pivoting for inversion.

use crate::scalar::Real;

/// Row-major dense real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= factor;
        }
        out
    }
}

/// Singular values in descending order, by one-sided (Hestenes) Jacobi:
/// columns are rotated pairwise until mutually orthogonal; their norms are
/// the singular values. Accurate for the small, well-scaled matrices used
/// here, including exactly rank-deficient ones.
pub fn singular_values<T: Real>(a: &Mat<T>) -> Vec<T> {
    let (m, n) = (a.rows, a.cols);
    let mut b = a.data.clone(); // column ops on row-major data
    let col = |b: &[T], j: usize, i: usize| b[i * n + j];

    let eps = T::epsilon() * T::of(8.0);
    for _sweep in 0..40 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = T::zero();
                let mut aqq = T::zero();
                let mut apq = T::zero();
                for i in 0..m {
                    let x = col(&b, p, i);
                    let y = col(&b, q, i);
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if apq.abs() <= eps * (app * aqq).sqrt() || apq == T::zero() {
                    continue;
                }
                let zeta = (aqq - app) / (apq + apq);
                let t = if zeta == T::zero() {
                    T::one()
                } else {
                    zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let x = b[i * n + p];
                    let y = b[i * n + q];
                    b[i * n + p] = c * x - s * y;
                    b[i * n + q] = s * x + c * y;
                }
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<T> = (0..n)
        .map(|j| (0..m).map(|i| col(&b, j, i) * col(&b, j, i)).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    sv
}

/// LU decomposition with partial pivoting; `None` on an exactly zero pivot.
fn lu_decompose<T: Real>(a: &Mat<T>) -> Option<(Vec<T>, Vec<usize>)> {
    let n = a.rows;
    assert_eq!(n, a.cols, "LU requires a square matrix");
    let mut lu = a.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut pivot = k;
        let mut best = lu[k * n + k].abs();
        for i in (k + 1)..n {
            let v = lu[i * n + k].abs();
            if v > best {
                best = v;
                pivot = i;
            }
        }
        if best == T::zero() {
            return None;
        }
        if pivot != k {
            for j in 0..n {
                lu.swap(k * n + j, pivot * n + j);
            }
            perm.swap(k, pivot);
        }
        let d = lu[k * n + k];
        for i in (k + 1)..n {
            let f = lu[i * n + k] / d;
            lu[i * n + k] = f;
            for j in (k + 1)..n {
                let upd = lu[i * n + j] - f * lu[k * n + j];
                lu[i * n + j] = upd;
            }
        }
    }
    Some((lu, perm))
}

fn lu_solve_factored<T: Real>(lu: &[T], perm: &[usize], rhs: &[T]) -> Vec<T> {
    let n = perm.len();
    let mut x: Vec<T> = perm.iter().map(|&pi| rhs[pi]).collect();
    for i in 1..n {
        let mut acc = x[i];
        for j in 0..i {
            acc -= lu[i * n + j] * x[j];
        }
        x[i] = acc;
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= lu[i * n + j] * x[j];
        }
        x[i] = acc / lu[i * n + i];
    }
    x
}

/// Solve `A x = rhs`; `None` if `A` is exactly singular.
pub fn lu_solve<T: Real>(a: &Mat<T>, rhs: &[T]) -> Option<Vec<T>> {
    assert_eq!(rhs.len(), a.rows);
    let (lu, perm) = lu_decompose(a)?;
    Some(lu_solve_factored(&lu, &perm, rhs))
}

/// Full inverse of a square matrix; `None` if exactly singular.
pub fn lu_inverse<T: Real>(a: &Mat<T>) -> Option<Mat<T>> {
    let n = a.rows;
    let (lu, perm) = lu_decompose(a)?;
    let mut inv = Mat::zeros(n, n);
    let mut e = vec![T::zero(); n];
    for j in 0..n {
        e[j] = T::one();
        let x = lu_solve_factored(&lu, &perm, &e);
        for i in 0..n {
            inv.set(i, j, x[i]);
        }
        e[j] = T::zero();
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
    }

    #[test]
    fn svd_of_diagonal() {
        let mut a = Mat::<f64>::zeros(3, 3);
        a.set(0, 0, 3.0);
        a.set(1, 1, -5.0);
        a.set(2, 2, 0.5);
        let sv = singular_values(&a);
        assert!((sv[0] - 5.0).abs() < 1e-14);
        assert!((sv[1] - 3.0).abs() < 1e-14);
        assert!((sv[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn svd_detects_rank_deficiency() {
        // Second row is twice the first.
        let a = Mat::<f64>::from_rows(vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.0, 1.0, -1.0],
        ]);
        let sv = singular_values(&a);
        assert!(sv[2].abs() < 1e-14);
    }

    #[test]
    fn svd_frobenius_consistency() {
        let mut next = lcg(7);
        let a = Mat::from_rows((0..6).map(|_| (0..4).map(|_| next()).collect()).collect());
        let sv = singular_values(&a);
        let fro2: f64 = (0..6).map(|i| a.row(i).iter().map(|x| x * x).sum::<f64>()).sum();
        let sv2: f64 = sv.iter().map(|s| s * s).sum();
        assert!((fro2 - sv2).abs() < 1e-12 * fro2);
    }

    #[test]
    fn lu_solve_round_trip() {
        let mut next = lcg(3);
        for _ in 0..5 {
            let n = 15;
            let a = Mat::from_rows((0..n).map(|_| (0..n).map(|_| next()).collect()).collect());
            let x_true: Vec<f64> = (0..n).map(|_| next()).collect();
            let rhs: Vec<f64> =
                (0..n).map(|i| (0..n).map(|j| a.at(i, j) * x_true[j]).sum()).collect();
            let x = lu_solve(&a, &rhs).expect("random matrix is nonsingular");
            for i in 0..n {
                assert!((x[i] - x_true[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lu_inverse_matches_solve() {
        let mut next = lcg(11);
        let n = 7;
        let a = Mat::from_rows((0..n).map(|_| (0..n).map(|_| next()).collect()).collect());
        let inv = lu_inverse(&a).unwrap();
        // A * A^-1 = I
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|k| a.at(i, k) * inv.at(k, j)).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(lu_solve(&a, &[1.0, 1.0]).is_none());
        assert!(lu_inverse(&a).is_none());
    }
}
