//! Complex 2x2 and 4x4 matrices with the handful of operations gate algebra
//! needs, plus a Jacobi eigensolver for Hermitian 4x4 matrices.

use num_complex::Complex;

use crate::scalar::Real;

/// Complex number over the crate scalar.
pub type C<T> = Complex<T>;

/// Complex two-qubit state vector.
pub type Vector4<T> = [C<T>; 4];

/// Dense complex 2x2 matrix (single-qubit operators).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2<T>(pub [[C<T>; 2]; 2]);

/// Dense complex 4x4 matrix (two-qubit operators).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix4<T>(pub [[C<T>; 4]; 4]);

fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

fn cone<T: Real>() -> C<T> {
    C::new(T::one(), T::zero())
}

impl<T: Real> Matrix2<T> {
    pub fn identity() -> Self {
        let mut m = [[czero(); 2]; 2];
        m[0][0] = cone();
        m[1][1] = cone();
        Matrix2(m)
    }
}

impl<T: Real> Matrix4<T> {
    pub fn zeros() -> Self {
        Matrix4([[czero(); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = cone();
        }
        m
    }

    /// Kronecker product of two single-qubit operators, first factor = qubit 1.
    pub fn kron(a: &Matrix2<T>, b: &Matrix2<T>) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                    }
                }
            }
        }
        m
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == czero() {
                    continue;
                }
                for j in 0..4 {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &Vector4<T>) -> Vector4<T> {
        let mut out = [czero(); 4];
        for i in 0..4 {
            let mut acc = czero();
            for j in 0..4 {
                acc += self.0[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut m = *self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut m = *self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        let mut m = *self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] *= factor;
            }
        }
        m
    }

    pub fn trace(&self) -> C<T> {
        let mut acc = czero();
        for i in 0..4 {
            acc += self.0[i][i];
        }
        acc
    }

    /// Entrywise max-norm.
    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for row in &self.0 {
            for e in row {
                m = m.max(e.norm());
            }
        }
        m
    }

    /// `max |(U^dag U - I)_{ij}|`; zero for exactly unitary matrices.
    pub fn unitarity_defect(&self) -> T {
        self.adjoint().mul(self).sub(&Self::identity()).max_abs()
    }
}

/// Eigendecomposition of a Hermitian 4x4 matrix by cyclic complex Jacobi
/// rotations. Returns `(eigenvalues, V)` with `H = V diag(w) V^dag`.
pub fn hermitian_eigen<T: Real>(h: &Matrix4<T>) -> ([T; 4], Matrix4<T>) {
    let mut a = *h;
    let mut v = Matrix4::identity();
    let scale = a.max_abs().max(T::epsilon());
    let tol = T::epsilon() * scale;

    for _sweep in 0..50 {
        let mut off = T::zero();
        for p in 0..4 {
            for q in (p + 1)..4 {
                off = off.max(a.0[p][q].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let beta = a.0[p][q].norm();
                if beta <= tol {
                    continue;
                }
                // Phase that makes the pivot real, then a real Jacobi rotation.
                let phase = a.0[p][q] / C::new(beta, T::zero());
                let alpha = a.0[p][p].re;
                let gamma = a.0[q][q].re;
                let tau = (gamma - alpha) / (beta + beta);
                let t = if tau == T::zero() {
                    T::one()
                } else {
                    tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let cs = C::new(c, T::zero());
                let sp = phase * C::new(s, T::zero()); // s * e^{i phi}
                let sm = sp.conj(); // s * e^{-i phi}

                for k in 0..4 {
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    a.0[k][p] = akp * cs - akq * sm;
                    a.0[k][q] = akp * sp + akq * cs;
                }
                for k in 0..4 {
                    let apk = a.0[p][k];
                    let aqk = a.0[q][k];
                    a.0[p][k] = apk * cs - aqk * sp;
                    a.0[q][k] = apk * sm + aqk * cs;
                }
                a.0[p][q] = czero();
                a.0[q][p] = czero();
                for k in 0..4 {
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = vkp * cs - vkq * sm;
                    v.0[k][q] = vkp * sp + vkq * cs;
                }
            }
        }
    }

    let w = [a.0[0][0].re, a.0[1][1].re, a.0[2][2].re, a.0[3][3].re];
    (w, v)
}

/// `exp(-i H)` for Hermitian `H`, via eigendecomposition; exactly unitary up
/// to roundoff.
pub fn exp_neg_i_hermitian<T: Real>(h: &Matrix4<T>) -> Matrix4<T> {
    let (w, v) = hermitian_eigen(h);
    let mut phased = v;
    for (j, wj) in w.iter().enumerate() {
        let f = C::new(wj.cos(), -wj.sin());
        for i in 0..4 {
            phased.0[i][j] *= f;
        }
    }
    phased.mul(&v.adjoint())
}
